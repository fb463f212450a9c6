#include <cmath>
#include <numbers>

#include "doctest.h"
#include "slicesim/error.hpp"
#include "slicesim/special_functions.hpp"

using namespace slicesim;

namespace {

// 50-digit reference values (mpmath besseli / gamma).
struct BesselCase {
    double nu, x, value;
};
constexpr BesselCase kBessel[] = {
    {0, 0.5, 1.0634833707413235193},  {1, 2, 1.5906368546373290634},
    {0.5, 1, 0.93767488824548764672}, {2.5, 7.5, 172.07689839990608374},
    {7.5, 3, 0.0019359789576891396773}, {20, 5, 5.0242393579718059921e-11},
};

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("bessel at the origin") {
    CHECK(bessel_i(0, 0) == 1.0);
    CHECK(bessel_i(1, 0) == 0.0);
    CHECK(bessel_i(2.5, 0) == 0.0);
    CHECK(std::isinf(bessel_i(-0.5, 0)));
    CHECK(bessel_i_scaled(3.0, 0.0) == 1.0);
    CHECK(bessel_i1_ratio(0.0) == 1.0);
}

TEST_CASE("bessel against high-precision values") {
    for (const auto& c : kBessel) {
        INFO("nu=" << c.nu << " x=" << c.x);
        CHECK(rel(bessel_i(c.nu, c.x), c.value) < 1e-12);
    }
}

TEST_CASE("bessel identities") {
    // I_{1/2}(x) = sqrt(2/(pi x)) sinh(x).
    for (double x : {0.1, 1.0, 4.0, 12.0}) {
        CHECK(rel(bessel_i(0.5, x), std::sqrt(2.0 / (std::numbers::pi * x)) * std::sinh(x)) < 1e-13);
        CHECK(rel(bessel_i(-0.5, x), std::sqrt(2.0 / (std::numbers::pi * x)) * std::cosh(x)) < 1e-13);
        // Recurrence I_{v-1} - I_{v+1} = (2v/x) I_v.
        const double v = 1.7;
        CHECK(rel(bessel_i(v - 1, x) - bessel_i(v + 1, x), 2 * v / x * bessel_i(v, x)) < 1e-11);
        CHECK(rel(bessel_i1_ratio(x * x / 4.0), bessel_i(1, x) / (x / 2.0)) < 1e-13);
    }
}

TEST_CASE("bessel domain and convergence") {
    CHECK_THROWS_AS((void)bessel_i(-1.0, 1.0), ValidationError);
    CHECK_THROWS_AS((void)bessel_i(1.0, -1.0), ValidationError);
    CHECK_THROWS_AS((void)bessel_i_scaled(0.0, 1e12), NumericError);
}

TEST_CASE("gamma") {
    CHECK(gamma_fn(5.0) == doctest::Approx(24.0).epsilon(1e-15));
    CHECK(rel(gamma_fn(0.5), std::sqrt(std::numbers::pi)) < 1e-15);
    CHECK(rel(gamma_fn(7.25), 1155.3810139199896872) < 1e-13);
    CHECK(rel(gamma_fn(33.3), 7.4875775965226323274e+35) < 1e-13);
    CHECK(rel(gamma_fn(50.0), 6.0828186403426756087e+62) < 1e-13);
    CHECK_THROWS_AS((void)gamma_fn(0.0), ValidationError);
    CHECK_THROWS_AS((void)gamma_fn(-2.5), ValidationError);
}
