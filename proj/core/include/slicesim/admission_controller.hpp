#pragma once

// Queue-based slice admission.
//
// MultiQueueController is the heterogeneous multi-queue controller: one FCFS
// queue per slice type, served in the order given by the preference vector of
// the current state until a full pass accepts nothing. MixedFifoController
// holds requests of all types in one or more FCFS queues and only ever looks
// at queue heads; with one queue it is the greedy single-queue baseline.

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <vector>

#include "slicesim/slice_model.hpp"
#include "slicesim/strategy.hpp"

namespace slicesim {

struct Request {
    std::uint64_t id = 0;
    std::size_t type = 0;  ///< 0-based type index
    double arrival_time = 0.0;
    double join_time = 0.0;
    std::optional<double> reneging_deadline;
};

struct Acceptance {
    std::uint64_t request_id = 0;
    std::size_t type = 0;
    double time = 0.0;
    double join_time = 0.0;
};

struct ServeResult {
    std::vector<Acceptance> accepted;
    /// Some request is still waiting after the pass.
    bool blocked = false;
};

/// System state plus the contents of every FCFS queue.
struct ControllerState {
    SystemState s;
    std::vector<std::deque<Request>> queues;

    [[nodiscard]] std::size_t queue_length(std::size_t type) const { return queues.at(type).size(); }
    [[nodiscard]] std::size_t total_waiting() const noexcept;
};

/// True if some queue listed before 0 in the column of `state.s` is nonempty
/// and its head fits. False on the boundary of the admissibility region.
[[nodiscard]] bool is_transient(const ControllerState& state, const StateSpace& space,
                                const PreferenceMatrix& strategy);

/// Common interface the simulator drives.
class Controller {
public:
    virtual ~Controller() = default;

    [[nodiscard]] virtual const SystemState& state() const noexcept = 0;

    /// Frees one slice of `type`, then serves the queues. Throws
    /// ContractViolation if no such slice is active.
    virtual ServeResult handle_release(std::size_t type, double now) = 0;

    /// Enqueues `request` at the tail of its queue, then serves the queues.
    virtual ServeResult handle_request(const Request& request, double now) = 0;

    /// Removes a waiting request (reneging). False if it is not waiting.
    virtual bool remove_request(std::uint64_t id, std::size_t type) = 0;

    /// Requests of `type` currently waiting.
    [[nodiscard]] virtual std::size_t waiting(std::size_t type) const = 0;

    /// Queue length an arriving request of `type` sees when deciding to balk.
    [[nodiscard]] virtual std::size_t balking_length(std::size_t type) const = 0;

    /// True if the controller could still accept a waiting request without
    /// any new event. Always false between events.
    [[nodiscard]] virtual bool is_transient() const = 0;
};

class MultiQueueController final : public Controller {
public:
    /// `model`, `space` and `strategy` must outlive the controller.
    /// Throws ContractViolation if `initial` is not feasible or the strategy
    /// does not match the state space.
    MultiQueueController(const StateSpace& space, const PreferenceMatrix& strategy, SystemState initial);

    [[nodiscard]] const SystemState& state() const noexcept override { return st_.s; }
    [[nodiscard]] const ControllerState& controller_state() const noexcept { return st_; }

    ServeResult handle_release(std::size_t type, double now) override;
    ServeResult handle_request(const Request& request, double now) override;
    bool remove_request(std::uint64_t id, std::size_t type) override;

    /// Preference-ordered passes over the queues, repeated until a pass
    /// changes nothing or the state leaves the admissible region.
    ServeResult serve_queues(double now);

    [[nodiscard]] std::size_t waiting(std::size_t type) const override { return st_.queue_length(type); }
    [[nodiscard]] std::size_t balking_length(std::size_t type) const override { return st_.queue_length(type); }
    [[nodiscard]] bool is_transient() const override;

private:
    const StateSpace* space_;
    const PreferenceMatrix* strategy_;
    ControllerState st_;
    std::size_t index_;
};

class MixedFifoController final : public Controller {
public:
    /// Arriving requests are routed round-robin over `num_queues` queues.
    MixedFifoController(const StateSpace& space, SystemState initial, std::size_t num_queues = 1);

    [[nodiscard]] const SystemState& state() const noexcept override { return s_; }

    ServeResult handle_release(std::size_t type, double now) override;
    ServeResult handle_request(const Request& request, double now) override;
    bool remove_request(std::uint64_t id, std::size_t type) override;

    ServeResult serve_queues(double now);

    [[nodiscard]] std::size_t waiting(std::size_t type) const override;
    /// Total number of waiting requests over all queues and types.
    [[nodiscard]] std::size_t balking_length(std::size_t type) const override;
    [[nodiscard]] bool is_transient() const override;

    [[nodiscard]] const std::vector<std::deque<Request>>& queues() const noexcept { return queues_; }

private:
    const StateSpace* space_;
    SystemState s_;
    std::size_t index_;
    std::vector<std::deque<Request>> queues_;
    std::size_t next_queue_ = 0;
    std::vector<std::size_t> waiting_per_type_;
};

}  // namespace slicesim
