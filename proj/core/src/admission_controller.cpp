#include "slicesim/admission_controller.hpp"

#include <algorithm>

#include "slicesim/error.hpp"

namespace slicesim {

namespace {

std::size_t index_or_throw(const StateSpace& space, const SystemState& s) {
    if (s.size() != space.num_types()) throw ContractViolation("initial state has wrong dimension");
    auto idx = space.index_of(s);
    if (!idx) throw ContractViolation("state [" + s.to_string(',') + "] is not feasible");
    return *idx;
}

bool erase_by_id(std::deque<Request>& q, std::uint64_t id) {
    auto it = std::find_if(q.begin(), q.end(), [id](const Request& r) { return r.id == id; });
    if (it == q.end()) return false;
    q.erase(it);
    return true;
}

}  // namespace

std::size_t ControllerState::total_waiting() const noexcept {
    std::size_t n = 0;
    for (const auto& q : queues) n += q.size();
    return n;
}

bool is_transient(const ControllerState& state, const StateSpace& space, const PreferenceMatrix& strategy) {
    const auto index = space.index_of(state.s);
    if (!index) throw ContractViolation("state [" + state.s.to_string(',') + "] is not feasible");
    if (!space.is_admissible_index(*index)) return false;
    for (int q : strategy.column(*index).served()) {
        const auto type = static_cast<std::size_t>(q - 1);
        if (type < state.queues.size() && !state.queues[type].empty() && space.successor(*index, type)) return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// MultiQueueController

MultiQueueController::MultiQueueController(const StateSpace& space, const PreferenceMatrix& strategy,
                                           SystemState initial)
    : space_(&space), strategy_(&strategy) {
    if (auto err = validate(strategy, space)) throw ContractViolation("invalid strategy: " + *err);
    index_ = index_or_throw(space, initial);
    st_.s = std::move(initial);
    st_.queues.resize(space.num_types());
}

ServeResult MultiQueueController::handle_release(std::size_t type, double now) {
    if (type >= st_.s.size()) throw ContractViolation("release of unknown slice type");
    if (st_.s[type] < 1) {
        throw ContractViolation("cannot release a type-" + std::to_string(type + 1) + " slice: none active");
    }
    --st_.s[type];
    index_ = *space_->index_of(st_.s);
    return serve_queues(now);
}

ServeResult MultiQueueController::handle_request(const Request& request, double now) {
    if (request.type >= st_.queues.size()) throw ContractViolation("request for unknown slice type");
    st_.queues[request.type].push_back(request);
    return serve_queues(now);
}

bool MultiQueueController::remove_request(std::uint64_t id, std::size_t type) {
    if (type >= st_.queues.size()) return false;
    return erase_by_id(st_.queues[type], id);
}

ServeResult MultiQueueController::serve_queues(double now) {
    ServeResult result;
    while (space_->is_admissible_index(index_)) {
        const std::size_t before = index_;
        // The preference vector is fixed for a whole pass.
        const PreferenceVector& phi = strategy_->column(index_);
        for (int q : phi.served()) {
            const auto type = static_cast<std::size_t>(q - 1);
            auto& queue = st_.queues[type];
            if (queue.empty()) continue;
            auto next = space_->successor(index_, type);
            if (!next) continue;
            const Request& head = queue.front();
            result.accepted.push_back({head.id, type, now, head.join_time});
            queue.pop_front();
            ++st_.s[type];
            index_ = *next;
        }
        if (index_ == before) break;
    }
    result.blocked = st_.total_waiting() > 0;
    return result;
}

bool MultiQueueController::is_transient() const { return slicesim::is_transient(st_, *space_, *strategy_); }

// ---------------------------------------------------------------------------
// MixedFifoController

MixedFifoController::MixedFifoController(const StateSpace& space, SystemState initial, std::size_t num_queues)
    : space_(&space), waiting_per_type_(space.num_types(), 0) {
    if (num_queues == 0) throw ContractViolation("at least one queue is required");
    index_ = index_or_throw(space, initial);
    s_ = std::move(initial);
    queues_.resize(num_queues);
}

ServeResult MixedFifoController::handle_release(std::size_t type, double now) {
    if (type >= s_.size()) throw ContractViolation("release of unknown slice type");
    if (s_[type] < 1) {
        throw ContractViolation("cannot release a type-" + std::to_string(type + 1) + " slice: none active");
    }
    --s_[type];
    index_ = *space_->index_of(s_);
    return serve_queues(now);
}

ServeResult MixedFifoController::handle_request(const Request& request, double now) {
    if (request.type >= s_.size()) throw ContractViolation("request for unknown slice type");
    queues_[next_queue_].push_back(request);
    next_queue_ = (next_queue_ + 1) % queues_.size();
    ++waiting_per_type_[request.type];
    return serve_queues(now);
}

bool MixedFifoController::remove_request(std::uint64_t id, std::size_t type) {
    for (auto& q : queues_) {
        if (erase_by_id(q, id)) {
            --waiting_per_type_[type];
            return true;
        }
    }
    return false;
}

ServeResult MixedFifoController::serve_queues(double now) {
    ServeResult result;
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto& q : queues_) {
            // Head-of-line blocking: never look past the first request.
            while (!q.empty()) {
                const Request& head = q.front();
                auto next = space_->successor(index_, head.type);
                if (!next) break;
                result.accepted.push_back({head.id, head.type, now, head.join_time});
                ++s_[head.type];
                --waiting_per_type_[head.type];
                index_ = *next;
                q.pop_front();
                changed = true;
            }
        }
    }
    for (const auto& q : queues_) result.blocked = result.blocked || !q.empty();
    return result;
}

std::size_t MixedFifoController::waiting(std::size_t type) const { return waiting_per_type_.at(type); }

std::size_t MixedFifoController::balking_length(std::size_t) const {
    std::size_t n = 0;
    for (const auto& q : queues_) n += q.size();
    return n;
}

bool MixedFifoController::is_transient() const {
    for (const auto& q : queues_) {
        if (!q.empty() && space_->successor(index_, q.front().type)) return true;
    }
    return false;
}

}  // namespace slicesim
