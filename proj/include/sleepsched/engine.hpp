#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "sleepsched/energy.hpp"
#include "sleepsched/model.hpp"
#include "sleepsched/policies.hpp"
#include "sleepsched/stochastic.hpp"

namespace sleepsched {

struct NodeState {
    int node_id = 0;
    Mode mode = Mode::Sleep;       // mode held during the most recent slot
    Mode prev_mode = Mode::Sleep;  // mode held the slot before that
    std::int64_t queue_packets = 0;
    double battery_j = 0.0;
    bool alive = true;
};

std::vector<NodeState> initial_states(const SimConfig& cfg);

struct NodeOutcome {
    Mode mode = Mode::Sleep;  // mode at the end of the slot
    bool switched = false;
    bool acted = false;        // alive during the slot (dead or frozen nodes do nothing)
    bool alive_after = false;
    bool transmitted = false;
    int channel_index = 0;
    int rate = 0;
    int served = 0;            // packets of service offered (charged at alpha each)
    int arrivals = 0;
    std::int64_t queue_before = 0;
    std::int64_t queue = 0;    // after service and arrivals
    double battery_j = 0.0;    // after the debit
    EnergyBreakdown energy;
};

struct SlotRecord {
    std::int64_t slot = 0;
    std::vector<NodeOutcome> nodes;
    std::optional<int> transmitter;  // after death freezing
    bool idle = true;
};

enum class Termination { HorizonReached, NetworkDead };

std::string_view to_string(Termination t);

struct Trace {
    SimConfig config;
    std::vector<SlotRecord> slots;
    Termination termination = Termination::HorizonReached;
};

class InconsistentDecision : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

struct StepContext {
    std::int64_t slot = 0;
    PolicyKind policy = PolicyKind::ESS;
    const EnergyParams* energy = nullptr;
    double slot_ms = 2.0;
    bool infinite_battery = false;
    bool wake_slot_rate_scaling = false;
};

struct StepResult {
    std::vector<NodeState> states;
    SlotRecord record;
};

// Applies one slot: serve, queue update Q' = max(Q - served, 0) + R, energy
// debit. A node that cannot afford its slot is frozen: it serves and pays
// nothing, keeps its mode and residual battery, and is dead from then on.
// Dead nodes receive no arrivals.
StepResult step(std::span<const NodeState> states, const SlotDecision& decision,
                std::span<const ChannelDraw> channels, std::span<const int> arrivals,
                const StepContext& ctx);

// Slot loop: channels -> arrivals -> decision (sees Q(t), not slot-t
// arrivals) -> serve -> add arrivals -> debit energy.
class Simulator {
public:
    explicit Simulator(SimConfig cfg);

    bool finished() const;
    const SlotRecord& advance();
    Termination termination() const;

    const SimConfig& config() const { return cfg_; }
    const std::vector<NodeState>& states() const { return states_; }
    std::int64_t slot() const { return slot_; }

private:
    SlotDecision decide(std::span<const ChannelDraw> channels) const;

    SimConfig cfg_;
    std::vector<NodeState> states_;
    std::int64_t slot_ = 0;
    SlotRecord last_;
    std::vector<std::int64_t> queues_;
    std::vector<Mode> modes_;
    std::vector<std::uint8_t> alive_;
};

using SlotSink = std::function<void(const SlotRecord&)>;

// Streams every SlotRecord to sink without retaining the trace.
Termination run_streaming(const SimConfig& cfg, const SlotSink& sink);

Trace run(const SimConfig& cfg);

struct Lifetime {
    std::optional<std::int64_t> first_death_slot;
    std::optional<std::int64_t> network_death_slot;
};

// Death slot of a node = first slot in which it no longer acts.
Lifetime lifetime(const Trace& trace);

// Incremental form used by streaming consumers.
class LifetimeTracker {
public:
    void observe(const SlotRecord& record);
    Lifetime result() const;

private:
    std::vector<std::optional<std::int64_t>> death_;
};

}  // namespace sleepsched
