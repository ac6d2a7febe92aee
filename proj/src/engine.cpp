#include "sleepsched/engine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sleepsched {

std::string_view to_string(Termination t) {
    return t == Termination::NetworkDead ? "NetworkDead" : "HorizonReached";
}

std::vector<NodeState> initial_states(const SimConfig& cfg) {
    std::vector<NodeState> states(static_cast<std::size_t>(cfg.node_count));
    for (int n = 0; n < cfg.node_count; ++n) {
        auto& s = states[static_cast<std::size_t>(n)];
        s.node_id = n;
        s.battery_j = cfg.initial_battery_j;
    }
    return states;
}

namespace {

int periodic_served(int rate, const StepContext& ctx) {
    if (!ctx.wake_slot_rate_scaling) return rate;
    const double window = std::max(ctx.slot_ms / 2.0 - ctx.energy->t01_ms, 0.0);
    return static_cast<int>(std::floor(rate * window / ctx.slot_ms));
}

}  // namespace

StepResult step(std::span<const NodeState> states, const SlotDecision& decision,
                std::span<const ChannelDraw> channels, std::span<const int> arrivals,
                const StepContext& ctx) {
    const std::size_t n_nodes = states.size();
    if (decision.modes.size() != n_nodes || channels.size() != n_nodes ||
        arrivals.size() != n_nodes)
        throw InconsistentDecision("decision, channel and arrival sizes must match node count");
    if (decision.transmitter) {
        const auto tx = static_cast<std::size_t>(*decision.transmitter);
        if (tx >= n_nodes || !states[tx].alive || decision.modes[tx] != Mode::Active)
            throw InconsistentDecision("transmitter must be an alive, active node");
    }
    const auto& p = *ctx.energy;

    StepResult out;
    out.states.assign(states.begin(), states.end());
    out.record.slot = ctx.slot;
    out.record.nodes.resize(n_nodes);

    for (std::size_t n = 0; n < n_nodes; ++n) {
        const NodeState& s = states[n];
        NodeState& next = out.states[n];
        NodeOutcome& o = out.record.nodes[n];
        o.channel_index = channels[n].index;
        o.rate = channels[n].rate;
        o.queue_before = s.queue_packets;
        o.queue = s.queue_packets;
        o.battery_j = s.battery_j;
        o.mode = s.mode;

        if (!s.alive) {
            if (decision.modes[n] != s.mode)
                throw InconsistentDecision("dead node " + std::to_string(n) + " changed mode");
            continue;
        }

        const Mode prev = s.mode;
        const Mode mode = decision.modes[n];
        const bool transmitting = decision.transmitter && *decision.transmitter == static_cast<int>(n);
        EnergyBreakdown energy;
        int served = 0;
        if (ctx.policy == PolicyKind::Periodic) {
            served = transmitting ? periodic_served(channels[n].rate, ctx) : 0;
            energy = periodic_slot_energy(served, transmitting, p, ctx.slot_ms);
        } else {
            served = transmitting ? served_rate(prev, channels[n].rate, ctx.wake_slot_rate_scaling,
                                                p, ctx.slot_ms)
                                  : 0;
            energy = slot_energy(prev, mode, served, transmitting, p, ctx.slot_ms);
        }
        if (decision.broadcast.size() == n_nodes && decision.broadcast[n])
            energy.add_broadcast(p.broadcast_j());

        if (!ctx.infinite_battery && energy.total_j > s.battery_j) {
            next.alive = false;
            continue;
        }

        o.acted = true;
        o.mode = mode;
        o.switched = ctx.policy == PolicyKind::Periodic || mode != prev;
        o.transmitted = transmitting;
        o.served = served;
        o.arrivals = arrivals[n];
        o.energy = energy;
        o.queue = std::max<std::int64_t>(s.queue_packets - served, 0) + arrivals[n];
        if (!ctx.infinite_battery) o.battery_j = s.battery_j - energy.total_j;

        next.prev_mode = prev;
        next.mode = mode;
        next.queue_packets = o.queue;
        next.battery_j = o.battery_j;
        next.alive = ctx.infinite_battery || o.battery_j > 0.0;
        if (transmitting) out.record.transmitter = static_cast<int>(n);
    }
    for (std::size_t n = 0; n < n_nodes; ++n) out.record.nodes[n].alive_after = out.states[n].alive;
    out.record.idle = !out.record.transmitter.has_value();
    return out;
}

Simulator::Simulator(SimConfig cfg) : cfg_(validate_config(std::move(cfg))) {
    states_ = initial_states(cfg_);
    const auto n = static_cast<std::size_t>(cfg_.node_count);
    queues_.resize(n);
    modes_.resize(n);
    alive_.resize(n);
}

bool Simulator::finished() const {
    if (cfg_.horizon_slots && slot_ >= *cfg_.horizon_slots) return true;
    return std::none_of(states_.begin(), states_.end(), [](const NodeState& s) { return s.alive; });
}

Termination Simulator::termination() const {
    const bool any_alive =
        std::any_of(states_.begin(), states_.end(), [](const NodeState& s) { return s.alive; });
    return any_alive ? Termination::HorizonReached : Termination::NetworkDead;
}

SlotDecision Simulator::decide(std::span<const ChannelDraw> channels) const {
    SlotObservation obs;
    obs.slot = static_cast<std::uint64_t>(slot_);
    obs.queues = queues_;
    obs.prev_modes = modes_;
    obs.channels = channels;
    obs.alive = alive_;
    obs.v = cfg_.v_param;
    obs.energy = &cfg_.energy;
    obs.slot_ms = cfg_.slot_ms;
    obs.wake_slot_rate_scaling = cfg_.wake_slot_rate_scaling;
    switch (cfg_.policy.kind) {
        case PolicyKind::ESS: return ess_decide(obs);
        case PolicyKind::Benchmark: return benchmark_decide(obs);
        case PolicyKind::Periodic: return periodic_decide(obs);
        case PolicyKind::Distributed: return distributed_decide(obs);
        case PolicyKind::RND: return rnd_decide(cfg_.policy.rnd, obs, cfg_.seed);
    }
    throw std::logic_error("unknown policy");
}

const SlotRecord& Simulator::advance() {
    if (finished()) throw std::logic_error("simulation already finished");
    const auto t = static_cast<std::uint64_t>(slot_);
    const auto channels = sample_channels(cfg_, t);
    const auto arrivals = sample_arrivals(cfg_, t);
    for (std::size_t n = 0; n < states_.size(); ++n) {
        queues_[n] = states_[n].queue_packets;
        modes_[n] = states_[n].mode;
        alive_[n] = states_[n].alive ? 1 : 0;
    }
    const SlotDecision decision = decide(channels);
    StepContext ctx;
    ctx.slot = slot_;
    ctx.policy = cfg_.policy.kind;
    ctx.energy = &cfg_.energy;
    ctx.slot_ms = cfg_.slot_ms;
    ctx.infinite_battery = cfg_.infinite_battery;
    ctx.wake_slot_rate_scaling = cfg_.wake_slot_rate_scaling;
    auto result = step(states_, decision, channels, arrivals, ctx);
    states_ = std::move(result.states);
    last_ = std::move(result.record);
    ++slot_;
    return last_;
}

Termination run_streaming(const SimConfig& cfg, const SlotSink& sink) {
    Simulator sim(cfg);
    while (!sim.finished()) sink(sim.advance());
    return sim.termination();
}

Trace run(const SimConfig& cfg) {
    Trace trace;
    trace.config = validate_config(cfg);
    trace.termination =
        run_streaming(trace.config, [&](const SlotRecord& r) { trace.slots.push_back(r); });
    return trace;
}

void LifetimeTracker::observe(const SlotRecord& record) {
    if (death_.size() < record.nodes.size()) death_.resize(record.nodes.size());
    for (std::size_t n = 0; n < record.nodes.size(); ++n) {
        const auto& o = record.nodes[n];
        if (death_[n] || o.alive_after) continue;
        death_[n] = record.slot + (o.acted ? 1 : 0);
    }
}

Lifetime LifetimeTracker::result() const {
    Lifetime out;
    if (death_.empty()) return out;
    bool all_dead = true;
    std::int64_t last = 0;
    for (const auto& d : death_) {
        if (!d) {
            all_dead = false;
            continue;
        }
        if (!out.first_death_slot || *d < *out.first_death_slot) out.first_death_slot = *d;
        last = std::max(last, *d);
    }
    if (all_dead) out.network_death_slot = last;
    return out;
}

Lifetime lifetime(const Trace& trace) {
    LifetimeTracker tracker;
    for (const auto& r : trace.slots) tracker.observe(r);
    return tracker.result();
}

}  // namespace sleepsched
