#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sleepsched/model.hpp"
#include "sleepsched/stochastic.hpp"

namespace sleepsched {

// What a policy may observe at the start of slot t. Arrivals of slot t are
// deliberately absent.
struct SlotObservation {
    std::uint64_t slot = 0;
    std::span<const std::int64_t> queues;
    std::span<const Mode> prev_modes;
    std::span<const ChannelDraw> channels;
    std::span<const std::uint8_t> alive;  // nonzero = alive
    double v = 0.0;
    const EnergyParams* energy = nullptr;
    double slot_ms = 2.0;
    bool wake_slot_rate_scaling = false;

    std::size_t size() const { return queues.size(); }
};

struct SlotDecision {
    std::vector<Mode> modes;
    std::optional<int> transmitter;
    std::vector<bool> broadcast;  // Distributed only

    bool idle() const { return !transmitter.has_value(); }
};

// Packets a node serves if it transmits this slot. A waking node serves the
// full rate unless wake-slot rate scaling shortens it to the post-switch window.
int served_rate(Mode prev, int rate, bool wake_slot_rate_scaling, const EnergyParams& p,
                double slot_ms);

// Weights of the drift-plus-penalty objective for one node.
struct ActionWeights {
    double transmit;  // Q*mu - V*E(prev -> Active, transmitting)
    double idle;      // -V*E(prev -> Sleep)
    int served;       // packets served if transmitting

    double gain() const { return transmit - idle; }
    bool transmit_wins() const { return transmit > idle; }
};

ActionWeights action_weights(Mode prev, std::int64_t queue, int rate, double v,
                             const EnergyParams& p, double slot_ms, bool wake_slot_rate_scaling);

// Backlog above which an active node keeps transmitting: V(e1 - e0 - e10)/mu
// using exact slot totals. Returns +inf for mu == 0.
double active_stay_threshold(double v, int mu, const EnergyParams& p, double slot_ms);

// Backlog below which a sleeping node stays asleep: V(e1 + e01 - e0)/mu
// using exact slot totals. Returns +inf for mu == 0.
double sleep_stay_threshold(double v, int mu, const EnergyParams& p, double slot_ms);

// Energy-aware switching and scheduling. Every node whose transmit weight
// beats its own idle weight is a candidate; the candidate with the largest
// gain (ties to the lowest id) transmits and is the only active node.
SlotDecision ess_decide(const SlotObservation& obs);

// ESS with e01 = e10 = 0 inside the weights.
SlotDecision benchmark_decide(const SlotObservation& obs);

// Every node sleeps for the first half of each slot and is active for the
// second half; transmitter maximises Q*mu - V*alpha*mu if positive.
SlotDecision periodic_decide(const SlotObservation& obs);

// Local threshold rules per node, weight broadcast by every active node, and
// the transmitter chosen among active nodes by Q*mu - V*e_sw - V*e1.
SlotDecision distributed_decide(const SlotObservation& obs);

// Stationary randomized policy. Mode flips use draw 0 and transmit thinning
// uses draw 1 of each node's policy stream.
SlotDecision rnd_decide(const RndPolicyParams& params, const SlotObservation& obs,
                        std::uint64_t seed);

}  // namespace sleepsched
