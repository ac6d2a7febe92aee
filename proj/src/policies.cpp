#include "sleepsched/policies.hpp"

#include <cmath>
#include <limits>

#include "sleepsched/energy.hpp"

namespace sleepsched {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

SlotDecision hold_modes(const SlotObservation& obs) {
    SlotDecision d;
    d.modes.assign(obs.prev_modes.begin(), obs.prev_modes.end());
    d.broadcast.assign(obs.size(), false);
    return d;
}

SlotDecision switching_aware_decide(const SlotObservation& obs, const EnergyParams& weights_energy) {
    SlotDecision d = hold_modes(obs);
    std::optional<int> best;
    double best_gain = 0.0;
    for (std::size_t n = 0; n < obs.size(); ++n) {
        if (!obs.alive[n]) continue;
        d.modes[n] = Mode::Sleep;
        const auto w = action_weights(obs.prev_modes[n], obs.queues[n], obs.channels[n].rate, obs.v,
                                      weights_energy, obs.slot_ms, obs.wake_slot_rate_scaling);
        if (!w.transmit_wins()) continue;
        if (!best || w.gain() > best_gain) {
            best = static_cast<int>(n);
            best_gain = w.gain();
        }
    }
    if (best) {
        d.transmitter = best;
        d.modes[static_cast<std::size_t>(*best)] = Mode::Active;
    }
    return d;
}

}  // namespace

int served_rate(Mode prev, int rate, bool wake_slot_rate_scaling, const EnergyParams& p,
                double slot_ms) {
    if (prev == Mode::Active || !wake_slot_rate_scaling) return rate;
    return static_cast<int>(std::floor(rate * (slot_ms - p.t01_ms) / slot_ms));
}

ActionWeights action_weights(Mode prev, std::int64_t queue, int rate, double v,
                             const EnergyParams& p, double slot_ms, bool wake_slot_rate_scaling) {
    const int served = served_rate(prev, rate, wake_slot_rate_scaling, p, slot_ms);
    const double e_tx = slot_energy(prev, Mode::Active, served, true, p, slot_ms).total_j;
    const double e_idle = slot_energy(prev, Mode::Sleep, 0, false, p, slot_ms).total_j;
    return {static_cast<double>(queue) * served - v * e_tx, -v * e_idle, served};
}

double active_stay_threshold(double v, int mu, const EnergyParams& p, double slot_ms) {
    if (mu <= 0) return kInf;
    const double e1 = slot_energy(Mode::Active, Mode::Active, mu, true, p, slot_ms).total_j;
    const double e_drain = slot_energy(Mode::Active, Mode::Sleep, 0, false, p, slot_ms).total_j;
    return v * (e1 - e_drain) / mu;
}

double sleep_stay_threshold(double v, int mu, const EnergyParams& p, double slot_ms) {
    if (mu <= 0) return kInf;
    const double e_wake = slot_energy(Mode::Sleep, Mode::Active, mu, true, p, slot_ms).total_j;
    const double e0 = slot_energy(Mode::Sleep, Mode::Sleep, 0, false, p, slot_ms).total_j;
    return v * (e_wake - e0) / mu;
}

SlotDecision ess_decide(const SlotObservation& obs) {
    return switching_aware_decide(obs, *obs.energy);
}

SlotDecision benchmark_decide(const SlotObservation& obs) {
    EnergyParams blind = *obs.energy;
    blind.e01_j = 0.0;
    blind.e10_j = 0.0;
    return switching_aware_decide(obs, blind);
}

SlotDecision periodic_decide(const SlotObservation& obs) {
    SlotDecision d = hold_modes(obs);
    const double alpha = obs.energy->alpha_j_per_packet;
    std::optional<int> best;
    double best_weight = 0.0;
    for (std::size_t n = 0; n < obs.size(); ++n) {
        if (!obs.alive[n]) continue;
        d.modes[n] = Mode::Active;
        const double mu = obs.channels[n].rate;
        const double w = static_cast<double>(obs.queues[n]) * mu - obs.v * alpha * mu;
        if (w > best_weight) {
            best = static_cast<int>(n);
            best_weight = w;
        }
    }
    d.transmitter = best;
    return d;
}

SlotDecision distributed_decide(const SlotObservation& obs) {
    SlotDecision d = hold_modes(obs);
    const auto& p = *obs.energy;
    std::optional<int> best;
    double best_weight = -kInf;
    for (std::size_t n = 0; n < obs.size(); ++n) {
        if (!obs.alive[n]) continue;
        const Mode prev = obs.prev_modes[n];
        const int served =
            served_rate(prev, obs.channels[n].rate, obs.wake_slot_rate_scaling, p, obs.slot_ms);
        const double q = static_cast<double>(obs.queues[n]);
        bool active;
        if (prev == Mode::Active) {
            active = q > active_stay_threshold(obs.v, served, p, obs.slot_ms);
        } else {
            active = q > sleep_stay_threshold(obs.v, served, p, obs.slot_ms);
        }
        d.modes[n] = active ? Mode::Active : Mode::Sleep;
        d.broadcast[n] = active;
        if (!active) continue;
        const double e = slot_energy(prev, Mode::Active, served, true, p, obs.slot_ms).total_j;
        const double w = q * served - obs.v * e;
        if (w > best_weight) {
            best = static_cast<int>(n);
            best_weight = w;
        }
    }
    d.transmitter = best;
    return d;
}

SlotDecision rnd_decide(const RndPolicyParams& params, const SlotObservation& obs,
                        std::uint64_t seed) {
    SlotDecision d = hold_modes(obs);
    for (std::size_t n = 0; n < obs.size(); ++n) {
        if (!obs.alive[n]) continue;
        const RngStream rng(seed, StreamLabel::Policy, static_cast<int>(n));
        const auto k = static_cast<std::size_t>(obs.channels[n].index);
        const double u = rng.uniform(obs.slot, 0);
        if (obs.prev_modes[n] == Mode::Sleep) {
            d.modes[n] = u < params.p01[n][k] ? Mode::Active : Mode::Sleep;
        } else {
            d.modes[n] = u < params.p10[n][k] ? Mode::Sleep : Mode::Active;
        }
        if (d.modes[n] == Mode::Active && !d.transmitter &&
            rng.uniform(obs.slot, 1) < params.pi_tr[n][k]) {
            d.transmitter = static_cast<int>(n);
        }
    }
    return d;
}

}  // namespace sleepsched
