#include "sleepsched/energy.hpp"

#include <algorithm>

namespace sleepsched {

void EnergyBreakdown::update_total() {
    total_j = sleep_j + active_circuit_j + transmission_j + switching_j + broadcast_j;
}

EnergyBreakdown& EnergyBreakdown::add_broadcast(double joules) {
    broadcast_j += joules;
    update_total();
    return *this;
}

EnergyBreakdown slot_energy(Mode prev, Mode next, int served_packets, bool transmitting,
                            const EnergyParams& p, double slot_ms) {
    if (served_packets < 0) throw InvalidTransmit("served_packets must be non-negative");
    if (next == Mode::Sleep && (transmitting || served_packets > 0))
        throw InvalidTransmit("a node ending the slot asleep cannot transmit");
    if (!transmitting && served_packets > 0)
        throw InvalidTransmit("packets served without a transmission");

    EnergyBreakdown e;
    if (prev == Mode::Sleep && next == Mode::Sleep) {
        e.sleep_j = slot_ms * p.e0_rate_j_per_ms;
    } else if (prev == Mode::Active && next == Mode::Sleep) {
        e.switching_j = p.e10_j;
        e.sleep_j = (slot_ms - p.t10_ms) * p.e0_rate_j_per_ms;
    } else if (prev == Mode::Sleep) {
        e.switching_j = p.include_e01_on_wake ? p.e01_j : 0.0;
        e.active_circuit_j = (slot_ms - p.t01_ms) * p.c_rate_j_per_ms;
        e.transmission_j = p.alpha_j_per_packet * served_packets;
    } else {
        e.active_circuit_j = slot_ms * p.c_rate_j_per_ms;
        e.transmission_j = p.alpha_j_per_packet * served_packets;
    }
    e.update_total();
    return e;
}

EnergyBreakdown periodic_slot_energy(int served_packets, bool transmitting, const EnergyParams& p,
                                     double slot_ms) {
    if (served_packets < 0) throw InvalidTransmit("served_packets must be non-negative");
    if (!transmitting && served_packets > 0)
        throw InvalidTransmit("packets served without a transmission");
    const double half = slot_ms / 2.0;
    EnergyBreakdown e;
    e.sleep_j = half * p.e0_rate_j_per_ms;
    e.switching_j = (p.include_e01_on_wake ? p.e01_j : 0.0) + p.e10_j;
    e.active_circuit_j = std::max(half - p.t01_ms, 0.0) * p.c_rate_j_per_ms;
    e.transmission_j = p.alpha_j_per_packet * served_packets;
    e.update_total();
    return e;
}

double network_slot_energy(std::span<const EnergyBreakdown> breakdowns) {
    double total = 0.0;
    for (const auto& b : breakdowns) total += b.total_j;
    return total;
}

double h_max(const SimConfig& cfg) {
    const int mu = cfg.channel.max_rate();
    const double wake = slot_energy(Mode::Sleep, Mode::Active, mu, true, cfg.energy, cfg.slot_ms).total_j;
    const double stay =
        slot_energy(Mode::Active, Mode::Active, mu, true, cfg.energy, cfg.slot_ms).total_j;
    return cfg.node_count * std::max(wake, stay);
}

}  // namespace sleepsched
