#pragma once

#include <span>
#include <stdexcept>

#include "sleepsched/model.hpp"

namespace sleepsched {

struct EnergyBreakdown {
    double sleep_j = 0.0;
    double active_circuit_j = 0.0;
    double transmission_j = 0.0;
    double switching_j = 0.0;
    double broadcast_j = 0.0;
    double total_j = 0.0;

    // Recomputes total_j from the five components in a fixed order.
    void update_total();
    EnergyBreakdown& add_broadcast(double joules);
};

class InvalidTransmit : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Energy of one slot for a node moving prev -> next. Switching time is spent
// at the start of the slot; the rest of the slot runs in the new mode.
//
//   Sleep  -> Sleep : slot * e0
//   Sleep  -> Active: e01 + (slot - t01) * c + alpha * served
//   Active -> Active: slot * c + alpha * served
//   Active -> Sleep : e10 + (slot - t10) * e0
//
// Throws InvalidTransmit if packets are served in a slot that ends asleep.
EnergyBreakdown slot_energy(Mode prev, Mode next, int served_packets, bool transmitting,
                            const EnergyParams& p, double slot_ms);

// S-MAC style slot: sleep for the first half, wake (paying e01 and t01), stay
// active for the remainder, and pay e10 to return to sleep for the next slot.
EnergyBreakdown periodic_slot_energy(int served_packets, bool transmitting, const EnergyParams& p,
                                     double slot_ms);

double network_slot_energy(std::span<const EnergyBreakdown> breakdowns);

// node_count * worst single-node slot (wake or stay active, transmitting mu_max).
double h_max(const SimConfig& cfg);

}  // namespace sleepsched
