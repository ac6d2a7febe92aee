#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sleepsched/engine.hpp"

namespace sleepsched {

struct NodeMetrics {
    std::int64_t alive_slots = 0;
    double duty_cycle = 0.0;
    double avg_queue_backlog_packets = 0.0;
    double avg_energy_j_per_slot = 0.0;
};

// Network energies are per slot summed over nodes (an estimate of the
// time-average network energy); node figures average over that node's alive slots.
struct MetricsReport {
    std::int64_t slots = 0;
    double avg_energy_active_j_per_slot = 0.0;  // circuit + transmission
    double avg_energy_sleep_j_per_slot = 0.0;
    double avg_energy_switching_j_per_slot = 0.0;
    double avg_energy_broadcast_j_per_slot = 0.0;
    double avg_total_energy_j_per_slot = 0.0;
    double avg_network_backlog_packets = 0.0;  // time average of sum_n Q_n(t)
    double avg_node_backlog_packets = 0.0;     // mean over nodes
    double mean_duty_cycle = 0.0;              // mean over nodes
    std::int64_t burst_count = 0;
    double mean_burst_length = 0.0;
    double idle_slot_fraction = 0.0;
    double avg_served_packets_per_slot = 0.0;
    std::optional<std::int64_t> first_death_slot;
    std::optional<std::int64_t> network_death_slot;
    std::vector<NodeMetrics> nodes;
};

class EmptyTrace : public std::invalid_argument {
public:
    EmptyTrace() : std::invalid_argument("cannot aggregate an empty trace") {}
};

// Incremental fold over SlotRecords; feeding a trace in any chunking gives the
// same report as aggregate().
class MetricsAccumulator {
public:
    void observe(const SlotRecord& record);
    MetricsReport report() const;
    std::int64_t slots() const { return slots_; }

private:
    struct NodeSums {
        std::int64_t alive_slots = 0;
        std::int64_t active_slots = 0;
        double queue_sum = 0.0;
        double energy_sum = 0.0;
    };

    void close_run();

    std::int64_t slots_ = 0;
    std::int64_t idle_slots_ = 0;
    double active_j_ = 0.0;
    double sleep_j_ = 0.0;
    double switching_j_ = 0.0;
    double broadcast_j_ = 0.0;
    double network_queue_sum_ = 0.0;
    double served_sum_ = 0.0;
    std::vector<NodeSums> nodes_;
    std::optional<int> run_node_;
    std::int64_t run_length_ = 0;
    std::int64_t burst_count_ = 0;
    std::int64_t burst_slots_ = 0;
    LifetimeTracker lifetime_;
};

MetricsReport aggregate(const Trace& trace);

struct SweepRow {
    double v = 0.0;
    MetricsReport report;
};

// Rows ordered by V (stable for equal V).
std::vector<SweepRow> sweep_summary(std::vector<std::pair<double, MetricsReport>> reports);

}  // namespace sleepsched
