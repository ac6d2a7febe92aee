#include "sleepsched/metrics.hpp"

#include <algorithm>

namespace sleepsched {

void MetricsAccumulator::close_run() {
    if (run_length_ >= 2) {
        ++burst_count_;
        burst_slots_ += run_length_;
    }
    run_node_.reset();
    run_length_ = 0;
}

void MetricsAccumulator::observe(const SlotRecord& record) {
    if (nodes_.size() < record.nodes.size()) nodes_.resize(record.nodes.size());
    ++slots_;
    if (record.idle) ++idle_slots_;
    double network_queue = 0.0;
    for (std::size_t n = 0; n < record.nodes.size(); ++n) {
        const auto& o = record.nodes[n];
        if (!o.acted) continue;
        auto& sums = nodes_[n];
        ++sums.alive_slots;
        if (o.mode == Mode::Active) ++sums.active_slots;
        sums.queue_sum += static_cast<double>(o.queue_before);
        sums.energy_sum += o.energy.total_j;
        network_queue += static_cast<double>(o.queue_before);
        active_j_ += o.energy.active_circuit_j + o.energy.transmission_j;
        sleep_j_ += o.energy.sleep_j;
        switching_j_ += o.energy.switching_j;
        broadcast_j_ += o.energy.broadcast_j;
        served_sum_ += o.served;
    }
    network_queue_sum_ += network_queue;

    if (record.transmitter && run_node_ == record.transmitter) {
        ++run_length_;
    } else {
        close_run();
        if (record.transmitter) {
            run_node_ = record.transmitter;
            run_length_ = 1;
        }
    }
    lifetime_.observe(record);
}

MetricsReport MetricsAccumulator::report() const {
    if (slots_ == 0) throw EmptyTrace();
    MetricsReport r;
    const double slots = static_cast<double>(slots_);
    r.slots = slots_;
    r.avg_energy_active_j_per_slot = active_j_ / slots;
    r.avg_energy_sleep_j_per_slot = sleep_j_ / slots;
    r.avg_energy_switching_j_per_slot = switching_j_ / slots;
    r.avg_energy_broadcast_j_per_slot = broadcast_j_ / slots;
    r.avg_total_energy_j_per_slot = r.avg_energy_active_j_per_slot + r.avg_energy_sleep_j_per_slot +
                                    r.avg_energy_switching_j_per_slot +
                                    r.avg_energy_broadcast_j_per_slot;
    r.avg_network_backlog_packets = network_queue_sum_ / slots;
    r.avg_served_packets_per_slot = served_sum_ / slots;
    r.idle_slot_fraction = static_cast<double>(idle_slots_) / slots;

    std::int64_t bursts = burst_count_;
    std::int64_t burst_slots = burst_slots_;
    if (run_length_ >= 2) {
        ++bursts;
        burst_slots += run_length_;
    }
    r.burst_count = bursts;
    r.mean_burst_length = bursts > 0 ? static_cast<double>(burst_slots) / bursts : 0.0;

    double duty_sum = 0.0;
    double backlog_sum = 0.0;
    std::size_t counted = 0;
    for (const auto& s : nodes_) {
        NodeMetrics m;
        m.alive_slots = s.alive_slots;
        if (s.alive_slots > 0) {
            const double alive = static_cast<double>(s.alive_slots);
            m.duty_cycle = static_cast<double>(s.active_slots) / alive;
            m.avg_queue_backlog_packets = s.queue_sum / alive;
            m.avg_energy_j_per_slot = s.energy_sum / alive;
            duty_sum += m.duty_cycle;
            backlog_sum += m.avg_queue_backlog_packets;
            ++counted;
        }
        r.nodes.push_back(m);
    }
    if (counted > 0) {
        r.mean_duty_cycle = duty_sum / static_cast<double>(counted);
        r.avg_node_backlog_packets = backlog_sum / static_cast<double>(counted);
    }
    const auto life = lifetime_.result();
    r.first_death_slot = life.first_death_slot;
    r.network_death_slot = life.network_death_slot;
    return r;
}

MetricsReport aggregate(const Trace& trace) {
    MetricsAccumulator acc;
    for (const auto& r : trace.slots) acc.observe(r);
    return acc.report();
}

std::vector<SweepRow> sweep_summary(std::vector<std::pair<double, MetricsReport>> reports) {
    std::vector<SweepRow> rows;
    rows.reserve(reports.size());
    for (auto& [v, rep] : reports) rows.push_back({v, std::move(rep)});
    std::stable_sort(rows.begin(), rows.end(),
                     [](const SweepRow& a, const SweepRow& b) { return a.v < b.v; });
    return rows;
}

}  // namespace sleepsched
