#include "sleepsched/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>

#include "sleepsched/config_io.hpp"
#include "sleepsched/energy.hpp"

namespace sleepsched {

std::vector<std::uint64_t> seed_range(std::uint64_t base, int count) {
    std::vector<std::uint64_t> out;
    for (int i = 0; i < count; ++i) out.push_back(base + static_cast<std::uint64_t>(i));
    return out;
}

void check_sweep_spec(const SweepSpec& spec) {
    if (spec.v_list.empty()) throw std::invalid_argument("V list is empty");
    for (std::size_t i = 1; i < spec.v_list.size(); ++i)
        if (!(spec.v_list[i] > spec.v_list[i - 1]))
            throw std::invalid_argument("V list must be strictly increasing");
    if (spec.policies.empty()) throw std::invalid_argument("policy list is empty");
    if (spec.seeds.empty()) throw std::invalid_argument("at least one seed is required");
    if (spec.jobs < 1) throw std::invalid_argument("jobs must be at least 1");
}

MetricsReport run_metrics(const SimConfig& cfg) {
    MetricsAccumulator acc;
    run_streaming(cfg, [&](const SlotRecord& r) { acc.observe(r); });
    return acc.report();
}

std::vector<SweepPoint> run_sweep(const SimConfig& base, const SweepSpec& spec) {
    check_sweep_spec(spec);
    std::vector<SweepPoint> points;
    for (PolicyKind k : spec.policies)
        for (double v : spec.v_list)
            for (std::uint64_t s : spec.seeds) points.push_back({k, v, s, {}});
    for (const auto& p : points) {
        SimConfig cfg = base;
        cfg.policy.kind = p.policy;
        cfg.v_param = p.v;
        cfg.seed = p.seed;
        validate_config(cfg);
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= points.size()) return;
            try {
                SimConfig cfg = base;
                cfg.policy.kind = points[i].policy;
                cfg.v_param = points[i].v;
                cfg.seed = points[i].seed;
                points[i].report = run_metrics(cfg);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const auto n_threads =
        static_cast<std::size_t>(std::min<std::size_t>(spec.jobs, points.size()));
    std::vector<std::thread> threads;
    for (std::size_t t = 1; t < n_threads; ++t) threads.emplace_back(worker);
    worker();
    for (auto& t : threads) t.join();
    if (failure) std::rethrow_exception(failure);
    return points;
}

namespace {

std::string optional_field(const std::optional<std::int64_t>& v) {
    return v ? std::to_string(*v) : std::string();
}

}  // namespace

void write_sweep_csv_header(std::ostream& os) {
    os << "policy,v,seed,slots,avg_energy_active_j_per_slot,avg_energy_sleep_j_per_slot,"
          "avg_energy_switching_j_per_slot,avg_energy_broadcast_j_per_slot,"
          "avg_total_energy_j_per_slot,avg_network_backlog_packets,avg_node_backlog_packets,"
          "mean_duty_cycle,burst_count,mean_burst_length,idle_slot_fraction,"
          "avg_served_packets_per_slot,first_death_slot,network_death_slot\n";
}

void write_sweep_csv_row(std::ostream& os, const SweepPoint& p) {
    const auto& r = p.report;
    os << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", to_string(p.policy),
                      format_double(p.v), p.seed, r.slots,
                      format_double(r.avg_energy_active_j_per_slot),
                      format_double(r.avg_energy_sleep_j_per_slot),
                      format_double(r.avg_energy_switching_j_per_slot),
                      format_double(r.avg_energy_broadcast_j_per_slot),
                      format_double(r.avg_total_energy_j_per_slot),
                      format_double(r.avg_network_backlog_packets),
                      format_double(r.avg_node_backlog_packets), format_double(r.mean_duty_cycle),
                      r.burst_count, format_double(r.mean_burst_length),
                      format_double(r.idle_slot_fraction),
                      format_double(r.avg_served_packets_per_slot),
                      optional_field(r.first_death_slot), optional_field(r.network_death_slot));
}

bool VerifyReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const BoundCheck& c) { return c.skipped || c.pass; });
}

VerifyReport verify_bounds(const SimConfig& cfg_in, double grid_step, double slack) {
    SimConfig cfg = cfg_in;
    if (cfg.node_count != 1)
        throw OracleError(OracleErrorCode::UnsupportedInstance, "verify needs a 1-node instance");
    cfg.infinite_battery = true;
    if (!cfg.horizon_slots) cfg.horizon_slots = kVerifyDefaultSlots;
    validate_config(cfg);

    VerifyReport rep;
    const auto lambda = cfg.arrival_means();
    rep.lambda = lambda.front();
    const OracleResult oracle = minimize_energy(cfg, lambda, grid_step);
    rep.h_star = oracle.h_star_j_per_slot;
    rep.eps_hat = stability_margin(cfg, lambda, grid_step);
    rep.B = compute_B(cfg);
    rep.h_max = h_max(cfg);
    rep.metrics = run_metrics(cfg);

    BoundCheck energy{"energy", 0.0, rep.metrics.avg_total_energy_j_per_slot, false, false, {}};
    if (cfg.v_param <= 0.0) {
        energy.skipped = true;
        energy.note = "V = 0: B/V is undefined, energy bound skipped";
    } else {
        energy.bound = (rep.h_star + rep.B / cfg.v_param) * (1.0 + slack);
        energy.pass = energy.measured <= energy.bound;
    }
    rep.checks.push_back(energy);

    BoundCheck backlog{"backlog", 0.0, rep.metrics.avg_network_backlog_packets, false, false, {}};
    if (rep.eps_hat <= 0.0) {
        backlog.note = "stability margin is zero";
    } else {
        backlog.bound = (rep.B + cfg.v_param * rep.h_max) / rep.eps_hat * (1.0 + slack);
        backlog.pass = backlog.measured <= backlog.bound;
    }
    rep.checks.push_back(backlog);
    return rep;
}

}  // namespace sleepsched
