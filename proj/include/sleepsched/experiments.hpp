#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sleepsched/metrics.hpp"
#include "sleepsched/model.hpp"
#include "sleepsched/oracle.hpp"

namespace sleepsched {

struct SweepSpec {
    std::vector<PolicyKind> policies;
    std::vector<double> v_list;         // strictly increasing
    std::vector<std::uint64_t> seeds;   // shared by every policy, so runs are paired
    int jobs = 1;
};

struct SweepPoint {
    PolicyKind policy = PolicyKind::ESS;
    double v = 0.0;
    std::uint64_t seed = 0;
    MetricsReport report;
};

// `count` consecutive seeds starting at `base`.
std::vector<std::uint64_t> seed_range(std::uint64_t base, int count);

// Throws std::invalid_argument on an empty or non-increasing V list, no
// policies or no seeds.
void check_sweep_spec(const SweepSpec& spec);

// Points in (policy, V, seed) order, independent of `jobs`.
std::vector<SweepPoint> run_sweep(const SimConfig& base, const SweepSpec& spec);

MetricsReport run_metrics(const SimConfig& cfg);

void write_sweep_csv_header(std::ostream& os);
void write_sweep_csv_row(std::ostream& os, const SweepPoint& p);

struct BoundCheck {
    std::string name;
    double bound = 0.0;
    double measured = 0.0;
    bool skipped = false;
    bool pass = false;
    std::string note;
};

struct VerifyReport {
    double lambda = 0.0;
    double h_star = 0.0;
    double eps_hat = 0.0;
    double B = 0.0;
    double h_max = 0.0;
    MetricsReport metrics;
    std::vector<BoundCheck> checks;

    bool all_pass() const;
};

inline constexpr double kBoundSlack = 0.05;
inline constexpr std::int64_t kVerifyDefaultSlots = 1'000'000;

// Energy and backlog bounds for a one-node instance run with an infinite
// battery (horizon defaults to kVerifyDefaultSlots). Throws OracleError when
// the mean arrival rate is not servable.
VerifyReport verify_bounds(const SimConfig& cfg, double grid_step, double slack = kBoundSlack);

}  // namespace sleepsched
