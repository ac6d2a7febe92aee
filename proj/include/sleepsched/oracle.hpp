#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "sleepsched/model.hpp"

namespace sleepsched {

enum class EvaluationMode { ClosedForm, Simulated };

std::string_view to_string(EvaluationMode m);

enum class OracleErrorCode { InfeasibleRate, InvalidParams, UnsupportedInstance };

class OracleError : public std::runtime_error {
public:
    OracleError(OracleErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}
    OracleErrorCode code() const noexcept { return code_; }

private:
    OracleErrorCode code_;
};

struct RndEvaluation {
    double energy_j_per_slot = 0.0;       // network total
    std::vector<double> service_rates;    // packets per slot, per node
};

inline constexpr std::int64_t kDefaultSimulatedSlots = 1'000'000;

// ClosedForm: each node is a two-state chain whose transition probabilities are
// selected by the i.i.d. channel state of the current slot, so in steady state
//   pi_A = a / (a + b),  a = sum_k pi_k p01_k,  b = sum_k pi_k p10_k
// (pi_A = 0 when a = 0: nodes start asleep). Nodes are independent, so
// transmitter thinning in id order multiplies node n's solo rate by
// prod_{m<n} (1 - s_m), s_m being node m's per-slot success probability.
// Simulated: runs the engine with infinite batteries for `slots` slots.
RndEvaluation evaluate_rnd(const RndPolicyParams& params, const SimConfig& cfg, EvaluationMode mode,
                           std::int64_t slots = kDefaultSimulatedSlots);

struct OracleResult {
    double h_star_j_per_slot = 0.0;
    RndPolicyParams best_params;
    std::vector<double> achieved_rates;
    std::vector<double> target_rates;
    double grid_step = 0.0;
    EvaluationMode evaluation_mode = EvaluationMode::ClosedForm;
};

// Minimum-energy stationary randomized policy meeting per-node target rates.
//
// Mode-transition probabilities (p01_k, p10_k) range over the lattice
// {0, step, ..., 1}. Given those, transmit energy equals alpha times the
// service rate, so the cheapest pi_tr meets each target exactly and the
// search reduces to minimising mode energy over feasible lattice points.
// For one node that search is exact. For two nodes it is exact while the
// per-node lattice has at most 1296 profiles ((L+1)^(2K)); beyond that each
// node is restricted to, per (a, b) lattice sum, the profile that puts
// wake-up mass on the best channels and sleep mass on the worst.
//
// Supports node_count <= 2, at most 3 channel states, and 1/step an integer
// in [2, 100]. Throws OracleError(InfeasibleRate) when no lattice point
// serves the targets.
OracleResult minimize_energy(const SimConfig& cfg, std::span<const double> target_rates,
                             double grid_step);

// Largest eps such that target + eps * 1 is still servable (bisection on
// feasibility). Throws InfeasibleRate if the target itself is not servable.
double stability_margin(const SimConfig& cfg, std::span<const double> target_rates,
                        double grid_step);

}  // namespace sleepsched
