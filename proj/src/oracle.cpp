#include "sleepsched/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <set>
#include <sstream>

#include "sleepsched/energy.hpp"
#include "sleepsched/engine.hpp"
#include "sleepsched/policies.hpp"

namespace sleepsched {

std::string_view to_string(EvaluationMode m) {
    return m == EvaluationMode::ClosedForm ? "ClosedForm" : "Simulated";
}

namespace {

constexpr double kRateTolerance = 1e-12;
constexpr double kSumMergeTolerance = 1e-12;
// Two-node searches enumerate every lattice profile up to this many per node.
constexpr double kExhaustiveProfileLimit = 1296;

bool meets(double achieved, double target) {
    return achieved >= target * (1.0 - kRateTolerance) - kRateTolerance;
}

struct ModeEnergies {
    double sleep_stay;   // S -> S
    double go_sleep;     // A -> S
    double wake;         // S -> A, no transmission
    double active_stay;  // A -> A, no transmission
    double alpha;
};

ModeEnergies mode_energies(const SimConfig& cfg) {
    const auto& p = cfg.energy;
    return {slot_energy(Mode::Sleep, Mode::Sleep, 0, false, p, cfg.slot_ms).total_j,
            slot_energy(Mode::Active, Mode::Sleep, 0, false, p, cfg.slot_ms).total_j,
            slot_energy(Mode::Sleep, Mode::Active, 0, false, p, cfg.slot_ms).total_j,
            slot_energy(Mode::Active, Mode::Active, 0, false, p, cfg.slot_ms).total_j,
            p.alpha_j_per_packet};
}

struct ChannelTable {
    std::vector<double> prob;
    std::vector<double> rate;       // when already active
    std::vector<double> wake_rate;  // in a wake-up slot
};

ChannelTable channel_table(const SimConfig& cfg) {
    ChannelTable t;
    for (const auto& s : cfg.channel.states) {
        t.prob.push_back(s.probability);
        t.rate.push_back(s.rate);
        t.wake_rate.push_back(
            served_rate(Mode::Sleep, s.rate, cfg.wake_slot_rate_scaling, cfg.energy, cfg.slot_ms));
    }
    return t;
}

// Steady-state description of one node's chain for fixed (p01, p10).
struct NodeProfile {
    std::vector<double> p01;
    std::vector<double> p10;
    double a = 0.0;
    double b = 0.0;
    double pi_active = 0.0;
    double mode_energy = 0.0;
    std::vector<double> w;  // expected packets per unit pi_tr, per channel
    std::vector<double> c;  // probability of being active, per channel
    double max_rate = 0.0;
};

NodeProfile make_profile(std::vector<double> p01, std::vector<double> p10, const ChannelTable& ch,
                         const ModeEnergies& e) {
    NodeProfile np;
    const std::size_t k_count = ch.prob.size();
    for (std::size_t k = 0; k < k_count; ++k) {
        np.a += ch.prob[k] * p01[k];
        np.b += ch.prob[k] * p10[k];
    }
    np.pi_active = np.a + np.b > 0.0 ? np.a / (np.a + np.b) : 0.0;
    const double pi_s = 1.0 - np.pi_active;
    const double pi_a = np.pi_active;
    np.mode_energy = pi_s * ((1.0 - np.a) * e.sleep_stay + np.a * e.wake) +
                     pi_a * (np.b * e.go_sleep + (1.0 - np.b) * e.active_stay);
    np.w.resize(k_count);
    np.c.resize(k_count);
    for (std::size_t k = 0; k < k_count; ++k) {
        const double waking = ch.prob[k] * pi_s * p01[k];
        const double staying = ch.prob[k] * pi_a * (1.0 - p10[k]);
        np.w[k] = waking * ch.wake_rate[k] + staying * ch.rate[k];
        np.c[k] = waking + staying;
        np.max_rate += np.w[k];
    }
    np.p01 = std::move(p01);
    np.p10 = std::move(p10);
    return np;
}

// Fills pi_tr toward `target` packets per slot, best packets-per-activity first,
// never exceeding `cap`.
std::vector<double> greedy_pi_tr(const NodeProfile& np, double target,
                                 const std::vector<double>& cap) {
    const std::size_t k_count = np.w.size();
    std::vector<std::size_t> order(k_count);
    for (std::size_t k = 0; k < k_count; ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        const double ri = np.c[i] > 0.0 ? np.w[i] / np.c[i] : 0.0;
        const double rj = np.c[j] > 0.0 ? np.w[j] / np.c[j] : 0.0;
        return ri > rj;
    });
    std::vector<double> tau(k_count, 0.0);
    double remaining = target;
    for (std::size_t k : order) {
        if (remaining <= 0.0) break;
        if (np.w[k] <= 0.0) continue;
        tau[k] = std::min(cap[k], remaining / np.w[k]);
        remaining -= tau[k] * np.w[k];
    }
    return tau;
}

double dot(const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

struct JointPlan {
    bool feasible = false;
    std::vector<double> tau1;
    double s1 = 0.0;
};

// Node 1 must deliver exactly `lambda1`; node 2 is capped per channel by
// 1 - tau1 and thinned by (1 - s1). Maximises node 2's capacity
// (1 - c1.tau)(w2.(1 - tau)) over the slice {tau in [0,1]^K : w1.tau = lambda1}.
// Both factors are affine, so the maximum over the (convex) slice lies on a
// segment between two of its vertices.
JointPlan plan_pair(const NodeProfile& n1, const NodeProfile& n2, double lambda1, double lambda2) {
    const std::size_t k_count = n1.w.size();
    JointPlan plan;
    std::vector<std::vector<double>> vertices;
    if (lambda1 <= 0.0) {
        vertices.push_back(std::vector<double>(k_count, 0.0));
    } else {
        if (!meets(n1.max_rate, lambda1)) return plan;
        std::vector<std::size_t> free_coords;
        for (std::size_t k = 0; k < k_count; ++k)
            if (n1.w[k] > 0.0) free_coords.push_back(k);
        const std::size_t m = free_coords.size();
        for (std::size_t jj = 0; jj < m; ++jj) {
            const std::size_t j = free_coords[jj];
            for (std::uint32_t mask = 0; mask < (1u << (m - 1)); ++mask) {
                std::vector<double> tau(k_count, 0.0);
                double partial = 0.0;
                std::uint32_t bit = 0;
                for (std::size_t ii = 0; ii < m; ++ii) {
                    if (ii == jj) continue;
                    const std::size_t k = free_coords[ii];
                    tau[k] = (mask >> bit++) & 1u ? 1.0 : 0.0;
                    partial += tau[k] * n1.w[k];
                }
                double t = (lambda1 - partial) / n1.w[j];
                if (t < -kRateTolerance || t > 1.0 + kRateTolerance) continue;
                tau[j] = std::clamp(t, 0.0, 1.0);
                vertices.push_back(std::move(tau));
            }
        }
        if (vertices.empty()) {
            // lambda1 within tolerance of the full capacity
            std::vector<double> tau(k_count, 0.0);
            for (std::size_t k : free_coords) tau[k] = 1.0;
            vertices.push_back(std::move(tau));
        }
    }

    auto u_of = [&](const std::vector<double>& tau) { return 1.0 - dot(n1.c, tau); };
    auto v_of = [&](const std::vector<double>& tau) {
        double v = 0.0;
        for (std::size_t k = 0; k < k_count; ++k) v += n2.w[k] * (1.0 - tau[k]);
        return v;
    };

    double best = -1.0;
    std::vector<double> best_tau;
    auto consider = [&](const std::vector<double>& tau) {
        const double f = u_of(tau) * v_of(tau);
        if (f > best) {
            best = f;
            best_tau = tau;
        }
    };
    for (const auto& v : vertices) consider(v);
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        for (std::size_t j = i + 1; j < vertices.size(); ++j) {
            const double u0 = u_of(vertices[i]), du = u_of(vertices[j]) - u0;
            const double v0 = v_of(vertices[i]), dv = v_of(vertices[j]) - v0;
            if (du * dv >= 0.0) continue;
            const double t = -(u0 * dv + v0 * du) / (2.0 * du * dv);
            if (t <= 0.0 || t >= 1.0) continue;
            std::vector<double> tau(k_count);
            for (std::size_t k = 0; k < k_count; ++k)
                tau[k] = vertices[i][k] + t * (vertices[j][k] - vertices[i][k]);
            consider(tau);
        }
    }
    plan.feasible = lambda2 <= 0.0 || meets(best, lambda2);
    plan.tau1 = best_tau;
    plan.s1 = dot(n1.c, best_tau);
    return plan;
}

std::size_t lattice_size(double grid_step) {
    const double inv = 1.0 / grid_step;
    const double rounded = std::round(inv);
    if (!(grid_step > 0.0) || std::abs(inv - rounded) > 1e-9 || rounded < 2.0 || rounded > 100.0) {
        std::ostringstream os;
        os << "grid_step " << grid_step << " must be 1/L for an integer L in [2, 100]";
        throw OracleError(OracleErrorCode::UnsupportedInstance, os.str());
    }
    return static_cast<std::size_t>(rounded);
}

// Visits every vector in {0, 1/L, ..., 1}^K.
void for_each_lattice_vector(std::size_t k_count, std::size_t L,
                             const std::function<void(const std::vector<double>&)>& fn) {
    std::vector<std::size_t> idx(k_count, 0);
    std::vector<double> x(k_count, 0.0);
    while (true) {
        for (std::size_t k = 0; k < k_count; ++k)
            x[k] = static_cast<double>(idx[k]) / static_cast<double>(L);
        fn(x);
        std::size_t k = 0;
        while (k < k_count && idx[k] == L) idx[k++] = 0;
        if (k == k_count) return;
        ++idx[k];
    }
}

struct SumGroup {
    double sum;
    double score;
    std::vector<double> x;
};

// For every distinct probability-weighted sum, keeps the vector with the best
// score (max if maximize, else min).
std::vector<SumGroup> best_per_sum(const ChannelTable& ch, std::size_t L,
                                   const std::vector<double>& score_rate, bool maximize) {
    std::vector<SumGroup> all;
    for_each_lattice_vector(ch.prob.size(), L, [&](const std::vector<double>& x) {
        double sum = 0.0, score = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) {
            sum += ch.prob[k] * x[k];
            score += ch.prob[k] * x[k] * score_rate[k];
        }
        all.push_back({sum, score, x});
    });
    std::stable_sort(all.begin(), all.end(),
                     [](const SumGroup& l, const SumGroup& r) { return l.sum < r.sum; });
    std::vector<SumGroup> groups;
    for (auto& g : all) {
        if (!groups.empty() && g.sum - groups.back().sum <= kSumMergeTolerance) {
            auto& cur = groups.back();
            if (maximize ? g.score > cur.score : g.score < cur.score) {
                cur.score = g.score;
                cur.x = g.x;
                cur.sum = g.sum;
            }
            continue;
        }
        groups.push_back(std::move(g));
    }
    return groups;
}

std::vector<std::vector<double>> all_lattice_vectors(std::size_t k_count, std::size_t L) {
    std::vector<std::vector<double>> out;
    for_each_lattice_vector(k_count, L, [&](const std::vector<double>& x) { out.push_back(x); });
    return out;
}

// Lattice profiles of one node sorted by mode energy; ties prefer a larger
// wake-up probability, then a smaller sleep probability. Unless exhaustive,
// only the best wake and sleep vector per probability-weighted sum is kept.
std::vector<NodeProfile> candidate_profiles(const ChannelTable& ch, const ModeEnergies& e,
                                            std::size_t L, double own_target, bool exhaustive) {
    std::vector<std::vector<double>> xs, ys;
    if (exhaustive) {
        xs = ys = all_lattice_vectors(ch.prob.size(), L);
    } else {
        for (auto& g : best_per_sum(ch, L, ch.wake_rate, true)) xs.push_back(std::move(g.x));
        for (auto& g : best_per_sum(ch, L, ch.rate, false)) ys.push_back(std::move(g.x));
    }
    std::vector<NodeProfile> out;
    for (const auto& x : xs) {
        for (const auto& y : ys) {
            NodeProfile np = make_profile(x, y, ch, e);
            if (!meets(np.max_rate, own_target)) continue;
            out.push_back(std::move(np));
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const NodeProfile& l, const NodeProfile& r) {
        if (l.mode_energy != r.mode_energy) return l.mode_energy < r.mode_energy;
        if (l.a != r.a) return l.a > r.a;
        return l.b < r.b;
    });
    return out;
}

void check_instance(const SimConfig& cfg, std::span<const double> target) {
    if (cfg.node_count < 1 || cfg.node_count > 2)
        throw OracleError(OracleErrorCode::UnsupportedInstance, "oracle supports 1 or 2 nodes");
    if (cfg.channel.states.empty() || cfg.channel.states.size() > 3)
        throw OracleError(OracleErrorCode::UnsupportedInstance,
                          "oracle supports 1 to 3 channel states");
    if (target.size() != static_cast<std::size_t>(cfg.node_count))
        throw OracleError(OracleErrorCode::InvalidParams, "one target rate per node required");
    for (double l : target)
        if (!(l >= 0.0))
            throw OracleError(OracleErrorCode::InvalidParams, "target rates must be non-negative");
}

std::string describe_target(std::span<const double> target) {
    std::ostringstream os;
    os << "target rates (";
    for (std::size_t i = 0; i < target.size(); ++i) os << (i ? ", " : "") << target[i];
    os << ") are outside the servable region";
    return os.str();
}

NodeProfile always_active_profile(const ChannelTable& ch, const ModeEnergies& e) {
    const std::size_t k_count = ch.prob.size();
    return make_profile(std::vector<double>(k_count, 1.0), std::vector<double>(k_count, 0.0), ch, e);
}

bool servable(const ChannelTable& ch, const ModeEnergies& e, std::span<const double> target) {
    const NodeProfile full = always_active_profile(ch, e);
    if (target.size() == 1) return meets(full.max_rate, target[0]);
    return plan_pair(full, full, target[0], target[1]).feasible;
}

}  // namespace

RndEvaluation evaluate_rnd(const RndPolicyParams& params, const SimConfig& cfg, EvaluationMode mode,
                           std::int64_t slots) {
    const auto errors = rnd_params_errors(params, cfg.node_count, cfg.channel.states.size());
    if (!errors.empty()) throw OracleError(OracleErrorCode::InvalidParams, errors.front().message);

    const auto n_nodes = static_cast<std::size_t>(cfg.node_count);
    RndEvaluation out;
    out.service_rates.assign(n_nodes, 0.0);

    if (mode == EvaluationMode::ClosedForm) {
        const auto ch = channel_table(cfg);
        const auto e = mode_energies(cfg);
        double no_prior_success = 1.0;
        for (std::size_t n = 0; n < n_nodes; ++n) {
            const NodeProfile np = make_profile(params.p01[n], params.p10[n], ch, e);
            const double solo_rate = dot(np.w, params.pi_tr[n]);
            const double success = dot(np.c, params.pi_tr[n]);
            out.service_rates[n] = no_prior_success * solo_rate;
            out.energy_j_per_slot += np.mode_energy + e.alpha * out.service_rates[n];
            no_prior_success *= 1.0 - success;
        }
        return out;
    }

    if (slots <= 0) throw OracleError(OracleErrorCode::InvalidParams, "slots must be positive");
    SimConfig sim = cfg;
    sim.policy.kind = PolicyKind::RND;
    sim.policy.rnd = params;
    sim.infinite_battery = true;
    sim.horizon_slots = slots;
    double energy = 0.0;
    std::vector<double> served(n_nodes, 0.0);
    run_streaming(sim, [&](const SlotRecord& r) {
        for (std::size_t n = 0; n < n_nodes; ++n) {
            energy += r.nodes[n].energy.total_j;
            served[n] += r.nodes[n].served;
        }
    });
    const double t = static_cast<double>(slots);
    out.energy_j_per_slot = energy / t;
    for (std::size_t n = 0; n < n_nodes; ++n) out.service_rates[n] = served[n] / t;
    return out;
}

OracleResult minimize_energy(const SimConfig& cfg, std::span<const double> target_rates,
                             double grid_step) {
    check_instance(cfg, target_rates);
    const std::size_t L = lattice_size(grid_step);
    const auto ch = channel_table(cfg);
    const auto e = mode_energies(cfg);
    const std::size_t k_count = ch.prob.size();
    const std::vector<double> target(target_rates.begin(), target_rates.end());

    if (!servable(ch, e, target))
        throw OracleError(OracleErrorCode::InfeasibleRate, describe_target(target));

    OracleResult result;
    result.grid_step = grid_step;
    result.target_rates = target;
    result.evaluation_mode = EvaluationMode::ClosedForm;
    result.best_params = RndPolicyParams::all_sleep(target.size(), k_count);
    const std::vector<double> no_cap(k_count, 1.0);

    if (target.size() == 1) {
        const auto candidates = candidate_profiles(ch, e, L, target[0], false);
        if (candidates.empty())
            throw OracleError(OracleErrorCode::InfeasibleRate, describe_target(target));
        const NodeProfile& best = candidates.front();
        result.best_params.p01[0] = best.p01;
        result.best_params.p10[0] = best.p10;
        result.best_params.pi_tr[0] = greedy_pi_tr(best, target[0], no_cap);
    } else {
        const bool exhaustive =
            std::pow(static_cast<double>(L + 1), 2.0 * static_cast<double>(k_count)) <=
            kExhaustiveProfileLimit;
        const auto c1 = candidate_profiles(ch, e, L, target[0], exhaustive);
        const auto c2 = candidate_profiles(ch, e, L, target[1], exhaustive);
        using Entry = std::tuple<double, std::size_t, std::size_t>;
        std::priority_queue<Entry, std::vector<Entry>, std::greater<>> frontier;
        std::set<std::pair<std::size_t, std::size_t>> seen;
        auto push = [&](std::size_t i, std::size_t j) {
            if (i >= c1.size() || j >= c2.size() || !seen.insert({i, j}).second) return;
            frontier.emplace(c1[i].mode_energy + c2[j].mode_energy, i, j);
        };
        push(0, 0);
        bool found = false;
        while (!frontier.empty()) {
            const auto [energy, i, j] = frontier.top();
            frontier.pop();
            const JointPlan plan = plan_pair(c1[i], c2[j], target[0], target[1]);
            if (plan.feasible) {
                result.best_params.p01 = {c1[i].p01, c2[j].p01};
                result.best_params.p10 = {c1[i].p10, c2[j].p10};
                result.best_params.pi_tr[0] = plan.tau1;
                std::vector<double> cap(k_count);
                for (std::size_t k = 0; k < k_count; ++k) cap[k] = 1.0 - plan.tau1[k];
                const double thinning = 1.0 - plan.s1;
                result.best_params.pi_tr[1] =
                    thinning > 0.0 ? greedy_pi_tr(c2[j], target[1] / thinning, cap)
                                   : std::vector<double>(k_count, 0.0);
                found = true;
                break;
            }
            push(i + 1, j);
            push(i, j + 1);
        }
        if (!found) throw OracleError(OracleErrorCode::InfeasibleRate, describe_target(target));
    }

    const RndEvaluation eval = evaluate_rnd(result.best_params, cfg, EvaluationMode::ClosedForm);
    result.h_star_j_per_slot = eval.energy_j_per_slot;
    result.achieved_rates = eval.service_rates;
    return result;
}

double stability_margin(const SimConfig& cfg, std::span<const double> target_rates,
                        double grid_step) {
    check_instance(cfg, target_rates);
    lattice_size(grid_step);
    const auto ch = channel_table(cfg);
    const auto e = mode_energies(cfg);
    std::vector<double> shifted(target_rates.begin(), target_rates.end());
    auto feasible = [&](double eps) {
        for (std::size_t n = 0; n < shifted.size(); ++n) shifted[n] = target_rates[n] + eps;
        return servable(ch, e, shifted);
    };
    if (!feasible(0.0)) throw OracleError(OracleErrorCode::InfeasibleRate, describe_target(target_rates));
    double lo = 0.0;
    double hi = static_cast<double>(cfg.channel.max_rate());
    if (feasible(hi)) return hi;
    for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (feasible(mid) ? lo : hi) = mid;
    }
    return lo;
}

}  // namespace sleepsched
