#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "sleepsched/energy.hpp"
#include "sleepsched/oracle.hpp"

using namespace sleepsched;

namespace {

SimConfig one_node(std::vector<ChannelState> channels, int arrivals = 4) {
    SimConfig cfg = reference_config();
    cfg.node_count = 1;
    cfg.channel.states = std::move(channels);
    cfg.arrivals = {ArrivalModel{{{arrivals, 1.0}}, 45}};
    cfg.infinite_battery = true;
    cfg.horizon_slots = 1000;
    return cfg;
}

SimConfig two_nodes() {
    SimConfig cfg = reference_config();
    cfg.node_count = 2;
    cfg.channel.states = {{"Good", 20, 0.5}, {"Bad", 5, 0.5}};
    cfg.infinite_battery = true;
    cfg.horizon_slots = 1000;
    return cfg;
}

// Independent evaluation of one node: stationary law of the (mode, channel)
// chain by power iteration, energies straight from slot_energy.
struct NodeEval {
    double mode_energy = 0.0;
    std::vector<double> rate_per_tau;  // packets per slot per unit pi_tr, per channel
    std::vector<double> act_per_tau;   // transmit probability per unit pi_tr, per channel
};

NodeEval eval_node(const SimConfig& cfg, const std::vector<double>& p01,
                   const std::vector<double>& p10) {
    const auto& st = cfg.channel.states;
    double ps = 1.0, pa = 0.0;
    for (int it = 0; it < 20000; ++it) {
        double to_a = 0.0, to_s = 0.0;
        for (std::size_t k = 0; k < st.size(); ++k) {
            to_a += st[k].probability * p01[k];
            to_s += st[k].probability * p10[k];
        }
        const double nps = ps * (1 - to_a) + pa * to_s;
        const double npa = ps * to_a + pa * (1 - to_s);
        if (std::abs(npa - pa) < 1e-17 && it > 10) break;
        ps = nps;
        pa = npa;
    }
    if (std::none_of(p01.begin(), p01.end(), [](double x) { return x > 0; })) {
        ps = 1.0;
        pa = 0.0;
    }
    NodeEval e;
    const auto& p = cfg.energy;
    for (std::size_t k = 0; k < st.size(); ++k) {
        const double pk = st[k].probability;
        const double wake = ps * pk * p01[k];
        const double stay = pa * pk * (1 - p10[k]);
        e.mode_energy += ps * pk * (1 - p01[k]) * slot_energy(Mode::Sleep, Mode::Sleep, 0, false, p, 2).total_j;
        e.mode_energy += wake * slot_energy(Mode::Sleep, Mode::Active, 0, true, p, 2).total_j;
        e.mode_energy += pa * pk * p10[k] * slot_energy(Mode::Active, Mode::Sleep, 0, false, p, 2).total_j;
        e.mode_energy += stay * slot_energy(Mode::Active, Mode::Active, 0, true, p, 2).total_j;
        e.rate_per_tau.push_back((wake + stay) * st[k].rate);
        e.act_per_tau.push_back(wake + stay);
    }
    return e;
}

std::vector<std::vector<double>> lattice(std::size_t dims, int L) {
    std::vector<std::vector<double>> out;
    std::vector<int> idx(dims, 0);
    while (true) {
        std::vector<double> v;
        for (int i : idx) v.push_back(static_cast<double>(i) / L);
        out.push_back(v);
        std::size_t d = 0;
        while (d < dims && idx[d] == L) idx[d++] = 0;
        if (d == dims) return out;
        ++idx[d];
    }
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

void check_params_meet(const SimConfig& cfg, const OracleResult& r) {
    const auto eval = evaluate_rnd(r.best_params, cfg, EvaluationMode::ClosedForm);
    for (std::size_t n = 0; n < r.target_rates.size(); ++n) {
        CHECK(eval.service_rates[n] >= r.target_rates[n] - 1e-9);
        CHECK(r.achieved_rates[n] == doctest::Approx(eval.service_rates[n]));
    }
    CHECK(eval.energy_j_per_slot == doctest::Approx(r.h_star_j_per_slot).epsilon(1e-12));
}

const double kSleepSlot = 3.0e-8;

}  // namespace

TEST_CASE("evaluate_rnd: perpetual sleep") {
    SimConfig cfg = reference_config();
    cfg.horizon_slots = 10;
    const auto p = RndPolicyParams::all_sleep(5, 3);
    const auto closed = evaluate_rnd(p, cfg, EvaluationMode::ClosedForm);
    CHECK(closed.energy_j_per_slot == doctest::Approx(5 * kSleepSlot).epsilon(1e-12));
    for (double r : closed.service_rates) CHECK(r == 0.0);
    const auto sim = evaluate_rnd(p, cfg, EvaluationMode::Simulated, 2000);
    CHECK(sim.energy_j_per_slot == doctest::Approx(5 * kSleepSlot).epsilon(1e-12));
}

TEST_CASE("evaluate_rnd: alternating modes, closed form by hand and by simulation") {
    SimConfig cfg = one_node(reference_config().channel.states);
    RndPolicyParams p = RndPolicyParams::all_sleep(1, 3);
    p.p01[0] = {1, 1, 1};
    p.p10[0] = {1, 1, 1};
    p.pi_tr[0] = {1, 1, 1};
    const double hand = 0.5 * (25.2e-6 + 1.3 * 36e-6) + 0.5 * 2.87985e-6 + 30e-6 * (37.0 / 6.0);
    const auto closed = evaluate_rnd(p, cfg, EvaluationMode::ClosedForm);
    CHECK(closed.energy_j_per_slot == doctest::Approx(hand).epsilon(1e-12));
    CHECK(closed.service_rates[0] == doctest::Approx(37.0 / 6.0));
    const auto sim = evaluate_rnd(p, cfg, EvaluationMode::Simulated);
    CHECK(sim.energy_j_per_slot == doctest::Approx(hand).epsilon(0.01));
    CHECK(sim.service_rates[0] == doctest::Approx(37.0 / 6.0).epsilon(0.01));
}

TEST_CASE("evaluate_rnd: absorbing active state") {
    SimConfig cfg = one_node({{"Only", 20, 1.0}});
    RndPolicyParams p = RndPolicyParams::all_sleep(1, 1);
    p.p01[0] = {1};
    p.pi_tr[0] = {1};
    const auto closed = evaluate_rnd(p, cfg, EvaluationMode::ClosedForm);
    CHECK(closed.service_rates[0] == 20.0);
    CHECK(closed.energy_j_per_slot == doctest::Approx(6.72e-4).epsilon(1e-12));
}

TEST_CASE("evaluate_rnd: closed form agrees with simulation for two thinned nodes") {
    SimConfig cfg = reference_config();
    cfg.node_count = 2;
    cfg.infinite_battery = true;
    cfg.horizon_slots = 10;
    RndPolicyParams p = RndPolicyParams::all_sleep(2, 3);
    p.p01 = {{0.6, 0.3, 0.1}, {0.2, 0.5, 0.4}};
    p.p10 = {{0.1, 0.4, 0.8}, {0.3, 0.3, 0.9}};
    p.pi_tr = {{0.7, 0.5, 0.2}, {0.3, 0.5, 0.8}};
    const auto closed = evaluate_rnd(p, cfg, EvaluationMode::ClosedForm);
    const auto sim = evaluate_rnd(p, cfg, EvaluationMode::Simulated);
    CHECK(sim.energy_j_per_slot == doctest::Approx(closed.energy_j_per_slot).epsilon(0.01));
    for (int n = 0; n < 2; ++n)
        CHECK(sim.service_rates[n] == doctest::Approx(closed.service_rates[n]).epsilon(0.01));
}

TEST_CASE("evaluate_rnd rejects malformed parameters") {
    SimConfig cfg = one_node(reference_config().channel.states);
    RndPolicyParams p = RndPolicyParams::all_sleep(1, 2);
    CHECK_THROWS_AS(evaluate_rnd(p, cfg, EvaluationMode::ClosedForm), OracleError);
}

TEST_CASE("minimize_energy: zero demand sleeps") {
    SimConfig cfg = one_node(reference_config().channel.states, 0);
    const std::vector<double> zero{0.0};
    auto r = minimize_energy(cfg, zero, 0.02);
    CHECK(r.h_star_j_per_slot == doctest::Approx(kSleepSlot).epsilon(1e-12));
    CHECK(r.best_params.p01[0] == std::vector<double>{0, 0, 0});

    SimConfig two = two_nodes();
    const std::vector<double> zeros{0.0, 0.0};
    r = minimize_energy(two, zeros, 0.1);
    CHECK(r.h_star_j_per_slot == doctest::Approx(2 * kSleepSlot).epsilon(1e-12));
}

TEST_CASE("minimize_energy: saturation on a single channel") {
    SimConfig cfg = one_node({{"Only", 20, 1.0}}, 20);
    const std::vector<double> target{20.0};
    const auto r = minimize_energy(cfg, target, 0.02);
    CHECK(r.best_params.p01[0] == std::vector<double>{1.0});
    CHECK(r.best_params.p10[0] == std::vector<double>{0.0});
    CHECK(r.best_params.pi_tr[0] == std::vector<double>{1.0});
    CHECK(r.h_star_j_per_slot == doctest::Approx(6.72e-4).epsilon(1e-12));
    check_params_meet(cfg, r);
}

TEST_CASE("minimize_energy: infeasible and unsupported instances") {
    SimConfig cfg = one_node({{"Only", 20, 1.0}}, 21);
    const std::vector<double> target{21.0};
    try {
        minimize_energy(cfg, target, 0.02);
        FAIL("expected InfeasibleRate");
    } catch (const OracleError& e) {
        CHECK(e.code() == OracleErrorCode::InfeasibleRate);
    }
    const std::vector<double> ok{4.0};
    try {
        minimize_energy(one_node({{"Only", 20, 1.0}}), ok, 0.3);
        FAIL("expected UnsupportedInstance");
    } catch (const OracleError& e) {
        CHECK(e.code() == OracleErrorCode::UnsupportedInstance);
    }
    SimConfig three = reference_config();
    three.node_count = 3;
    const std::vector<double> t3{1, 1, 1};
    CHECK_THROWS_AS(minimize_energy(three, t3, 0.1), OracleError);
}

TEST_CASE("minimize_energy: reference channels, one node, lambda = 4") {
    SimConfig cfg = one_node(reference_config().channel.states);
    const std::vector<double> target{4.0};
    const auto r = minimize_energy(cfg, target, 0.02);
    // Hand value: wake only on Good w.p. 1/2, fall asleep on Medium/Bad;
    // pi_A = 1/5, mode energy 1.480398e-5 J, plus 4 packets of transmit energy.
    CHECK(r.h_star_j_per_slot == doctest::Approx(1.3480398e-4).epsilon(1e-12));
    CHECK(r.best_params.p01[0] == std::vector<double>{0.5, 0.0, 0.0});
    CHECK(r.best_params.p10[0] == std::vector<double>{0.0, 1.0, 1.0});
    check_params_meet(cfg, r);
    const auto sim = evaluate_rnd(r.best_params, cfg, EvaluationMode::Simulated);
    CHECK(sim.energy_j_per_slot == doctest::Approx(r.h_star_j_per_slot).epsilon(0.02));
    CHECK(sim.service_rates[0] == doctest::Approx(4.0).epsilon(0.02));
}

TEST_CASE("minimize_energy: nested grid refinement never increases h*") {
    SimConfig cfg = one_node(reference_config().channel.states);
    for (double lambda : {1.0, 4.0, 7.5, 11.0}) {
        const std::vector<double> target{lambda};
        double prev = std::numeric_limits<double>::infinity();
        for (double step : {0.5, 0.25, 0.125, 0.0625}) {
            const double h = minimize_energy(cfg, target, step).h_star_j_per_slot;
            CHECK(h <= prev * (1 + 1e-12));
            prev = h;
        }
        CHECK(minimize_energy(cfg, target, 0.01).h_star_j_per_slot <=
              minimize_energy(cfg, target, 0.02).h_star_j_per_slot * (1 + 1e-12));
    }
}

TEST_CASE("minimize_energy: h* is non-decreasing in the demand") {
    SimConfig cfg = one_node(reference_config().channel.states);
    double prev = 0.0;
    for (double lambda = 0.0; lambda <= 12.0; lambda += 0.5) {
        const std::vector<double> target{lambda};
        const double h = minimize_energy(cfg, target, 0.05).h_star_j_per_slot;
        CHECK(h >= prev * (1 - 1e-12));
        prev = h;
    }
    SimConfig two = two_nodes();
    prev = 0.0;
    for (double lambda = 0.0; lambda <= 5.0; lambda += 1.0) {
        const std::vector<double> target{lambda, 2.0};
        const double h = minimize_energy(two, target, 0.25).h_star_j_per_slot;
        CHECK(h >= prev * (1 - 1e-12));
        prev = h;
    }
}

TEST_CASE("minimize_energy: one node matches brute force over the full lattice") {
    SimConfig cfg = one_node(reference_config().channel.states);
    const int L = 4;
    const auto grid = lattice(3, L);
    for (double lambda : {0.5, 2.0, 4.0, 6.0, 9.0, 12.0}) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& x : grid)
            for (const auto& y : grid) {
                const auto e = eval_node(cfg, x, y);
                const double cap = std::accumulate(e.rate_per_tau.begin(), e.rate_per_tau.end(), 0.0);
                if (cap >= lambda - 1e-12) best = std::min(best, e.mode_energy);
            }
        best += cfg.energy.alpha_j_per_packet * lambda;
        const std::vector<double> target{lambda};
        const auto r = minimize_energy(cfg, target, 1.0 / L);
        CHECK(r.h_star_j_per_slot == doctest::Approx(best).epsilon(1e-9));
        check_params_meet(cfg, r);
    }
}

TEST_CASE("minimize_energy: two nodes are no worse than brute force over lattice and pi_tr grid") {
    SimConfig cfg = two_nodes();
    const int L = 2;
    const auto grid = lattice(2, L);
    const auto taus = lattice(2, 10);
    std::vector<NodeEval> profiles;
    for (const auto& x : grid)
        for (const auto& y : grid) profiles.push_back(eval_node(cfg, x, y));

    for (const std::vector<double>& target :
         {std::vector<double>{3.0, 2.0}, std::vector<double>{6.0, 1.0}, std::vector<double>{1.0, 5.0}}) {
        std::vector<std::pair<double, std::pair<std::size_t, std::size_t>>> pairs;
        for (std::size_t i = 0; i < profiles.size(); ++i)
            for (std::size_t j = 0; j < profiles.size(); ++j)
                pairs.push_back({profiles[i].mode_energy + profiles[j].mode_energy, {i, j}});
        std::sort(pairs.begin(), pairs.end());
        double brute = std::numeric_limits<double>::infinity();
        for (const auto& [energy, ij] : pairs) {
            const auto& a = profiles[ij.first];
            const auto& b = profiles[ij.second];
            bool feasible = false;
            for (const auto& t1 : taus) {
                if (dot(a.rate_per_tau, t1) < target[0] - 1e-12) continue;
                const double pass = 1.0 - dot(a.act_per_tau, t1);
                for (const auto& t2 : taus) {
                    if (t2[0] + t1[0] > 1.0 + 1e-12 || t2[1] + t1[1] > 1.0 + 1e-12) continue;
                    if (pass * dot(b.rate_per_tau, t2) >= target[1] - 1e-12) {
                        feasible = true;
                        break;
                    }
                }
                if (feasible) break;
            }
            if (feasible) {
                brute = energy;
                break;
            }
        }
        REQUIRE(std::isfinite(brute));
        brute += cfg.energy.alpha_j_per_packet * (target[0] + target[1]);
        const auto r = minimize_energy(cfg, target, 1.0 / L);
        CHECK(r.h_star_j_per_slot <= brute * (1 + 1e-12));
        check_params_meet(cfg, r);
        double pi_sum0 = r.best_params.pi_tr[0][0] + r.best_params.pi_tr[1][0];
        double pi_sum1 = r.best_params.pi_tr[0][1] + r.best_params.pi_tr[1][1];
        CHECK(pi_sum0 <= 1.0 + 1e-12);
        CHECK(pi_sum1 <= 1.0 + 1e-12);
    }
}

TEST_CASE("stability margin") {
    SimConfig cfg = one_node({{"Only", 20, 1.0}});
    const std::vector<double> four{4.0};
    CHECK(stability_margin(cfg, four, 0.02) == doctest::Approx(16.0).epsilon(1e-9));
    const std::vector<double> zero{0.0};
    CHECK(stability_margin(cfg, zero, 0.02) == doctest::Approx(20.0).epsilon(1e-9));
    const std::vector<double> full{20.0};
    CHECK(stability_margin(cfg, full, 0.02) == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
    const std::vector<double> over{20.5};
    CHECK_THROWS_AS(stability_margin(cfg, over, 0.02), OracleError);

    SimConfig ref = one_node(reference_config().channel.states);
    CHECK(stability_margin(ref, four, 0.02) == doctest::Approx(37.0 / 3.0 - 4.0).epsilon(1e-9));

    SimConfig two = two_nodes();
    const std::vector<double> t{2.0, 2.0};
    const double eps = stability_margin(two, t, 0.1);
    CHECK(eps > 0.0);
    const std::vector<double> shifted{2.0 + eps * 0.999, 2.0 + eps * 0.999};
    CHECK_NOTHROW(minimize_energy(two, shifted, 0.5));
    const std::vector<double> beyond{2.0 + eps * 1.01, 2.0 + eps * 1.01};
    CHECK_THROWS_AS(minimize_energy(two, beyond, 0.5), OracleError);
}
