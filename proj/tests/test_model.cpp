#include <doctest.h>

#include <algorithm>

#include "sleepsched/model.hpp"

using namespace sleepsched;

namespace {

bool has_code(const std::vector<ConfigError>& errs, ConfigErrorCode code) {
    return std::any_of(errs.begin(), errs.end(), [&](const ConfigError& e) { return e.code == code; });
}

}  // namespace

TEST_CASE("reference config is valid") {
    const SimConfig cfg = reference_config();
    CHECK(config_errors(cfg).empty());
    CHECK(cfg.node_count == 5);
    CHECK(cfg.slot_ms == 2.0);
    CHECK(cfg.initial_battery_j == 10.0);
    CHECK(cfg.channel.max_rate() == 20);
    CHECK(cfg.channel.mean_rate() == doctest::Approx(37.0 / 3.0));
    REQUIRE(cfg.arrivals.size() == 1);
    CHECK(cfg.arrivals[0].mean() == 4.0);
    CHECK(cfg.arrivals[0].max_packets() == 8);
    CHECK(cfg.arrivals[0].packet_size_bytes == 45);
}

TEST_CASE("validation reports each violation") {
    SimConfig cfg = reference_config();
    cfg.channel.states = {{"Good", 20, 0.5}, {"Medium", 12, 0.4}, {"Bad", 5, 0.2}};
    CHECK(has_code(config_errors(cfg), ConfigErrorCode::BadProbabilitySum));
    CHECK_THROWS_AS(validate_config(cfg), ConfigValidationError);

    cfg = reference_config();
    cfg.energy.t01_ms = 2.5;
    CHECK(has_code(config_errors(cfg), ConfigErrorCode::SwitchingExceedsSlot));

    cfg = reference_config();
    cfg.energy.alpha_j_per_packet = -1.0;
    CHECK(has_code(config_errors(cfg), ConfigErrorCode::NegativeEnergy));

    cfg = reference_config();
    cfg.channel.states.clear();
    CHECK(has_code(config_errors(cfg), ConfigErrorCode::EmptyChannelSet));

    cfg = reference_config();
    cfg.v_param = -1.0;
    cfg.energy.e01_j = -1.0;
    const auto errs = config_errors(cfg);
    CHECK(has_code(errs, ConfigErrorCode::InvalidValue));
    CHECK(has_code(errs, ConfigErrorCode::NegativeEnergy));
    try {
        validate_config(cfg);
        FAIL("expected ConfigValidationError");
    } catch (const ConfigValidationError& e) {
        CHECK(e.errors() == errs);
    }
}

TEST_CASE("infinite battery needs a finite horizon") {
    SimConfig cfg = reference_config();
    cfg.infinite_battery = true;
    CHECK(has_code(config_errors(cfg), ConfigErrorCode::InvalidValue));
    cfg.horizon_slots = 10;
    CHECK(config_errors(cfg).empty());
}

TEST_CASE("validation is idempotent") {
    const SimConfig once = validate_config(reference_config());
    const SimConfig twice = validate_config(once);
    CHECK(config_errors(twice).empty());
    CHECK(twice.node_count == once.node_count);
    CHECK(twice.v_param == once.v_param);

    SimConfig bad = reference_config();
    bad.slot_ms = 0.0;
    CHECK(config_errors(bad) == config_errors(bad));
}

TEST_CASE("RND parameters are checked against shape and pi_tr sums") {
    SimConfig cfg = reference_config();
    cfg.node_count = 2;
    cfg.horizon_slots = 10;
    cfg.policy.kind = PolicyKind::RND;
    cfg.policy.rnd = RndPolicyParams::all_sleep(2, 3);
    CHECK(config_errors(cfg).empty());

    cfg.policy.rnd.pi_tr[0][1] = 0.7;
    cfg.policy.rnd.pi_tr[1][1] = 0.4;
    CHECK(has_code(config_errors(cfg), ConfigErrorCode::InvalidRndParams));

    cfg.policy.rnd = RndPolicyParams::all_sleep(2, 2);
    CHECK(has_code(config_errors(cfg), ConfigErrorCode::InvalidRndParams));

    cfg.policy.rnd = RndPolicyParams::all_sleep(2, 3);
    cfg.policy.rnd.p01[1][0] = 1.5;
    CHECK(has_code(config_errors(cfg), ConfigErrorCode::InvalidRndParams));
}

TEST_CASE("B constant") {
    SimConfig cfg = reference_config();
    CHECK(compute_B(cfg) == 1160.0);

    cfg.node_count = 1;
    cfg.channel.states = {{"Off", 0, 1.0}};
    cfg.arrivals = {ArrivalModel{{{0, 1.0}}, 45}};
    CHECK(compute_B(cfg) == 0.0);

    cfg.node_count = 2;
    cfg.channel.states = {{"One", 1, 1.0}};
    cfg.arrivals = {ArrivalModel{{{1, 1.0}}, 45}};
    CHECK(compute_B(cfg) == 2.0);
}

TEST_CASE("B is monotone in node count, rates and batch size") {
    SimConfig cfg = reference_config();
    double prev = compute_B(cfg);
    for (int n = 6; n <= 10; ++n) {
        cfg.node_count = n;
        const double b = compute_B(cfg);
        CHECK(b > prev);
        prev = b;
    }
    cfg = reference_config();
    prev = compute_B(cfg);
    cfg.channel.states[0].rate = 25;
    CHECK(compute_B(cfg) > prev);
    prev = compute_B(cfg);
    cfg.arrivals[0].distribution = {{9, 0.5}, {0, 0.5}};
    CHECK(compute_B(cfg) > prev);
}

TEST_CASE("policy names parse case-insensitively") {
    CHECK(parse_policy_kind("ess") == PolicyKind::ESS);
    CHECK(parse_policy_kind("BENCHMARK") == PolicyKind::Benchmark);
    CHECK(parse_policy_kind("Periodic") == PolicyKind::Periodic);
    CHECK(parse_policy_kind("distributed") == PolicyKind::Distributed);
    CHECK(parse_policy_kind("Rnd") == PolicyKind::RND);
    CHECK_THROWS_AS(parse_policy_kind("maxweight"), std::invalid_argument);
    for (auto k : {PolicyKind::ESS, PolicyKind::Benchmark, PolicyKind::Periodic,
                   PolicyKind::Distributed, PolicyKind::RND})
        CHECK(parse_policy_kind(to_string(k)) == k);
}

TEST_CASE("per-node arrival models") {
    SimConfig cfg = reference_config();
    cfg.node_count = 2;
    cfg.arrivals = {ArrivalModel{{{2, 1.0}}, 45}, ArrivalModel{{{6, 0.5}, {0, 0.5}}, 45}};
    CHECK(config_errors(cfg).empty());
    CHECK(cfg.arrival_means() == std::vector<double>{2.0, 3.0});
    CHECK(cfg.max_arrival() == 6);
    cfg.node_count = 3;
    CHECK(has_code(config_errors(cfg), ConfigErrorCode::InvalidValue));
}
