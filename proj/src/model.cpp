#include "sleepsched/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <sstream>

namespace sleepsched {

std::string_view to_string(Mode m) { return m == Mode::Active ? "active" : "sleep"; }

std::string_view to_string(PolicyKind k) {
    switch (k) {
        case PolicyKind::ESS: return "ESS";
        case PolicyKind::Benchmark: return "Benchmark";
        case PolicyKind::Periodic: return "Periodic";
        case PolicyKind::Distributed: return "Distributed";
        case PolicyKind::RND: return "RND";
    }
    return "?";
}

PolicyKind parse_policy_kind(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "ess") return PolicyKind::ESS;
    if (lower == "benchmark") return PolicyKind::Benchmark;
    if (lower == "periodic") return PolicyKind::Periodic;
    if (lower == "distributed") return PolicyKind::Distributed;
    if (lower == "rnd") return PolicyKind::RND;
    throw std::invalid_argument("unknown policy '" + std::string(name) + "'");
}

int ChannelModel::max_rate() const {
    int m = 0;
    for (const auto& s : states) m = std::max(m, s.rate);
    return m;
}

double ChannelModel::mean_rate() const {
    double m = 0.0;
    for (const auto& s : states) m += s.probability * s.rate;
    return m;
}

double ArrivalModel::mean() const {
    double m = 0.0;
    for (const auto& o : distribution) m += o.probability * o.packets;
    return m;
}

int ArrivalModel::max_packets() const {
    int m = 0;
    for (const auto& o : distribution) m = std::max(m, o.packets);
    return m;
}

RndPolicyParams RndPolicyParams::all_sleep(std::size_t nodes, std::size_t channels) {
    RndPolicyParams p;
    p.p01.assign(nodes, std::vector<double>(channels, 0.0));
    p.p10.assign(nodes, std::vector<double>(channels, 0.0));
    p.pi_tr.assign(nodes, std::vector<double>(channels, 0.0));
    return p;
}

const ArrivalModel& SimConfig::arrivals_for(int node) const {
    if (arrivals.size() == 1) return arrivals.front();
    return arrivals.at(static_cast<std::size_t>(node));
}

std::vector<double> SimConfig::arrival_means() const {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(node_count));
    for (int n = 0; n < node_count; ++n) out.push_back(arrivals_for(n).mean());
    return out;
}

int SimConfig::max_arrival() const {
    int m = 0;
    for (const auto& a : arrivals) m = std::max(m, a.max_packets());
    return m;
}

SimConfig reference_config() {
    SimConfig cfg;
    cfg.node_count = 5;
    cfg.slot_ms = 2.0;
    cfg.horizon_slots = std::nullopt;
    cfg.initial_battery_j = 10.0;
    cfg.v_param = 1000.0;
    cfg.policy.kind = PolicyKind::ESS;
    const double third = 1.0 / 3.0;
    cfg.channel.states = {{"Good", 20, third}, {"Medium", 12, third}, {"Bad", 5, third}};
    ArrivalModel arr;
    arr.distribution = {{8, 0.5}, {0, 0.5}};
    arr.packet_size_bytes = 45;
    cfg.arrivals = {arr};
    cfg.seed = 1;
    return cfg;
}

std::string_view to_string(ConfigErrorCode c) {
    switch (c) {
        case ConfigErrorCode::NegativeEnergy: return "NegativeEnergy";
        case ConfigErrorCode::BadProbabilitySum: return "BadProbabilitySum";
        case ConfigErrorCode::SwitchingExceedsSlot: return "SwitchingExceedsSlot";
        case ConfigErrorCode::EmptyChannelSet: return "EmptyChannelSet";
        case ConfigErrorCode::InvalidValue: return "InvalidValue";
        case ConfigErrorCode::InvalidRndParams: return "InvalidRndParams";
    }
    return "?";
}

namespace {

std::string join_messages(const std::vector<ConfigError>& errors) {
    std::ostringstream os;
    os << "invalid config:";
    for (const auto& e : errors) os << "\n  " << to_string(e.code) << ": " << e.message;
    return os.str();
}

bool in_unit_interval(double x) { return x >= 0.0 && x <= 1.0; }

void check_probability_sum(double sum, const std::string& what, std::vector<ConfigError>& out) {
    if (std::abs(sum - 1.0) > kProbabilityTolerance) {
        std::ostringstream os;
        os.precision(17);
        os << what << " probabilities sum to " << sum;
        out.push_back({ConfigErrorCode::BadProbabilitySum, os.str()});
    }
}

void check_arrivals(const ArrivalModel& a, const std::string& name, std::vector<ConfigError>& out) {
    if (a.distribution.empty()) {
        out.push_back({ConfigErrorCode::InvalidValue, name + " distribution is empty"});
        return;
    }
    double sum = 0.0;
    for (const auto& o : a.distribution) {
        if (o.packets < 0)
            out.push_back({ConfigErrorCode::InvalidValue, name + " has a negative packet count"});
        if (!in_unit_interval(o.probability))
            out.push_back({ConfigErrorCode::BadProbabilitySum,
                           name + " has a probability outside [0,1]"});
        sum += o.probability;
    }
    check_probability_sum(sum, name, out);
    if (a.packet_size_bytes <= 0)
        out.push_back({ConfigErrorCode::InvalidValue, name + " packet_size_bytes must be positive"});
}

}  // namespace

ConfigValidationError::ConfigValidationError(std::vector<ConfigError> errors)
    : std::runtime_error(join_messages(errors)), errors_(std::move(errors)) {}

std::vector<ConfigError> rnd_params_errors(const RndPolicyParams& params, int node_count,
                                           std::size_t channel_count) {
    std::vector<ConfigError> out;
    const auto n = static_cast<std::size_t>(node_count);
    auto shape_ok = [&](const std::vector<std::vector<double>>& m) {
        if (m.size() != n) return false;
        return std::all_of(m.begin(), m.end(),
                           [&](const auto& row) { return row.size() == channel_count; });
    };
    if (!shape_ok(params.p01) || !shape_ok(params.p10) || !shape_ok(params.pi_tr)) {
        out.push_back({ConfigErrorCode::InvalidRndParams,
                       "RND params must be node_count x channel_count matrices"});
        return out;
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < channel_count; ++k) {
            if (!in_unit_interval(params.p01[i][k]) || !in_unit_interval(params.p10[i][k]) ||
                !in_unit_interval(params.pi_tr[i][k])) {
                out.push_back({ConfigErrorCode::InvalidRndParams,
                               "RND probability outside [0,1] at node " + std::to_string(i) +
                                   ", channel " + std::to_string(k)});
            }
        }
    }
    for (std::size_t k = 0; k < channel_count; ++k) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += params.pi_tr[i][k];
        if (sum > 1.0 + kProbabilityTolerance) {
            out.push_back({ConfigErrorCode::InvalidRndParams,
                           "sum of pi_tr over nodes exceeds 1 at channel " + std::to_string(k)});
        }
    }
    return out;
}

std::vector<ConfigError> config_errors(const SimConfig& cfg) {
    std::vector<ConfigError> out;
    if (cfg.node_count < 1)
        out.push_back({ConfigErrorCode::InvalidValue, "node_count must be >= 1"});
    if (!(cfg.slot_ms > 0.0))
        out.push_back({ConfigErrorCode::InvalidValue, "slot_ms must be positive"});
    if (cfg.horizon_slots && *cfg.horizon_slots < 0)
        out.push_back({ConfigErrorCode::InvalidValue, "horizon_slots must be non-negative"});
    if (!cfg.horizon_slots && cfg.infinite_battery)
        out.push_back({ConfigErrorCode::InvalidValue,
                       "infinite_battery requires a finite horizon_slots"});
    if (!(cfg.initial_battery_j > 0.0))
        out.push_back({ConfigErrorCode::InvalidValue, "initial_battery_j must be positive"});
    if (!(cfg.v_param >= 0.0))
        out.push_back({ConfigErrorCode::InvalidValue, "v_param must be non-negative"});

    const auto& e = cfg.energy;
    const std::pair<const char*, double> energy_fields[] = {
        {"e0_rate_j_per_ms", e.e0_rate_j_per_ms}, {"c_rate_j_per_ms", e.c_rate_j_per_ms},
        {"alpha_j_per_packet", e.alpha_j_per_packet}, {"e01_j", e.e01_j},
        {"e10_j", e.e10_j}, {"t01_ms", e.t01_ms}, {"t10_ms", e.t10_ms},
        {"eb_j_per_bit", e.eb_j_per_bit}};
    for (const auto& [name, value] : energy_fields) {
        if (!(value >= 0.0))
            out.push_back({ConfigErrorCode::NegativeEnergy, std::string(name) + " is negative"});
    }
    if (e.broadcast_bits_per_weight_msg <= 0)
        out.push_back({ConfigErrorCode::InvalidValue,
                       "broadcast_bits_per_weight_msg must be positive"});
    if (!(e.t01_ms + e.t10_ms < cfg.slot_ms))
        out.push_back({ConfigErrorCode::SwitchingExceedsSlot,
                       "t01_ms + t10_ms must be shorter than slot_ms"});

    if (cfg.channel.states.empty()) {
        out.push_back({ConfigErrorCode::EmptyChannelSet, "channel model has no states"});
    } else {
        double sum = 0.0;
        for (const auto& s : cfg.channel.states) {
            if (s.rate < 0)
                out.push_back({ConfigErrorCode::InvalidValue,
                               "channel state '" + s.label + "' has a negative rate"});
            if (!in_unit_interval(s.probability))
                out.push_back({ConfigErrorCode::BadProbabilitySum,
                               "channel state '" + s.label + "' probability outside [0,1]"});
            sum += s.probability;
        }
        check_probability_sum(sum, "channel", out);
    }

    if (cfg.arrivals.empty()) {
        out.push_back({ConfigErrorCode::InvalidValue, "arrival model missing"});
    } else if (cfg.arrivals.size() != 1 &&
               cfg.arrivals.size() != static_cast<std::size_t>(std::max(cfg.node_count, 0))) {
        out.push_back({ConfigErrorCode::InvalidValue,
                       "arrivals must hold one shared model or one model per node"});
    } else {
        for (std::size_t i = 0; i < cfg.arrivals.size(); ++i) {
            const std::string name =
                cfg.arrivals.size() == 1 ? "arrivals" : "arrivals[" + std::to_string(i) + "]";
            check_arrivals(cfg.arrivals[i], name, out);
        }
    }

    if (cfg.policy.kind == PolicyKind::RND && cfg.node_count >= 1) {
        auto rnd = rnd_params_errors(cfg.policy.rnd, cfg.node_count, cfg.channel.states.size());
        out.insert(out.end(), rnd.begin(), rnd.end());
    }
    return out;
}

SimConfig validate_config(SimConfig cfg) {
    auto errors = config_errors(cfg);
    if (!errors.empty()) throw ConfigValidationError(std::move(errors));
    return cfg;
}

double compute_B(const SimConfig& cfg) {
    const double mu = cfg.channel.max_rate();
    const double r = cfg.max_arrival();
    return static_cast<double>(cfg.node_count) / 2.0 * (mu * mu + r * r);
}

}  // namespace sleepsched
