#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sleepsched {

enum class Mode : std::uint8_t { Sleep = 0, Active = 1 };

std::string_view to_string(Mode m);

enum class PolicyKind { ESS, Benchmark, Periodic, Distributed, RND };

std::string_view to_string(PolicyKind k);
// Accepts the canonical names case-insensitively; throws std::invalid_argument.
PolicyKind parse_policy_kind(std::string_view name);

// Per-slot energy model shared by every node. Rates are per millisecond.
struct EnergyParams {
    double e0_rate_j_per_ms = 0.015e-6;   // sleep draw
    double c_rate_j_per_ms = 36e-6;       // active circuit draw
    double alpha_j_per_packet = 30e-6;    // per transmitted packet
    double e01_j = 25.2e-6;               // sleep -> active
    double e10_j = 2.85e-6;               // active -> sleep
    double t01_ms = 0.7;
    double t10_ms = 0.01;
    double eb_j_per_bit = 8.33e-8;        // Distributed policy weight broadcast
    int broadcast_bits_per_weight_msg = 128;
    bool include_e01_on_wake = true;

    double broadcast_j() const { return eb_j_per_bit * broadcast_bits_per_weight_msg; }
};

struct ChannelState {
    std::string label;
    int rate = 0;  // packets per slot
    double probability = 0.0;
};

// i.i.d. across slots and across nodes.
struct ChannelModel {
    std::vector<ChannelState> states;

    int max_rate() const;
    double mean_rate() const;
};

struct ArrivalOutcome {
    int packets = 0;
    double probability = 0.0;
};

struct ArrivalModel {
    std::vector<ArrivalOutcome> distribution;
    int packet_size_bytes = 45;

    double mean() const;
    int max_packets() const;
};

// Stationary randomized policy parameters, indexed [node][channel state].
struct RndPolicyParams {
    std::vector<std::vector<double>> p01;
    std::vector<std::vector<double>> p10;
    std::vector<std::vector<double>> pi_tr;

    std::size_t node_count() const { return p01.size(); }
    // All zeros: every node sleeps forever.
    static RndPolicyParams all_sleep(std::size_t nodes, std::size_t channels);
};

struct PolicySpec {
    PolicyKind kind = PolicyKind::ESS;
    RndPolicyParams rnd;  // only meaningful for PolicyKind::RND
};

struct SimConfig {
    int node_count = 5;
    double slot_ms = 2.0;
    std::optional<std::int64_t> horizon_slots;  // nullopt: run until network death
    double initial_battery_j = 10.0;
    bool infinite_battery = false;
    double v_param = 0.0;
    PolicySpec policy;
    EnergyParams energy;
    ChannelModel channel;
    std::vector<ArrivalModel> arrivals;  // one shared model, or one per node
    std::uint64_t seed = 1;
    bool wake_slot_rate_scaling = false;

    const ArrivalModel& arrivals_for(int node) const;
    std::vector<double> arrival_means() const;
    int max_arrival() const;
};

// Five nodes, 2 ms slots, 10 J batteries, Good/Medium/Bad = 20/12/5 packets
// with equal probability, batches of 8 packets w.p. 0.5, ESS.
SimConfig reference_config();

enum class ConfigErrorCode {
    NegativeEnergy,
    BadProbabilitySum,
    SwitchingExceedsSlot,
    EmptyChannelSet,
    InvalidValue,
    InvalidRndParams,
};

std::string_view to_string(ConfigErrorCode c);

struct ConfigError {
    ConfigErrorCode code;
    std::string message;

    friend bool operator==(const ConfigError&, const ConfigError&) = default;
};

class ConfigValidationError : public std::runtime_error {
public:
    explicit ConfigValidationError(std::vector<ConfigError> errors);
    const std::vector<ConfigError>& errors() const noexcept { return errors_; }

private:
    std::vector<ConfigError> errors_;
};

inline constexpr double kProbabilityTolerance = 1e-12;

// Every violated invariant, in a stable order. Empty means valid.
std::vector<ConfigError> config_errors(const SimConfig& cfg);

// Returns cfg unchanged, or throws ConfigValidationError listing every violation.
SimConfig validate_config(SimConfig cfg);

// Errors specific to RND parameters, checked against a channel count and node count.
std::vector<ConfigError> rnd_params_errors(const RndPolicyParams& params, int node_count,
                                           std::size_t channel_count);

// Lyapunov drift constant: node_count/2 * (mu_max^2 + R_max^2).
double compute_B(const SimConfig& cfg);

}  // namespace sleepsched
