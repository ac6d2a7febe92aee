#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "sleepsched/engine.hpp"
#include "sleepsched/metrics.hpp"
#include "sleepsched/model.hpp"
#include "sleepsched/oracle.hpp"

namespace sleepsched {

class ConfigParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// JSON mirrors SimConfig with snake_case keys. Missing keys keep the
// reference_config() value; unknown keys are rejected.
//   horizon_slots: integer, null or "until_death"
//   policy: "ESS" | {"type": "RND", "params": {"p01": [[...]], "p10": ..., "pi_tr": ...}}
//   channel: [{"label", "rate", "probability"}, ...]
//   arrivals: {"distribution": [{"packets", "probability"}], "packet_size_bytes"} or an array of those
SimConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const SimConfig& cfg);
// Reads and parses; does not validate.
SimConfig load_config(const std::filesystem::path& path);

nlohmann::json rnd_params_to_json(const RndPolicyParams& p);
nlohmann::json metrics_to_json(const MetricsReport& r);
nlohmann::json oracle_to_json(const OracleResult& r);

// 12 significant digits, scientific notation.
std::string format_double(double x);

void write_slot_csv_header(std::ostream& os);
void write_slot_csv_rows(std::ostream& os, const SlotRecord& record);

}  // namespace sleepsched
