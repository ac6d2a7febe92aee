#include "sleepsched/config_io.hpp"

#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace sleepsched {

using nlohmann::json;

namespace {

void require_object(const json& j, std::string_view where) {
    if (!j.is_object()) throw ConfigParseError(std::string(where) + " must be a JSON object");
}

void reject_unknown(const json& j, std::string_view where, std::initializer_list<const char*> known) {
    const std::set<std::string> allowed(known.begin(), known.end());
    for (const auto& [key, _] : j.items()) {
        if (!allowed.contains(key))
            throw ConfigParseError("unknown key '" + key + "' in " + std::string(where));
    }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigParseError(std::string("bad value for '") + key + "': " + e.what());
    }
}

EnergyParams energy_from_json(const json& j, EnergyParams e) {
    require_object(j, "energy");
    reject_unknown(j, "energy",
                   {"e0_rate_j_per_ms", "c_rate_j_per_ms", "alpha_j_per_packet", "e01_j", "e10_j",
                    "t01_ms", "t10_ms", "eb_j_per_bit", "broadcast_bits_per_weight_msg",
                    "include_e01_on_wake"});
    read(j, "e0_rate_j_per_ms", e.e0_rate_j_per_ms);
    read(j, "c_rate_j_per_ms", e.c_rate_j_per_ms);
    read(j, "alpha_j_per_packet", e.alpha_j_per_packet);
    read(j, "e01_j", e.e01_j);
    read(j, "e10_j", e.e10_j);
    read(j, "t01_ms", e.t01_ms);
    read(j, "t10_ms", e.t10_ms);
    read(j, "eb_j_per_bit", e.eb_j_per_bit);
    read(j, "broadcast_bits_per_weight_msg", e.broadcast_bits_per_weight_msg);
    read(j, "include_e01_on_wake", e.include_e01_on_wake);
    return e;
}

ChannelModel channel_from_json(const json& j) {
    const json& list = j.is_object() && j.contains("states") ? j.at("states") : j;
    if (j.is_object()) reject_unknown(j, "channel", {"states"});
    if (!list.is_array()) throw ConfigParseError("channel must be an array of states");
    ChannelModel m;
    for (const auto& s : list) {
        require_object(s, "channel state");
        reject_unknown(s, "channel state", {"label", "rate", "probability"});
        ChannelState cs;
        read(s, "label", cs.label);
        read(s, "rate", cs.rate);
        read(s, "probability", cs.probability);
        m.states.push_back(std::move(cs));
    }
    return m;
}

ArrivalModel arrival_from_json(const json& j) {
    require_object(j, "arrivals");
    reject_unknown(j, "arrivals", {"distribution", "packet_size_bytes"});
    ArrivalModel m;
    read(j, "packet_size_bytes", m.packet_size_bytes);
    if (!j.contains("distribution") || !j.at("distribution").is_array())
        throw ConfigParseError("arrivals.distribution must be an array");
    for (const auto& o : j.at("distribution")) {
        require_object(o, "arrival outcome");
        reject_unknown(o, "arrival outcome", {"packets", "probability"});
        ArrivalOutcome out;
        read(o, "packets", out.packets);
        read(o, "probability", out.probability);
        m.distribution.push_back(out);
    }
    return m;
}

using Matrix = std::vector<std::vector<double>>;

RndPolicyParams rnd_from_json(const json& j) {
    require_object(j, "policy.params");
    reject_unknown(j, "policy.params", {"p01", "p10", "pi_tr"});
    RndPolicyParams p;
    for (const char* key : {"p01", "p10", "pi_tr"})
        if (!j.contains(key)) throw ConfigParseError(std::string("policy.params.") + key + " missing");
    read(j, "p01", p.p01);
    read(j, "p10", p.p10);
    read(j, "pi_tr", p.pi_tr);
    return p;
}

PolicySpec policy_from_json(const json& j) {
    PolicySpec spec;
    try {
        if (j.is_string()) {
            spec.kind = parse_policy_kind(j.get<std::string>());
            return spec;
        }
        require_object(j, "policy");
        reject_unknown(j, "policy", {"type", "params"});
        if (!j.contains("type")) throw ConfigParseError("policy.type missing");
        spec.kind = parse_policy_kind(j.at("type").get<std::string>());
    } catch (const std::invalid_argument& e) {
        throw ConfigParseError(e.what());
    } catch (const json::exception& e) {
        throw ConfigParseError(std::string("bad policy: ") + e.what());
    }
    if (spec.kind == PolicyKind::RND) {
        if (!j.contains("params")) throw ConfigParseError("RND policy requires params");
        spec.rnd = rnd_from_json(j.at("params"));
    }
    return spec;
}

json arrival_to_json(const ArrivalModel& m) {
    json dist = json::array();
    for (const auto& o : m.distribution)
        dist.push_back({{"packets", o.packets}, {"probability", o.probability}});
    return {{"distribution", dist}, {"packet_size_bytes", m.packet_size_bytes}};
}

json optional_slot(const std::optional<std::int64_t>& s) {
    return s ? json(*s) : json(nullptr);
}

}  // namespace

SimConfig config_from_json(const json& j) {
    require_object(j, "config");
    reject_unknown(j, "config",
                   {"node_count", "slot_ms", "horizon_slots", "initial_battery_j",
                    "infinite_battery", "v_param", "policy", "energy", "channel", "arrivals",
                    "seed", "wake_slot_rate_scaling"});
    SimConfig cfg = reference_config();
    read(j, "node_count", cfg.node_count);
    read(j, "slot_ms", cfg.slot_ms);
    if (j.contains("horizon_slots")) {
        const auto& h = j.at("horizon_slots");
        if (h.is_null() || (h.is_string() && h.get<std::string>() == "until_death"))
            cfg.horizon_slots.reset();
        else if (h.is_number_integer())
            cfg.horizon_slots = h.get<std::int64_t>();
        else
            throw ConfigParseError("horizon_slots must be an integer, null or \"until_death\"");
    }
    read(j, "initial_battery_j", cfg.initial_battery_j);
    read(j, "infinite_battery", cfg.infinite_battery);
    read(j, "v_param", cfg.v_param);
    read(j, "seed", cfg.seed);
    read(j, "wake_slot_rate_scaling", cfg.wake_slot_rate_scaling);
    if (j.contains("policy")) cfg.policy = policy_from_json(j.at("policy"));
    if (j.contains("energy")) cfg.energy = energy_from_json(j.at("energy"), cfg.energy);
    if (j.contains("channel")) cfg.channel = channel_from_json(j.at("channel"));
    if (j.contains("arrivals")) {
        const auto& a = j.at("arrivals");
        cfg.arrivals.clear();
        if (a.is_array()) {
            for (const auto& m : a) cfg.arrivals.push_back(arrival_from_json(m));
        } else {
            cfg.arrivals.push_back(arrival_from_json(a));
        }
    }
    return cfg;
}

json rnd_params_to_json(const RndPolicyParams& p) {
    return {{"p01", p.p01}, {"p10", p.p10}, {"pi_tr", p.pi_tr}};
}

json config_to_json(const SimConfig& cfg) {
    json j;
    j["node_count"] = cfg.node_count;
    j["slot_ms"] = cfg.slot_ms;
    j["horizon_slots"] = optional_slot(cfg.horizon_slots);
    j["initial_battery_j"] = cfg.initial_battery_j;
    j["infinite_battery"] = cfg.infinite_battery;
    j["v_param"] = cfg.v_param;
    if (cfg.policy.kind == PolicyKind::RND)
        j["policy"] = {{"type", "RND"}, {"params", rnd_params_to_json(cfg.policy.rnd)}};
    else
        j["policy"] = std::string(to_string(cfg.policy.kind));
    const auto& e = cfg.energy;
    j["energy"] = {{"e0_rate_j_per_ms", e.e0_rate_j_per_ms},
                   {"c_rate_j_per_ms", e.c_rate_j_per_ms},
                   {"alpha_j_per_packet", e.alpha_j_per_packet},
                   {"e01_j", e.e01_j},
                   {"e10_j", e.e10_j},
                   {"t01_ms", e.t01_ms},
                   {"t10_ms", e.t10_ms},
                   {"eb_j_per_bit", e.eb_j_per_bit},
                   {"broadcast_bits_per_weight_msg", e.broadcast_bits_per_weight_msg},
                   {"include_e01_on_wake", e.include_e01_on_wake}};
    json states = json::array();
    for (const auto& s : cfg.channel.states)
        states.push_back({{"label", s.label}, {"rate", s.rate}, {"probability", s.probability}});
    j["channel"] = states;
    if (cfg.arrivals.size() == 1) {
        j["arrivals"] = arrival_to_json(cfg.arrivals.front());
    } else {
        j["arrivals"] = json::array();
        for (const auto& m : cfg.arrivals) j["arrivals"].push_back(arrival_to_json(m));
    }
    j["seed"] = cfg.seed;
    j["wake_slot_rate_scaling"] = cfg.wake_slot_rate_scaling;
    return j;
}

SimConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigParseError("cannot open config file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigParseError(path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

json metrics_to_json(const MetricsReport& r) {
    json nodes = json::array();
    for (const auto& n : r.nodes)
        nodes.push_back({{"alive_slots", n.alive_slots},
                         {"duty_cycle", n.duty_cycle},
                         {"avg_queue_backlog_packets", n.avg_queue_backlog_packets},
                         {"avg_energy_j_per_slot", n.avg_energy_j_per_slot}});
    return {{"slots", r.slots},
            {"avg_energy_active_j_per_slot", r.avg_energy_active_j_per_slot},
            {"avg_energy_sleep_j_per_slot", r.avg_energy_sleep_j_per_slot},
            {"avg_energy_switching_j_per_slot", r.avg_energy_switching_j_per_slot},
            {"avg_energy_broadcast_j_per_slot", r.avg_energy_broadcast_j_per_slot},
            {"avg_total_energy_j_per_slot", r.avg_total_energy_j_per_slot},
            {"avg_network_backlog_packets", r.avg_network_backlog_packets},
            {"avg_node_backlog_packets", r.avg_node_backlog_packets},
            {"mean_duty_cycle", r.mean_duty_cycle},
            {"burst_count", r.burst_count},
            {"mean_burst_length", r.mean_burst_length},
            {"idle_slot_fraction", r.idle_slot_fraction},
            {"avg_served_packets_per_slot", r.avg_served_packets_per_slot},
            {"first_death_slot", optional_slot(r.first_death_slot)},
            {"network_death_slot", optional_slot(r.network_death_slot)},
            {"nodes", nodes}};
}

json oracle_to_json(const OracleResult& r) {
    return {{"h_star_j_per_slot", r.h_star_j_per_slot},
            {"best_params", rnd_params_to_json(r.best_params)},
            {"achieved_rates", r.achieved_rates},
            {"target_rates", r.target_rates},
            {"grid_step", r.grid_step},
            {"evaluation_mode", std::string(to_string(r.evaluation_mode))}};
}

std::string format_double(double x) { return fmt::format("{:.11e}", x); }

void write_slot_csv_header(std::ostream& os) {
    os << "slot,node,mode,switch,served,arrivals,queue,battery_j,e_sleep,e_active,e_tx,e_switch,"
          "e_bcast,idle_flag\n";
}

void write_slot_csv_rows(std::ostream& os, const SlotRecord& record) {
    for (std::size_t n = 0; n < record.nodes.size(); ++n) {
        const auto& o = record.nodes[n];
        const auto& e = o.energy;
        os << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", record.slot, n,
                          to_string(o.mode), o.switched ? 1 : 0, o.served, o.arrivals, o.queue,
                          format_double(o.battery_j), format_double(e.sleep_j),
                          format_double(e.active_circuit_j), format_double(e.transmission_j),
                          format_double(e.switching_j), format_double(e.broadcast_j),
                          record.idle ? 1 : 0);
    }
}

}  // namespace sleepsched
