// Thin JSON-in/JSON-out layer; python/sleepsched/__init__.py converts to dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <vector>

#include "sleepsched/config_io.hpp"
#include "sleepsched/energy.hpp"
#include "sleepsched/experiments.hpp"
#include "sleepsched/oracle.hpp"

namespace py = pybind11;
using namespace sleepsched;
using nlohmann::json;

namespace {

SimConfig parse(const std::string& text) {
    return config_from_json(text.empty() ? json::object() : json::parse(text));
}

std::string default_config() { return config_to_json(reference_config()).dump(); }

std::string run_metrics_json(const std::string& cfg) {
    return metrics_to_json(run_metrics(parse(cfg))).dump();
}

std::string run_slots_csv(const std::string& cfg) {
    const SimConfig c = parse(cfg);
    std::ostringstream os;
    write_slot_csv_header(os);
    run_streaming(c, [&](const SlotRecord& r) { write_slot_csv_rows(os, r); });
    return os.str();
}

std::string sweep_json(const std::string& cfg, const std::vector<std::string>& policies,
                       const std::vector<double>& v_list, std::uint64_t seed_base, int seeds,
                       int jobs) {
    SweepSpec spec;
    for (const auto& p : policies) spec.policies.push_back(parse_policy_kind(p));
    spec.v_list = v_list;
    spec.seeds = seed_range(seed_base, seeds);
    spec.jobs = jobs;
    json out = json::array();
    {
        py::gil_scoped_release release;
        for (const auto& p : run_sweep(parse(cfg), spec)) {
            json row = metrics_to_json(p.report);
            row["policy"] = std::string(to_string(p.policy));
            row["v"] = p.v;
            row["seed"] = p.seed;
            out.push_back(std::move(row));
        }
    }
    return out.dump();
}

std::string minimize_energy_json(const std::string& cfg, const std::vector<double>& targets,
                                 double grid_step) {
    return oracle_to_json(minimize_energy(parse(cfg), targets, grid_step)).dump();
}

double stability_margin_value(const std::string& cfg, const std::vector<double>& targets,
                              double grid_step) {
    return stability_margin(parse(cfg), targets, grid_step);
}

std::string verify_json(const std::string& cfg, double grid_step, double slack) {
    VerifyReport rep;
    {
        py::gil_scoped_release release;
        rep = verify_bounds(parse(cfg), grid_step, slack);
    }
    json checks = json::array();
    for (const auto& c : rep.checks)
        checks.push_back({{"name", c.name},
                          {"bound", c.bound},
                          {"measured", c.measured},
                          {"skipped", c.skipped},
                          {"pass", c.pass},
                          {"note", c.note}});
    return json{{"lambda", rep.lambda},
                {"h_star", rep.h_star},
                {"eps_hat", rep.eps_hat},
                {"B", rep.B},
                {"h_max", rep.h_max},
                {"metrics", metrics_to_json(rep.metrics)},
                {"checks", checks},
                {"all_pass", rep.all_pass()}}
        .dump();
}

Mode parse_mode(const std::string& m) {
    if (m == "active") return Mode::Active;
    if (m == "sleep") return Mode::Sleep;
    throw py::value_error("mode must be 'active' or 'sleep'");
}

double slot_energy_value(const std::string& prev, const std::string& next, int served,
                         bool transmitting, const std::string& cfg) {
    const SimConfig c = parse(cfg);
    return slot_energy(parse_mode(prev), parse_mode(next), served, transmitting, c.energy, c.slot_ms)
        .total_j;
}

double compute_B_value(const std::string& cfg) { return compute_B(parse(cfg)); }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Energy-aware sleep scheduling simulator";

    static py::exception<OracleError> oracle_error(m, "OracleError", PyExc_RuntimeError);
    py::register_exception<ConfigValidationError>(m, "ConfigValidationError", PyExc_ValueError);
    py::register_exception<ConfigParseError>(m, "ConfigParseError", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const OracleError& e) {
            py::set_error(oracle_error,
                          (std::string(e.what()) + " [" +
                           (e.code() == OracleErrorCode::InfeasibleRate        ? "infeasible_rate"
                            : e.code() == OracleErrorCode::UnsupportedInstance ? "unsupported_instance"
                                                                               : "invalid_params") +
                           "]")
                              .c_str());
        }
    });

    m.def("default_config", &default_config);
    m.def("run_metrics", &run_metrics_json, py::arg("config"),
          py::call_guard<py::gil_scoped_release>());
    m.def("run_slots_csv", &run_slots_csv, py::arg("config"),
          py::call_guard<py::gil_scoped_release>());
    m.def("sweep", &sweep_json, py::arg("config"), py::arg("policies"), py::arg("v_list"),
          py::arg("seed_base"), py::arg("seeds"), py::arg("jobs"));
    m.def("minimize_energy", &minimize_energy_json, py::arg("config"), py::arg("targets"),
          py::arg("grid_step"));
    m.def("stability_margin", &stability_margin_value, py::arg("config"), py::arg("targets"),
          py::arg("grid_step"));
    m.def("verify", &verify_json, py::arg("config"), py::arg("grid_step"), py::arg("slack"));
    m.def("slot_energy", &slot_energy_value, py::arg("prev"), py::arg("next"), py::arg("served"),
          py::arg("transmitting"), py::arg("config"));
    m.def("compute_B", &compute_B_value, py::arg("config"));
}
