#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "sleepsched/config_io.hpp"
#include "sleepsched/experiments.hpp"

namespace fs = std::filesystem;
using namespace sleepsched;

namespace {

struct CommonOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> horizon;
    std::optional<double> v;
    bool infinite_battery = false;
};

void add_common(CLI::App* app, CommonOptions& o) {
    app->add_option("--config", o.config_path, "JSON config (defaults to the built-in reference setup)");
    app->add_option("--seed", o.seed, "Base seed");
    app->add_option("--horizon", o.horizon, "Horizon in slots (default: until network death)")
        ->check(CLI::PositiveNumber);
    app->add_flag("--infinite-battery", o.infinite_battery, "Disable battery depletion");
}

SimConfig base_config(const CommonOptions& o) {
    SimConfig cfg = o.config_path.empty() ? reference_config() : load_config(o.config_path);
    if (o.seed) cfg.seed = *o.seed;
    if (o.horizon) cfg.horizon_slots = *o.horizon;
    if (o.v) cfg.v_param = *o.v;
    if (o.infinite_battery) cfg.infinite_battery = true;
    return cfg;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    return os;
}

template <typename T, typename Parse>
std::vector<T> split_list(const std::string& text, Parse parse) {
    std::vector<T> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(parse(item));
    }
    return out;
}

int cmd_run(const CommonOptions& o, const fs::path& out_dir) {
    const SimConfig cfg = validate_config(base_config(o));
    if (!cfg.horizon_slots && cfg.infinite_battery)
        throw std::invalid_argument("an infinite battery needs a finite --horizon");
    fs::create_directories(out_dir);
    auto csv = open_out(out_dir / "slots.csv");
    write_slot_csv_header(csv);
    MetricsAccumulator acc;
    const Termination term = run_streaming(cfg, [&](const SlotRecord& r) {
        write_slot_csv_rows(csv, r);
        acc.observe(r);
    });
    nlohmann::json j = metrics_to_json(acc.report());
    j["termination"] = std::string(to_string(term));
    j["config"] = config_to_json(cfg);
    open_out(out_dir / "metrics.json") << j.dump(2) << "\n";
    return 0;
}

int cmd_sweep(const CommonOptions& o, const fs::path& out_dir, const std::string& v_list,
              const std::string& policies, int seeds, int jobs) {
    SimConfig cfg = base_config(o);
    if (!cfg.horizon_slots && cfg.infinite_battery)
        throw std::invalid_argument("an infinite battery needs a finite --horizon");
    SweepSpec spec;
    spec.v_list = split_list<double>(v_list, [](const std::string& s) { return std::stod(s); });
    spec.policies = split_list<PolicyKind>(policies, [](const std::string& s) {
        const PolicyKind k = parse_policy_kind(s);
        if (k == PolicyKind::RND) throw std::invalid_argument("RND is not a sweepable policy");
        return k;
    });
    if (seeds < 1) throw std::invalid_argument("--seeds must be at least 1");
    spec.seeds = seed_range(cfg.seed, seeds);
    spec.jobs = jobs;
    check_sweep_spec(spec);
    const auto points = run_sweep(cfg, spec);
    fs::create_directories(out_dir);
    auto csv = open_out(out_dir / "sweep.csv");
    write_sweep_csv_header(csv);
    for (const auto& p : points) write_sweep_csv_row(csv, p);
    return 0;
}

int cmd_oracle(const CommonOptions& o, double grid_step) {
    const SimConfig cfg = validate_config(base_config(o));
    const auto lambda = cfg.arrival_means();
    const OracleResult res = minimize_energy(cfg, lambda, grid_step);
    nlohmann::json j = oracle_to_json(res);
    j["eps_hat"] = stability_margin(cfg, lambda, grid_step);
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_verify(const CommonOptions& o, double grid_step) {
    SimConfig cfg = base_config(o);
    const VerifyReport rep = verify_bounds(cfg, grid_step);
    std::cout << fmt::format("lambda={} h_star={} eps_hat={} B={} h_max={} slots={}\n",
                             format_double(rep.lambda), format_double(rep.h_star),
                             format_double(rep.eps_hat), format_double(rep.B),
                             format_double(rep.h_max), rep.metrics.slots);
    for (const auto& c : rep.checks) {
        if (c.skipped) {
            std::cout << fmt::format("SKIP {}: {}\n", c.name, c.note);
            continue;
        }
        std::cout << fmt::format("{} {}: measured={} bound={}{}\n", c.pass ? "PASS" : "FAIL",
                                 c.name, format_double(c.measured), format_double(c.bound),
                                 c.note.empty() ? "" : " (" + c.note + ")");
    }
    return rep.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sleep/active scheduling simulator for single-hop sensor networks"};
    app.require_subcommand(1);

    CommonOptions run_opts, sweep_opts, oracle_opts, verify_opts;
    std::string run_out = ".", sweep_out = ".";
    std::string v_list, policies = "ESS";
    int seeds = 1, jobs = 1;
    double oracle_grid = 0.02, verify_grid = 0.02;

    auto* run = app.add_subcommand("run", "Single run: slots.csv and metrics.json");
    add_common(run, run_opts);
    run->add_option("--v", run_opts.v, "V parameter");
    run->add_option("--out", run_out, "Output directory");

    auto* sweep = app.add_subcommand("sweep", "V sweep over policies and paired seeds: sweep.csv");
    add_common(sweep, sweep_opts);
    sweep->add_option("--v-list", v_list, "Comma-separated, strictly increasing V values")->required();
    sweep->add_option("--policies", policies, "Comma-separated policy names");
    sweep->add_option("--seeds", seeds, "Number of paired seeds");
    sweep->add_option("--jobs", jobs, "Concurrent runs")->check(CLI::PositiveNumber);
    sweep->add_option("--out", sweep_out, "Output directory");

    auto* oracle = app.add_subcommand("oracle", "Minimum-energy randomized policy for the config's rates");
    add_common(oracle, oracle_opts);
    oracle->add_option("--grid-step", oracle_grid, "Lattice step for mode probabilities");

    auto* verify = app.add_subcommand("verify", "Check energy and backlog bounds on a 1-node instance");
    add_common(verify, verify_opts);
    verify->add_option("--v", verify_opts.v, "V parameter");
    verify->add_option("--grid-step", verify_grid, "Lattice step for the oracle");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(run_opts, run_out);
        if (*sweep) return cmd_sweep(sweep_opts, sweep_out, v_list, policies, seeds, jobs);
        if (*oracle) return cmd_oracle(oracle_opts, oracle_grid);
        if (*verify) return cmd_verify(verify_opts, verify_grid);
    } catch (const ConfigValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const OracleError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
