// Command-line front end: run scenarios, sweep parameters, audit the
// mechanism, and inspect constellation presets.
//
// Exit codes: 0 success, 1 configuration error, 2 runtime failure,
// 3 audit violation.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "susco/audit.hpp"
#include "susco/sim.hpp"

namespace fs = std::filesystem;

namespace {

fs::path default_out_dir() {
    if (const char* env = std::getenv("SUSCO_OUT_DIR")) return fs::path(env);
    return fs::path("susco_out");
}

void write_scenario_outputs(const fs::path& dir, const susco::ScenarioConfig& cfg,
                            const susco::ScenarioResult& res) {
    fs::create_directories(dir);
    susco::write_text_file((dir / "metrics.csv").string(), susco::render_metrics_csv(res.metrics));
    susco::write_text_file((dir / "transcript.csv").string(),
                           susco::render_transcript_csv(res.transcript));
    susco::write_text_file((dir / "summary.txt").string(), susco::render_summary(res));
    susco::write_text_file((dir / "config.ini").string(), susco::serialize_config(cfg));
}

void apply_overrides(susco::ScenarioConfig& cfg, const std::string& scheme, std::int64_t seed) {
    if (!scheme.empty()) {
        auto parsed = susco::parse_scheme(scheme);
        if (!parsed) throw susco::InvalidConfig("unknown scheme: " + scheme);
        cfg.scheme = *parsed;
    }
    if (seed >= 0) cfg.seed = std::uint64_t(seed);
}

int cmd_run(const std::string& config_path, const std::string& scheme, std::int64_t seed,
            const std::string& out_dir) {
    auto cfg = susco::load_scenario_config(config_path);
    apply_overrides(cfg, scheme, seed);
    auto res = susco::run_scenario(cfg);
    fs::path dir = out_dir.empty() ? default_out_dir() : fs::path(out_dir);
    write_scenario_outputs(dir, cfg, res);
    std::cout << susco::render_summary(res);
    std::cout << "outputs " << dir.string() << "\n";
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& param,
              const std::vector<std::string>& values, const std::vector<std::int64_t>& seeds,
              const std::string& out_dir) {
    if (values.empty()) throw susco::InvalidConfig("sweep requires at least one --values entry");
    if (seeds.empty()) throw susco::InvalidConfig("sweep requires at least one --seeds entry");
    const bool known = param == "budget" || param == "unreliable_failure_rate" ||
                       param == "unreliable_fraction" || param == "scheme";
    if (!known) throw susco::InvalidConfig("unknown sweep parameter: " + param);

    auto base = susco::load_scenario_config(config_path);
    fs::path root = out_dir.empty() ? default_out_dir() : fs::path(out_dir);
    fs::create_directories(root);

    std::ostringstream table;
    table << "param,value,seed,scheme,tasks_total,tasks_offloaded,tasks_failed,offload_rate,"
             "failure_rate_overall,mean_reduced_energy_j,mean_reduced_life,"
             "mean_reduced_latency_ms,mean_total_payment,utility_to_cost_ratio\n";

    for (const auto& value : values) {
        susco::ScenarioConfig cfg = base;
        if (param == "scheme") {
            auto parsed = susco::parse_scheme(value);
            if (!parsed) throw susco::InvalidConfig("unknown scheme: " + value);
            cfg.scheme = *parsed;
        } else {
            double num = 0.0;
            try {
                std::size_t used = 0;
                num = std::stod(value, &used);
                if (used != value.size()) throw std::invalid_argument(value);
            } catch (const std::exception&) {
                throw susco::InvalidConfig("sweep value is not a number: " + value);
            }
            if (param == "budget") cfg.budget = num;
            if (param == "unreliable_failure_rate") cfg.unreliable_failure_rate = num;
            if (param == "unreliable_fraction") cfg.unreliable_fraction = num;
        }
        susco::validate_config(cfg);
        for (std::int64_t seed : seeds) {
            cfg.seed = std::uint64_t(seed);
            auto res = susco::run_scenario(cfg);
            fs::path cell = root / (param + "=" + value) / ("seed=" + std::to_string(seed));
            write_scenario_outputs(cell, cfg, res);
            auto s = susco::summarize(res);
            table << param << ',' << value << ',' << seed << ','
                  << susco::scheme_name(cfg.scheme) << ',' << s.tasks_total << ','
                  << s.tasks_offloaded << ',' << s.tasks_failed << ','
                  << susco::format_double(s.offload_rate) << ','
                  << susco::format_double(s.failure_rate_overall) << ','
                  << susco::format_double(s.mean_reduced_energy_j) << ','
                  << susco::format_double(s.mean_reduced_life) << ','
                  << susco::format_double(s.mean_reduced_latency_ms) << ','
                  << susco::format_double(s.mean_total_payment) << ','
                  << susco::format_double(s.utility_to_cost_ratio) << '\n';
            std::cout << "cell " << cell.string() << " done\n";
        }
    }
    susco::write_text_file((root / "sweep.csv").string(), table.str());
    std::cout << "sweep " << (root / "sweep.csv").string() << "\n";
    return 0;
}

int cmd_audit(std::int64_t instances, std::int64_t seed, double inject,
              const std::string& out_dir) {
    fs::path dir = out_dir.empty() ? default_out_dir() : fs::path(out_dir);
    fs::create_directories(dir);
    susco::audit::AuditOptions opts;
    opts.instances = instances;
    opts.seed = std::uint64_t(seed < 0 ? 1 : seed);
    opts.check_constraints = true;
    opts.check_misreports = true;
    opts.check_critical_values = true;
    opts.inject_underpayment = inject;
    opts.reproducer_path = (dir / "audit_reproducer.txt").string();
    auto counters = susco::audit::run_audit(opts);
    std::cout << susco::audit::render_audit_report(counters);
    if (!counters.ok()) {
        std::cout << "reproducer " << opts.reproducer_path << "\n";
        return 3;
    }
    return 0;
}

int cmd_presets() {
    std::cout << "preset,planes,sats_per_plane,total,altitude_km,inclination_deg\n";
    for (const auto& name : susco::preset_names()) {
        auto c = susco::preset_constellation(name);
        std::cout << name << ',' << c.planes << ',' << c.sats_per_plane << ','
                  << c.planes * c.sats_per_plane << ',' << susco::format_double(c.altitude_km)
                  << ',' << susco::format_double(c.inclination_deg) << "\n";
    }
    return 0;
}

int cmd_validate(const std::string& config_path) {
    auto cfg = susco::load_scenario_config(config_path);
    std::cout << "config ok: preset " << cfg.preset << ", scheme "
              << susco::scheme_name(cfg.scheme) << ", " << cfg.dishes.size() << " dishes, "
              << cfg.num_intervals << " intervals\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"LEO data-offloading simulator and reverse-auction toolkit"};
    app.require_subcommand(1);

    std::string config_path, scheme, out_dir, param;
    std::vector<std::string> values;
    std::vector<std::int64_t> seeds;
    std::int64_t seed = -1, instances = 1000;
    double inject = 0.0;

    auto* run = app.add_subcommand("run", "Run one scenario and write metrics");
    run->add_option("config", config_path, "Scenario config file")->required();
    run->add_option("--scheme", scheme, "Override the offloading scheme");
    run->add_option("--seed", seed, "Override the RNG seed");
    run->add_option("--out-dir", out_dir, "Output directory (default $SUSCO_OUT_DIR)");

    auto* sweep = app.add_subcommand("sweep", "Run a scenario across parameter values");
    sweep->add_option("config", config_path, "Scenario config file")->required();
    sweep->add_option("--param", param, "budget | unreliable_failure_rate | unreliable_fraction | scheme")
        ->required();
    sweep->add_option("--values", values, "Comma-separated parameter values")
        ->required()
        ->delimiter(',');
    sweep->add_option("--seeds", seeds, "Comma-separated seeds")->required()->delimiter(',');
    sweep->add_option("--out-dir", out_dir, "Output directory (default $SUSCO_OUT_DIR)");

    auto* audit = app.add_subcommand("audit", "Audit mechanism properties on random instances");
    audit->add_option("--instances", instances, "Number of random instances");
    audit->add_option("--seed", seed, "Audit RNG seed");
    audit->add_option("--out-dir", out_dir, "Output directory (default $SUSCO_OUT_DIR)");
    audit->add_option("--inject-underpayment", inject, "Fault hook: shave one payment")
        ->group("");  // hidden: used to prove the auditor detects violations

    app.add_subcommand("presets", "List constellation presets");

    auto* validate = app.add_subcommand("validate-config", "Parse and validate a config");
    validate->add_option("config", config_path, "Scenario config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand("run")) return cmd_run(config_path, scheme, seed, out_dir);
        if (app.got_subcommand("sweep"))
            return cmd_sweep(config_path, param, values, seeds, out_dir);
        if (app.got_subcommand("audit")) return cmd_audit(instances, seed, inject, out_dir);
        if (app.got_subcommand("presets")) return cmd_presets();
        if (app.got_subcommand("validate-config")) return cmd_validate(config_path);
    } catch (const susco::InvalidConfig& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
