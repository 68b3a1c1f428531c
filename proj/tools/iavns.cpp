#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "iavns/checks.hpp"
#include "iavns/config.hpp"
#include "iavns/montecarlo.hpp"

namespace {

using namespace iavns;

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitCheck = 3;

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> runs;
    std::optional<int> threads;
    std::string out;
    std::string estimators;
    std::string preset;
    bool print_config = false;
};

AppConfig effective_config(const Flags& f) {
    AppConfig cfg = f.config.empty() ? default_app_config() : load_config(f.config);
    if (!f.preset.empty()) {
        try {
            apply_terrain_preset(cfg.scenario, f.preset);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("--preset: ") + e.what());
        }
    }
    if (f.seed) {
        cfg.scenario.seed = *f.seed;
        cfg.campaign.master_seed = *f.seed;
    }
    if (f.runs) {
        if (*f.runs < 1) throw ConfigError("--runs: must be >= 1");
        cfg.campaign.runs = *f.runs;
    }
    if (f.threads) {
        if (*f.threads < 0) throw ConfigError("--threads: must be >= 0");
        cfg.campaign.threads = *f.threads;
    }
    if (!f.estimators.empty()) {
        try {
            cfg.campaign.estimators = parse_estimators(f.estimators);
        } catch (const ConfigError& e) {
            throw ConfigError(std::string("--estimators: ") + e.what());
        }
    }
    if (!f.out.empty()) cfg.out_dir = f.out;
    try {
        cfg.scenario.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

void print_final_errors(const RunReport& report) {
    for (const auto& s : report.series) {
        if (s.records.empty()) continue;
        const FrameRecord& r = s.records.back();
        const double pct = report.distance_flown > 0.0 ? 100.0 * r.dhor / report.distance_flown : 0.0;
        std::printf("%-6s t=%.1f s  dpsi=%+.4f deg  dtheta=%+.4f deg  dxi=%+.4f deg  dr=%.4f deg  dh=%+.2f m  "
                    "dhor=%.1f m (%.3f%% of %.0f m)\n",
                    to_string(s.kind), r.t, r.dpsi, r.dtheta, r.dxi, r.dr, r.dh, r.dhor, pct, report.distance_flown);
    }
}

void write_outputs(const std::vector<RunReport>& reports, const AppConfig& cfg) {
    const auto dir = resolve_out_dir(cfg) / cfg.scenario.name;
    emit_timeseries(reports, dir);
    const auto summary = emit_summary(aggregate(reports), cfg.scenario.name, dir);
    std::printf("wrote %s\n", summary.parent_path().string().c_str());
}

int cmd_run(const AppConfig& cfg) {
    const RunReport report = run_single(cfg.scenario, cfg.campaign.estimators, cfg.scenario.seed, cfg.campaign.run);
    print_final_errors(report);
    write_outputs({report}, cfg);
    return 0;
}

int cmd_montecarlo(const AppConfig& cfg) {
    const std::vector<RunReport> reports = run_campaign(cfg.scenario, cfg.campaign);
    write_outputs(reports, cfg);
    std::fputs(format_summary(aggregate(reports), cfg.scenario.name).c_str(), stdout);
    return 0;
}

int cmd_check(const AppConfig& cfg) {
    CheckSuiteOptions opts;
    opts.adjustment = cfg.scenario.adjustment;
    bool ok = true;
    for (const CheckResult& r : run_checks(opts)) {
        std::printf("%s %-26s %6.2f s  %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.seconds, r.detail.c_str());
        ok = ok && r.passed;
    }
    return ok ? 0 : kExitCheck;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Inertial-aided visual navigation simulator"};
    app.require_subcommand(1);
    Flags f;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", f.config, "Scenario file (TOML)");
        sub->add_option("--seed", f.seed, "Run seed for run, master seed for montecarlo");
        sub->add_option("--out", f.out, std::string("Output directory (default $") + kOutDirEnv + " or out)");
        sub->add_option("--estimators", f.estimators, "Comma-separated subset of ins,vns,iavns");
        sub->add_option("--preset", f.preset, "Terrain preset: DS, FM, FR, MX, PR or UR");
        sub->add_flag("--print-config", f.print_config, "Print the effective configuration and exit");
    };
    CLI::App* run = app.add_subcommand("run", "Simulate one seeded flight");
    add_common(run);
    CLI::App* mc = app.add_subcommand("montecarlo", "Run a seeded campaign and write envelopes and summary");
    add_common(mc);
    mc->add_option("--runs", f.runs, "Number of runs");
    mc->add_option("--threads", f.threads, "Worker threads (0: all cores)");
    CLI::App* check = app.add_subcommand("check", "Run the fast invariant suite");
    check->add_option("--config", f.config, "Scenario file whose adjustment table is checked");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    AppConfig cfg;
    try {
        cfg = effective_config(f);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    }
    if (f.print_config) {
        std::fputs(to_toml(cfg).c_str(), stdout);
        return 0;
    }

    try {
        if (*run) return cmd_run(cfg);
        if (*mc) return cmd_montecarlo(cfg);
        return cmd_check(cfg);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntime;
    }
}
