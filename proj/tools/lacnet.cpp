#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lacnet/config.hpp"
#include "lacnet/simulation.hpp"
#include "lacnet/sweep.hpp"

namespace fs = std::filesystem;
using namespace lacnet;

namespace {

// exit codes: 0 ok, 1 runtime failure, 2 bad configuration
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

bool load_base(const std::string& config_path,
               const std::vector<std::string>& overrides, ScenarioConfig& cfg) {
    ConfigError err;
    if (!config_path.empty()) {
        auto loaded = load_config(config_path, err);
        if (!loaded) {
            std::cerr << "config error: " << err.what() << "\n";
            return false;
        }
        cfg = *loaded;
    }
    for (const auto& kv : overrides) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) {
            std::cerr << "config error: override '" << kv
                      << "' is not key=value\n";
            return false;
        }
        if (!apply_config_kv(cfg, kv.substr(0, eq), kv.substr(eq + 1), err)) {
            std::cerr << "config error: " << err.what() << "\n";
            return false;
        }
    }
    if (!validate_config(cfg, err)) {
        std::cerr << "config error: " << err.what() << "\n";
        return false;
    }
    return true;
}

void print_record(const MetricsRecord& r) {
    std::cout << MetricsRecord::csv_header() << "\n" << r.csv_row() << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Aerial compute network simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", scheme = "rwa", preset;
    std::vector<std::string> overrides;
    uint64_t seed = 1;
    int jobs = 1;
    bool dump_ledger = false;

    auto* run = app.add_subcommand("run", "Single scenario run");
    run->add_option("--config", config_path, "INI scenario file");
    run->add_option("--set", overrides, "Override key=value (repeatable)");
    run->add_option("--scheme", scheme, "cta | cbba | rwa");
    run->add_option("--seed", seed, "RNG seed");
    run->add_option("--out", out_dir, "Output directory");
    run->add_flag("--dump-ledger", dump_ledger, "Write chain dumps (rwa only)");

    auto* sweep = app.add_subcommand("sweep", "Cartesian parameter sweep");
    sweep->add_option("--config", config_path, "INI scenario file (base)");
    sweep->add_option("--set", overrides, "Override key=value (repeatable)");
    sweep->add_option("--preset", preset, "fig5a | fig5b | fig5c");
    sweep->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    sweep->add_option("--out", out_dir, "Output directory");
    sweep->add_flag("--dump-ledger", dump_ledger, "Per-run chain dumps");

    auto* cal = app.add_subcommand("calibrate", "Chain confirmation latency");
    cal->add_option("--config", config_path, "INI scenario file");
    cal->add_option("--set", overrides, "Override key=value (repeatable)");
    cal->add_option("--seed", seed, "RNG seed");

    CLI11_PARSE(app, argc, argv);

    ScenarioConfig base;
    if (!load_base(config_path, overrides, base)) return kExitConfig;

    try {
        if (run->parsed()) {
            base.seed = seed;
            ConfigError err;
            if (!apply_config_kv(base, "scheme", scheme, err)) {
                std::cerr << "config error: " << err.what() << "\n";
                return kExitConfig;
            }
            Simulation sim(base);
            MetricsRecord rec = sim.run();
            print_record(rec);
            fs::create_directories(out_dir);
            write_runs_csv(out_dir + "/runs.csv", {rec});
            if (dump_ledger && base.scheme == SchemeKind::Rwa) {
                std::ofstream pf(out_dir + "/registry.chain");
                sim.permissioned().dump(pf);
                std::ofstream tf(out_dir + "/token.chain");
                sim.permissionless().dump(tf);
            }
            return 0;
        }
        if (sweep->parsed()) {
            SweepSpec spec;
            if (!preset.empty()) {
                auto p = make_preset(preset, base);
                if (!p) {
                    std::cerr << "config error: unknown preset '" << preset
                              << "'\n";
                    return kExitConfig;
                }
                spec = *p;
            } else {
                spec.base = base;
            }
            fs::create_directories(out_dir);
            SweepOptions opts;
            opts.jobs = jobs;
            if (dump_ledger) opts.ledger_dump_dir = out_dir;
            SweepResult res = run_sweep(spec, opts);
            write_runs_csv(out_dir + "/runs.csv", res.runs);
            write_summary_csv(out_dir + "/summary.csv", res.summary);
            std::cout << res.runs.size() << " runs -> " << out_dir
                      << "/runs.csv, " << res.summary.size() << " rows -> "
                      << out_dir << "/summary.csv\n";
            return 0;
        }
        if (cal->parsed()) {
            base.seed = seed;
            CalibrationResult r = calibrate_chain(base);
            std::printf("mean_confirmation_latency_s=%.6f txs_measured=%llu\n",
                        r.mean_confirmation_latency_s,
                        static_cast<unsigned long long>(r.txs_measured));
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return 0;
}
