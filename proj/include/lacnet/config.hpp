#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lacnet {

enum class SchemeKind : uint8_t { Cta, Cbba, Rwa };
const char* scheme_name(SchemeKind s);

struct ScenarioConfig {
    SchemeKind scheme = SchemeKind::Rwa;
    int n_nodes = 100;
    double uav_fraction = 0.8;
    double arrival_rate_per_min = 60;
    double horizon_s = 600;
    double warmup_s = 60;
    uint64_t seed = 1;

    // link
    double link_bandwidth_bps = 5e9;
    double link_base_latency_s = 0.010;

    // task
    double task_data_bits = 2.0e8; // 25 MB
    double task_flop = 2e12;
    double task_deadline_s = 120;
    double task_units = 100;
    double task_max_payment = 50;
    double task_result_bits = 1e6;
    double unit_flop = 2e10; // COMP unit to FLOP ratio

    // chain (shared by both ledgers)
    int chain_block_size = 10;
    double chain_block_timeout_s = 2.0;
    double chain_tps_cap = 1000;
    double chain_anchor_interval_s = 30;
    double chain_propagation_s = 0.1;
    bool chain_mint_on_proof = false;
    double chain_checkin_interval_s = 10;

    // market
    bool auction_vickrey = false; // default first-price pay-as-bid
    double bid_window_s = 3.0;
    double base_cost_uav = 0.4;
    double base_cost_evtol = 0.3;
    int max_bidders = 8;
    double stake = 10;

    // economy
    double requester_endowment = 1e9;
    double provider_endowment = 10;

    // mobility / duty cycle
    double uav_speed = 23, evtol_speed = 45;
    double uav_capacity = 1e12, evtol_capacity = 5.3e12;
    double uav_busy_mean_s = 120, uav_idle_mean_s = 60;
    double evtol_busy_mean_s = 60, evtol_idle_mean_s = 140;
    double mobility_tick_s = 1.0;
    double arena_m = 2000;
    double alt_min_m = 100, alt_max_m = 150;

    // adversary
    double malicious_fraction = 0;
    bool behavior_false_report = true;
    bool behavior_bid_abandon = true;
    double abandon_prob = 1.0;
    double report_inflation = 5.0;
    int ban_after = 3;
    double malicious_undercut = 0.9;

    // cta
    double cta_service_per_node_s = 0.005;
    double cta_retry_interval_s = 1.0;
    double cta_report_interval_s = 1.0;

    // cbba
    double cbba_epoch_s = 2.0;
    double cbba_comm_radius_m = 800;
    int cbba_bundle_cap = 3;
    double cbba_time_value = 10;
    double cbba_volunteer_fraction = 0.3;
    double cbba_msg_latency_s = 0.010;

    // calibrate preset
    double calibrate_background_tps = 5.0;

    double reserve_per_unit() const { return task_max_payment / task_units; }
    double gcs_service_time_s() const { return cta_service_per_node_s * n_nodes; }
};

struct ConfigError {
    std::string key;
    std::string reason;
    int line = 0;
    std::string what() const {
        return (line ? "line " + std::to_string(line) + ": " : "") + key +
               (key.empty() ? "" : ": ") + reason;
    }
};

// Flat INI: `key = value` lines, optional `[section]` headers mapping to
// `section.key`. Unknown keys and out-of-range values are rejected. An empty
// file yields all defaults.
std::optional<ScenarioConfig> parse_config_text(const std::string& text,
                                                ConfigError& err);
std::optional<ScenarioConfig> load_config(const std::string& path,
                                          ConfigError& err);

// Applies one `section.key=value` setting; also used for CLI overrides.
bool apply_config_kv(ScenarioConfig& cfg, const std::string& key,
                     const std::string& value, ConfigError& err);

bool validate_config(const ScenarioConfig& cfg, ConfigError& err);

// Sweep axes: cartesian product over any subset of these.
struct SweepSpec {
    ScenarioConfig base;
    std::vector<SchemeKind> schemes;
    std::vector<double> rates_per_min;
    std::vector<int> n_nodes;
    std::vector<double> malicious_fractions;
    std::vector<uint64_t> seeds;
};

// Presets reproducing the three headline experiments plus the chain latency
// calibration scenario.
std::optional<SweepSpec> make_preset(const std::string& name,
                                     const ScenarioConfig& base);

} // namespace lacnet
