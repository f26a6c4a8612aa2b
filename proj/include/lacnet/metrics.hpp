#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lacnet {

struct MetricsRecord {
    std::string scheme;
    int n_nodes = 0;
    double arrival_rate_per_min = 0;
    double malicious_fraction = 0;
    uint64_t seed = 0;
    double mean_latency_s = 0;
    double p95_latency_s = 0;
    double failure_rate = 0;
    double utilization = 0;
    uint64_t tasks_total = 0;
    uint64_t tasks_failed = 0;
    double tokens_settled = 0;
    uint64_t blocks_sealed = 0;

    // diagnostics, not part of the CSV row
    uint64_t tasks_completed = 0;
    uint64_t tasks_pending = 0;
    uint64_t malicious_wins_abandoned = 0;
    uint64_t conservation_violations = 0;

    static std::string csv_header();
    std::string csv_row() const;
};

// Capacity-weighted busy fraction: sum(busy_s * capacity) / sum(window * capacity).
double utilization_metric(const std::vector<double>& busy_seconds,
                          const std::vector<double>& capacities,
                          double window_s);

double mean_of(const std::vector<double>& xs);
double stddev_of(const std::vector<double>& xs); // sample stddev, 0 for n<2
double percentile(std::vector<double> xs, double p); // p in [0,1]

struct SummaryRow {
    std::string scheme;
    int n_nodes = 0;
    double arrival_rate_per_min = 0;
    double malicious_fraction = 0;
    int n_seeds = 0;
    double mean_latency_mean = 0, mean_latency_sd = 0;
    double p95_latency_mean = 0, p95_latency_sd = 0;
    double failure_rate_mean = 0, failure_rate_sd = 0;
    double utilization_mean = 0, utilization_sd = 0;
    double tokens_settled_mean = 0, tokens_settled_sd = 0;

    static std::string csv_header();
    std::string csv_row() const;
};

struct MixedSweepPoint {};

// Records must share (scheme, n_nodes, rate, malicious_fraction).
std::optional<SummaryRow> aggregate(const std::vector<MetricsRecord>& records);

} // namespace lacnet
