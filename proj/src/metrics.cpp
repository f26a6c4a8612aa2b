#include "lacnet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace lacnet {

namespace {
std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}
} // namespace

std::string MetricsRecord::csv_header() {
    return "scheme,n_nodes,arrival_rate_per_min,malicious_fraction,seed,"
           "mean_latency_s,p95_latency_s,failure_rate,utilization,"
           "tasks_total,tasks_failed,tokens_settled,blocks_sealed";
}

std::string MetricsRecord::csv_row() const {
    std::ostringstream os;
    os << scheme << ',' << n_nodes << ',' << num(arrival_rate_per_min) << ','
       << num(malicious_fraction) << ',' << seed << ',' << num(mean_latency_s)
       << ',' << num(p95_latency_s) << ',' << num(failure_rate) << ','
       << num(utilization) << ',' << tasks_total << ',' << tasks_failed << ','
       << num(tokens_settled) << ',' << blocks_sealed;
    return os.str();
}

double utilization_metric(const std::vector<double>& busy_seconds,
                          const std::vector<double>& capacities,
                          double window_s) {
    double num_ = 0, den = 0;
    for (size_t i = 0; i < busy_seconds.size(); ++i) {
        num_ += busy_seconds[i] * capacities[i];
        den += window_s * capacities[i];
    }
    return den > 0 ? num_ / den : 0.0;
}

double mean_of(const std::vector<double>& xs) {
    if (xs.empty()) return 0;
    double s = 0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double stddev_of(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0;
    double m = mean_of(xs), s = 0;
    for (double x : xs) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

double percentile(std::vector<double> xs, double p) {
    if (xs.empty()) return 0;
    std::sort(xs.begin(), xs.end());
    size_t idx = static_cast<size_t>(
        std::ceil(p * static_cast<double>(xs.size())));
    if (idx > 0) --idx;
    return xs[std::min(idx, xs.size() - 1)];
}

std::string SummaryRow::csv_header() {
    return "scheme,n_nodes,arrival_rate_per_min,malicious_fraction,n_seeds,"
           "mean_latency_mean,mean_latency_sd,p95_latency_mean,p95_latency_sd,"
           "failure_rate_mean,failure_rate_sd,utilization_mean,utilization_sd,"
           "tokens_settled_mean,tokens_settled_sd";
}

std::string SummaryRow::csv_row() const {
    std::ostringstream os;
    os << scheme << ',' << n_nodes << ',' << num(arrival_rate_per_min) << ','
       << num(malicious_fraction) << ',' << n_seeds << ','
       << num(mean_latency_mean) << ',' << num(mean_latency_sd) << ','
       << num(p95_latency_mean) << ',' << num(p95_latency_sd) << ','
       << num(failure_rate_mean) << ',' << num(failure_rate_sd) << ','
       << num(utilization_mean) << ',' << num(utilization_sd) << ','
       << num(tokens_settled_mean) << ',' << num(tokens_settled_sd);
    return os.str();
}

std::optional<SummaryRow> aggregate(const std::vector<MetricsRecord>& records) {
    if (records.empty()) return std::nullopt;
    const auto& f = records.front();
    for (const auto& r : records) {
        if (r.scheme != f.scheme || r.n_nodes != f.n_nodes ||
            r.arrival_rate_per_min != f.arrival_rate_per_min ||
            r.malicious_fraction != f.malicious_fraction)
            return std::nullopt; // MixedSweepPoint
    }
    auto collect = [&](auto getter) {
        std::vector<double> xs;
        xs.reserve(records.size());
        for (const auto& r : records) xs.push_back(getter(r));
        return xs;
    };
    SummaryRow s;
    s.scheme = f.scheme;
    s.n_nodes = f.n_nodes;
    s.arrival_rate_per_min = f.arrival_rate_per_min;
    s.malicious_fraction = f.malicious_fraction;
    s.n_seeds = static_cast<int>(records.size());
    auto lat = collect([](const MetricsRecord& r) { return r.mean_latency_s; });
    auto p95 = collect([](const MetricsRecord& r) { return r.p95_latency_s; });
    auto fr = collect([](const MetricsRecord& r) { return r.failure_rate; });
    auto ut = collect([](const MetricsRecord& r) { return r.utilization; });
    auto tk = collect([](const MetricsRecord& r) { return r.tokens_settled; });
    s.mean_latency_mean = mean_of(lat); s.mean_latency_sd = stddev_of(lat);
    s.p95_latency_mean = mean_of(p95); s.p95_latency_sd = stddev_of(p95);
    s.failure_rate_mean = mean_of(fr); s.failure_rate_sd = stddev_of(fr);
    s.utilization_mean = mean_of(ut); s.utilization_sd = stddev_of(ut);
    s.tokens_settled_mean = mean_of(tk); s.tokens_settled_sd = stddev_of(tk);
    return s;
}

} // namespace lacnet
