#pragma once

#include <string>
#include <vector>

#include "lacnet/config.hpp"
#include "lacnet/metrics.hpp"

namespace lacnet {

// One cell of the cartesian product described by a SweepSpec, in the
// deterministic enumeration order scheme > n_nodes > rate > fraction > seed.
std::vector<ScenarioConfig> expand_sweep(const SweepSpec& spec);

struct SweepOptions {
    int jobs = 1;                // worker threads; results keep spec order
    std::string ledger_dump_dir; // per-run chain dumps when non-empty
};

struct SweepResult {
    std::vector<MetricsRecord> runs;   // one row per scenario, spec order
    std::vector<SummaryRow> summary;   // seeds collapsed, first-seen order
};

SweepResult run_sweep(const SweepSpec& spec, const SweepOptions& opts);

void write_runs_csv(const std::string& path,
                    const std::vector<MetricsRecord>& runs);
void write_summary_csv(const std::string& path,
                       const std::vector<SummaryRow>& rows);

} // namespace lacnet
