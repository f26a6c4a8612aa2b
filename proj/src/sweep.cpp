#include "lacnet/sweep.hpp"

#include <atomic>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "lacnet/simulation.hpp"

namespace lacnet {

std::vector<ScenarioConfig> expand_sweep(const SweepSpec& spec) {
    auto one_of = [](auto v, auto fallback) {
        return v.empty() ? decltype(v){fallback} : v;
    };
    const auto schemes = one_of(spec.schemes, spec.base.scheme);
    const auto nodes = one_of(spec.n_nodes, spec.base.n_nodes);
    const auto rates = one_of(spec.rates_per_min, spec.base.arrival_rate_per_min);
    const auto fracs =
        one_of(spec.malicious_fractions, spec.base.malicious_fraction);
    const auto seeds = one_of(spec.seeds, spec.base.seed);

    std::vector<ScenarioConfig> out;
    for (auto s : schemes)
        for (auto n : nodes)
            for (auto r : rates)
                for (auto f : fracs)
                    for (auto seed : seeds) {
                        ScenarioConfig c = spec.base;
                        c.scheme = s;
                        c.n_nodes = n;
                        c.arrival_rate_per_min = r;
                        c.malicious_fraction = f;
                        c.seed = seed;
                        out.push_back(c);
                    }
    return out;
}

static std::string run_tag(const ScenarioConfig& c) {
    std::ostringstream os;
    os << scheme_name(c.scheme) << "_n" << c.n_nodes << "_r"
       << c.arrival_rate_per_min << "_m" << c.malicious_fraction << "_s"
       << c.seed;
    return os.str();
}

SweepResult run_sweep(const SweepSpec& spec, const SweepOptions& opts) {
    const std::vector<ScenarioConfig> cells = expand_sweep(spec);
    SweepResult res;
    res.runs.resize(cells.size());

    std::atomic<size_t> cursor{0};
    auto worker = [&] {
        for (;;) {
            const size_t i = cursor.fetch_add(1);
            if (i >= cells.size()) return;
            Simulation sim(cells[i]);
            res.runs[i] = sim.run();
            if (!opts.ledger_dump_dir.empty() &&
                cells[i].scheme == SchemeKind::Rwa) {
                const std::string base =
                    opts.ledger_dump_dir + "/" + run_tag(cells[i]);
                std::ofstream pf(base + "_registry.chain");
                sim.permissioned().dump(pf);
                std::ofstream tf(base + "_token.chain");
                sim.permissionless().dump(tf);
            }
        }
    };

    const int jobs = std::max(1, opts.jobs);
    if (jobs == 1 || cells.size() <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    // collapse seeds: group key is everything except the seed
    std::vector<std::vector<MetricsRecord>> groups;
    std::vector<std::string> keys;
    for (const auto& r : res.runs) {
        std::ostringstream k;
        k << r.scheme << '|' << r.n_nodes << '|' << r.arrival_rate_per_min << '|'
          << r.malicious_fraction;
        size_t gi = 0;
        for (; gi < keys.size(); ++gi)
            if (keys[gi] == k.str()) break;
        if (gi == keys.size()) {
            keys.push_back(k.str());
            groups.emplace_back();
        }
        groups[gi].push_back(r);
    }
    for (const auto& g : groups) {
        auto row = aggregate(g);
        if (row) res.summary.push_back(*row);
    }
    return res;
}

void write_runs_csv(const std::string& path,
                    const std::vector<MetricsRecord>& runs) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    f << MetricsRecord::csv_header() << '\n';
    for (const auto& r : runs) f << r.csv_row() << '\n';
}

void write_summary_csv(const std::string& path,
                       const std::vector<SummaryRow>& rows) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    f << SummaryRow::csv_header() << '\n';
    for (const auto& r : rows) f << r.csv_row() << '\n';
}

} // namespace lacnet
