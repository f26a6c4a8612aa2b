#include "lacnet/adversary.hpp"

#include <algorithm>
#include <cmath>

namespace lacnet {

NodeReport corrupt_report(const AircraftNode& node, const ScenarioConfig& cfg,
                          SimTime /*now*/) {
    NodeReport r{node.compute_capacity, node.busy_until, node.delivering};
    if (!node.honest && cfg.behavior_false_report) {
        r.compute_capacity = node.compute_capacity * cfg.report_inflation;
        r.busy_until = 0; // busy -> idle
        r.delivering = false;
    }
    return r;
}

bool maybe_abandon(const AircraftNode& node, const ScenarioConfig& cfg,
                   RngStream& adversary) {
    if (node.honest || !cfg.behavior_bid_abandon) return false;
    return adversary.bernoulli(cfg.abandon_prob);
}

void mark_malicious(std::vector<AircraftNode>& fleet, double malicious_fraction,
                    RngStream& adversary) {
    const int n = static_cast<int>(fleet.size());
    const int m_total = static_cast<int>(std::floor(malicious_fraction * n));
    if (m_total == 0) return;

    std::vector<uint32_t> uavs, evtols;
    for (auto& node : fleet)
        (node.kind == NodeKind::Uav ? uavs : evtols).push_back(node.id);

    int m_evtol = std::min<int>(
        static_cast<int>(evtols.size()),
        static_cast<int>(std::floor(malicious_fraction * evtols.size())));
    int m_uav = std::min<int>(static_cast<int>(uavs.size()), m_total - m_evtol);
    m_evtol = std::min<int>(static_cast<int>(evtols.size()),
                            m_total - m_uav); // spill if a class is short

    auto pick = [&](std::vector<uint32_t>& pool, int m) {
        // partial Fisher-Yates from the adversary stream
        for (int i = 0; i < m; ++i) {
            size_t j = i + adversary.uniform_int(pool.size() - i);
            std::swap(pool[i], pool[j]);
            fleet[pool[i]].honest = false;
        }
    };
    pick(uavs, m_uav);
    pick(evtols, m_evtol);
}

} // namespace lacnet
