#pragma once

#include <vector>

#include "lacnet/config.hpp"
#include "lacnet/rng.hpp"
#include "lacnet/world.hpp"

namespace lacnet {

struct NodeReport {
    double compute_capacity = 0;
    SimTime busy_until = 0;
    bool delivering = false;
};

// Status as the scheduler sees it. Honest nodes report the truth; a malicious
// node with FalseCapacityReport inflates capacity and always claims idle.
NodeReport corrupt_report(const AircraftNode& node, const ScenarioConfig& cfg,
                          SimTime now);

// Decided once per assignment from the adversary stream. Honest nodes always
// execute.
bool maybe_abandon(const AircraftNode& node, const ScenarioConfig& cfg,
                   RngStream& adversary);

// Flags floor(malicious_fraction*N) nodes malicious, stratified across the
// UAV and eVTOL classes so fleet composition matches the fraction; the exact
// members come from the adversary stream.
void mark_malicious(std::vector<AircraftNode>& fleet, double malicious_fraction,
                    RngStream& adversary);

} // namespace lacnet
