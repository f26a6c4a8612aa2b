#pragma once

#include <cstdint>
#include <vector>

namespace lacnet {

// One participant in a CBBA allocation epoch. scores[t] < 0 marks the agent
// ineligible for task t; otherwise the score is its bid value for the task.
struct CbbaAgent {
    uint32_t id = 0;
    double x = 0, y = 0;
    int max_claims = 1;
    std::vector<double> scores;
};

struct CbbaOutcome {
    std::vector<int> winner;       // index into agents, -1 = unassigned
    std::vector<double> winning_bid;
    int rounds = 0;                // synchronous neighbor exchanges used
    bool converged = false;
    bool agreement = false;        // all agents' winning_bids maps identical
    int diameter = 0;
};

// Greedy bundle-building plus synchronous max-consensus over a geometric
// communication graph (radius comm_radius_m, minimally augmented to stay
// connected). Higher bid wins a conflict; ties go to the lower agent id.
// Convergence is declared when no winning-bid entry changes in a round;
// rounds are capped at 2 * diameter * max(1, n_tasks).
CbbaOutcome cbba_allocate(const std::vector<CbbaAgent>& agents, size_t n_tasks,
                          double comm_radius_m);

} // namespace lacnet
