#include "lacnet/cbba.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace lacnet {

namespace {

struct Claim {
    int agent = -1;
    double bid = -1;
};

bool beats(double bid, int agent, const Claim& incumbent) {
    if (incumbent.agent < 0) return true;
    if (bid != incumbent.bid) return bid > incumbent.bid;
    return agent < incumbent.agent;
}

// Rebuilds agent i's own claims against its current beliefs.
void greedy_claims(int i, const std::vector<CbbaAgent>& agents,
                   std::vector<Claim>& beliefs) {
    const auto& a = agents[static_cast<size_t>(i)];
    // release nothing explicitly: entries naming i are its current claims
    int held = 0;
    for (const auto& c : beliefs)
        if (c.agent == i) ++held;
    for (;;) {
        if (held >= a.max_claims) break;
        int best_t = -1;
        double best_s = -1;
        for (size_t t = 0; t < beliefs.size(); ++t) {
            double s = a.scores[t];
            if (s < 0 || beliefs[t].agent == i) continue;
            if (!beats(s, i, beliefs[t])) continue;
            if (best_t < 0 || s > best_s) {
                best_t = static_cast<int>(t);
                best_s = s;
            }
        }
        if (best_t < 0) break;
        beliefs[static_cast<size_t>(best_t)] = {i, best_s};
        ++held;
    }
}

std::vector<std::vector<int>> build_graph(const std::vector<CbbaAgent>& agents,
                                          double radius) {
    const size_t n = agents.size();
    std::vector<std::vector<int>> adj(n);
    const double r2 = radius * radius;
    auto d2 = [&](size_t i, size_t j) {
        double dx = agents[i].x - agents[j].x;
        double dy = agents[i].y - agents[j].y;
        return dx * dx + dy * dy;
    };
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j)
            if (d2(i, j) <= r2) {
                adj[i].push_back(static_cast<int>(j));
                adj[j].push_back(static_cast<int>(i));
            }

    // Minimal augmentation so consensus always has a connected graph: splice
    // components together through their closest pair.
    std::vector<int> comp(n, -1);
    auto flood = [&](size_t start, int c) {
        std::deque<size_t> q{start};
        comp[start] = c;
        while (!q.empty()) {
            size_t u = q.front();
            q.pop_front();
            for (int v : adj[u])
                if (comp[static_cast<size_t>(v)] < 0) {
                    comp[static_cast<size_t>(v)] = c;
                    q.push_back(static_cast<size_t>(v));
                }
        }
    };
    for (;;) {
        std::fill(comp.begin(), comp.end(), -1);
        int nc = 0;
        for (size_t i = 0; i < n; ++i)
            if (comp[i] < 0) flood(i, nc++);
        if (nc <= 1) break;
        size_t bi = 0, bj = 0;
        double best = std::numeric_limits<double>::max();
        for (size_t i = 0; i < n; ++i)
            for (size_t j = i + 1; j < n; ++j)
                if (comp[i] != comp[j] && d2(i, j) < best) {
                    best = d2(i, j);
                    bi = i;
                    bj = j;
                }
        adj[bi].push_back(static_cast<int>(bj));
        adj[bj].push_back(static_cast<int>(bi));
    }
    return adj;
}

int graph_diameter(const std::vector<std::vector<int>>& adj) {
    const size_t n = adj.size();
    int diam = 0;
    std::vector<int> dist(n);
    for (size_t s = 0; s < n; ++s) {
        std::fill(dist.begin(), dist.end(), -1);
        std::deque<size_t> q{s};
        dist[s] = 0;
        while (!q.empty()) {
            size_t u = q.front();
            q.pop_front();
            for (int v : adj[u])
                if (dist[static_cast<size_t>(v)] < 0) {
                    dist[static_cast<size_t>(v)] = dist[u] + 1;
                    q.push_back(static_cast<size_t>(v));
                }
        }
        for (int d : dist) diam = std::max(diam, d);
    }
    return diam;
}

} // namespace

CbbaOutcome cbba_allocate(const std::vector<CbbaAgent>& agents, size_t n_tasks,
                          double comm_radius_m) {
    CbbaOutcome out;
    out.winner.assign(n_tasks, -1);
    out.winning_bid.assign(n_tasks, -1);
    if (agents.empty() || n_tasks == 0) {
        out.converged = true;
        out.agreement = true;
        return out;
    }

    const size_t n = agents.size();
    auto adj = build_graph(agents, comm_radius_m);
    out.diameter = graph_diameter(adj);
    const int max_rounds =
        std::max(1, 2 * std::max(1, out.diameter) * static_cast<int>(n_tasks));

    std::vector<std::vector<Claim>> beliefs(n, std::vector<Claim>(n_tasks));
    for (size_t i = 0; i < n; ++i)
        greedy_claims(static_cast<int>(i), agents, beliefs[i]);

    while (out.rounds < max_rounds) {
        ++out.rounds;
        std::vector<std::vector<Claim>> next = beliefs;
        for (size_t i = 0; i < n; ++i) {
            for (int j : adj[i])
                for (size_t t = 0; t < n_tasks; ++t) {
                    const Claim& c = beliefs[static_cast<size_t>(j)][t];
                    if (c.agent >= 0 && beats(c.bid, c.agent, next[i][t]))
                        next[i][t] = c;
                }
            greedy_claims(static_cast<int>(i), agents, next[i]);
        }
        bool changed = false;
        for (size_t i = 0; i < n && !changed; ++i)
            for (size_t t = 0; t < n_tasks; ++t)
                if (next[i][t].agent != beliefs[i][t].agent ||
                    next[i][t].bid != beliefs[i][t].bid) {
                    changed = true;
                    break;
                }
        beliefs.swap(next);
        if (!changed) {
            out.converged = true;
            break;
        }
    }

    out.agreement = true;
    for (size_t i = 1; i < n && out.agreement; ++i)
        for (size_t t = 0; t < n_tasks; ++t)
            if (beliefs[i][t].agent != beliefs[0][t].agent) {
                out.agreement = false;
                break;
            }

    if (out.converged) {
        for (size_t t = 0; t < n_tasks; ++t) {
            out.winner[t] = beliefs[0][t].agent;
            out.winning_bid[t] = beliefs[0][t].bid;
        }
    }
    return out;
}

} // namespace lacnet
