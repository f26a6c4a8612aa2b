#include "lacnet/world.hpp"

#include <algorithm>
#include <cmath>

namespace lacnet {

double transfer_time(double bits, const LinkModel& link) {
    return link.base_latency_s + bits / link.bandwidth_bps;
}

double compute_time(const ComputeTask& task, const AircraftNode& node) {
    return task.flop_load / node.compute_capacity;
}

void step_mobility(AircraftNode& node, double dt, double arena_m, RngStream& rng) {
    double budget = node.speed_max * dt;
    while (budget > 0) {
        double dx = node.wx - node.x;
        double dy = node.wy - node.y;
        double dist = std::sqrt(dx * dx + dy * dy);
        if (dist <= budget) {
            node.x = node.wx;
            node.y = node.wy;
            budget -= dist;
            node.wx = rng.uniform(0, arena_m);
            node.wy = rng.uniform(0, arena_m);
            if (dist == 0 && budget > 0) {
                // fresh waypoint drawn; keep walking toward it
                continue;
            }
        } else {
            node.x += dx / dist * budget;
            node.y += dy / dist * budget;
            budget = 0;
        }
    }
    node.x = std::clamp(node.x, 0.0, arena_m);
    node.y = std::clamp(node.y, 0.0, arena_m);
}

std::vector<SimTime> spawn_arrival_times(double rate_per_min, SimTime horizon,
                                         RngStream& rng) {
    std::vector<SimTime> out;
    const double mean_gap = 60.0 / rate_per_min;
    SimTime t = 0;
    for (;;) {
        t += rng.exponential(mean_gap);
        if (t > horizon) break;
        out.push_back(t);
    }
    return out;
}

std::vector<AircraftNode> make_fleet(const FleetParams& p, RngStream& mobility) {
    std::vector<AircraftNode> fleet;
    fleet.reserve(static_cast<size_t>(p.n_nodes));
    const int n_uav = static_cast<int>(std::floor(p.uav_fraction * p.n_nodes));
    for (int i = 0; i < p.n_nodes; ++i) {
        AircraftNode n;
        n.id = static_cast<uint32_t>(i);
        n.kind = i < n_uav ? NodeKind::Uav : NodeKind::Evtol;
        n.speed_max = n.kind == NodeKind::Uav ? p.uav_speed : p.evtol_speed;
        n.compute_capacity =
            n.kind == NodeKind::Uav ? p.uav_capacity : p.evtol_capacity;
        n.x = mobility.uniform(0, p.arena_m);
        n.y = mobility.uniform(0, p.arena_m);
        n.wx = mobility.uniform(0, p.arena_m);
        n.wy = mobility.uniform(0, p.arena_m);
        n.altitude = n.kind == NodeKind::Uav
                         ? mobility.uniform(p.alt_min_m, p.alt_max_m)
                         : p.alt_max_m;
        char buf[16];
        std::snprintf(buf, sizeof buf, "pk_N%03d", i);
        n.pubkey = buf;
        fleet.push_back(std::move(n));
    }
    return fleet;
}

} // namespace lacnet
