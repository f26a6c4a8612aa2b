#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lacnet/engine.hpp"
#include "lacnet/rng.hpp"

namespace lacnet {

enum class NodeKind : uint8_t { Uav, Evtol };

struct LinkModel {
    double bandwidth_bps = 5e9;
    double base_latency_s = 0.010;
};

struct ComputeTask {
    uint64_t id = 0;
    SimTime arrival_time = 0;
    double data_bits = 2.0e8;   // 25 MB
    double flop_load = 2e12;    // 2 TFLOP
    double deadline_s = 120;    // seconds after arrival
    std::string origin;         // requester pubkey
    double max_payment = 50;    // COMP escrowed
    double units = 100;         // compute units demanded
    double result_bits = 1e6;
};

struct AircraftNode {
    uint32_t id = 0;
    NodeKind kind = NodeKind::Uav;
    double x = 0, y = 0;        // meters within the arena
    double altitude = 100;
    double wx = 0, wy = 0;      // current waypoint
    double speed_max = 23;      // m/s
    double compute_capacity = 1e12; // FLOPS
    SimTime busy_until = 0;     // compute occupancy
    SimTime delivering_until = 0; // logistics occupancy (0 when idle leg)
    bool delivering = false;
    bool honest = true;
    bool registered = false;
    bool banned = false;
    std::string pubkey;

    // running accounting
    double busy_accum_s = 0;        // compute-busy seconds (whole run)
    double busy_accum_window_s = 0; // compute-busy seconds inside the metrics window
    int cbba_claims = 0;            // active CBBA claims not yet completed/expired
    int pending_awards = 0;         // RWA awards without a proof yet
    int burns = 0;                  // penalty stakes burned

    bool compute_idle(SimTime now) const { return busy_until <= now; }
};

// base_latency + bits / bandwidth
double transfer_time(double bits, const LinkModel& link);

// flop_load / compute_capacity
double compute_time(const ComputeTask& task, const AircraftNode& node);

// Moves the node toward its waypoint at speed_max for dt seconds; waypoints
// beyond reach are respawned uniformly in the arena from the mobility stream.
void step_mobility(AircraftNode& node, double dt, double arena_m, RngStream& rng);

// Exponential inter-arrival times with mean 60/rate_per_min seconds.
std::vector<SimTime> spawn_arrival_times(double rate_per_min, SimTime horizon,
                                         RngStream& rng);

struct FleetParams {
    int n_nodes = 100;
    double uav_fraction = 0.8;
    double arena_m = 2000;
    double alt_min_m = 100, alt_max_m = 150;
    double uav_speed = 23, evtol_speed = 45;
    double uav_capacity = 1e12, evtol_capacity = 5.3e12;
};

// floor(uav_fraction * n) UAVs, remainder eVTOLs; positions and waypoints
// drawn from the mobility stream.
std::vector<AircraftNode> make_fleet(const FleetParams& p, RngStream& mobility);

} // namespace lacnet
