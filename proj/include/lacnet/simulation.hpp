#pragma once

#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lacnet/adversary.hpp"
#include "lacnet/chain.hpp"
#include "lacnet/config.hpp"
#include "lacnet/engine.hpp"
#include "lacnet/market.hpp"
#include "lacnet/metrics.hpp"
#include "lacnet/world.hpp"

namespace lacnet {

// One deterministic run of a scenario: world + (for RWA) dual ledgers + the
// selected allocation scheme, producing a MetricsRecord.
class Simulation {
public:
    explicit Simulation(ScenarioConfig cfg);

    // --- test/scripting hooks, call before run() ---
    void set_tracing(bool on) { engine_.set_tracing(on); }
    // Caps the units a node offers in reverse auctions (partial-coverage bid).
    void set_spare_units(uint32_t node_id, double units);
    // Pins a node to a delivery leg until `until` (it will not bid).
    void force_delivering(uint32_t node_id, SimTime until);
    // Replaces the Poisson arrival process with fixed arrival times.
    void script_arrivals(std::vector<SimTime> times);
    // Disables the duty-cycle process (all nodes permanently on idle legs).
    void disable_duty_cycle() { duty_enabled_ = false; }

    MetricsRecord run();

    // --- inspection ---
    const std::string& trace() const { return engine_.trace(); }
    const Ledger& permissioned() const { return perm_; }
    const Ledger& permissionless() const { return token_; }
    const AnchorChannel& anchor_channel() const { return anchors_; }
    const std::vector<AircraftNode>& fleet() const { return fleet_; }
    uint64_t conservation_violations() const { return conservation_violations_; }
    // Kinds of this task's txs in permissionless seal order.
    std::vector<TxKind> sealed_tx_kinds_for_task(uint64_t task_id) const;

    enum class TaskStatus : uint8_t { Waiting, Assigned, Completed, Failed };

    struct TaskRec {
        ComputeTask t;
        TaskStatus status = TaskStatus::Waiting;
        bool counted = false; // arrived inside the metrics window
        SimTime completed_at = -1;
        uint32_t executor = UINT32_MAX;
        bool malicious_win = false;
        bool abandoned = false;
        // rwa
        uint64_t auction_id = UINT64_MAX;
        int auction_attempt = 0;
        double escrow = 0;
        double price_total = 0;
        bool stake_locked = false;
        // cta
        int retries = 0;
    };
    const std::vector<TaskRec>& tasks() const { return tasks_; }

private:
    // event handlers
    void dispatch(const Event& e);
    void on_task_arrival(uint64_t task_id);
    void on_mobility_tick();
    void on_block_seal(uint64_t ledger_idx);
    void on_tx_confirmed(uint64_t tx_id, uint64_t ledger_idx);
    void on_auction_close(uint64_t auction_id);
    void on_compute_done(uint64_t task_id, uint64_t node_id);
    void on_task_deadline(uint64_t task_id);
    void on_anchor_tick();
    void on_checkin(uint64_t node_id);
    void on_gcs_service_done(uint64_t task_id);
    void on_cta_retry(uint64_t task_id);
    void on_cbba_round();
    void on_cbba_assign(uint64_t task_id, uint64_t node_id);

    // shared helpers
    Ledger& ledger(uint64_t idx) { return idx == 0 ? perm_ : token_; }
    uint64_t next_tx_id() { return tx_id_counter_++; }
    bool submit_tx(Ledger& l, ChainTransaction tx, uint64_t ledger_idx);
    void schedule_seal(uint64_t ledger_idx);
    void start_execution(TaskRec& task, AircraftNode& node);
    void fail_task(TaskRec& task);
    void complete_task(TaskRec& task);
    double honest_ask(const AircraftNode& node) const;
    double base_cost(NodeKind k) const;
    double spare_units(uint32_t node_id) const;

    // rwa
    void rwa_on_arrival(TaskRec& task);
    void rwa_open_auction(TaskRec& task);
    void rwa_settle_proof(TaskRec& task);
    void rwa_penalize(TaskRec& task);

    // cta
    void cta_start_service(uint64_t task_id);
    void cta_allocate(uint64_t task_id);
    void cta_refresh_reports();

    ScenarioConfig cfg_;
    Engine engine_;
    RngStream rng_arrivals_, rng_mobility_, rng_adversary_, rng_bids_,
        rng_duty_, rng_volunteer_;
    LinkModel link_;
    std::vector<AircraftNode> fleet_;
    std::map<uint32_t, double> spare_units_override_;
    std::map<uint32_t, SimTime> forced_delivering_;
    std::optional<std::vector<SimTime>> scripted_arrivals_;
    bool duty_enabled_ = true;
    std::vector<SimTime> duty_next_toggle_;

    Ledger perm_;
    Ledger token_;
    AnchorChannel anchors_;
    uint64_t tx_id_counter_ = 1;
    uint64_t conservation_violations_ = 0;

    struct TxRoute {
        TxKind kind;
        uint64_t task_id;
    };
    std::map<uint64_t, TxRoute> tx_routes_;

    std::vector<TaskRec> tasks_;
    std::vector<AuctionInstance> auctions_;

    // cta state
    std::deque<uint64_t> gcs_queue_;
    bool gcs_busy_ = false;
    std::vector<NodeReport> node_table_;
    std::vector<double> gcs_booked_until_;

    // metrics
    std::vector<double> latencies_;
    uint64_t counted_total_ = 0, counted_failed_ = 0, counted_completed_ = 0;
    uint64_t malicious_wins_abandoned_counted_ = 0;
    double tokens_settled_ = 0;

    static constexpr const char* kRequester = "pk_REQ";
    static constexpr const char* kContract = "pk_CONTRACT";
    static constexpr const char* kEscrow = "pk_ESCROW";
};

// Chain latency calibration: a lone ledger under Poisson background traffic.
struct CalibrationResult {
    double mean_confirmation_latency_s = 0;
    uint64_t txs_measured = 0;
};
CalibrationResult calibrate_chain(const ScenarioConfig& cfg);

} // namespace lacnet
