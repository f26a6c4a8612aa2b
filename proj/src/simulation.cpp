#include "lacnet/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lacnet/cbba.hpp"

namespace lacnet {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr uint64_t kPerm = 0, kToken = 1;
constexpr uint64_t kCtaReportSentinel = UINT64_MAX;
} // namespace

Simulation::Simulation(ScenarioConfig cfg)
    : cfg_(cfg),
      rng_arrivals_(cfg.seed, "arrivals"),
      rng_mobility_(cfg.seed, "mobility"),
      rng_adversary_(cfg.seed, "adversary"),
      rng_bids_(cfg.seed, "bids"),
      rng_duty_(cfg.seed, "duty"),
      rng_volunteer_(cfg.seed, "volunteer"),
      perm_(LedgerKind::Permissioned,
            ChainParams{cfg.chain_block_size, cfg.chain_block_timeout_s,
                        cfg.chain_tps_cap, cfg.chain_propagation_s,
                        cfg.chain_mint_on_proof}),
      token_(LedgerKind::Permissionless,
             ChainParams{cfg.chain_block_size, cfg.chain_block_timeout_s,
                         cfg.chain_tps_cap, cfg.chain_propagation_s,
                         cfg.chain_mint_on_proof}) {
    link_ = LinkModel{cfg.link_bandwidth_bps, cfg.link_base_latency_s};
    FleetParams fp;
    fp.n_nodes = cfg.n_nodes;
    fp.uav_fraction = cfg.uav_fraction;
    fp.arena_m = cfg.arena_m;
    fp.alt_min_m = cfg.alt_min_m;
    fp.alt_max_m = cfg.alt_max_m;
    fp.uav_speed = cfg.uav_speed;
    fp.evtol_speed = cfg.evtol_speed;
    fp.uav_capacity = cfg.uav_capacity;
    fp.evtol_capacity = cfg.evtol_capacity;
    fleet_ = make_fleet(fp, rng_mobility_);
    mark_malicious(fleet_, cfg.malicious_fraction, rng_adversary_);
    token_.set_external_registry(&perm_.registry());
}

void Simulation::set_spare_units(uint32_t node_id, double units) {
    spare_units_override_[node_id] = units;
}

void Simulation::force_delivering(uint32_t node_id, SimTime until) {
    forced_delivering_[node_id] = until;
}

void Simulation::script_arrivals(std::vector<SimTime> times) {
    scripted_arrivals_ = std::move(times);
}

double Simulation::base_cost(NodeKind k) const {
    return k == NodeKind::Uav ? cfg_.base_cost_uav : cfg_.base_cost_evtol;
}

double Simulation::honest_ask(const AircraftNode& node) const {
    const double elapsed = std::max(engine_.now(), 1.0);
    const double util = std::min(1.0, node.busy_accum_s / elapsed);
    return base_cost(node.kind) * (1.0 + util);
}

double Simulation::spare_units(uint32_t node_id) const {
    auto it = spare_units_override_.find(node_id);
    return it == spare_units_override_.end() ? kInf : it->second;
}

bool Simulation::submit_tx(Ledger& l, ChainTransaction tx, uint64_t ledger_idx) {
    tx_routes_[tx.id] = {tx.kind, tx.task_id};
    SubmitError e = l.submit(std::move(tx), engine_.now());
    if (e != SubmitError::None) return false;
    schedule_seal(ledger_idx);
    return true;
}

void Simulation::schedule_seal(uint64_t ledger_idx) {
    double due = ledger(ledger_idx).next_seal_due(engine_.now());
    if (std::isfinite(due))
        engine_.schedule(std::max(due, engine_.now()), EventKind::BlockSeal,
                         ledger_idx);
}

// ---------------------------------------------------------------------------
// setup + main loop
// ---------------------------------------------------------------------------

MetricsRecord Simulation::run() {
    const bool rwa = cfg_.scheme == SchemeKind::Rwa;

    // duty-cycle init: steady-state occupancy, first toggle drawn per node
    duty_next_toggle_.assign(fleet_.size(), kInf);
    for (auto& n : fleet_) {
        const double busy_mean = n.kind == NodeKind::Uav ? cfg_.uav_busy_mean_s
                                                         : cfg_.evtol_busy_mean_s;
        const double idle_mean = n.kind == NodeKind::Uav ? cfg_.uav_idle_mean_s
                                                         : cfg_.evtol_idle_mean_s;
        const double p_busy = busy_mean / (busy_mean + idle_mean);
        n.delivering = rng_duty_.bernoulli(p_busy);
        duty_next_toggle_[n.id] =
            rng_duty_.exponential(n.delivering ? busy_mean : idle_mean);
        n.delivering_until = n.delivering ? duty_next_toggle_[n.id] : 0;
    }
    for (auto& [id, until] : forced_delivering_) {
        fleet_[id].delivering = true;
        fleet_[id].delivering_until = until;
        duty_next_toggle_[id] = until;
    }

    if (rwa) {
        token_.credit_genesis(kRequester, cfg_.requester_endowment);
        for (auto& n : fleet_)
            token_.credit_genesis(n.pubkey, cfg_.provider_endowment);
        auto reg = [&](const std::string& pk) {
            ChainTransaction tx;
            tx.id = next_tx_id();
            tx.kind = TxKind::RegisterNode;
            tx.submitter = pk;
            submit_tx(perm_, std::move(tx), kPerm);
        };
        reg(kContract);
        reg(kRequester);
        for (auto& n : fleet_) reg(n.pubkey);
        engine_.schedule(cfg_.chain_anchor_interval_s, EventKind::AnchorTick);
        const double stagger =
            cfg_.chain_checkin_interval_s / static_cast<double>(fleet_.size());
        for (auto& n : fleet_)
            engine_.schedule(0.5 + stagger * n.id, EventKind::CheckIn, n.id);
    }

    // task arrivals
    std::vector<SimTime> arrivals =
        scripted_arrivals_
            ? *scripted_arrivals_
            : spawn_arrival_times(cfg_.arrival_rate_per_min, cfg_.horizon_s,
                                  rng_arrivals_);
    tasks_.reserve(arrivals.size());
    for (size_t i = 0; i < arrivals.size(); ++i) {
        TaskRec rec;
        rec.t.id = i;
        rec.t.arrival_time = arrivals[i];
        rec.t.data_bits = cfg_.task_data_bits;
        rec.t.flop_load = cfg_.task_flop;
        rec.t.deadline_s = cfg_.task_deadline_s;
        rec.t.origin = kRequester;
        rec.t.max_payment = cfg_.task_max_payment;
        rec.t.units = cfg_.task_units;
        rec.t.result_bits = cfg_.task_result_bits;
        rec.counted = arrivals[i] >= cfg_.warmup_s;
        tasks_.push_back(std::move(rec));
        engine_.schedule(arrivals[i], EventKind::TaskArrival, i);
    }

    engine_.schedule(cfg_.mobility_tick_s, EventKind::MobilityTick);
    if (cfg_.scheme == SchemeKind::Cbba)
        engine_.schedule(cfg_.cbba_epoch_s, EventKind::CbbaRound);
    if (cfg_.scheme == SchemeKind::Cta) {
        node_table_.resize(fleet_.size());
        gcs_booked_until_.assign(fleet_.size(), 0.0);
        cta_refresh_reports();
        engine_.schedule(cfg_.cta_report_interval_s, EventKind::CheckIn,
                         kCtaReportSentinel);
    }

    engine_.set_handler([this](const Event& e) { dispatch(e); });
    engine_.run_until(cfg_.horizon_s);

    // finalize
    MetricsRecord rec;
    rec.scheme = scheme_name(cfg_.scheme);
    rec.n_nodes = cfg_.n_nodes;
    rec.arrival_rate_per_min = cfg_.arrival_rate_per_min;
    rec.malicious_fraction = cfg_.malicious_fraction;
    rec.seed = cfg_.seed;
    for (const auto& t : tasks_) {
        if (!t.counted) continue;
        switch (t.status) {
            case TaskStatus::Completed:
                ++counted_completed_;
                break;
            case TaskStatus::Failed:
                break; // counted at failure time
            default:
                break;
        }
    }
    rec.tasks_completed = counted_completed_;
    rec.tasks_failed = counted_failed_;
    rec.tasks_total = counted_completed_ + counted_failed_;
    for (const auto& t : tasks_)
        if (t.counted && (t.status == TaskStatus::Waiting ||
                          t.status == TaskStatus::Assigned))
            ++rec.tasks_pending;
    counted_total_ = rec.tasks_total;
    rec.failure_rate = rec.tasks_total
                           ? static_cast<double>(rec.tasks_failed) /
                                 static_cast<double>(rec.tasks_total)
                           : 0.0;
    rec.mean_latency_s = mean_of(latencies_);
    rec.p95_latency_s = percentile(latencies_, 0.95);
    std::vector<double> busy, cap;
    for (const auto& n : fleet_) {
        busy.push_back(n.busy_accum_window_s);
        cap.push_back(n.compute_capacity);
    }
    rec.utilization =
        utilization_metric(busy, cap, cfg_.horizon_s - cfg_.warmup_s);
    rec.tokens_settled = tokens_settled_;
    rec.blocks_sealed = perm_.blocks().size() + token_.blocks().size();
    rec.malicious_wins_abandoned = malicious_wins_abandoned_counted_;
    rec.conservation_violations = conservation_violations_;
    return rec;
}

void Simulation::dispatch(const Event& e) {
    switch (e.kind) {
        case EventKind::TaskArrival: return on_task_arrival(e.a);
        case EventKind::MessageDelivery: return on_tx_confirmed(e.a, e.b);
        case EventKind::BlockSeal: return on_block_seal(e.a);
        case EventKind::AuctionClose: return on_auction_close(e.a);
        case EventKind::ComputeDone: return on_compute_done(e.a, e.b);
        case EventKind::MobilityTick: return on_mobility_tick();
        case EventKind::AnchorTick: return on_anchor_tick();
        case EventKind::GcsServiceDone: return on_gcs_service_done(e.a);
        case EventKind::CtaRetry: return on_cta_retry(e.a);
        case EventKind::CbbaRound: return on_cbba_round();
        case EventKind::CbbaAssign: return on_cbba_assign(e.a, e.b);
        case EventKind::TaskDeadline: return on_task_deadline(e.a);
        case EventKind::CheckIn: return on_checkin(e.a);
    }
}

// ---------------------------------------------------------------------------
// shared world handlers
// ---------------------------------------------------------------------------

void Simulation::on_mobility_tick() {
    const SimTime now = engine_.now();
    for (auto& n : fleet_) {
        step_mobility(n, cfg_.mobility_tick_s, cfg_.arena_m, rng_mobility_);
        if (!duty_enabled_) continue;
        if (forced_delivering_.count(n.id)) {
            if (now >= forced_delivering_[n.id]) n.delivering = false;
            continue;
        }
        if (now >= duty_next_toggle_[n.id]) {
            n.delivering = !n.delivering;
            const double busy_mean = n.kind == NodeKind::Uav
                                         ? cfg_.uav_busy_mean_s
                                         : cfg_.evtol_busy_mean_s;
            const double idle_mean = n.kind == NodeKind::Uav
                                         ? cfg_.uav_idle_mean_s
                                         : cfg_.evtol_idle_mean_s;
            duty_next_toggle_[n.id] =
                now + rng_duty_.exponential(n.delivering ? busy_mean : idle_mean);
            n.delivering_until = n.delivering ? duty_next_toggle_[n.id] : 0;
        }
    }
    const SimTime next = now + cfg_.mobility_tick_s;
    if (next <= cfg_.horizon_s) engine_.schedule(next, EventKind::MobilityTick);
}

void Simulation::on_task_arrival(uint64_t task_id) {
    TaskRec& task = tasks_[task_id];
    engine_.schedule(task.t.arrival_time + task.t.deadline_s,
                     EventKind::TaskDeadline, task_id);
    switch (cfg_.scheme) {
        case SchemeKind::Rwa:
            rwa_on_arrival(task);
            break;
        case SchemeKind::Cta:
            gcs_queue_.push_back(task_id);
            if (!gcs_busy_) cta_start_service(gcs_queue_.front());
            break;
        case SchemeKind::Cbba:
            break; // picked up at the next allocation epoch
    }
}

void Simulation::start_execution(TaskRec& task, AircraftNode& node) {
    const SimTime now = engine_.now();
    task.executor = node.id;
    task.status = TaskStatus::Assigned;
    task.malicious_win = !node.honest;
    if (maybe_abandon(node, cfg_, rng_adversary_)) {
        task.abandoned = true; // no result will ever arrive
        return;
    }
    const double data_arrival = now + transfer_time(task.t.data_bits, link_);
    const double start = std::max(data_arrival, node.busy_until);
    const double fin = start + compute_time(task.t, node);
    node.busy_until = fin;
    node.busy_accum_s += fin - start;
    const double lo = std::max(start, cfg_.warmup_s);
    const double hi = std::min(fin, cfg_.horizon_s);
    if (hi > lo) node.busy_accum_window_s += hi - lo;
    task.completed_at = fin + transfer_time(task.t.result_bits, link_);
    engine_.schedule(task.completed_at, EventKind::ComputeDone, task.t.id,
                     node.id);
}

void Simulation::fail_task(TaskRec& task) {
    if (task.status == TaskStatus::Failed || task.status == TaskStatus::Completed)
        return;
    task.status = TaskStatus::Failed;
    if (task.counted) {
        ++counted_failed_;
        if (task.malicious_win && task.abandoned)
            ++malicious_wins_abandoned_counted_;
    }
}

void Simulation::complete_task(TaskRec& task) {
    task.status = TaskStatus::Completed;
    if (task.counted)
        latencies_.push_back(task.completed_at - task.t.arrival_time);
}

void Simulation::on_compute_done(uint64_t task_id, uint64_t node_id) {
    TaskRec& task = tasks_[task_id];
    if (task.status != TaskStatus::Assigned) return; // deadline beat us
    AircraftNode& node = fleet_[node_id];
    complete_task(task);
    if (cfg_.scheme == SchemeKind::Cbba && node.cbba_claims > 0)
        --node.cbba_claims;
    if (cfg_.scheme == SchemeKind::Rwa) {
        ChainTransaction tx;
        tx.id = next_tx_id();
        tx.kind = TxKind::ProofOfCompletion;
        tx.submitter = node.pubkey;
        tx.task_id = task_id;
        tx.amount = cfg_.chain_mint_on_proof ? task.t.units : 0.0;
        submit_tx(token_, std::move(tx), kToken);
    }
}

void Simulation::on_task_deadline(uint64_t task_id) {
    TaskRec& task = tasks_[task_id];
    if (task.status == TaskStatus::Completed || task.status == TaskStatus::Failed)
        return;
    const bool was_assigned = task.status == TaskStatus::Assigned;
    if (was_assigned && task.executor != UINT32_MAX) {
        AircraftNode& node = fleet_[task.executor];
        if (cfg_.scheme == SchemeKind::Cbba && node.cbba_claims > 0)
            --node.cbba_claims;
        if (cfg_.scheme == SchemeKind::Rwa) rwa_penalize(task);
    } else if (cfg_.scheme == SchemeKind::Rwa && task.escrow > 0) {
        // never awarded; release the escrow
        if (task.auction_id != UINT64_MAX)
            auctions_[task.auction_id].state = AuctionState::Failed;
        ChainTransaction tx;
        tx.id = next_tx_id();
        tx.kind = TxKind::TokenTransfer;
        tx.submitter = kContract;
        tx.task_id = task_id;
        tx.from = kEscrow;
        tx.to = kRequester;
        tx.amount = task.escrow;
        tx.memo = "refund";
        submit_tx(token_, std::move(tx), kToken);
        task.escrow = 0;
    }
    fail_task(task);
}

// ---------------------------------------------------------------------------
// chain handlers (RWA only)
// ---------------------------------------------------------------------------

void Simulation::on_block_seal(uint64_t ledger_idx) {
    Ledger& l = ledger(ledger_idx);
    auto blocks = l.seal_due(engine_.now());
    for (const auto& b : blocks) {
        if (l.kind() == LedgerKind::Permissionless) {
            double sum = 0;
            for (const auto& [pk, bal] : l.balances()) sum += bal;
            if (std::fabs(sum - l.total_supply()) >
                1e-9 * std::max(1.0, l.total_supply()))
                ++conservation_violations_;
        }
        for (const auto& tx : b.txs) {
            auto it = tx_routes_.find(tx.id);
            if (it == tx_routes_.end()) continue;
            switch (it->second.kind) {
                case TxKind::PostTask:
                case TxKind::AwardTask:
                case TxKind::ProofOfCompletion:
                case TxKind::TokenTransfer:
                    engine_.schedule(engine_.now() + cfg_.chain_propagation_s,
                                     EventKind::MessageDelivery, tx.id,
                                     ledger_idx);
                    break;
                default:
                    break;
            }
        }
    }
    if (!blocks.empty() || l.mempool_size() > 0) schedule_seal(ledger_idx);
}

void Simulation::on_tx_confirmed(uint64_t tx_id, uint64_t ledger_idx) {
    (void)ledger_idx;
    auto it = tx_routes_.find(tx_id);
    if (it == tx_routes_.end()) return;
    const TxRoute route = it->second;
    switch (route.kind) {
        case TxKind::PostTask: {
            TaskRec& task = tasks_[route.task_id];
            if (task.status == TaskStatus::Waiting) rwa_open_auction(task);
            break;
        }
        case TxKind::AwardTask: {
            TaskRec& task = tasks_[route.task_id];
            if (task.status == TaskStatus::Assigned && !task.abandoned &&
                task.completed_at < 0)
                start_execution(task, fleet_[task.executor]);
            break;
        }
        case TxKind::ProofOfCompletion: {
            rwa_settle_proof(tasks_[route.task_id]);
            break;
        }
        case TxKind::TokenTransfer:
            break;
        default:
            break;
    }
}

void Simulation::on_anchor_tick() {
    post_anchor(perm_, token_, anchors_, kContract, engine_.now(), next_tx_id());
    schedule_seal(kToken);
    const SimTime next = engine_.now() + cfg_.chain_anchor_interval_s;
    if (next <= cfg_.horizon_s) engine_.schedule(next, EventKind::AnchorTick);
}

void Simulation::on_checkin(uint64_t node_id) {
    if (node_id == kCtaReportSentinel) {
        cta_refresh_reports();
        const SimTime next = engine_.now() + cfg_.cta_report_interval_s;
        if (next <= cfg_.horizon_s)
            engine_.schedule(next, EventKind::CheckIn, kCtaReportSentinel);
        return;
    }
    AircraftNode& node = fleet_[node_id];
    ChainTransaction tx;
    tx.id = next_tx_id();
    tx.kind = TxKind::CheckIn;
    tx.submitter = node.pubkey;
    NodeReport rep = corrupt_report(node, cfg_, engine_.now());
    tx.amount = 0;
    tx.units = rep.compute_capacity;
    tx.memo = rep.delivering ? "delivering" : "available";
    submit_tx(token_, std::move(tx), kToken);
    const SimTime next = engine_.now() + cfg_.chain_checkin_interval_s;
    if (next <= cfg_.horizon_s)
        engine_.schedule(next, EventKind::CheckIn, node_id);
}

// ---------------------------------------------------------------------------
// RWA scheme
// ---------------------------------------------------------------------------

void Simulation::rwa_on_arrival(TaskRec& task) {
    ChainTransaction tx;
    tx.id = next_tx_id();
    tx.kind = TxKind::PostTask;
    tx.submitter = kRequester;
    tx.task_id = task.t.id;
    tx.from = kRequester;
    tx.to = kEscrow;
    tx.amount = task.t.max_payment;
    tx.units = task.t.units;
    if (!submit_tx(token_, std::move(tx), kToken)) {
        fail_task(task); // InsufficientEscrow
        return;
    }
    task.escrow = task.t.max_payment;
}

void Simulation::rwa_open_auction(TaskRec& task) {
    const SimTime now = engine_.now();
    AuctionInstance a;
    a.id = auctions_.size();
    a.task_id = task.t.id;
    a.open_at = now;
    a.close_at = now + cfg_.bid_window_s;
    a.rule = cfg_.auction_vickrey ? AuctionRule::Vickrey : AuctionRule::FirstPrice;
    a.attempt = task.auction_attempt;
    a.reserve_per_unit =
        cfg_.reserve_per_unit() * (task.auction_attempt > 0 ? 1.5 : 1.0);

    // eligibility: registered, not banned, stake on hand; honest nodes only
    // bid when actually free, malicious ones claim availability regardless
    std::vector<uint32_t> eligible;
    for (const auto& n : fleet_) {
        if (n.banned || !perm_.registry().count(n.pubkey)) continue;
        if (token_.available(n.pubkey) < cfg_.stake - 1e-9) continue;
        if (n.honest) {
            if (n.delivering || !n.compute_idle(now) || n.pending_awards > 0)
                continue;
        }
        eligible.push_back(n.id);
    }
    const size_t k =
        std::min<size_t>(eligible.size(), static_cast<size_t>(cfg_.max_bidders));
    for (size_t i = 0; i < k; ++i) {
        size_t j = i + rng_bids_.uniform_int(eligible.size() - i);
        std::swap(eligible[i], eligible[j]);
    }
    for (size_t i = 0; i < k; ++i) {
        AircraftNode& n = fleet_[eligible[i]];
        BidMessage bid;
        bid.bidder = n.pubkey;
        bid.task_id = task.t.id;
        bid.units_offered = std::min(spare_units(n.id), task.t.units);
        bid.ask_per_unit = n.honest
                               ? honest_ask(n)
                               : base_cost(n.kind) * cfg_.malicious_undercut;
        bid.submitted_at = now;
        a.accept_bid(bid);
        ChainTransaction tx;
        tx.id = next_tx_id();
        tx.kind = TxKind::SubmitBid;
        tx.submitter = n.pubkey;
        tx.task_id = task.t.id;
        tx.units = bid.units_offered;
        tx.ask_per_unit = bid.ask_per_unit;
        submit_tx(token_, std::move(tx), kToken);
    }
    task.auction_id = a.id;
    auctions_.push_back(std::move(a));
    engine_.schedule(auctions_.back().close_at, EventKind::AuctionClose,
                     auctions_.back().id);
}

void Simulation::on_auction_close(uint64_t auction_id) {
    AuctionInstance& a = auctions_[auction_id];
    if (a.state != AuctionState::Open) return;
    TaskRec& task = tasks_[a.task_id];
    if (task.status != TaskStatus::Waiting) return;
    close_reverse_auction(a, task.t.units, engine_.now());

    if (a.state == AuctionState::Awarded) {
        AircraftNode* winner = nullptr;
        for (auto& n : fleet_)
            if (n.pubkey == a.winner) winner = &n;
        ChainTransaction tx;
        tx.id = next_tx_id();
        tx.kind = TxKind::AwardTask;
        tx.submitter = kContract;
        tx.task_id = task.t.id;
        tx.from = winner->pubkey;
        tx.to = kEscrow;
        tx.amount = cfg_.stake;
        tx.ask_per_unit = a.price_per_unit;
        if (submit_tx(token_, std::move(tx), kToken)) {
            task.status = TaskStatus::Assigned;
            task.executor = winner->id;
            task.malicious_win = !winner->honest;
            task.price_total = a.price_per_unit * task.t.units;
            task.stake_locked = true;
            ++winner->pending_awards;
            return;
        }
        a.state = AuctionState::Failed; // winner could no longer stake
    }
    // failed: retry once at a raised reserve, then give up
    if (task.auction_attempt == 0) {
        task.auction_attempt = 1;
        rwa_open_auction(task);
    } else {
        // AuctionFailed: refund and record the failure
        ChainTransaction tx;
        tx.id = next_tx_id();
        tx.kind = TxKind::TokenTransfer;
        tx.submitter = kContract;
        tx.task_id = task.t.id;
        tx.from = kEscrow;
        tx.to = kRequester;
        tx.amount = task.escrow;
        tx.memo = "refund";
        submit_tx(token_, std::move(tx), kToken);
        task.escrow = 0;
        fail_task(task);
    }
}

void Simulation::rwa_settle_proof(TaskRec& task) {
    if (task.status != TaskStatus::Completed || task.executor == UINT32_MAX)
        return;
    AircraftNode& winner = fleet_[task.executor];
    auto transfer = [&](const std::string& from, const std::string& to,
                        double amount, const char* memo) {
        if (amount <= 1e-12) return;
        ChainTransaction tx;
        tx.id = next_tx_id();
        tx.kind = TxKind::TokenTransfer;
        tx.submitter = kContract;
        tx.task_id = task.t.id;
        tx.from = from;
        tx.to = to;
        tx.amount = amount;
        tx.memo = memo;
        submit_tx(token_, std::move(tx), kToken);
    };
    transfer(kEscrow, winner.pubkey, task.price_total, "payment");
    tokens_settled_ += task.price_total;
    if (task.stake_locked) {
        transfer(kEscrow, winner.pubkey, cfg_.stake, "stake_return");
        task.stake_locked = false;
    }
    transfer(kEscrow, kRequester, task.escrow - task.price_total, "refund");
    task.escrow = 0;
    if (winner.pending_awards > 0) --winner.pending_awards;
}

void Simulation::rwa_penalize(TaskRec& task) {
    AircraftNode& winner = fleet_[task.executor];
    if (task.stake_locked) {
        ChainTransaction tx;
        tx.id = next_tx_id();
        tx.kind = TxKind::Penalty;
        tx.submitter = kContract;
        tx.task_id = task.t.id;
        tx.from = kEscrow;
        tx.amount = cfg_.stake;
        tx.memo = "stake_burn";
        if (submit_tx(token_, std::move(tx), kToken)) {
            task.stake_locked = false;
            ++winner.burns;
            if (winner.burns >= cfg_.ban_after) winner.banned = true;
        }
    }
    if (task.escrow > 0) {
        ChainTransaction tx;
        tx.id = next_tx_id();
        tx.kind = TxKind::TokenTransfer;
        tx.submitter = kContract;
        tx.task_id = task.t.id;
        tx.from = kEscrow;
        tx.to = kRequester;
        tx.amount = task.escrow;
        tx.memo = "refund";
        submit_tx(token_, std::move(tx), kToken);
        task.escrow = 0;
    }
    if (winner.pending_awards > 0) --winner.pending_awards;
}

// ---------------------------------------------------------------------------
// CTA scheme
// ---------------------------------------------------------------------------

void Simulation::cta_refresh_reports() {
    for (const auto& n : fleet_) {
        node_table_[n.id] = corrupt_report(n, cfg_, engine_.now());
        gcs_booked_until_[n.id] = node_table_[n.id].busy_until;
    }
}

void Simulation::cta_start_service(uint64_t task_id) {
    gcs_busy_ = true;
    if (!gcs_queue_.empty() && gcs_queue_.front() == task_id)
        gcs_queue_.pop_front();
    engine_.schedule(engine_.now() + cfg_.gcs_service_time_s(),
                     EventKind::GcsServiceDone, task_id);
}

void Simulation::on_gcs_service_done(uint64_t task_id) {
    cta_allocate(task_id);
    gcs_busy_ = false;
    while (!gcs_queue_.empty()) {
        uint64_t next = gcs_queue_.front();
        if (tasks_[next].status != TaskStatus::Waiting) {
            gcs_queue_.pop_front();
            continue;
        }
        cta_start_service(next);
        break;
    }
}

void Simulation::on_cta_retry(uint64_t task_id) {
    TaskRec& task = tasks_[task_id];
    if (task.status != TaskStatus::Waiting) return;
    gcs_queue_.push_back(task_id);
    if (!gcs_busy_) cta_start_service(gcs_queue_.front());
}

void Simulation::cta_allocate(uint64_t task_id) {
    TaskRec& task = tasks_[task_id];
    if (task.status != TaskStatus::Waiting) return;
    const SimTime now = engine_.now();
    const double deadline = task.t.arrival_time + task.t.deadline_s;
    const double data_t = transfer_time(task.t.data_bits, link_);
    const double result_t = transfer_time(task.t.result_bits, link_);

    int best = -1;
    double best_est = kInf;
    for (const auto& n : fleet_) {
        const NodeReport& rep = node_table_[n.id];
        if (rep.delivering) continue;
        const double wait = std::max(0.0, gcs_booked_until_[n.id] - now);
        const double est =
            wait + data_t + task.t.flop_load / rep.compute_capacity;
        if (now + est + result_t > deadline) continue;
        if (est < best_est) {
            best_est = est;
            best = static_cast<int>(n.id);
        }
    }
    if (best < 0) {
        // NoFeasibleNode: retry until the deadline makes it pointless
        if (now + cfg_.cta_retry_interval_s + data_t < deadline) {
            ++task.retries;
            engine_.schedule(now + cfg_.cta_retry_interval_s,
                             EventKind::CtaRetry, task_id);
        } else {
            fail_task(task);
        }
        return;
    }
    gcs_booked_until_[best] = now + best_est;
    start_execution(task, fleet_[best]);
}

// ---------------------------------------------------------------------------
// CBBA scheme
// ---------------------------------------------------------------------------

void Simulation::on_cbba_round() {
    const SimTime now = engine_.now();
    const SimTime next = now + cfg_.cbba_epoch_s;
    if (next <= cfg_.horizon_s) engine_.schedule(next, EventKind::CbbaRound);

    std::vector<uint64_t> open;
    for (auto& t : tasks_)
        if (t.status == TaskStatus::Waiting &&
            t.t.arrival_time <= now &&
            now < t.t.arrival_time + t.t.deadline_s)
            open.push_back(t.t.id);
    if (open.empty()) return;

    const double data_t = transfer_time(cfg_.task_data_bits, link_);
    std::vector<CbbaAgent> agents;
    std::vector<uint32_t> agent_node;
    for (auto& n : fleet_) {
        bool eligible;
        if (n.honest) {
            eligible = !n.delivering && n.compute_idle(now) &&
                       n.cbba_claims < cfg_.cbba_bundle_cap &&
                       rng_volunteer_.bernoulli(cfg_.cbba_volunteer_fraction);
        } else {
            eligible = n.cbba_claims < cfg_.cbba_bundle_cap;
        }
        if (!eligible) continue;
        CbbaAgent a;
        a.id = n.id;
        a.x = n.x;
        a.y = n.y;
        a.max_claims = cfg_.cbba_bundle_cap - n.cbba_claims;
        a.scores.reserve(open.size());
        const double cap_eff =
            n.honest ? n.compute_capacity
                     : n.compute_capacity * cfg_.report_inflation;
        for (uint64_t tid : open) {
            const TaskRec& t = tasks_[tid];
            const double cost =
                (data_t + t.t.flop_load / cap_eff) * cfg_.cbba_time_value;
            double score = t.t.max_payment - cost;
            // consensus plausibility bound: claims above the posted payment
            // are rejected by neighbors
            if (score <= 0 || score > t.t.max_payment) score = -1;
            a.scores.push_back(score);
        }
        agents.push_back(std::move(a));
        agent_node.push_back(n.id);
    }
    if (agents.empty()) return;

    CbbaOutcome out = cbba_allocate(agents, open.size(), cfg_.cbba_comm_radius_m);
    if (!out.converged) return; // NonConvergence: tasks wait for the next epoch

    const SimTime assign_at = now + out.rounds * cfg_.cbba_msg_latency_s;
    for (size_t t = 0; t < open.size(); ++t) {
        if (out.winner[t] < 0) continue;
        AircraftNode& node = fleet_[agent_node[out.winner[t]]];
        TaskRec& task = tasks_[open[t]];
        task.status = TaskStatus::Assigned;
        task.executor = node.id;
        task.malicious_win = !node.honest;
        ++node.cbba_claims;
        engine_.schedule(assign_at, EventKind::CbbaAssign, task.t.id, node.id);
    }
}

void Simulation::on_cbba_assign(uint64_t task_id, uint64_t node_id) {
    TaskRec& task = tasks_[task_id];
    if (task.status != TaskStatus::Assigned || task.completed_at >= 0) return;
    start_execution(task, fleet_[node_id]);
}

// ---------------------------------------------------------------------------
// inspection
// ---------------------------------------------------------------------------

std::vector<TxKind> Simulation::sealed_tx_kinds_for_task(uint64_t task_id) const {
    std::vector<TxKind> out;
    for (const auto& b : token_.blocks())
        for (const auto& tx : b.txs)
            if (tx.task_id == task_id && tx.kind != TxKind::CheckIn &&
                tx.kind != TxKind::AnchorRecord)
                out.push_back(tx.kind);
    return out;
}

// ---------------------------------------------------------------------------
// chain calibration
// ---------------------------------------------------------------------------

CalibrationResult calibrate_chain(const ScenarioConfig& cfg) {
    Engine engine;
    RngStream rng(cfg.seed, "calibration");
    Ledger ledger(LedgerKind::Permissioned,
                  ChainParams{cfg.chain_block_size, cfg.chain_block_timeout_s,
                              cfg.chain_tps_cap, cfg.chain_propagation_s, false});
    uint64_t tx_id = 1;
    {
        ChainTransaction reg;
        reg.id = tx_id++;
        reg.kind = TxKind::RegisterNode;
        reg.submitter = "pk_CAL";
        ledger.submit(std::move(reg), 0);
    }
    std::vector<uint64_t> measured;
    const double mean_gap = 1.0 / cfg.calibrate_background_tps;
    double t = rng.exponential(mean_gap);
    while (t < cfg.horizon_s) {
        engine.schedule(t, EventKind::CheckIn, tx_id++);
        t += rng.exponential(mean_gap);
    }
    engine.set_handler([&](const Event& e) {
        if (e.kind == EventKind::CheckIn) {
            ChainTransaction tx;
            tx.id = e.a;
            tx.kind = TxKind::CheckIn;
            tx.submitter = "pk_CAL";
            ledger.submit(std::move(tx), engine.now());
            if (engine.now() >= cfg.warmup_s &&
                engine.now() <= cfg.horizon_s - 10)
                measured.push_back(e.a);
        } else if (e.kind == EventKind::BlockSeal) {
            ledger.seal_due(engine.now());
        }
        double due = ledger.next_seal_due(engine.now());
        if (std::isfinite(due))
            engine.schedule(std::max(due, engine.now()), EventKind::BlockSeal);
    });
    engine.run_until(cfg.horizon_s);
    ledger.seal_due(cfg.horizon_s);

    CalibrationResult r;
    std::vector<double> lats;
    for (uint64_t id : measured)
        if (auto l = ledger.confirmation_latency(id)) lats.push_back(*l);
    r.mean_confirmation_latency_s = mean_of(lats);
    r.txs_measured = lats.size();
    return r;
}

} // namespace lacnet
