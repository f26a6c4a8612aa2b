// End-to-end acceptance suite. Each numbered criterion prints one PASS/FAIL
// line; the process exits nonzero if any fail.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "lacnet/market.hpp"
#include "lacnet/rng.hpp"
#include "lacnet/simulation.hpp"
#include "lacnet/sweep.hpp"

using namespace lacnet;

namespace {

int g_failures = 0;

void report(int id, bool pass, const std::string& label,
            const std::string& detail) {
    std::printf("%s  %2d  %-28s %s\n", pass ? "PASS" : "FAIL", id,
                label.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

struct Cell {
    std::vector<double> latency, failure, util, mal_share;
    uint64_t conservation = 0;
    double latency_mean() const { return mean_of(latency); }
    double latency_se() const {
        return stddev_of(latency) / std::sqrt(double(latency.size()));
    }
};

// key: (scheme, rate or fraction)
using Table = std::map<std::pair<std::string, double>, Cell>;

Table collect(const std::vector<MetricsRecord>& runs, bool by_fraction) {
    Table t;
    for (const auto& r : runs) {
        auto& c = t[{r.scheme,
                     by_fraction ? r.malicious_fraction : r.arrival_rate_per_min}];
        c.latency.push_back(r.mean_latency_s);
        c.failure.push_back(r.failure_rate);
        c.util.push_back(r.utilization);
        c.mal_share.push_back(
            r.tasks_total ? double(r.malicious_wins_abandoned) /
                                double(r.tasks_total)
                          : 0.0);
        c.conservation += r.conservation_violations;
    }
    return t;
}

bool gap_2sigma(const Cell& lo, const Cell& hi) {
    const double se =
        std::sqrt(lo.latency_se() * lo.latency_se() +
                  hi.latency_se() * hi.latency_se());
    return hi.latency_mean() - lo.latency_mean() > 2.0 * se;
}

struct Fit {
    double slope = 0, r2 = 0;
};

Fit linear_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
    const double n = double(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    Fit f;
    f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double intercept = (sy - f.slope * sx) / n;
    double ss_res = 0, ss_tot = 0, ym = sy / n;
    for (size_t i = 0; i < xs.size(); ++i) {
        double pred = intercept + f.slope * xs[i];
        ss_res += (ys[i] - pred) * (ys[i] - pred);
        ss_tot += (ys[i] - ym) * (ys[i] - ym);
    }
    f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    return f;
}

SweepResult run_preset(const char* name) {
    ScenarioConfig base;
    auto spec = make_preset(name, base);
    SweepOptions opts;
    opts.jobs = int(std::max(2u, std::thread::hardware_concurrency()));
    return run_sweep(*spec, opts);
}

// ---------------------------------------------------------------------------

void criteria_latency(const Table& a, uint64_t& conservation_total) {
    for (const auto& [k, c] : a) conservation_total += c.conservation;

    { // 1: ordering at 10/min with 2-sigma gaps
        const Cell &cta = a.at({"cta", 10}), &cbba = a.at({"cbba", 10}),
                   &rwa = a.at({"rwa", 10});
        bool pass = gap_2sigma(cta, cbba) && gap_2sigma(cbba, rwa);
        report(1, pass, "latency ordering @10/min",
               "cta=" + fmt(cta.latency_mean()) +
                   " cbba=" + fmt(cbba.latency_mean()) +
                   " rwa=" + fmt(rwa.latency_mean()));
    }
    { // 2: CTA saturation
        auto lat = [&](double r) { return a.at({"cta", r}).latency_mean(); };
        bool pass = lat(200) >= 10.0 * lat(10) &&
                    (lat(200) - lat(150)) > (lat(60) - lat(10));
        report(2, pass, "cta saturation",
               "10/min=" + fmt(lat(10)) + " 200/min=" + fmt(lat(200)) +
                   " d(150-200)=" + fmt(lat(200) - lat(150)) +
                   " d(10-60)=" + fmt(lat(60) - lat(10)));
    }
    { // 3: RWA flat, near-linear scaling
        std::vector<double> xs, ys;
        for (double r : {10.0, 30.0, 60.0, 90.0, 120.0, 150.0, 200.0}) {
            xs.push_back(r);
            ys.push_back(a.at({"rwa", r}).latency_mean());
        }
        Fit f = linear_fit(xs, ys);
        bool pass = f.r2 >= 0.9 && ys.back() <= 2.0 * ys.front();
        report(3, pass, "rwa flat scaling",
               "r2=" + fmt(f.r2) + " lat10=" + fmt(ys.front()) +
                   " lat200=" + fmt(ys.back()));
    }
    { // 4: crossover
        bool pass = false;
        double at = 0;
        for (double r : {30.0, 60.0, 90.0, 120.0, 150.0, 200.0})
            if (a.at({"rwa", r}).latency_mean() <
                a.at({"cta", r}).latency_mean()) {
                pass = true;
                at = r;
                break;
            }
        report(4, pass, "rwa/cta latency crossover",
               pass ? "first at " + fmt(at) + "/min" : "no crossover found");
    }
}

void criteria_failure(const Table& b, uint64_t& conservation_total) {
    for (const auto& [k, c] : b) conservation_total += c.conservation;
    { // 5: failure ordering at malicious 0.3
        double cta = mean_of(b.at({"cta", 0.3}).failure);
        double cbba = mean_of(b.at({"cbba", 0.3}).failure);
        double rwa = mean_of(b.at({"rwa", 0.3}).failure);
        bool pass = cta - cbba >= 0.03 && cbba - rwa >= 0.03;
        report(5, pass, "failure ordering @0.3",
               "cta=" + fmt(cta) + " cbba=" + fmt(cbba) + " rwa=" + fmt(rwa));
    }
    { // 6: RWA failure tracks malicious win-and-abandon share
        const Cell& rwa = b.at({"rwa", 0.3});
        double diff =
            std::fabs(mean_of(rwa.failure) - mean_of(rwa.mal_share));
        report(6, diff <= 0.02, "rwa failure law",
               "failure=" + fmt(mean_of(rwa.failure)) +
                   " mal_share=" + fmt(mean_of(rwa.mal_share)));
    }
}

void criterion_utilization(const Table& c, uint64_t& conservation_total) {
    for (const auto& [k, cell] : c) conservation_total += cell.conservation;
    double cta = mean_of(c.at({"cta", 120}).util);
    double cbba = mean_of(c.at({"cbba", 120}).util);
    double rwa = mean_of(c.at({"rwa", 120}).util);
    bool pass = rwa - cbba >= 0.02 && cbba - cta >= 0.02;
    report(7, pass, "utilization ordering",
           "rwa=" + fmt(rwa) + " cbba=" + fmt(cbba) + " cta=" + fmt(cta));
}

void criterion_calibration() {
    std::vector<double> lats;
    for (uint64_t seed = 1; seed <= 5; ++seed) {
        ScenarioConfig cfg;
        cfg.seed = seed;
        lats.push_back(calibrate_chain(cfg).mean_confirmation_latency_s);
    }
    double m = mean_of(lats);
    report(8, m >= 0.9 && m <= 1.3, "chain calibration",
           "mean latency " + fmt(m) + " s @5 background tps");
}

void criterion_block_rules() {
    bool pass = true;
    std::string detail;

    // burst: 5000 txs at one instant never confirm faster than 1000/s
    Ledger l(LedgerKind::Permissioned, {});
    ChainTransaction reg;
    reg.id = 1;
    reg.kind = TxKind::RegisterNode;
    reg.submitter = "pk_A";
    l.submit(std::move(reg), 0);
    l.seal_due(2.0);
    for (uint64_t i = 0; i < 5000; ++i) {
        ChainTransaction tx;
        tx.id = 10 + i;
        tx.submitter = "pk_A";
        l.submit(std::move(tx), 10.0);
    }
    std::vector<double> confirms;
    for (double t = 10.0; t < 30.0; t += 0.01)
        for (const auto& bl : l.seal_due(t))
            for (size_t i = 0; i < bl.txs.size(); ++i) confirms.push_back(t);
    if (confirms.size() != 5000) {
        pass = false;
        detail = "burst lost txs";
    }
    for (size_t i = 0; i < confirms.size() && pass; ++i) {
        size_t in_window = 0;
        for (size_t j = i;
             j < confirms.size() && confirms[j] <= confirms[i] + 1.0 - 1e-12;
             ++j)
            ++in_window;
        if (in_window > 1000) {
            pass = false;
            detail = "rolling-second cap exceeded";
        }
    }

    // every sealed block of a real run obeys size-or-timeout
    ScenarioConfig cfg;
    cfg.scheme = SchemeKind::Rwa;
    cfg.n_nodes = 50;
    cfg.arrival_rate_per_min = 120;
    cfg.horizon_s = 300;
    Simulation sim(cfg);
    sim.run();
    size_t blocks = 0;
    for (const Ledger* led : {&sim.permissioned(), &sim.permissionless()}) {
        for (const auto& bl : led->blocks()) {
            ++blocks;
            const bool size_trigger = bl.txs.size() == 10;
            const bool timeout_trigger =
                bl.sealed_at - bl.txs.front().submit_time >= 2.0 - 1e-9;
            if (bl.txs.size() > 10 || !(size_trigger || timeout_trigger)) {
                pass = false;
                detail = "bad block at height " + std::to_string(bl.height);
            }
        }
    }
    if (pass)
        detail = "burst capped; " + std::to_string(blocks) + " blocks valid";
    report(9, pass, "block rules", detail);
}

AuctionInstance vickrey_round(double a0, double a1, double a2) {
    AuctionInstance a;
    a.close_at = 3.0;
    a.reserve_per_unit = 1.0;
    a.rule = AuctionRule::Vickrey;
    const double asks[3] = {a0, a1, a2};
    for (int i = 0; i < 3; ++i) {
        BidMessage b;
        b.bidder = "pk_" + std::to_string(i);
        b.units_offered = 100;
        b.ask_per_unit = asks[i];
        a.bids.push_back(b);
    }
    close_reverse_auction(a, 100, 3.0);
    return a;
}

void criterion_mechanisms() {
    bool pass = true;
    std::string detail;

    // Vickrey truthfulness, exhaustive 3-bidder grid {0.1..1.0}
    auto grid = [](int i) { return 0.1 * (i + 1); };
    for (int c0 = 0; c0 < 10 && pass; ++c0)
        for (int c1 = 0; c1 < 10 && pass; ++c1)
            for (int c2 = 0; c2 < 10 && pass; ++c2) {
                double cost[3] = {grid(c0), grid(c1), grid(c2)};
                auto truthful = vickrey_round(cost[0], cost[1], cost[2]);
                for (int who = 0; who < 3 && pass; ++who) {
                    double u_true =
                        truthful.winner == "pk_" + std::to_string(who)
                            ? truthful.price_per_unit - cost[who]
                            : 0.0;
                    for (int dev = 0; dev < 10; ++dev) {
                        double ask[3] = {cost[0], cost[1], cost[2]};
                        ask[who] = grid(dev);
                        auto r = vickrey_round(ask[0], ask[1], ask[2]);
                        double u_dev = r.winner == "pk_" + std::to_string(who)
                                           ? r.price_per_unit - cost[who]
                                           : 0.0;
                        if (u_dev > u_true + 1e-9) {
                            pass = false;
                            detail = "profitable Vickrey deviation";
                        }
                    }
                }
            }

    // McAfee vs brute-force maximal trade count, 1000 random instances
    RngStream rng(41, "mcafee-acceptance");
    for (int trial = 0; trial < 1000 && pass; ++trial) {
        std::vector<DoubleAuctionOrder> bids, asks;
        std::vector<double> bv, av;
        int nb = 1 + int(rng.uniform_int(6)), na = 1 + int(rng.uniform_int(6));
        for (int i = 0; i < nb; ++i) {
            bv.push_back(rng.uniform(0, 10));
            bids.push_back({"b" + std::to_string(i), bv.back()});
        }
        for (int i = 0; i < na; ++i) {
            av.push_back(rng.uniform(0, 10));
            asks.push_back({"s" + std::to_string(i), av.back()});
        }
        auto r = clear_double_auction(bids, asks);
        std::sort(bv.rbegin(), bv.rend());
        std::sort(av.begin(), av.end());
        int k = 0;
        for (size_t i = 0; i < std::min(bv.size(), av.size()); ++i)
            if (bv[i] >= av[i]) k = int(i) + 1;
        int traded = int(r.trades.size());
        if (traded > k || traded < std::max(0, k - 1) ||
            (r.uniform_price && traded != k)) {
            pass = false;
            detail = "McAfee trade count off welfare-maximal matching";
        }
    }

    // Stackelberg toy instance vs grid oracle
    DemandProfile d;
    d.value_coeff = 4;
    auto sol = leader_optimal_price(d, 1.0);
    if (!sol || std::fabs(sol->price - 2.0) > 1e-6 ||
        std::fabs(sol->quantity - 1.0) > 1e-6) {
        pass = false;
        detail = "Stackelberg toy instance off closed form";
    } else {
        double best = -1;
        for (double p = 1.0; p <= 8.0; p += 1e-4) {
            ProviderOffer offer;
            offer.unit_price = p;
            offer.capacity_units = 1e18;
            double profit = (p - 1.0) * follower_best_response(offer, d);
            best = std::max(best, profit);
        }
        if (best > sol->leader_profit + 1e-6) {
            pass = false;
            detail = "grid oracle beats closed form";
        }
    }
    if (pass) detail = "vickrey grid, mcafee x1000, stackelberg toy";
    report(10, pass, "mechanism properties", detail);
}

void criterion_golden() {
    ScenarioConfig cfg;
    cfg.scheme = SchemeKind::Rwa;
    cfg.n_nodes = 2;
    cfg.horizon_s = 120;
    cfg.warmup_s = 0;
    Simulation sim(cfg);
    sim.disable_duty_cycle();
    sim.script_arrivals({50.0});
    sim.set_spare_units(0, 30.0);
    MetricsRecord rec = sim.run();
    const auto& task = sim.tasks()[0];
    auto kinds = sim.sealed_tx_kinds_for_task(0);
    const std::vector<TxKind> want{TxKind::PostTask,   TxKind::SubmitBid,
                                   TxKind::SubmitBid,  TxKind::AwardTask,
                                   TxKind::ProofOfCompletion,
                                   TxKind::TokenTransfer};
    bool pass = task.executor == 1 &&
                std::fabs(task.price_total - 30.0) < 1e-9 &&
                std::fabs(rec.tokens_settled - 30.0) < 1e-9 &&
                kinds.size() >= want.size() &&
                std::equal(want.begin(), want.end(), kinds.begin());
    report(12, pass, "golden scenario",
           "evtol paid " + fmt(task.price_total) + " COMP, tx order ok");
}

void criterion_determinism() {
    bool pass = true;
    for (auto scheme : {SchemeKind::Cta, SchemeKind::Cbba, SchemeKind::Rwa}) {
        ScenarioConfig cfg;
        cfg.scheme = scheme;
        cfg.arrival_rate_per_min = 60;
        cfg.seed = 2;
        Simulation s1(cfg), s2(cfg);
        if (s1.run().csv_row() != s2.run().csv_row()) pass = false;
    }
    report(13, pass, "determinism", "3 schemes re-run byte-identical");
}

void criterion_anchoring() {
    ScenarioConfig cfg;
    cfg.scheme = SchemeKind::Rwa;
    cfg.n_nodes = 50;
    cfg.arrival_rate_per_min = 60;
    cfg.horizon_s = 200;
    Simulation sim(cfg);
    sim.run();
    std::ostringstream os;
    sim.permissioned().dump(os);
    std::istringstream is(os.str());
    auto pristine = parse_dump(is);
    const auto& anchors = sim.anchor_channel().records;
    int caught = 0;
    const int trials = 100;
    RngStream rng(77, "mutations");
    for (int t = 0; t < trials; ++t) {
        auto blocks = pristine;
        size_t bi = rng.uniform_int(blocks.size());
        while (blocks[bi].txs.empty()) bi = rng.uniform_int(blocks.size());
        auto& tx = blocks[bi].txs[rng.uniform_int(blocks[bi].txs.size())];
        switch (rng.uniform_int(3)) {
            case 0: tx.amount += 1.0; break;
            case 1: tx.memo += "x"; break;
            default: tx.submitter += "z"; break;
        }
        auto r = reconcile(blocks, anchors);
        if (!r.consistent && r.mismatch_height == blocks[bi].height) ++caught;
    }
    report(14, caught == trials, "anchoring tamper detection",
           std::to_string(caught) + "/" + std::to_string(trials) +
               " mutations caught at the right height");
}

} // namespace

int main() {
    std::printf("acceptance suite: %u worker threads\n",
                std::max(2u, std::thread::hardware_concurrency()));
    uint64_t conservation_total = 0;

    auto fig5a = run_preset("fig5a");
    criteria_latency(collect(fig5a.runs, false), conservation_total);

    auto fig5b = run_preset("fig5b");
    criteria_failure(collect(fig5b.runs, true), conservation_total);

    auto fig5c = run_preset("fig5c");
    criterion_utilization(collect(fig5c.runs, false), conservation_total);

    criterion_calibration();
    criterion_block_rules();
    criterion_mechanisms();
    report(11, conservation_total == 0, "token conservation",
           std::to_string(conservation_total) + " violations across all runs");
    criterion_golden();
    criterion_determinism();
    criterion_anchoring();

    std::printf("%s\n", g_failures == 0 ? "all criteria passed"
                                        : "criteria failed");
    return g_failures == 0 ? 0 : 1;
}
