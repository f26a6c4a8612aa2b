#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "lacnet/market.hpp"
#include "lacnet/rng.hpp"

using namespace lacnet;

namespace {

BidMessage bid(const std::string& who, double units, double ask, double at) {
    BidMessage b;
    b.bidder = who;
    b.units_offered = units;
    b.ask_per_unit = ask;
    b.submitted_at = at;
    return b;
}

AuctionInstance open_auction(double reserve, AuctionRule rule) {
    AuctionInstance a;
    a.open_at = 0;
    a.close_at = 3.0;
    a.reserve_per_unit = reserve;
    a.rule = rule;
    return a;
}

} // namespace

TEST_CASE("follower best response closed form") {
    ProviderOffer offer;
    offer.capacity_units = 1e18;
    DemandProfile d;
    SUBCASE("a=4 p=2 gives x*=1") {
        offer.unit_price = 2;
        d.value_coeff = 4;
        CHECK(follower_best_response(offer, d) == doctest::Approx(1.0));
    }
    SUBCASE("a=1 p=2 clamps to the corner") {
        offer.unit_price = 2;
        d.value_coeff = 1;
        CHECK(follower_best_response(offer, d) == 0.0);
    }
    SUBCASE("zero value buys nothing") {
        offer.unit_price = 5;
        d.value_coeff = 0;
        CHECK(follower_best_response(offer, d) == 0.0);
    }
    SUBCASE("capacity caps the response") {
        offer.unit_price = 0.1;
        offer.capacity_units = 3;
        d.value_coeff = 4;
        CHECK(follower_best_response(offer, d) == doctest::Approx(3.0));
    }
}

TEST_CASE("leader optimum matches a 2-D grid oracle on the toy instance") {
    DemandProfile d;
    d.value_coeff = 4;
    auto sol = leader_optimal_price(d, 1.0);
    REQUIRE(sol.has_value());
    CHECK(sol->price == doctest::Approx(2.0));
    CHECK(sol->quantity == doctest::Approx(1.0));
    CHECK(sol->leader_profit == doctest::Approx(1.0));

    // grid oracle: leader profit (p-c)*x with follower best-responding
    double best_profit = -1, best_p = 0;
    for (double p = 1.0; p <= 8.0; p += 1e-4) {
        ProviderOffer offer;
        offer.unit_price = p;
        offer.capacity_units = 1e18;
        double x = follower_best_response(offer, d);
        double profit = (p - 1.0) * x;
        if (profit > best_profit) {
            best_profit = profit;
            best_p = p;
        }
    }
    CHECK(best_p == doctest::Approx(sol->price).epsilon(1e-3));
    CHECK(best_profit == doctest::Approx(sol->leader_profit).epsilon(1e-6));
    // fixed point: follower at p* returns x*
    ProviderOffer at_star;
    at_star.unit_price = sol->price;
    at_star.capacity_units = 1e18;
    CHECK(follower_best_response(at_star, d) == doctest::Approx(sol->quantity));
}

TEST_CASE("leader boundary and degenerate cases") {
    DemandProfile d;
    d.value_coeff = 1;
    auto sol = leader_optimal_price(d, 1.0);
    REQUIRE(sol.has_value());
    CHECK(sol->price == doctest::Approx(1.0)); // p* = c
    CHECK(sol->quantity == doctest::Approx(0.0));
    CHECK(sol->leader_profit == doctest::Approx(0.0));
    d.value_coeff = 0;
    CHECK_FALSE(leader_optimal_price(d, 1.0).has_value());
}

TEST_CASE("reverse auction on the two-bidder scenario") {
    SUBCASE("first-price awards the full-coverage low ask") {
        auto a = open_auction(0.5, AuctionRule::FirstPrice);
        a.accept_bid(bid("pk_drone", 30, 0.4, 1.0));
        a.accept_bid(bid("pk_evtol", 100, 0.3, 1.0));
        close_reverse_auction(a, 100, 3.0);
        REQUIRE(a.state == AuctionState::Awarded);
        CHECK(a.winner == "pk_evtol");
        CHECK(a.price_per_unit == doctest::Approx(0.3));
        CHECK(a.price_per_unit * 100 == doctest::Approx(30.0));
    }
    SUBCASE("Vickrey falls back to the reserve with no second cover") {
        auto a = open_auction(0.5, AuctionRule::Vickrey);
        a.accept_bid(bid("pk_drone", 30, 0.4, 1.0));
        a.accept_bid(bid("pk_evtol", 100, 0.3, 1.0));
        close_reverse_auction(a, 100, 3.0);
        REQUIRE(a.state == AuctionState::Awarded);
        CHECK(a.winner == "pk_evtol");
        CHECK(a.price_per_unit == doctest::Approx(0.5));
    }
    SUBCASE("no bids fails") {
        auto a = open_auction(0.5, AuctionRule::FirstPrice);
        close_reverse_auction(a, 100, 3.0);
        CHECK(a.state == AuctionState::Failed);
    }
    SUBCASE("asks above reserve are ineligible") {
        auto a = open_auction(0.5, AuctionRule::FirstPrice);
        a.accept_bid(bid("pk_x", 100, 0.6, 1.0));
        close_reverse_auction(a, 100, 3.0);
        CHECK(a.state == AuctionState::Failed);
    }
    SUBCASE("ties break by time then pubkey") {
        auto a = open_auction(0.5, AuctionRule::FirstPrice);
        a.accept_bid(bid("pk_b", 100, 0.3, 1.5));
        a.accept_bid(bid("pk_a", 100, 0.3, 1.0));
        close_reverse_auction(a, 100, 3.0);
        CHECK(a.winner == "pk_a");
        auto a2 = open_auction(0.5, AuctionRule::FirstPrice);
        a2.accept_bid(bid("pk_b", 100, 0.3, 1.0));
        a2.accept_bid(bid("pk_a", 100, 0.3, 1.0));
        close_reverse_auction(a2, 100, 3.0);
        CHECK(a2.winner == "pk_a");
    }
    SUBCASE("late bids are not accepted") {
        auto a = open_auction(0.5, AuctionRule::FirstPrice);
        CHECK_FALSE(a.accept_bid(bid("pk_x", 100, 0.3, 3.0)));
        close_reverse_auction(a, 100, 3.0);
        CHECK(a.state == AuctionState::Failed);
    }
}

TEST_CASE("reverse auction monotonicity and individual rationality") {
    RngStream rng(17, "auction");
    for (int trial = 0; trial < 500; ++trial) {
        auto a = open_auction(1.0, AuctionRule::FirstPrice);
        int n = 2 + static_cast<int>(rng.uniform_int(5));
        for (int i = 0; i < n; ++i)
            a.accept_bid(bid("pk_" + std::to_string(i), 100,
                             0.05 + rng.uniform() * 1.2, rng.uniform() * 2));
        auto b = a; // same bids, one loser undercuts below the winner
        close_reverse_auction(a, 100, 3.0);
        if (a.state != AuctionState::Awarded) continue;
        double winner_ask = 0;
        for (const auto& m : a.bids)
            if (m.bidder == a.winner) winner_ask = m.ask_per_unit;
        REQUIRE(a.price_per_unit >= winner_ask - 1e-12);
        REQUIRE(a.price_per_unit <= a.reserve_per_unit + 1e-12);
        for (auto& m : b.bids) {
            if (m.bidder != a.winner) {
                m.ask_per_unit = winner_ask - 0.01;
                close_reverse_auction(b, 100, 3.0);
                CHECK(b.winner == m.bidder);
                break;
            }
        }
    }
}

TEST_CASE("Vickrey truthfulness on the exhaustive 3-bidder grid") {
    // costs and asks on {0.1, ..., 1.0}; utility = price - cost if winner
    auto run = [](double a0, double a1, double a2) {
        auto a = open_auction(1.0, AuctionRule::Vickrey);
        a.accept_bid(bid("pk_0", 100, a0, 0.0));
        a.accept_bid(bid("pk_1", 100, a1, 0.0));
        a.accept_bid(bid("pk_2", 100, a2, 0.0));
        close_reverse_auction(a, 100, 3.0);
        return a;
    };
    const int G = 10;
    auto grid = [](int i) { return 0.1 * (i + 1); };
    int profitable_deviations = 0;
    for (int c0 = 0; c0 < G; ++c0)
        for (int c1 = 0; c1 < G; ++c1)
            for (int c2 = 0; c2 < G; ++c2) {
                double cost[3] = {grid(c0), grid(c1), grid(c2)};
                auto truthful = run(cost[0], cost[1], cost[2]);
                for (int who = 0; who < 3; ++who) {
                    double u_true = 0;
                    if (truthful.state == AuctionState::Awarded &&
                        truthful.winner == "pk_" + std::to_string(who))
                        u_true = truthful.price_per_unit - cost[who];
                    for (int dev = 0; dev < G; ++dev) {
                        double ask[3] = {cost[0], cost[1], cost[2]};
                        ask[who] = grid(dev);
                        auto r = run(ask[0], ask[1], ask[2]);
                        double u_dev = 0;
                        if (r.state == AuctionState::Awarded &&
                            r.winner == "pk_" + std::to_string(who))
                            u_dev = r.price_per_unit - cost[who];
                        if (u_dev > u_true + 1e-9) ++profitable_deviations;
                    }
                }
            }
    CHECK(profitable_deviations == 0);
}

namespace {

// welfare-optimal trade count: sort bids desc / asks asc, count b_i >= a_i
int brute_force_max_trades(std::vector<double> bids, std::vector<double> asks) {
    std::sort(bids.rbegin(), bids.rend());
    std::sort(asks.begin(), asks.end());
    int k = 0;
    for (size_t i = 0; i < std::min(bids.size(), asks.size()); ++i)
        if (bids[i] >= asks[i]) k = static_cast<int>(i) + 1;
    return k;
}

DoubleAuctionResult clear(std::vector<double> b, std::vector<double> a) {
    std::vector<DoubleAuctionOrder> bids, asks;
    for (size_t i = 0; i < b.size(); ++i)
        bids.push_back({"b" + std::to_string(i), b[i]});
    for (size_t i = 0; i < a.size(); ++i)
        asks.push_back({"s" + std::to_string(i), a[i]});
    return clear_double_auction(bids, asks);
}

} // namespace

TEST_CASE("McAfee worked examples") {
    SUBCASE("uniform-price branch") {
        auto r = clear({5, 4, 2}, {1, 3, 6});
        REQUIRE(r.trades.size() == 2);
        CHECK(r.uniform_price);
        CHECK(r.clearing_price == doctest::Approx(4.0));
        for (const auto& t : r.trades) {
            CHECK(t.buyer_pays == doctest::Approx(4.0));
            CHECK(t.seller_receives == doctest::Approx(4.0));
        }
        CHECK(r.surplus == doctest::Approx(0.0));
    }
    SUBCASE("no overlap") {
        auto r = clear({5}, {6});
        CHECK(r.trades.empty());
    }
    SUBCASE("boundary fallback trades k-1 at b_k / a_k") {
        auto r = clear({5, 4}, {1, 3});
        REQUIRE(r.trades.size() == 1);
        CHECK_FALSE(r.uniform_price);
        CHECK(r.trades[0].buyer_pays == doctest::Approx(4.0));
        CHECK(r.trades[0].seller_receives == doctest::Approx(3.0));
        CHECK(r.surplus == doctest::Approx(1.0));
    }
    SUBCASE("empty sides") {
        CHECK(clear({}, {1}).trades.empty());
        CHECK(clear({5}, {}).trades.empty());
    }
}

TEST_CASE("McAfee vs brute force on 1000 random instances") {
    RngStream rng(23, "mcafee");
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> bids, asks;
        int nb = 1 + static_cast<int>(rng.uniform_int(6));
        int na = 1 + static_cast<int>(rng.uniform_int(6));
        for (int i = 0; i < nb; ++i) bids.push_back(rng.uniform(0, 10));
        for (int i = 0; i < na; ++i) asks.push_back(rng.uniform(0, 10));
        auto r = clear(bids, asks);
        int k = brute_force_max_trades(bids, asks);
        // McAfee trades k or k-1 pairs, never more than welfare-optimal
        CHECK(static_cast<int>(r.trades.size()) >= std::max(0, k - 1));
        CHECK(static_cast<int>(r.trades.size()) <= k);
        double paid = 0, received = 0;
        for (const auto& t : r.trades) {
            paid += t.buyer_pays;
            received += t.seller_receives;
        }
        REQUIRE(paid >= received - 1e-9); // budget balance
        CHECK(r.surplus == doctest::Approx(paid - received).epsilon(1e-9));
        // individual rationality against the original order books
        std::sort(bids.rbegin(), bids.rend());
        std::sort(asks.begin(), asks.end());
        for (size_t i = 0; i < r.trades.size(); ++i) {
            REQUIRE(r.trades[i].buyer_pays <= bids[i] + 1e-9);
            REQUIRE(r.trades[i].seller_receives >= asks[i] - 1e-9);
        }
    }
}
