#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lacnet/engine.hpp"

namespace lacnet {

// ---------------------------------------------------------------------------
// Stackelberg pricing: a provider (leader) posts a unit price, aircraft
// (followers) best-respond with quantities. Follower value is a*ln(1+x),
// provider overhead is c*q, yielding closed forms checkable by grid search.
// ---------------------------------------------------------------------------

struct ProviderOffer {
    std::string provider;
    double unit_price = 0;     // COMP per compute unit
    double capacity_units = 0;
    double overhead_coeff = 0; // c in O(q) = c*q
};

struct DemandProfile {
    std::string buyer;
    double value_coeff = 0; // a in V(x) = a*ln(1+x)
};

// argmax_x [a*ln(1+x) - p*x] = max(0, a/p - 1), capped at capacity.
double follower_best_response(const ProviderOffer& offer,
                              const DemandProfile& demand);

struct DegenerateDemand {};

// Single-leader optimum: p* = max(c, sqrt(c*a)). Returns error on a <= 0.
struct StackelbergSolution {
    double price = 0;
    double quantity = 0;
    double leader_profit = 0;
};
std::optional<StackelbergSolution> leader_optimal_price(
    const DemandProfile& demand, double overhead_coeff,
    double capacity_units = 1e18);

// ---------------------------------------------------------------------------
// Reverse auction: sellers (compute providers) bid asks, the lowest eligible
// full-coverage ask wins.
// ---------------------------------------------------------------------------

enum class AuctionRule : uint8_t { FirstPrice, Vickrey };

struct BidMessage {
    std::string bidder;
    uint64_t task_id = 0;
    double units_offered = 0;
    double ask_per_unit = 0;
    SimTime submitted_at = 0;
};

enum class AuctionState : uint8_t { Open, Awarded, Failed };

struct AuctionInstance {
    uint64_t id = 0;
    uint64_t task_id = 0;
    SimTime open_at = 0, close_at = 0;
    AuctionRule rule = AuctionRule::FirstPrice;
    double reserve_per_unit = 0; // buyer's max unit price
    std::vector<BidMessage> bids;
    AuctionState state = AuctionState::Open;
    std::string winner;
    double price_per_unit = 0;
    int attempt = 0;

    // Accepted only while open and before close.
    bool accept_bid(const BidMessage& b) {
        if (state != AuctionState::Open || b.submitted_at >= close_at) return false;
        bids.push_back(b);
        return true;
    }
};

struct AuctionNotClosed {};

// Applies the eligibility filter (ask <= reserve, full unit coverage), picks
// the lowest ask with ties broken by submission time then pubkey, and prices
// per rule: first-price pays the winner's ask, Vickrey pays the second-lowest
// eligible full-coverage ask (reserve when none exists).
// Mutates auction.state in place; `units_demanded` comes from the task.
void close_reverse_auction(AuctionInstance& auction, double units_demanded,
                           SimTime now);

// ---------------------------------------------------------------------------
// McAfee double auction over unit orders.
// ---------------------------------------------------------------------------

struct DoubleAuctionOrder {
    std::string trader;
    double price = 0;
};

struct Trade {
    std::string buyer, seller;
    double buyer_pays = 0;
    double seller_receives = 0;
};

struct DoubleAuctionResult {
    std::vector<Trade> trades;
    double clearing_price = 0; // meaningful only when uniform-price branch taken
    bool uniform_price = false;
    double surplus = 0; // budget surplus, burned by the caller
};

DoubleAuctionResult clear_double_auction(std::vector<DoubleAuctionOrder> bids,
                                         std::vector<DoubleAuctionOrder> asks);

} // namespace lacnet
