#include "lacnet/market.hpp"

#include <algorithm>
#include <cmath>

namespace lacnet {

double follower_best_response(const ProviderOffer& offer,
                              const DemandProfile& demand) {
    const double x = demand.value_coeff / offer.unit_price - 1.0;
    return std::clamp(x, 0.0, offer.capacity_units);
}

std::optional<StackelbergSolution> leader_optimal_price(
    const DemandProfile& demand, double overhead_coeff, double capacity_units) {
    const double a = demand.value_coeff;
    const double c = overhead_coeff;
    if (a <= 0) return std::nullopt;
    StackelbergSolution s;
    s.price = std::max(c, std::sqrt(c * a));
    ProviderOffer at{"", s.price, capacity_units, c};
    s.quantity = follower_best_response(at, demand);
    s.leader_profit = (s.price - c) * s.quantity;
    return s;
}

void close_reverse_auction(AuctionInstance& auction, double units_demanded,
                           SimTime now) {
    if (now < auction.close_at || auction.state != AuctionState::Open)
        return; // caller checks AuctionNotClosed; no-op keeps state machine safe

    std::vector<const BidMessage*> eligible;
    for (const auto& b : auction.bids) {
        if (b.ask_per_unit > auction.reserve_per_unit) continue;
        if (b.units_offered + 1e-9 < units_demanded) continue; // partials lose
        eligible.push_back(&b);
    }
    if (eligible.empty()) {
        auction.state = AuctionState::Failed;
        return;
    }
    auto better = [](const BidMessage* l, const BidMessage* r) {
        if (l->ask_per_unit != r->ask_per_unit)
            return l->ask_per_unit < r->ask_per_unit;
        if (l->submitted_at != r->submitted_at)
            return l->submitted_at < r->submitted_at;
        return l->bidder < r->bidder;
    };
    std::sort(eligible.begin(), eligible.end(), better);

    const BidMessage* win = eligible.front();
    auction.winner = win->bidder;
    if (auction.rule == AuctionRule::FirstPrice) {
        auction.price_per_unit = win->ask_per_unit;
    } else {
        auction.price_per_unit = eligible.size() > 1
                                     ? eligible[1]->ask_per_unit
                                     : auction.reserve_per_unit;
    }
    auction.state = AuctionState::Awarded;
}

DoubleAuctionResult clear_double_auction(std::vector<DoubleAuctionOrder> bids,
                                         std::vector<DoubleAuctionOrder> asks) {
    DoubleAuctionResult r;
    std::stable_sort(bids.begin(), bids.end(), [](const auto& l, const auto& r_) {
        if (l.price != r_.price) return l.price > r_.price;
        return l.trader < r_.trader;
    });
    std::stable_sort(asks.begin(), asks.end(), [](const auto& l, const auto& r_) {
        if (l.price != r_.price) return l.price < r_.price;
        return l.trader < r_.trader;
    });

    const size_t n = std::min(bids.size(), asks.size());
    size_t k = 0;
    while (k < n && bids[k].price >= asks[k].price) ++k;
    if (k == 0) return r;

    bool can_uniform = false;
    double p0 = 0;
    if (k < n) {
        p0 = 0.5 * (bids[k].price + asks[k].price);
        can_uniform = asks[k - 1].price <= p0 && p0 <= bids[k - 1].price;
    }
    if (can_uniform) {
        r.uniform_price = true;
        r.clearing_price = p0;
        for (size_t i = 0; i < k; ++i)
            r.trades.push_back({bids[i].trader, asks[i].trader, p0, p0});
    } else {
        // trade k-1 pairs; buyers pay b_k, sellers receive a_k
        const double pay = bids[k - 1].price;
        const double recv = asks[k - 1].price;
        for (size_t i = 0; i + 1 < k; ++i) {
            r.trades.push_back({bids[i].trader, asks[i].trader, pay, recv});
            r.surplus += pay - recv;
        }
    }
    return r;
}

} // namespace lacnet
