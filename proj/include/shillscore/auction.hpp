#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "shillscore/errors.hpp"

namespace shillscore {

// Money is integer cents, timestamps are integer seconds. Bid times are
// stored as offsets from the auction start; dataset files carry absolute
// epoch seconds and the offset is derived on load.
using Money = std::int64_t;
using Seconds = std::int64_t;

using BidderId = std::string;
using SellerId = std::string;
using AuctionId = std::string;

struct Bid {
    int bid_number = 0;  // 1-based, contiguous within an auction
    BidderId bidder_id;
    Seconds time = 0;  // offset from auction start
    Money amount = 0;  // cents

    friend bool operator==(const Bid&, const Bid&) = default;
};

struct Auction {
    AuctionId auction_id;
    SellerId seller_id;
    Seconds start_time = 0;  // absolute epoch seconds
    Seconds end_time = 0;    // absolute epoch seconds
    Money min_increment = 0;
    std::vector<Bid> bids;  // ordered by bid_number

    Seconds duration() const { return end_time - start_time; }

    friend bool operator==(const Auction&, const Auction&) = default;
};

// A bid-history dataset. All members are kept in canonical (sorted) order so
// that value equality and serialized bytes are deterministic. Instances are
// immutable after construction by convention; every operation over them is a
// pure function, so sharing across threads is safe.
struct Dataset {
    std::vector<SellerId> sellers;
    std::vector<BidderId> bidders;
    std::vector<Auction> auctions;

    friend bool operator==(const Dataset&, const Dataset&) = default;
};

// Sorts sellers/bidders/auctions (and bids by bid_number) into the canonical
// order used for serialization and equality.
inline void canonicalize(Dataset& ds) {
    std::sort(ds.sellers.begin(), ds.sellers.end());
    std::sort(ds.bidders.begin(), ds.bidders.end());
    ds.sellers.erase(std::unique(ds.sellers.begin(), ds.sellers.end()), ds.sellers.end());
    ds.bidders.erase(std::unique(ds.bidders.begin(), ds.bidders.end()), ds.bidders.end());
    std::sort(ds.auctions.begin(), ds.auctions.end(),
              [](const Auction& a, const Auction& b) { return a.auction_id < b.auction_id; });
    for (auto& a : ds.auctions) {
        std::sort(a.bids.begin(), a.bids.end(),
                  [](const Bid& x, const Bid& y) { return x.bid_number < y.bid_number; });
    }
}

inline void validate_auction(const Auction& a) {
    auto fail = [&](const std::string& rule) {
        throw ValidationError("auction " + a.auction_id + ": " + rule);
    };
    if (a.end_time <= a.start_time) fail("end_time must exceed start_time");
    if (a.min_increment < 0) fail("min_increment must be non-negative");
    const Seconds T = a.duration();
    for (std::size_t i = 0; i < a.bids.size(); ++i) {
        const Bid& b = a.bids[i];
        if (b.bid_number != static_cast<int>(i) + 1)
            fail("bid numbers must start at 1 and be contiguous");
        if (b.amount < 0) fail("bid amounts must be non-negative");
        if (b.time < 0 || b.time > T) fail("bid times must fall within the auction window");
        if (b.bidder_id == a.seller_id) fail("seller cannot bid in its own auction");
        if (i > 0) {
            const Bid& prev = a.bids[i - 1];
            if (b.amount <= prev.amount) fail("amounts strictly increase");
            if (b.amount < prev.amount + a.min_increment)
                fail("amounts must rise by at least min_increment");
            if (b.time < prev.time) fail("bid times must not decrease");
        }
    }
}

inline void validate_dataset(const Dataset& ds) {
    const std::set<SellerId> sellers(ds.sellers.begin(), ds.sellers.end());
    const std::set<BidderId> bidders(ds.bidders.begin(), ds.bidders.end());
    std::set<AuctionId> seen;
    for (const Auction& a : ds.auctions) {
        validate_auction(a);
        if (!seen.insert(a.auction_id).second)
            throw ValidationError("auction " + a.auction_id + ": duplicate auction id");
        if (!sellers.count(a.seller_id))
            throw ValidationError("auction " + a.auction_id + ": seller " + a.seller_id +
                                  " not in sellers");
        for (const Bid& b : a.bids) {
            if (!bidders.count(b.bidder_id))
                throw ValidationError("auction " + a.auction_id + ": bidder " + b.bidder_id +
                                      " not in bidders");
        }
    }
}

// The winner is the bidder holding the last (highest) bid; empty histories
// have no winner.
inline std::optional<BidderId> winner_of(const Auction& a) {
    if (a.bids.empty()) return std::nullopt;
    return a.bids.back().bidder_id;
}

// Per (bidder, seller) auction participation. counts[b][s] counts the
// seller's auctions in which the bidder placed at least one bid, never the
// number of bids. per_seller_totals includes auctions with no bids at all.
struct ParticipationMatrix {
    std::map<BidderId, std::map<SellerId, int>> counts;  // nonzero entries only
    std::map<SellerId, int> per_seller_totals;
    std::set<BidderId> bidders;  // every dataset bidder, bidding or not

    int count(const BidderId& b, const SellerId& s) const {
        auto it = counts.find(b);
        if (it == counts.end()) return 0;
        auto jt = it->second.find(s);
        return jt == it->second.end() ? 0 : jt->second;
    }

    const std::map<SellerId, int>& sellers_of(const BidderId& b) const {
        static const std::map<SellerId, int> empty;
        auto it = counts.find(b);
        return it == counts.end() ? empty : it->second;
    }
};

inline ParticipationMatrix participation_matrix(const Dataset& ds) {
    ParticipationMatrix pm;
    pm.bidders.insert(ds.bidders.begin(), ds.bidders.end());
    for (const SellerId& s : ds.sellers) pm.per_seller_totals[s] = 0;
    for (const Auction& a : ds.auctions) {
        pm.per_seller_totals[a.seller_id] += 1;
        std::set<BidderId> seen;
        for (const Bid& b : a.bids) {
            if (seen.insert(b.bidder_id).second) pm.counts[b.bidder_id][a.seller_id] += 1;
        }
    }
    return pm;
}

}  // namespace shillscore
