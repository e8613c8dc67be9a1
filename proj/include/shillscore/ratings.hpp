#pragma once

#include <algorithm>
#include <cmath>
#include <functional>

#include "shillscore/auction.hpp"
#include "shillscore/errors.hpp"

namespace shillscore {

// The six behavioural ratings for a (bidder, seller) pair, each in [0, 1].
// Higher values are more suspicious:
//   alpha   share of the seller's auctions the bidder entered (and lost)
//   beta    share of bids the bidder placed in the auctions it entered
//   gamma   share of entered auctions the bidder lost
//   delta   how quickly the bidder responds to a rival bid
//   epsilon how close the bidder's raises are to the minimum increment
//   zeta    how early the bidder starts bidding
struct RatingVector {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double delta = 0.0;
    double epsilon = 0.0;
    double zeta = 0.0;

    friend bool operator==(const RatingVector&, const RatingVector&) = default;
};

struct Weights {
    double w1 = 1.0;
    double w2 = 1.0;
    double w3 = 1.0;
    double w4 = 1.0;
    double w5 = 1.0;
    double w6 = 1.0;

    double sum() const { return w1 + w2 + w3 + w4 + w5 + w6; }

    void validate() const {
        if (w1 <= 0 || w2 <= 0 || w3 <= 0 || w4 <= 0 || w5 <= 0 || w6 <= 0)
            throw DomainError("weights must all be positive");
    }
};

struct ScoreConfig {
    Weights weights;
    double mss_prune_threshold = 4.0;
    double median_band = 0.5;
    double min_omega_prime = 0.01;
    bool clamp_scores = true;

    void validate() const {
        weights.validate();
        if (mss_prune_threshold < 0 || mss_prune_threshold > 10)
            throw DomainError("mss_prune_threshold must lie in [0,10]");
        if (median_band <= 0) throw DomainError("median_band must be positive");
        if (min_omega_prime <= 0 || min_omega_prime > 1)
            throw DomainError("min_omega_prime must lie in (0,1]");
    }
};

namespace detail {

inline double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace detail

// Rates one bidder over one seller's auctions. Won auctions contribute zero
// to alpha, beta, delta, epsilon and zeta; gamma is the loss fraction and is
// not zeroed on a win. A "responding" bid is one immediately preceded by a
// different bidder's bid; delta and epsilon average only over those.
// Auctions where the bidder never bid count toward k but nothing else.
inline RatingVector compute_ratings(const Dataset& ds, const BidderId& bidder,
                                    const SellerId& seller) {
    if (std::find(ds.bidders.begin(), ds.bidders.end(), bidder) == ds.bidders.end())
        throw UnknownBidder("unknown bidder: " + bidder);
    if (std::find(ds.sellers.begin(), ds.sellers.end(), seller) == ds.sellers.end())
        throw UnknownSeller("unknown seller: " + seller);

    int k = 0;
    int participated = 0;
    int won = 0;
    double beta_sum = 0.0;
    double delta_sum = 0.0;
    double epsilon_sum = 0.0;
    double zeta_sum = 0.0;

    for (const Auction& a : ds.auctions) {
        if (a.seller_id != seller) continue;
        ++k;

        int mine = 0;
        Seconds first_time = -1;
        int responding = 0;
        double gap_sum = 0.0;
        double ratio_sum = 0.0;
        for (std::size_t i = 0; i < a.bids.size(); ++i) {
            const Bid& b = a.bids[i];
            if (b.bidder_id != bidder) continue;
            ++mine;
            if (first_time < 0) first_time = b.time;
            if (i > 0 && a.bids[i - 1].bidder_id != bidder) {
                ++responding;
                gap_sum += static_cast<double>(b.time - a.bids[i - 1].time);
                ratio_sum += static_cast<double>(a.min_increment) /
                             static_cast<double>(b.amount - a.bids[i - 1].amount);
            }
        }
        if (mine == 0) continue;
        ++participated;
        if (a.bids.back().bidder_id == bidder) {
            ++won;
            continue;  // won auctions contribute 0 everywhere but gamma
        }
        const double T = static_cast<double>(a.duration());
        beta_sum += static_cast<double>(mine) / static_cast<double>(a.bids.size());
        if (responding > 0) {
            delta_sum += 1.0 - (gap_sum / responding) / T;
            epsilon_sum += ratio_sum / responding;
        }
        zeta_sum += 1.0 - static_cast<double>(first_time) / T;
    }

    RatingVector r;
    if (k > 0) r.alpha = static_cast<double>(participated - won) / k;
    if (participated > 0) {
        r.beta = beta_sum / participated;
        r.gamma = static_cast<double>(participated - won) / participated;
        r.delta = delta_sum / participated;
        r.epsilon = epsilon_sum / participated;
        r.zeta = zeta_sum / participated;
    }
    r.alpha = detail::clamp01(r.alpha);
    r.beta = detail::clamp01(r.beta);
    r.gamma = detail::clamp01(r.gamma);
    r.delta = detail::clamp01(r.delta);
    r.epsilon = detail::clamp01(r.epsilon);
    r.zeta = detail::clamp01(r.zeta);
    return r;
}

// The collusion pipeline takes the rating definition as a parameter so
// alternative formulas can be swapped in without touching it;
// compute_ratings is the default.
using RatingFunction =
    std::function<RatingVector(const Dataset&, const BidderId&, const SellerId&)>;

// Weighted average of all six ratings, scaled to [0, 10].
inline double shill_score(const RatingVector& r, const Weights& w) {
    w.validate();
    const double num = w.w1 * r.alpha + w.w2 * r.beta + w.w3 * r.gamma + w.w4 * r.delta +
                       w.w5 * r.epsilon + w.w6 * r.zeta;
    return num / w.sum() * 10.0;
}

// The score with alpha removed entirely; immune to participation spreading.
inline double modified_shill_score(const RatingVector& r, const Weights& w) {
    w.validate();
    const double num = w.w2 * r.beta + w.w3 * r.gamma + w.w4 * r.delta + w.w5 * r.epsilon +
                       w.w6 * r.zeta;
    return num / (w.w2 + w.w3 + w.w4 + w.w5 + w.w6) * 10.0;
}

// Recalculates the score with alpha's weight boosted by 1/omega1', where
// omega1' = 1 - mss/10 floored at min_omega_prime. The result dominates the
// plain score and is clamped back to [0, 10] unless clamping is disabled.
inline double adjusted_shill_score(const RatingVector& r, const Weights& w, double mss,
                                   const ScoreConfig& cfg) {
    w.validate();
    if (!(mss >= 0.0 && mss <= 10.0)) throw DomainError("mss must lie in [0,10]");
    const double omega1_prime = std::max(1.0 - mss / 10.0, cfg.min_omega_prime);
    const double num = (w.w1 / omega1_prime) * r.alpha + w.w2 * r.beta + w.w3 * r.gamma +
                       w.w4 * r.delta + w.w5 * r.epsilon + w.w6 * r.zeta;
    double score = num / w.sum() * 10.0;
    if (cfg.clamp_scores) score = std::clamp(score, 0.0, 10.0);
    return score;
}

}  // namespace shillscore
