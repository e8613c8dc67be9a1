#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "shillscore/auction.hpp"
#include "shillscore/errors.hpp"
#include "shillscore/rng.hpp"

namespace shillscore {

// Zero-intelligence bidder population. Each agent draws a private limit per
// auction, wakes at scheduled times and, when not leading, bids the minimum
// raise plus a random jump, capped at its limit.
struct ZiAgentSpec {
    Money limit_min = 0;
    Money limit_max = 0;
    double activity_rate = 1.0;  // expected bids per auction duration
    Money jump_min = 0;
    Money jump_max = 0;
};

// The aggressive shill. It never opens bidding and never raises its own bid;
// while it is not leading it answers each rival bid after a short delay with
// exactly the minimum increment, but only while the clock is before
// stop_time_fraction of the duration and the raised amount stays below
// stop_price_fraction of the item's reference value.
struct ShillAgentSpec {
    Seconds response_delay_min = 30;
    Seconds response_delay_max = 180;
    double stop_price_fraction = 0.8;
    double stop_time_fraction = 0.6;
};

enum class CollusionStrategy { none, alternating_even, alternating_uneven };

struct CollusionScenario {
    std::vector<SellerId> colluding_sellers;
    int auctions_per_seller = 0;
    BidderId shill_bidder;
    CollusionStrategy strategy = CollusionStrategy::none;
    double shill_fraction = 0.5;  // alternating_even: share of each seller's auctions
    // alternating_uneven only: one entry per colluding seller. Counts may be
    // left empty to fall back to auctions_per_seller.
    std::vector<double> uneven_fractions;
    std::vector<int> uneven_auction_counts;
};

struct SimConfig {
    std::uint64_t seed = 0;
    int honest_sellers = 0;
    int honest_bidders = 0;
    ZiAgentSpec zi_spec;
    ShillAgentSpec shill_spec;
    CollusionScenario scenario;
    Seconds auction_duration = 3600;
    Money min_increment = 100;
    Money reference_value_min = 0;
    Money reference_value_max = 0;
};

// Which of each colluding seller's auction slots carry the shill.
struct ShillSchedule {
    std::map<SellerId, std::vector<bool>> shilled;

    int shilled_count(const SellerId& s) const {
        auto it = shilled.find(s);
        if (it == shilled.end()) return 0;
        int n = 0;
        for (bool b : it->second) n += b ? 1 : 0;
        return n;
    }
};

inline void validate_scenario(const CollusionScenario& sc) {
    if (sc.strategy == CollusionStrategy::none) return;
    if (sc.colluding_sellers.size() < 2)
        throw InvalidScenario("a collusion strategy needs at least two colluding sellers");
    if (sc.shill_bidder.empty())
        throw InvalidScenario("a collusion strategy needs a shill bidder id");
    if (sc.strategy == CollusionStrategy::alternating_even) {
        if (sc.auctions_per_seller < 1)
            throw InvalidScenario("auctions_per_seller must be positive");
        if (!(sc.shill_fraction > 0.0 && sc.shill_fraction <= 1.0))
            throw InvalidScenario("shill_fraction must lie in (0,1]");
    } else {
        if (sc.uneven_fractions.size() != sc.colluding_sellers.size())
            throw InvalidScenario("uneven_fractions must list one fraction per colluding seller");
        for (double f : sc.uneven_fractions)
            if (!(f > 0.0 && f <= 1.0))
                throw InvalidScenario("uneven fractions must lie in (0,1]");
        if (sc.uneven_auction_counts.empty()) {
            if (sc.auctions_per_seller < 1)
                throw InvalidScenario("auctions_per_seller must be positive");
        } else {
            if (sc.uneven_auction_counts.size() != sc.colluding_sellers.size())
                throw InvalidScenario(
                    "uneven_auction_counts must list one count per colluding seller");
            for (int k : sc.uneven_auction_counts)
                if (k < 1) throw InvalidScenario("uneven auction counts must be positive");
        }
    }
}

inline void validate_config(const SimConfig& cfg) {
    constexpr Seconds kMaxDuration = 1'000'000'000;
    constexpr Money kMaxMoney = 1'000'000'000'000'000;
    if (cfg.honest_sellers < 0 || cfg.honest_bidders < 0)
        throw InvalidScenario("agent counts must be non-negative");
    if (cfg.auction_duration <= 0 || cfg.auction_duration > kMaxDuration)
        throw InvalidScenario("auction_duration is out of range");
    if (cfg.min_increment < 1) throw InvalidScenario("min_increment must be at least one cent");
    if (cfg.zi_spec.limit_min > cfg.zi_spec.limit_max || cfg.zi_spec.limit_min < 0 ||
        cfg.zi_spec.limit_max > kMaxMoney)
        throw InvalidScenario("zi limit_range is invalid");
    if (!(cfg.zi_spec.activity_rate > 0) || cfg.zi_spec.activity_rate > 10000)
        throw InvalidScenario("activity_rate must lie in (0, 10000]");
    if (cfg.zi_spec.jump_min < 0 || cfg.zi_spec.jump_min > cfg.zi_spec.jump_max ||
        cfg.zi_spec.jump_max > kMaxMoney)
        throw InvalidScenario("zi jump_range is invalid");
    if (cfg.shill_spec.response_delay_min < 1 ||
        cfg.shill_spec.response_delay_min > cfg.shill_spec.response_delay_max)
        throw InvalidScenario("shill response_delay_range is invalid");
    if (!(cfg.shill_spec.stop_price_fraction > 0 && cfg.shill_spec.stop_price_fraction <= 1))
        throw InvalidScenario("stop_price_fraction must lie in (0,1]");
    if (!(cfg.shill_spec.stop_time_fraction > 0 && cfg.shill_spec.stop_time_fraction < 1))
        throw InvalidScenario("stop_time_fraction must lie in (0,1)");
    if (cfg.reference_value_min < 0 || cfg.reference_value_min > cfg.reference_value_max ||
        cfg.reference_value_max > kMaxMoney)
        throw InvalidScenario("reference_value_range is invalid");
    const bool uneven_counts = cfg.scenario.strategy == CollusionStrategy::alternating_uneven &&
                               !cfg.scenario.uneven_auction_counts.empty();
    const bool needs_aps = cfg.honest_sellers > 0 ||
                           (!cfg.scenario.colluding_sellers.empty() && !uneven_counts);
    if (needs_aps && cfg.scenario.auctions_per_seller < 1)
        throw InvalidScenario("auctions_per_seller must be positive");
    validate_scenario(cfg.scenario);
}

// Picks which auction slots receive the shill. In even mode every colluding
// seller gets round(shill_fraction * auctions_per_seller) shilled slots, so
// the per-seller counts are exactly equal; uneven mode applies per-seller
// fractions to per-seller counts. Slot positions are drawn from the seed.
inline ShillSchedule make_alternating_schedule(const CollusionScenario& sc, std::uint64_t seed) {
    if (sc.strategy == CollusionStrategy::none)
        throw InvalidScenario("no schedule exists for strategy none");
    validate_scenario(sc);
    ShillSchedule sched;
    for (std::size_t i = 0; i < sc.colluding_sellers.size(); ++i) {
        const bool uneven = sc.strategy == CollusionStrategy::alternating_uneven;
        const int k = uneven && !sc.uneven_auction_counts.empty() ? sc.uneven_auction_counts[i]
                                                                  : sc.auctions_per_seller;
        const double f = uneven ? sc.uneven_fractions[i] : sc.shill_fraction;
        int m = static_cast<int>(std::llround(f * k));
        m = std::clamp(m, 0, k);
        Rng rng(derive_stream_seed(seed, i));
        std::vector<int> slots(k);
        for (int j = 0; j < k; ++j) slots[j] = j;
        for (int j = 0; j < m; ++j) {
            const int pick = j + static_cast<int>(rng.uniform_int(0, k - 1 - j));
            std::swap(slots[j], slots[pick]);
        }
        std::vector<bool> flags(k, false);
        for (int j = 0; j < m; ++j) flags[slots[j]] = true;
        sched.shilled[sc.colluding_sellers[i]] = std::move(flags);
    }
    return sched;
}

struct AuctionSetup {
    AuctionId auction_id;
    SellerId seller_id;
    Seconds start_time = 0;
    Seconds duration = 0;
    Money min_increment = 0;
};

struct ShillRole {
    ShillAgentSpec spec;
    BidderId bidder;
};

// Event-driven auction on integer seconds. ZI wake times are jittered over
// an even grid so activity spans the whole duration, and one extra late wake
// in the final stretch goes to the highest-limit participant; that late bid
// is what guarantees the shill cannot buy its own item as long as some limit
// clears the shill's price cap by at least one increment. Ties at the same
// second resolve by agent index (the shill orders after all ZI agents), then
// insertion order. Everything is drawn from the supplied stream, so equal
// seeds reproduce the auction bid for bid.
inline Auction simulate_auction(const AuctionSetup& setup, const std::vector<BidderId>& zi_bidders,
                                const ZiAgentSpec& zi, const std::optional<ShillRole>& shill,
                                Money reference_value, Rng& rng) {
    Auction a;
    a.auction_id = setup.auction_id;
    a.seller_id = setup.seller_id;
    a.start_time = setup.start_time;
    a.end_time = setup.start_time + setup.duration;
    a.min_increment = setup.min_increment;

    const Seconds T = setup.duration;
    const Money inc = setup.min_increment;

    enum class Kind { zi_wake, shill_response };
    struct Event {
        Seconds time;
        int priority;
        std::uint64_t seq;
        Kind kind;
        int agent;
    };
    auto later = [](const Event& x, const Event& y) {
        return std::tie(x.time, x.priority, x.seq) > std::tie(y.time, y.priority, y.seq);
    };
    std::priority_queue<Event, std::vector<Event>, decltype(later)> queue(later);
    std::uint64_t seq = 0;

    std::vector<Money> limits(zi_bidders.size(), 0);
    int sniper = -1;
    for (std::size_t i = 0; i < zi_bidders.size(); ++i) {
        limits[i] = rng.uniform_int(zi.limit_min, zi.limit_max);
        const double rate = zi.activity_rate;
        int wakes = static_cast<int>(rate);
        if (rng.bernoulli(rate - wakes)) ++wakes;
        for (int k = 0; k < wakes; ++k) {
            const Seconds lo = T * k / wakes;
            const Seconds hi = std::max(lo, T * (k + 1) / wakes - 1);
            queue.push({rng.uniform_int(lo, hi), static_cast<int>(i), seq++, Kind::zi_wake,
                        static_cast<int>(i)});
        }
        if (wakes > 0 && (sniper < 0 || limits[i] > limits[sniper])) sniper = static_cast<int>(i);
    }
    if (sniper >= 0) {
        double tail = 0.75;
        if (shill) tail = std::max(tail, shill->spec.stop_time_fraction);
        const Seconds lo = std::min(static_cast<Seconds>(tail * static_cast<double>(T)), T);
        queue.push({rng.uniform_int(lo, T), sniper, seq++, Kind::zi_wake, sniper});
    }

    const double stop_time = shill ? shill->spec.stop_time_fraction * static_cast<double>(T) : 0.0;
    const double price_cap =
        shill ? shill->spec.stop_price_fraction * static_cast<double>(reference_value) : 0.0;
    const int shill_priority = static_cast<int>(zi_bidders.size());

    Money current = 0;
    int leader_agent = -1;  // ZI index, or -2 for the shill
    auto place = [&](const BidderId& who, Seconds t, Money amount) {
        a.bids.push_back({static_cast<int>(a.bids.size()) + 1, who, t, amount});
        current = amount;
    };

    while (!queue.empty()) {
        const Event e = queue.top();
        queue.pop();
        if (e.kind == Kind::zi_wake) {
            if (leader_agent == e.agent) continue;
            const Money required = a.bids.empty() ? inc : current + inc;
            if (required > limits[e.agent]) continue;
            const Money jump = rng.uniform_int(zi.jump_min, zi.jump_max);
            place(zi_bidders[e.agent], e.time, std::min(required + jump, limits[e.agent]));
            leader_agent = e.agent;
            if (shill) {
                const Seconds delay =
                    rng.uniform_int(shill->spec.response_delay_min, shill->spec.response_delay_max);
                queue.push({e.time + delay, shill_priority, seq++, Kind::shill_response, -1});
            }
        } else {
            if (leader_agent == -2 || a.bids.empty()) continue;
            if (!(static_cast<double>(e.time) < stop_time)) continue;
            const Money amount = current + inc;
            if (!(static_cast<double>(amount) < price_cap)) continue;
            place(shill->bidder, e.time, amount);
            leader_agent = -2;
        }
    }
    return a;
}

namespace detail {

inline std::string padded_id(const std::string& prefix, int index, int width) {
    std::string digits = std::to_string(index);
    while (static_cast<int>(digits.size()) < width) digits.insert(digits.begin(), '0');
    return prefix + digits;
}

inline int id_width(int count) {
    int w = 1;
    for (int v = count; v >= 10; v /= 10) ++w;
    return std::max(w, 2);
}

}  // namespace detail

// Builds the full synthetic market: honest sellers get plain ZI traffic,
// colluding sellers get the shill on their scheduled slots. Auction k runs
// on substream k+1 of the seed (the schedule uses substream 0), so the
// output is a pure function of the config.
inline Dataset generate_dataset(const SimConfig& cfg) {
    validate_config(cfg);
    const CollusionScenario& sc = cfg.scenario;

    Dataset ds;
    std::vector<BidderId> zi_ids;
    const int bw = detail::id_width(cfg.honest_bidders);
    for (int i = 0; i < cfg.honest_bidders; ++i)
        zi_ids.push_back(detail::padded_id("bidder_", i + 1, bw));
    ds.bidders = zi_ids;
    if (!sc.shill_bidder.empty()) ds.bidders.push_back(sc.shill_bidder);

    const int sw = detail::id_width(cfg.honest_sellers);
    std::vector<SellerId> honest;
    for (int i = 0; i < cfg.honest_sellers; ++i)
        honest.push_back(detail::padded_id("seller_", i + 1, sw));
    ds.sellers = honest;

    // Configured ids may not collide with each other or the generated ones;
    // a silent merge would corrupt the participation statistics.
    std::set<std::string> taken(zi_ids.begin(), zi_ids.end());
    taken.insert(honest.begin(), honest.end());
    if (!sc.shill_bidder.empty() && !taken.insert(sc.shill_bidder).second)
        throw InvalidScenario("shill bidder id collides with a generated id: " + sc.shill_bidder);
    for (const SellerId& s : sc.colluding_sellers) {
        if (!taken.insert(s).second)
            throw InvalidScenario("colluding seller id is not unique: " + s);
        ds.sellers.push_back(s);
    }

    ShillSchedule schedule;
    if (sc.strategy != CollusionStrategy::none)
        schedule = make_alternating_schedule(sc, derive_stream_seed(cfg.seed, 0));

    constexpr Seconds kBaseStart = 1'600'000'000;
    const bool uneven_counts = sc.strategy == CollusionStrategy::alternating_uneven &&
                               !sc.uneven_auction_counts.empty();
    std::uint64_t g = 0;
    auto run_seller = [&](const SellerId& seller, int k, const std::vector<bool>* shilled) {
        const int aw = detail::id_width(k);
        for (int j = 0; j < k; ++j) {
            Rng rng(derive_stream_seed(cfg.seed, 1 + g));
            const Money ref = rng.uniform_int(cfg.reference_value_min, cfg.reference_value_max);
            std::optional<ShillRole> role;
            if (shilled && (*shilled)[j]) role = ShillRole{cfg.shill_spec, sc.shill_bidder};
            AuctionSetup setup{detail::padded_id(seller + "_a", j + 1, aw), seller,
                               kBaseStart + static_cast<Seconds>(g) * (cfg.auction_duration + 60),
                               cfg.auction_duration, cfg.min_increment};
            ds.auctions.push_back(simulate_auction(setup, zi_ids, cfg.zi_spec, role, ref, rng));
            ++g;
        }
    };

    for (const SellerId& s : honest) run_seller(s, sc.auctions_per_seller, nullptr);
    for (std::size_t i = 0; i < sc.colluding_sellers.size(); ++i) {
        const SellerId& s = sc.colluding_sellers[i];
        const int k = uneven_counts ? sc.uneven_auction_counts[i] : sc.auctions_per_seller;
        const std::vector<bool>* flags = nullptr;
        if (sc.strategy != CollusionStrategy::none) flags = &schedule.shilled.at(s);
        run_seller(s, k, flags);
    }

    canonicalize(ds);
    validate_dataset(ds);
    return ds;
}

}  // namespace shillscore
