#pragma once

// Shared fixtures: hand-scripted auction histories with known rating
// behaviour, the example bid tables, and the six-seller participation
// layout used by the collusion golden tests.

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "shillscore/shillscore.hpp"

namespace support {

using namespace shillscore;

struct ScriptedBid {
    BidderId bidder;
    Seconds offset;
    Money amount;
};

inline Auction make_auction(const AuctionId& id, const SellerId& seller, Seconds start,
                            Seconds duration, Money inc, const std::vector<ScriptedBid>& script) {
    Auction a;
    a.auction_id = id;
    a.seller_id = seller;
    a.start_time = start;
    a.end_time = start + duration;
    a.min_increment = inc;
    int n = 0;
    for (const ScriptedBid& sb : script) a.bids.push_back({++n, sb.bidder, sb.offset, sb.amount});
    validate_auction(a);
    return a;
}

inline Dataset make_dataset(std::vector<SellerId> sellers, std::vector<BidderId> bidders,
                            std::vector<Auction> auctions) {
    Dataset ds;
    ds.sellers = std::move(sellers);
    ds.bidders = std::move(bidders);
    ds.auctions = std::move(auctions);
    canonicalize(ds);
    validate_dataset(ds);
    return ds;
}

// The 15-bid example auction: b2 shills against b1 and b3, minimal raises
// within seconds, stops well before the end, b1 wins at $33.
inline std::vector<ScriptedBid> table1_script() {
    return {
        {"b1", 5, 100},    {"b2", 6, 200},    {"b3", 19, 500},   {"b2", 20, 600},
        {"b3", 45, 800},   {"b2", 47, 900},   {"b1", 65, 1400},  {"b2", 67, 1500},
        {"b3", 165, 2000}, {"b2", 167, 2100}, {"b1", 302, 2500}, {"b2", 305, 2600},
        {"b1", 762, 3100}, {"b2", 764, 3200}, {"b1", 1203, 3300},
    };
}

inline constexpr Seconds kTable1Start = 1'700'000'000;
inline constexpr Seconds kTable1Duration = 1260;  // 21:00

inline Dataset table1_dataset() {
    return make_dataset({"s1"}, {"b1", "b2", "b3"},
                        {make_auction("t1a1", "s1", kTable1Start, kTable1Duration, 100,
                                      table1_script())});
}

// Same shape with two alternating shills (b2, b3); b1 wins at $35.
inline Auction table2_auction() {
    return make_auction("t2a1", "s1", kTable1Start, kTable1Duration, 100,
                        {
                            {"b1", 5, 100},    {"b2", 6, 200},    {"b1", 19, 500},
                            {"b3", 20, 600},   {"b1", 45, 800},   {"b2", 47, 900},
                            {"b1", 65, 1400},  {"b3", 67, 1500},  {"b1", 165, 2000},
                            {"b2", 167, 2100}, {"b1", 302, 2500}, {"b3", 305, 2600},
                            {"b1", 762, 3100}, {"b2", 764, 3200}, {"b1", 1203, 3500},
                        });
}

// ---------------------------------------------------------------------------
// Worked six-seller example. Participation counts per bidder:
//   b1: s1=3  s2=40 s3=30 s4=2
//   b2: s3=2  s4=43 s5=25 s6=30
//   b3: s2=16 s3=18 s5=5
// A filler bidder ("crowd") appears and wins everywhere. The scripted
// patterns pin each pair's modified score on the right side of the prune
// threshold: shill-like responders land near 8.5, casual bidders near 3.3.
// ---------------------------------------------------------------------------

namespace patterns {

constexpr Seconds kDuration = 1000;
constexpr Money kInc = 100;
const BidderId kFiller = "crowd";

// Filler trades against one fast minimal responder; optional late casual.
inline std::vector<ScriptedBid> shill_like(const BidderId& t, const BidderId& casual = "") {
    std::vector<ScriptedBid> s = {
        {kFiller, 10, 100}, {t, 12, 200},  {kFiller, 100, 300}, {t, 102, 400},
        {kFiller, 200, 500}, {t, 203, 600}, {kFiller, 300, 700},
    };
    if (!casual.empty()) {
        s.push_back({casual, 900, 1700});
        s.push_back({kFiller, 950, 1800});
    }
    return s;
}

// Two fast responders taking turns; optional late casual.
inline std::vector<ScriptedBid> shill_like_pair(const BidderId& t1, const BidderId& t2,
                                                const BidderId& casual = "") {
    std::vector<ScriptedBid> s = {
        {kFiller, 10, 100},  {t1, 12, 200},  {kFiller, 100, 300}, {t2, 102, 400},
        {kFiller, 200, 500}, {t1, 202, 600}, {kFiller, 300, 700}, {t2, 303, 800},
        {kFiller, 400, 900},
    };
    if (!casual.empty()) {
        s.push_back({casual, 900, 1900});
        s.push_back({kFiller, 950, 2000});
    }
    return s;
}

// One slow large-jump bid deep into the auction.
inline std::vector<ScriptedBid> casual_response(const BidderId& c) {
    return {{kFiller, 10, 100}, {c, 900, 1100}, {kFiller, 950, 1200}};
}

// The casual bidder opens late instead of responding.
inline std::vector<ScriptedBid> casual_open(const BidderId& c) {
    return {{c, 850, 1000}, {kFiller, 900, 1100}};
}

// Late opener plus a second casual answering right after.
inline std::vector<ScriptedBid> casual_open_pair(const BidderId& c1, const BidderId& c2) {
    return {{c1, 850, 1000}, {c2, 855, 1100}, {kFiller, 900, 1200}};
}

// Mid-auction opener, then a very late second casual.
inline std::vector<ScriptedBid> open_then_late(const BidderId& opener, const BidderId& late) {
    return {{opener, 500, 1000}, {kFiller, 510, 1100}, {late, 990, 2100}, {kFiller, 995, 2200}};
}

}  // namespace patterns

inline Dataset worked_example_dataset() {
    using namespace patterns;
    std::vector<Auction> auctions;
    Seconds start = 1'700'000'000;
    auto add = [&](const SellerId& seller, int index, const std::vector<ScriptedBid>& script) {
        std::string digits = std::to_string(index);
        while (digits.size() < 2) digits.insert(digits.begin(), '0');
        auctions.push_back(
            make_auction(seller + "_" + digits, seller, start, kDuration, kInc, script));
        start += 2000;
    };

    for (int i = 0; i < 3; ++i) add("s1", i, casual_response("b1"));
    for (int i = 0; i < 40; ++i) add("s2", i, shill_like("b1", i < 16 ? "b3" : ""));
    for (int i = 0; i < 30; ++i) {
        if (i < 18) add("s3", i, shill_like_pair("b1", "b3"));
        else if (i < 20) add("s3", i, shill_like("b1", "b2"));
        else add("s3", i, shill_like("b1"));
    }
    for (int i = 0; i < 43; ++i)
        add("s4", i, i < 2 ? open_then_late("b1", "b2") : casual_open("b2"));
    for (int i = 0; i < 25; ++i)
        add("s5", i, i < 5 ? casual_open_pair("b2", "b3") : casual_open("b2"));
    for (int i = 0; i < 30; ++i) add("s6", i, casual_open("b2"));

    return make_dataset({"s1", "s2", "s3", "s4", "s5", "s6"}, {"b1", "b2", "b3", kFiller},
                        std::move(auctions));
}

// Random legal bid history, short enough to check by hand-enumeration.
inline Auction random_small_auction(std::mt19937_64& gen, const AuctionId& id,
                                    const SellerId& seller, const std::vector<BidderId>& pool,
                                    int max_bids) {
    const Seconds duration = 600 + static_cast<Seconds>(gen() % 3600);
    const Money inc = static_cast<Money>(gen() % 300);  // zero increments are legal
    const int n = static_cast<int>(gen() % (max_bids + 1));

    std::vector<Seconds> times;
    for (int i = 0; i < n; ++i) times.push_back(static_cast<Seconds>(gen() % (duration + 1)));
    std::sort(times.begin(), times.end());

    std::vector<ScriptedBid> script;
    Money amount = std::max<Money>(inc, 1) + static_cast<Money>(gen() % 500);
    for (int i = 0; i < n; ++i) {
        script.push_back({pool[gen() % pool.size()], times[i], amount});
        amount += std::max<Money>(inc, 1) + static_cast<Money>(gen() % 400);
    }
    return make_auction(id, seller, 1'000'000 + static_cast<Seconds>(gen() % 1000) * 10'000,
                        duration, inc, script);
}

// Scratch directory that cleans up after itself.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::mt19937_64 gen(std::random_device{}());
        path_ = std::filesystem::temp_directory_path() /
                (tag + "_" + std::to_string(gen()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path file(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

}  // namespace support
