#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "shillscore/auction.hpp"
#include "shillscore/errors.hpp"
#include "shillscore/ratings.hpp"

namespace shillscore {

// Per-bidder graph over the sellers the bidder has dealt with. Vertices are
// weighted by participation counts and the graph is complete over its
// vertices. Edge weights come from the sign comparison against the mean
// vertex weight and land in {-1, 1/3, 3}; an edge is strong exactly when
// both deviations are positive (a zero deviation counts as positive).
struct SagEdge {
    SellerId a;  // a < b
    SellerId b;
    std::optional<double> weight;
    bool strong = false;

    friend bool operator==(const SagEdge&, const SagEdge&) = default;
};

struct SellerAssociationGraph {
    BidderId bidder;
    std::map<SellerId, int> vertices;  // seller -> participation count
    std::vector<SagEdge> edges;        // sorted by (a, b)

    friend bool operator==(const SellerAssociationGraph&, const SellerAssociationGraph&) = default;
};

struct SbagVertex {
    std::optional<double> mss;
    std::optional<double> adjusted_score;

    friend bool operator==(const SbagVertex&, const SbagVertex&) = default;
};

// The suspect-seller subgraph: vertices incident to at least one strong SAG
// edge, later annotated with per-seller modified scores. Never holds exactly
// one seller after filtering; a lone suspect is discarded.
struct ShillBiddingAssociationGraph {
    BidderId bidder;
    std::map<SellerId, SbagVertex> vertices;
    std::vector<std::pair<SellerId, SellerId>> edges;

    bool empty() const { return vertices.empty(); }

    friend bool operator==(const ShillBiddingAssociationGraph&,
                           const ShillBiddingAssociationGraph&) = default;
};

enum class Verdict { no_evidence, collusion_detected };

inline const char* to_string(Verdict v) {
    return v == Verdict::collusion_detected ? "collusion_detected" : "no_evidence";
}

struct SellerFinding {
    double mss = 0.0;
    double shill_score = 0.0;
    double adjusted_score = 0.0;

    friend bool operator==(const SellerFinding&, const SellerFinding&) = default;
};

// Full pipeline output for one bidder, with every intermediate stage kept so
// reports and graph exports can show the whole derivation.
struct CollusionReport {
    BidderId bidder;
    SellerAssociationGraph sag;           // stage 1: vertices + complete edges
    SellerAssociationGraph sag_weighted;  // stage 2: edge weights attached
    ShillBiddingAssociationGraph sbag;    // stage 3: strong clique with MSS
    ShillBiddingAssociationGraph sbag_final;  // stage 4: after both filters
    std::map<SellerId, SellerFinding> final;
    Verdict verdict = Verdict::no_evidence;
};

inline SellerAssociationGraph build_sag(const ParticipationMatrix& pm, const BidderId& bidder) {
    if (!pm.bidders.count(bidder)) throw UnknownBidder("unknown bidder: " + bidder);
    SellerAssociationGraph g;
    g.bidder = bidder;
    for (const auto& [seller, n] : pm.sellers_of(bidder)) {
        if (n >= 1) g.vertices[seller] = n;
    }
    for (auto it = g.vertices.begin(); it != g.vertices.end(); ++it) {
        for (auto jt = std::next(it); jt != g.vertices.end(); ++jt) {
            g.edges.push_back({it->first, jt->first, std::nullopt, false});
        }
    }
    return g;
}

// Attaches the edge weighting. Deviations are compared in integer arithmetic
// (count * |V| vs total) so a count exactly equal to the mean is detected
// without float noise; that case takes the sign +1. Graphs with fewer than
// two vertices have no edges and are returned unchanged.
inline SellerAssociationGraph weight_edges(SellerAssociationGraph g) {
    if (g.vertices.size() < 2) return g;
    long long total = 0;
    for (const auto& [seller, n] : g.vertices) total += n;
    const long long m = static_cast<long long>(g.vertices.size());
    auto sign_of = [&](const SellerId& s) {
        const long long lhs = static_cast<long long>(g.vertices.at(s)) * m;
        return lhs < total ? -1.0 : 1.0;  // zero deviation is set to 1
    };
    for (SagEdge& e : g.edges) {
        const double sa = sign_of(e.a);
        const double sb = sign_of(e.b);
        e.weight = (sa + sb - 1.0) / (sa + sb + 1.0);
        e.strong = sa > 0 && sb > 0;
    }
    return g;
}

// Copies the strong clique into a fresh graph, dropping every vertex and
// edge weighting.
inline ShillBiddingAssociationGraph extract_sbag(const SellerAssociationGraph& g) {
    ShillBiddingAssociationGraph out;
    out.bidder = g.bidder;
    for (const SagEdge& e : g.edges) {
        if (!e.weight) throw DomainError("SAG edges must be weighted before extraction");
        if (!e.strong) continue;
        out.vertices[e.a];
        out.vertices[e.b];
        out.edges.emplace_back(e.a, e.b);
    }
    return out;
}

// Scores each suspect seller as though the bidder had dealt with that seller
// alone.
inline ShillBiddingAssociationGraph attach_mss(ShillBiddingAssociationGraph g, const Dataset& ds,
                                               const ScoreConfig& cfg,
                                               const RatingFunction& rate = compute_ratings) {
    for (auto& [seller, v] : g.vertices) {
        v.mss = modified_shill_score(rate(ds, g.bidder, seller), cfg.weights);
    }
    return g;
}

namespace detail {

inline void drop_dangling_edges(ShillBiddingAssociationGraph& g) {
    std::erase_if(g.edges, [&](const auto& e) {
        return !g.vertices.count(e.first) || !g.vertices.count(e.second);
    });
}

inline void discard_if_singleton(ShillBiddingAssociationGraph& g) {
    if (g.vertices.size() <= 1) {  // a seller cannot collude with herself
        g.vertices.clear();
        g.edges.clear();
    }
}

inline double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    return (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

inline double require_mss(const SbagVertex& v) {
    if (!v.mss) throw DomainError("SBAG vertex is missing its MSS");
    return *v.mss;
}

}  // namespace detail

// Removes sellers whose MSS sits strictly below the threshold; a vertex at
// exactly the threshold survives.
inline ShillBiddingAssociationGraph prune_low_mss(ShillBiddingAssociationGraph g,
                                                  const ScoreConfig& cfg) {
    std::erase_if(g.vertices, [&](const auto& kv) {
        return detail::require_mss(kv.second) < cfg.mss_prune_threshold;
    });
    detail::drop_dangling_edges(g);
    detail::discard_if_singleton(g);
    return g;
}

// Keeps sellers whose MSS lies within the inclusive band around the group
// median. Discarding changes the median, so the rule is applied until the
// surviving set is stable; a single application is otherwise not idempotent.
inline ShillBiddingAssociationGraph median_filter(ShillBiddingAssociationGraph g,
                                                  const ScoreConfig& cfg) {
    for (;;) {
        if (g.vertices.size() <= 1) {
            detail::discard_if_singleton(g);
            return g;
        }
        std::vector<double> values;
        values.reserve(g.vertices.size());
        for (const auto& [seller, v] : g.vertices) values.push_back(detail::require_mss(v));
        const double med = detail::median_of(values);
        const std::size_t before = g.vertices.size();
        std::erase_if(g.vertices, [&](const auto& kv) {
            const double v = *kv.second.mss;
            return v < med - cfg.median_band || v > med + cfg.median_band;
        });
        if (g.vertices.size() == before) {
            detail::drop_dangling_edges(g);
            return g;
        }
        detail::drop_dangling_edges(g);
    }
}

// Recalculates the surviving sellers' scores with the alpha weight scaled up
// by the collusion evidence. Fills the final map, the stage-4 graph and the
// verdict; the earlier stages are attached by run_seller_collusion.
inline CollusionReport adjust_and_rescore(const ShillBiddingAssociationGraph& g,
                                          const Dataset& ds, const ScoreConfig& cfg,
                                          const RatingFunction& rate = compute_ratings) {
    CollusionReport rep;
    rep.bidder = g.bidder;
    rep.sbag_final = g;
    for (const auto& [seller, v] : g.vertices) {
        const double mss = detail::require_mss(v);
        const RatingVector r = rate(ds, g.bidder, seller);
        SellerFinding f;
        f.mss = mss;
        f.shill_score = shill_score(r, cfg.weights);
        f.adjusted_score = adjusted_shill_score(r, cfg.weights, mss, cfg);
        rep.sbag_final.vertices[seller].adjusted_score = f.adjusted_score;
        rep.final[seller] = f;
    }
    rep.verdict = rep.final.empty() ? Verdict::no_evidence : Verdict::collusion_detected;
    return rep;
}

// Steps 1-6 in order: participation counts, association graph, edge
// weighting, strong-clique extraction, per-seller MSS, threshold prune,
// median band, rescore.
inline CollusionReport run_seller_collusion(const Dataset& ds, const ParticipationMatrix& pm,
                                            const BidderId& bidder, const ScoreConfig& cfg,
                                            const RatingFunction& rate = compute_ratings) {
    cfg.validate();
    const SellerAssociationGraph sag = build_sag(pm, bidder);
    const SellerAssociationGraph weighted = weight_edges(sag);
    ShillBiddingAssociationGraph sbag = attach_mss(extract_sbag(weighted), ds, cfg, rate);
    const ShillBiddingAssociationGraph filtered =
        median_filter(prune_low_mss(sbag, cfg), cfg);
    CollusionReport rep = adjust_and_rescore(filtered, ds, cfg, rate);
    rep.sag = sag;
    rep.sag_weighted = weighted;
    rep.sbag = std::move(sbag);
    return rep;
}

inline CollusionReport run_seller_collusion(const Dataset& ds, const BidderId& bidder,
                                            const ScoreConfig& cfg,
                                            const RatingFunction& rate = compute_ratings) {
    return run_seller_collusion(ds, participation_matrix(ds), bidder, cfg, rate);
}

}  // namespace shillscore
