#pragma once

#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "shillscore/collusion.hpp"
#include "shillscore/dataset_io.hpp"
#include "shillscore/errors.hpp"
#include "shillscore/ratings.hpp"
#include "shillscore/version.hpp"

namespace shillscore {

// All floating-point output is fixed to four decimals so goldens diff
// cleanly.
inline std::string fmt4(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

inline double round4(double v) { return std::round(v * 1e4) / 1e4; }

inline std::string fnv1a64_hex(std::string_view bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline std::string sanitize_for_filename(const std::string& id) {
    std::string out;
    for (char c : id) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '_' || c == '-';
        out += ok ? c : '_';
    }
    return out.empty() ? std::string("_") : out;
}

inline const char* kScoresCsvHeader =
    "bidder_id,seller_id,alpha,beta,gamma,delta,epsilon,zeta,shill_score,mss,adjusted_score";

// One row per (bidder, seller) pair the bidder actually dealt with, sorted
// by (bidder_id, seller_id). The adjusted column here evaluates the rescale
// at the pair's own MSS; the pipeline-selected values live in the detect
// reports.
inline std::string write_scores_csv(const Dataset& ds, const ScoreConfig& cfg) {
    cfg.validate();
    const ParticipationMatrix pm = participation_matrix(ds);
    std::string out = kScoresCsvHeader;
    out += '\n';
    for (const BidderId& b : ds.bidders) {
        for (const auto& [seller, n] : pm.sellers_of(b)) {
            if (n < 1) continue;
            const RatingVector r = compute_ratings(ds, b, seller);
            const double plain = shill_score(r, cfg.weights);
            const double mss = modified_shill_score(r, cfg.weights);
            const double adjusted = adjusted_shill_score(r, cfg.weights, mss, cfg);
            out += detail::csv_quote(b) + "," + detail::csv_quote(seller) + "," + fmt4(r.alpha) +
                   "," + fmt4(r.beta) + "," + fmt4(r.gamma) + "," + fmt4(r.delta) + "," +
                   fmt4(r.epsilon) + "," + fmt4(r.zeta) + "," + fmt4(plain) + "," + fmt4(mss) +
                   "," + fmt4(adjusted) + "\n";
        }
    }
    return out;
}

namespace detail {

inline nlohmann::json sag_to_json(const SellerAssociationGraph& g, bool weighted) {
    nlohmann::json vertices = nlohmann::json::object();
    for (const auto& [seller, n] : g.vertices) vertices[seller] = n;
    nlohmann::json edges = nlohmann::json::array();
    for (const SagEdge& e : g.edges) {
        if (weighted) {
            nlohmann::json je;
            je["a"] = e.a;
            je["b"] = e.b;
            je["weight"] = e.weight ? round4(*e.weight) : 0.0;
            je["strong"] = e.strong;
            edges.push_back(std::move(je));
        } else {
            edges.push_back(nlohmann::json::array({e.a, e.b}));
        }
    }
    return {{"vertices", std::move(vertices)}, {"edges", std::move(edges)}};
}

inline nlohmann::json sbag_to_json(const ShillBiddingAssociationGraph& g, bool with_adjusted) {
    nlohmann::json vertices = nlohmann::json::object();
    for (const auto& [seller, v] : g.vertices) {
        if (with_adjusted) {
            nlohmann::json jv;
            jv["mss"] = v.mss ? round4(*v.mss) : 0.0;
            if (v.adjusted_score) jv["adjusted_score"] = round4(*v.adjusted_score);
            vertices[seller] = std::move(jv);
        } else {
            vertices[seller] = v.mss ? round4(*v.mss) : 0.0;
        }
    }
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& [a, b] : g.edges) edges.push_back(nlohmann::json::array({a, b}));
    return {{"vertices", std::move(vertices)}, {"edges", std::move(edges)}};
}

}  // namespace detail

inline nlohmann::json collusion_report_to_json(const CollusionReport& rep) {
    nlohmann::json finals = nlohmann::json::array();
    for (const auto& [seller, f] : rep.final) {
        finals.push_back({{"seller", seller},
                          {"mss", round4(f.mss)},
                          {"shill_score", round4(f.shill_score)},
                          {"adjusted_score", round4(f.adjusted_score)}});
    }
    nlohmann::json out;
    out["bidder"] = rep.bidder;
    out["verdict"] = to_string(rep.verdict);
    out["final"] = std::move(finals);
    out["stages"] = {{"sag", detail::sag_to_json(rep.sag, false)},
                     {"sag_weighted", detail::sag_to_json(rep.sag_weighted, true)},
                     {"sbag", detail::sbag_to_json(rep.sbag, false)},
                     {"sbag_final", detail::sbag_to_json(rep.sbag_final, true)}};
    return out;
}

inline std::string collusion_report_to_json_string(const CollusionReport& rep) {
    return collusion_report_to_json(rep).dump(2) + "\n";
}

// The slice of a stored report that downstream tabulation needs back.
struct StoredFinding {
    SellerId seller;
    double mss = 0.0;
    double shill_score = 0.0;
    double adjusted_score = 0.0;
};

struct StoredReport {
    BidderId bidder;
    std::string verdict;
    std::vector<StoredFinding> final;
};

inline StoredReport stored_report_from_json_string(const std::string& text,
                                                   const std::string& where) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(where + ": invalid JSON: " + e.what());
    }
    StoredReport rep;
    if (!root.is_object()) throw ParseError(where + ": top level must be an object");
    rep.bidder = detail::require_string(root, "bidder", where);
    rep.verdict = detail::require_string(root, "verdict", where);
    const nlohmann::json& finals = detail::require_field(root, "final", where);
    if (!finals.is_array()) throw ParseError(where + ": 'final' must be an array");
    for (const auto& jf : finals) {
        StoredFinding f;
        f.seller = detail::require_string(jf, "seller", where);
        f.mss = detail::require_number(jf, "mss", where);
        f.shill_score = detail::require_number(jf, "shill_score", where);
        f.adjusted_score = detail::require_number(jf, "adjusted_score", where);
        rep.final.push_back(std::move(f));
    }
    return rep;
}

inline const char* kSummaryCsvHeader = "bidder_id,verdict,sellers,min_mss,max_adjusted_score";

// One row per bidder. The sellers column lists the surviving sellers joined
// by ';' and is always quoted.
inline std::string write_summary_csv(const std::vector<CollusionReport>& reports) {
    std::string out = kSummaryCsvHeader;
    out += '\n';
    for (const CollusionReport& rep : reports) {
        std::string sellers;
        double min_mss = 0.0;
        double max_adj = 0.0;
        bool first = true;
        for (const auto& [seller, f] : rep.final) {
            if (!first) sellers += ';';
            sellers += seller;
            min_mss = first ? f.mss : std::min(min_mss, f.mss);
            max_adj = first ? f.adjusted_score : std::max(max_adj, f.adjusted_score);
            first = false;
        }
        out += detail::csv_quote(rep.bidder) + "," + to_string(rep.verdict) + ",\"" + sellers +
               "\"," + (first ? "" : fmt4(min_mss)) + "," + (first ? "" : fmt4(max_adj)) + "\n";
    }
    return out;
}

// Ties a run's outputs back to the exact configuration that produced them.
struct RunManifest {
    std::string tool_version = std::string(kToolVersion);
    std::string config_digest;
    std::uint64_t seed = 0;
    std::int64_t started_at = 0;
    std::int64_t finished_at = 0;
    std::vector<std::string> inputs;
    std::vector<std::pair<std::string, std::string>> outputs;  // path, digest
    nlohmann::json config;
};

inline nlohmann::json manifest_to_json(const RunManifest& m) {
    nlohmann::json outputs = nlohmann::json::array();
    for (const auto& [path, digest] : m.outputs)
        outputs.push_back({{"path", path}, {"digest", digest}});
    nlohmann::json out;
    out["tool_version"] = m.tool_version;
    out["config_digest"] = m.config_digest;
    out["seed"] = m.seed;
    out["started_at"] = m.started_at;
    out["finished_at"] = m.finished_at;
    out["inputs"] = m.inputs;
    out["outputs"] = std::move(outputs);
    out["config"] = m.config;
    return out;
}

inline std::string manifest_to_json_string(const RunManifest& m) {
    return manifest_to_json(m).dump(2) + "\n";
}

}  // namespace shillscore
