#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "shillscore/dataset_io.hpp"
#include "shillscore/errors.hpp"
#include "shillscore/ratings.hpp"
#include "shillscore/simulator.hpp"

namespace shillscore {

namespace detail {

inline double require_number(const nlohmann::json& o, const char* key, const std::string& where) {
    const nlohmann::json& v = require_field(o, key, where);
    if (!v.is_number()) throw ParseError(where + ": field '" + key + "' must be a number");
    return v.get<double>();
}

inline std::pair<std::int64_t, std::int64_t> require_range(const nlohmann::json& o,
                                                           const char* key,
                                                           const std::string& where) {
    const nlohmann::json& v = require_field(o, key, where);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer())
        throw ParseError(where + ": field '" + key + "' must be a [lo, hi] integer pair");
    return {v[0].get<std::int64_t>(), v[1].get<std::int64_t>()};
}

}  // namespace detail

inline const char* to_string(CollusionStrategy s) {
    switch (s) {
        case CollusionStrategy::alternating_even: return "alternating_even";
        case CollusionStrategy::alternating_uneven: return "alternating_uneven";
        default: return "none";
    }
}

inline CollusionStrategy strategy_from_string(const std::string& s, const std::string& where) {
    if (s == "none") return CollusionStrategy::none;
    if (s == "alternating_even") return CollusionStrategy::alternating_even;
    if (s == "alternating_uneven") return CollusionStrategy::alternating_uneven;
    throw ParseError(where + ": unknown strategy '" + s + "'");
}

inline nlohmann::json sim_config_to_json(const SimConfig& cfg) {
    nlohmann::json scenario;
    scenario["colluding_sellers"] = cfg.scenario.colluding_sellers;
    scenario["auctions_per_seller"] = cfg.scenario.auctions_per_seller;
    scenario["shill_bidder"] = cfg.scenario.shill_bidder;
    scenario["strategy"] = to_string(cfg.scenario.strategy);
    scenario["shill_fraction"] = cfg.scenario.shill_fraction;
    if (!cfg.scenario.uneven_fractions.empty())
        scenario["uneven_fractions"] = cfg.scenario.uneven_fractions;
    if (!cfg.scenario.uneven_auction_counts.empty())
        scenario["uneven_auction_counts"] = cfg.scenario.uneven_auction_counts;

    nlohmann::json out;
    out["seed"] = cfg.seed;
    out["honest_sellers"] = cfg.honest_sellers;
    out["honest_bidders"] = cfg.honest_bidders;
    out["zi_spec"] = {{"limit_range", {cfg.zi_spec.limit_min, cfg.zi_spec.limit_max}},
                      {"activity_rate", cfg.zi_spec.activity_rate},
                      {"jump_range", {cfg.zi_spec.jump_min, cfg.zi_spec.jump_max}}};
    out["shill_spec"] = {
        {"response_delay_range",
         {cfg.shill_spec.response_delay_min, cfg.shill_spec.response_delay_max}},
        {"stop_price_fraction", cfg.shill_spec.stop_price_fraction},
        {"stop_time_fraction", cfg.shill_spec.stop_time_fraction}};
    out["scenario"] = std::move(scenario);
    out["auction_duration"] = cfg.auction_duration;
    out["min_increment"] = cfg.min_increment;
    out["reference_value_range"] = {cfg.reference_value_min, cfg.reference_value_max};
    return out;
}

// Canonical config bytes; this is what run manifests digest.
inline std::string sim_config_to_json_string(const SimConfig& cfg) {
    return sim_config_to_json(cfg).dump(2) + "\n";
}

inline SimConfig sim_config_from_json(const nlohmann::json& root) {
    if (!root.is_object()) throw ParseError("sim config: top level must be an object");
    detail::reject_unknown_keys(root,
                                {"seed", "honest_sellers", "honest_bidders", "zi_spec",
                                 "shill_spec", "scenario", "auction_duration", "min_increment",
                                 "reference_value_range"},
                                "sim config");
    SimConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(detail::require_int(root, "seed", "sim config"));
    cfg.honest_sellers =
        static_cast<int>(detail::require_int(root, "honest_sellers", "sim config"));
    cfg.honest_bidders =
        static_cast<int>(detail::require_int(root, "honest_bidders", "sim config"));

    const nlohmann::json& zi = detail::require_field(root, "zi_spec", "sim config");
    detail::reject_unknown_keys(zi, {"limit_range", "activity_rate", "jump_range"}, "zi_spec");
    std::tie(cfg.zi_spec.limit_min, cfg.zi_spec.limit_max) =
        detail::require_range(zi, "limit_range", "zi_spec");
    cfg.zi_spec.activity_rate = detail::require_number(zi, "activity_rate", "zi_spec");
    std::tie(cfg.zi_spec.jump_min, cfg.zi_spec.jump_max) =
        detail::require_range(zi, "jump_range", "zi_spec");

    const nlohmann::json& sh = detail::require_field(root, "shill_spec", "sim config");
    detail::reject_unknown_keys(
        sh, {"response_delay_range", "stop_price_fraction", "stop_time_fraction"}, "shill_spec");
    std::tie(cfg.shill_spec.response_delay_min, cfg.shill_spec.response_delay_max) =
        detail::require_range(sh, "response_delay_range", "shill_spec");
    cfg.shill_spec.stop_price_fraction =
        detail::require_number(sh, "stop_price_fraction", "shill_spec");
    cfg.shill_spec.stop_time_fraction =
        detail::require_number(sh, "stop_time_fraction", "shill_spec");

    const nlohmann::json& sc = detail::require_field(root, "scenario", "sim config");
    detail::reject_unknown_keys(sc,
                                {"colluding_sellers", "auctions_per_seller", "shill_bidder",
                                 "strategy", "shill_fraction", "uneven_fractions",
                                 "uneven_auction_counts"},
                                "scenario");
    const nlohmann::json& colluders = detail::require_field(sc, "colluding_sellers", "scenario");
    if (!colluders.is_array()) throw ParseError("scenario: 'colluding_sellers' must be an array");
    for (const auto& v : colluders) {
        if (!v.is_string()) throw ParseError("scenario: colluding seller ids must be strings");
        cfg.scenario.colluding_sellers.push_back(v.get<std::string>());
    }
    cfg.scenario.auctions_per_seller =
        static_cast<int>(detail::require_int(sc, "auctions_per_seller", "scenario"));
    cfg.scenario.shill_bidder = detail::require_string(sc, "shill_bidder", "scenario");
    cfg.scenario.strategy =
        strategy_from_string(detail::require_string(sc, "strategy", "scenario"), "scenario");
    cfg.scenario.shill_fraction = detail::require_number(sc, "shill_fraction", "scenario");
    if (sc.contains("uneven_fractions")) {
        for (const auto& v : sc["uneven_fractions"]) {
            if (!v.is_number()) throw ParseError("scenario: uneven_fractions must be numbers");
            cfg.scenario.uneven_fractions.push_back(v.get<double>());
        }
    }
    if (sc.contains("uneven_auction_counts")) {
        for (const auto& v : sc["uneven_auction_counts"]) {
            if (!v.is_number_integer())
                throw ParseError("scenario: uneven_auction_counts must be integers");
            cfg.scenario.uneven_auction_counts.push_back(v.get<int>());
        }
    }

    cfg.auction_duration = detail::require_int(root, "auction_duration", "sim config");
    cfg.min_increment = detail::require_int(root, "min_increment", "sim config");
    std::tie(cfg.reference_value_min, cfg.reference_value_max) =
        detail::require_range(root, "reference_value_range", "sim config");
    return cfg;
}

inline SimConfig sim_config_from_json_string(const std::string& text) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("sim config: invalid JSON: ") + e.what());
    }
    return sim_config_from_json(root);
}

inline SimConfig load_sim_config(const std::filesystem::path& path) {
    try {
        return sim_config_from_json_string(read_file(path));
    } catch (ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

// Every field is optional; omitted ones keep their defaults (uniform
// weights, prune threshold 4, band 0.5).
inline ScoreConfig score_config_from_json(const nlohmann::json& root) {
    if (!root.is_object()) throw ParseError("score config: top level must be an object");
    detail::reject_unknown_keys(
        root, {"weights", "mss_prune_threshold", "median_band", "min_omega_prime", "clamp_scores"},
        "score config");
    ScoreConfig cfg;
    if (root.contains("weights")) {
        const nlohmann::json& w = root["weights"];
        detail::reject_unknown_keys(w, {"w1", "w2", "w3", "w4", "w5", "w6"}, "weights");
        if (w.contains("w1")) cfg.weights.w1 = detail::require_number(w, "w1", "weights");
        if (w.contains("w2")) cfg.weights.w2 = detail::require_number(w, "w2", "weights");
        if (w.contains("w3")) cfg.weights.w3 = detail::require_number(w, "w3", "weights");
        if (w.contains("w4")) cfg.weights.w4 = detail::require_number(w, "w4", "weights");
        if (w.contains("w5")) cfg.weights.w5 = detail::require_number(w, "w5", "weights");
        if (w.contains("w6")) cfg.weights.w6 = detail::require_number(w, "w6", "weights");
    }
    if (root.contains("mss_prune_threshold"))
        cfg.mss_prune_threshold = detail::require_number(root, "mss_prune_threshold", "score config");
    if (root.contains("median_band"))
        cfg.median_band = detail::require_number(root, "median_band", "score config");
    if (root.contains("min_omega_prime"))
        cfg.min_omega_prime = detail::require_number(root, "min_omega_prime", "score config");
    if (root.contains("clamp_scores")) {
        const nlohmann::json& v = root["clamp_scores"];
        if (!v.is_boolean()) throw ParseError("score config: 'clamp_scores' must be a boolean");
        cfg.clamp_scores = v.get<bool>();
    }
    try {
        cfg.validate();
    } catch (DomainError& e) {
        throw ParseError(std::string("score config: ") + e.what());
    }
    return cfg;
}

inline nlohmann::json score_config_to_json(const ScoreConfig& cfg) {
    return {{"weights",
             {{"w1", cfg.weights.w1},
              {"w2", cfg.weights.w2},
              {"w3", cfg.weights.w3},
              {"w4", cfg.weights.w4},
              {"w5", cfg.weights.w5},
              {"w6", cfg.weights.w6}}},
            {"mss_prune_threshold", cfg.mss_prune_threshold},
            {"median_band", cfg.median_band},
            {"min_omega_prime", cfg.min_omega_prime},
            {"clamp_scores", cfg.clamp_scores}};
}

inline ScoreConfig load_score_config(const std::filesystem::path& path) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path.string() + ": invalid JSON: " + e.what());
    }
    try {
        return score_config_from_json(root);
    } catch (ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

}  // namespace shillscore
