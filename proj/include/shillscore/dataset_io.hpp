#pragma once

#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "shillscore/auction.hpp"
#include "shillscore/errors.hpp"

namespace shillscore {

enum class Format { json, csv };

// Picks the format from the file extension; anything but .csv reads as JSON.
inline Format format_for_path(const std::filesystem::path& p) {
    return p.extension() == ".csv" ? Format::csv : Format::json;
}

namespace detail {

inline const nlohmann::json& require_field(const nlohmann::json& o, const char* key,
                                           const std::string& where) {
    auto it = o.find(key);
    if (it == o.end()) throw ParseError(where + ": missing field '" + key + "'");
    return *it;
}

inline std::int64_t require_int(const nlohmann::json& o, const char* key,
                                const std::string& where) {
    const nlohmann::json& v = require_field(o, key, where);
    if (!v.is_number_integer()) throw ParseError(where + ": field '" + key + "' must be an integer");
    return v.get<std::int64_t>();
}

inline std::string require_string(const nlohmann::json& o, const char* key,
                                  const std::string& where) {
    const nlohmann::json& v = require_field(o, key, where);
    if (!v.is_string()) throw ParseError(where + ": field '" + key + "' must be a string");
    return v.get<std::string>();
}

inline void reject_unknown_keys(const nlohmann::json& o,
                                std::initializer_list<std::string_view> allowed,
                                const std::string& where) {
    for (auto it = o.begin(); it != o.end(); ++it) {
        bool ok = false;
        for (std::string_view k : allowed) ok = ok || k == it.key();
        if (!ok) throw ParseError(where + ": unexpected field '" + it.key() + "'");
    }
}

// Bid times come either as absolute epoch seconds or as an "M:SS" clock
// string read as minutes:seconds from the auction start.
inline Seconds parse_bid_time(const nlohmann::json& v, Seconds start, const std::string& where) {
    if (v.is_number_integer()) return v.get<std::int64_t>() - start;
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        const auto colon = s.find(':');
        if (colon != std::string::npos && colon > 0 && colon + 1 < s.size()) {
            bool digits = true;
            for (std::size_t i = 0; i < s.size(); ++i)
                if (i != colon && !std::isdigit(static_cast<unsigned char>(s[i]))) digits = false;
            const std::string sec = s.substr(colon + 1);
            if (digits && sec.size() <= 2) {
                const long long minutes = std::stoll(s.substr(0, colon));
                const long long seconds = std::stoll(sec);
                if (seconds < 60) return minutes * 60 + seconds;
            }
        }
        throw ParseError(where + ": bad time string '" + s + "' (want seconds or M:SS)");
    }
    throw ParseError(where + ": time must be an integer or an M:SS string");
}

inline Seconds parse_bid_time_text(const std::string& s, Seconds start, const std::string& where) {
    if (s.find(':') != std::string::npos) return parse_bid_time(nlohmann::json(s), start, where);
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(s, &pos);
        if (pos == s.size()) return v - start;
    } catch (const std::exception&) {
    }
    throw ParseError(where + ": bad time value '" + s + "'");
}

inline std::int64_t parse_int_text(const std::string& s, const std::string& where) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(s, &pos);
        if (pos == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw ParseError(where + ": bad integer '" + s + "'");
}

inline std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

inline std::vector<std::string> csv_split(const std::string& line, const std::string& where) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (quoted) throw ParseError(where + ": unterminated quote");
    fields.push_back(std::move(cur));
    return fields;
}

}  // namespace detail

inline nlohmann::json dataset_to_json(const Dataset& ds) {
    nlohmann::json out;
    out["sellers"] = ds.sellers;
    out["bidders"] = ds.bidders;
    nlohmann::json auctions = nlohmann::json::array();
    for (const Auction& a : ds.auctions) {
        nlohmann::json ja;
        ja["auction_id"] = a.auction_id;
        ja["seller_id"] = a.seller_id;
        ja["start_time"] = a.start_time;
        ja["end_time"] = a.end_time;
        ja["min_increment"] = a.min_increment;
        nlohmann::json bids = nlohmann::json::array();
        for (const Bid& b : a.bids) {
            nlohmann::json jb;
            jb["bid_number"] = b.bid_number;
            jb["bidder_id"] = b.bidder_id;
            jb["time"] = a.start_time + b.time;  // absolute on disk
            jb["amount"] = b.amount;
            bids.push_back(std::move(jb));
        }
        ja["bids"] = std::move(bids);
        auctions.push_back(std::move(ja));
    }
    out["auctions"] = std::move(auctions);
    return out;
}

// Canonical bytes: sorted keys, two-space indent, trailing newline. Loading
// and re-saving a canonical file reproduces it byte for byte.
inline std::string dataset_to_json_string(const Dataset& ds) {
    return dataset_to_json(ds).dump(2) + "\n";
}

inline Dataset dataset_from_json(const nlohmann::json& root) {
    if (!root.is_object()) throw ParseError("dataset: top level must be an object");
    detail::reject_unknown_keys(root, {"sellers", "bidders", "auctions"}, "dataset");
    Dataset ds;
    for (const char* key : {"sellers", "bidders"}) {
        const nlohmann::json& arr = detail::require_field(root, key, "dataset");
        if (!arr.is_array()) throw ParseError(std::string("dataset: '") + key + "' must be an array");
        for (const auto& v : arr) {
            if (!v.is_string())
                throw ParseError(std::string("dataset: '") + key + "' entries must be strings");
            if (key[0] == 's') ds.sellers.push_back(v.get<std::string>());
            else ds.bidders.push_back(v.get<std::string>());
        }
    }
    const nlohmann::json& auctions = detail::require_field(root, "auctions", "dataset");
    if (!auctions.is_array()) throw ParseError("dataset: 'auctions' must be an array");
    int index = 0;
    for (const auto& ja : auctions) {
        const std::string where = "auction #" + std::to_string(index);
        if (!ja.is_object()) throw ParseError(where + ": must be an object");
        detail::reject_unknown_keys(
            ja, {"auction_id", "seller_id", "start_time", "end_time", "min_increment", "bids"},
            where);
        Auction a;
        a.auction_id = detail::require_string(ja, "auction_id", where);
        a.seller_id = detail::require_string(ja, "seller_id", where);
        a.start_time = detail::require_int(ja, "start_time", where);
        a.end_time = detail::require_int(ja, "end_time", where);
        a.min_increment = detail::require_int(ja, "min_increment", where);
        const nlohmann::json& bids = detail::require_field(ja, "bids", where);
        if (!bids.is_array()) throw ParseError(where + ": 'bids' must be an array");
        int bid_index = 0;
        for (const auto& jb : bids) {
            const std::string bwhere = where + " bid #" + std::to_string(bid_index);
            if (!jb.is_object()) throw ParseError(bwhere + ": must be an object");
            detail::reject_unknown_keys(jb, {"bid_number", "bidder_id", "time", "amount"}, bwhere);
            Bid b;
            b.bid_number = static_cast<int>(detail::require_int(jb, "bid_number", bwhere));
            b.bidder_id = detail::require_string(jb, "bidder_id", bwhere);
            b.time = detail::parse_bid_time(detail::require_field(jb, "time", bwhere),
                                            a.start_time, bwhere);
            b.amount = detail::require_int(jb, "amount", bwhere);
            a.bids.push_back(std::move(b));
            ++bid_index;
        }
        ds.auctions.push_back(std::move(a));
        ++index;
    }
    canonicalize(ds);
    validate_dataset(ds);
    return ds;
}

inline Dataset dataset_from_json_string(const std::string& text) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("dataset: invalid JSON: ") + e.what());
    }
    return dataset_from_json(root);
}

inline const char* kDatasetCsvHeader =
    "auction_id,seller_id,start_time,end_time,min_increment,bid_number,bidder_id,time,amount";

// One row per bid, times absolute. Auctions without bids keep one row with
// the bid columns empty. The CSV form cannot carry bidders that never bid or
// sellers without auctions; JSON is the full-fidelity format.
inline std::string dataset_to_csv_string(const Dataset& ds) {
    std::string out = kDatasetCsvHeader;
    out += '\n';
    for (const Auction& a : ds.auctions) {
        const std::string prefix = detail::csv_quote(a.auction_id) + "," +
                                   detail::csv_quote(a.seller_id) + "," +
                                   std::to_string(a.start_time) + "," + std::to_string(a.end_time) +
                                   "," + std::to_string(a.min_increment) + ",";
        if (a.bids.empty()) {
            out += prefix + ",,,\n";
            continue;
        }
        for (const Bid& b : a.bids) {
            out += prefix + std::to_string(b.bid_number) + "," + detail::csv_quote(b.bidder_id) +
                   "," + std::to_string(a.start_time + b.time) + "," + std::to_string(b.amount) +
                   "\n";
        }
    }
    return out;
}

inline Dataset dataset_from_csv_string(const std::string& text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char c : text) {
        if (c == '\n') {
            if (!cur.empty() && cur.back() == '\r') cur.pop_back();
            lines.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) lines.push_back(std::move(cur));
    if (lines.empty()) throw ParseError("csv: empty input");
    if (lines[0] != kDatasetCsvHeader)
        throw ParseError("csv line 1: header must be '" + std::string(kDatasetCsvHeader) + "'");

    Dataset ds;
    std::map<AuctionId, std::size_t> slot;
    std::set<BidderId> bidders;
    std::set<SellerId> sellers;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const std::string where = "csv line " + std::to_string(i + 1);
        const std::vector<std::string> f = detail::csv_split(lines[i], where);
        if (f.size() != 9) throw ParseError(where + ": expected 9 fields, got " +
                                            std::to_string(f.size()));
        Auction meta;
        meta.auction_id = f[0];
        meta.seller_id = f[1];
        meta.start_time = detail::parse_int_text(f[2], where);
        meta.end_time = detail::parse_int_text(f[3], where);
        meta.min_increment = detail::parse_int_text(f[4], where);
        sellers.insert(meta.seller_id);

        auto it = slot.find(meta.auction_id);
        if (it == slot.end()) {
            it = slot.emplace(meta.auction_id, ds.auctions.size()).first;
            ds.auctions.push_back(meta);
        }
        Auction& a = ds.auctions[it->second];
        if (a.seller_id != meta.seller_id || a.start_time != meta.start_time ||
            a.end_time != meta.end_time || a.min_increment != meta.min_increment)
            throw ParseError(where + ": conflicting metadata for auction " + meta.auction_id);

        const bool empty_bid = f[5].empty() && f[6].empty() && f[7].empty() && f[8].empty();
        if (empty_bid) continue;  // zero-bid auction marker
        Bid b;
        b.bid_number = static_cast<int>(detail::parse_int_text(f[5], where));
        b.bidder_id = f[6];
        b.time = detail::parse_bid_time_text(f[7], a.start_time, where);
        b.amount = detail::parse_int_text(f[8], where);
        bidders.insert(b.bidder_id);
        a.bids.push_back(std::move(b));
    }
    ds.sellers.assign(sellers.begin(), sellers.end());
    ds.bidders.assign(bidders.begin(), bidders.end());
    canonicalize(ds);
    validate_dataset(ds);
    return ds;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("cannot read " + path.string());
    return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("cannot write " + path.string());
}

inline Dataset load_dataset(const std::filesystem::path& path, Format format) {
    const std::string text = read_file(path);
    try {
        return format == Format::json ? dataset_from_json_string(text)
                                      : dataset_from_csv_string(text);
    } catch (ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

inline Dataset load_dataset(const std::filesystem::path& path) {
    return load_dataset(path, format_for_path(path));
}

inline void save_dataset(const Dataset& ds, const std::filesystem::path& path, Format format) {
    write_file(path, format == Format::json ? dataset_to_json_string(ds)
                                            : dataset_to_csv_string(ds));
}

inline void save_dataset(const Dataset& ds, const std::filesystem::path& path) {
    save_dataset(ds, path, format_for_path(path));
}

}  // namespace shillscore
