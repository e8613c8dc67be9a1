#pragma once

#include <string>
#include <string_view>

#include "shillscore/collusion.hpp"
#include "shillscore/report_io.hpp"

namespace shillscore {

namespace detail {

inline std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

}  // namespace detail

// Undirected DOT rendering of a seller association graph. Vertex labels
// carry the participation count; strong edges render bold.
inline std::string sag_to_dot(const SellerAssociationGraph& g, std::string_view name,
                              bool weighted) {
    std::string out = "graph \"" + detail::dot_escape(std::string(name)) + "\" {\n";
    out += "  node [shape=ellipse];\n";
    for (const auto& [seller, n] : g.vertices) {
        out += "  \"" + detail::dot_escape(seller) + "\" [label=\"" + detail::dot_escape(seller) +
               "\\n(" + std::to_string(n) + ")\"];\n";
    }
    for (const SagEdge& e : g.edges) {
        out += "  \"" + detail::dot_escape(e.a) + "\" -- \"" + detail::dot_escape(e.b) + "\"";
        if (weighted && e.weight) {
            out += " [label=\"" + fmt4(*e.weight) + "\"";
            if (e.strong) out += ", style=bold";
            out += "]";
        }
        out += ";\n";
    }
    out += "}\n";
    return out;
}

// SBAG stages label vertices with the MSS (and the adjusted score once it
// exists). SBAG edges are the strong associations, so they stay bold.
inline std::string sbag_to_dot(const ShillBiddingAssociationGraph& g, std::string_view name) {
    std::string out = "graph \"" + detail::dot_escape(std::string(name)) + "\" {\n";
    out += "  node [shape=ellipse];\n";
    for (const auto& [seller, v] : g.vertices) {
        std::string label = detail::dot_escape(seller) + "\\n(";
        label += v.mss ? fmt4(*v.mss) : std::string("-");
        if (v.adjusted_score) label += " | adj " + fmt4(*v.adjusted_score);
        label += ")";
        out += "  \"" + detail::dot_escape(seller) + "\" [label=\"" + label + "\"];\n";
    }
    for (const auto& [a, b] : g.edges) {
        out += "  \"" + detail::dot_escape(a) + "\" -- \"" + detail::dot_escape(b) +
               "\" [style=bold];\n";
    }
    out += "}\n";
    return out;
}

struct StageDot {
    std::string filename;
    std::string content;
};

// The four pipeline stages for one bidder, ready to write to files.
inline std::vector<StageDot> report_stage_dots(const CollusionReport& rep) {
    const std::string base = sanitize_for_filename(rep.bidder);
    return {
        {base + "_stage1_sag.dot", sag_to_dot(rep.sag, rep.bidder + " SAG", false)},
        {base + "_stage2_sag_weighted.dot",
         sag_to_dot(rep.sag_weighted, rep.bidder + " SAG weighted", true)},
        {base + "_stage3_sbag_mss.dot", sbag_to_dot(rep.sbag, rep.bidder + " SBAG")},
        {base + "_stage4_sbag_final.dot", sbag_to_dot(rep.sbag_final, rep.bidder + " SBAG final")},
    };
}

}  // namespace shillscore
