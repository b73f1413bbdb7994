#pragma once

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string>

#include <json.hpp>

#include "cas/error.hpp"
#include "cas/evaluate.hpp"

namespace cas {

// Assignment files: one JSON object per line,
//   {"id", "conclusion_indices", "labeling", "config_rank", "nmi_at_fix"}
// with null for an absent rank or score. Lines are written in id order.

inline void write_hypotheses(std::ostream& out, const HypothesisSet& hyps)
{
    for (const auto& [id, h] : hyps) {
        nlohmann::ordered_json j;
        j["id"] = id;
        j["conclusion_indices"] = h.conclusions;
        j["labeling"] = h.labeling.bits;
        j["config_rank"] = h.config_rank ? nlohmann::ordered_json(*h.config_rank) : nlohmann::ordered_json();
        j["nmi_at_fix"] = h.nmi_at_fix ? nlohmann::ordered_json(*h.nmi_at_fix) : nlohmann::ordered_json();
        out << j.dump() << '\n';
    }
}

inline void write_hypotheses(const std::string& path, const HypothesisSet& hyps)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write '" + path + "'");
    }
    write_hypotheses(out, hyps);
}

inline HypothesisSet read_hypotheses(std::istream& in)
{
    HypothesisSet out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        Hypothesis h;
        std::string id;
        try {
            const auto j = nlohmann::json::parse(line);
            id = j.at("id").get<std::string>();
            h.labeling.bits = j.at("labeling").get<std::string>();
            if (h.labeling.bits.empty() || h.labeling.bits.find_first_not_of("01") != std::string::npos) {
                throw ParseError(line_no, "labeling must be a non-empty 0/1 string");
            }
            if (h.labeling.count() == 0) {
                throw ParseError(line_no, "labeling has no boundary");
            }
            const auto implied = conclusions_from_labeling(h.labeling);
            if (j.contains("conclusion_indices") && !j["conclusion_indices"].is_null()) {
                h.conclusions = j["conclusion_indices"].get<SentenceIndices>();
                std::sort(h.conclusions.begin(), h.conclusions.end());
                if (h.conclusions != implied) {
                    throw ParseError(line_no, "conclusion_indices disagree with labeling for '" + id + "'");
                }
            } else {
                h.conclusions = implied;
            }
            if (j.contains("config_rank") && !j["config_rank"].is_null()) {
                h.config_rank = j["config_rank"].get<std::size_t>();
            }
            if (j.contains("nmi_at_fix") && !j["nmi_at_fix"].is_null()) {
                h.nmi_at_fix = j["nmi_at_fix"].get<double>();
            }
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(line_no, e.what());
        }
        if (!out.emplace(id, std::move(h)).second) {
            throw ValidationError("duplicate assignment for '" + id + "' on line " + std::to_string(line_no));
        }
    }
    return out;
}

inline HypothesisSet read_hypotheses(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot read '" + path + "'");
    }
    return read_hypotheses(in);
}

} // namespace cas
