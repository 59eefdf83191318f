#pragma once

#include <json.hpp>
#include <optional>
#include <string>

#include "eplab/encoding.hpp"
#include "eplab/profile.hpp"
#include "eplab/sources.hpp"

namespace eplab {

using ordered_json = nlohmann::ordered_json;

// Profile files: {"k": 2, "values": {"": 0, "1": ..., "1,2": ...}} with
// subsets written as comma-separated 1-based coordinate lists.
ordered_json profile_to_json(const ProfileVector& p);
ProfileVector profile_from_json(const nlohmann::json& j);
std::string subset_label(Mask I);
Mask subset_from_label(const std::string& label, int k);

// Declarative source description; the lab's file-level input format.
struct SourceSpec {
    std::string type;  // "iid" | "markov" | "screwed_board" | "grid_board"
    std::optional<JointDistribution> base;   // iid
    std::optional<MarkovSource> chain;       // markov
    int board_size = 8;
    std::string board_start = "origin";      // or "stationary"

    // chain view (an iid source becomes a state-independent chain)
    MarkovSource to_markov() const;
    // exact law of the first n steps, block-structured per coordinate
    JointDistribution horizon_distribution(int n, const Caps& caps = {}) const;
    std::size_t coord_count() const;

    ordered_json to_json() const;
    static SourceSpec from_json(const nlohmann::json& j);
};

ordered_json encoding_to_json(const Encoding& f);
Encoding encoding_from_json(const nlohmann::json& j);

// Parses a JSON document, converting library exceptions to ParseError.
nlohmann::json parse_json_text(const std::string& text);

}  // namespace eplab
