#include "eplab/serialize.hpp"

#include <sstream>

namespace eplab {

std::string subset_label(Mask I) {
    std::string s;
    for (int i = 0; I != 0; ++i, I >>= 1) {
        if (I & 1) {
            if (!s.empty()) s += ',';
            s += std::to_string(i + 1);
        }
    }
    return s;
}

Mask subset_from_label(const std::string& label, int k) {
    Mask I = 0;
    std::istringstream in(label);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        if (tok.empty()) throw ParseError("empty coordinate in subset label");
        std::size_t pos = 0;
        int coord = 0;
        try {
            coord = std::stoi(tok, &pos);
        } catch (const std::exception&) {
            throw ParseError("bad coordinate '" + tok + "' in subset label");
        }
        if (pos != tok.size() || coord < 1 || coord > k)
            throw ParseError("coordinate out of range in subset label: " +
                             tok);
        I |= Mask{1} << (coord - 1);
    }
    return I;
}

ordered_json profile_to_json(const ProfileVector& p) {
    ordered_json values = ordered_json::object();
    for (Mask I = 0; I < p.component_count(); ++I)
        values[subset_label(I)] = p[I];
    return ordered_json{{"k", p.ground_size()}, {"values", values}};
}

ProfileVector profile_from_json(const nlohmann::json& j) {
    try {
        const int k = j.at("k").get<int>();
        if (k < 0 || k > 30) throw ParseError("profile k out of range");
        ProfileVector p(k);
        for (const auto& [label, value] : j.at("values").items()) {
            const Mask I = subset_from_label(label, k);
            const double v = value.get<double>();
            if (I == 0 && v != 0.0)
                throw ParseError("profile value at empty set must be 0");
            if (I != 0) p.set(I, v);
        }
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad profile JSON: ") + e.what());
    }
}

namespace {

std::vector<std::uint32_t> read_sizes(const nlohmann::json& j) {
    std::vector<std::uint32_t> sizes;
    for (const auto& s : j) {
        const std::int64_t v = s.get<std::int64_t>();
        if (v < 1 || v > UINT32_MAX) throw ParseError("bad alphabet size");
        sizes.push_back(static_cast<std::uint32_t>(v));
    }
    if (sizes.empty()) throw ParseError("need at least one alphabet");
    return sizes;
}

ProductSpace space_from_sizes(const std::vector<std::uint32_t>& sizes) {
    std::vector<Alphabet> factors;
    factors.reserve(sizes.size());
    for (std::uint32_t s : sizes) factors.emplace_back(s);
    return ProductSpace(std::move(factors));
}

}  // namespace

MarkovSource SourceSpec::to_markov() const {
    if (type == "iid") return iid_markov_source(*base);
    if (type == "markov") return *chain;
    if (type == "screwed_board")
        return screwed_chessboard(board_size, board_start == "stationary"
                                                  ? BoardStart::stationary
                                                  : BoardStart::origin);
    if (type == "grid_board")
        return standard_chessboard(board_size, board_start == "stationary"
                                                   ? BoardStart::stationary
                                                   : BoardStart::origin);
    throw ParseError("unknown source type: " + type);
}

JointDistribution SourceSpec::horizon_distribution(int n,
                                                   const Caps& caps) const {
    if (type == "iid") return iid_expansion(*base, n, caps);
    return finite_horizon_distribution(to_markov(), n, caps);
}

std::size_t SourceSpec::coord_count() const {
    if (type == "iid") return base->space().coord_count();
    if (type == "markov") return chain->states.coord_count();
    return 2;  // boards
}

ordered_json SourceSpec::to_json() const {
    ordered_json j;
    j["type"] = type;
    if (type == "iid") {
        ordered_json sizes = ordered_json::array();
        for (const auto& f : base->space().factors()) sizes.push_back(f.size);
        j["alphabet_sizes"] = sizes;
        j["mass"] = std::vector<double>(base->mass().begin(),
                                        base->mass().end());
    } else if (type == "markov") {
        ordered_json sizes = ordered_json::array();
        for (const auto& f : chain->states.factors()) sizes.push_back(f.size);
        j["alphabet_sizes"] = sizes;
        ordered_json rows = ordered_json::array();
        for (Eigen::Index s = 0; s < chain->transition.rows(); ++s) {
            ordered_json row = ordered_json::array();
            for (Eigen::Index t = 0; t < chain->transition.cols(); ++t)
                row.push_back(chain->transition(s, t));
            rows.push_back(std::move(row));
        }
        j["transition"] = std::move(rows);
        ordered_json init = ordered_json::array();
        for (Eigen::Index s = 0; s < chain->initial.size(); ++s)
            init.push_back(chain->initial(s));
        j["initial"] = std::move(init);
    } else {
        j["size"] = board_size;
        j["start"] = board_start;
    }
    return j;
}

SourceSpec SourceSpec::from_json(const nlohmann::json& j) {
    try {
        SourceSpec spec;
        spec.type = j.at("type").get<std::string>();
        if (spec.type == "iid") {
            const auto sizes = read_sizes(j.at("alphabet_sizes"));
            spec.base.emplace(space_from_sizes(sizes),
                              j.at("mass").get<std::vector<double>>());
        } else if (spec.type == "markov") {
            const auto sizes = read_sizes(j.at("alphabet_sizes"));
            ProductSpace states = space_from_sizes(sizes);
            const auto S = static_cast<Eigen::Index>(states.total_size());
            const auto& rows = j.at("transition");
            if (rows.size() != static_cast<std::size_t>(S))
                throw ParseError("transition row count != state count");
            Eigen::MatrixXd P(S, S);
            for (Eigen::Index s = 0; s < S; ++s) {
                const auto row =
                    rows[static_cast<std::size_t>(s)].get<std::vector<double>>();
                if (row.size() != static_cast<std::size_t>(S))
                    throw ParseError("transition row length != state count");
                for (Eigen::Index t = 0; t < S; ++t)
                    P(s, t) = row[static_cast<std::size_t>(t)];
            }
            const auto init = j.at("initial").get<std::vector<double>>();
            if (init.size() != static_cast<std::size_t>(S))
                throw ParseError("initial length != state count");
            Eigen::VectorXd v(S);
            for (Eigen::Index s = 0; s < S; ++s)
                v(s) = init[static_cast<std::size_t>(s)];
            spec.chain.emplace(std::move(states), std::move(P), std::move(v));
        } else if (spec.type == "screwed_board" || spec.type == "grid_board") {
            spec.board_size = j.value("size", 8);
            spec.board_start = j.value("start", std::string("origin"));
            if (spec.board_start != "origin" &&
                spec.board_start != "stationary")
                throw ParseError("board start must be origin or stationary");
            if (spec.board_size < 2)
                throw ParseError("board size must be >= 2");
        } else {
            throw ParseError("unknown source type: " + spec.type);
        }
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad source JSON: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("bad source values: ") + e.what());
    }
}

ordered_json encoding_to_json(const Encoding& f) {
    ordered_json tables = ordered_json::array();
    for (const auto& t : f.tables) tables.push_back(t);
    return ordered_json{{"ell", f.ell},
                        {"output_sizes", f.output_sizes},
                        {"tables", tables}};
}

Encoding encoding_from_json(const nlohmann::json& j) {
    try {
        Encoding f;
        f.ell = j.at("ell").get<std::size_t>();
        f.output_sizes = j.at("output_sizes").get<std::vector<std::uint32_t>>();
        for (const auto& t : j.at("tables"))
            f.tables.push_back(t.get<std::vector<std::uint32_t>>());
        if (f.tables.size() != f.ell || f.output_sizes.size() != f.ell)
            throw ParseError("encoding shape mismatch");
        for (std::size_t i = 0; i < f.ell; ++i)
            for (std::uint32_t v : f.tables[i])
                if (v >= f.output_sizes[i])
                    throw ParseError("encoding value out of range");
        return f;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad encoding JSON: ") + e.what());
    }
}

nlohmann::json parse_json_text(const std::string& text) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
}

}  // namespace eplab
