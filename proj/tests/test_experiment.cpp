#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "eplab/experiment.hpp"
#include "eplab/fluctuation.hpp"
#include "test_util.hpp"

using namespace eplab;
using namespace eplab::testing;
namespace fs = std::filesystem;

namespace {

constexpr double kLn2 = 0.6931471805599453;

SourceSpec fair_pair_source() {
    SourceSpec s;
    s.type = "iid";
    s.base = make_dist({2, 2}, {0.25, 0.25, 0.25, 0.25});
    return s;
}

ExperimentSpec tiny_exact_spec() {
    ExperimentSpec spec;
    spec.source.type = "iid";
    spec.source.base = make_dist({2, 2}, {0.4, 0.1, 0.1, 0.4});
    spec.horizons = {1, 2};
    spec.schedule.ell = 2;
    spec.schedule.explicit_sizes[1] = {2, 2};
    spec.schedule.explicit_sizes[2] = {2, 2};
    spec.epsilon = 0.6;
    spec.trials = 64;
    spec.seed = 5;
    spec.exact = true;
    return spec;
}

ordered_json strip_wall(ordered_json j) {
    j["metadata"].erase("wall_seconds");
    for (auto& row : j["rows"]) row.erase("wall_seconds");
    return j;
}

// minimal well-formedness scan: tags balance and attributes stay quoted
bool xml_well_formed(const std::string& text) {
    std::vector<std::string> stack;
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] != '<') {
            ++i;
            continue;
        }
        const std::size_t end = text.find('>', i);
        if (end == std::string::npos) return false;
        std::string tag = text.substr(i + 1, end - i - 1);
        i = end + 1;
        if (tag.empty()) return false;
        if (tag[0] == '?' || tag[0] == '!') continue;
        const bool closing = tag[0] == '/';
        const bool self_closing = tag.back() == '/';
        if (closing) tag = tag.substr(1);
        if (self_closing) tag = tag.substr(0, tag.size() - 1);
        const std::string name = tag.substr(0, tag.find_first_of(" \t\n"));
        if (name.empty()) return false;
        // quotes inside the tag must balance
        if (std::count(tag.begin(), tag.end(), '"') % 2 != 0) return false;
        if (closing) {
            if (stack.empty() || stack.back() != name) return false;
            stack.pop_back();
        } else if (!self_closing) {
            stack.push_back(name);
        }
    }
    return stack.empty();
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("alphabet schedule") {
    AlphabetSchedule sched;
    sched.ell = 2;
    sched.growth_exponent = 0.5;
    CHECK(sched.sizes_for(4) == std::vector<std::uint32_t>{4, 4});
    CHECK(sched.sizes_for(5) == std::vector<std::uint32_t>{8, 8});
    CHECK(sched.sizes_for(12) == std::vector<std::uint32_t>{64, 64});
    sched.explicit_sizes[4] = {3, 5};
    CHECK(sched.sizes_for(4) == std::vector<std::uint32_t>{3, 5});

    AlphabetSchedule undefined;
    undefined.ell = 1;
    CHECK_THROWS_AS(undefined.sizes_for(3), ParseError);

    AlphabetSchedule huge;
    huge.ell = 1;
    huge.growth_exponent = 2.0;
    CHECK_THROWS_AS(huge.sizes_for(40), CapacityError);
}

TEST_CASE("quantiles") {
    CHECK(quantiles_of({}).median == 0.0);
    const Quantiles q = quantiles_of({3.0, 1.0, 2.0});
    CHECK(q.median == 2.0);
    CHECK(q.max == 3.0);
    CHECK(q.q25 == doctest::Approx(1.5));
    CHECK(q.q75 == doctest::Approx(2.5));
    const Quantiles even = quantiles_of({1.0, 2.0, 3.0, 4.0});
    CHECK(even.median == doctest::Approx(2.5));
}

TEST_CASE("experiment spec round trip is lossless") {
    const ExperimentSpec spec = tiny_exact_spec();
    const auto dumped = spec.to_json().dump();
    const ExperimentSpec back =
        ExperimentSpec::from_json(nlohmann::json::parse(dumped));
    CHECK(back.to_json().dump() == dumped);
    CHECK(back.epsilon == spec.epsilon);
    CHECK(back.exact == spec.exact);
    CHECK(back.source.base->mass_at(0) == spec.source.base->mass_at(0));
}

TEST_CASE("source spec round trip is bit-exact") {
    SourceSpec markov;
    markov.type = "markov";
    {
        Eigen::MatrixXd P(2, 2);
        P << 1.0 / 3.0, 2.0 / 3.0, 0.1, 0.9;
        Eigen::VectorXd init(2);
        init << 0.25, 0.75;
        markov.chain.emplace(space_of({2}), P, init);
    }
    for (const SourceSpec& s : {fair_pair_source(), markov}) {
        const auto dumped = s.to_json().dump();
        const auto back = SourceSpec::from_json(nlohmann::json::parse(dumped));
        CHECK(back.to_json().dump() == dumped);
    }
    SourceSpec board;
    board.type = "screwed_board";
    board.board_size = 4;
    const auto dumped = board.to_json().dump();
    CHECK(SourceSpec::from_json(nlohmann::json::parse(dumped))
              .to_json()
              .dump() == dumped);
}

TEST_CASE("experiment runs deterministically") {
    ExperimentSpec spec = tiny_exact_spec();
    spec.exact = false;
    spec.trials = 50;
    const auto a = strip_wall(report_to_json(run_encode_experiment(spec)));
    const auto b = strip_wall(report_to_json(run_encode_experiment(spec)));
    CHECK(a.dump() == b.dump());

    // report JSON re-parses losslessly
    const auto report = run_encode_experiment(spec);
    const auto j = report_to_json(report);
    CHECK(nlohmann::json::parse(j.dump()).dump() ==
          nlohmann::json(j).dump());
}

TEST_CASE("exact and Monte Carlo agree on an enumerable spec") {
    ExperimentSpec spec = tiny_exact_spec();
    spec.epsilon = 0.5;
    const auto exact = run_encode_experiment(spec);
    spec.exact = false;
    spec.trials = 10000;
    spec.seed = 123;
    const auto mc = run_encode_experiment(spec);
    for (std::size_t i = 0; i < exact.rows.size(); ++i) {
        REQUIRE(exact.rows[i].feasible);
        const double p = exact.rows[i].proportion.value;
        CHECK(mc.rows[i].proportion.wilson.lo <= p);
        CHECK(mc.rows[i].proportion.wilson.hi >= p);
    }
}

TEST_CASE("one-point output alphabets match the convolution exactly") {
    ExperimentSpec spec;
    spec.source = fair_pair_source();
    spec.horizons = {2};
    spec.schedule.ell = 2;
    spec.schedule.explicit_sizes[2] = {1, 1};
    spec.epsilon = 0.05;
    spec.trials = 20;
    spec.seed = 3;
    const auto report = run_encode_experiment(spec);
    REQUIRE(report.rows.size() == 1);
    const auto& row = report.rows[0];
    REQUIRE(row.feasible);
    // every encoding collapses the encoded coordinates; the pushed profile
    // equals the convolution with the zero alphabet profile
    CHECK(row.distance.max <= 1e-12);
    CHECK(row.proportion.value == 1.0);
    for (Mask I = 1; I < 4u; ++I) CHECK(row.convolution_rate[I] == 0.0);
}

TEST_CASE("infeasible horizons degrade gracefully") {
    ExperimentSpec spec = tiny_exact_spec();
    spec.horizons = {1, 2, 30};
    spec.schedule.explicit_sizes[30] = {4, 4};
    const auto report = run_encode_experiment(spec);
    REQUIRE(report.rows.size() == 3);
    CHECK(report.rows[0].feasible);
    CHECK(report.rows[1].feasible);
    CHECK(!report.rows[2].feasible);
    CHECK(!report.rows[2].infeasible_reason.empty());
}

TEST_CASE("fair pair with square-root alphabets approaches the convolution") {
    ExperimentSpec spec;
    spec.source = fair_pair_source();
    spec.horizons = {4, 8};
    spec.schedule.ell = 2;
    spec.schedule.growth_exponent = 0.5;
    spec.epsilon = 0.4;
    spec.trials = 60;
    spec.seed = 17;
    const auto report = run_encode_experiment(spec);
    REQUIRE(report.rows.size() == 2);
    for (const auto& row : report.rows) {
        REQUIRE(row.feasible);
        // convolution rate pinned at (0, ln2/2, ln2/2, ln2)
        CHECK(close(row.convolution_rate[1], 0.5 * kLn2, 1e-12));
        CHECK(close(row.convolution_rate[3], kLn2, 1e-12));
    }
    CHECK(report.rows[1].distance.median <=
          report.rows[0].distance.median + 1e-9);
    if (report.spec.delta) CHECK(false);  // delta untouched

    // with the asymptotic bound evaluated:
    // threshold = (eps/(121 * 2 ln2))^4 ~ 3.2e-11
    spec.delta = 1e-11;
    const auto with_bound = run_encode_experiment(spec);
    REQUIRE(with_bound.rows[0].bound.has_value());
    CHECK(with_bound.rows[0].bound->delta_admissible);
    spec.delta = 1e-9;
    CHECK(!run_encode_experiment(spec).rows[0].bound->delta_admissible);
}

TEST_CASE("torus walk encodings drift toward the convolution") {
    ExperimentSpec spec;
    spec.source.type = "screwed_board";
    spec.horizons = {2, 3, 4, 64};
    spec.schedule.ell = 2;
    spec.schedule.growth_exponent = 1.0;  // 2^n colors per coordinate
    spec.epsilon = 0.25;
    spec.trials = 60;
    spec.seed = 99;
    const auto report = run_encode_experiment(spec);
    REQUIRE(report.rows.size() == 4);
    double prev = 10.0;
    for (int i = 0; i < 3; ++i) {
        const auto& row = report.rows[static_cast<std::size_t>(i)];
        REQUIRE(row.feasible);
        // singles pinned at min(source rate, ln 2); joint at the source rate
        const double u1 = row.source_rate[1];
        CHECK(close(row.convolution_rate[1], std::min(u1, kLn2), 1e-12));
        CHECK(close(row.convolution_rate[3], row.source_rate[3], 1e-12));
        CHECK(row.distance.median <= prev + 1e-12);
        prev = row.distance.median;
    }
    CHECK(report.rows[2].distance.median < 0.15);
    CHECK(report.rows[2].proportion.value >= 0.9);
    // the explicit path law stops fitting long before n = 64
    CHECK(!report.rows[3].feasible);
}

TEST_CASE("profile and encoding JSON round trips") {
    CounterRng rng(71, 0);
    ProfileVector p(3);
    for (Mask I = 1; I < 8u; ++I) p.set(I, 3.0 * rng.uniform01());
    const auto back = profile_from_json(nlohmann::json::parse(
        profile_to_json(p).dump()));
    for (Mask I = 0; I < 8u; ++I) CHECK(back[I] == p[I]);
    CHECK(subset_label(0b101) == "1,3");
    CHECK(subset_from_label("1,3", 3) == 0b101);
    CHECK_THROWS_AS(subset_from_label("4", 3), ParseError);

    const EncodingEnsemble ens(space_of({3, 4, 2}), {2, 3});
    CounterRng sampler(72, 0);
    const Encoding f = sample_encoding(ens, sampler);
    const Encoding g = encoding_from_json(nlohmann::json::parse(
        encoding_to_json(f).dump()));
    CHECK(g.ell == f.ell);
    CHECK(g.tables == f.tables);
    CHECK(g.output_sizes == f.output_sizes);
    CHECK_THROWS_AS(encoding_from_json(nlohmann::json::parse(
                        R"({"ell":1,"output_sizes":[2],"tables":[[0,5]]})")),
                    ParseError);
}

TEST_CASE("fluctuation trend") {
    // uniform base: both relative measures vanish at every horizon
    SourceSpec uni;
    uni.type = "iid";
    uni.base = make_dist({2}, {0.5, 0.5});
    for (const auto& row : fluctuation_trend(uni, {1, 4, 16, 64}, false)) {
        REQUIRE(row.feasible);
        CHECK(close(row.M_rel, 0.0, 1e-12));
        REQUIRE(row.D_rel.has_value());
        CHECK(close(*row.D_rel, 0.0, 1e-12));
    }

    // biased base: closed form decreases and approaches the support-gap limit
    SourceSpec bern;
    bern.type = "iid";
    bern.base = make_dist({2}, {0.3, 0.7});
    const auto rows = fluctuation_trend(bern, {4, 16, 64, 256}, false);
    for (std::size_t i = 1; i < rows.size(); ++i)
        CHECK(rows[i].M_rel < rows[i - 1].M_rel);
    const double H = entropy(*bern.base);
    const double limit = (kLn2 - H) / H;
    CHECK(std::abs(*rows.back().D_rel - limit) < 0.05);

    // closed form matches the explicit expansion at a small horizon
    const auto explicit_rep = fluctuation_report(iid_expansion(*bern.base, 8));
    const auto closed = fluctuation_trend(bern, {8}, false);
    CHECK(close(closed[0].M_rel, explicit_rep.M_rel, 1e-10));

    // conditional column on a two-coordinate chain at small horizons
    SourceSpec board;
    board.type = "screwed_board";
    const auto cond = fluctuation_trend(board, {2, 3}, true);
    for (const auto& row : cond) {
        REQUIRE(row.feasible);
        REQUIRE(row.M_rel_cond.has_value());
        CHECK(*row.M_rel_cond >= 0.0);
        CHECK(!row.D_rel.has_value());
    }

    // horizon too deep for the explicit chain distribution: infeasible row
    const auto deep = fluctuation_trend(board, {2, 40}, false);
    CHECK(deep[0].feasible);
    CHECK(!deep[1].feasible);

    const std::string csv = trend_to_csv(rows);
    CHECK(csv.rfind("n,feasible,M_rel,D_rel,M_rel_cond", 0) == 0);
}

TEST_CASE("csv output carries a header and 12-digit numbers") {
    const auto report = run_encode_experiment(tiny_exact_spec());
    const std::string csv = report_to_csv(report);
    CHECK(csv.find("\"H_rate[1,2]\"") != std::string::npos);
    CHECK(csv.find("distance_median") != std::string::npos);
    CHECK(csv_number(0.1234567890123456) == "0.123456789012");
    CHECK(csv_number(2.0) == "2");
}

TEST_CASE("plot data panels") {
    const fs::path dir = fs::temp_directory_path() / "eplab_plot_test";
    fs::remove_all(dir);

    // empty report: header-only files
    ExperimentReport empty;
    empty.spec = tiny_exact_spec();
    emit_plotdata(empty, dir, false);
    const std::string empty_dat = slurp(dir / "distance_vs_n.dat");
    CHECK(empty_dat.rfind("# n q25 median q75 max", 0) == 0);
    CHECK(std::count(empty_dat.begin(), empty_dat.end(), '\n') == 1);

    // three feasible rows: three data lines per panel, and valid SVG
    ExperimentSpec spec = tiny_exact_spec();
    spec.horizons = {1, 2, 3};
    spec.schedule.explicit_sizes[3] = {2, 2};
    const auto report = run_encode_experiment(spec);
    emit_plotdata(report, dir, true);
    const std::string dat = slurp(dir / "proportion_vs_n.dat");
    CHECK(std::count(dat.begin(), dat.end(), '\n') == 4);
    for (const char* panel : {"distance_vs_n.svg", "proportion_vs_n.svg",
                              "rate_convergence.svg"}) {
        const std::string svg = slurp(dir / panel);
        CHECK(!svg.empty());
        CHECK(xml_well_formed(svg));
    }
    fs::remove_all(dir);
}
