// Command-line harness: profile, convolve, encode-experiment, bounds,
// fluct-trend, plotdata. Exit codes: 0 ok, 2 parse error, 3 capacity,
// 4 domain error.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "eplab/experiment.hpp"
#include "eplab/fluctuation.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using eplab::ordered_json;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw eplab::ParseError("cannot open file: " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    f << text;
    if (!f) throw std::runtime_error("cannot write file: " + path.string());
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty())
        std::cout << text;
    else
        write_file(out_path, text);
}

struct ProfileArgs {
    std::string spec_path;
    int n = 32;
    int bracket_depth = 4;
    std::string format = "json";
    std::string out;
};

int cmd_profile(const ProfileArgs& a) {
    const auto spec = eplab::SourceSpec::from_json(
        eplab::parse_json_text(read_file(a.spec_path)));
    const eplab::MarkovSource src = spec.to_markov();
    const eplab::ProcessProfile prof =
        eplab::process_profile(src, a.n, a.bracket_depth);

    if (a.format == "csv") {
        std::string out =
            "subset,markov,rate_exact,rate_lower,rate_upper,bracket_depth,"
            "curve_len\r\n";
        for (const auto& sub : prof.subprocesses) {
            if (sub.J == 0) continue;
            out += "\"" + eplab::subset_label(sub.J) + "\",";
            out += sub.markov ? "true," : "false,";
            out += sub.rate_exact ? "true," : "false,";
            out += eplab::csv_number(sub.rate_lower) + ",";
            out += eplab::csv_number(sub.rate_upper) + ",";
            out += std::to_string(sub.bracket_depth) + ",";
            out += std::to_string(sub.entropy_curve.size()) + "\r\n";
        }
        emit(out, a.out);
        return 0;
    }

    ordered_json j;
    j["source"] = spec.to_json();
    j["n"] = a.n;
    ordered_json subsets = ordered_json::object();
    for (const auto& sub : prof.subprocesses) {
        if (sub.J == 0) continue;
        ordered_json s;
        s["markov"] = sub.markov;
        s["rate_exact"] = sub.rate_exact;
        s["rate_lower"] = sub.rate_lower;
        s["rate_upper"] = sub.rate_upper;
        if (sub.bracket_depth > 0) s["bracket_depth"] = sub.bracket_depth;
        s["entropy_curve"] = sub.entropy_curve;
        subsets[eplab::subset_label(sub.J)] = std::move(s);
    }
    j["subsets"] = std::move(subsets);
    j["max_fluct_rate_track"] = prof.fluct_track;
    emit(j.dump(2) + "\n", a.out);
    return 0;
}

struct ConvolveArgs {
    std::string u_path, v_path, out;
};

int cmd_convolve(const ConvolveArgs& a) {
    const auto u =
        eplab::profile_from_json(eplab::parse_json_text(read_file(a.u_path)));
    const auto v =
        eplab::profile_from_json(eplab::parse_json_text(read_file(a.v_path)));
    const auto w = eplab::convolve(u, v);
    emit(eplab::profile_to_json(w).dump(2) + "\n", a.out);
    return 0;
}

struct ExperimentArgs {
    std::string spec_path;
    std::string out;
    std::string format = "json";
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::uint64_t trials = 0;
    double epsilon = 0.0;
};

int cmd_encode_experiment(const ExperimentArgs& a) {
    auto spec = eplab::ExperimentSpec::from_json(
        eplab::parse_json_text(read_file(a.spec_path)));
    if (a.seed_set) spec.seed = a.seed;
    if (a.trials > 0) spec.trials = a.trials;
    if (a.epsilon > 0.0) spec.epsilon = a.epsilon;
    const auto report = eplab::run_encode_experiment(spec);
    if (a.format == "csv")
        emit(eplab::report_to_csv(report), a.out);
    else
        emit(eplab::report_to_json(report).dump(2) + "\n", a.out);
    return 0;
}

ordered_json bound_result_json(const eplab::BoundResult& b) {
    return ordered_json{{"exponent", b.exponent},
                        {"proportion_lower_bound", b.proportion_lower_bound},
                        {"vacuous", b.vacuous},
                        {"saturated", b.saturated}};
}

struct BoundsArgs {
    std::string spec_path, out;
};

int cmd_bounds(const BoundsArgs& a) {
    const json inputs = eplab::parse_json_text(read_file(a.spec_path));
    ordered_json result;
    try {
        const std::string kind = inputs.at("bound").get<std::string>();
        if (kind == "proportion") {
            const auto r = eplab::encoding_proportion_bound(
                inputs.at("k").get<int>(), inputs.at("ell").get<int>(),
                inputs.at("delta").get<double>(),
                inputs.at("H").get<double>(),
                inputs.at("modular_full").get<double>());
            result = bound_result_json(r);
        } else if (kind == "asymptotic") {
            const auto r = eplab::asymptotic_proportion_bound(
                eplab::profile_from_json(inputs.at("h")),
                eplab::profile_from_json(inputs.at("b")),
                inputs.at("epsilon").get<double>(),
                inputs.at("delta").get<double>(),
                inputs.at("n").get<double>());
            result = bound_result_json(r.bound);
            result["delta_threshold"] = r.delta_threshold;
            result["delta_admissible"] = r.delta_admissible;
        } else if (kind == "coloring") {
            const eplab::SubProbability P(
                inputs.at("mass").get<std::vector<double>>());
            const auto r = eplab::balanced_coloring_check(
                P, inputs.at("colors").get<int>(),
                inputs.at("epsilon").get<double>());
            result["exact_proportion"] = r.exact_proportion;
            result["bound"] = r.bound;
            result["pass"] = r.pass;
            result["max_atom"] = r.max_atom;
            result["maps_good"] = r.maps_good;
            result["maps_total"] = r.maps_total;
        } else if (kind == "conditional") {
            eplab::ConditionalBoundInputs in;
            in.fluct_cond = inputs.at("M_cond").get<double>();
            in.fluct_marg = inputs.at("M_marg").get<double>();
            in.H_cond = inputs.at("H_cond").get<double>();
            in.H_marg = inputs.at("H_marg").get<double>();
            in.ln_B = inputs.at("ln_B").get<double>();
            in.t1 = inputs.at("t1").get<double>();
            in.t2 = inputs.at("t2").get<double>();
            in.r = inputs.at("r").get<double>();
            in.s = inputs.at("s").get<double>();
            in.delta = inputs.at("delta").get<double>();
            const auto r = eplab::conditional_encoding_bound(in);
            result = bound_result_json(r.bound);
            result["fluct_threshold"] = r.fluct_threshold;
            result["entropy_gap_threshold"] = r.entropy_gap_threshold;
            result["alpha"] = r.alpha;
            result["beta"] = r.beta;
            result["gamma"] = r.gamma;
            result["R"] = r.R;
        } else if (kind == "single") {
            const auto r = eplab::single_var_encoding_bound(
                inputs.at("M").get<double>(), inputs.at("H").get<double>(),
                inputs.at("ln_B").get<double>(), inputs.at("t").get<double>(),
                inputs.at("r").get<double>(),
                inputs.at("delta").get<double>());
            result = bound_result_json(r.bound);
            result["fluct_threshold"] = r.fluct_threshold;
            result["entropy_gap_threshold"] = r.entropy_gap_threshold;
        } else if (kind == "simplified") {
            const auto r = eplab::simplified_encoding_bound(
                inputs.at("H").get<double>(),
                inputs.at("epsilon").get<double>(),
                inputs.at("ln_B").get<double>());
            result = bound_result_json(r.bound);
            result["fluct_threshold"] = r.fluct_threshold;
            result["entropy_gap_threshold"] = r.entropy_gap_threshold;
        } else {
            throw eplab::ParseError("unknown bound kind: " + kind);
        }
    } catch (const json::exception& e) {
        throw eplab::ParseError(std::string("bad bounds input: ") + e.what());
    }
    // echo the inputs for the audit trail
    ordered_json report;
    report["inputs"] = inputs;
    report["result"] = std::move(result);
    emit(report.dump(2) + "\n", a.out);
    return 0;
}

struct TrendArgs {
    std::string spec_path, out;
    std::vector<int> horizons;
    bool conditional = false;
};

int cmd_fluct_trend(const TrendArgs& a) {
    const auto spec = eplab::SourceSpec::from_json(
        eplab::parse_json_text(read_file(a.spec_path)));
    const auto rows =
        eplab::fluctuation_trend(spec, a.horizons, a.conditional);
    emit(eplab::trend_to_csv(rows), a.out);
    return 0;
}

struct PlotArgs {
    std::string report_path, out = "plotdata";
    bool svg = false;
};

int cmd_plotdata(const PlotArgs& a) {
    const json j = eplab::parse_json_text(read_file(a.report_path));
    // rebuild the report skeleton from JSON (only plotted fields needed)
    eplab::ExperimentReport report;
    try {
        for (const auto& r : j.at("rows")) {
            eplab::ExperimentRow row;
            row.n = r.at("n").get<int>();
            row.feasible = r.at("feasible").get<bool>();
            if (row.feasible) {
                row.source_rate = eplab::profile_from_json(r.at("source_rate"));
                row.convolution_rate =
                    eplab::profile_from_json(r.at("convolution_rate"));
                const auto& dq = r.at("distance_quantiles");
                row.distance = {dq.at("q25").get<double>(),
                                dq.at("median").get<double>(),
                                dq.at("q75").get<double>(),
                                dq.at("max").get<double>()};
                const auto& p = r.at("proportion");
                row.proportion.value = p.at("value").get<double>();
                row.proportion.wilson = {p.at("wilson_lo").get<double>(),
                                         p.at("wilson_hi").get<double>()};
            }
            report.rows.push_back(std::move(row));
        }
    } catch (const json::exception& e) {
        throw eplab::ParseError(std::string("bad report JSON: ") + e.what());
    }
    eplab::emit_plotdata(report, a.out, a.svg);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"entropy-profile laboratory"};
    app.require_subcommand(1);

    ProfileArgs pa;
    auto* profile = app.add_subcommand(
        "profile", "entropy-rate profile of a source over all subsets");
    profile->add_option("--spec", pa.spec_path, "source spec JSON")
        ->required();
    profile->add_option("--n", pa.n, "horizon for rate estimates");
    profile->add_option("--bracket-depth", pa.bracket_depth,
                        "sandwich depth for non-Markov projections");
    profile->add_option("--format", pa.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    profile->add_option("--out", pa.out, "output file (stdout if omitted)");

    ConvolveArgs ca;
    auto* conv = app.add_subcommand("convolve",
                                    "convolution of two profile files");
    conv->add_option("--u", ca.u_path, "profile JSON over k coordinates")
        ->required();
    conv->add_option("--v", ca.v_path, "profile JSON over l <= k coordinates")
        ->required();
    conv->add_option("--out", ca.out, "output file (stdout if omitted)");

    ExperimentArgs ea;
    auto* exp = app.add_subcommand(
        "encode-experiment", "sample or enumerate coordinate-wise encodings "
                             "across horizons and test typicality");
    exp->add_option("--spec", ea.spec_path, "experiment spec JSON")
        ->required();
    auto* seed_opt = exp->add_option("--seed", ea.seed, "override spec seed");
    exp->add_option("--trials", ea.trials, "override spec trial count");
    exp->add_option("--epsilon", ea.epsilon, "override spec epsilon");
    exp->add_option("--format", ea.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    exp->add_option("--out", ea.out, "output file (stdout if omitted)");

    BoundsArgs ba;
    auto* bounds = app.add_subcommand("bounds",
                                      "evaluate a proportion bound formula");
    bounds->add_option("--spec", ba.spec_path, "bound inputs JSON")
        ->required();
    bounds->add_option("--out", ba.out, "output file (stdout if omitted)");

    TrendArgs ta;
    auto* trend = app.add_subcommand(
        "fluct-trend", "relative fluctuation across horizons (CSV)");
    trend->add_option("--spec", ta.spec_path, "source spec JSON")->required();
    trend->add_option("--horizons", ta.horizons, "horizon list")
        ->required()
        ->delimiter(',');
    trend->add_flag("--conditional", ta.conditional,
                    "also report M_rel(block 1 | block 2)");
    trend->add_option("--out", ta.out, "output file (stdout if omitted)");

    PlotArgs ga;
    auto* plot = app.add_subcommand("plotdata",
                                    "emit plot-ready panels from a report");
    plot->add_option("--report", ga.report_path, "experiment report JSON")
        ->required();
    plot->add_option("--out", ga.out, "output directory");
    plot->add_flag("--svg", ga.svg, "also write SVG line charts");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*profile) return cmd_profile(pa);
        if (*conv) return cmd_convolve(ca);
        if (*exp) {
            ea.seed_set = seed_opt->count() > 0;
            return cmd_encode_experiment(ea);
        }
        if (*bounds) return cmd_bounds(ba);
        if (*trend) return cmd_fluct_trend(ta);
        if (*plot) return cmd_plotdata(ga);
    } catch (const eplab::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const eplab::CapacityError& e) {
        std::cerr << "capacity error: " << e.what() << "\n";
        return 3;
    } catch (const eplab::DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 4;
    } catch (const std::invalid_argument& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
