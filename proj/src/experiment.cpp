#include "eplab/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>

#include "eplab/fluctuation.hpp"
#include "eplab/rng.hpp"

namespace eplab {

namespace {

double seconds_since(
    const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         t0)
        .count();
}

ProfileVector scaled(const ProfileVector& p, double factor) {
    ProfileVector out(p.ground_size());
    for (Mask I = 1; I < p.component_count(); ++I) out.set(I, p[I] * factor);
    return out;
}

}  // namespace

std::vector<std::uint32_t> AlphabetSchedule::sizes_for(int n) const {
    if (auto it = explicit_sizes.find(n); it != explicit_sizes.end()) {
        if (static_cast<int>(it->second.size()) != ell)
            throw ParseError("schedule entry length != ell");
        return it->second;
    }
    if (growth_exponent) {
        const double bits = std::ceil(*growth_exponent * n);
        if (bits < 0.0 || bits > 31.0)
            throw CapacityError("alphabet growth rule overflows 32 bits");
        const auto size =
            static_cast<std::uint32_t>(1u << static_cast<unsigned>(bits));
        return std::vector<std::uint32_t>(static_cast<std::size_t>(ell),
                                          size);
    }
    throw ParseError("alphabet schedule undefined for horizon " +
                     std::to_string(n));
}

ordered_json ExperimentSpec::to_json() const {
    ordered_json j;
    j["source"] = source.to_json();
    j["horizons"] = horizons;
    ordered_json sched;
    sched["ell"] = schedule.ell;
    if (schedule.growth_exponent)
        sched["growth_exponent"] = *schedule.growth_exponent;
    if (!schedule.explicit_sizes.empty()) {
        ordered_json ex = ordered_json::object();
        for (const auto& [n, sizes] : schedule.explicit_sizes)
            ex[std::to_string(n)] = sizes;
        sched["explicit"] = std::move(ex);
    }
    j["schedule"] = std::move(sched);
    j["epsilon"] = epsilon;
    if (delta) j["delta"] = *delta;
    j["trials"] = trials;
    j["seed"] = seed;
    j["mode"] = exact ? "exact" : "monte_carlo";
    return j;
}

ExperimentSpec ExperimentSpec::from_json(const nlohmann::json& j) {
    try {
        ExperimentSpec spec;
        spec.source = SourceSpec::from_json(j.at("source"));
        spec.horizons = j.at("horizons").get<std::vector<int>>();
        if (spec.horizons.empty())
            throw ParseError("need at least one horizon");
        for (std::size_t i = 0; i < spec.horizons.size(); ++i) {
            if (spec.horizons[i] < 1)
                throw ParseError("horizons must be positive");
            if (i > 0 && spec.horizons[i] <= spec.horizons[i - 1])
                throw ParseError("horizons must be increasing");
        }
        const auto& sched = j.at("schedule");
        spec.schedule.ell = sched.at("ell").get<int>();
        if (spec.schedule.ell < 0 ||
            static_cast<std::size_t>(spec.schedule.ell) >
                spec.source.coord_count())
            throw ParseError("ell out of range for source");
        if (sched.contains("growth_exponent"))
            spec.schedule.growth_exponent =
                sched.at("growth_exponent").get<double>();
        if (sched.contains("explicit"))
            for (const auto& [key, sizes] : sched.at("explicit").items())
                spec.schedule.explicit_sizes[std::stoi(key)] =
                    sizes.get<std::vector<std::uint32_t>>();
        for (int n : spec.horizons) spec.schedule.sizes_for(n);  // defined?
        spec.epsilon = j.value("epsilon", 0.1);
        if (!(spec.epsilon > 0.0)) throw ParseError("epsilon must be > 0");
        if (j.contains("delta")) spec.delta = j.at("delta").get<double>();
        spec.trials = j.value("trials", std::uint64_t{200});
        if (spec.trials < 1) throw ParseError("trials must be >= 1");
        spec.seed = j.value("seed", std::uint64_t{0});
        const std::string mode = j.value("mode", std::string("monte_carlo"));
        if (mode != "exact" && mode != "monte_carlo")
            throw ParseError("mode must be exact or monte_carlo");
        spec.exact = mode == "exact";
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad experiment JSON: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("bad experiment values: ") + e.what());
    }
}

Quantiles quantiles_of(std::vector<double> values) {
    Quantiles q;
    if (values.empty()) return q;
    std::sort(values.begin(), values.end());
    const auto at = [&](double p) {
        const double pos = p * (static_cast<double>(values.size()) - 1.0);
        const auto lo = static_cast<std::size_t>(pos);
        const std::size_t hi = std::min(lo + 1, values.size() - 1);
        const double frac = pos - static_cast<double>(lo);
        return values[lo] * (1.0 - frac) + values[hi] * frac;
    };
    q.q25 = at(0.25);
    q.median = at(0.5);
    q.q75 = at(0.75);
    q.max = values.back();
    return q;
}

ExperimentReport run_encode_experiment(const ExperimentSpec& spec,
                                       const Caps& caps) {
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentReport report;
    report.spec = spec;

    for (int n : spec.horizons) {
        const auto row_t0 = std::chrono::steady_clock::now();
        ExperimentRow row;
        row.n = n;
        try {
            const JointDistribution dist =
                spec.source.horizon_distribution(n, caps);
            const auto sizes = spec.schedule.sizes_for(n);
            const EncodingEnsemble ensemble(dist.space(), sizes);
            const ModularProfile b(sizes);
            const ProfileVector source_profile = entropy_profile(dist, caps);
            const ProfileVector target = convolve(source_profile, b.profile);
            const double inv_n = 1.0 / static_cast<double>(n);
            row.source_rate = scaled(source_profile, inv_n);
            row.alphabet_rate = scaled(b.profile, inv_n);
            row.convolution_rate = scaled(target, inv_n);

            // typicality conditions on the rate scale: eps * n in nats
            const double scale_H = static_cast<double>(n);
            std::vector<double> distances;
            std::vector<double> flucts;
            ProportionEstimate est;
            const auto tally = [&](const EncodingDiagnostics& d) {
                distances.push_back(d.profile_distance * inv_n);
                flucts.push_back(d.max_fluct * inv_n);
                if (d.good) ++est.good;
                ++est.denominator;
            };
            if (spec.exact) {
                for (EncodingEnumerator en(ensemble, caps); en.valid();
                     en.advance())
                    tally(good_encoding_test(dist, en.current(), target,
                                             spec.epsilon, scale_H, caps));
                est.exact = true;
                est.value = static_cast<double>(est.good) /
                            static_cast<double>(est.denominator);
                est.wilson = {est.value, est.value};
            } else {
                for (std::uint64_t t = 0; t < spec.trials; ++t) {
                    // one stream per (horizon, trial)
                    CounterRng rng(spec.seed,
                                   (static_cast<std::uint64_t>(n) << 32) | t);
                    const Encoding f = sample_encoding(ensemble, rng);
                    tally(good_encoding_test(dist, f, target, spec.epsilon,
                                             scale_H, caps));
                }
                est.value = static_cast<double>(est.good) /
                            static_cast<double>(est.denominator);
                est.wilson = wilson95(est.good, est.denominator);
            }
            row.distance = quantiles_of(std::move(distances));
            row.fluctuation = quantiles_of(std::move(flucts));
            row.proportion = est;
            if (spec.delta)
                row.bound = asymptotic_proportion_bound(
                    row.source_rate, row.alphabet_rate, spec.epsilon,
                    *spec.delta, static_cast<double>(n));
            row.feasible = true;
        } catch (const CapacityError& e) {
            row.feasible = false;
            row.infeasible_reason = e.what();
        }
        row.wall_seconds = seconds_since(row_t0);
        report.rows.push_back(std::move(row));
    }
    report.wall_seconds = seconds_since(t0);
    return report;
}

namespace {

ordered_json quantiles_to_json(const Quantiles& q) {
    return ordered_json{
        {"q25", q.q25}, {"median", q.median}, {"q75", q.q75}, {"max", q.max}};
}

ordered_json proportion_to_json(const ProportionEstimate& e) {
    return ordered_json{{"mode", e.exact ? "exact" : "monte_carlo"},
                        {"value", e.value},
                        {"good", e.good},
                        {"denominator", e.denominator},
                        {"wilson_lo", e.wilson.lo},
                        {"wilson_hi", e.wilson.hi}};
}

ordered_json bound_to_json(const BoundResult& b) {
    return ordered_json{{"exponent", b.exponent},
                        {"proportion_lower_bound", b.proportion_lower_bound},
                        {"vacuous", b.vacuous},
                        {"saturated", b.saturated}};
}

}  // namespace

ordered_json report_to_json(const ExperimentReport& report) {
    ordered_json j;
    j["spec"] = report.spec.to_json();
    j["metadata"] = ordered_json{{"version", report.version},
                                 {"seed", report.spec.seed},
                                 {"wall_seconds", report.wall_seconds}};
    ordered_json rows = ordered_json::array();
    for (const auto& row : report.rows) {
        ordered_json r;
        r["n"] = row.n;
        r["feasible"] = row.feasible;
        if (!row.feasible) {
            r["infeasible_reason"] = row.infeasible_reason;
        } else {
            r["source_rate"] = profile_to_json(row.source_rate);
            r["alphabet_rate"] = profile_to_json(row.alphabet_rate);
            r["convolution_rate"] = profile_to_json(row.convolution_rate);
            r["distance_quantiles"] = quantiles_to_json(row.distance);
            r["fluctuation_quantiles"] = quantiles_to_json(row.fluctuation);
            r["proportion"] = proportion_to_json(row.proportion);
            if (row.bound) {
                ordered_json b = bound_to_json(row.bound->bound);
                b["delta_threshold"] = row.bound->delta_threshold;
                b["delta_admissible"] = row.bound->delta_admissible;
                r["bound"] = std::move(b);
            }
        }
        r["wall_seconds"] = row.wall_seconds;
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    return j;
}

std::string csv_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

namespace {

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace

std::string report_to_csv(const ExperimentReport& report) {
    std::string out;
    // header: fixed columns, then per-subset rate columns
    int k = 0, ell = 0;
    for (const auto& row : report.rows)
        if (row.feasible) {
            k = row.source_rate.ground_size();
            ell = row.alphabet_rate.ground_size();
            break;
        }
    std::vector<std::string> cols{"n", "feasible"};
    for (Mask I = 1; I < (Mask{1} << k); ++I)
        cols.push_back("H_rate[" + subset_label(I) + "]");
    for (Mask I = 1; I < (Mask{1} << ell); ++I)
        cols.push_back("B_rate[" + subset_label(I) + "]");
    for (Mask I = 1; I < (Mask{1} << k); ++I)
        cols.push_back("conv_rate[" + subset_label(I) + "]");
    for (const char* q : {"q25", "median", "q75", "max"})
        cols.push_back(std::string("distance_") + q);
    for (const char* q : {"q25", "median", "q75", "max"})
        cols.push_back(std::string("fluct_") + q);
    for (const char* c : {"proportion", "wilson_lo", "wilson_hi", "good",
                          "denominator", "mode"})
        cols.emplace_back(c);
    for (std::size_t i = 0; i < cols.size(); ++i)
        out += (i ? "," : "") + csv_quote(cols[i]);
    out += "\r\n";

    for (const auto& row : report.rows) {
        std::vector<std::string> vals{std::to_string(row.n),
                                      row.feasible ? "true" : "false"};
        if (!row.feasible) {
            vals.resize(cols.size(), "");
        } else {
            for (Mask I = 1; I < (Mask{1} << k); ++I)
                vals.push_back(csv_number(row.source_rate[I]));
            for (Mask I = 1; I < (Mask{1} << ell); ++I)
                vals.push_back(csv_number(row.alphabet_rate[I]));
            for (Mask I = 1; I < (Mask{1} << k); ++I)
                vals.push_back(csv_number(row.convolution_rate[I]));
            for (double v : {row.distance.q25, row.distance.median,
                             row.distance.q75, row.distance.max})
                vals.push_back(csv_number(v));
            for (double v : {row.fluctuation.q25, row.fluctuation.median,
                             row.fluctuation.q75, row.fluctuation.max})
                vals.push_back(csv_number(v));
            vals.push_back(csv_number(row.proportion.value));
            vals.push_back(csv_number(row.proportion.wilson.lo));
            vals.push_back(csv_number(row.proportion.wilson.hi));
            vals.push_back(std::to_string(row.proportion.good));
            vals.push_back(std::to_string(row.proportion.denominator));
            vals.emplace_back(row.proportion.exact ? "exact" : "monte_carlo");
        }
        for (std::size_t i = 0; i < vals.size(); ++i)
            out += (i ? "," : "") + csv_quote(vals[i]);
        out += "\r\n";
    }
    return out;
}

std::vector<FluctTrendRow> fluctuation_trend(const SourceSpec& source,
                                             const std::vector<int>& horizons,
                                             bool conditional,
                                             const Caps& caps) {
    if (conditional && source.coord_count() != 2)
        throw std::invalid_argument(
            "conditional trend needs a two-coordinate source");
    std::vector<FluctTrendRow> rows;
    for (int n : horizons) {
        FluctTrendRow row;
        row.n = n;
        try {
            if (source.type == "iid" && !conditional) {
                const auto f = iid_power_fluctuation(*source.base, n, caps);
                row.M_rel = f.M_rel;
                row.D_rel = f.D_rel;
            } else {
                const JointDistribution dist =
                    source.horizon_distribution(n, caps);
                const FluctuationReport rep = fluctuation_report(dist);
                row.M_rel = rep.M_rel;
                if (source.type == "iid") row.D_rel = rep.D_rel;
                if (conditional) {
                    const std::size_t k = dist.space().coord_count();
                    const Mask first = 1;
                    const Mask rest = full_mask(k) & ~first;
                    row.M_rel_cond = relative_conditional_fluctuation(
                        dist, first, rest);
                }
            }
            row.feasible = true;
        } catch (const CapacityError& e) {
            row.feasible = false;
            row.infeasible_reason = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string trend_to_csv(const std::vector<FluctTrendRow>& rows) {
    std::string out = "n,feasible,M_rel,D_rel,M_rel_cond\r\n";
    for (const auto& row : rows) {
        out += std::to_string(row.n);
        out += row.feasible ? ",true," : ",false,";
        if (row.feasible) out += csv_number(row.M_rel);
        out += ',';
        if (row.feasible && row.D_rel) out += csv_number(*row.D_rel);
        out += ',';
        if (row.feasible && row.M_rel_cond) out += csv_number(*row.M_rel_cond);
        out += "\r\n";
    }
    return out;
}

namespace {

struct Series {
    std::string name;
    std::vector<std::pair<double, double>> points;
};

void write_svg(const std::filesystem::path& path, const std::string& title,
               const std::vector<Series>& series) {
    constexpr int W = 640, H = 400, ML = 60, MR = 20, MT = 40, MB = 40;
    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    bool first = true;
    for (const auto& s : series)
        for (const auto& [x, y] : s.points) {
            if (first) {
                xmin = xmax = x;
                ymin = ymax = y;
                first = false;
            }
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    const auto sx = [&](double x) {
        return ML + (x - xmin) / (xmax - xmin) * (W - ML - MR);
    };
    const auto sy = [&](double y) {
        return H - MB - (y - ymin) / (ymax - ymin) * (H - MT - MB);
    };
    static const char* colors[] = {"#3366cc", "#dc3912", "#ff9900",
                                   "#109618", "#990099", "#0099c6"};
    std::ofstream f(path);
    f << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
      << "\" height=\"" << H << "\">\n"
      << "<rect width=\"" << W << "\" height=\"" << H
      << "\" fill=\"white\"/>\n"
      << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\">"
      << title << "</text>\n"
      << "<line x1=\"" << ML << "\" y1=\"" << H - MB << "\" x2=\"" << W - MR
      << "\" y2=\"" << H - MB << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << ML << "\" y1=\"" << MT << "\" x2=\"" << ML
      << "\" y2=\"" << H - MB << "\" stroke=\"black\"/>\n";
    f << "<text x=\"" << ML << "\" y=\"" << H - MB + 16 << "\">"
      << csv_number(xmin) << "</text>\n"
      << "<text x=\"" << W - MR - 30 << "\" y=\"" << H - MB + 16 << "\">"
      << csv_number(xmax) << "</text>\n"
      << "<text x=\"4\" y=\"" << H - MB << "\">" << csv_number(ymin)
      << "</text>\n"
      << "<text x=\"4\" y=\"" << MT + 8 << "\">" << csv_number(ymax)
      << "</text>\n";
    int ci = 0;
    for (const auto& s : series) {
        if (!s.points.empty()) {
            f << "<polyline fill=\"none\" stroke=\""
              << colors[ci % 6] << "\" points=\"";
            for (const auto& [x, y] : s.points)
                f << sx(x) << ',' << sy(y) << ' ';
            f << "\"/>\n";
        }
        f << "<text x=\"" << W - MR - 150 << "\" y=\"" << MT + 14 * (ci + 1)
          << "\" fill=\"" << colors[ci % 6] << "\">" << s.name
          << "</text>\n";
        ++ci;
    }
    f << "</svg>\n";
}

void write_dat(const std::filesystem::path& path,
               const std::vector<std::string>& cols,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream f(path);
    f << "#";
    for (const auto& c : cols) f << ' ' << c;
    f << '\n';
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i)
            f << (i ? " " : "") << csv_number(r[i]);
        f << '\n';
    }
}

}  // namespace

void emit_plotdata(const ExperimentReport& report,
                   const std::filesystem::path& dir, bool svg) {
    std::filesystem::create_directories(dir);

    std::vector<std::vector<double>> dist_rows, prop_rows, rate_rows;
    int k = 0;
    for (const auto& row : report.rows) {
        if (!row.feasible) continue;
        k = row.source_rate.ground_size();
        const double n = row.n;
        dist_rows.push_back({n, row.distance.q25, row.distance.median,
                             row.distance.q75, row.distance.max});
        prop_rows.push_back({n, row.proportion.value, row.proportion.wilson.lo,
                             row.proportion.wilson.hi});
        std::vector<double> r{n};
        for (Mask I = 1; I < (Mask{1} << k); ++I)
            r.push_back(row.source_rate[I]);
        for (Mask I = 1; I < (Mask{1} << k); ++I)
            r.push_back(row.convolution_rate[I]);
        rate_rows.push_back(std::move(r));
    }

    write_dat(dir / "distance_vs_n.dat",
              {"n", "q25", "median", "q75", "max"}, dist_rows);
    write_dat(dir / "proportion_vs_n.dat",
              {"n", "proportion", "wilson_lo", "wilson_hi"}, prop_rows);
    std::vector<std::string> rate_cols{"n"};
    for (Mask I = 1; I < (Mask{1} << k); ++I)
        rate_cols.push_back("H_rate[" + subset_label(I) + "]");
    for (Mask I = 1; I < (Mask{1} << k); ++I)
        rate_cols.push_back("conv_rate[" + subset_label(I) + "]");
    write_dat(dir / "rate_convergence.dat", rate_cols, rate_rows);

    if (!svg) return;
    {
        Series med{"median distance", {}}, q75{"q75", {}};
        for (const auto& r : dist_rows) {
            med.points.emplace_back(r[0], r[2]);
            q75.points.emplace_back(r[0], r[3]);
        }
        write_svg(dir / "distance_vs_n.svg", "profile distance vs n",
                  {med, q75});
    }
    {
        Series p{"proportion good", {}};
        for (const auto& r : prop_rows) p.points.emplace_back(r[0], r[1]);
        write_svg(dir / "proportion_vs_n.svg", "proportion vs n", {p});
    }
    {
        std::vector<Series> series;
        for (Mask I = 1; I < (Mask{1} << k); ++I) {
            Series s{"H_rate[" + subset_label(I) + "]", {}};
            for (const auto& r : rate_rows)
                s.points.emplace_back(r[0], r[I]);
            series.push_back(std::move(s));
        }
        write_svg(dir / "rate_convergence.svg", "rate convergence", series);
    }
}

}  // namespace eplab
