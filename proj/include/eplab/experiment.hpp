#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "eplab/bounds.hpp"
#include "eplab/serialize.hpp"

namespace eplab {

inline constexpr const char* kVersion = "0.1.0";

// Output alphabet sizes per horizon: either explicit lists or the growth
// rule |B_i^{(n)}| = 2^{ceil(c n)} for every encoded coordinate.
struct AlphabetSchedule {
    int ell = 0;
    std::map<int, std::vector<std::uint32_t>> explicit_sizes;
    std::optional<double> growth_exponent;  // c in 2^{ceil(c n)}

    std::vector<std::uint32_t> sizes_for(int n) const;
};

struct ExperimentSpec {
    SourceSpec source;
    std::vector<int> horizons;
    AlphabetSchedule schedule;
    double epsilon = 0.1;
    std::optional<double> delta;
    std::uint64_t trials = 200;
    std::uint64_t seed = 0;
    bool exact = false;  // enumerate instead of sampling

    ordered_json to_json() const;
    static ExperimentSpec from_json(const nlohmann::json& j);
};

struct Quantiles {
    double q25 = 0.0;
    double median = 0.0;
    double q75 = 0.0;
    double max = 0.0;
};
Quantiles quantiles_of(std::vector<double> values);

struct ExperimentRow {
    int n = 0;
    bool feasible = false;
    std::string infeasible_reason;
    ProfileVector source_rate{0};       // H(X^{(n)})/n per subset
    ProfileVector alphabet_rate{0};     // H(B^{(n)})/n per subset of 1..ell
    ProfileVector convolution_rate{0};  // (source * alphabet)/n
    Quantiles distance;     // (1/n)||H(f(X^{(n)})) - n (h*b)||_max
    Quantiles fluctuation;  // M'(f(X^{(n)}))/n
    ProportionEstimate proportion;  // conditions at eps on the rate scale
    std::optional<AsymptoticBoundResult> bound;
    double wall_seconds = 0.0;
};

struct ExperimentReport {
    ExperimentSpec spec;
    std::vector<ExperimentRow> rows;
    std::string version = kVersion;
    double wall_seconds = 0.0;
};

ExperimentReport run_encode_experiment(const ExperimentSpec& spec,
                                       const Caps& caps = {});

// Deterministic given the spec: wall_seconds fields are the only
// non-reproducible content.
ordered_json report_to_json(const ExperimentReport& report);
std::string report_to_csv(const ExperimentReport& report);

struct FluctTrendRow {
    int n = 0;
    bool feasible = false;
    std::string infeasible_reason;
    double M_rel = 0.0;
    std::optional<double> D_rel;       // closed form, i.i.d. sources only
    std::optional<double> M_rel_cond;  // M_rel(block 1 | block 2)
};

// Relative-fluctuation trend across horizons. For i.i.d. sources the values
// come from the multinomial closed form; for chains from the explicit path
// distribution at small n. `conditional` adds M_rel(X_1^{(n)} | X_2^{(n)})
// for two-coordinate sources.
std::vector<FluctTrendRow> fluctuation_trend(const SourceSpec& source,
                                             const std::vector<int>& horizons,
                                             bool conditional,
                                             const Caps& caps = {});
std::string trend_to_csv(const std::vector<FluctTrendRow>& rows);

// One whitespace-delimited data file per panel, plus simple SVG line charts
// when requested.
void emit_plotdata(const ExperimentReport& report,
                   const std::filesystem::path& dir, bool svg);

// 12 significant digits, RFC-4180 quoting where needed.
std::string csv_number(double v);

}  // namespace eplab
