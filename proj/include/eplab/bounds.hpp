#pragma once

#include <cstdint>
#include <vector>

#include "eplab/distribution.hpp"
#include "eplab/encoding.hpp"
#include "eplab/profile.hpp"

namespace eplab {

// All proportion bounds have the shape 1 - exp(E). The exponent E is kept
// in log-space: the inner doubly-exponential term overflows doubles long
// before the interesting regime, in which case E is reported as -inf and
// the bound saturates at 1.
struct BoundResult {
    double exponent = 0.0;            // E, possibly -inf
    double proportion_lower_bound = 0.0;  // 1 - exp(E), in (-inf, 1]
    bool vacuous = false;             // E >= 0, i.e. bound <= 0
    bool saturated = false;           // bound indistinguishable from 1
};

// Lower bound on the proportion of encodings with profile within eps*H of
// the convolution and fluctuation at most eps*H:
// 1 - l 2^{k-1} exp(-(ln2/2) e^{dH} + modular_full + 2H).
BoundResult encoding_proportion_bound(int k, int ell, double delta, double H,
                                      double modular_full);

// The three hypothesis terms the proportion bound is stated under,
// evaluated itemized so experiments can probe outside them. The entropy
// condition compares H against the joint entropy of the first ell
// coordinates.
struct EncodingBoundHypotheses {
    double H_ell = 0.0;        // H(X_{1..ell})
    double max_fluct = 0.0;    // M'(X)
    bool entropy_ok = false;   // H > H(X_{1..ell})
    bool delta_ok = false;     // H >= 2 ln2 / delta
    bool fluct_ok = false;     // H >= M'(X) / delta
    bool all() const { return entropy_ok && delta_ok && fluct_ok; }
};
EncodingBoundHypotheses encoding_bound_hypotheses(
    const JointDistribution& dist, int ell, double H, double delta,
    const Caps& caps = {});

// Asymptotic-regime bound 1 - exp(-e^{dn}) together with the delta
// admissibility threshold (min(eps, h_full)/(121 h_full))^{2^ell}.
struct AsymptoticBoundResult {
    BoundResult bound;
    double delta_threshold = 0.0;
    bool delta_admissible = false;
};
AsymptoticBoundResult asymptotic_proportion_bound(const ProfileVector& h,
                                                  const ProfileVector& b,
                                                  double eps, double delta,
                                                  double n);

// Exhaustive check of the balanced-coloring bound: the proportion of maps
// f from the atoms into k colors with P(f^{-1}(j)) <= (1+eps)/k for all j,
// against the bound 1 - k exp(-(eps/(2kq)) ln(1+eps)), q the largest atom.
struct BalancedColoringResult {
    double exact_proportion = 0.0;
    double bound = 0.0;
    bool pass = false;  // exact >= bound
    double max_atom = 0.0;
    std::uint64_t maps_good = 0;
    std::uint64_t maps_total = 0;
};
BalancedColoringResult balanced_coloring_check(const SubProbability& P,
                                               int colors, double eps,
                                               const Caps& caps = {});

// One-variable encoding proposition, conditional form. alpha = M(X|Y)/t1,
// beta = M(Y)/t2, R = min(H(X|Y), ln|B|), gamma = alpha^{1-r} + beta^{1-s}.
struct ConditionalBoundInputs {
    double fluct_cond = 0.0;   // M(X|Y)
    double fluct_marg = 0.0;   // M(Y)
    double H_cond = 0.0;       // H(X|Y)
    double H_marg = 0.0;       // H(Y)
    double ln_B = 0.0;         // ln |B|
    double t1 = 1.0;
    double t2 = 1.0;
    double r = 0.5;
    double s = 0.5;
    double delta = 0.0;
};
struct ConditionalBoundResult {
    BoundResult bound;
    double fluct_threshold = 0.0;       // 2 gamma R + 2 delta + 4 ln2
    double entropy_gap_threshold = 0.0; // gamma R + delta + 2 ln2
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double R = 0.0;
};
ConditionalBoundResult conditional_encoding_bound(
    const ConditionalBoundInputs& in);

// Unconditional specialization, evaluated by its own direct formula so the
// two routes can be cross-checked.
ConditionalBoundResult single_var_encoding_bound(double fluct, double H,
                                                 double ln_B, double t,
                                                 double r, double delta);

// Fixed-parameter corollary: thresholds 10 sqrt(eps) H and 5 sqrt(eps) H,
// bound 1 - exp(-(ln2/2) e^{eps H} + ln|B| + 2H).
struct SimplifiedBoundResult {
    BoundResult bound;
    double fluct_threshold = 0.0;
    double entropy_gap_threshold = 0.0;
};
SimplifiedBoundResult simplified_encoding_bound(double H, double eps,
                                                double ln_B);

struct SimplifiedHypotheses {
    double H_joint = 0.0;    // H(X_I, X_J)
    double M_joint = 0.0;    // M(X_I, X_J)
    double M_marg = 0.0;     // M(X_J)
    bool eps_in_range = false;      // eps <= 1
    bool joint_entropy_ok = false;  // H >= H(X,Y)
    bool joint_fluct_ok = false;    // H >= M(X,Y)/eps
    bool marg_fluct_ok = false;     // H >= M(Y)/eps
    bool floor_ok = false;          // H >= 4 ln2 / eps
    bool all() const {
        return eps_in_range && joint_entropy_ok && joint_fluct_ok &&
               marg_fluct_ok && floor_ok;
    }
};
SimplifiedHypotheses simplified_bound_hypotheses(const JointDistribution& dist,
                                                 Mask I, Mask J, double H,
                                                 double eps);

// Joins a measured proportion of good encodings with a theoretical lower
// bound. Pass is trivially true when the bound is vacuous.
struct EmpiricalVsBound {
    ProportionEstimate empirical;
    BoundResult bound;
    bool pass = false;
};
EmpiricalVsBound empirical_vs_bound_exact(const JointDistribution& dist,
                                          const EncodingEnsemble& ensemble,
                                          double eps, double H,
                                          const BoundResult& bound,
                                          const Caps& caps = {});
EmpiricalVsBound empirical_vs_bound_monte_carlo(
    const JointDistribution& dist, const EncodingEnsemble& ensemble,
    double eps, double H, const BoundResult& bound, std::uint64_t trials,
    std::uint64_t seed, const Caps& caps = {});

}  // namespace eplab
