#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "eplab/distribution.hpp"

namespace eplab {

// All quantities are in nats.

// -ln P(x) for every x in the support, ordered by flat index.
std::vector<std::pair<std::uint64_t, double>> information_values(
    const JointDistribution& dist);

double entropy(const JointDistribution& dist);

// Mean fluctuation of the information function from a: E |i_P - a|.
double mean_fluctuation(const JointDistribution& dist, double a);
// M(P) = M(P, H(P)).
double mean_fluctuation(const JointDistribution& dist);

struct OneSided {
    double plus = 0.0;   // E (i_P - a)^+
    double minus = 0.0;  // E (i_P - a)^-
};
OneSided one_sided_fluctuation(const JointDistribution& dist, double a);

struct FluctuationReport {
    double H = 0.0;
    double M = 0.0;
    double M_plus = 0.0;
    double M_minus = 0.0;
    double D = 0.0;        // M(P, ln #support)
    double D_plus = 0.0;
    double D_minus = 0.0;
    double M_rel = 0.0;    // M/H, or 0 when H = 0
    double D_rel = 0.0;    // D/H, or 0 when H = 0
    double kl_to_uniform_support = 0.0;  // D - 2 D^+
};
FluctuationReport fluctuation_report(const JointDistribution& dist);

// Conditional information i_{X_I|X_J} = i_{X_{I u J}} - i_{X_J}, reported on
// the support of the (I u J)-marginal (flat indices of that marginal).
// I and J must be disjoint.
std::vector<std::pair<std::uint64_t, double>> conditional_information(
    const JointDistribution& dist, Mask I, Mask J);

double conditional_entropy(const JointDistribution& dist, Mask I, Mask J);

// M(X_I | X_J, a) = E_{P_{I u J}} |i_{X_I|X_J} - a|; defaults to
// a = H(X_I|X_J) in the two-argument overload.
double conditional_fluctuation(const JointDistribution& dist, Mask I, Mask J,
                               double a);
double conditional_fluctuation(const JointDistribution& dist, Mask I, Mask J);
OneSided one_sided_conditional_fluctuation(const JointDistribution& dist,
                                           Mask I, Mask J, double a);
// M_rel(X_I|X_J); 0 when H(X_I|X_J) = 0.
double relative_conditional_fluctuation(const JointDistribution& dist, Mask I,
                                        Mask J);

// Maximal mean fluctuation M'(X) = max over all subsets I of M(X_I).
double max_fluctuation(const JointDistribution& dist, const Caps& caps = {});

// Closed-form fluctuation quantities of the n-fold i.i.d. power of a base
// distribution, evaluated by enumerating symbol-count compositions
// (multinomial classes) instead of the 2^O(n) product space.
struct IidPowerFluctuation {
    int n = 0;
    double H = 0.0;      // H(X^n) = n H(base)
    double M = 0.0;      // M(X^n)
    double D = 0.0;      // M(X^n, n ln #s(base))
    double M_rel = 0.0;
    double D_rel = 0.0;
};
IidPowerFluctuation iid_power_fluctuation(const JointDistribution& base,
                                          int n, const Caps& caps = {});

}  // namespace eplab
