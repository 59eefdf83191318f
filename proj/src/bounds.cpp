#include "eplab/bounds.hpp"

#include <cmath>
#include <limits>

#include "eplab/fluctuation.hpp"

namespace eplab {

namespace {

constexpr double kLn2 = 0.6931471805599453;

// 1 - exp(-coeff e^{inner} + linear), evaluated in log-space.
BoundResult exp_bound(double inner, double coeff, double linear) {
    BoundResult r;
    if (inner > 700.0) {
        // e^{inner} overflows; the bound is 1 for every practical purpose
        r.exponent = -std::numeric_limits<double>::infinity();
        r.proportion_lower_bound = 1.0;
        r.saturated = true;
        return r;
    }
    const double E = -coeff * std::exp(inner) + linear;
    r.exponent = E;
    if (E >= 0.0) {
        r.vacuous = true;
        r.proportion_lower_bound = 1.0 - std::exp(E);
    } else {
        r.proportion_lower_bound = -std::expm1(E);
        r.saturated = r.proportion_lower_bound == 1.0;
    }
    return r;
}

}  // namespace

BoundResult encoding_proportion_bound(int k, int ell, double delta, double H,
                                      double modular_full) {
    if (k < 1 || ell < 0 || ell > k)
        throw std::invalid_argument("need 1 <= k and 0 <= ell <= k");
    if (!(delta > 0.0) || !(H > 0.0))
        throw std::invalid_argument("need delta, H > 0");
    if (ell == 0) {
        BoundResult r;
        r.exponent = -std::numeric_limits<double>::infinity();
        r.proportion_lower_bound = 1.0;
        r.saturated = true;
        return r;
    }
    const double linear =
        modular_full + 2.0 * H + std::log(static_cast<double>(ell)) +
        (k - 1) * kLn2;
    return exp_bound(delta * H, kLn2 / 2.0, linear);
}

EncodingBoundHypotheses encoding_bound_hypotheses(
    const JointDistribution& dist, int ell, double H, double delta,
    const Caps& caps) {
    if (ell < 0 ||
        static_cast<std::size_t>(ell) > dist.space().coord_count())
        throw std::invalid_argument("bad ell");
    if (!(delta > 0.0)) throw std::invalid_argument("need delta > 0");
    EncodingBoundHypotheses h;
    const Mask enc = full_mask(static_cast<std::size_t>(ell));
    h.H_ell = ell == 0 ? 0.0 : entropy(marginal(dist, enc));
    h.max_fluct = max_fluctuation(dist, caps);
    h.entropy_ok = H > h.H_ell;
    h.delta_ok = H >= 2.0 * kLn2 / delta;
    h.fluct_ok = H >= h.max_fluct / delta;
    return h;
}

AsymptoticBoundResult asymptotic_proportion_bound(const ProfileVector& h,
                                                  const ProfileVector& b,
                                                  double eps, double delta,
                                                  double n) {
    const double h_full = h[full_mask(
        static_cast<std::size_t>(h.ground_size()))];
    if (!(h_full > 0.0))
        throw DomainError("full-set entropy rate must be positive");
    if (!(eps > 0.0) || !(delta > 0.0) || !(n > 0.0))
        throw std::invalid_argument("need eps, delta, n > 0");
    AsymptoticBoundResult out;
    const double base = std::min(eps, h_full) / (121.0 * h_full);
    out.delta_threshold =
        std::pow(base, std::exp2(static_cast<double>(b.ground_size())));
    out.delta_admissible = delta < out.delta_threshold;
    out.bound = exp_bound(delta * n, 1.0, 0.0);
    return out;
}

BalancedColoringResult balanced_coloring_check(const SubProbability& P,
                                               int colors, double eps,
                                               const Caps& caps) {
    const std::uint64_t atoms = P.space().total_size();
    if (colors < 1 || !(eps > 0.0))
        throw std::invalid_argument("need colors >= 1 and eps > 0");
    if (atoms > 12 || colors > 4)
        throw CapacityError("exhaustive coloring check limited to 12 atoms, 4 colors");
    std::uint64_t total = 1;
    for (std::uint64_t i = 0; i < atoms; ++i) {
        total *= static_cast<std::uint64_t>(colors);
        if (total > caps.max_enumeration)
            throw CapacityError("coloring enumeration over cap");
    }

    BalancedColoringResult res;
    res.max_atom = P.max_atom();
    res.maps_total = total;
    const double cap_per_color = (1.0 + eps) / colors;
    const auto mass = P.mass();

    std::vector<int> color(atoms, 0);
    std::vector<double> bucket(static_cast<std::size_t>(colors), 0.0);
    for (std::uint64_t m = 0;; ++m) {
        // fresh bucket sums per map: no accumulated rounding across maps
        std::fill(bucket.begin(), bucket.end(), 0.0);
        for (std::uint64_t i = 0; i < atoms; ++i)
            bucket[static_cast<std::size_t>(color[i])] += mass[i];
        bool ok = true;
        for (double bsum : bucket)
            if (bsum > cap_per_color) {
                ok = false;
                break;
            }
        if (ok) ++res.maps_good;
        if (m + 1 == total) break;
        for (std::uint64_t i = atoms; i-- > 0;) {
            if (color[i] + 1 < colors) {
                ++color[i];
                break;
            }
            color[i] = 0;
        }
    }
    res.exact_proportion = static_cast<double>(res.maps_good) /
                           static_cast<double>(res.maps_total);

    if (res.max_atom == 0.0) {
        res.bound = 1.0;
    } else {
        const double arg =
            -(eps / (2.0 * colors * res.max_atom)) * std::log1p(eps) +
            std::log(static_cast<double>(colors));
        res.bound = -std::expm1(arg);
    }
    res.pass = res.exact_proportion >= res.bound;
    return res;
}

ConditionalBoundResult conditional_encoding_bound(
    const ConditionalBoundInputs& in) {
    if (!(in.t1 > 0.0) || !(in.t2 > 0.0))
        throw std::invalid_argument("need t1, t2 > 0");
    if (!(in.r > 0.0 && in.r < 1.0 && in.s > 0.0 && in.s < 1.0))
        throw std::invalid_argument("need r, s in (0,1)");
    if (in.delta < 0.0) throw std::invalid_argument("need delta >= 0");
    ConditionalBoundResult out;
    out.alpha = in.fluct_cond / in.t1;
    out.beta = in.fluct_marg / in.t2;
    out.gamma = std::pow(out.alpha, 1.0 - in.r) + std::pow(out.beta, 1.0 - in.s);
    out.R = std::min(in.H_cond, in.ln_B);
    out.fluct_threshold = 2.0 * out.gamma * out.R + 2.0 * in.delta + 4.0 * kLn2;
    out.entropy_gap_threshold = out.gamma * out.R + in.delta + 2.0 * kLn2;
    const double inner =
        in.delta + in.H_cond - out.R - std::pow(out.alpha, in.r) * in.t1;
    const double linear =
        in.ln_B + in.H_marg + std::pow(out.beta, in.s) * in.t2;
    out.bound = exp_bound(inner, kLn2 / 2.0, linear);
    return out;
}

ConditionalBoundResult single_var_encoding_bound(double fluct, double H,
                                                 double ln_B, double t,
                                                 double r, double delta) {
    if (!(t > 0.0)) throw std::invalid_argument("need t > 0");
    if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("need r in (0,1)");
    if (delta < 0.0) throw std::invalid_argument("need delta >= 0");
    ConditionalBoundResult out;
    out.alpha = fluct / t;
    out.gamma = std::pow(out.alpha, 1.0 - r);
    out.R = std::min(H, ln_B);
    out.fluct_threshold = 2.0 * out.gamma * out.R + 2.0 * delta + 4.0 * kLn2;
    out.entropy_gap_threshold = out.gamma * out.R + delta + 2.0 * kLn2;
    const double inner = delta + H - out.R - std::pow(out.alpha, r) * t;
    out.bound = exp_bound(inner, kLn2 / 2.0, ln_B);
    return out;
}

SimplifiedBoundResult simplified_encoding_bound(double H, double eps,
                                                double ln_B) {
    // eps <= 1 is a hypothesis, not a well-definedness requirement; the
    // checker reports it, the evaluator stays probe-able outside it
    if (!(eps > 0.0)) throw std::invalid_argument("need eps > 0");
    if (!(H > 0.0)) throw std::invalid_argument("need H > 0");
    SimplifiedBoundResult out;
    out.fluct_threshold = 10.0 * std::sqrt(eps) * H;
    out.entropy_gap_threshold = 5.0 * std::sqrt(eps) * H;
    out.bound = exp_bound(eps * H, kLn2 / 2.0, ln_B + 2.0 * H);
    return out;
}

SimplifiedHypotheses simplified_bound_hypotheses(const JointDistribution& dist,
                                                 Mask I, Mask J, double H,
                                                 double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("need eps > 0");
    SimplifiedHypotheses h;
    const JointDistribution joint = marginal(dist, I | J);
    h.H_joint = entropy(joint);
    h.M_joint = mean_fluctuation(joint);
    h.M_marg = J == 0 ? 0.0 : mean_fluctuation(marginal(dist, J));
    h.eps_in_range = eps <= 1.0;
    h.joint_entropy_ok = H >= h.H_joint;
    h.joint_fluct_ok = H >= h.M_joint / eps;
    h.marg_fluct_ok = H >= h.M_marg / eps;
    h.floor_ok = H >= 4.0 * kLn2 / eps;
    return h;
}

namespace {

EmpiricalVsBound join_empirical(ProportionEstimate est,
                                const BoundResult& bound) {
    EmpiricalVsBound out;
    out.empirical = est;
    out.bound = bound;
    out.pass = bound.vacuous || est.value >= bound.proportion_lower_bound;
    return out;
}

}  // namespace

EmpiricalVsBound empirical_vs_bound_exact(const JointDistribution& dist,
                                          const EncodingEnsemble& ensemble,
                                          double eps, double H,
                                          const BoundResult& bound,
                                          const Caps& caps) {
    return join_empirical(proportion_good_exact(dist, ensemble, eps, H, caps),
                          bound);
}

EmpiricalVsBound empirical_vs_bound_monte_carlo(
    const JointDistribution& dist, const EncodingEnsemble& ensemble,
    double eps, double H, const BoundResult& bound, std::uint64_t trials,
    std::uint64_t seed, const Caps& caps) {
    return join_empirical(proportion_good_monte_carlo(dist, ensemble, eps, H,
                                                      trials, seed, caps),
                          bound);
}

}  // namespace eplab
