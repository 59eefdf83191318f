#include "eplab/fluctuation.hpp"

#include <algorithm>
#include <cmath>

namespace eplab {

std::vector<std::pair<std::uint64_t, double>> information_values(
    const JointDistribution& dist) {
    std::vector<std::pair<std::uint64_t, double>> out;
    out.reserve(dist.support_size());
    const auto mass = dist.mass();
    for (std::uint64_t x = 0; x < mass.size(); ++x)
        if (mass[x] > 0.0) out.emplace_back(x, -std::log(mass[x]));
    return out;
}

double entropy(const JointDistribution& dist) {
    double h = 0.0;
    for (double m : dist.mass())
        if (m > 0.0) h -= m * std::log(m);
    return h;
}

double mean_fluctuation(const JointDistribution& dist, double a) {
    double s = 0.0;
    for (double m : dist.mass())
        if (m > 0.0) s += m * std::abs(-std::log(m) - a);
    return s;
}

double mean_fluctuation(const JointDistribution& dist) {
    return mean_fluctuation(dist, entropy(dist));
}

OneSided one_sided_fluctuation(const JointDistribution& dist, double a) {
    OneSided r;
    for (double m : dist.mass()) {
        if (m == 0.0) continue;
        const double d = -std::log(m) - a;
        if (d > 0.0)
            r.plus += m * d;
        else
            r.minus -= m * d;
    }
    return r;
}

FluctuationReport fluctuation_report(const JointDistribution& dist) {
    FluctuationReport r;
    r.H = entropy(dist);
    const OneSided m = one_sided_fluctuation(dist, r.H);
    r.M_plus = m.plus;
    r.M_minus = m.minus;
    r.M = m.plus + m.minus;
    const double ln_supp =
        std::log(static_cast<double>(dist.support_size()));
    const OneSided d = one_sided_fluctuation(dist, ln_supp);
    r.D_plus = d.plus;
    r.D_minus = d.minus;
    r.D = d.plus + d.minus;
    if (r.H > 0.0) {
        r.M_rel = r.M / r.H;
        r.D_rel = r.D / r.H;
    }
    r.kl_to_uniform_support = r.D - 2.0 * r.D_plus;
    return r;
}

namespace {

// Support of the (I u J)-marginal together with the matching J-marginal
// information values.
struct CondSupport {
    JointDistribution joint;  // marginal over I u J
    std::vector<double> info; // i_{X_I|X_J} per flat index of `joint`
};

CondSupport conditional_support(const JointDistribution& dist, Mask I,
                                Mask J) {
    if ((I & J) != 0)
        throw std::invalid_argument("conditional masks must be disjoint");
    JointDistribution joint = marginal(dist, I | J);
    JointDistribution cond = marginal(dist, J);
    const Mask J_in_joint = relabel_into(J, I | J);

    // map each joint atom to its J-projection index
    const ProductSpace& sp = joint.space();
    std::vector<std::size_t> coords;
    std::vector<std::uint64_t> strides;
    {
        std::size_t pos = 0;
        for (std::size_t i = 0; i < sp.coord_count(); ++i)
            if (J_in_joint & (Mask{1} << i)) {
                coords.push_back(i);
                strides.push_back(cond.space().stride(pos++));
            }
    }

    CondSupport out{std::move(joint), {}};
    out.info.assign(out.joint.space().total_size(), 0.0);
    const auto jm = out.joint.mass();
    const auto cm = cond.mass();
    for (std::uint64_t x = 0; x < jm.size(); ++x) {
        if (jm[x] == 0.0) continue;
        std::uint64_t y = 0;
        for (std::size_t t = 0; t < coords.size(); ++t)
            y += out.joint.space().digit(x, coords[t]) * strides[t];
        out.info[x] = -std::log(jm[x]) + std::log(cm[y]);
    }
    return out;
}

}  // namespace

std::vector<std::pair<std::uint64_t, double>> conditional_information(
    const JointDistribution& dist, Mask I, Mask J) {
    const CondSupport cs = conditional_support(dist, I, J);
    std::vector<std::pair<std::uint64_t, double>> out;
    const auto mass = cs.joint.mass();
    for (std::uint64_t x = 0; x < mass.size(); ++x)
        if (mass[x] > 0.0) out.emplace_back(x, cs.info[x]);
    return out;
}

double conditional_entropy(const JointDistribution& dist, Mask I, Mask J) {
    return entropy(marginal(dist, I | J)) - entropy(marginal(dist, J));
}

double conditional_fluctuation(const JointDistribution& dist, Mask I, Mask J,
                               double a) {
    const CondSupport cs = conditional_support(dist, I, J);
    double s = 0.0;
    const auto mass = cs.joint.mass();
    for (std::uint64_t x = 0; x < mass.size(); ++x)
        if (mass[x] > 0.0) s += mass[x] * std::abs(cs.info[x] - a);
    return s;
}

double conditional_fluctuation(const JointDistribution& dist, Mask I,
                               Mask J) {
    return conditional_fluctuation(dist, I, J,
                                   conditional_entropy(dist, I, J));
}

OneSided one_sided_conditional_fluctuation(const JointDistribution& dist,
                                           Mask I, Mask J, double a) {
    const CondSupport cs = conditional_support(dist, I, J);
    OneSided r;
    const auto mass = cs.joint.mass();
    for (std::uint64_t x = 0; x < mass.size(); ++x) {
        if (mass[x] == 0.0) continue;
        const double d = cs.info[x] - a;
        if (d > 0.0)
            r.plus += mass[x] * d;
        else
            r.minus -= mass[x] * d;
    }
    return r;
}

double relative_conditional_fluctuation(const JointDistribution& dist, Mask I,
                                        Mask J) {
    const double h = conditional_entropy(dist, I, J);
    if (h <= 0.0) return 0.0;
    return conditional_fluctuation(dist, I, J, h) / h;
}

double max_fluctuation(const JointDistribution& dist, const Caps& caps) {
    const std::size_t k = dist.space().coord_count();
    if (k > static_cast<std::size_t>(caps.max_coords))
        throw CapacityError("max_fluctuation: too many coordinates");
    double best = 0.0;  // M(X_{empty}) = 0
    for (Mask I = 1; I < (Mask{1} << k); ++I)
        best = std::max(best, mean_fluctuation(marginal(dist, I)));
    return best;
}

namespace {

// Recursively enumerate compositions (c_1..c_m) of n over the support atoms.
struct CompositionWalker {
    const std::vector<double>& ln_w;
    int n;
    double a_entropy;  // fluctuation reference a for M
    double a_uniform;  // reference a for D
    double M = 0.0;
    double D = 0.0;
    double total = 0.0;

    // lgamma(c+1) values get reused heavily; cache them up to n.
    std::vector<double> lg;

    explicit CompositionWalker(const std::vector<double>& lw, int n_)
        : ln_w(lw), n(n_), lg(static_cast<std::size_t>(n_) + 1) {
        for (int i = 0; i <= n; ++i) lg[i] = std::lgamma(i + 1.0);
    }

    // atom: current index, rem: symbols left to place,
    // ln_coeff: lgamma(n+1) - sum lgamma(c_j+1) so far,
    // ln_massw: sum c_j ln w_j so far.
    void walk(std::size_t atom, int rem, double ln_coeff, double ln_massw) {
        if (atom + 1 == ln_w.size()) {
            finish(ln_coeff - lg[rem], ln_massw + rem * ln_w[atom]);
            return;
        }
        for (int c = 0; c <= rem; ++c)
            walk(atom + 1, rem - c, ln_coeff - lg[c],
                 ln_massw + c * ln_w[atom]);
    }

    void finish(double ln_coeff, double ln_massw) {
        const double mass = std::exp(ln_coeff + ln_massw);
        const double info = -ln_massw;
        M += mass * std::abs(info - a_entropy);
        D += mass * std::abs(info - a_uniform);
        total += mass;
    }
};

std::uint64_t composition_count(std::uint64_t n, std::uint64_t m) {
    // C(n + m - 1, m - 1), saturating
    long double c = 1.0L;
    for (std::uint64_t i = 1; i < m; ++i)
        c = c * static_cast<long double>(n + i) / static_cast<long double>(i);
    return c > 1e18L ? UINT64_MAX : static_cast<std::uint64_t>(c);
}

}  // namespace

IidPowerFluctuation iid_power_fluctuation(const JointDistribution& base,
                                          int n, const Caps& caps) {
    if (n < 1) throw std::invalid_argument("horizon must be >= 1");
    std::vector<double> ln_w;
    for (double m : base.mass())
        if (m > 0.0) ln_w.push_back(std::log(m));
    if (composition_count(static_cast<std::uint64_t>(n), ln_w.size()) >
        caps.max_enumeration)
        throw CapacityError("iid_power_fluctuation: composition count over cap");

    IidPowerFluctuation out;
    out.n = n;
    out.H = n * entropy(base);

    CompositionWalker w(ln_w, n);
    w.a_entropy = out.H;
    w.a_uniform = n * std::log(static_cast<double>(ln_w.size()));
    w.walk(0, n, std::lgamma(n + 1.0), 0.0);
    if (std::abs(w.total - 1.0) > 1e-9)
        throw DomainError("iid_power_fluctuation: class masses do not sum to 1");

    out.M = w.M;
    out.D = w.D;
    if (out.H > 0.0) {
        out.M_rel = out.M / out.H;
        out.D_rel = out.D / out.H;
    }
    return out;
}

}  // namespace eplab
