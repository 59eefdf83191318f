#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "eplab/bounds.hpp"
#include "eplab/fluctuation.hpp"
#include "eplab/sources.hpp"
#include "test_util.hpp"

using namespace eplab;
using namespace eplab::testing;

namespace {

constexpr double kLn2 = 0.6931471805599453;

}  // namespace

TEST_CASE("proportion bound in log-space") {
    // desk instance: delta H = 10 keeps the inner exponential finite
    const auto r = encoding_proportion_bound(2, 1, 0.01, 1000.0, 693.0);
    const double expected_exponent = -(kLn2 / 2.0) * std::exp(10.0) + 693.0 +
                                     2000.0 + std::log(1.0) + 1.0 * kLn2;
    CHECK(close(r.exponent, expected_exponent, 1e-6));
    CHECK(r.exponent < -4900.0);
    CHECK(r.proportion_lower_bound == 1.0);
    CHECK(!r.vacuous);

    // tiny H: the bound collapses below zero and is flagged vacuous
    const auto v = encoding_proportion_bound(2, 1, 0.01, 1.0, 0.7);
    CHECK(v.vacuous);
    CHECK(v.exponent >= 0.0);
    CHECK(v.proportion_lower_bound <= 0.0);

    // inner overflow regime saturates at 1 symbolically
    const auto s = encoding_proportion_bound(3, 2, 1.0, 1000.0, 500.0);
    CHECK(s.saturated);
    CHECK(!s.vacuous);
    CHECK(s.proportion_lower_bound == 1.0);
    CHECK(std::isinf(s.exponent));

    // no encoded coordinates: only the identity map, proportion 1
    const auto none = encoding_proportion_bound(2, 0, 0.1, 10.0, 0.0);
    CHECK(none.proportion_lower_bound == 1.0);

    CHECK_THROWS_AS(encoding_proportion_bound(2, 3, 0.1, 1.0, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(encoding_proportion_bound(2, 1, 0.0, 1.0, 0.0),
                    std::invalid_argument);
}

TEST_CASE("proportion bound is monotone along delta") {
    for (int hi = 0; hi < 20; ++hi) {
        const double H = 50.0 + 50.0 * hi;
        double prev = -std::numeric_limits<double>::infinity();
        for (int di = 0; di < 20; ++di) {
            const double delta = 0.002 + 0.001 * di;
            const auto r =
                encoding_proportion_bound(2, 1, delta, H, 30.0);
            CHECK(r.proportion_lower_bound >= prev - 1e-15);
            prev = r.proportion_lower_bound;
        }
    }
}

TEST_CASE("hypothesis checker uses the joint entropy of the encoded block") {
    const auto d = make_dist({2, 2}, {0.4, 0.1, 0.1, 0.4});
    const double H_12 = entropy(d);
    const auto h = encoding_bound_hypotheses(d, 2, H_12 + 0.01, 0.5);
    CHECK(close(h.H_ell, H_12, 1e-12));
    CHECK(h.entropy_ok);
    CHECK(close(h.max_fluct, max_fluctuation(d), 1e-12));
    const auto h2 = encoding_bound_hypotheses(d, 2, H_12 - 0.01, 0.5);
    CHECK(!h2.entropy_ok);
    // delta floor: H >= 2 ln 2 / delta
    CHECK(!encoding_bound_hypotheses(d, 1, 1.0, 0.1).delta_ok);
    CHECK(encoding_bound_hypotheses(d, 1, 14.0, 0.1).delta_ok);
}

TEST_CASE("asymptotic bound and admissibility threshold") {
    ProfileVector h(2), b(2);
    h.set(1, 1.5 * kLn2);
    h.set(2, 1.5 * kLn2);
    h.set(3, 2.0 * kLn2);
    b.set(1, kLn2);
    b.set(2, kLn2);
    b.set(3, 2.0 * kLn2);

    // eps >= h_full: threshold is (1/121)^4 for two encoded coordinates
    const auto r = asymptotic_proportion_bound(h, b, 2.0, 1e-9, 50.0);
    CHECK(close(r.delta_threshold, std::pow(1.0 / 121.0, 4.0), 1e-18));
    CHECK(r.delta_admissible);

    const auto r2 = asymptotic_proportion_bound(h, b, 2.0, 0.1, 50.0);
    CHECK(!r2.delta_admissible);
    // bound value 1 - exp(-e^{5})
    CHECK(close(r2.bound.exponent, -std::exp(5.0), 1e-9));
    CHECK(close(r2.bound.proportion_lower_bound, -std::expm1(-std::exp(5.0)),
                1e-15));

    ProfileVector zero(2);
    CHECK_THROWS_AS(asymptotic_proportion_bound(zero, b, 1.0, 0.1, 10.0),
                    DomainError);
}

TEST_CASE("balanced coloring check") {
    // single atom: every map is balanced
    const auto one = balanced_coloring_check(SubProbability({0.4}), 2, 0.5);
    CHECK(one.exact_proportion == 1.0);
    CHECK(one.pass);

    // uniform half-mass on 8 atoms, 2 colors
    const SubProbability P(std::vector<double>(8, 1.0 / 16.0));
    const auto r = balanced_coloring_check(P, 2, 0.5);
    CHECK(r.maps_total == 256);
    CHECK(r.pass);
    // independent recount: a map is balanced iff each color class holds
    // at most (1.5/2)/(1/16) = 12 atoms => all maps qualify
    CHECK(r.exact_proportion == 1.0);

    // skewed atoms with a tight cap: recount by independent enumeration
    const SubProbability Q({0.3, 0.25, 0.2, 0.15});
    const auto rq = balanced_coloring_check(Q, 2, 0.25);
    std::uint64_t good = 0;
    const double cap = 1.25 / 2.0;
    for (int m = 0; m < 16; ++m) {
        double c0 = 0.0, c1 = 0.0;
        const double w[4] = {0.3, 0.25, 0.2, 0.15};
        for (int i = 0; i < 4; ++i)
            ((m >> i) & 1 ? c1 : c0) += w[i];
        if (c0 <= cap && c1 <= cap) ++good;
    }
    CHECK(rq.maps_good == good);
    CHECK(rq.pass);

    // vanishing atoms: bound tends to 1 and the proportion is 1
    const auto z = balanced_coloring_check(SubProbability({0.0, 0.0}), 3, 1.0);
    CHECK(z.bound == 1.0);
    CHECK(z.exact_proportion == 1.0);
    CHECK(z.pass);

    // bound monotone: increasing in eps, decreasing in the max atom
    double prev = -1e300;
    for (double eps : {0.25, 0.5, 1.0, 2.0}) {
        const auto g =
            balanced_coloring_check(SubProbability({0.2, 0.2, 0.1}), 2, eps);
        CHECK(g.bound >= prev - 1e-15);
        prev = g.bound;
    }
    const auto small_q =
        balanced_coloring_check(SubProbability({0.1, 0.1, 0.1}), 2, 0.5);
    const auto large_q =
        balanced_coloring_check(SubProbability({0.3, 0.0, 0.0}), 2, 0.5);
    CHECK(small_q.bound >= large_q.bound);

    CHECK_THROWS_AS(
        balanced_coloring_check(SubProbability(std::vector<double>(13, 0.01)),
                                2, 0.5),
        CapacityError);
}

TEST_CASE("conditional bound specializes to the single-variable bound") {
    CounterRng rng(51, 0);
    for (int rep = 0; rep < 200; ++rep) {
        const double M = 2.0 * rng.uniform01();
        const double H = 0.5 + 5.0 * rng.uniform01();
        const double lnB = 0.5 + 5.0 * rng.uniform01();
        const double t = 0.5 + 5.0 * rng.uniform01();
        const double r = 0.05 + 0.9 * rng.uniform01();
        const double delta = 2.0 * rng.uniform01();

        ConditionalBoundInputs in;
        in.fluct_cond = M;
        in.fluct_marg = 0.0;
        in.H_cond = H;
        in.H_marg = 0.0;
        in.ln_B = lnB;
        in.t1 = t;
        in.t2 = 1.0;
        in.r = r;
        in.s = 0.5;
        in.delta = delta;
        const auto cond = conditional_encoding_bound(in);
        const auto single = single_var_encoding_bound(M, H, lnB, t, r, delta);
        CHECK(close(cond.fluct_threshold, single.fluct_threshold, 1e-12));
        CHECK(close(cond.entropy_gap_threshold,
                    single.entropy_gap_threshold, 1e-12));
        CHECK(close(cond.bound.exponent, single.bound.exponent, 1e-12));
        CHECK(close(cond.bound.proportion_lower_bound,
                    single.bound.proportion_lower_bound, 1e-12));
    }
}

TEST_CASE("conditional thresholds collapse when fluctuations vanish") {
    ConditionalBoundInputs in;
    in.fluct_cond = 0.0;
    in.fluct_marg = 0.0;
    in.H_cond = 3.0;
    in.H_marg = 1.0;
    in.ln_B = 2.0;
    in.t1 = in.t2 = 4.0;
    in.r = in.s = 0.5;
    in.delta = 0.0;
    const auto r = conditional_encoding_bound(in);
    CHECK(close(r.gamma, 0.0, 1e-15));
    CHECK(close(r.fluct_threshold, 4.0 * kLn2, 1e-15));
    CHECK(close(r.entropy_gap_threshold, 2.0 * kLn2, 1e-15));
}

TEST_CASE("conditional bound plug-in on a concrete joint") {
    CounterRng rng(55, 0);
    const auto joint = random_dist({16, 4}, rng);
    ConditionalBoundInputs in;
    in.fluct_cond = conditional_fluctuation(joint, 0b01, 0b10);
    in.fluct_marg = mean_fluctuation(marginal(joint, 0b10));
    in.H_cond = 8.0;
    in.H_marg = entropy(marginal(joint, 0b10));
    in.ln_B = 5.0;
    in.t1 = in.t2 = 8.0;
    in.r = in.s = 0.5;
    in.delta = 1.0;
    const auto res = conditional_encoding_bound(in);

    // second, independent evaluation of the same formulas
    const double alpha = in.fluct_cond / 8.0;
    const double beta = in.fluct_marg / 8.0;
    const double gamma = std::sqrt(alpha) + std::sqrt(beta);
    const double R = 5.0;  // min(8, ln|B|)
    CHECK(close(res.alpha, alpha, 1e-15));
    CHECK(close(res.gamma, gamma, 1e-14));
    CHECK(res.R == R);
    CHECK(close(res.fluct_threshold, 2.0 * gamma * R + 2.0 + 4.0 * kLn2,
                1e-12));
    CHECK(close(res.entropy_gap_threshold, gamma * R + 1.0 + 2.0 * kLn2,
                1e-12));
    const double E = -(kLn2 / 2.0) *
                         std::exp(1.0 + 8.0 - R - std::sqrt(alpha) * 8.0) +
                     5.0 + in.H_marg + std::sqrt(beta) * 8.0;
    CHECK(close(res.bound.exponent, E, 1e-12));
}

TEST_CASE("simplified bound values") {
    // boundary eps = 1 at the smallest admissible H
    const auto r = simplified_encoding_bound(4.0 * kLn2, 1.0, kLn2);
    CHECK(close(r.fluct_threshold, 40.0 * kLn2, 1e-12));
    CHECK(close(r.entropy_gap_threshold, 20.0 * kLn2, 1e-12));

    // eps H = 20 with ln|B| = 10, H = 14: exponent -(ln2/2)e^20 + 38
    const auto big = simplified_encoding_bound(14.0, 20.0 / 14.0, 10.0);
    CHECK(close(big.bound.exponent, -(kLn2 / 2.0) * std::exp(20.0) + 38.0,
                1e-6));
    CHECK(big.bound.proportion_lower_bound == 1.0);
    CHECK(!big.bound.vacuous);

    // small eps H: vacuous
    const auto tiny = simplified_encoding_bound(2.0, 0.1, 1.0);
    CHECK(tiny.bound.vacuous);
}

TEST_CASE("constant absorption inequalities across the eps grid") {
    for (int i = 1; i <= 100; ++i) {
        const double eps = i / 100.0;
        for (double H : {0.5, 1.0, 7.0, 40.0}) {
            const double lhs_fluct = 2.0 * (std::sqrt(2.0) + 1.0) *
                                         std::sqrt(eps) * H +
                                     2.0 * (eps + std::sqrt(eps)) * H +
                                     eps * H;
            const double lhs_gap =
                (std::sqrt(2.0) + 1.0) * std::sqrt(eps) * H +
                (eps + std::sqrt(eps)) * H + eps * H / 2.0;
            const auto r = simplified_encoding_bound(H, eps, 1.0);
            CHECK(lhs_fluct <= r.fluct_threshold + 1e-12);
            CHECK(lhs_gap <= r.entropy_gap_threshold + 1e-12);
        }
    }
}

TEST_CASE("simplified hypotheses itemized") {
    const auto d = make_dist({2, 2}, {0.4, 0.1, 0.1, 0.4});
    const auto h = simplified_bound_hypotheses(d, 0b01, 0b10, 10.0, 0.5);
    CHECK(h.eps_in_range);
    CHECK(h.joint_entropy_ok);
    CHECK(close(h.H_joint, entropy(d), 1e-12));
    CHECK(close(h.M_joint, mean_fluctuation(d), 1e-12));
    CHECK(h.floor_ok);  // 10 >= 4 ln2 / 0.5
    const auto h2 = simplified_bound_hypotheses(d, 0b01, 0b10, 1.0, 0.5);
    CHECK(!h2.floor_ok);
    CHECK(!simplified_bound_hypotheses(d, 0b01, 0b10, 10.0, 1.5).eps_in_range);
}

TEST_CASE("empirical proportions against theoretical bounds") {
    const auto d = make_dist({2, 2}, {0.4, 0.1, 0.1, 0.4});
    const EncodingEnsemble e(d.space(), {2, 2});
    const double H = entropy(d);

    // vacuous bound: trivially pass
    const auto vac = encoding_proportion_bound(2, 2, 0.01, 1.0, 2.0 * kLn2);
    REQUIRE(vac.vacuous);
    const auto rep1 = empirical_vs_bound_exact(d, e, 1e-9, H, vac);
    CHECK(rep1.pass);
    CHECK(rep1.empirical.value == 0.0);

    // generous eps makes every encoding good; a non-vacuous bound is met
    const auto non_vac =
        encoding_proportion_bound(1, 1, 0.3, 30.0, 20.0 * kLn2);
    REQUIRE(!non_vac.vacuous);
    CHECK(non_vac.proportion_lower_bound > 0.99);
    const auto rep2 = empirical_vs_bound_exact(d, e, 100.0, H, non_vac);
    CHECK(rep2.empirical.value == 1.0);
    CHECK(rep2.pass);

    // Monte Carlo flavor carries the interval through
    const auto rep3 =
        empirical_vs_bound_monte_carlo(d, e, 100.0, H, non_vac, 500, 7);
    CHECK(rep3.empirical.value == 1.0);
    CHECK(rep3.pass);
}

TEST_CASE("proportion of good encodings rises with the horizon") {
    // fair bit, output alphabet about e^{H/2}: enumerable at tiny n
    const auto bit = make_dist({2}, {0.5, 0.5});
    double prev = -1.0;
    for (int n : {2, 4, 6}) {
        const auto dist = iid_expansion(bit, n);
        const std::uint32_t bsize = 1u << (n / 2);
        const EncodingEnsemble e(dist.space(), {bsize});
        const double H = static_cast<double>(n) * kLn2;
        const auto est = n <= 2
                             ? proportion_good_exact(dist, e, 0.45, H)
                             : proportion_good_monte_carlo(dist, e, 0.45, H,
                                                           4000, 11);
        CHECK(est.value >= prev - 0.05);
        prev = est.value;
    }
    CHECK(prev > 0.5);
}
