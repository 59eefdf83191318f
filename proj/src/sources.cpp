#include "eplab/sources.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "eplab/fluctuation.hpp"

namespace eplab {

namespace {

std::uint64_t checked_pow(std::uint64_t base, int exp, std::uint64_t limit,
                          const char* what) {
    std::uint64_t r = 1;
    for (int i = 0; i < exp; ++i) {
        if (base != 0 && r > limit / base) throw CapacityError(what);
        r *= base;
    }
    if (r > limit) throw CapacityError(what);
    return r;
}

// Row entropies sum_t p_st (-ln p_st).
Eigen::VectorXd row_entropies(const Eigen::MatrixXd& P) {
    Eigen::VectorXd h(P.rows());
    for (Eigen::Index s = 0; s < P.rows(); ++s) {
        double e = 0.0;
        for (Eigen::Index t = 0; t < P.cols(); ++t) {
            const double p = P(s, t);
            if (p > 0.0) e -= p * std::log(p);
        }
        h(s) = e;
    }
    return h;
}

// Block layout shared by iid_expansion and finite_horizon_distribution:
// coordinate i of the result is the length-n string of coordinate i of the
// source, step 1 most significant.
ProductSpace block_space(const ProductSpace& base, int n,
                         const Caps& caps) {
    std::vector<Alphabet> factors;
    for (std::size_t i = 0; i < base.coord_count(); ++i) {
        const std::uint64_t size =
            checked_pow(base.factor(i).size, n, caps.max_total_size,
                        "horizon distribution exceeds size cap");
        factors.emplace_back(static_cast<std::uint32_t>(size));
    }
    return ProductSpace(std::move(factors));
}

// flat-output contribution of placing source symbol s at step t (1-based)
std::vector<std::vector<std::uint64_t>> step_contributions(
    const ProductSpace& base, const ProductSpace& out, int n) {
    const std::size_t k = base.coord_count();
    std::vector<std::vector<std::uint64_t>> fc(
        n, std::vector<std::uint64_t>(base.total_size(), 0));
    for (int t = 1; t <= n; ++t) {
        std::vector<std::uint64_t> digit_weight(k);
        for (std::size_t i = 0; i < k; ++i)
            digit_weight[i] =
                checked_pow(base.factor(i).size, n - t, UINT64_MAX,
                            "horizon weight overflow") *
                out.stride(i);
        for (std::uint64_t s = 0; s < base.total_size(); ++s) {
            std::uint64_t c = 0;
            for (std::size_t i = 0; i < k; ++i)
                c += base.digit(s, i) * digit_weight[i];
            fc[t - 1][s] = c;
        }
    }
    return fc;
}

}  // namespace

MarkovSource::MarkovSource(ProductSpace states_, Eigen::MatrixXd transition_,
                           Eigen::VectorXd initial_)
    : states(std::move(states_)),
      transition(std::move(transition_)),
      initial(std::move(initial_)) {
    const auto S = static_cast<Eigen::Index>(states.total_size());
    if (transition.rows() != S || transition.cols() != S)
        throw std::invalid_argument("transition matrix shape mismatch");
    if (initial.size() != S)
        throw std::invalid_argument("initial distribution length mismatch");
    for (Eigen::Index s = 0; s < S; ++s) {
        if (initial(s) < 0.0)
            throw std::invalid_argument("negative initial probability");
        double row = 0.0;
        for (Eigen::Index t = 0; t < S; ++t) {
            if (transition(s, t) < 0.0)
                throw std::invalid_argument("negative transition probability");
            row += transition(s, t);
        }
        if (std::abs(row - 1.0) > 1e-12)
            throw std::invalid_argument("transition rows must sum to 1");
    }
    if (std::abs(initial.sum() - 1.0) > 1e-12)
        throw std::invalid_argument("initial distribution must sum to 1");
}

namespace {

ProductSpace board_space(int size) {
    if (size < 2) throw std::invalid_argument("board size must be >= 2");
    const auto n = static_cast<std::uint32_t>(size);
    return ProductSpace({Alphabet(n), Alphabet(n)});
}

Eigen::VectorXd board_initial(const Eigen::MatrixXd& P, BoardStart start,
                              const ProductSpace& states);

}  // namespace

MarkovSource screwed_chessboard(int size, BoardStart start) {
    ProductSpace states = board_space(size);
    const int S = size * size;
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(S, S);
    for (int i = 0; i < size; ++i) {
        for (int j = 0; j < size; ++j) {
            const int s = i * size + j;
            P(s, ((i + 1) % size) * size + j) += 0.25;
            P(s, ((i + size - 1) % size) * size + j) += 0.25;
            P(s, i * size + (j + 1) % size) += 0.25;
            P(s, i * size + (j + size - 1) % size) += 0.25;
        }
    }
    return MarkovSource(states, P, board_initial(P, start, states));
}

MarkovSource standard_chessboard(int size, BoardStart start) {
    ProductSpace states = board_space(size);
    const int S = size * size;
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(S, S);
    for (int i = 0; i < size; ++i) {
        for (int j = 0; j < size; ++j) {
            const int s = i * size + j;
            std::vector<int> nb;
            if (i > 0) nb.push_back(s - size);
            if (i + 1 < size) nb.push_back(s + size);
            if (j > 0) nb.push_back(s - 1);
            if (j + 1 < size) nb.push_back(s + 1);
            for (int t : nb) P(s, t) = 1.0 / static_cast<double>(nb.size());
        }
    }
    return MarkovSource(states, P, board_initial(P, start, states));
}

namespace {

Eigen::VectorXd board_initial(const Eigen::MatrixXd& P, BoardStart start,
                              const ProductSpace& states) {
    const auto S = static_cast<Eigen::Index>(states.total_size());
    if (start == BoardStart::origin) {
        Eigen::VectorXd init = Eigen::VectorXd::Zero(S);
        init(0) = 1.0;
        return init;
    }
    // degree-proportional stationary law of a reversible walk; uniform for
    // the torus
    Eigen::VectorXd deg(S);
    for (Eigen::Index s = 0; s < S; ++s)
        deg(s) = (P.row(s).array() > 0.0).count();
    return deg / deg.sum();
}

}  // namespace

MarkovSource iid_markov_source(const JointDistribution& base) {
    const auto S = static_cast<Eigen::Index>(base.space().total_size());
    Eigen::VectorXd init(S);
    for (Eigen::Index s = 0; s < S; ++s) init(s) = base.mass_at(s);
    Eigen::MatrixXd P(S, S);
    for (Eigen::Index s = 0; s < S; ++s) P.row(s) = init.transpose();
    return MarkovSource(base.space(), P, init);
}

namespace {

// depth-first over time steps; (path -> block tuple) is a bijection
struct ProductWalker {
    int n;
    const std::vector<std::vector<std::uint64_t>>& fc;
    std::span<const double> mass;
    std::vector<double>& out;

    void walk(int t, std::uint64_t acc, double prod) const {
        if (t == n) {
            out[acc] = prod;
            return;
        }
        for (std::uint64_t s = 0; s < mass.size(); ++s)
            if (mass[s] > 0.0) walk(t + 1, acc + fc[t][s], prod * mass[s]);
    }
};

}  // namespace

JointDistribution iid_expansion(const JointDistribution& base, int n,
                                const Caps& caps) {
    if (n < 1) throw std::invalid_argument("horizon must be >= 1");
    checked_pow(base.space().total_size(), n, caps.max_total_size,
                "iid expansion exceeds size cap");
    ProductSpace out_space = block_space(base.space(), n, caps);
    const auto fc = step_contributions(base.space(), out_space, n);
    std::vector<double> out(out_space.total_size(), 0.0);
    ProductWalker{n, fc, base.mass(), out}.walk(0, 0, 1.0);
    return JointDistribution(std::move(out_space), std::move(out));
}

JointDistribution finite_horizon_distribution(const MarkovSource& src, int n,
                                              const Caps& caps) {
    if (n < 1) throw std::invalid_argument("horizon must be >= 1");
    checked_pow(src.states.total_size(), n, caps.max_total_size,
                "horizon distribution exceeds size cap");
    ProductSpace out_space = block_space(src.states, n, caps);
    const auto fc = step_contributions(src.states, out_space, n);
    std::vector<double> out(out_space.total_size(), 0.0);

    const std::uint64_t S = src.states.total_size();
    std::vector<std::vector<std::pair<std::uint64_t, double>>> nbrs(S);
    for (std::uint64_t s = 0; s < S; ++s)
        for (std::uint64_t t = 0; t < S; ++t)
            if (src.transition(static_cast<Eigen::Index>(s),
                               static_cast<Eigen::Index>(t)) > 0.0)
                nbrs[s].emplace_back(
                    t, src.transition(static_cast<Eigen::Index>(s),
                                      static_cast<Eigen::Index>(t)));

    // recursive walk over positive-probability paths
    struct PathWalker {
        int n;
        const std::vector<std::vector<std::uint64_t>>& fc;
        const std::vector<std::vector<std::pair<std::uint64_t, double>>>&
            nbrs;
        std::vector<double>& out;

        void walk(int t, std::uint64_t state, std::uint64_t acc,
                  double prod) const {
            if (t == n) {
                out[acc] = prod;
                return;
            }
            for (const auto& [next, p] : nbrs[state])
                walk(t + 1, next, acc + fc[t][next], prod * p);
        }
    };
    const PathWalker walker{n, fc, nbrs, out};
    for (std::uint64_t s = 0; s < S; ++s) {
        const double p0 = src.initial(static_cast<Eigen::Index>(s));
        if (p0 > 0.0) walker.walk(1, s, fc[0][s], p0);
    }
    return JointDistribution(std::move(out_space), std::move(out));
}

std::vector<double> markov_entropy_curve(const MarkovSource& src, int n_max) {
    if (n_max < 1) throw std::invalid_argument("horizon must be >= 1");
    const Eigen::VectorXd rowent = row_entropies(src.transition);
    std::vector<double> curve(static_cast<std::size_t>(n_max));
    double h = 0.0;
    for (Eigen::Index s = 0; s < src.initial.size(); ++s)
        if (src.initial(s) > 0.0) h -= src.initial(s) * std::log(src.initial(s));
    curve[0] = h;
    Eigen::RowVectorXd mu = src.initial.transpose();
    for (int t = 2; t <= n_max; ++t) {
        h += mu * rowent;
        curve[static_cast<std::size_t>(t - 1)] = h;
        if (t < n_max) mu = mu * src.transition;
    }
    return curve;
}

namespace {

std::vector<std::vector<int>> adjacency(const Eigen::MatrixXd& P,
                                        bool reverse) {
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(P.rows()));
    for (Eigen::Index s = 0; s < P.rows(); ++s)
        for (Eigen::Index t = 0; t < P.cols(); ++t)
            if (P(s, t) > 0.0)
                adj[static_cast<std::size_t>(reverse ? t : s)].push_back(
                    static_cast<int>(reverse ? s : t));
    return adj;
}

bool reaches_all(const std::vector<std::vector<int>>& adj) {
    std::vector<char> seen(adj.size(), 0);
    std::deque<int> queue{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        for (int v : adj[static_cast<std::size_t>(u)])
            if (!seen[static_cast<std::size_t>(v)]) {
                seen[static_cast<std::size_t>(v)] = 1;
                ++count;
                queue.push_back(v);
            }
    }
    return count == adj.size();
}

}  // namespace

bool is_irreducible(const MarkovSource& src) {
    return reaches_all(adjacency(src.transition, false)) &&
           reaches_all(adjacency(src.transition, true));
}

int chain_period(const MarkovSource& src) {
    if (!is_irreducible(src)) throw DomainError("chain is reducible");
    const auto adj = adjacency(src.transition, false);
    std::vector<int> level(adj.size(), -1);
    std::deque<int> queue{0};
    level[0] = 0;
    int g = 0;
    while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        for (int v : adj[static_cast<std::size_t>(u)]) {
            if (level[static_cast<std::size_t>(v)] < 0) {
                level[static_cast<std::size_t>(v)] =
                    level[static_cast<std::size_t>(u)] + 1;
                queue.push_back(v);
            } else {
                g = std::gcd(g, std::abs(level[static_cast<std::size_t>(u)] +
                                         1 -
                                         level[static_cast<std::size_t>(v)]));
            }
        }
    }
    return g == 0 ? 1 : g;
}

Eigen::VectorXd stationary_distribution(const MarkovSource& src) {
    if (!is_irreducible(src)) throw DomainError("chain is reducible");
    const Eigen::Index S = src.transition.rows();
    Eigen::MatrixXd A = src.transition.transpose() - Eigen::MatrixXd::Identity(S, S);
    A.row(S - 1).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(S);
    b(S - 1) = 1.0;
    Eigen::VectorXd pi = A.partialPivLu().solve(b);
    pi = pi.cwiseMax(0.0);
    pi /= pi.sum();
    const double residual =
        (pi.transpose() * src.transition - pi.transpose()).cwiseAbs().maxCoeff();
    if (residual > 1e-12)
        throw DomainError("stationary solve failed to converge");
    return pi;
}

CesaroReport cesaro_mean_distribution(const MarkovSource& src, int n) {
    if (n < 1) throw std::invalid_argument("need n >= 1");
    CesaroReport rep;
    rep.n = n;
    Eigen::RowVectorXd mu = src.initial.transpose();
    Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(src.initial.size());
    Eigen::RowVectorXd prev_avg;
    for (int i = 1; i <= n; ++i) {
        mu = mu * src.transition;
        sum += mu;
        if (i == n - 1) prev_avg = sum / static_cast<double>(i);
    }
    rep.average = (sum / static_cast<double>(n)).transpose();
    if (n >= 2)
        rep.tv_last_step =
            0.5 * (rep.average.transpose() - prev_avg).cwiseAbs().sum();
    if (is_irreducible(src)) {
        const Eigen::VectorXd pi = stationary_distribution(src);
        rep.tv_to_stationary = 0.5 * (rep.average - pi).cwiseAbs().sum();
    }
    return rep;
}

double markov_entropy_rate(const MarkovSource& src) {
    const Eigen::VectorXd pi = stationary_distribution(src);
    return pi.dot(row_entropies(src.transition));
}

namespace {

// class index of each state under the projection onto J
std::vector<std::uint64_t> observation_classes(const ProductSpace& states,
                                               Mask J,
                                               std::uint64_t* class_count) {
    const ProductSpace obs_space = states.subspace(J);
    std::vector<std::size_t> coords;
    std::vector<std::uint64_t> strides;
    std::size_t pos = 0;
    for (std::size_t i = 0; i < states.coord_count(); ++i)
        if (J & (Mask{1} << i)) {
            coords.push_back(i);
            strides.push_back(obs_space.stride(pos++));
        }
    std::vector<std::uint64_t> cls(states.total_size(), 0);
    for (std::uint64_t s = 0; s < states.total_size(); ++s) {
        std::uint64_t c = 0;
        for (std::size_t j = 0; j < coords.size(); ++j)
            c += states.digit(s, coords[j]) * strides[j];
        cls[s] = c;
    }
    *class_count = obs_space.total_size();
    return cls;
}

double entropy_of(const std::vector<double>& v) {
    double h = 0.0;
    for (double m : v)
        if (m > kAtomFloor) h -= m * std::log(m);
    return h;
}

}  // namespace

std::vector<double> observed_entropy_curve(const MarkovSource& src, Mask J,
                                           const Eigen::VectorXd& start,
                                           int len, const Caps& caps) {
    if (len < 1) throw std::invalid_argument("need len >= 1");
    if (J == 0 || J >= (Mask{1} << src.states.coord_count()))
        throw std::invalid_argument("bad observation mask");
    const std::uint64_t S = src.states.total_size();
    std::uint64_t O = 0;
    const auto cls = observation_classes(src.states, J, &O);
    // peak storage: O^{len-1} strings x S hidden states, plus O^len strings
    if (len >= 2)
        checked_pow(O, len - 1, caps.max_total_size / S,
                    "observed joint exceeds size cap");
    checked_pow(O, len, caps.max_total_size,
                "observed joint exceeds size cap");

    std::vector<std::vector<std::pair<std::uint64_t, double>>> nbrs(S);
    for (std::uint64_t s = 0; s < S; ++s)
        for (std::uint64_t t = 0; t < S; ++t)
            if (src.transition(static_cast<Eigen::Index>(s),
                               static_cast<Eigen::Index>(t)) > 0.0)
                nbrs[s].emplace_back(
                    t, src.transition(static_cast<Eigen::Index>(s),
                                      static_cast<Eigen::Index>(t)));

    // alpha[y * S + x] = P(Y(1..t) = y, X(t) = x)
    std::vector<double> alpha(O * S, 0.0);
    for (std::uint64_t x = 0; x < S; ++x)
        if (start(static_cast<Eigen::Index>(x)) > 0.0)
            alpha[cls[x] * S + x] = start(static_cast<Eigen::Index>(x));

    std::vector<double> curve;
    curve.reserve(static_cast<std::size_t>(len));
    for (int t = 1;; ++t) {
        const std::uint64_t strings = alpha.size() / S;
        std::vector<double> ymarg(strings, 0.0);
        for (std::uint64_t ys = 0; ys < strings; ++ys) {
            double m = 0.0;
            for (std::uint64_t x = 0; x < S; ++x) m += alpha[ys * S + x];
            ymarg[ys] = m;
        }
        curve.push_back(entropy_of(ymarg));
        if (t == len) break;

        if (t + 1 == len) {
            // final step: the hidden state is no longer needed
            std::vector<double> last(strings * O, 0.0);
            for (std::uint64_t ys = 0; ys < strings; ++ys)
                for (std::uint64_t x = 0; x < S; ++x) {
                    const double m = alpha[ys * S + x];
                    if (m == 0.0) continue;
                    for (const auto& [x2, p] : nbrs[x])
                        last[ys * O + cls[x2]] += m * p;
                }
            curve.push_back(entropy_of(last));
            break;
        }

        std::vector<double> next(strings * O * S, 0.0);
        for (std::uint64_t ys = 0; ys < strings; ++ys)
            for (std::uint64_t x = 0; x < S; ++x) {
                const double m = alpha[ys * S + x];
                if (m == 0.0) continue;
                for (const auto& [x2, p] : nbrs[x])
                    next[(ys * O + cls[x2]) * S + x2] += m * p;
            }
        alpha.swap(next);
    }
    return curve;
}

RateBracket hidden_rate_bracket(const MarkovSource& src, Mask J, int depth,
                                const Caps& caps) {
    if (depth < 1) throw std::invalid_argument("need depth >= 1");
    const Eigen::VectorXd pi = stationary_distribution(src);

    RateBracket out;
    out.depth = depth;
    {
        const auto curve = observed_entropy_curve(src, J, pi, depth + 1, caps);
        out.upper = curve[static_cast<std::size_t>(depth)] -
                    curve[static_cast<std::size_t>(depth - 1)];
    }
    // lower(m) = sum_x1 pi(x1) [H(Y(2..m+1)|x1) - H(Y(2..m)|x1)]
    double lower = 0.0;
    for (Eigen::Index x1 = 0; x1 < pi.size(); ++x1) {
        if (pi(x1) <= 0.0) continue;
        const Eigen::VectorXd start = src.transition.row(x1).transpose();
        const auto curve = observed_entropy_curve(src, J, start, depth, caps);
        const double h_long = curve[static_cast<std::size_t>(depth - 1)];
        const double h_short =
            depth >= 2 ? curve[static_cast<std::size_t>(depth - 2)] : 0.0;
        lower += pi(x1) * (h_long - h_short);
    }
    out.lower = lower;
    return out;
}

std::optional<MarkovSource> project_markov(const MarkovSource& src, Mask J,
                                           double tol) {
    if (J == 0 || J >= (Mask{1} << src.states.coord_count()))
        throw std::invalid_argument("bad projection mask");
    const std::uint64_t S = src.states.total_size();
    std::uint64_t O = 0;
    const auto cls = observation_classes(src.states, J, &O);

    const auto SI = [](std::uint64_t v) {
        return static_cast<Eigen::Index>(v);
    };
    Eigen::MatrixXd lumped =
        Eigen::MatrixXd::Constant(SI(O), SI(O), -1.0);
    for (std::uint64_t s = 0; s < S; ++s) {
        Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(SI(O));
        for (std::uint64_t t = 0; t < S; ++t)
            row(SI(cls[t])) += src.transition(SI(s), SI(t));
        if (lumped(SI(cls[s]), 0) < 0.0) {
            lumped.row(SI(cls[s])) = row;
        } else if ((lumped.row(SI(cls[s])) - row).cwiseAbs().maxCoeff() >
                   tol) {
            return std::nullopt;
        }
    }
    Eigen::VectorXd init = Eigen::VectorXd::Zero(SI(O));
    for (std::uint64_t s = 0; s < S; ++s)
        init(SI(cls[s])) += src.initial(SI(s));
    return MarkovSource(src.states.subspace(J), lumped, init);
}

ProcessProfile process_profile(const MarkovSource& src, int n_max,
                               int bracket_depth, const Caps& caps) {
    if (n_max < 1) throw std::invalid_argument("need n_max >= 1");
    const std::size_t k = src.states.coord_count();
    if (k > static_cast<std::size_t>(caps.max_coords))
        throw CapacityError("process_profile: too many coordinates");

    ProcessProfile prof;
    prof.n_max = n_max;
    prof.subprocesses.resize(std::size_t{1} << k);
    const bool irreducible = is_irreducible(src);

    for (Mask J = 1; J < (Mask{1} << k); ++J) {
        SubprocessReport rep;
        rep.J = J;
        if (auto lumped = project_markov(src, J)) {
            rep.markov = true;
            rep.entropy_curve = markov_entropy_curve(*lumped, n_max);
            if (is_irreducible(*lumped)) {
                rep.rate_exact = true;
                rep.rate_lower = rep.rate_upper = markov_entropy_rate(*lumped);
            }
        } else {
            // exact curve while the observed joint fits, then a bracket
            const std::uint64_t S = src.states.total_size();
            std::uint64_t O = 0;
            observation_classes(src.states, J, &O);
            int feasible = 0;
            std::uint64_t cells = S;
            while (feasible < n_max && cells <= caps.max_total_size / O) {
                cells *= O;
                ++feasible;
            }
            if (feasible >= 1)
                rep.entropy_curve = observed_entropy_curve(
                    src, J, src.initial, feasible, caps);
            bool bracketed = false;
            if (irreducible) {
                const int m = std::max(1, std::min(bracket_depth,
                                                   feasible - 1));
                try {
                    const RateBracket br = hidden_rate_bracket(src, J, m, caps);
                    rep.bracket_depth = br.depth;
                    rep.rate_lower = br.lower;
                    rep.rate_upper = br.upper;
                    bracketed = true;
                } catch (const CapacityError&) {
                }
            }
            if (!bracketed && rep.entropy_curve.size() >= 2) {
                const std::size_t e = rep.entropy_curve.size();
                rep.rate_lower = rep.rate_upper =
                    rep.entropy_curve[e - 1] - rep.entropy_curve[e - 2];
            }
        }
        prof.subprocesses[J] = std::move(rep);
    }
    if (!prof.subprocesses.empty()) prof.subprocesses[0].markov = true;

    // M'(X^{(n)})/n while the explicit path distribution fits
    const std::uint64_t S = src.states.total_size();
    std::uint64_t total = 1;
    for (int n = 1; n <= n_max; ++n) {
        if (total > caps.max_total_size / S) break;
        total *= S;
        if (total > (std::uint64_t{1} << 24)) break;  // keep the track cheap
        const JointDistribution path = finite_horizon_distribution(src, n, caps);
        prof.fluct_track.push_back(max_fluctuation(path, caps) / n);
    }
    return prof;
}

}  // namespace eplab
