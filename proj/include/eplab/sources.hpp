#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "eplab/distribution.hpp"

namespace eplab {

// Homogeneous finite-state chain over a coordinate-structured state space.
// `initial` is the law of the first observed variable X(1), so a
// deterministic start is a point mass here.
struct MarkovSource {
    ProductSpace states;
    Eigen::MatrixXd transition;  // row-stochastic
    Eigen::VectorXd initial;

    MarkovSource(ProductSpace states_, Eigen::MatrixXd transition_,
                 Eigen::VectorXd initial_);
};

enum class BoardStart { origin, stationary };

// Random walk on the size x size torus: one of the four unit moves with
// probability 1/4 each, wrapping around the edges.
MarkovSource screwed_chessboard(int size = 8,
                                BoardStart start = BoardStart::origin);

// Degree-weighted random walk on the size x size grid graph (no wrap).
MarkovSource standard_chessboard(int size = 8,
                                 BoardStart start = BoardStart::origin);

// Memoryless chain emitting `base` at every step, independent of the
// current state.
MarkovSource iid_markov_source(const JointDistribution& base);

// n-fold product measure, regrouped so that original coordinate i becomes
// the block (X_i(1), ..., X_i(n)) with step 1 most significant.
JointDistribution iid_expansion(const JointDistribution& base, int n,
                                const Caps& caps = {});

// Exact law of (X(1), ..., X(n)), coordinate-structured as k blocks of
// length n (same block layout as iid_expansion).
JointDistribution finite_horizon_distribution(const MarkovSource& src, int n,
                                              const Caps& caps = {});

// H(X^{(n)}) for n = 1..n_max via the chain rule on state marginals;
// O(n |S|^2), no path enumeration.
std::vector<double> markov_entropy_curve(const MarkovSource& src, int n_max);

bool is_irreducible(const MarkovSource& src);
// gcd of cycle lengths; requires irreducibility.
int chain_period(const MarkovSource& src);

// Unique pi with pi P = pi, by dense linear solve (works for periodic
// chains). Throws DomainError when the chain is reducible.
Eigen::VectorXd stationary_distribution(const MarkovSource& src);

struct CesaroReport {
    Eigen::VectorXd average;
    int n = 0;
    // total-variation distance to the stationary law (when irreducible)
    std::optional<double> tv_to_stationary;
    // TV between the averages at n and n-1 (0 when n == 1)
    double tv_last_step = 0.0;
};
// (1/n) sum_{i=1..n} initial P^i.
CesaroReport cesaro_mean_distribution(const MarkovSource& src, int n);

// h = sum_s pi_s sum_t p_st (-ln p_st); requires irreducibility.
double markov_entropy_rate(const MarkovSource& src);

// Conditional-entropy sandwich for the entropy rate of the projection
// Y = X_J of a stationary chain:
//   lower(m) = H(Y(m+1) | Y(2..m), X(1)),
//   upper(m) = H(Y(m+1) | Y(1..m)),
// both under the stationary law. Lower is non-decreasing and upper
// non-increasing in m, with equality at every depth when Y is itself
// Markov.
struct RateBracket {
    int depth = 0;
    double lower = 0.0;
    double upper = 0.0;
};
RateBracket hidden_rate_bracket(const MarkovSource& src, Mask J, int depth,
                                const Caps& caps = {});

// Exact entropies H(Y(1..t)), t = 1..len, of the projected process started
// from `start` at time 1.
std::vector<double> observed_entropy_curve(const MarkovSource& src, Mask J,
                                           const Eigen::VectorXd& start,
                                           int len, const Caps& caps = {});

// Strong-lumpability projection onto the coordinates in J; empty when the
// projected process is not Markov for every initial distribution.
std::optional<MarkovSource> project_markov(const MarkovSource& src, Mask J,
                                           double tol = 1e-12);

struct SubprocessReport {
    Mask J = 0;
    bool markov = false;  // projection is Markov (strongly lumpable)
    // H(X_J^{(n)}), n = 1..curve length (exact; truncated by capacity for
    // non-Markov projections)
    std::vector<double> entropy_curve;
    bool rate_exact = false;
    double rate_lower = 0.0;
    double rate_upper = 0.0;
    int bracket_depth = 0;  // 0 when the rate is exact
};

struct ProcessProfile {
    int n_max = 0;
    std::vector<SubprocessReport> subprocesses;  // indexed by subset mask
    std::vector<double> fluct_track;  // M'(X^{(n)})/n, n = 1..track length
};

// Entropy-rate profile over all coordinate subsets, exact where the
// sub-process is Markov and bracketed otherwise, plus the M'/n track at
// small horizons.
ProcessProfile process_profile(const MarkovSource& src, int n_max,
                               int bracket_depth = 4, const Caps& caps = {});

}  // namespace eplab
