#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "eplab/distribution.hpp"
#include "eplab/profile.hpp"
#include "eplab/rng.hpp"

namespace eplab {

// Coordinate-wise encoding of the first `ell` coordinates: dense lookup
// table per encoded coordinate, identity on the rest.
struct Encoding {
    std::size_t ell = 0;
    std::vector<std::vector<std::uint32_t>> tables;
    std::vector<std::uint32_t> output_sizes;

    static Encoding identity(const ProductSpace& space, std::size_t ell);
};

// The set E_ell of all coordinate-wise encodings of a given shape.
class EncodingEnsemble {
public:
    EncodingEnsemble(ProductSpace input,
                     std::vector<std::uint32_t> output_sizes);

    const ProductSpace& input() const { return input_; }
    const std::vector<std::uint32_t>& output_sizes() const {
        return output_sizes_;
    }
    std::size_t ell() const { return output_sizes_.size(); }
    ProductSpace output_space() const;

    // ln of the ensemble cardinality; the exact count when it fits in 64
    // bits.
    double log_count() const { return log_count_; }
    std::optional<std::uint64_t> exact_count() const { return exact_count_; }

private:
    ProductSpace input_;
    std::vector<std::uint32_t> output_sizes_;
    double log_count_ = 0.0;
    std::optional<std::uint64_t> exact_count_;
};

// Every table entry i.i.d. uniform on its output alphabet, so the draw is
// exactly uniform on the ensemble.
Encoding sample_encoding(const EncodingEnsemble& ensemble, CounterRng& rng);

// Produces each member of the ensemble exactly once, in mixed-radix order
// over the table cells (coordinate 1 / symbol 0 most significant).
class EncodingEnumerator {
public:
    explicit EncodingEnumerator(const EncodingEnsemble& ensemble,
                                const Caps& caps = {});
    bool valid() const { return valid_; }
    const Encoding& current() const { return current_; }
    void advance();

private:
    const EncodingEnsemble* ensemble_;
    Encoding current_;
    bool valid_ = true;
};

JointDistribution pushforward(const JointDistribution& dist,
                              const Encoding& f);

// Encoding induced on the coordinates selected by I (for marginals).
Encoding restrict_encoding(const Encoding& f, const ProductSpace& space,
                           Mask I);

struct EncodingDiagnostics {
    double max_fluct = 0.0;         // M'(f(X))
    double profile_distance = 0.0;  // ||H(f(X)) - target||_max
    bool good = false;
};

// Tests the two typicality conditions M'(f(X)) <= eps*H and
// ||H(f(X)) - H(X)*H(B)||_max <= eps*H against a precomputed convolution
// target (the hot path for sweeps), or against convolve(entropy_profile(X),
// b.profile) in the convenience overload. H is caller-supplied.
EncodingDiagnostics good_encoding_test(const JointDistribution& dist,
                                       const Encoding& f,
                                       const ProfileVector& target,
                                       double eps, double H,
                                       const Caps& caps = {});
EncodingDiagnostics good_encoding_test(const JointDistribution& dist,
                                       const Encoding& f,
                                       const ModularProfile& b, double eps,
                                       double H, const Caps& caps = {});

struct ProportionEstimate {
    double value = 0.0;
    bool exact = false;
    std::uint64_t good = 0;
    std::uint64_t denominator = 0;  // ensemble size or trial count
    WilsonInterval wilson;          // meaningful for Monte Carlo estimates
};

ProportionEstimate proportion_good_exact(const JointDistribution& dist,
                                         const EncodingEnsemble& ensemble,
                                         double eps, double H,
                                         const Caps& caps = {});
ProportionEstimate proportion_good_monte_carlo(
    const JointDistribution& dist, const EncodingEnsemble& ensemble,
    double eps, double H, std::uint64_t trials, std::uint64_t seed,
    const Caps& caps = {});

}  // namespace eplab
