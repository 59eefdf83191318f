#pragma once

#include <cstdint>
#include <vector>

#include "eplab/distribution.hpp"

namespace eplab {

// Real vector indexed by subsets of {1..k} (bitmask index, coordinate i at
// bit i-1). The empty-set component is pinned to zero.
class ProfileVector {
public:
    explicit ProfileVector(int k) : k_(k), v_(std::size_t{1} << k, 0.0) {
        if (k < 0 || k > 30) throw std::invalid_argument("bad ground-set size");
    }
    ProfileVector(int k, std::vector<double> values);

    int ground_size() const { return k_; }
    std::size_t component_count() const { return v_.size(); }
    double operator[](Mask I) const { return v_[I]; }
    void set(Mask I, double value);
    const std::vector<double>& values() const { return v_; }

    bool operator==(const ProfileVector&) const = default;

private:
    int k_;
    std::vector<double> v_;
};

// Entropy profile of the output alphabets: value(I) = ln prod_{i in I} |B_i|.
// Modular by construction.
struct ModularProfile {
    std::vector<std::uint32_t> alphabet_sizes;
    ProfileVector profile;

    explicit ModularProfile(std::vector<std::uint32_t> sizes);
    int ell() const { return profile.ground_size(); }
};

// H vector (H(X_I))_{I subset of {1..k}}.
ProfileVector entropy_profile(const JointDistribution& dist,
                              const Caps& caps = {});

// (u * v)_I = min over J subset of I & {1..l} of u_{I\J} + v_J.
ProfileVector convolve(const ProfileVector& u, const ProfileVector& v);

// Lexicographically smallest minimizing split J for component I.
Mask convolve_witness(const ProfileVector& u, const ProfileVector& v, Mask I);

double max_norm_distance(const ProfileVector& u, const ProfileVector& v);

}  // namespace eplab
