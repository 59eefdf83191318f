#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "eplab/common.hpp"

namespace eplab {

// Finite alphabet. Labels are optional; when present they must be unique
// and there must be exactly `size` of them.
struct Alphabet {
    std::uint32_t size = 0;
    std::vector<std::string> labels;

    explicit Alphabet(std::uint32_t n) : size(n) {}
    Alphabet(std::uint32_t n, std::vector<std::string> names);

    bool operator==(const Alphabet&) const = default;
};

// Ordered product of finite alphabets with a fixed flat indexing:
// mixed radix with factor 1 most significant. An empty factor list is the
// one-point space (used for marginals onto the empty coordinate set).
class ProductSpace {
public:
    ProductSpace() : total_(1) {}
    explicit ProductSpace(std::vector<Alphabet> factors);

    std::size_t coord_count() const { return factors_.size(); }
    std::uint64_t total_size() const { return total_; }
    const Alphabet& factor(std::size_t i) const { return factors_[i]; }
    const std::vector<Alphabet>& factors() const { return factors_; }
    std::uint64_t stride(std::size_t i) const { return strides_[i]; }

    std::uint32_t digit(std::uint64_t flat, std::size_t i) const {
        return static_cast<std::uint32_t>((flat / strides_[i]) %
                                          factors_[i].size);
    }
    void decode(std::uint64_t flat, std::span<std::uint32_t> out) const;
    std::uint64_t encode(std::span<const std::uint32_t> digits) const;

    // Sub-space made of the factors selected by I (ascending coordinate
    // order). Coordinate i corresponds to bit (i-1).
    ProductSpace subspace(Mask I) const;

    bool operator==(const ProductSpace&) const = default;

private:
    std::vector<Alphabet> factors_;
    std::vector<std::uint64_t> strides_;
    std::uint64_t total_;
};

// Exact probability vector over a product space. Mass entries below
// kAtomFloor are clamped to zero on construction; the remaining entries
// form the support.
class JointDistribution {
public:
    JointDistribution(ProductSpace space, std::vector<double> mass);

    const ProductSpace& space() const { return space_; }
    std::span<const double> mass() const { return mass_; }
    double mass_at(std::uint64_t flat) const { return mass_[flat]; }
    std::uint64_t support_size() const { return support_size_; }

    static JointDistribution point_mass();

    bool operator==(const JointDistribution&) const = default;

private:
    ProductSpace space_;
    std::vector<double> mass_;
    std::uint64_t support_size_ = 0;
};

// Non-negative vector with total mass in [0, 1].
class SubProbability {
public:
    SubProbability(ProductSpace space, std::vector<double> mass);
    explicit SubProbability(std::vector<double> mass);

    const ProductSpace& space() const { return space_; }
    std::span<const double> mass() const { return mass_; }
    double total_mass() const { return total_; }
    double max_atom() const { return max_atom_; }

private:
    void validate();

    ProductSpace space_;
    std::vector<double> mass_;
    double total_ = 0.0;
    double max_atom_ = 0.0;
};

// Distribution of the sub-vector X_I. I may be empty, in which case the
// result is the one-point distribution.
JointDistribution marginal(const JointDistribution& dist, Mask I);

// Full mask {1..k} of a distribution's coordinates.
inline Mask full_mask(std::size_t k) {
    return static_cast<Mask>((std::uint64_t{1} << k) - 1);
}

// Translates a subset S of the coordinates selected by I into the
// coordinate numbering of marginal(d, I). S must be a subset of I.
Mask relabel_into(Mask S, Mask I);

}  // namespace eplab
