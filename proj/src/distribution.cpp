#include "eplab/distribution.hpp"

#include <cmath>
#include <unordered_set>

namespace eplab {

WilsonInterval wilson95(std::uint64_t successes, std::uint64_t trials) {
    if (trials == 0) return {0.0, 1.0};
    constexpr double z = 1.959963984540054;  // Phi^{-1}(0.975)
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half =
        (z / denom) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    WilsonInterval w{center - half, center + half};
    // the endpoints are exactly 0 and 1 at the boundary counts; keep them
    // free of rounding noise
    if (successes == 0) w.lo = 0.0;
    if (successes == trials) w.hi = 1.0;
    return w;
}

Alphabet::Alphabet(std::uint32_t n, std::vector<std::string> names)
    : size(n), labels(std::move(names)) {
    if (!labels.empty()) {
        if (labels.size() != size)
            throw std::invalid_argument("alphabet label count != size");
        std::unordered_set<std::string> seen(labels.begin(), labels.end());
        if (seen.size() != labels.size())
            throw std::invalid_argument("alphabet labels must be unique");
    }
}

ProductSpace::ProductSpace(std::vector<Alphabet> factors)
    : factors_(std::move(factors)) {
    strides_.resize(factors_.size());
    total_ = 1;
    for (std::size_t i = factors_.size(); i-- > 0;) {
        if (factors_[i].size == 0)
            throw std::invalid_argument("alphabet must have size >= 1");
        strides_[i] = total_;
        total_ *= factors_[i].size;
    }
}

void ProductSpace::decode(std::uint64_t flat,
                          std::span<std::uint32_t> out) const {
    for (std::size_t i = 0; i < factors_.size(); ++i)
        out[i] = digit(flat, i);
}

std::uint64_t ProductSpace::encode(
    std::span<const std::uint32_t> digits) const {
    std::uint64_t flat = 0;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
        if (digits[i] >= factors_[i].size)
            throw std::invalid_argument("symbol index out of range");
        flat += digits[i] * strides_[i];
    }
    return flat;
}

ProductSpace ProductSpace::subspace(Mask I) const {
    std::vector<Alphabet> sub;
    for (std::size_t i = 0; i < factors_.size(); ++i)
        if (I & (Mask{1} << i)) sub.push_back(factors_[i]);
    return ProductSpace(std::move(sub));
}

JointDistribution::JointDistribution(ProductSpace space,
                                     std::vector<double> mass)
    : space_(std::move(space)), mass_(std::move(mass)) {
    if (mass_.size() != space_.total_size())
        throw std::invalid_argument("mass vector length != space size");
    // Kahan summation: the tolerance is 1e-12 even for multi-million-atom
    // vectors, where naive accumulation drifts past it.
    double total = 0.0, comp = 0.0;
    for (double& m : mass_) {
        if (m < 0.0) throw std::invalid_argument("negative probability mass");
        if (m < kAtomFloor) m = 0.0;
        const double y = m - comp;
        const double t = total + y;
        comp = (t - total) - y;
        total = t;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("probability mass must sum to 1");
    for (double m : mass_)
        if (m > 0.0) ++support_size_;
}

JointDistribution JointDistribution::point_mass() {
    return JointDistribution(ProductSpace{}, {1.0});
}

SubProbability::SubProbability(ProductSpace space, std::vector<double> mass)
    : space_(std::move(space)), mass_(std::move(mass)) {
    if (mass_.size() != space_.total_size())
        throw std::invalid_argument("mass vector length != space size");
    validate();
}

SubProbability::SubProbability(std::vector<double> mass)
    : mass_(std::move(mass)) {
    if (mass_.empty()) throw std::invalid_argument("need at least one atom");
    space_ = ProductSpace(
        {Alphabet(static_cast<std::uint32_t>(mass_.size()))});
    validate();
}

void SubProbability::validate() {
    for (double& m : mass_) {
        if (m < 0.0) throw std::invalid_argument("negative mass");
        if (m < kAtomFloor) m = 0.0;
        total_ += m;
        if (m > max_atom_) max_atom_ = m;
    }
    if (total_ > 1.0 + 1e-12)
        throw std::invalid_argument("sub-probability mass exceeds 1");
}

JointDistribution marginal(const JointDistribution& dist, Mask I) {
    const ProductSpace& sp = dist.space();
    const std::size_t k = sp.coord_count();
    if (I >= (Mask{1} << k))
        throw std::invalid_argument("coordinate index out of range");
    if (I == 0) return JointDistribution::point_mass();

    ProductSpace out_space = sp.subspace(I);
    std::vector<double> out(out_space.total_size(), 0.0);

    // out-strides aligned with the selected coordinates, ascending.
    std::vector<std::size_t> coords;
    std::vector<std::uint64_t> out_strides;
    {
        std::size_t pos = 0;
        for (std::size_t i = 0; i < k; ++i)
            if (I & (Mask{1} << i)) {
                coords.push_back(i);
                out_strides.push_back(out_space.stride(pos++));
            }
    }

    const auto mass = dist.mass();
    for (std::uint64_t x = 0; x < sp.total_size(); ++x) {
        const double m = mass[x];
        if (m == 0.0) continue;
        std::uint64_t y = 0;
        for (std::size_t j = 0; j < coords.size(); ++j)
            y += sp.digit(x, coords[j]) * out_strides[j];
        out[y] += m;
    }
    return JointDistribution(std::move(out_space), std::move(out));
}

Mask relabel_into(Mask S, Mask I) {
    if ((S & ~I) != 0)
        throw std::invalid_argument("subset not contained in marginal mask");
    Mask out = 0;
    int pos = 0;
    for (Mask bit = 1; bit <= I && bit != 0; bit <<= 1) {
        if (I & bit) {
            if (S & bit) out |= (Mask{1} << pos);
            ++pos;
        }
    }
    return out;
}

}  // namespace eplab
