#include "eplab/profile.hpp"

#include <cmath>

#include "eplab/fluctuation.hpp"

namespace eplab {

ProfileVector::ProfileVector(int k, std::vector<double> values)
    : k_(k), v_(std::move(values)) {
    if (k < 0 || k > 30) throw std::invalid_argument("bad ground-set size");
    if (v_.size() != (std::size_t{1} << k))
        throw std::invalid_argument("profile length != 2^k");
    if (v_[0] != 0.0)
        throw std::invalid_argument("profile value at empty set must be 0");
}

void ProfileVector::set(Mask I, double value) {
    if (I >= v_.size()) throw std::invalid_argument("subset out of range");
    if (I == 0 && value != 0.0)
        throw std::invalid_argument("profile value at empty set must be 0");
    v_[I] = value;
}

ModularProfile::ModularProfile(std::vector<std::uint32_t> sizes)
    : alphabet_sizes(std::move(sizes)),
      profile(static_cast<int>(alphabet_sizes.size())) {
    std::vector<double> ln_sizes(alphabet_sizes.size());
    for (std::size_t i = 0; i < alphabet_sizes.size(); ++i) {
        if (alphabet_sizes[i] == 0)
            throw std::invalid_argument("alphabet must have size >= 1");
        ln_sizes[i] = std::log(static_cast<double>(alphabet_sizes[i]));
    }
    for (Mask I = 1; I < profile.component_count(); ++I) {
        double s = 0.0;
        for (std::size_t i = 0; i < ln_sizes.size(); ++i)
            if (I & (Mask{1} << i)) s += ln_sizes[i];
        profile.set(I, s);
    }
}

ProfileVector entropy_profile(const JointDistribution& dist,
                              const Caps& caps) {
    const std::size_t k = dist.space().coord_count();
    if (k > static_cast<std::size_t>(caps.max_coords))
        throw CapacityError("entropy_profile: too many coordinates");
    ProfileVector p(static_cast<int>(k));
    for (Mask I = 1; I < p.component_count(); ++I)
        p.set(I, entropy(marginal(dist, I)));
    return p;
}

ProfileVector convolve(const ProfileVector& u, const ProfileVector& v) {
    if (v.ground_size() > u.ground_size())
        throw std::invalid_argument("convolution needs l <= k");
    const Mask enc = full_mask(static_cast<std::size_t>(v.ground_size()));
    ProfileVector w(u.ground_size());
    for (Mask I = 1; I < w.component_count(); ++I) {
        const Mask T = I & enc;
        double best = u[I];  // J = empty
        for (Mask J = T; J != 0; J = (J - 1) & T)
            best = std::min(best, u[I & ~J] + v[J]);
        w.set(I, best);
    }
    return w;
}

Mask convolve_witness(const ProfileVector& u, const ProfileVector& v,
                      Mask I) {
    if (v.ground_size() > u.ground_size())
        throw std::invalid_argument("convolution needs l <= k");
    const Mask T = I & full_mask(static_cast<std::size_t>(v.ground_size()));
    double best = u[I];
    Mask witness = 0;
    for (Mask J = T; J != 0; J = (J - 1) & T) {
        const double c = u[I & ~J] + v[J];
        if (c < best || (c == best && J < witness)) {
            best = c;
            witness = J;
        }
    }
    return witness;
}

double max_norm_distance(const ProfileVector& u, const ProfileVector& v) {
    if (u.ground_size() != v.ground_size())
        throw std::invalid_argument("profile dimension mismatch");
    double d = 0.0;
    for (Mask I = 0; I < u.component_count(); ++I)
        d = std::max(d, std::abs(u[I] - v[I]));
    return d;
}

}  // namespace eplab
