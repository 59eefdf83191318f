#include "eplab/encoding.hpp"

#include <cmath>

#include "eplab/fluctuation.hpp"

namespace eplab {

Encoding Encoding::identity(const ProductSpace& space, std::size_t ell) {
    if (ell > space.coord_count())
        throw std::invalid_argument("ell exceeds coordinate count");
    Encoding f;
    f.ell = ell;
    f.tables.resize(ell);
    f.output_sizes.resize(ell);
    for (std::size_t i = 0; i < ell; ++i) {
        const std::uint32_t n = space.factor(i).size;
        f.output_sizes[i] = n;
        f.tables[i].resize(n);
        for (std::uint32_t a = 0; a < n; ++a) f.tables[i][a] = a;
    }
    return f;
}

EncodingEnsemble::EncodingEnsemble(ProductSpace input,
                                   std::vector<std::uint32_t> output_sizes)
    : input_(std::move(input)), output_sizes_(std::move(output_sizes)) {
    if (output_sizes_.size() > input_.coord_count())
        throw std::invalid_argument("more output alphabets than coordinates");
    std::uint64_t count = 1;
    bool fits = true;
    for (std::size_t i = 0; i < output_sizes_.size(); ++i) {
        if (output_sizes_[i] == 0)
            throw std::invalid_argument("output alphabet must have size >= 1");
        const std::uint32_t a = input_.factor(i).size;
        log_count_ +=
            a * std::log(static_cast<double>(output_sizes_[i]));
        for (std::uint32_t rep = 0; rep < a && fits; ++rep) {
            if (count > UINT64_MAX / output_sizes_[i])
                fits = false;
            else
                count *= output_sizes_[i];
        }
    }
    if (fits) exact_count_ = count;
}

ProductSpace EncodingEnsemble::output_space() const {
    std::vector<Alphabet> factors;
    for (std::size_t i = 0; i < input_.coord_count(); ++i) {
        if (i < output_sizes_.size())
            factors.emplace_back(output_sizes_[i]);
        else
            factors.push_back(input_.factor(i));
    }
    return ProductSpace(std::move(factors));
}

Encoding sample_encoding(const EncodingEnsemble& ensemble, CounterRng& rng) {
    Encoding f;
    f.ell = ensemble.ell();
    f.output_sizes = ensemble.output_sizes();
    f.tables.resize(f.ell);
    for (std::size_t i = 0; i < f.ell; ++i) {
        f.tables[i].resize(ensemble.input().factor(i).size);
        for (auto& cell : f.tables[i])
            cell = rng.uniform_below(f.output_sizes[i]);
    }
    return f;
}

EncodingEnumerator::EncodingEnumerator(const EncodingEnsemble& ensemble,
                                       const Caps& caps)
    : ensemble_(&ensemble) {
    const auto count = ensemble.exact_count();
    if (!count || *count > caps.max_enumeration)
        throw CapacityError("encoding ensemble too large to enumerate");
    current_.ell = ensemble.ell();
    current_.output_sizes = ensemble.output_sizes();
    current_.tables.resize(current_.ell);
    for (std::size_t i = 0; i < current_.ell; ++i)
        current_.tables[i].assign(ensemble.input().factor(i).size, 0);
}

void EncodingEnumerator::advance() {
    // increment the least significant cell (last coordinate, last symbol)
    for (std::size_t i = current_.ell; i-- > 0;) {
        auto& table = current_.tables[i];
        for (std::size_t a = table.size(); a-- > 0;) {
            if (table[a] + 1 < current_.output_sizes[i]) {
                ++table[a];
                return;
            }
            table[a] = 0;
        }
    }
    valid_ = false;
}

JointDistribution pushforward(const JointDistribution& dist,
                              const Encoding& f) {
    const ProductSpace& in = dist.space();
    const std::size_t k = in.coord_count();
    if (f.ell > k || f.tables.size() != f.ell ||
        f.output_sizes.size() != f.ell)
        throw std::invalid_argument("encoding shape mismatch");

    std::vector<Alphabet> out_factors;
    for (std::size_t i = 0; i < k; ++i) {
        if (i < f.ell) {
            if (f.tables[i].size() != in.factor(i).size)
                throw std::invalid_argument("encoding table size mismatch");
            out_factors.emplace_back(f.output_sizes[i]);
        } else {
            out_factors.push_back(in.factor(i));
        }
    }
    ProductSpace out_space(std::move(out_factors));
    std::vector<double> out(out_space.total_size(), 0.0);

    // contribution of input digit a at coordinate j to the output index
    std::vector<std::vector<std::uint64_t>> contrib(k);
    for (std::size_t j = 0; j < k; ++j) {
        const std::uint32_t n = in.factor(j).size;
        contrib[j].resize(n);
        for (std::uint32_t a = 0; a < n; ++a) {
            const std::uint32_t mapped = j < f.ell ? f.tables[j][a] : a;
            if (mapped >= out_space.factor(j).size)
                throw std::invalid_argument("encoding value out of range");
            contrib[j][a] = mapped * out_space.stride(j);
        }
    }

    // odometer over input indices; output index tracked incrementally
    const auto mass = dist.mass();
    std::vector<std::uint32_t> digit(k, 0);
    std::uint64_t acc = 0;
    for (std::size_t j = 0; j < k; ++j) acc += contrib[j][0];
    for (std::uint64_t x = 0;;) {
        out[acc] += mass[x];
        if (++x == in.total_size()) break;
        for (std::size_t j = k; j-- > 0;) {
            const std::uint32_t d = digit[j];
            if (d + 1 < in.factor(j).size) {
                digit[j] = d + 1;
                acc += contrib[j][d + 1] - contrib[j][d];
                break;
            }
            digit[j] = 0;
            acc += contrib[j][0] - contrib[j][d];
        }
    }
    return JointDistribution(std::move(out_space), std::move(out));
}

Encoding restrict_encoding(const Encoding& f, const ProductSpace& space,
                           Mask I) {
    Encoding out;
    for (std::size_t i = 0; i < space.coord_count(); ++i) {
        if (!(I & (Mask{1} << i))) continue;
        if (i < f.ell) {
            out.tables.push_back(f.tables[i]);
            out.output_sizes.push_back(f.output_sizes[i]);
        }
    }
    out.ell = out.tables.size();
    return out;
}

EncodingDiagnostics good_encoding_test(const JointDistribution& dist,
                                       const Encoding& f,
                                       const ProfileVector& target,
                                       double eps, double H,
                                       const Caps& caps) {
    if (!(eps > 0.0) || !(H > 0.0))
        throw std::invalid_argument("good_encoding_test needs eps, H > 0");
    const JointDistribution pushed = pushforward(dist, f);
    EncodingDiagnostics d;
    d.profile_distance = max_norm_distance(entropy_profile(pushed, caps),
                                           target);
    d.max_fluct = max_fluctuation(pushed, caps);
    d.good = d.max_fluct <= eps * H && d.profile_distance <= eps * H;
    return d;
}

EncodingDiagnostics good_encoding_test(const JointDistribution& dist,
                                       const Encoding& f,
                                       const ModularProfile& b, double eps,
                                       double H, const Caps& caps) {
    const ProfileVector target =
        convolve(entropy_profile(dist, caps), b.profile);
    return good_encoding_test(dist, f, target, eps, H, caps);
}

namespace {

ProfileVector convolution_target(const JointDistribution& dist,
                                 const EncodingEnsemble& ensemble,
                                 const Caps& caps) {
    ModularProfile b(ensemble.output_sizes());
    return convolve(entropy_profile(dist, caps), b.profile);
}

}  // namespace

ProportionEstimate proportion_good_exact(const JointDistribution& dist,
                                         const EncodingEnsemble& ensemble,
                                         double eps, double H,
                                         const Caps& caps) {
    const ProfileVector target = convolution_target(dist, ensemble, caps);
    ProportionEstimate est;
    est.exact = true;
    for (EncodingEnumerator en(ensemble, caps); en.valid(); en.advance()) {
        ++est.denominator;
        if (good_encoding_test(dist, en.current(), target, eps, H, caps).good)
            ++est.good;
    }
    est.value = static_cast<double>(est.good) /
                static_cast<double>(est.denominator);
    est.wilson = {est.value, est.value};
    return est;
}

ProportionEstimate proportion_good_monte_carlo(
    const JointDistribution& dist, const EncodingEnsemble& ensemble,
    double eps, double H, std::uint64_t trials, std::uint64_t seed,
    const Caps& caps) {
    if (trials == 0) throw std::invalid_argument("need at least one trial");
    const ProfileVector target = convolution_target(dist, ensemble, caps);
    ProportionEstimate est;
    est.exact = false;
    est.denominator = trials;
    for (std::uint64_t t = 0; t < trials; ++t) {
        CounterRng rng(seed, t);
        const Encoding f = sample_encoding(ensemble, rng);
        if (good_encoding_test(dist, f, target, eps, H, caps).good)
            ++est.good;
    }
    est.value = static_cast<double>(est.good) / static_cast<double>(trials);
    est.wilson = wilson95(est.good, trials);
    return est;
}

}  // namespace eplab
