#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "eplab/fluctuation.hpp"
#include "test_util.hpp"

using namespace eplab;
using namespace eplab::testing;

TEST_CASE("product space mixed-radix indexing, factor 1 most significant") {
    const ProductSpace sp = space_of({2, 3});
    CHECK(sp.total_size() == 6);
    CHECK(sp.stride(0) == 3);
    CHECK(sp.stride(1) == 1);
    const std::vector<std::uint32_t> tuple{1, 2};
    CHECK(sp.encode(tuple) == 5);
    std::vector<std::uint32_t> out(2);
    sp.decode(5, out);
    CHECK(out == tuple);
    CHECK(sp.digit(5, 0) == 1);
    CHECK(sp.digit(5, 1) == 2);

    // round trip over the whole space
    for (std::uint64_t x = 0; x < sp.total_size(); ++x) {
        sp.decode(x, out);
        CHECK(sp.encode(out) == x);
    }
}

TEST_CASE("distribution validation") {
    CHECK_THROWS_AS(make_dist({2}, {0.5, 0.6}), std::invalid_argument);
    CHECK_THROWS_AS(make_dist({2}, {-0.1, 1.1}), std::invalid_argument);
    CHECK_THROWS_AS(make_dist({2}, {1.0}), std::invalid_argument);

    // atoms below the floor are dropped from the support
    const auto d = make_dist({2}, {1.0 - 1e-16, 1e-16});
    CHECK(d.support_size() == 1);
    CHECK(d.mass_at(1) == 0.0);

    CHECK_THROWS_AS(Alphabet(2, {"a", "a"}), std::invalid_argument);
    CHECK_THROWS_AS(Alphabet(2, {"a"}), std::invalid_argument);
}

TEST_CASE("marginal of independent fair bits is uniform") {
    const auto d = make_dist({2, 2}, {0.25, 0.25, 0.25, 0.25});
    const auto m = marginal(d, 0b01);
    REQUIRE(m.space().coord_count() == 1);
    CHECK(m.mass_at(0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(m.mass_at(1) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("empty marginal is the one-point law") {
    const auto d = make_dist({2, 3}, {0.1, 0.2, 0.3, 0.1, 0.2, 0.1});
    const auto m = marginal(d, 0);
    CHECK(m.space().total_size() == 1);
    CHECK(m.mass_at(0) == 1.0);
    CHECK(entropy(m) == 0.0);
}

TEST_CASE("marginal by column sums") {
    const auto d = make_dist({2, 2}, {0.4, 0.1, 0.1, 0.4});
    const auto m = marginal(d, 0b10);
    CHECK(close(m.mass_at(0), 0.5, 1e-15));
    CHECK(close(m.mass_at(1), 0.5, 1e-15));
}

TEST_CASE("marginal rejects out-of-range subsets") {
    const auto d = make_dist({2}, {0.5, 0.5});
    CHECK_THROWS_AS(marginal(d, 0b10), std::invalid_argument);
}

TEST_CASE("relabel_into maps subsets into marginal numbering") {
    // I = {1,3,4}; coordinate 3 is the second coordinate of the marginal
    CHECK(relabel_into(0b100, 0b1101) == 0b010);
    CHECK(relabel_into(0b1001, 0b1101) == 0b101);
    CHECK(relabel_into(0, 0b1101) == 0);
    CHECK_THROWS_AS(relabel_into(0b010, 0b1101), std::invalid_argument);
}

TEST_CASE("marginals compose") {
    CounterRng rng(2024, 0);
    for (int rep = 0; rep < 50; ++rep) {
        const auto d = random_dist({2, 3, 2}, rng);
        const Mask I = 1 + rng.uniform_below(7);
        Mask Ip = 1 + rng.uniform_below(7);
        Ip &= I;
        const auto direct = marginal(d, Ip);
        const auto via = marginal(marginal(d, I), relabel_into(Ip, I));
        REQUIRE(via.space().total_size() == direct.space().total_size());
        for (std::uint64_t x = 0; x < direct.space().total_size(); ++x)
            CHECK(close(via.mass_at(x), direct.mass_at(x), 1e-13));
    }
}

TEST_CASE("sub-probability accepts deficient mass and tracks the max atom") {
    const SubProbability P({0.25, 0.0, 0.125});
    CHECK(P.total_mass() == doctest::Approx(0.375));
    CHECK(P.max_atom() == 0.25);
    CHECK_THROWS_AS(SubProbability({0.9, 0.2}), std::invalid_argument);
}
