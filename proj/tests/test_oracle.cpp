#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fklab/oracle.hpp"
#include "test_util.hpp"

using namespace fklab;
using namespace testutil;

static Rational gamma_of(const FiniteFKModel& m, int n, const Vec& f) { return dot(flow_gamma(m, n).gamma[n], f); }

// E[gamma^N_n(f)] as a product statistic of the occupancy chain.
static Rational dp_gamma(const FiniteFKModel& m, int N, int n, const Vec& f) {
    return dp_expected(m, N, n, [&](int k, const Occupancy& c) {
        return k < n ? occupancy_mean(c, m.G(k)) : occupancy_mean(c, f);
    });
}

TEST_CASE("occupancies and multinomials") {
    CHECK(occupancies(3, 2).size() == 4);
    CHECK(occupancies(4, 3).size() == 15);
    CHECK(occupancies(0, 3).size() == 1);
    for (const auto& c : occupancies(5, 3)) {
        int s = 0;
        for (int x : c) s += x;
        CHECK(s == 5);
    }
    Vec law = {ratio(1, 6), ratio(1, 3), ratio(1, 2)};
    Rational total = 0;
    for (const auto& c : occupancies(4, 3)) total += multinomial_probability(c, law);
    CHECK(total == 1);
    CHECK(multinomial_probability({2, 0, 0}, law) == ratio(1, 36));
    CHECK(multinomial_probability({1, 1, 0}, law) == ratio(1, 9));
}

TEST_CASE("occupancy chain has unit mass") {
    auto d = dp_distribution(ref2_model(), 3, 2);
    REQUIRE(d.levels.size() == 3);
    for (const auto& lvl : d.levels) {
        Rational s = 0;
        for (const auto& kv : lvl) s += kv.second;
        CHECK(s == 1);
    }
    auto m = random_model({2, 3, 2}, 7);
    for (const auto& lvl : dp_distribution(m, 4, 2).levels) {
        Rational s = 0;
        for (const auto& kv : lvl) s += kv.second;
        CHECK(s == 1);
    }
}

TEST_CASE("one particle follows the plain kernel") {
    auto m = random_model({2, 3, 2}, 11);
    auto d = dp_distribution(m, 1, 2);
    Vec mu = m.eta0;
    for (int k = 0; k <= 2; ++k) {
        if (k > 0) mu = vec_mat(mu, m.M(k));
        for (int x = 0; x < m.levels[k]; ++x) {
            Occupancy c(m.levels[k], 0);
            c[x] = 1;
            CHECK(d.levels[k][c] == mu[x]);
        }
    }
}

TEST_CASE("unnormalized measures are unbiased") {
    auto m = ref2_model();
    Vec f = {Rational(3), ratio(-1, 2)};
    CHECK(dp_gamma(m, 3, 2, f) == gamma_of(m, 2, f));
    auto r = random_model({2, 2, 3}, 5);
    Vec g = {Rational(1), Rational(2), ratio(-1, 3)};
    for (int N = 1; N <= 4; ++N) CHECK(dp_gamma(r, N, 2, g) == gamma_of(r, 2, g));
    TensorFunction F;
    F.dims = {3};
    F.values = g;
    for (int N = 1; N <= 3; ++N) CHECK(dp_q_measure(r, N, 2, 1, F) == gamma_of(r, 2, g));
}

TEST_CASE("map-sequence sum") {
    auto m = random_model({2, 3, 2}, 3);
    TensorFunction F;
    F.dims = {2};
    F.values = {Rational(2), ratio(1, 3)};
    for (int N = 1; N <= 3; ++N)
        for (int n = 0; n <= 2; ++n) {
            TensorFunction Fn = n == 1 ? random_function({3}, 9) : F;
            CHECK(brute_a_sum(m, N, n, 1, Fn) == gamma_of(m, n, Fn.values));
        }
    // agreement with the occupancy DP where both apply
    for (int n = 0; n <= 2; ++n)
        for (int N = 2; N <= 3; ++N) {
            auto G = random_symmetric(m.levels[n], 2, 100 + n);
            CHECK(brute_a_sum(m, N, n, 2, G) == dp_q_measure(m, N, n, 2, G));
        }
    CHECK_THROWS_AS(brute_a_sum(m, 1, 1, 2, random_symmetric(3, 2, 1)), DomainError);
}

TEST_CASE("block law") {
    auto m = random_model({2, 3, 2}, 21);
    Vec f = {Rational(1), Rational(-2), ratio(1, 2)};
    TensorFunction F;
    F.dims = {3};
    F.values = f;
    auto mean_f = dp_expected(m, 3, 1, [&](int k, const Occupancy& c) {
        return k < 1 ? Rational(1) : occupancy_mean(c, f);
    });
    CHECK(dp_block_law(m, 3, 1, 1, F) == mean_f);
    // (eta^N)^{(x)2} = diag/N + (N-1)/N (eta^N)^{(.)2}, pointwise in the occupancy
    auto G = random_symmetric(3, 2, 4);
    for (const auto& c : occupancies(4, 3)) {
        Rational diag = 0;
        for (int x = 0; x < 3; ++x) diag += Rational(c[x]) * G.values[x * 3 + x];
        CHECK(occupancy_tensor_value(c, G, OccupationMode::Tensor) ==
              diag / 16 + ratio(3, 4) * occupancy_tensor_value(c, G, OccupationMode::Injective));
    }
}

TEST_CASE("jungle stabilizers by search") {
    CHECK(brute_stabilizer(make_jungle({{0, 0}})) == 2);
    CHECK(brute_stabilizer(make_jungle({{0, 1}})) == 2);
}

TEST_CASE("gaussian pair moments") {
    Matrix C = {{Rational(1), Rational(2), Rational(3), Rational(5)},
                {Rational(2), Rational(7), Rational(11), Rational(13)},
                {Rational(3), Rational(11), Rational(17), Rational(19)},
                {Rational(5), Rational(13), Rational(19), Rational(23)}};
    CHECK(gaussian_moment(Matrix{}) == 1);
    CHECK(gaussian_moment({{Rational(4), Rational(6)}, {Rational(6), Rational(9)}}) == 6);
    Matrix C3 = {{Rational(1), Rational(2), Rational(3)}, {Rational(2), Rational(1), Rational(2)}, {Rational(3), Rational(2), Rational(1)}};
    CHECK(gaussian_moment(C3) == 0);
    CHECK(gaussian_moment(C) == C[0][1] * C[2][3] + C[0][2] * C[1][3] + C[0][3] * C[1][2]);
}
