#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fklab/oracle.hpp"
#include "fklab/particle_engine.hpp"
#include "test_util.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace fklab;
using namespace testutil;

static double z_score(const Estimate& e, double ref) {
    if (e.stderr_ == 0) return e.mean == ref ? 0 : 1e9;
    return (e.mean - ref) / e.stderr_;
}

TEST_CASE("keyed uniforms") {
    for (std::uint64_t i = 0; i < 1000; ++i) {
        double u = keyed_uniform(7, 1, 2, i);
        CHECK(u >= 0);
        CHECK(u < 1);
    }
    CHECK(keyed_uniform(1, 2, 3, 4) == keyed_uniform(1, 2, 3, 4));
    CHECK(keyed_uniform(1, 2, 3, 4) != keyed_uniform(1, 2, 3, 5));
    CHECK(keyed_uniform(1, 2, 3, 4) != keyed_uniform(1, 3, 3, 4));
}

TEST_CASE("simulate basics") {
    Matrix I = {{1, 0}, {0, 1}};
    auto m = unit_potential_model(I, {Rational(1, 2), Rational(1, 2)}, 5);
    auto t = simulate(m, 1, 5, 99);
    for (auto& x : t.states) CHECK(x == t.states[0]);
    auto r = ref2b_model();
    auto a = simulate(r, 20, 4, 5), b = simulate(r, 20, 4, 5), c = simulate(r, 20, 4, 5, 1);
    CHECK(a.states == b.states);
    CHECK(a.states != c.states);
    CHECK_THROWS_AS(simulate(r, 0, 2, 1), DomainError);
    auto e = empirical_measures(r, a);
    for (auto& eta : e.eta_N) {
        double s = 0;
        for (double v : eta) s += v;
        CHECK(s == doctest::Approx(1.0));
    }
    CHECK(e.gammaN_normalizer[0] == 1);
}

TEST_CASE("thread count does not change results") {
    auto r = ref2b_model();
    setenv("FKLAB_THREADS", "1", 1);
    auto a = gamma_samples(r, 10, 3, 50, 3, r.G(3));
    setenv("FKLAB_THREADS", "4", 1);
    auto b = gamma_samples(r, 10, 3, 50, 3, r.G(3));
    unsetenv("FKLAB_THREADS");
    CHECK(a == b);
}

TEST_CASE("U statistics") {
    auto r = ref2b_model();
    auto t = simulate(r, 7, 2, 11);
    auto f = TensorFunction{{2}, {Rational(3), Rational(-1, 2)}, true};
    auto e = empirical_measures(r, t);
    CHECK(u_statistic(t, 2, f) == doctest::Approx(e.eta_N[2][0] * 3 - e.eta_N[2][1] * 0.5));
    CHECK(u_statistic(t, 1, constant_function({2, 2, 2}, 1)) == 1.0);
    for (int q = 2; q <= 3; ++q) {
        auto F = random_symmetric(2, q, q);
        auto exact = integrate(occupation_tensor(t.states[2], 2, q, OccupationMode::Injective), F);
        CHECK(u_statistic(t, 2, F) == doctest::Approx(to_double(exact)));
        // relabeling particles changes nothing
        auto s = t;
        std::reverse(s.states[2].begin(), s.states[2].end());
        CHECK(integrate(occupation_tensor(s.states[2], 2, q, OccupationMode::Injective), F) == exact);
        auto tens = integrate(occupation_tensor(t.states[2], 2, q, OccupationMode::Tensor), F);
        CHECK(tens == integrate(occupation_tensor(t.states[2], 2, q, OccupationMode::Tensor), symmetrize(F)));
    }
    CHECK_THROWS_AS(u_statistic(t, 1, constant_function(std::vector<int>(8, 2), 1)), DomainError);
}

TEST_CASE("unbiased normalizing constants") {
    auto r = ref2b_model();
    for (int N : {2, 5, 10})
        for (int n = 0; n <= 3; ++n) {
            Vec f = {Rational(1), Rational(3)};
            auto g = flow_gamma(r, n);
            double ref = to_double(dot(g.gamma[n], f));
            auto est = summarize(gamma_samples(r, N, n, 4000, 1000 + N * 10 + n, f));
            CHECK(std::abs(z_score(est, ref)) <= 4);
        }
    auto est = summarize(gamma_samples(ref2_model(), 10000, 1, 1000, 8, {1, 1}));
    CHECK(std::abs(z_score(est, 0.75)) <= 4);
}

TEST_CASE("lambda and ground state") {
    auto r = ref2b_model();
    Matrix K = {{Rational(2, 3), Rational(1, 3)}, {Rational(1, 3), Rational(2, 3)}};
    auto u = unit_potential_model(K, {Rational(1, 2), Rational(1, 2)}, 4);
    for (double v : lambda_samples(u, 10, 4, 20, 1)) CHECK(v == 0);
    // ratios and logs carry an O(1/N) bias, so N is large next to the runs
    auto est = estimate_lambda(r, 1000, 4, 1000, 21);
    CHECK(std::abs(z_score(est, lambda_reference(r, 4))) <= 4);
    auto big = estimate_lambda(r, 1000, 4, 2000, 22);
    CHECK(est.stderr_ / big.stderr_ == doctest::Approx(std::sqrt(2.0)).epsilon(0.2));
    for (double v : ground_state_samples(r, 10, 4, 20, 2, {1, 1})) CHECK(v == 1);
    Vec f = {Rational(2), Rational(-1)};
    auto gs = estimate_ground_state(r, 1000, 4, 1000, 23, f);
    CHECK(std::abs(z_score(gs, ground_state_reference(r, 4, f))) <= 4);
    Matrix U = {{Rational(1, 2), Rational(1, 2)}, {Rational(1, 2), Rational(1, 2)}};
    auto flat = unit_potential_model(U, {Rational(1, 3), Rational(2, 3)}, 4);
    auto gf = estimate_ground_state(flat, 20, 4, 2000, 24, f);
    // eta_0 = (1/3,2/3), afterwards uniform
    CHECK(std::abs(z_score(gf, (0.0 + 4 * 0.5) / 5)) <= 4);
    auto het = random_model({2, 3}, 1);
    CHECK_THROWS_AS(estimate_lambda(het, 5, 1, 2, 1), DomainError);
}

TEST_CASE("configuration frequencies follow the exact chain") {
    auto r = ref2b_model();
    auto dist = dp_distribution(r, 3, 2);
    const int runs = 4000;
    std::map<Occupancy, int> freq;
    for (int i = 0; i < runs; ++i) freq[occupancy_counts(simulate(r, 3, 2, 77, i), 2, 2)] += 1;
    for (const auto& [c, p] : dist.levels[2]) {
        double pp = to_double(p);
        double se = std::sqrt(pp * (1 - pp) / runs);
        CHECK(std::abs(freq[c] / (double)runs - pp) <= 4 * se);
    }
}

TEST_CASE("centered U statistics on the flat model") {
    auto r = ref2_model();
    auto F = product_function({Vec{1, -1}, Vec{1, -1}, Vec{1, -1}, Vec{1, -1}});
    auto est = summarize(u_statistic_samples(r, 10, 2, 1000, 5, F));
    CHECK(std::abs(z_score(est, 0)) <= 4);
}

TEST_CASE("csv output") {
    std::ostringstream os;
    write_runs_csv(os, "gamma", {0.1, 1.0 / 3});
    CHECK(os.str() == "run_id,quantity,value\n0,gamma,0.10000000000000001\n1,gamma,0.33333333333333331\n");
}
