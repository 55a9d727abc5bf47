#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fklab/expansion.hpp"
#include "fklab/oracle.hpp"
#include "test_util.hpp"

using namespace fklab;
using namespace testutil;

static const Vec kF = {Rational(1), Rational(-1)};

TEST_CASE("L operator examples") {
    auto l1 = l_operator(5, 1);
    CHECK(l1.terms.size() == 1);
    CHECK(l1.terms.at({0}) == 1);
    auto l2 = l_operator(2, 2);
    CHECK(l2.terms.size() == 4);
    for (const auto& kv : l2.terms) CHECK(kv.second == Rational(1, 4));
    CHECK(l_operator(5, 3).total_weight() == 1);
    CHECK_THROWS_AS(l_operator(2, 3), DomainError);
}

TEST_CASE("derivatives of L reconstruct it") {
    auto d0 = dl_operator(0, 3);
    CHECK(d0.terms.size() == 6);
    for (const auto& kv : d0.terms) CHECK(kv.second == Rational(1, 6));
    auto d1 = dl_operator(1, 2);
    CHECK(d1.terms.at({0, 1}) == Rational(-1, 2));
    CHECK(d1.terms.at({1, 0}) == Rational(-1, 2));
    CHECK(d1.terms.at({0, 0}) == Rational(1, 2));
    CHECK(dl_operator(3, 3).terms.empty());
    for (int q = 1; q <= 3; ++q)
        for (int N = q; N <= q + 3; ++N) {
            WeightedMapCombo acc{q, {}};
            for (int k = 0; k < q; ++k) acc = combo_add(acc, combo_scale(dl_operator(k, q), Rational(1) / Rational(power(BigInt(N), k))));
            auto L = l_operator(N, q);
            CHECK(acc.terms == L.terms);
        }
}

TEST_CASE("tensor occupation through L") {
    std::vector<std::vector<int>> xs = {{0, 1, 2}, {0, 0, 1}, {2, 1, 0, 1}};
    for (auto& x : xs)
        for (int q = 1; q <= 3 && q <= (int)x.size(); ++q) {
            int N = (int)x.size();
            auto F = random_function(std::vector<int>(q, 3), 7 + q);
            auto t = occupation_tensor(x, 3, q, OccupationMode::Tensor);
            auto u = occupation_tensor(x, 3, q, OccupationMode::Injective);
            CHECK(integrate(t, F) == integrate(u, combo_apply(l_operator(N, q), F)));
            CHECK(integrate(combo_push(u, l_operator(N, q)), F) == integrate(t, F));
        }
}

TEST_CASE("delta measure examples") {
    auto m = ref2_model();
    auto F = product_function({kF, kF});
    CHECK(integrate(delta_measure(m, make_jungle({{0, 0}})), F) == 1);
    CHECK(integrate(delta_measure(m, make_jungle({{0, 1}})), F) == 0);
    // all bijections at n=1
    auto g = flow_gamma(m, 1);
    auto S = random_symmetric(2, 2, 3);
    auto id = delta_measure(m, make_jungle({{0, 1}, {1, 0}}));
    CHECK(integrate(id, S) == integrate(product_measure({g.gamma[1], g.gamma[1]}), S));
}

TEST_CASE("delta measure matches the backward oracle") {
    auto m = random_model({2, 3, 2}, 11);
    auto F = random_function({3, 3}, 5);
    for_each_jungle(uncolored_profile(1, 2), [&](const Jungle& j) {
        CHECK(integrate(delta_measure(m, j), F) == brute_delta(m, j.maps, F));
    });
}

TEST_CASE("exact measure: small values") {
    auto m = ref2_model();
    auto F = product_function({kF, kF});
    for (int N = 2; N <= 6; ++N) CHECK(q_exact(m, N, 0, 2, F) == Rational(1, N));
    auto g = flow_gamma(m, 2);
    for (int N = 1; N <= 4; ++N) CHECK(q_exact(m, N, 2, 1, TensorFunction{{2}, g.gamma[0], true}) == dot(g.gamma[2], g.gamma[0]));
    CHECK_THROWS_AS(q_exact(m, 2, 0, 3, random_symmetric(2, 3, 1)), DomainError);
}

TEST_CASE("exact measure against brute sum and particle DP") {
    auto b = ref2b_model();
    auto S = random_symmetric(2, 3, 21);
    auto t = forest_table(b, 1, 3);
    for (int N = 3; N <= 5; ++N) {
        Rational v = q_exact(t, N, S);
        CHECK(v == brute_a_sum(b, N, 1, 3, S));
        CHECK(v == dp_q_measure(b, N, 1, 3, S));
    }
    auto m = random_model({3, 3, 3}, 4);
    for (int q = 1; q <= 3; ++q)
        for (int n = 0; n <= 2; ++n) {
            if (q == 3 && n == 2) continue;
            auto F = random_symmetric(3, q, 100 + q + n);
            auto tab = forest_table(m, n, q);
            for (int N = q; N <= q + 2; ++N) CHECK(q_exact(tab, N, F) == dp_q_measure(m, N, n, q, F));
        }
}

TEST_CASE("Laurent orders reconstruct the exact measure") {
    auto m = random_model({2, 2, 2}, 9);
    for (int q = 1; q <= 3; ++q)
        for (int n = 0; n <= 2; ++n) {
            auto F = random_symmetric(2, q, 40 + 3 * q + n);
            auto tab = forest_table(m, n, q);
            auto orders = laurent_table(tab, F);
            CHECK((int)orders.size() == (q - 1) * (n + 1) + 1);
            auto g = flow_gamma(m, n);
            CHECK(orders[0] == integrate(product_measure(std::vector<Vec>(q, g.gamma[n])), F));
            for (int N = q; N <= q + 4; ++N) CHECK(evaluate_orders(orders, N) == q_exact(tab, N, F));
            auto ms = laurent_measures(tab);
            for (size_t k = 0; k < ms.size(); ++k) CHECK(integrate(ms[k], F) == orders[k]);
        }
    auto u = unit_potential_model({{Rational(1, 3), Rational(2, 3)}, {Rational(1, 2), Rational(1, 2)}},
                                  {Rational(1, 4), Rational(3, 4)}, 2);
    auto one = constant_function({2, 2, 2}, 1);
    auto orders = laurent_table(u, 2, 3, one);
    CHECK(orders[0] == 1);
    for (size_t k = 1; k < orders.size(); ++k) CHECK(orders[k] == 0);
    auto f = laurent_table(ref2_model(), 0, 2, product_function({kF, kF}));
    CHECK(f == std::vector<Rational>{0, 1});
}

TEST_CASE("falling weights") {
    auto o = falling_weight_orders({1, 2}, {2, 2});
    // (N)_1/(2 N^2) * (N)_2/(2 N^2) = (N^2 - N)/(4 N^3)
    CHECK(o == std::vector<Rational>{0, Rational(1, 4), Rational(-1, 4)});
    CHECK(evaluate_orders(o, 7) == falling_weight(7, {1, 2}, {2, 2}));
}

TEST_CASE("closed form low orders") {
    for (unsigned seed : {1u, 2u}) {
        auto m = random_model({2, 2}, seed);
        auto F = random_symmetric(2, 4, 60 + seed);
        auto orders = laurent_table(m, 1, 4, F);
        auto lo = low_order_closed_form(m, 1, 4, F);
        CHECK(lo.d0 == orders[0]);
        CHECK(lo.d1 == orders[1]);
        REQUIRE(lo.d2.has_value());
        CHECK(*lo.d2 == orders[2]);
    }
    auto m = random_model({2, 2, 2}, 3);
    for (int q = 2; q <= 3; ++q) {
        auto F = random_symmetric(2, q, 80 + q);
        auto orders = laurent_table(m, 2, q, F);
        auto lo = low_order_closed_form(m, 2, q, F);
        CHECK(lo.d0 == orders[0]);
        CHECK(lo.d1 == orders[1]);
        CHECK(!lo.d2.has_value());
    }
    auto u = unit_potential_model({{Rational(1, 3), Rational(2, 3)}, {Rational(1, 2), Rational(1, 2)}},
                                  {Rational(1, 4), Rational(3, 4)}, 1);
    CHECK(low_order_closed_form(u, 1, 4, constant_function({2, 2, 2, 2}, 1)).d1 == 0);
    CHECK_THROWS_AS(low_order_closed_form(m, 1, 1, random_symmetric(2, 1, 1)), DomainError);
}

TEST_CASE("builders give forests of the constant profile") {
    for (int n = 1; n <= 2; ++n)
        for (int k = 0; k <= n; ++k) {
            auto f = forest_one_coalescence(n, 3, k);
            CHECK(coalescence_data(f, n + 1).degree == 1);
            CHECK(coalescence_data(forest_triple_branch(n, 4, k), n + 1).degree == 2);
            CHECK(coalescence_data(forest_two_pairs(n, 4, k), n + 1).degree == 2);
            for (int l = k + 1; l <= n; ++l)
                for (int v = 1; v <= 4; ++v) CHECK(coalescence_data(forest_two_levels(n, 4, k, l, v), n + 1).degree == 2);
        }
    CHECK_THROWS_AS(forest_two_pairs(1, 3, 0), DomainError);
}

static TensorFunction centered_product(const FiniteFKModel& m, int n, const std::vector<Vec>& fs) {
    auto g = flow_eta(m, n);
    std::vector<Vec> c;
    for (const auto& f : fs) c.push_back(centered(f, g[n]));
    return symmetrize(product_function(c));
}

TEST_CASE("Wick formula") {
    auto m = ref2_model();
    auto F = product_function({kF, kF});
    auto w = wick_derivative(m, 0, 2, F);
    CHECK(w.order == 1);
    CHECK(w.value == 1);
    CHECK_THROWS_AS(wick_derivative(m, 0, 2, product_function({Vec{1, 0}, Vec{1, 0}})), DomainError);

    auto b = ref2b_model();
    std::vector<Vec> fs = {{Rational(1), Rational(3)}, {Rational(-2), Rational(1, 2)}, {Rational(0), Rational(1)},
                           {Rational(5), Rational(-1)}};
    for (int n = 0; n <= 1; ++n)
        for (int q = 2; q <= 4; ++q) {
            std::vector<Vec> use(fs.begin(), fs.begin() + q);
            auto G = centered_product(b, n, use);
            REQUIRE(in_B0(b, n, G));
            auto orders = laurent_table(b, n, q, G);
            for (int k = 0; 2 * k < q; ++k) CHECK(orders[k] == 0);
            auto wr = wick_derivative(b, n, q, G);
            if (q % 2) {
                CHECK(orders[q / 2] == 0);
                CHECK(wr.value == 0);
                continue;
            }
            CHECK(wr.value == orders[q / 2]);
            auto eta = flow_eta(b, n);
            Matrix C(q, Vec(q));
            for (int i = 0; i < q; ++i)
                for (int j = 0; j < q; ++j)
                    C[i][j] = gaussian_covariance(b, n, centered(use[i], eta[n]), centered(use[j], eta[n]));
            CHECK(wr.value == gaussian_moment(C));
        }
}

TEST_CASE("total variation against the limit") {
    auto u = unit_potential_model({{Rational(1, 3), Rational(2, 3)}, {Rational(1, 2), Rational(1, 2)}},
                                  {Rational(1, 4), Rational(3, 4)}, 1);
    auto rows = tv_limit_check(u, 0, 2, {2, 5, 10});
    CHECK(rows.back().value <= 2);
    CHECK(rows.back().bound == 2);
    for (auto& r : tv_limit_check(ref2_model(), 1, 1, {1, 3})) CHECK(r.value == 0);
}

TEST_CASE("linear semigroup through the particle DP") {
    auto m = random_model({2, 2, 2}, 13);
    for (int q = 1; q <= 3; ++q)
        for (int n = 1; n <= 2; ++n) {
            if (q == 3 && n == 2) continue;
            auto F = random_symmetric(2, q, 200 + q * 3 + n);
            for (int N = q; N <= q + 1; ++N) {
                Rational lhs = dp_expected(m, N, n, [&](int t, const Occupancy& c) {
                    if (t < n) return pow(occupancy_mean(c, m.G(t)), q);
                    return occupancy_tensor_value(c, F, OccupationMode::Injective);
                });
                CHECK(lhs == q_exact(m, N, n - 1, q, tensor_kernel_apply(m, n, q, F)));
            }
        }
}
