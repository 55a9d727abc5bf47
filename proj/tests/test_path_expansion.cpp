#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fklab/oracle.hpp"
#include "fklab/path_expansion.hpp"
#include "test_util.hpp"

using namespace fklab;
using namespace testutil;

static const std::vector<MultiIndex> kSmall = {{1}, {2}, {3}, {1, 1}, {0, 2}, {2, 1}, {1, 2}, {0, 3},
                                               {1, 0, 1}, {1, 1, 1}, {0, 1, 2}};

// E[...] by the particle DP, one product-form indicator per point.
static Rational dp_qbar(const FiniteFKModel& m, int N, const QSeq& q, const TensorFunction& F) {
    auto dims = path_dims(m, q);
    Rational s = 0;
    for (size_t idx = 0; idx < F.values.size(); ++idx) {
        if (F.values[idx] == 0) continue;
        auto c = unflatten(idx, dims);
        std::vector<TensorFunction> factors;
        int at = 0;
        for (int k = 0; k <= q.n(); ++k) {
            std::vector<int> bd(dims.begin() + at, dims.begin() + at + q.q[k]);
            std::vector<int> pt(c.begin() + at, c.begin() + at + q.q[k]);
            TensorFunction ind = zero_function(bd);
            ind.values[flatten(pt, bd)] = 1;
            factors.push_back(ind);
            at += q.q[k];
        }
        s += F.values[idx] * dp_path_measure(m, N, q.q, factors);
    }
    return s;
}

static TensorFunction random_block_symmetric(const FiniteFKModel& m, const QSeq& q, unsigned seed) {
    return symmetrize(random_function(path_dims(m, q), seed), path_blocks(q));
}

// Product of centered factors, block-symmetrized.
static TensorFunction centered_block_product(const FiniteFKModel& m, const QSeq& q, unsigned seed) {
    std::mt19937_64 g(seed);
    auto eta = flow_eta(m, q.n());
    std::vector<Vec> f;
    for (int k = 0; k <= q.n(); ++k)
        for (int i = 0; i < q.q[k]; ++i) {
            Vec v(m.levels[k]);
            for (auto& x : v) x = small_rational(g);
            f.push_back(centered(v, eta[k]));
        }
    return symmetrize(product_function(f), path_blocks(q));
}

TEST_CASE("q prime") {
    auto a = q_prime({1, 2});
    CHECK(a.qp == MultiIndex{2, 0});
    CHECK(a.abs_qp == 5);
    auto b = q_prime({4});
    CHECK(b.qp == MultiIndex{0});
    CHECK(b.abs_qp == 4);
    CHECK(q_prime({0, 0, 3}).abs_qp == 9);
    auto p = colored_profile(q_prime({1, 2}));
    CHECK(p.white == std::vector<int>{0, 1, 2});
    CHECK(p.black == std::vector<int>{3, 2, 0});
}

TEST_CASE("colored forest enumeration") {
    CHECK(enumerate_colored_forests(q_prime({1})).size() == 1);
    CHECK(enumerate_colored_forests(q_prime({1}))[0].text() == "([])");
    CHECK(enumerate_colored_forests(q_prime({2})).size() == 2);
    for (const auto& qv : kSmall) {
        auto q = q_prime(qv);
        auto prof = colored_profile(q);
        auto a = enumerate_colored_forests(q);
        auto b = enumerate_colored_forests_brute(q);
        CHECK(a == b);
        BigInt total = 0;
        for (const auto& f : a) {
            total += count_colored_jungles(f, q);
            CHECK(count_colored_jungles(f, q) * stabilizer_order(f) == profile_factorial(prof));
        }
        CHECK(total == BigInt(jungle_count(prof)));
    }
    // two black chains of height 1 closing white leaves at time 1
    auto q = q_prime({0, 2});
    auto f = make_forest({wrap(node({wrap(white_leaf(), 0)}), 1), wrap(node({wrap(white_leaf(), 0)}), 1)});
    CHECK(f.trees.size() == 1);
    CHECK(count_colored_jungles(f, q) == 2 * 2 * 2 / 2);
    auto filtered = enumerate_colored_forests(q, MultiIndex{0, 0});
    CHECK(filtered.size() == 1);
}

TEST_CASE("colored delta measures") {
    auto m = ref2_model();
    auto q = q_prime({1, 1});
    auto F = random_block_symmetric(m, q, 4);
    // identity jungle: every vertex has its own line
    auto t = path_table(m, q);
    auto orders = qbar_orders(t, F);
    CHECK(orders[0] == integrate(path_limit(m, q), F));
    // uncolored reduction
    auto b = random_model({2, 2}, 8);
    auto S = random_symmetric(2, 2, 9);
    for (int N = 2; N <= 5; ++N) CHECK(qbar_exact(b, N, q_prime({0, 2}), S) == q_exact(b, N, 1, 2, S));
    CHECK_THROWS_AS(qbar_exact(b, 1, q_prime({0, 2}), S), DomainError);
    // single coalescence at level 0 on q=(1,1): the time-0 white and the time-1
    // line share one root; a second root is a black leaf
    auto f = make_forest({colored_pair_tree(0, 0, 1), chain(0)});
    auto d = delta_colored(m, f, q);
    auto g = flow_gamma(m, 1);
    // atoms: eta0(x) Q_1(x,y) times the mass gamma_0(1) = 1 of the leaf
    auto Q = m.Q(1);
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) CHECK(d.atoms[2 * x + y] == m.eta0[x] * Q[x][y]);
}

TEST_CASE("exact path measure against the particle DP") {
    auto m = random_model({2, 2, 2}, 17);
    for (const auto& qv : kSmall) {
        auto q = q_prime(qv);
        auto F = random_block_symmetric(m, q, 30 + (unsigned)qv.size());
        auto t = path_table(m, q);
        auto orders = qbar_orders(t, F);
        for (int N = q.total(); N <= q.total() + 3; ++N) {
            Rational v = qbar_exact(t, N, F);
            CHECK(evaluate_orders(orders, N) == v);
            if (N <= q.total() + 1) CHECK(v == dp_qbar(m, N, q, F));
        }
        auto ms = qbar_measures(t);
        for (size_t k = 0; k < ms.size(); ++k) CHECK(integrate(ms[k], F) == orders[k]);
    }
    CHECK(qbar_exact(m, 3, q_prime({1}), TensorFunction{{2}, m.eta0, true}) == dot(m.eta0, m.eta0));
}

TEST_CASE("white trivial trees vanish on centered functions") {
    auto m = ref2b_model();
    for (const auto& qv : std::vector<MultiIndex>{{2}, {1, 1}, {2, 1}, {1, 2}, {1, 0, 1}}) {
        auto q = q_prime(qv);
        auto F = centered_block_product(m, q, 3);
        REQUIRE(in_B0_path(m, q, F));
        int checked = 0;
        for (const auto& f : enumerate_colored_forests(q)) {
            bool trivial_white = false;
            for (const auto& [tr, c] : f.trees) {
                int h = tree_height(tr);
                for (int L = 0; L <= h; ++L)
                    if (tr == wrap(white_leaf(), L)) trivial_white = true;
            }
            if (!trivial_white) continue;
            ++checked;
            CHECK(integrate(delta_colored(m, f, q), F) == 0);
        }
        CHECK(checked > 0);
    }
}

TEST_CASE("colored Wick formula") {
    auto m = ref2b_model();
    for (const auto& qv : std::vector<MultiIndex>{{2}, {1, 1}, {0, 2}, {2, 2}, {1, 1, 2}, {1, 0, 1}, {3}, {1, 2}, {1, 1, 1}}) {
        auto q = q_prime(qv);
        auto F = centered_block_product(m, q, 11);
        auto orders = qbar_orders(path_table(m, q), F);
        int half = q.total() / 2;
        for (int k = 0; k < half; ++k) CHECK(orders[k] == 0);
        auto w = colored_wick(m, q, F);
        if (q.total() % 2) {
            CHECK(orders[half] == 0);
            CHECK(w.value == 0);
        } else {
            CHECK(w.value == orders[half]);
            CHECK(w.value != 0);
        }
    }
    auto w = colored_wick(m, q_prime({1, 1}), centered_block_product(m, q_prime({1, 1}), 2));
    REQUIRE(w.terms.size() == 1);
    CHECK(w.terms[0].t.at({0, 0, 1}) == 1);
    CHECK(w.terms[0].coefficient == 1);
    CHECK_THROWS_AS(colored_wick(m, q_prime({1, 1}), random_block_symmetric(m, q_prime({1, 1}), 1)), DomainError);
}

TEST_CASE("normalizer moments") {
    auto m = ref2_model();
    CHECK(centered_potential(m, 0) == Vec{Rational(-1, 3), Rational(1, 3)});
    CHECK(dot(m.eta0, centered_potential(m, 0)) == 0);
    for (int n = 0; n <= 2; ++n) {
        auto e1 = e_moments(m, n, 1);
        for (auto& v : e1) CHECK(v == 0);
    }
    auto b = ref2b_model();
    for (int n = 0; n <= 1; ++n)
        for (int q = 2; q <= 3; ++q) {
            auto e = e_moments(b, n, q);
            for (int k = 0; 2 * k < q; ++k) CHECK(e[k] == 0);
            for (int N = q; N <= q + 2; ++N) CHECK(evaluate_orders(e, N) == dp_normalizer_moment(b, N, n, q));
        }
    std::mt19937_64 g(5);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<Vec> emp;
        for (int k = 0; k <= 3; ++k) emp.push_back(normalized(random_positive(2, g)));
        auto [lhs, rhs] = normalizer_telescoping(b, emp);
        CHECK(lhs == rhs);
    }
}

TEST_CASE("terminal operator") {
    auto m = ref2b_model();
    auto F = random_symmetric(2, 2, 6);
    auto S0 = s_operator(m, {0}, 2, F);
    auto expect = symmetrize(tensor_kernel_apply(m, 1, 2, centered_terminal(m, 1, F)));
    CHECK(S0.values == expect.values);
    auto S = s_operator(m, {1, 1}, 2, F);
    CHECK(S.dims == std::vector<int>{2, 2, 2, 2});
    CHECK(is_symmetric(S, {1, 3}));
    auto eta = flow_eta(m, 1);
    CHECK(integrate(product_measure({eta[1], eta[1]}), centered_terminal(m, 1, F)) == 0);
}

TEST_CASE("propagation of chaos derivatives") {
    auto m = ref2b_model();
    for (int n1 = 1; n1 <= 2; ++n1)
        for (int q = 1; q <= 3; ++q) {
            if (q == 3 && n1 == 2) continue;
            auto F = random_symmetric(2, q, 70 + q + n1);
            auto eta = flow_eta(m, n1);
            CHECK(p_derivative(m, 0, n1, q, F) == integrate(product_measure(std::vector<Vec>(q, eta[n1])), F));
            CHECK(p_derivative(m, 1, n1, q, F) == p1_explicit(m, n1, q, F));
        }
    // eta^N itself is biased, even for q = 1
    CHECK(p_derivative(m, 1, 1, 1, random_symmetric(2, 1, 2)) != 0);
}

TEST_CASE("tensor mode is the symmetric mode after the L expansion") {
    auto m = ref2b_model();
    for (int q = 1; q <= 2; ++q) {
        auto F = random_symmetric(2, q, 90 + q);
        for (int k = 0; k <= 2; ++k) {
            Rational rhs = 0;
            for (int j = 0; j <= k && j < q; ++j)
                rhs += p_derivative(m, k - j, 1, q, combo_apply(dl_operator(j, q), F));
            CHECK(p_derivative(m, k, 1, q, F, PMode::Tensor) == rhs);
        }
    }
}

TEST_CASE("Wick consequence for the terminal law") {
    auto m = ref2b_model();
    for (int n1 = 1; n1 <= 2; ++n1) {
        auto eta = flow_eta(m, n1);
        auto f = centered(Vec{Rational(2), Rational(-1, 2)}, eta[n1]);
        auto F = product_function({f, f});
        REQUIRE(in_B0(m, n1, F));
        auto g = flow_gamma(m, n1);
        Rational scale = Rational(1) / pow(g.normalizers[n1], 2);
        CHECK(p_derivative(m, 0, n1, 2, F) == 0);
        Rational sym = scale * laurent_table(m, n1 - 1, 2, tensor_kernel_apply(m, n1, 2, F))[1];
        CHECK(p_derivative(m, 1, n1, 2, F) == sym);
        CHECK(sym == scale * wick_derivative(m, n1 - 1, 2, tensor_kernel_apply(m, n1, 2, F)).value);
        Rational ten = scale * laurent_table(m, n1, 2, F)[1];
        CHECK(p_derivative(m, 1, n1, 2, F, PMode::Tensor) == ten);
    }
}

TEST_CASE("residual of the first order chaos expansion") {
    auto m = ref2b_model();
    auto F = random_symmetric(2, 2, 123);
    Rational d0 = p_derivative(m, 0, 2, 2, F), d1 = p_derivative(m, 1, 2, 2, F), d2 = p_derivative(m, 2, 2, 2, F);
    double first = 0, worst = 0, first2 = 0, worst2 = 0;
    for (int N = 8; N <= 32; N += 4) {
        Rational P = dp_block_law(m, N, 2, 2, F);
        Rational r1 = (P - d0 - d1 / N) * N * N;
        Rational r2 = (P - d0 - d1 / N - d2 / (N * N)) * N * N * N;
        double a = std::abs(to_double(r1)), b = std::abs(to_double(r2));
        if (N < 20) first = std::max(first, a), first2 = std::max(first2, b);
        worst = std::max(worst, a);
        worst2 = std::max(worst2, b);
        // the second order term is the limit of the first residual
        if (N == 32) CHECK(std::abs(to_double(r1) - to_double(d2)) < std::abs(to_double(d2)) * 0.2 + 0.05);
    }
    CHECK(worst <= 10 * first);
    CHECK(worst2 <= 10 * first2);
}

TEST_CASE("geometric split") {
    for (int q = 0; q <= 4; ++q)
        for (int mm = 1; mm <= 6; ++mm)
            for (auto u : {Rational(1, 2), Rational(-1, 3), Rational(2, 5)}) {
                auto [l, r] = geometric_split(q, mm, u);
                CHECK(l == r);
            }
}
