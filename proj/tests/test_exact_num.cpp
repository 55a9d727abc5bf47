#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fklab/exact_num.hpp"

using namespace fklab;

TEST_CASE("stirling first kind values") {
    CHECK(stirling_first(2, 1) == -1);
    CHECK(stirling_first(3, 2) == -3);
    CHECK(stirling_first(4, 2) == 11);
    CHECK_THROWS_AS(stirling_first(2, 3), DomainError);
}

TEST_CASE("stirling second kind values") {
    CHECK(stirling_second(3, 2) == 3);
    CHECK(stirling_second(4, 4) == 1);
    CHECK(stirling_second(4, 1) == 1);
    CHECK_THROWS_AS(stirling_second(2, 3), DomainError);
}

TEST_CASE("falling factorial") {
    CHECK(falling_factorial(5, 2) == 20);
    CHECK(falling_factorial(3, 3) == 6);
    CHECK(falling_factorial(4, 0) == 1);
    CHECK(falling_factorial(2, 3) == 0);
}

TEST_CASE("falling factorial expands in powers") {
    for (int N = 0; N <= 12; ++N)
        for (int q = 0; q <= N; ++q) {
            BigInt s = 0;
            for (int k = 0; k <= q; ++k) s += stirling_first(q, k) * power(BigInt(N), k);
            CHECK(s == falling_factorial(N, q));
        }
}

TEST_CASE("powers expand in falling factorials") {
    for (int q = 0; q <= 10; ++q)
        for (int N = 0; N <= 12; ++N) {
            BigInt s = 0;
            for (int k = 0; k <= q; ++k) s += stirling_second(q, k) * falling_factorial(N, k);
            CHECK(s == power(BigInt(N), q));
        }
}

TEST_CASE("diagonal stirling values") {
    for (int q = 1; q <= 10; ++q) {
        CHECK(stirling_first(q, q) == 1);
        CHECK(stirling_first(q, q - 1) == -q * (q - 1) / 2);
    }
}

TEST_CASE("multi index algebra") {
    auto v = multi_index_algebra({1, 2}, {2, 3});
    CHECK(v.falling == 12);
    CHECK(v.factorial == 2);
    CHECK(v.total == 3);
    CHECK(v.leq);
    CHECK(multi_index_algebra({2, 2}, {3, 3}).stirling == 9);
    CHECK_THROWS_AS(multi_index_algebra({1}, {1, 2}), DomainError);
}

TEST_CASE("rational text") {
    CHECK(to_string(Rational(3)) == "3/1");
    CHECK(to_string(parse_rational("-4/6")) == "-2/3");
    CHECK(parse_rational("7") == 7);
    CHECK_THROWS_AS(parse_rational("1/0"), DomainError);
    CHECK_THROWS_AS(parse_rational("x"), DomainError);
}
