#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <vector>

namespace fklab {

using BigInt = mpz_class;
using Rational = mpq_class;
using MultiIndex = std::vector<int>;

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// s(n,k): signed Stirling numbers of the first kind, (N)_n = sum_k s(n,k) N^k.
BigInt stirling_first(int n, int k);
// S(q,p): number of partitions of [q] into p nonempty blocks.
BigInt stirling_second(int q, int p);
// N(N-1)...(N-q+1); zero when q > N, one when q == 0.
BigInt falling_factorial(long N, long q);
BigInt factorial(long n);
BigInt binomial(long n, long k);
BigInt power(const BigInt& base, unsigned long e);

struct MultiIndexValues {
    BigInt falling;   // (l)_p
    BigInt factorial; // p!
    BigInt stirling;  // s(l,p)
    int total = 0;    // |p|
    bool leq = false; // p <= l
};

int mi_total(const MultiIndex& p);
BigInt mi_factorial(const MultiIndex& p);
bool mi_leq(const MultiIndex& p, const MultiIndex& l);
BigInt mi_falling(const MultiIndex& l, const MultiIndex& p);
BigInt mi_stirling(const MultiIndex& l, const MultiIndex& p);
MultiIndexValues multi_index_algebra(const MultiIndex& p, const MultiIndex& l);

// "p/q" form, always with an explicit denominator.
std::string to_string(const Rational& r);
// Accepts "p/q", "p", or an integer; throws DomainError on a zero denominator
// or malformed text.
Rational parse_rational(const std::string& s);
double to_double(const Rational& r);
Rational abs(const Rational& r);
// a/b in lowest terms (mpq_class(a, b) does not canonicalize)
Rational ratio(long a, long b);
Rational pow(const Rational& r, long e);

} // namespace fklab
