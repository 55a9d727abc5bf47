#include "fklab/exact_num.hpp"

#include <cctype>
#include <mutex>

namespace fklab {

namespace {

std::mutex g_first_mu;
std::vector<std::vector<BigInt>> g_first = {{1}};

std::mutex g_second_mu;
std::vector<std::vector<BigInt>> g_second = {{1}};

} // namespace

BigInt stirling_first(int n, int k) {
    if (n < 0 || k < 0) throw DomainError("stirling_first: negative argument");
    if (k > n) throw DomainError("stirling_first: k > n");
    std::lock_guard<std::mutex> lock(g_first_mu);
    // s(m+1,j) = s(m,j-1) - m s(m,j)
    while ((int)g_first.size() <= n) {
        int m = (int)g_first.size() - 1;
        const auto& prev = g_first.back();
        std::vector<BigInt> row(m + 2, 0);
        for (int j = 0; j <= m + 1; ++j) {
            BigInt v = 0;
            if (j >= 1) v += prev[j - 1];
            if (j <= m) v -= BigInt(m) * prev[j];
            row[j] = v;
        }
        g_first.push_back(std::move(row));
    }
    return g_first[n][k];
}

BigInt stirling_second(int q, int p) {
    if (q < 0 || p < 0) throw DomainError("stirling_second: negative argument");
    if (p > q) throw DomainError("stirling_second: p > q");
    std::lock_guard<std::mutex> lock(g_second_mu);
    // S(m+1,j) = j S(m,j) + S(m,j-1)
    while ((int)g_second.size() <= q) {
        int m = (int)g_second.size() - 1;
        const auto& prev = g_second.back();
        std::vector<BigInt> row(m + 2, 0);
        for (int j = 0; j <= m + 1; ++j) {
            BigInt v = 0;
            if (j <= m) v += BigInt(j) * prev[j];
            if (j >= 1) v += prev[j - 1];
            row[j] = v;
        }
        g_second.push_back(std::move(row));
    }
    return g_second[q][p];
}

BigInt falling_factorial(long N, long q) {
    if (q < 0) throw DomainError("falling_factorial: negative order");
    if (q > N) return 0;
    BigInt r = 1;
    for (long i = 0; i < q; ++i) r *= BigInt(N - i);
    return r;
}

BigInt factorial(long n) {
    if (n < 0) throw DomainError("factorial: negative argument");
    BigInt r;
    mpz_fac_ui(r.get_mpz_t(), (unsigned long)n);
    return r;
}

BigInt binomial(long n, long k) {
    if (k < 0 || n < 0 || k > n) return 0;
    BigInt r;
    mpz_bin_uiui(r.get_mpz_t(), (unsigned long)n, (unsigned long)k);
    return r;
}

BigInt power(const BigInt& base, unsigned long e) {
    BigInt r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

int mi_total(const MultiIndex& p) {
    int s = 0;
    for (int v : p) s += v;
    return s;
}

BigInt mi_factorial(const MultiIndex& p) {
    BigInt r = 1;
    for (int v : p) r *= factorial(v);
    return r;
}

static void check_len(const MultiIndex& a, const MultiIndex& b) {
    if (a.size() != b.size()) throw DomainError("multi-index length mismatch");
}

bool mi_leq(const MultiIndex& p, const MultiIndex& l) {
    check_len(p, l);
    for (size_t i = 0; i < p.size(); ++i)
        if (p[i] > l[i]) return false;
    return true;
}

BigInt mi_falling(const MultiIndex& l, const MultiIndex& p) {
    check_len(p, l);
    BigInt r = 1;
    for (size_t i = 0; i < p.size(); ++i) r *= falling_factorial(l[i], p[i]);
    return r;
}

BigInt mi_stirling(const MultiIndex& l, const MultiIndex& p) {
    check_len(p, l);
    BigInt r = 1;
    for (size_t i = 0; i < p.size(); ++i) r *= stirling_first(l[i], p[i]);
    return r;
}

MultiIndexValues multi_index_algebra(const MultiIndex& p, const MultiIndex& l) {
    check_len(p, l);
    MultiIndexValues v;
    v.total = mi_total(p);
    v.factorial = mi_factorial(p);
    v.leq = mi_leq(p, l);
    if (v.leq) {
        v.falling = mi_falling(l, p);
        v.stirling = mi_stirling(l, p);
    }
    return v;
}

std::string to_string(const Rational& r) {
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

Rational parse_rational(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace((unsigned char)c)) s += c;
    auto valid_int = [](const std::string& t) {
        if (t.empty()) return false;
        size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
        if (i == t.size()) return false;
        for (; i < t.size(); ++i)
            if (!std::isdigit((unsigned char)t[i])) return false;
        return true;
    };
    auto strip_plus = [](std::string t) {
        if (!t.empty() && t[0] == '+') t.erase(0, 1);
        return t;
    };
    auto slash = s.find('/');
    std::string num = slash == std::string::npos ? s : s.substr(0, slash);
    std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
    if (!valid_int(num) || !valid_int(den)) throw DomainError("malformed rational '" + text + "'");
    BigInt n(strip_plus(num)), d(strip_plus(den));
    if (d == 0) throw DomainError("zero denominator in '" + text + "'");
    Rational r(n, d);
    r.canonicalize();
    return r;
}

double to_double(const Rational& r) { return r.get_d(); }

Rational abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

Rational pow(const Rational& r, long e) {
    if (e < 0) {
        if (r == 0) throw DomainError("pow: zero to a negative power");
        return pow(Rational(1) / r, -e);
    }
    Rational out;
    mpz_pow_ui(out.get_num_mpz_t(), r.get_num_mpz_t(), (unsigned long)e);
    mpz_pow_ui(out.get_den_mpz_t(), r.get_den_mpz_t(), (unsigned long)e);
    out.canonicalize();
    return out;
}

Rational ratio(long a, long b) {
    if (b == 0) throw DomainError("ratio: zero denominator");
    Rational r(a, b);
    r.canonicalize();
    return r;
}

} // namespace fklab
