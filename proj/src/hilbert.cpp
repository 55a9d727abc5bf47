#include "fklab/hilbert.hpp"

#include <algorithm>
#include <functional>
#include <mutex>
#include <numeric>

namespace fklab {

BigInt TruncatedSeries::coefficient(const std::vector<int>& exponent) const {
    auto it = coeffs.find(exponent);
    return it == coeffs.end() ? BigInt(0) : it->second;
}

bool TruncatedSeries::fits(const std::vector<int>& e) const {
    int total = 0;
    for (int i = 0; i < nx; ++i) {
        if (e[i] > max_degree) return false;
        total += e[i];
    }
    return max_total < 0 || total <= max_total;
}

TruncatedSeries multiply(const TruncatedSeries& a, const TruncatedSeries& b) {
    TruncatedSeries r = a;
    r.coeffs.clear();
    std::vector<int> e(a.nx + a.ny);
    for (const auto& [ea, ca] : a.coeffs)
        for (const auto& [eb, cb] : b.coeffs) {
            for (size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
            if (r.fits(e)) r.coeffs[e] += ca * cb;
        }
    return r;
}

TruncatedSeries times_geometric_power(const TruncatedSeries& s, const std::vector<int>& e, const BigInt& m) {
    if (m == 0) return s;
    TruncatedSeries g = s;
    g.coeffs.clear();
    // (1-u)^{-m} = sum_k C(m-1+k, k) u^k
    std::vector<int> ek(e.size(), 0);
    BigInt c = 1;
    for (long k = 0; s.fits(ek); ++k) {
        g.coeffs[ek] = c;
        c = c * (m + k) / (k + 1);
        bool zero = true;
        for (size_t i = 0; i < e.size(); ++i) {
            ek[i] += e[i];
            zero = zero && e[i] == 0;
        }
        if (zero) throw DomainError("geometric factor with a constant monomial");
    }
    return multiply(s, g);
}

static bool connected_height(const std::vector<int>& x, int nx, int h) {
    // exactly height h: x_0..x_h positive, later zero
    for (int i = 0; i < nx; ++i) {
        if (i <= h && x[i] <= 0) return false;
        if (i > h && x[i] != 0) return false;
    }
    return true;
}

TruncatedSeries forest_hilbert(int n, int D, int max_total) {
    if (n < 0 || D < 1) throw DomainError("forest_hilbert: need n >= 0 and D >= 1");
    TruncatedSeries s{n + 1, 0, D, max_total, {}};
    s.coeffs[std::vector<int>(n + 1, 0)] = 1;
    std::vector<int> x0(n + 1, 0);
    x0[0] = 1;
    s = times_geometric_power(s, x0, 1);
    for (int m = 1; m <= n; ++m) {
        // new factors: one per profile of height m-1, exponent B^{-1}(p) = (1, p)
        std::vector<std::pair<std::vector<int>, BigInt>> factors;
        for (const auto& [e, c] : s.coeffs) {
            if (!connected_height(e, n + 1, m - 1)) continue;
            std::vector<int> up(n + 1, 0);
            up[0] = 1;
            for (int i = 0; i < m; ++i) up[i + 1] = e[i];
            if (s.fits(up)) factors.push_back({up, c});
        }
        for (const auto& [up, c] : factors) s = times_geometric_power(s, up, c);
    }
    return s;
}

TruncatedSeries coalescent_hilbert(int n, int D, int max_total) {
    if (n < 0 || D < 1) throw DomainError("coalescent_hilbert: need n >= 0 and D >= 1");
    int nx = n + 1, ny = n;
    TruncatedSeries s{nx, ny, D, max_total, {}};
    s.coeffs[std::vector<int>(nx + ny, 0)] = 1;
    std::vector<int> x0(nx + ny, 0);
    x0[0] = 1;
    s = times_geometric_power(s, x0, 1);
    for (int m = 1; m <= n; ++m) {
        std::vector<std::pair<std::vector<int>, BigInt>> factors;
        for (const auto& [e, c] : s.coeffs) {
            if (!connected_height(e, nx, m - 1)) continue;
            // tree (1, p) with coalescences (p_0 - 1, c(p))
            std::vector<int> up(nx + ny, 0);
            up[0] = 1;
            for (int i = 0; i < m; ++i) up[i + 1] = e[i];
            up[nx] = e[0] - 1;
            for (int i = 0; i + 1 < ny; ++i) up[nx + 1 + i] = e[nx + i];
            if (s.fits(up)) factors.push_back({up, c});
        }
        for (const auto& [up, c] : factors) s = times_geometric_power(s, up, c);
    }
    return s;
}

TruncatedSeries specialize_y_to_one(const TruncatedSeries& c) {
    TruncatedSeries r{c.nx, 0, c.max_degree, c.max_total, {}};
    for (const auto& [e, v] : c.coeffs) r.coeffs[std::vector<int>(e.begin(), e.begin() + c.nx)] += v;
    return r;
}

namespace {
std::mutex g_count_mu;
std::map<std::vector<int>, BigInt> g_count_memo;
} // namespace

static BigInt forest_count_impl(const std::vector<int>& p);

// Trees have profiles (1, t) with t in V; count multisets of trees with total p.
static BigInt count_compositions(const std::vector<std::vector<int>>& cands, size_t i, std::vector<int>& rest) {
    bool done = std::all_of(rest.begin(), rest.end(), [](int v) { return v == 0; });
    if (done) return 1;
    if (i == cands.size()) return 0;
    const auto& t = cands[i];
    BigInt trees = forest_count_impl(std::vector<int>(t.begin() + 1, t.end()));
    BigInt total = 0;
    for (long k = 0;; ++k) {
        bool ok = true;
        for (size_t j = 0; j < rest.size(); ++j) ok = ok && rest[j] >= k * t[j];
        if (!ok) break;
        for (size_t j = 0; j < rest.size(); ++j) rest[j] -= k * t[j];
        // multisets of size k from `trees` distinct trees
        BigInt multisets = 1;
        for (long j = 0; j < k; ++j) multisets = multisets * (trees + j) / (j + 1);
        total += multisets * count_compositions(cands, i + 1, rest);
        for (size_t j = 0; j < rest.size(); ++j) rest[j] += k * t[j];
    }
    return total;
}

static BigInt forest_count_impl(const std::vector<int>& p_in) {
    std::vector<int> p = p_in;
    while (!p.empty() && p.back() == 0) p.pop_back();
    if (p.size() <= 1) return 1;
    {
        std::lock_guard<std::mutex> lock(g_count_mu);
        auto it = g_count_memo.find(p);
        if (it != g_count_memo.end()) return it->second;
    }
    // candidate tree profiles (1, t) with t <= B(p) connected
    std::vector<std::vector<int>> cands;
    std::vector<int> t(p.size() - 1, 0);
    std::function<void(size_t, bool)> rec = [&](size_t i, bool ended) {
        if (i == t.size()) {
            std::vector<int> c{1};
            c.insert(c.end(), t.begin(), t.end());
            cands.push_back(c);
            return;
        }
        for (int v = 0; v <= (ended ? 0 : p[i + 1]); ++v) {
            t[i] = v;
            rec(i + 1, ended || v == 0);
        }
        t[i] = 0;
    };
    rec(0, false);
    std::vector<int> rest = p;
    BigInt r = count_compositions(cands, 0, rest);
    std::lock_guard<std::mutex> lock(g_count_mu);
    g_count_memo[p] = r;
    return r;
}

BigInt forest_count(const std::vector<int>& p) {
    for (int v : p)
        if (v < 0) throw DomainError("forest_count: negative entry");
    for (size_t i = 1; i < p.size(); ++i)
        if (p[i - 1] == 0 && p[i] != 0) throw DomainError("forest_count: profile is not connected");
    return forest_count_impl(p);
}

} // namespace fklab
