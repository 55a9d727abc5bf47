#include "fklab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fklab {

std::vector<Occupancy> occupancies(int N, int d) {
    if (d <= 0) throw DomainError("occupancies: empty state space");
    if (binomial(N + d - 1, d - 1) > BigInt((unsigned long)kMaxConfigsPerLevel))
        throw ResourceError("occupancy chain exceeds 1e4 configurations per level");
    std::vector<Occupancy> out;
    Occupancy c(d, 0);
    std::function<void(int, int)> rec = [&](int i, int left) {
        if (i == d - 1) {
            c[i] = left;
            out.push_back(c);
            return;
        }
        for (int v = 0; v <= left; ++v) {
            c[i] = v;
            rec(i + 1, left - v);
        }
    };
    rec(0, N);
    return out;
}

Rational multinomial_probability(const Occupancy& c, const Vec& law) {
    int N = std::accumulate(c.begin(), c.end(), 0);
    Rational r = Rational(factorial(N));
    for (size_t i = 0; i < c.size(); ++i) {
        r /= Rational(factorial(c[i]));
        if (c[i]) r *= pow(law[i], c[i]);
    }
    return r;
}

// Phi_{k+1}(m(c))
static Vec next_law(const FiniteFKModel& m, int k, const Occupancy& c) {
    const Vec& G = m.G(k);
    const Matrix& M = m.M(k + 1);
    Vec law(M[0].size(), 0);
    Rational norm = 0;
    for (size_t x = 0; x < c.size(); ++x) {
        if (!c[x]) continue;
        Rational w = c[x] * G[x];
        norm += w;
        for (size_t y = 0; y < law.size(); ++y) law[y] += w * M[x][y];
    }
    for (auto& v : law) v /= norm;
    return law;
}

ConfigDistribution dp_distribution(const FiniteFKModel& m, int N, int n) {
    ConfigDistribution d;
    d.N = N;
    if (N < 1) throw DomainError("dp_distribution: N must be positive");
    if (n > m.horizon()) throw DomainError("dp_distribution: time beyond horizon");
    std::map<Occupancy, Rational> cur;
    for (const auto& c : occupancies(N, m.levels[0])) {
        Rational p = multinomial_probability(c, m.eta0);
        if (p != 0) cur[c] = p;
    }
    d.levels.push_back(cur);
    for (int k = 0; k < n; ++k) {
        auto targets = occupancies(N, m.levels[k + 1]);
        std::map<Occupancy, Rational> next;
        for (const auto& [c, w] : cur) {
            Vec law = next_law(m, k, c);
            for (const auto& t : targets) {
                Rational p = multinomial_probability(t, law);
                if (p != 0) next[t] += w * p;
            }
        }
        cur = std::move(next);
        d.levels.push_back(cur);
    }
    return d;
}

Rational dp_expected(const FiniteFKModel& m, int N, int n, const OccupancyFactor& f) {
    if (N < 1) throw DomainError("dp_expected: N must be positive");
    if (n > m.horizon()) throw DomainError("dp_expected: time beyond horizon");
    std::map<Occupancy, Rational> cur;
    for (const auto& c : occupancies(N, m.levels[0])) {
        Rational p = multinomial_probability(c, m.eta0);
        if (p == 0) continue;
        Rational w = p * f(0, c);
        if (w != 0) cur[c] = w;
    }
    for (int k = 0; k < n; ++k) {
        auto targets = occupancies(N, m.levels[k + 1]);
        std::map<Occupancy, Rational> next;
        for (const auto& [c, w] : cur) {
            Vec law = next_law(m, k, c);
            for (const auto& t : targets) {
                Rational p = multinomial_probability(t, law);
                if (p != 0) next[t] += w * p;
            }
        }
        cur.clear();
        for (auto& [t, w] : next) {
            Rational v = w * f(k + 1, t);
            if (v != 0) cur[t] = v;
        }
    }
    Rational s = 0;
    for (const auto& kv : cur) s += kv.second;
    return s;
}

Rational occupancy_mean(const Occupancy& c, const Vec& f) {
    Rational s = 0;
    int N = 0;
    for (size_t x = 0; x < c.size(); ++x) {
        s += c[x] * f[x];
        N += c[x];
    }
    return s / N;
}

Rational occupancy_tensor_value(const Occupancy& c, const TensorFunction& F, OccupationMode mode) {
    int q = (int)F.dims.size();
    int N = std::accumulate(c.begin(), c.end(), 0);
    if (mode == OccupationMode::Injective && q > N) throw DomainError("occupancy_tensor_value: q > N");
    Rational s = 0;
    std::vector<int> used(c.size());
    for (size_t i = 0; i < F.values.size(); ++i) {
        if (F.values[i] == 0) continue;
        auto x = unflatten(i, F.dims);
        std::fill(used.begin(), used.end(), 0);
        BigInt w = 1;
        for (int v : x) {
            if (mode == OccupationMode::Injective) w *= c[v] - used[v]++;
            else
                w *= c[v];
        }
        if (w != 0) s += F.values[i] * Rational(w);
    }
    BigInt den = mode == OccupationMode::Injective ? falling_factorial(N, q) : power(BigInt(N), q);
    return s / Rational(den);
}

Rational dp_q_measure(const FiniteFKModel& m, int N, int n, int q, const TensorFunction& F) {
    return dp_expected(m, N, n, [&](int k, const Occupancy& c) {
        if (k < n) return pow(occupancy_mean(c, m.G(k)), q);
        return occupancy_tensor_value(c, F, OccupationMode::Tensor);
    });
}

Rational dp_path_measure(const FiniteFKModel& m, int N, const std::vector<int>& q,
                         const std::vector<TensorFunction>& factors) {
    int n = (int)q.size() - 1;
    if ((int)factors.size() != n + 1) throw DomainError("dp_path_measure: one factor per time required");
    // gamma^N_k(1) = prod_{p<k} eta^N_p(G_p), so time p carries the exponent q'_p = sum_{k>p} q_k
    std::vector<int> qp(n + 1, 0);
    for (int p = 0; p <= n; ++p)
        for (int k = p + 1; k <= n; ++k) qp[p] += q[k];
    return dp_expected(m, N, n, [&](int k, const Occupancy& c) {
        Rational v = pow(occupancy_mean(c, m.G(k)), qp[k]);
        if (q[k] > 0) v *= occupancy_tensor_value(c, factors[k], OccupationMode::Tensor);
        return v;
    });
}

Rational dp_block_law(const FiniteFKModel& m, int N, int n, int q, const TensorFunction& F, OccupationMode mode) {
    return dp_expected(m, N, n, [&](int k, const Occupancy& c) {
        if (k < n) return Rational(1);
        return occupancy_tensor_value(c, F, mode);
    });
}

Rational dp_normalizer_moment(const FiniteFKModel& m, int N, int n, int q) {
    auto eta = flow_eta(m, n);
    // expand (1 - prod_p X_p)^q = sum_j C(q,j) (-1)^j prod_p X_p^j with X_p = eta^N_p(G_p)/eta_p(G_p)
    Rational s = 0;
    for (int j = 0; j <= q; ++j) {
        Rational e = dp_expected(m, N, n, [&](int k, const Occupancy& c) {
            return pow(occupancy_mean(c, m.G(k)) / dot(eta[k], m.G(k)), j);
        });
        Rational term = Rational(binomial(q, j)) * e;
        s += (j % 2 ? -term : term);
    }
    return s;
}

// Applies (D_a g)(x) = g(x_{a(1)},...,x_{a(q)}) on a dense d^q table.
static std::vector<Rational> apply_selection(const std::vector<int>& a, const std::vector<Rational>& g, int d) {
    int q = (int)a.size();
    std::vector<Rational> out(g.size());
    std::vector<int> x(q), y(q);
    for (size_t i = 0; i < g.size(); ++i) {
        size_t r = i;
        for (int s = q - 1; s >= 0; --s) {
            x[s] = (int)(r % d);
            r /= d;
        }
        size_t j = 0;
        for (int s = 0; s < q; ++s) j = j * d + x[a[s]];
        out[i] = g[j];
    }
    return out;
}

// (K^{(x)q} g)(x) = sum_y prod_s K(x_s,y_s) g(y), one axis at a time.
static std::vector<Rational> apply_kernel(const Matrix& K, const std::vector<Rational>& g, int q, int din) {
    int dout = (int)K.size();
    std::vector<Rational> cur = g;
    std::vector<int> dims(q, din);
    for (int axis = 0; axis < q; ++axis) {
        std::vector<int> nd = dims;
        nd[axis] = dout;
        size_t inner = 1;
        for (int s = axis + 1; s < q; ++s) inner *= dims[s];
        size_t outer = 1;
        for (int s = 0; s < axis; ++s) outer *= dims[s];
        std::vector<Rational> next(outer * dout * inner, 0);
        for (size_t o = 0; o < outer; ++o)
            for (int x = 0; x < dout; ++x)
                for (size_t in = 0; in < inner; ++in) {
                    Rational s = 0;
                    for (int y = 0; y < dims[axis]; ++y) s += K[x][y] * cur[(o * dims[axis] + y) * inner + in];
                    next[(o * dout + x) * inner + in] = s;
                }
        cur = std::move(next);
        dims = nd;
    }
    return cur;
}

Rational brute_delta(const FiniteFKModel& m, const std::vector<std::vector<int>>& a, const TensorFunction& F) {
    int n = (int)a.size() - 1;
    int q = (int)F.dims.size();
    std::vector<Rational> g = apply_selection(a[n], F.values, m.levels[n]);
    for (int k = n; k >= 1; --k) {
        g = apply_kernel(m.Q(k), g, q, m.levels[k]);
        g = apply_selection(a[k - 1], g, m.levels[k - 1]);
    }
    int d = m.levels[0];
    Rational s = 0;
    for (size_t i = 0; i < g.size(); ++i) {
        size_t r = i;
        Rational w = 1;
        for (int t = 0; t < q; ++t) {
            w *= m.eta0[r % d];
            r /= d;
        }
        s += w * g[i];
    }
    return s;
}

std::map<std::vector<int>, Rational> brute_a_grouped(const FiniteFKModel& m, int n, int q, const TensorFunction& F) {
    if ((int)F.dims.size() != q) throw DomainError("brute_a_grouped: rank mismatch");
    double count = std::pow((double)q, (double)q * (n + 1));
    if (count > 1e6) throw ResourceError("map sequence sum exceeds 1e6 terms");
    std::map<std::vector<int>, Rational> out;
    std::vector<std::vector<int>> a(n + 1, std::vector<int>(q, 0));
    while (true) {
        std::vector<int> sizes;
        for (const auto& ak : a) {
            std::vector<int> s = ak;
            std::sort(s.begin(), s.end());
            sizes.push_back((int)(std::unique(s.begin(), s.end()) - s.begin()));
        }
        out[sizes] += brute_delta(m, a, F);
        int k = n, i = q - 1;
        while (k >= 0) {
            if (++a[k][i] < q) break;
            a[k][i] = 0;
            if (--i < 0) {
                i = q - 1;
                --k;
            }
        }
        if (k < 0) break;
    }
    return out;
}

Rational brute_a_sum(const FiniteFKModel& m, int N, int n, int q, const TensorFunction& F) {
    if (q > N) throw DomainError("brute_a_sum: q > N");
    Rational s = 0;
    for (const auto& [sizes, v] : brute_a_grouped(m, n, q, F)) {
        Rational w = 1;
        for (int l : sizes) w *= Rational(falling_factorial(N, l)) / Rational(falling_factorial(q, l));
        s += w * v;
    }
    return s / Rational(power(BigInt(N), (unsigned long)(q * (n + 1))));
}

BigInt brute_stabilizer(const Jungle& j, size_t limit) {
    j.validate();
    const auto& p = j.profile;
    if (profile_factorial(p) > BigInt((unsigned long)limit)) throw ResourceError("stabilizer search exceeds the cap");
    int H = p.height();
    // per level, all color preserving permutations as vectors over the level (whites first)
    std::vector<std::vector<std::vector<int>>> perms(H + 1);
    for (int L = 0; L <= H; ++L) {
        std::vector<int> w(p.white[L]), b(p.black[L]);
        std::iota(w.begin(), w.end(), 0);
        std::vector<std::vector<int>> wp;
        do wp.push_back(w);
        while (std::next_permutation(w.begin(), w.end()));
        std::iota(b.begin(), b.end(), 0);
        do
            for (const auto& x : wp) {
                std::vector<int> s = x;
                for (int v : b) s.push_back(p.white[L] + v);
                perms[L].push_back(s);
            }
        while (std::next_permutation(b.begin(), b.end()));
    }
    // fixed iff sigma_L(a_L(i)) == a_L(sigma_{L+1}(i)) for all i, acting on blacks of level L
    BigInt count = 0;
    std::vector<const std::vector<int>*> chosen(H + 1);
    std::function<void(int)> rec = [&](int L) {
        if (L > H) {
            ++count;
            return;
        }
        for (const auto& s : perms[L]) {
            if (L > 0) {
                const auto& a = j.maps[L - 1];
                const auto& up = *chosen[L - 1];
                int wl = p.white[L - 1];
                bool ok = true;
                for (size_t i = 0; i < a.size() && ok; ++i)
                    ok = up[wl + a[i]] - wl == a[s[i]];
                if (!ok) continue;
            }
            chosen[L] = &s;
            rec(L + 1);
        }
    };
    rec(0);
    return count;
}

Rational gaussian_covariance(const FiniteFKModel& m, int n, const Vec& phi, const Vec& psi) {
    return gaussian_covariance(m, n, phi, n, psi);
}

Rational gaussian_covariance(const FiniteFKModel& m, int a, const Vec& phi, int b, const Vec& psi) {
    auto g = flow_gamma(m, std::max(a, b));
    Rational s = 0;
    for (int k = 0; k <= std::min(a, b); ++k) {
        Vec u = mat_vec(semigroup(m, k, a), phi);
        Vec v = mat_vec(semigroup(m, k, b), psi);
        s += g.normalizers[k] * dot(g.gamma[k], hadamard(u, v));
    }
    return s;
}

Rational gaussian_moment(const Matrix& C) {
    int q = (int)C.size();
    if (q % 2) return 0;
    std::vector<bool> used(q, false);
    std::function<Rational()> rec = [&]() -> Rational {
        int i = 0;
        while (i < q && used[i]) ++i;
        if (i == q) return 1;
        used[i] = true;
        Rational s = 0;
        for (int j = i + 1; j < q; ++j) {
            if (used[j]) continue;
            used[j] = true;
            s += C[i][j] * rec();
            used[j] = false;
        }
        used[i] = false;
        return s;
    };
    return rec();
}

} // namespace fklab
