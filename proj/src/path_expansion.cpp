#include "fklab/path_expansion.hpp"

#include <functional>

namespace fklab {

int QSeq::total() const { return (int)mi_total(q); }

QSeq q_prime(const MultiIndex& q) {
    if (q.empty()) throw DomainError("q_prime: empty sequence");
    QSeq s;
    s.q = q;
    s.qp.assign(q.size(), 0);
    for (int m = (int)q.size() - 1; m >= 0; --m) {
        if (q[m] < 0) throw DomainError("q_prime: negative entry");
        s.qp[m] = m + 1 < (int)q.size() ? s.qp[m + 1] + q[m + 1] : 0;
        s.abs_qp += (long)(m + 1) * q[m];
    }
    return s;
}

LevelProfile colored_profile(const QSeq& q) {
    int n = q.n();
    LevelProfile p;
    p.white.assign(n + 2, 0);
    p.black.assign(n + 2, 0);
    p.black[0] = q.total();
    for (int L = 1; L <= n + 1; ++L) {
        p.white[L] = (int)q.q[L - 1];
        p.black[L] = (int)q.qp[L - 1];
    }
    return p;
}

std::vector<int> path_dims(const FiniteFKModel& m, const QSeq& q) {
    if (q.n() > m.horizon()) throw DomainError("path space longer than the model horizon");
    std::vector<int> d;
    for (int k = 0; k <= q.n(); ++k)
        for (long i = 0; i < q.q[k]; ++i) d.push_back(m.levels[k]);
    return d;
}

std::vector<int> path_blocks(const QSeq& q) {
    std::vector<int> b;
    for (auto v : q.q)
        if (v > 0) b.push_back((int)v);
    return b;
}

// drop trailing empty blocks; they change neither the measure nor the space
static QSeq trimmed(const QSeq& q) {
    MultiIndex v = q.q;
    while (v.size() > 1 && v.back() == 0) v.pop_back();
    return q_prime(v);
}

static std::vector<int> level_ranges(const LevelProfile& p) {
    return std::vector<int>(p.black.begin(), p.black.end() - 1);
}

std::vector<Forest> enumerate_colored_forests(const QSeq& q, const std::optional<MultiIndex>& max_coal) {
    if (q.total() < 1) throw DomainError("enumerate_colored_forests: need |q| >= 1");
    auto p = colored_profile(q);
    auto all = enumerate_forests(p);
    if (!max_coal) return all;
    std::vector<Forest> out;
    for (auto& f : all) {
        auto c = coalescence_data(f, p.height()).sequence;
        if (c.size() != max_coal->size()) throw DomainError("enumerate_colored_forests: filter length mismatch");
        bool ok = true;
        for (size_t i = 0; i < c.size(); ++i) ok = ok && c[i] <= (*max_coal)[i];
        if (ok) out.push_back(std::move(f));
    }
    return out;
}

std::vector<Forest> enumerate_colored_forests_brute(const QSeq& q) {
    return enumerate_forests_brute(colored_profile(q));
}

BigInt count_colored_jungles(const Forest& f, const QSeq& q) { return count_jungles(f, colored_profile(q)); }

ProductMeasure delta_colored(const FiniteFKModel& m, const Forest& f, const QSeq& q) {
    return delta_measure(m, f, colored_profile(q), path_blocks(q));
}

PathTable path_table(const FiniteFKModel& m, const QSeq& q0) {
    PathTable t{q0, {}};
    if (q0.total() == 0) return t;
    QSeq q = trimmed(q0);
    if (q.n() > m.horizon()) throw DomainError("path_table: path longer than the model horizon");
    auto prof = colored_profile(q);
    auto blocks = path_blocks(q);
    for (auto& f : enumerate_forests(prof)) {
        ForestTerm term;
        term.image = nonleaf_counts(f, prof.height());
        term.count = count_jungles(f, prof);
        term.delta = delta_measure(m, f, prof, blocks);
        term.forest = std::move(f);
        t.terms.push_back(std::move(term));
    }
    return t;
}

ProductMeasure path_limit(const FiniteFKModel& m, const QSeq& q) {
    auto g = flow_gamma(m, q.n());
    std::vector<Vec> f;
    for (int k = 0; k <= q.n(); ++k)
        for (long i = 0; i < q.q[k]; ++i) f.push_back(g.gamma[k]);
    return product_measure(f);
}

static LevelProfile table_profile(const PathTable& t) { return colored_profile(trimmed(t.q)); }

Rational qbar_exact(const PathTable& t, int N, const TensorFunction& F) {
    if (t.q.total() > N) throw DomainError("qbar_exact: |q| > N");
    if (t.q.total() == 0) return F.values.at(0);
    auto ranges = level_ranges(table_profile(t));
    Rational s = 0;
    for (const auto& term : t.terms)
        s += falling_weight(N, term.image, ranges) * Rational(term.count) * integrate(term.delta, F);
    return s;
}

Rational qbar_exact(const FiniteFKModel& m, int N, const QSeq& q, const TensorFunction& F) {
    if (q.total() > N) throw DomainError("qbar_exact: |q| > N");
    return qbar_exact(path_table(m, q), N, F);
}

static int max_order(const std::vector<int>& ranges) {
    int k = 0;
    for (int r : ranges) k += std::max(r - 1, 0);
    return k;
}

std::vector<Rational> qbar_orders(const PathTable& t, const TensorFunction& F) {
    if (t.q.total() == 0) return {F.values.at(0)};
    auto ranges = level_ranges(table_profile(t));
    std::vector<Rational> out(max_order(ranges) + 1, 0);
    for (const auto& term : t.terms) {
        Rational d = integrate(term.delta, F);
        if (d == 0) continue;
        auto w = falling_weight_orders(term.image, ranges);
        for (size_t k = 0; k < w.size(); ++k) out.at(k) += w[k] * Rational(term.count) * d;
    }
    return out;
}

std::vector<ProductMeasure> qbar_measures(const PathTable& t) {
    if (t.q.total() == 0) throw DomainError("qbar_measures: empty path space");
    auto ranges = level_ranges(table_profile(t));
    std::vector<ProductMeasure> out(max_order(ranges) + 1, zero_measure(t.terms.at(0).delta.dims));
    for (const auto& term : t.terms) {
        auto w = falling_weight_orders(term.image, ranges);
        for (size_t k = 0; k < w.size(); ++k)
            if (w[k] != 0) out.at(k) = add(out[k], scale(term.delta, w[k] * Rational(term.count)));
    }
    return out;
}

Rational dqbar(const FiniteFKModel& m, int k, const QSeq& q, const TensorFunction& F) {
    if (k < 0) throw DomainError("dqbar: negative order");
    auto o = qbar_orders(path_table(m, q), F);
    return k < (int)o.size() ? o[k] : Rational(0);
}

bool in_B0_path(const FiniteFKModel& m, const QSeq& q, const TensorFunction& F) {
    auto dims = path_dims(m, q);
    if (F.dims != dims || dims.empty()) return false;
    if (!is_symmetric(F, path_blocks(q))) return false;
    auto g = flow_gamma(m, q.n());
    int start = 0;
    for (int k = 0; k <= q.n(); ++k) {
        if (q.q[k] == 0) continue;
        int d = dims[start];
        for (size_t idx = 0; idx < F.values.size(); ++idx) {
            auto c = unflatten(idx, dims);
            if (c[start] != 0) continue;
            Rational s = 0;
            for (int y = 0; y < d; ++y) {
                c[start] = y;
                s += F.values[flatten(c, dims)] * g.gamma[k][y];
            }
            if (s != 0) return false;
        }
        start += (int)q.q[k];
    }
    return true;
}

Tree colored_pair_tree(int k, int l, int m) {
    if (!(0 <= k && k <= l && l <= m)) throw DomainError("colored_pair_tree: need k <= l <= m");
    return wrap(node({wrap(white_leaf(), l - k), wrap(white_leaf(), m - k)}), k);
}

Forest colored_wick_forest(const TripleCounts& t) {
    std::vector<Tree> trees;
    for (const auto& [key, c] : t) {
        auto [k, l, m] = key;
        for (int i = 0; i < c; ++i) {
            trees.push_back(colored_pair_tree(k, l, m));
            trees.push_back(chain(k));
        }
    }
    return make_forest(trees);
}

ColoredWickResult colored_wick(const FiniteFKModel& m, const QSeq& q, const TensorFunction& F) {
    if (!in_B0_path(m, q, F)) throw DomainError("colored_wick: F is not a centered block symmetric function");
    ColoredWickResult res;
    int total = q.total();
    res.order = total / 2;
    res.value = 0;
    if (total % 2) return res;
    QSeq qt = trimmed(q);
    int n = qt.n();
    auto prof = colored_profile(qt);
    auto blocks = path_blocks(qt);
    std::vector<std::tuple<int, int, int>> triples;
    for (int k = 0; k <= n; ++k)
        for (int l = k; l <= n; ++l)
            for (int mm = l; mm <= n; ++mm) triples.emplace_back(k, l, mm);
    BigInt qfact = 1;
    for (auto v : qt.q) qfact *= factorial(v);
    std::vector<long> left(qt.q.begin(), qt.q.end());
    TripleCounts t;
    std::function<void(size_t)> rec = [&](size_t i) {
        if (i == triples.size()) {
            for (auto v : left)
                if (v) return;
            ColoredWickTerm term;
            term.t = t;
            BigInt den = 1;
            int diag = 0;
            for (const auto& [key, c] : t) {
                den *= factorial(c);
                if (std::get<1>(key) == std::get<2>(key)) diag += c;
            }
            den *= power(BigInt(2), diag);
            term.coefficient = Rational(qfact) / Rational(den);
            term.forest = colored_wick_forest(t);
            term.delta = integrate(delta_measure(m, term.forest, prof, blocks), F);
            res.value += term.coefficient * term.delta;
            res.terms.push_back(std::move(term));
            return;
        }
        auto key = triples[i];
        int l = std::get<1>(key), mm = std::get<2>(key);
        rec(i + 1);
        int c = 0;
        while (true) {
            --left[l];
            --left[mm];
            if (left[l] < 0 || left[mm] < 0) {
                ++left[l];
                ++left[mm];
                break;
            }
            t[key] = ++c;
            rec(i + 1);
        }
        left[l] += c;
        left[mm] += c;
        t.erase(key);
    };
    rec(0);
    return res;
}

Vec centered_potential(const FiniteFKModel& m, int k) {
    auto eta = flow_eta(m, k);
    auto g = flow_gamma(m, k);
    Rational mean = dot(eta[k], m.G(k));
    Rational norm = g.normalizers[k] * mean;
    Vec out = m.G(k);
    for (auto& x : out) x = (mean - x) / norm;
    return out;
}

std::pair<Rational, Rational> normalizer_telescoping(const FiniteFKModel& m, const std::vector<Vec>& emp) {
    int n = (int)emp.size() - 1;
    auto eta = flow_eta(m, n);
    Rational prod = 1, rhs = 0, gamma_emp = 1;
    for (int p = 0; p <= n; ++p) {
        prod *= dot(emp[p], m.G(p)) / dot(eta[p], m.G(p));
        rhs += gamma_emp * dot(emp[p], centered_potential(m, p));
        gamma_emp *= dot(emp[p], m.G(p));
    }
    return {1 - prod, rhs};
}

static void for_each_composition(int len, int total, const std::function<void(const MultiIndex&)>& fn) {
    MultiIndex p(len, 0);
    std::function<void(int, int)> rec = [&](int i, int left) {
        if (i == len - 1) {
            p[i] = left;
            fn(p);
            return;
        }
        for (int v = left; v >= 0; --v) {
            p[i] = v;
            rec(i + 1, left - v);
        }
    };
    if (len > 0) rec(0, total);
}

static TensorFunction gbar_product(const FiniteFKModel& m, const MultiIndex& p) {
    std::vector<Vec> f;
    for (int k = 0; k < (int)p.size(); ++k) {
        Vec g = centered_potential(m, k);
        for (long i = 0; i < p[k]; ++i) f.push_back(g);
    }
    return product_function(f);
}

std::vector<Rational> e_moments(const FiniteFKModel& m, int n, int q) {
    if (q < 0 || n < 0) throw DomainError("e_moments: negative argument");
    std::vector<Rational> out{q == 0 ? Rational(1) : Rational(0)};
    if (q == 0) return out;
    BigInt qf = factorial(q);
    for_each_composition(n + 1, q, [&](const MultiIndex& p) {
        auto o = qbar_orders(path_table(m, q_prime(p)), gbar_product(m, p));
        Rational c = Rational(qf) / Rational(mi_factorial(p));
        if (o.size() > out.size()) out.resize(o.size(), 0);
        for (size_t k = 0; k < o.size(); ++k) out[k] += c * o[k];
    });
    return out;
}

TensorFunction centered_terminal(const FiniteFKModel& m, int n1, const TensorFunction& F) {
    int q = (int)F.dims.size();
    auto eta = flow_eta(m, n1);
    auto g = flow_gamma(m, n1);
    Rational mean = integrate(product_measure(std::vector<Vec>(q, eta[n1])), F);
    TensorFunction out = F;
    Rational s = Rational(1) / pow(g.normalizers[n1], q);
    for (auto& v : out.values) v = (v - mean) * s;
    return out;
}

TensorFunction s_operator(const FiniteFKModel& m, const MultiIndex& p, int q, const TensorFunction& F) {
    int n = (int)p.size() - 1;
    if (n < 0) throw DomainError("s_operator: empty composition");
    if (n + 1 > m.horizon()) throw DomainError("s_operator: needs horizon n+1");
    TensorFunction H = tensor_kernel_apply(m, n + 1, q, centered_terminal(m, n + 1, F));
    TensorFunction last = H;
    if (p[n] > 0) last = tensor_product(product_function(std::vector<Vec>(p[n], centered_potential(m, n))), H);
    last = symmetrize(last);
    MultiIndex front(p.begin(), p.end() - 1);
    TensorFunction out = last;
    if (mi_total(front) > 0) out = tensor_product(gbar_product(m, front), last);
    out.symmetric = true;
    return out;
}

Rational p_derivative(const FiniteFKModel& m, int k, int n1, int q, const TensorFunction& F, PMode mode) {
    if (k < 0 || q < 1 || n1 < 1) throw DomainError("p_derivative: need k >= 0, q >= 1, n+1 >= 1");
    if ((int)F.dims.size() != q) throw DomainError("p_derivative: F rank differs from q");
    if (n1 > m.horizon()) throw DomainError("p_derivative: time beyond the model horizon");
    auto eta = flow_eta(m, n1);
    if (k == 0) return integrate(product_measure(std::vector<Vec>(q, eta[n1])), F);
    int n = n1 - 1;
    Rational total = 0;
    BigInt qm1 = factorial(q - 1);
    TensorFunction Fbar = centered_terminal(m, n1, F);
    for (int s = 0; s < 2 * k; ++s)
        for_each_composition(n + 1, s, [&](const MultiIndex& p) {
            Rational c = Rational(factorial(q - 1 + s)) / Rational(qm1 * mi_factorial(p));
            if (mode == PMode::Symmetric) {
                MultiIndex qq = p;
                qq[n] += q;
                total += c * dqbar(m, k, q_prime(qq), s_operator(m, p, q, F));
            } else {
                MultiIndex qq = p;
                qq.push_back(q);
                TensorFunction G = s > 0 ? tensor_product(gbar_product(m, p), Fbar) : Fbar;
                total += c * dqbar(m, k, q_prime(qq), G);
            }
        });
    return total;
}

Rational p1_explicit(const FiniteFKModel& m, int n1, int q, const TensorFunction& F) {
    int n = n1 - 1;
    if (n < 0 || n1 > m.horizon()) throw DomainError("p1_explicit: time outside the model horizon");
    auto g = flow_gamma(m, n1);
    std::vector<TensorFunction> H(n + 1);
    H[n] = tensor_kernel_apply(m, n1, q, centered_terminal(m, n1, F));
    for (int k = n - 1; k >= 0; --k) H[k] = tensor_kernel_apply(m, k + 1, q, H[k + 1]);
    Rational first = 0, second = 0;
    if (q >= 2) {
        std::vector<int> a{0};
        for (int i = 0; i < q - 1; ++i) a.push_back(i);
        for (int k = 0; k <= n; ++k) {
            auto diag = pull_select(H[k], 0, a, q - 1, m.levels[k]);
            first += g.normalizers[k] * integrate(product_measure(std::vector<Vec>(q - 1, g.gamma[k])), diag);
        }
        first *= Rational(binomial(q, 2));
    }
    for (int mm = 0; mm <= n; ++mm) {
        Vec gb = centered_potential(m, mm);
        for (int k = 0; k <= mm; ++k) {
            Vec v = mat_vec(semigroup(m, k, mm), gb);
            std::vector<Vec> f(q, g.gamma[k]);
            f[0] = hadamard(g.gamma[k], v);
            second += g.normalizers[k] * integrate(product_measure(f), H[k]);
        }
    }
    return first + Rational(q * q) * second;
}

std::pair<Rational, Rational> geometric_split(int q, int m, const Rational& u) {
    if (u == 1) throw DomainError("geometric_split: u = 1");
    Rational lhs = Rational(1) / pow(1 - u, q + 1);
    Rational rhs = 0;
    for (int k = 0; k <= m; ++k) rhs += Rational(binomial(q + k, k)) * pow(u, k);
    Rational tail = 0, r = u / (1 - u);
    for (int k = 1; k <= q + 1; ++k) tail += Rational(binomial(q + 1 + m, k + m)) * pow(r, k);
    rhs += pow(u, m) * tail;
    return {lhs, rhs};
}

} // namespace fklab
