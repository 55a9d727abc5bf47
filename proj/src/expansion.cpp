#include "fklab/expansion.hpp"

#include <algorithm>
#include <set>

namespace fklab {

Rational WeightedMapCombo::total_weight() const {
    Rational s = 0;
    for (const auto& kv : terms) s += kv.second;
    return s;
}

static int image_size(const std::vector<int>& a) {
    std::set<int> s(a.begin(), a.end());
    return (int)s.size();
}

static void for_each_map(int q, const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<int> a(q, 0);
    while (true) {
        fn(a);
        int i = q - 1;
        while (i >= 0 && ++a[i] == q) a[i--] = 0;
        if (i < 0) break;
    }
}

WeightedMapCombo l_operator(int N, int q) {
    if (q < 1 || q > N) throw DomainError("l_operator: need 1 <= q <= N");
    WeightedMapCombo u{q, {}};
    Rational scale = Rational(1) / Rational(power(BigInt(N), q));
    for_each_map(q, [&](const std::vector<int>& a) {
        int p = image_size(a);
        u.terms[a] = scale * Rational(falling_factorial(N, p)) / Rational(falling_factorial(q, p));
    });
    return u;
}

WeightedMapCombo dl_operator(int k, int q) {
    if (k < 0 || q < 1) throw DomainError("dl_operator: need k >= 0 and q >= 1");
    WeightedMapCombo u{q, {}};
    if (k >= q) return u;
    for_each_map(q, [&](const std::vector<int>& a) {
        int p = image_size(a);
        if (p < q - k) return;
        Rational w = Rational(stirling_first(p, q - k)) / Rational(falling_factorial(q, p));
        if (w != 0) u.terms[a] = w;
    });
    return u;
}

WeightedMapCombo combo_add(const WeightedMapCombo& a, const WeightedMapCombo& b) {
    if (a.q != b.q && !a.terms.empty() && !b.terms.empty()) throw DomainError("combo_add: size mismatch");
    WeightedMapCombo r = a;
    r.q = std::max(a.q, b.q);
    for (const auto& [m, w] : b.terms) r.terms[m] += w;
    for (auto it = r.terms.begin(); it != r.terms.end();) it = it->second == 0 ? r.terms.erase(it) : std::next(it);
    return r;
}

WeightedMapCombo combo_scale(const WeightedMapCombo& a, const Rational& c) {
    WeightedMapCombo r = a;
    for (auto& kv : r.terms) kv.second *= c;
    return r;
}

TensorFunction combo_apply(const WeightedMapCombo& u, const TensorFunction& F) {
    TensorFunction out = zero_function(F.dims);
    for (const auto& [a, w] : u.terms) out = add(out, scale(selection_apply(a, F), w));
    out.symmetric = false;
    return out;
}

ProductMeasure combo_push(const ProductMeasure& mu, const WeightedMapCombo& u) {
    ProductMeasure out = zero_measure(mu.dims);
    int dim = mu.dims.empty() ? 0 : mu.dims[0];
    for (const auto& [a, w] : u.terms) out = add(out, scale(push_select(mu, 0, a, dim), w));
    return out;
}

ProductMeasure delta_measure(const FiniteFKModel& m, const Jungle& j) {
    j.validate();
    const auto& p = j.profile;
    int H = p.height();
    if (H < 1) throw DomainError("delta_measure: jungle needs at least one map");
    if (H - 1 > m.horizon()) throw DomainError("delta_measure: jungle is taller than the model horizon");
    if (p.white[0] != 0) throw DomainError("delta_measure: roots must be black");
    // roots: eta_0 on every black of level 0
    ProductMeasure mu = product_measure(std::vector<Vec>(p.black[0], m.eta0));
    int prefix = 0;
    for (int L = 0; L < H; ++L) {
        mu = push_select(mu, prefix, j.maps[L], m.levels[L]);
        prefix += p.white[L + 1];
        if (L + 1 < H) {
            Matrix Q = m.Q(L + 1);
            for (int b = 0; b < p.black[L + 1]; ++b) mu = push_matrix(mu, prefix + b, Q);
        }
    }
    return mu;
}

ProductMeasure delta_measure(const FiniteFKModel& m, const Forest& f, const LevelProfile& p,
                             const std::vector<int>& blocks) {
    return symmetrize(delta_measure(m, representative(f, p)), blocks);
}

ProductMeasure delta_measure(const FiniteFKModel& m, const Forest& f, int n, int q) {
    return delta_measure(m, f, uncolored_profile(n, q));
}

ForestTable forest_table(const FiniteFKModel& m, int n, int q) {
    if (n < 0 || n > m.horizon()) throw DomainError("forest_table: time outside the model horizon");
    ForestTable t{n, q, {}};
    auto prof = uncolored_profile(n, q);
    for (auto& f : enumerate_forests(n, q)) {
        ForestTerm term;
        term.image = nonleaf_counts(f, n + 1);
        term.count = count_jungles(f, prof);
        term.delta = delta_measure(m, f, prof);
        term.forest = std::move(f);
        t.terms.push_back(std::move(term));
    }
    return t;
}

static std::vector<Rational> poly_mul(const std::vector<Rational>& a, const std::vector<Rational>& b) {
    std::vector<Rational> r(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

std::vector<Rational> falling_weight_orders(const std::vector<int>& image, const std::vector<int>& ranges) {
    if (image.size() != ranges.size()) throw DomainError("falling_weight_orders: length mismatch");
    std::vector<Rational> acc{1};
    for (size_t j = 0; j < image.size(); ++j) {
        int p = image[j], R = ranges[j];
        // (N)_p / ((R)_p N^R) = sum_l s(p,l) N^{l-R} / (R)_p
        std::vector<Rational> lev(R + 1, 0);
        Rational den = Rational(falling_factorial(R, p));
        for (int l = 0; l <= p; ++l) lev[R - l] = Rational(stirling_first(p, l)) / den;
        acc = poly_mul(acc, lev);
    }
    while (acc.size() > 1 && acc.back() == 0) acc.pop_back();
    return acc;
}

Rational falling_weight(int N, const std::vector<int>& image, const std::vector<int>& ranges) {
    Rational w = 1;
    for (size_t j = 0; j < image.size(); ++j)
        w *= Rational(falling_factorial(N, image[j])) /
             Rational(falling_factorial(ranges[j], image[j]) * power(BigInt(N), ranges[j]));
    return w;
}

Rational q_exact(const ForestTable& t, int N, const TensorFunction& F) {
    if (t.q > N) throw DomainError("q_exact: q > N");
    std::vector<int> ranges(t.n + 1, t.q);
    Rational s = 0;
    for (const auto& term : t.terms)
        s += falling_weight(N, term.image, ranges) * Rational(term.count) * integrate(term.delta, F);
    return s;
}

Rational q_exact(const FiniteFKModel& m, int N, int n, int q, const TensorFunction& F) {
    if (q > N) throw DomainError("q_exact: q > N");
    return q_exact(forest_table(m, n, q), N, F);
}

ProductMeasure q_exact_measure(const ForestTable& t, int N) {
    if (t.q > N) throw DomainError("q_exact: q > N");
    std::vector<int> ranges(t.n + 1, t.q);
    ProductMeasure mu = zero_measure(t.terms.at(0).delta.dims);
    for (const auto& term : t.terms)
        mu = add(mu, scale(term.delta, falling_weight(N, term.image, ranges) * Rational(term.count)));
    return mu;
}

std::vector<ProductMeasure> laurent_measures(const ForestTable& t) {
    std::vector<int> ranges(t.n + 1, t.q);
    int K = (t.q - 1) * (t.n + 1);
    std::vector<ProductMeasure> out(K + 1, zero_measure(t.terms.at(0).delta.dims));
    for (const auto& term : t.terms) {
        auto orders = falling_weight_orders(term.image, ranges);
        for (size_t k = 0; k < orders.size(); ++k)
            if (orders[k] != 0) out.at(k) = add(out[k], scale(term.delta, orders[k] * Rational(term.count)));
    }
    return out;
}

std::vector<Rational> laurent_table(const ForestTable& t, const TensorFunction& F) {
    std::vector<int> ranges(t.n + 1, t.q);
    int K = (t.q - 1) * (t.n + 1);
    std::vector<Rational> out(K + 1, 0);
    for (const auto& term : t.terms) {
        Rational d = integrate(term.delta, F);
        if (d == 0) continue;
        auto orders = falling_weight_orders(term.image, ranges);
        for (size_t k = 0; k < orders.size(); ++k) out.at(k) += orders[k] * Rational(term.count) * d;
    }
    return out;
}

std::vector<Rational> laurent_table(const FiniteFKModel& m, int n, int q, const TensorFunction& F) {
    return laurent_table(forest_table(m, n, q), F);
}

Rational evaluate_orders(const std::vector<Rational>& orders, int N) {
    Rational s = 0, w = 1;
    for (const auto& a : orders) {
        s += a * w;
        w /= N;
    }
    return s;
}

static Tree T_tree(int H, int k) { return wrap(node({chain(H - k - 1), chain(H - k - 1)}), k); }

static Forest assemble(std::vector<Tree> trees, int H, int q) {
    // top-level trivial trees fill the remaining roots
    int rest = q - forest_profile(make_forest(trees), H).black[H];
    if (rest < 0) throw DomainError("forest needs more vertices per level than q");
    for (int i = 0; i < rest; ++i) trees.push_back(chain(H));
    Forest f = make_forest(trees);
    if (forest_profile(f, H) != uncolored_profile(H - 1, q)) throw DomainError("forest does not fit the constant profile");
    return f;
}

Forest forest_one_coalescence(int n, int q, int k) {
    int H = n + 1;
    return assemble({T_tree(H, k), chain(k)}, H, q);
}

Forest forest_triple_branch(int n, int q, int k) {
    int H = n + 1;
    Tree c = chain(H - k - 1);
    return assemble({wrap(node({c, c, c}), k), chain(k), chain(k)}, H, q);
}

Forest forest_two_pairs(int n, int q, int k) {
    int H = n + 1;
    return assemble({T_tree(H, k), T_tree(H, k), chain(k), chain(k)}, H, q);
}

Forest forest_two_levels(int n, int q, int k, int l, int variant) {
    int H = n + 1;
    if (!(0 <= k && k < l && l <= n)) throw DomainError("forest_two_levels: need 0 <= k < l <= n");
    Tree inner = wrap(node({chain(H - l - 1), chain(H - l - 1)}), l - k - 1);
    switch (variant) {
    case 1: return assemble({wrap(node({chain(H - k - 1), inner}), k), chain(k), chain(l)}, H, q);
    case 2: return assemble({wrap(node({chain(l - k - 1), inner}), k), chain(k)}, H, q);
    case 3: return assemble({T_tree(H, k), T_tree(H, l), chain(k), chain(l)}, H, q);
    case 4: return assemble({wrap(node({chain(l - k - 1), chain(H - k - 1)}), k), T_tree(H, l), chain(k)}, H, q);
    default: throw DomainError("forest_two_levels: variant must be 1..4");
    }
}

Forest wick_forest(const std::vector<int>& r) {
    int H = (int)r.size();
    std::vector<Tree> trees;
    for (int k = 0; k < H; ++k)
        for (int i = 0; i < r[k]; ++i) {
            trees.push_back(T_tree(H, k));
            trees.push_back(chain(k));
        }
    return make_forest(trees);
}

LowOrders low_order_closed_form(const FiniteFKModel& m, int n, int q, const TensorFunction& F) {
    if (q < 2) throw DomainError("low_order_closed_form: needs q >= 2");
    auto g = flow_gamma(m, n);
    auto prof = uncolored_profile(n, q);
    auto delta = [&](const Forest& f) { return integrate(delta_measure(m, f, prof), F); };
    Rational gq = integrate(product_measure(std::vector<Vec>(q, g.gamma[n])), F);
    std::vector<Rational> d1k(n + 1);
    for (int k = 0; k <= n; ++k) d1k[k] = delta(forest_one_coalescence(n, q, k));
    LowOrders out;
    out.d0 = gq;
    Rational c2 = Rational(binomial(q, 2));
    out.d1 = 0;
    for (int k = 0; k <= n; ++k) out.d1 += c2 * (d1k[k] - gq);
    if (q < 4) return out;
    Rational d2 = 0;
    Rational c3 = Rational(binomial(q, 3));
    for (int k = 0; k <= n; ++k)
        d2 += c3 * (delta(forest_triple_branch(n, q, k)) + ratio(3, 4) * (q - 3) * delta(forest_two_pairs(n, q, k)) -
                    ratio(3, 2) * (q - 1) * d1k[k] + ratio(3 * q - 1, 4) * gq);
    for (int k = 0; k <= n; ++k)
        for (int l = k + 1; l <= n; ++l) {
            d2 += c2 * c2 * (gq - (d1k[l] + d1k[k]));
            d2 += c2 * (delta(forest_two_levels(n, q, k, l, 2)) +
                        (q - 2) * (delta(forest_two_levels(n, q, k, l, 1)) + delta(forest_two_levels(n, q, k, l, 4))) +
                        ratio((q - 2) * (q - 3), 2) * delta(forest_two_levels(n, q, k, l, 3)));
        }
    out.d2 = d2;
    return out;
}

std::vector<TvRow> tv_limit_check(const FiniteFKModel& m, int n, int q, const std::vector<int>& Ns) {
    auto t = forest_table(m, n, q);
    auto g = flow_gamma(m, n);
    ProductMeasure limit = product_measure(std::vector<Vec>(q, g.gamma[n]));
    std::vector<TvRow> rows;
    for (int N : Ns) {
        TvRow row;
        row.N = N;
        row.value = N * tv_norm(subtract(q_exact_measure(t, N), limit));
        row.bound = (n + 1) * q * (q - 1);
        row.increased = !rows.empty() && row.value > rows.back().value;
        rows.push_back(row);
    }
    return rows;
}

bool in_B0(const FiniteFKModel& m, int n, const TensorFunction& F) {
    int q = (int)F.dims.size();
    if (q == 0 || !is_symmetric(F)) return false;
    auto g = flow_gamma(m, n);
    int d = F.dims.back();
    for (size_t base = 0; base < F.values.size(); base += d) {
        Rational s = 0;
        for (int y = 0; y < d; ++y) s += F.values[base + y] * g.gamma[n][y];
        if (s != 0) return false;
    }
    return true;
}

WickResult wick_derivative(const FiniteFKModel& m, int n, int q, const TensorFunction& F) {
    if (!in_B0(m, n, F)) throw DomainError("wick_derivative: F is not a centered symmetric function");
    WickResult res;
    res.order = q / 2;
    res.value = 0;
    if (q % 2) return res;
    auto prof = uncolored_profile(n, q);
    int half = q / 2;
    std::vector<int> r(n + 1, 0);
    std::function<void(int, int)> rec = [&](int k, int left) {
        if (k == n) {
            r[k] = left;
            WickTerm t;
            t.r = r;
            t.coefficient = Rational(factorial(q)) / Rational(power(BigInt(2), half) * mi_factorial(r));
            t.forest = wick_forest(r);
            t.delta = integrate(delta_measure(m, t.forest, prof), F);
            res.value += t.coefficient * t.delta;
            res.terms.push_back(std::move(t));
            return;
        }
        for (int v = 0; v <= left; ++v) {
            r[k] = v;
            rec(k + 1, left - v);
        }
    };
    rec(0, half);
    return res;
}

} // namespace fklab
