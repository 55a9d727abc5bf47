#include "fklab/tensor.hpp"

#include <algorithm>
#include <numeric>

namespace fklab {

size_t space_size(const std::vector<int>& dims) {
    size_t s = 1;
    for (int d : dims) {
        if (d < 0) throw DomainError("negative dimension");
        if (d != 0 && s > kMaxDenseAtoms / (size_t)d)
            throw ResourceError("dense product space exceeds 1e7 atoms");
        s *= (size_t)d;
    }
    if (s > kMaxDenseAtoms) throw ResourceError("dense product space exceeds 1e7 atoms");
    return s;
}

std::vector<int> unflatten(size_t idx, const std::vector<int>& dims) {
    std::vector<int> c(dims.size());
    for (size_t i = dims.size(); i-- > 0;) {
        c[i] = (int)(idx % dims[i]);
        idx /= dims[i];
    }
    return c;
}

size_t flatten(const std::vector<int>& coords, const std::vector<int>& dims) {
    size_t idx = 0;
    for (size_t i = 0; i < dims.size(); ++i) idx = idx * dims[i] + coords[i];
    return idx;
}

static std::vector<size_t> strides(const std::vector<int>& dims) {
    std::vector<size_t> s(dims.size(), 1);
    for (size_t i = dims.size(); i-- > 1;) s[i - 1] = s[i] * dims[i];
    return s;
}

TensorFunction constant_function(const std::vector<int>& dims, const Rational& value) {
    TensorFunction F;
    F.dims = dims;
    F.values.assign(space_size(dims), value);
    F.symmetric = true;
    return F;
}

TensorFunction zero_function(const std::vector<int>& dims) { return constant_function(dims, 0); }

ProductMeasure zero_measure(const std::vector<int>& dims) {
    ProductMeasure mu;
    mu.dims = dims;
    mu.atoms.assign(space_size(dims), 0);
    return mu;
}

TensorFunction product_function(const std::vector<Vec>& factors) {
    std::vector<int> dims;
    for (const auto& f : factors) dims.push_back((int)f.size());
    TensorFunction F = constant_function(dims, 1);
    F.symmetric = false;
    for (size_t i = 0; i < F.size(); ++i) {
        auto c = unflatten(i, dims);
        Rational v = 1;
        for (size_t j = 0; j < factors.size(); ++j) v *= factors[j][c[j]];
        F.values[i] = v;
    }
    return F;
}

ProductMeasure product_measure(const std::vector<Vec>& factors) {
    TensorFunction F = product_function(factors);
    return ProductMeasure{F.dims, std::move(F.values)};
}

ProductMeasure dirac(const std::vector<int>& dims, const std::vector<int>& point) {
    ProductMeasure mu = zero_measure(dims);
    mu.atoms[flatten(point, dims)] = 1;
    return mu;
}

static std::vector<int> default_blocks(const std::vector<int>& blocks, size_t rank) {
    if (!blocks.empty()) {
        if ((size_t)std::accumulate(blocks.begin(), blocks.end(), 0) != rank)
            throw DomainError("block sizes do not match tensor rank");
        return blocks;
    }
    return {(int)rank};
}

// All coordinate permutations that preserve the blocks, as index maps.
static std::vector<std::vector<int>> block_permutations(const std::vector<int>& blocks) {
    std::vector<std::vector<int>> out{{}};
    for (int b : blocks) {
        std::vector<int> p(b);
        std::iota(p.begin(), p.end(), 0);
        std::vector<std::vector<int>> perms;
        do perms.push_back(p);
        while (std::next_permutation(p.begin(), p.end()));
        std::vector<std::vector<int>> next;
        for (const auto& prefix : out) {
            int off = (int)prefix.size();
            for (const auto& q : perms) {
                auto v = prefix;
                for (int x : q) v.push_back(off + x);
                next.push_back(std::move(v));
            }
        }
        out = std::move(next);
    }
    return out;
}

template <class T>
static std::vector<Rational> symmetrize_values(const std::vector<int>& dims, const std::vector<Rational>& vals,
                                               const std::vector<int>& blocks) {
    auto bl = default_blocks(blocks, dims.size());
    auto perms = block_permutations(bl);
    for (const auto& p : perms)
        for (size_t i = 0; i < p.size(); ++i)
            if (dims[p[i]] != dims[i]) throw DomainError("cannot symmetrize coordinates of different sizes");
    std::vector<Rational> out(vals.size(), 0);
    Rational w(1, (long)perms.size());
    std::vector<int> c2(dims.size());
    for (size_t i = 0; i < vals.size(); ++i) {
        if (vals[i] == 0) continue;
        auto c = unflatten(i, dims);
        for (const auto& p : perms) {
            for (size_t j = 0; j < p.size(); ++j) c2[j] = c[p[j]];
            out[flatten(c2, dims)] += vals[i] * w;
        }
    }
    return out;
}

TensorFunction symmetrize(const TensorFunction& F, const std::vector<int>& blocks) {
    TensorFunction out;
    out.dims = F.dims;
    out.values = symmetrize_values<TensorFunction>(F.dims, F.values, blocks);
    out.symmetric = true;
    return out;
}

ProductMeasure symmetrize(const ProductMeasure& mu, const std::vector<int>& blocks) {
    ProductMeasure out;
    out.dims = mu.dims;
    out.atoms = symmetrize_values<ProductMeasure>(mu.dims, mu.atoms, blocks);
    return out;
}

bool is_symmetric(const TensorFunction& F, const std::vector<int>& blocks) {
    return symmetrize(F, blocks).values == F.values;
}

std::vector<TensorFunction> symmetric_basis(int dim, int q) {
    std::vector<int> dims(q, dim);
    std::vector<TensorFunction> out;
    std::vector<int> c(q, 0);
    // nondecreasing tuples enumerate multisets in lexicographic order
    while (true) {
        TensorFunction F = zero_function(dims);
        std::vector<int> p = c;
        do F.values[flatten(p, dims)] = 1;
        while (std::next_permutation(p.begin(), p.end()));
        F.symmetric = true;
        out.push_back(std::move(F));
        int i = q - 1;
        while (i >= 0 && c[i] == dim - 1) --i;
        if (i < 0) break;
        ++c[i];
        for (int j = i + 1; j < q; ++j) c[j] = c[i];
    }
    if (q == 0) out.resize(1);
    return out;
}

std::vector<TensorFunction> block_symmetric_basis(const std::vector<int>& block_dims,
                                                  const std::vector<int>& block_sizes) {
    std::vector<TensorFunction> out{constant_function({}, 1)};
    for (size_t b = 0; b < block_dims.size(); ++b) {
        if (block_sizes[b] == 0) continue;
        auto basis = symmetric_basis(block_dims[b], block_sizes[b]);
        std::vector<TensorFunction> next;
        for (const auto& a : out)
            for (const auto& f : basis) next.push_back(tensor_product(a, f));
        out = std::move(next);
    }
    for (auto& f : out) f.symmetric = true;
    return out;
}

Rational integrate(const ProductMeasure& mu, const TensorFunction& F) {
    if (mu.dims != F.dims) throw DomainError("integrate: space mismatch");
    Rational s = 0;
    for (size_t i = 0; i < mu.atoms.size(); ++i)
        if (mu.atoms[i] != 0 && F.values[i] != 0) s += mu.atoms[i] * F.values[i];
    return s;
}

ProductMeasure add(const ProductMeasure& a, const ProductMeasure& b) {
    if (a.dims != b.dims) throw DomainError("add: space mismatch");
    ProductMeasure r = a;
    for (size_t i = 0; i < r.atoms.size(); ++i) r.atoms[i] += b.atoms[i];
    return r;
}

ProductMeasure scale(const ProductMeasure& a, const Rational& c) {
    ProductMeasure r = a;
    for (auto& v : r.atoms) v *= c;
    return r;
}

ProductMeasure subtract(const ProductMeasure& a, const ProductMeasure& b) { return add(a, scale(b, -1)); }

TensorFunction add(const TensorFunction& a, const TensorFunction& b) {
    if (a.dims != b.dims) throw DomainError("add: space mismatch");
    TensorFunction r = a;
    for (size_t i = 0; i < r.values.size(); ++i) r.values[i] += b.values[i];
    r.symmetric = a.symmetric && b.symmetric;
    return r;
}

TensorFunction scale(const TensorFunction& a, const Rational& c) {
    TensorFunction r = a;
    for (auto& v : r.values) v *= c;
    return r;
}

template <class V>
static std::vector<Rational> outer(const std::vector<Rational>& a, const std::vector<Rational>& b) {
    std::vector<Rational> r(a.size() * b.size());
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i * b.size() + j] = a[i] * b[j];
    return r;
}

TensorFunction tensor_product(const TensorFunction& a, const TensorFunction& b) {
    TensorFunction r;
    r.dims = a.dims;
    r.dims.insert(r.dims.end(), b.dims.begin(), b.dims.end());
    space_size(r.dims);
    r.values = outer<TensorFunction>(a.values, b.values);
    return r;
}

ProductMeasure tensor_product(const ProductMeasure& a, const ProductMeasure& b) {
    ProductMeasure r;
    r.dims = a.dims;
    r.dims.insert(r.dims.end(), b.dims.begin(), b.dims.end());
    space_size(r.dims);
    r.atoms = outer<ProductMeasure>(a.atoms, b.atoms);
    return r;
}

TensorFunction pull_select(const TensorFunction& F, int prefix, const std::vector<int>& a, int m, int dim) {
    if ((int)F.dims.size() != prefix + (int)a.size()) throw DomainError("pull_select: rank mismatch");
    for (int v : a)
        if (v < 0 || v >= m) throw DomainError("selection map value out of range");
    for (size_t i = prefix; i < F.dims.size(); ++i)
        if (F.dims[i] != dim) throw DomainError("pull_select: block dimension mismatch");
    std::vector<int> dims(F.dims.begin(), F.dims.begin() + prefix);
    dims.insert(dims.end(), m, dim);
    TensorFunction out;
    out.dims = dims;
    out.values.resize(space_size(dims));
    std::vector<int> src(F.dims.size());
    for (size_t i = 0; i < out.values.size(); ++i) {
        auto c = unflatten(i, dims);
        for (int j = 0; j < prefix; ++j) src[j] = c[j];
        for (size_t j = 0; j < a.size(); ++j) src[prefix + j] = c[prefix + a[j]];
        out.values[i] = F.values[flatten(src, F.dims)];
    }
    return out;
}

ProductMeasure push_select(const ProductMeasure& mu, int prefix, const std::vector<int>& a, int dim) {
    int m = (int)mu.dims.size() - prefix;
    if (m < 0) throw DomainError("push_select: rank mismatch");
    for (int v : a)
        if (v < 0 || v >= m) throw DomainError("selection map value out of range");
    std::vector<int> dims(mu.dims.begin(), mu.dims.begin() + prefix);
    dims.insert(dims.end(), a.size(), dim);
    ProductMeasure out = zero_measure(dims);
    std::vector<int> dst(dims.size());
    for (size_t i = 0; i < mu.atoms.size(); ++i) {
        if (mu.atoms[i] == 0) continue;
        auto c = unflatten(i, mu.dims);
        for (int j = 0; j < prefix; ++j) dst[j] = c[j];
        for (size_t j = 0; j < a.size(); ++j) dst[prefix + j] = c[prefix + a[j]];
        out.atoms[flatten(dst, dims)] += mu.atoms[i];
    }
    return out;
}

TensorFunction pull_matrix(const TensorFunction& F, int axis, const Matrix& A) {
    if (axis < 0 || axis >= (int)F.dims.size()) throw DomainError("pull_matrix: bad axis");
    int rows = (int)A.size();
    int cols = F.dims[axis];
    for (const auto& r : A)
        if ((int)r.size() != cols) throw DomainError("pull_matrix: shape mismatch");
    auto dims = F.dims;
    dims[axis] = rows;
    TensorFunction out;
    out.dims = dims;
    out.values.assign(space_size(dims), 0);
    auto sin = strides(F.dims), sout = strides(dims);
    size_t outer_n = 1, inner_n = sin[axis];
    for (int i = 0; i < axis; ++i) outer_n *= F.dims[i];
    for (size_t o = 0; o < outer_n; ++o)
        for (size_t in = 0; in < inner_n; ++in)
            for (int x = 0; x < rows; ++x) {
                Rational s = 0;
                for (int y = 0; y < cols; ++y) {
                    const Rational& f = F.values[o * sin[axis] * cols + y * sin[axis] + in];
                    if (A[x][y] != 0 && f != 0) s += A[x][y] * f;
                }
                out.values[o * sout[axis] * rows + x * sout[axis] + in] = s;
            }
    return out;
}

ProductMeasure push_matrix(const ProductMeasure& mu, int axis, const Matrix& A) {
    if (axis < 0 || axis >= (int)mu.dims.size()) throw DomainError("push_matrix: bad axis");
    int rows = mu.dims[axis];
    if ((int)A.size() != rows) throw DomainError("push_matrix: shape mismatch");
    int cols = rows ? (int)A[0].size() : 0;
    auto dims = mu.dims;
    dims[axis] = cols;
    ProductMeasure out = zero_measure(dims);
    auto sin = strides(mu.dims), sout = strides(dims);
    size_t outer_n = 1, inner_n = sin[axis];
    for (int i = 0; i < axis; ++i) outer_n *= mu.dims[i];
    for (size_t o = 0; o < outer_n; ++o)
        for (size_t in = 0; in < inner_n; ++in)
            for (int x = 0; x < rows; ++x) {
                const Rational& v = mu.atoms[o * sin[axis] * rows + x * sin[axis] + in];
                if (v == 0) continue;
                for (int y = 0; y < cols; ++y)
                    if (A[x][y] != 0) out.atoms[o * sout[axis] * cols + y * sout[axis] + in] += v * A[x][y];
            }
    return out;
}

TensorFunction selection_apply(const std::vector<int>& a, const TensorFunction& F) {
    int q = (int)a.size();
    if ((int)F.dims.size() != q) throw DomainError("selection_apply: rank mismatch");
    if (q == 0) return F;
    for (int d : F.dims)
        if (d != F.dims[0]) throw DomainError("selection_apply: needs a tensor power");
    TensorFunction out = pull_select(F, 0, a, q, F.dims[0]);
    out.symmetric = false;
    return out;
}

TensorFunction tensor_kernel_apply(const FiniteFKModel& m, int k, int q, const TensorFunction& F) {
    if ((int)F.dims.size() != q) throw DomainError("tensor_kernel_apply: rank mismatch");
    Matrix Qk = m.Q(k);
    TensorFunction out = F;
    for (int i = 0; i < q; ++i) out = pull_matrix(out, i, Qk);
    out.symmetric = F.symmetric;
    return out;
}

Rational tv_norm(const ProductMeasure& mu) {
    Rational s = 0;
    for (const auto& v : mu.atoms) s += abs(v);
    return s;
}

ProductMeasure occupation_tensor(const std::vector<int>& x, int dim, int q, OccupationMode mode) {
    int N = (int)x.size();
    if (N == 0) throw DomainError("occupation_tensor: empty configuration");
    if (mode == OccupationMode::Injective && q > N) throw DomainError("occupation_tensor: q > N for injective mode");
    std::vector<int> dims(q, dim);
    ProductMeasure mu = zero_measure(dims);
    // enumerate maps [q] -> [N]
    std::vector<int> a(q, 0);
    Rational w = Rational(1) / Rational(mode == OccupationMode::Tensor ? power(BigInt(N), q)
                                                                        : falling_factorial(N, q));
    std::vector<int> pt(q);
    while (true) {
        bool ok = true;
        if (mode == OccupationMode::Injective) {
            for (int i = 0; i < q && ok; ++i)
                for (int j = 0; j < i; ++j)
                    if (a[i] == a[j]) {
                        ok = false;
                        break;
                    }
        }
        if (ok) {
            for (int i = 0; i < q; ++i) pt[i] = x[a[i]];
            mu.atoms[flatten(pt, dims)] += w;
        }
        int i = q - 1;
        while (i >= 0 && a[i] == N - 1) a[i--] = 0;
        if (i < 0) break;
        ++a[i];
    }
    return mu;
}

} // namespace fklab
