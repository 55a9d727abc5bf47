#pragma once

#include "fklab/fk_model.hpp"

#include <vector>

namespace fklab {

// Dense row-major tensors over finite product spaces. Coordinates are ordered by
// time block then tensor slot; the last coordinate varies fastest.
struct TensorFunction {
    std::vector<int> dims;
    std::vector<Rational> values;
    bool symmetric = false;

    size_t size() const { return values.size(); }
};

struct ProductMeasure {
    std::vector<int> dims;
    std::vector<Rational> atoms;

    size_t size() const { return atoms.size(); }
};

constexpr size_t kMaxDenseAtoms = 10'000'000;

size_t space_size(const std::vector<int>& dims);
std::vector<int> unflatten(size_t idx, const std::vector<int>& dims);
size_t flatten(const std::vector<int>& coords, const std::vector<int>& dims);

TensorFunction constant_function(const std::vector<int>& dims, const Rational& value);
TensorFunction zero_function(const std::vector<int>& dims);
ProductMeasure zero_measure(const std::vector<int>& dims);
// f^1 (x) ... (x) f^q
TensorFunction product_function(const std::vector<Vec>& factors);
ProductMeasure product_measure(const std::vector<Vec>& factors);
ProductMeasure dirac(const std::vector<int>& dims, const std::vector<int>& point);

// Average over coordinate permutations inside each block; blocks are consecutive
// coordinate counts summing to the rank. An empty block list means one block.
TensorFunction symmetrize(const TensorFunction& F, const std::vector<int>& blocks = {});
ProductMeasure symmetrize(const ProductMeasure& mu, const std::vector<int>& blocks = {});
bool is_symmetric(const TensorFunction& F, const std::vector<int>& blocks = {});

// Indicators of the permutation orbits of E^q, one per multiset of states.
std::vector<TensorFunction> symmetric_basis(int dim, int q);
// Products of per-block symmetric bases; dims[k] is the state count of block k.
std::vector<TensorFunction> block_symmetric_basis(const std::vector<int>& block_dims,
                                                  const std::vector<int>& block_sizes);

Rational integrate(const ProductMeasure& mu, const TensorFunction& F);
ProductMeasure add(const ProductMeasure& a, const ProductMeasure& b);
ProductMeasure scale(const ProductMeasure& a, const Rational& c);
ProductMeasure subtract(const ProductMeasure& a, const ProductMeasure& b);
TensorFunction add(const TensorFunction& a, const TensorFunction& b);
TensorFunction scale(const TensorFunction& a, const Rational& c);
// a (x) b, coordinates of a first.
TensorFunction tensor_product(const TensorFunction& a, const TensorFunction& b);
ProductMeasure tensor_product(const ProductMeasure& a, const ProductMeasure& b);

// (D_a F)(x^1..x^q) = F(x^{a(1)},...,x^{a(q)}), a 0-based map [q] -> [q].
TensorFunction selection_apply(const std::vector<int>& a, const TensorFunction& F);

// Generic pullback through a selection on the trailing block: F lives on
// prefix x dim^{|a|}; the result lives on prefix x dim^m with
// out(P, y_1..y_m) = F(P, y_{a(1)}, ..., y_{a(|a|)}).
TensorFunction pull_select(const TensorFunction& F, int prefix, const std::vector<int>& a, int m, int dim);
// Image of mu (on prefix x dim^m) under (P,y) -> (P, y_{a(1)},...,y_{a(|a|)}).
ProductMeasure push_select(const ProductMeasure& mu, int prefix, const std::vector<int>& a, int dim);
// out(..,x,..) = sum_y A(x,y) F(..,y,..) on the given axis.
TensorFunction pull_matrix(const TensorFunction& F, int axis, const Matrix& A);
// out(..,y,..) = sum_x mu(..,x,..) A(x,y) on the given axis.
ProductMeasure push_matrix(const ProductMeasure& mu, int axis, const Matrix& A);

// Q_k^{(x)q} F for F on E_k^q; the result lives on E_{k-1}^q.
TensorFunction tensor_kernel_apply(const FiniteFKModel& m, int k, int q, const TensorFunction& F);

// Sum of absolute atom values.
Rational tv_norm(const ProductMeasure& mu);

enum class OccupationMode { Tensor, Injective };
// m(x)^{(x)q} (all maps [q]->[N]) or m(x)^{(.)q} (injections), on dim^q.
ProductMeasure occupation_tensor(const std::vector<int>& x, int dim, int q, OccupationMode mode);

} // namespace fklab
