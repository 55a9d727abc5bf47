#pragma once

#include "fklab/fk_model.hpp"
#include "fklab/forest.hpp"
#include "fklab/tensor.hpp"

#include <map>
#include <optional>
#include <vector>

namespace fklab {

// Formal combination of maps [q] -> [q] (0-based), acting through D.
struct WeightedMapCombo {
    int q = 0;
    std::map<std::vector<int>, Rational> terms;

    Rational total_weight() const;
};

WeightedMapCombo l_operator(int N, int q);
WeightedMapCombo dl_operator(int k, int q);
WeightedMapCombo combo_add(const WeightedMapCombo& a, const WeightedMapCombo& b);
WeightedMapCombo combo_scale(const WeightedMapCombo& a, const Rational& c);
// D_u F
TensorFunction combo_apply(const WeightedMapCombo& u, const TensorFunction& F);
// mu D_u, the measure F -> mu(D_u F)
ProductMeasure combo_push(const ProductMeasure& mu, const WeightedMapCombo& u);

// Forward evaluation of the operator chain indexed by a jungle. Level L blacks
// carry time L values; the whites of level L+1 freeze the time L block; the
// blacks of the top level are the last block. Output coordinates are ordered
// by time.
ProductMeasure delta_measure(const FiniteFKModel& m, const Jungle& j);
// Same through a representative, then block-symmetrized.
ProductMeasure delta_measure(const FiniteFKModel& m, const Forest& f, const LevelProfile& p,
                             const std::vector<int>& blocks = {});
// Uncolored Delta^f_{n,q}.
ProductMeasure delta_measure(const FiniteFKModel& m, const Forest& f, int n, int q);

struct ForestTerm {
    Forest forest;
    std::vector<int> image; // |f| per level 0..n
    BigInt count;           // #(f)
    ProductMeasure delta;
};

// Every forest of F_{n,q} with its orbit size and Delta measure.
struct ForestTable {
    int n = 0;
    int q = 0;
    std::vector<ForestTerm> terms;
};
ForestTable forest_table(const FiniteFKModel& m, int n, int q);

// Polynomial in 1/N: entry k is the coefficient of N^{-k} of
// N^{-sum R_j} prod_j (N)_{p_j}/(R_j)_{p_j}, with R_j the level sizes and p_j
// the image sizes.
std::vector<Rational> falling_weight_orders(const std::vector<int>& image, const std::vector<int>& ranges);
// prod_j (N)_{p_j} / ((R_j)_{p_j} N^{R_j})
Rational falling_weight(int N, const std::vector<int>& image, const std::vector<int>& ranges);

Rational q_exact(const FiniteFKModel& m, int N, int n, int q, const TensorFunction& F);
Rational q_exact(const ForestTable& t, int N, const TensorFunction& F);
ProductMeasure q_exact_measure(const ForestTable& t, int N);

// Orders 0..(q-1)(n+1) of the expansion; values on F, or the signed measures.
std::vector<Rational> laurent_table(const FiniteFKModel& m, int n, int q, const TensorFunction& F);
std::vector<Rational> laurent_table(const ForestTable& t, const TensorFunction& F);
std::vector<ProductMeasure> laurent_measures(const ForestTable& t);
// sum_k N^{-k} a_k
Rational evaluate_orders(const std::vector<Rational>& orders, int N);

// Builders for the forests of the low order closed forms; H = n+1.
Forest forest_one_coalescence(int n, int q, int k);
Forest forest_triple_branch(int n, int q, int k);
Forest forest_two_pairs(int n, int q, int k);
// variant 1..4 for two coalescences at levels k < l
Forest forest_two_levels(int n, int q, int k, int l, int variant);
// T_k^{r_k} U_k^{r_k} over all k
Forest wick_forest(const std::vector<int>& r);

struct LowOrders {
    Rational d0;
    Rational d1;
    std::optional<Rational> d2; // only for q >= 4
};
LowOrders low_order_closed_form(const FiniteFKModel& m, int n, int q, const TensorFunction& F);

struct TvRow {
    int N = 0;
    Rational value;  // N tv(Q^N - gamma^{(x)q})
    Rational bound;  // (n+1) q (q-1)
    bool increased = false; // larger than the previous row
};
std::vector<TvRow> tv_limit_check(const FiniteFKModel& m, int n, int q, const std::vector<int>& Ns);

// F symmetric and integrating its last coordinate against gamma_n gives 0.
bool in_B0(const FiniteFKModel& m, int n, const TensorFunction& F);

struct WickTerm {
    std::vector<int> r;
    Rational coefficient;
    Forest forest;
    Rational delta;
};
struct WickResult {
    int order = 0;
    Rational value;
    std::vector<WickTerm> terms;
};
// Order q/2 through pair forests; zero for odd q. Throws DomainError outside B0.
WickResult wick_derivative(const FiniteFKModel& m, int n, int q, const TensorFunction& F);

} // namespace fklab
