#pragma once

#include "fklab/expansion.hpp"

#include <map>
#include <optional>
#include <tuple>
#include <vector>

namespace fklab {

// Block sizes q_0..q_n of a path tensor space, with q'_m = sum_{k>m} q_k.
struct QSeq {
    MultiIndex q;
    MultiIndex qp;
    long abs_qp = 0; // sum_k (k+1) q_k
    int n() const { return (int)q.size() - 1; }
    int total() const;
};

QSeq q_prime(const MultiIndex& q);
// Level L holds q_{L-1} whites and q'_{L-1} blacks, with q_{-1} = 0 and q'_{-1} = |q|.
LevelProfile colored_profile(const QSeq& q);
// Coordinate sizes of E_0^{q_0} x ... x E_n^{q_n}.
std::vector<int> path_dims(const FiniteFKModel& m, const QSeq& q);
// Nonzero block sizes, for block symmetrization.
std::vector<int> path_blocks(const QSeq& q);

// Optional filter: coalescences per level at most max_coal.
std::vector<Forest> enumerate_colored_forests(const QSeq& q, const std::optional<MultiIndex>& max_coal = std::nullopt);
std::vector<Forest> enumerate_colored_forests_brute(const QSeq& q);
BigInt count_colored_jungles(const Forest& f, const QSeq& q);
ProductMeasure delta_colored(const FiniteFKModel& m, const Forest& f, const QSeq& q);

struct PathTable {
    QSeq q;
    std::vector<ForestTerm> terms;
};
PathTable path_table(const FiniteFKModel& m, const QSeq& q);

// (x)_k gamma_k^{(x)q_k}
ProductMeasure path_limit(const FiniteFKModel& m, const QSeq& q);
// E[prod_k gamma^N_k(1)^{q_k} (eta^N_k)^{(x)q_k}], through the forest sum.
Rational qbar_exact(const PathTable& t, int N, const TensorFunction& F);
Rational qbar_exact(const FiniteFKModel& m, int N, const QSeq& q, const TensorFunction& F);
// All orders k of the expansion in 1/N.
std::vector<Rational> qbar_orders(const PathTable& t, const TensorFunction& F);
std::vector<ProductMeasure> qbar_measures(const PathTable& t);
Rational dqbar(const FiniteFKModel& m, int k, const QSeq& q, const TensorFunction& F);

// Block symmetric and every block integrates to zero in one coordinate against gamma_k.
bool in_B0_path(const FiniteFKModel& m, const QSeq& q, const TensorFunction& F);

// Colored pair forests: t counts trees with a coalescence at level k and white
// leaves closing the time blocks l <= m.
using TripleCounts = std::map<std::tuple<int, int, int>, int>;
Tree colored_pair_tree(int k, int l, int m);
Forest colored_wick_forest(const TripleCounts& t);
struct ColoredWickTerm {
    TripleCounts t;
    Rational coefficient;
    Forest forest;
    Rational delta;
};
struct ColoredWickResult {
    int order = 0;
    Rational value;
    std::vector<ColoredWickTerm> terms;
};
// Order |q|/2; zero for odd |q|. Throws DomainError outside B0.
ColoredWickResult colored_wick(const FiniteFKModel& m, const QSeq& q, const TensorFunction& F);

// (eta_k(G_k) - G_k) / gamma_k(G_k)
Vec centered_potential(const FiniteFKModel& m, int k);
// Both sides of 1 - prod_{p<=n} m_p(G_p)/eta_p(G_p) = sum_k gamma^m_k(Gbar_k) for
// arbitrary probability vectors m_0..m_n.
std::pair<Rational, Rational> normalizer_telescoping(const FiniteFKModel& m, const std::vector<Vec>& emp);
// Coefficients of N^{-k} of E[(1 - gamma^N_{n+1}(1)/gamma_{n+1}(1))^q].
std::vector<Rational> e_moments(const FiniteFKModel& m, int n, int q);

// (F - eta_{n+1}^{(x)q}(F)) / gamma_{n+1}(1)^q, F on E_{n+1}^q.
TensorFunction centered_terminal(const FiniteFKModel& m, int n_plus_1, const TensorFunction& F);
// Gbar_0^{p_0} (x) ... (x) (Gbar_n^{p_n} (x) Q_{n+1}^{(x)q} Fbar)_sym with n = |p|-1.
TensorFunction s_operator(const FiniteFKModel& m, const MultiIndex& p, int q, const TensorFunction& F);

enum class PMode { Symmetric, Tensor };
// k-th coefficient of E[(eta^N_{n+1})^{(.)q}(F)] (Symmetric) or of
// E[(eta^N_{n+1})^{(x)q}(F)] (Tensor).
Rational p_derivative(const FiniteFKModel& m, int k, int n_plus_1, int q, const TensorFunction& F,
                      PMode mode = PMode::Symmetric);
// First order through the two integral formulas, without forests.
Rational p1_explicit(const FiniteFKModel& m, int n_plus_1, int q, const TensorFunction& F);

// Both sides of 1/(1-u)^{q+1} = sum_{k<=m} (q+k)!/(q! k!) u^k
//   + u^m sum_{1<=k<=q+1} C(q+1+m, k+m) (u/(1-u))^k.
std::pair<Rational, Rational> geometric_split(int q, int m, const Rational& u);

} // namespace fklab
