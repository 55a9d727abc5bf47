#pragma once

#include "fklab/fk_model.hpp"
#include "fklab/forest.hpp"
#include "fklab/tensor.hpp"

#include <functional>
#include <map>
#include <vector>

namespace fklab {

using Occupancy = std::vector<int>;

// Exact law of the occupancy chain of the N-particle model at times 0..n.
struct ConfigDistribution {
    int N = 0;
    std::vector<std::map<Occupancy, Rational>> levels;
};

constexpr size_t kMaxConfigsPerLevel = 10'000;

// All occupancy vectors over d cells summing to N, in lexicographic order.
std::vector<Occupancy> occupancies(int N, int d);
// Probability that N iid draws from law fall with the given occupancy.
Rational multinomial_probability(const Occupancy& c, const Vec& law);

ConfigDistribution dp_distribution(const FiniteFKModel& m, int N, int n);

// Multiplicative statistic f_k(c_k) of the occupancy at time k.
using OccupancyFactor = std::function<Rational(int time, const Occupancy& c)>;
// E[prod_{k<=n} f_k(c_k)] by forward weighted dynamic programming.
Rational dp_expected(const FiniteFKModel& m, int N, int n, const OccupancyFactor& f);

// eta^N(f) for the empirical measure of the occupancy.
Rational occupancy_mean(const Occupancy& c, const Vec& f);
// (eta^N)^{(x)q}(F) or (eta^N)^{(.)q}(F) straight from the occupancy, F on d^q.
Rational occupancy_tensor_value(const Occupancy& c, const TensorFunction& F, OccupationMode mode);

// E[(gamma^N_n)^{(x)q}(F)] for F on E_n^q.
Rational dp_q_measure(const FiniteFKModel& m, int N, int n, int q, const TensorFunction& F);
// E[prod_k gamma^N_k(1)^{q_k} (eta^N_k)^{(x)q_k}(F_k)]; the path function is F_0 (x) ... (x) F_n.
Rational dp_path_measure(const FiniteFKModel& m, int N, const std::vector<int>& q,
                         const std::vector<TensorFunction>& factors);
// E[(eta^N_n)^{(.)q}(F)], the law of q distinct particles at time n.
Rational dp_block_law(const FiniteFKModel& m, int N, int n, int q, const TensorFunction& F,
                      OccupationMode mode = OccupationMode::Injective);
// E[(1 - gamma^N_{n+1}(1)/gamma_{n+1}(1))^q], i.e. the normalizer product through time n.
Rational dp_normalizer_moment(const FiniteFKModel& m, int N, int n, int q);

// N^{-q(n+1)} sum over all map sequences of ((N)_{|a|}/(q)_{|a|}) Delta^a(F).
Rational brute_a_sum(const FiniteFKModel& m, int N, int n, int q, const TensorFunction& F);
// Delta^a(F) summed over all map sequences with the same image sizes.
std::map<std::vector<int>, Rational> brute_a_grouped(const FiniteFKModel& m, int n, int q, const TensorFunction& F);
// Delta^a(F) by backward evaluation, independent of the expansion module.
Rational brute_delta(const FiniteFKModel& m, const std::vector<std::vector<int>>& a, const TensorFunction& F);

// Number of level permutations fixing the jungle, by exhaustive search.
BigInt brute_stabilizer(const Jungle& j, size_t limit = 1'000'000);

// Pair covariance of the limiting field at time n: sum_{k<=n} gamma_k(1) gamma_k(Q_{k,n}phi Q_{k,n}psi).
Rational gaussian_covariance(const FiniteFKModel& m, int n, const Vec& phi, const Vec& psi);
// Same between times a and b: sum_{k<=min(a,b)} gamma_k(1) gamma_k(Q_{k,a}phi Q_{k,b}psi).
Rational gaussian_covariance(const FiniteFKModel& m, int a, const Vec& phi, int b, const Vec& psi);

// Sum over pair partitions of [q] of prod C(i,j).
Rational gaussian_moment(const Matrix& C);

} // namespace fklab
