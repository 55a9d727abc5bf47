#pragma once

#include "fklab/exact_num.hpp"

#include <string>
#include <vector>

namespace fklab {

using Vec = std::vector<Rational>;
using Matrix = std::vector<Vec>;

// States of level k are 0..levels[k]-1. kernels[k-1] is M_k : E_{k-1} -> E_k,
// potentials[k] is G_k on E_k.
struct FiniteFKModel {
    std::vector<int> levels;
    Vec eta0;
    std::vector<Matrix> kernels;
    std::vector<Vec> potentials;

    int horizon() const { return (int)levels.size() - 1; }
    const Matrix& M(int k) const;
    const Vec& G(int k) const;
    // Q_k(x,y) = G_{k-1}(x) M_k(x,y)
    Matrix Q(int k) const;
    bool homogeneous() const;
    // Throws DomainError describing the first violated invariant.
    void validate() const;
};

struct GammaFlow {
    std::vector<Rational> normalizers; // gamma_k(1)
    std::vector<Vec> gamma;            // gamma_k as vectors
};

std::vector<Vec> flow_eta(const FiniteFKModel& m, int n);
GammaFlow flow_gamma(const FiniteFKModel& m, int n);
// Q_{p,n} = Q_{p+1} ... Q_n, identity when p == n.
Matrix semigroup(const FiniteFKModel& m, int p, int n);

Matrix identity(int d);
Matrix mat_mul(const Matrix& a, const Matrix& b);
Vec mat_vec(const Matrix& a, const Vec& f); // (A f)(x) = sum_y A(x,y) f(y)
Vec vec_mat(const Vec& mu, const Matrix& a); // (mu A)(y) = sum_x mu(x) A(x,y)
Rational dot(const Vec& a, const Vec& b);
Vec hadamard(const Vec& a, const Vec& b);
Rational vec_sum(const Vec& a);

// Built-in fixtures; the bundled JSON files under fixtures/ hold the same data.
FiniteFKModel ref2_model(int horizon = 4);
FiniteFKModel ref2b_model(int horizon = 4);
// Homogeneous model with constant potential 1 and the given kernel.
FiniteFKModel unit_potential_model(const Matrix& kernel, const Vec& eta0, int horizon);

// JSON schema: {"levels":[..], "eta0":[..], "kernels":[[[..]]], "potentials":[[..]]}
FiniteFKModel model_from_json_text(const std::string& text);
FiniteFKModel load_model(const std::string& path);
std::string model_to_json_text(const FiniteFKModel& m);

} // namespace fklab
