#pragma once

#include "fklab/fk_model.hpp"
#include "fklab/tensor.hpp"

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace fklab {

// Counter-based stream: SplitMix64 finalizer over (seed, run, time, particle).
std::uint64_t splitmix64(std::uint64_t x);
double keyed_uniform(std::uint64_t seed, std::uint64_t run, std::uint64_t time, std::uint64_t particle);

struct ParticleTrajectory {
    int N = 0;
    std::uint64_t seed = 0;
    std::uint64_t run = 0;
    std::vector<std::vector<int>> states; // states[k][i] in E_k
};

// Selection and mutation fused into one inverse-CDF draw from Phi_k(m(xi_{k-1})).
ParticleTrajectory simulate(const FiniteFKModel& m, int N, int horizon, std::uint64_t seed, std::uint64_t run = 0);

struct EmpiricalMeasures {
    std::vector<std::vector<double>> eta_N;
    std::vector<double> gammaN_normalizer; // prod_{p<k} eta^N_p(G_p)
};
EmpiricalMeasures empirical_measures(const FiniteFKModel& m, const ParticleTrajectory& t);
std::vector<int> occupancy_counts(const ParticleTrajectory& t, int k, int dim);

// (eta^N_n)^{(.)q}(F) through occupancy counts; F is read as a symmetric function.
double u_statistic(const ParticleTrajectory& t, int n, const TensorFunction& F);

struct Estimate {
    double mean = 0;
    double stderr_ = 0;
    int runs = 0;
};
Estimate summarize(const std::vector<double>& values);

// Evaluates fn(run) for run = 0..runs-1 on up to FKLAB_THREADS workers; results in run order.
std::vector<double> parallel_runs(int runs, const std::function<double(int)>& fn);
int worker_count();

// gamma^N_n(f) per run
std::vector<double> gamma_samples(const FiniteFKModel& m, int N, int n, int runs, std::uint64_t seed, const Vec& f);
// -(1/(n+1)) sum_{p<=n} log eta^N_p(G) per run; homogeneous models only
std::vector<double> lambda_samples(const FiniteFKModel& m, int N, int n, int runs, std::uint64_t seed);
// (1/(n+1)) sum_{p<=n} eta^N_p(Gf)/eta^N_p(G) per run; homogeneous models only
std::vector<double> ground_state_samples(const FiniteFKModel& m, int N, int n, int runs, std::uint64_t seed,
                                         const Vec& f);
std::vector<double> u_statistic_samples(const FiniteFKModel& m, int N, int n, int runs, std::uint64_t seed,
                                        const TensorFunction& F);

Estimate estimate_lambda(const FiniteFKModel& m, int N, int n, int runs, std::uint64_t seed);
Estimate estimate_ground_state(const FiniteFKModel& m, int N, int n, int runs, std::uint64_t seed, const Vec& f);
// The same averages along the exact flow.
double lambda_reference(const FiniteFKModel& m, int n);
double ground_state_reference(const FiniteFKModel& m, int n, const Vec& f);

// 17 significant digits
std::string format_double(double v);
// run_id,quantity,value
void write_runs_csv(std::ostream& os, const std::string& quantity, const std::vector<double>& values);

} // namespace fklab
