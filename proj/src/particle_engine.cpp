#include "fklab/particle_engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <thread>

namespace fklab {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

double keyed_uniform(std::uint64_t seed, std::uint64_t run, std::uint64_t time, std::uint64_t particle) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ run);
    h = splitmix64(h ^ time);
    h = splitmix64(h ^ particle);
    return (double)(h >> 11) * 0x1.0p-53;
}

static std::vector<double> to_doubles(const Vec& v) {
    std::vector<double> out;
    for (const auto& x : v) out.push_back(to_double(x));
    return out;
}

static int draw(const std::vector<double>& cdf, double u) {
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u * cdf.back());
    return it == cdf.end() ? (int)cdf.size() - 1 : (int)(it - cdf.begin());
}

ParticleTrajectory simulate(const FiniteFKModel& m, int N, int horizon, std::uint64_t seed, std::uint64_t run) {
    if (N < 1) throw DomainError("simulate: N must be positive");
    if (horizon < 0 || horizon > m.horizon()) throw DomainError("simulate: horizon outside the model");
    ParticleTrajectory t{N, seed, run, {}};
    std::vector<double> cdf = to_doubles(m.eta0);
    for (size_t i = 1; i < cdf.size(); ++i) cdf[i] += cdf[i - 1];
    std::vector<int> x(N);
    for (int i = 0; i < N; ++i) x[i] = draw(cdf, keyed_uniform(seed, run, 0, i));
    t.states.push_back(x);
    for (int k = 1; k <= horizon; ++k) {
        auto G = to_doubles(m.G(k - 1));
        const Matrix& M = m.M(k);
        std::vector<double> cnt(m.levels[k - 1], 0);
        for (int s : x) cnt[s] += 1;
        std::vector<double> w(m.levels[k], 0);
        for (int a = 0; a < m.levels[k - 1]; ++a) {
            if (cnt[a] == 0) continue;
            for (int b = 0; b < m.levels[k]; ++b) w[b] += cnt[a] * G[a] * to_double(M[a][b]);
        }
        for (size_t i = 1; i < w.size(); ++i) w[i] += w[i - 1];
        for (int i = 0; i < N; ++i) x[i] = draw(w, keyed_uniform(seed, run, k, i));
        t.states.push_back(x);
    }
    return t;
}

std::vector<int> occupancy_counts(const ParticleTrajectory& t, int k, int dim) {
    std::vector<int> c(dim, 0);
    for (int s : t.states.at(k)) c.at(s) += 1;
    return c;
}

EmpiricalMeasures empirical_measures(const FiniteFKModel& m, const ParticleTrajectory& t) {
    EmpiricalMeasures e;
    double norm = 1;
    for (size_t k = 0; k < t.states.size(); ++k) {
        auto c = occupancy_counts(t, (int)k, m.levels[k]);
        std::vector<double> eta(c.size());
        for (size_t s = 0; s < c.size(); ++s) eta[s] = (double)c[s] / t.N;
        e.gammaN_normalizer.push_back(norm);
        double g = 0;
        for (size_t s = 0; s < c.size(); ++s) g += eta[s] * to_double(m.G((int)k)[s]);
        norm *= g;
        e.eta_N.push_back(eta);
    }
    return e;
}

double u_statistic(const ParticleTrajectory& t, int n, const TensorFunction& F) {
    int q = (int)F.dims.size();
    if (q > t.N) throw DomainError("u_statistic: q > N");
    int d = F.dims.empty() ? 0 : F.dims[0];
    auto c = occupancy_counts(t, n, d);
    double denom = 1;
    for (int i = 0; i < q; ++i) denom *= (double)(t.N - i);
    double s = 0;
    std::vector<int> used(d);
    for (size_t idx = 0; idx < F.values.size(); ++idx) {
        if (F.values[idx] == 0) continue;
        auto x = unflatten(idx, F.dims);
        std::fill(used.begin(), used.end(), 0);
        double w = 1;
        for (int v : x) w *= (double)(c[v] - used[v]++);
        if (w != 0) s += w * to_double(F.values[idx]);
    }
    return s / denom;
}

Estimate summarize(const std::vector<double>& v) {
    Estimate e;
    e.runs = (int)v.size();
    if (v.empty()) return e;
    double s = 0;
    for (double x : v) s += x;
    e.mean = s / v.size();
    if (v.size() > 1) {
        double ss = 0;
        for (double x : v) ss += (x - e.mean) * (x - e.mean);
        e.stderr_ = std::sqrt(ss / (v.size() - 1) / v.size());
    }
    return e;
}

int worker_count() {
    int hw = (int)std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("FKLAB_THREADS")) {
        int cap = std::atoi(env);
        if (cap >= 1) return std::min(cap, hw);
    }
    return hw;
}

std::vector<double> parallel_runs(int runs, const std::function<double(int)>& fn) {
    std::vector<double> out(std::max(runs, 0));
    int workers = std::min(worker_count(), std::max(runs, 1));
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            try {
                for (int r = w; r < runs; r += workers) out[r] = fn(r);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

std::vector<double> gamma_samples(const FiniteFKModel& m, int N, int n, int runs, std::uint64_t seed, const Vec& f) {
    auto fd = to_doubles(f);
    return parallel_runs(runs, [&](int r) {
        auto t = simulate(m, N, n, seed, r);
        auto e = empirical_measures(m, t);
        double v = 0;
        for (size_t s = 0; s < fd.size(); ++s) v += e.eta_N[n][s] * fd[s];
        return e.gammaN_normalizer[n] * v;
    });
}

static void require_homogeneous(const FiniteFKModel& m) {
    if (!m.homogeneous()) throw DomainError("estimator needs a time-homogeneous model");
}

std::vector<double> lambda_samples(const FiniteFKModel& m, int N, int n, int runs, std::uint64_t seed) {
    require_homogeneous(m);
    auto G = to_doubles(m.G(0));
    return parallel_runs(runs, [&](int r) {
        auto e = empirical_measures(m, simulate(m, N, n, seed, r));
        double s = 0;
        for (int p = 0; p <= n; ++p) {
            double g = 0;
            for (size_t x = 0; x < G.size(); ++x) g += e.eta_N[p][x] * G[x];
            s += std::log(g);
        }
        return -s / (n + 1);
    });
}

std::vector<double> ground_state_samples(const FiniteFKModel& m, int N, int n, int runs, std::uint64_t seed,
                                         const Vec& f) {
    require_homogeneous(m);
    auto G = to_doubles(m.G(0));
    auto fd = to_doubles(f);
    return parallel_runs(runs, [&](int r) {
        auto e = empirical_measures(m, simulate(m, N, n, seed, r));
        double s = 0;
        for (int p = 0; p <= n; ++p) {
            double num = 0, den = 0;
            for (size_t x = 0; x < G.size(); ++x) {
                num += e.eta_N[p][x] * G[x] * fd[x];
                den += e.eta_N[p][x] * G[x];
            }
            s += num / den;
        }
        return s / (n + 1);
    });
}

std::vector<double> u_statistic_samples(const FiniteFKModel& m, int N, int n, int runs, std::uint64_t seed,
                                        const TensorFunction& F) {
    return parallel_runs(runs, [&](int r) { return u_statistic(simulate(m, N, n, seed, r), n, F); });
}

Estimate estimate_lambda(const FiniteFKModel& m, int N, int n, int runs, std::uint64_t seed) {
    return summarize(lambda_samples(m, N, n, runs, seed));
}

Estimate estimate_ground_state(const FiniteFKModel& m, int N, int n, int runs, std::uint64_t seed, const Vec& f) {
    return summarize(ground_state_samples(m, N, n, runs, seed, f));
}

double lambda_reference(const FiniteFKModel& m, int n) {
    require_homogeneous(m);
    auto eta = flow_eta(m, n);
    double s = 0;
    for (int p = 0; p <= n; ++p) s += std::log(to_double(dot(eta[p], m.G(p))));
    return -s / (n + 1);
}

double ground_state_reference(const FiniteFKModel& m, int n, const Vec& f) {
    require_homogeneous(m);
    auto eta = flow_eta(m, n);
    Rational s = 0;
    for (int p = 0; p <= n; ++p) s += dot(eta[p], hadamard(m.G(p), f)) / dot(eta[p], m.G(p));
    return to_double(s) / (n + 1);
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_runs_csv(std::ostream& os, const std::string& quantity, const std::vector<double>& values) {
    os << "run_id,quantity,value\n";
    for (size_t r = 0; r < values.size(); ++r) os << r << ',' << quantity << ',' << format_double(values[r]) << '\n';
}

} // namespace fklab
