#include "fklab/fk_model.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace fklab {

const Matrix& FiniteFKModel::M(int k) const {
    if (k < 1 || k > horizon()) throw DomainError("kernel index out of range");
    return kernels[k - 1];
}

const Vec& FiniteFKModel::G(int k) const {
    if (k < 0 || k > horizon()) throw DomainError("potential index out of range");
    return potentials[k];
}

Matrix FiniteFKModel::Q(int k) const {
    Matrix q = M(k);
    const Vec& g = G(k - 1);
    for (size_t x = 0; x < q.size(); ++x)
        for (auto& v : q[x]) v *= g[x];
    return q;
}

bool FiniteFKModel::homogeneous() const {
    for (int k = 1; k <= horizon(); ++k)
        if (levels[k] != levels[0] || potentials[k] != potentials[0]) return false;
    for (int k = 2; k <= horizon(); ++k)
        if (kernels[k - 1] != kernels[0]) return false;
    return true;
}

void FiniteFKModel::validate() const {
    if (levels.empty()) throw DomainError("model has no levels");
    for (int s : levels)
        if (s <= 0) throw DomainError("level sizes must be positive");
    int n = horizon();
    if ((int)eta0.size() != levels[0]) throw DomainError("eta0 length does not match level 0");
    Rational total = 0;
    for (const auto& v : eta0) {
        if (v < 0) throw DomainError("eta0 has a negative entry");
        total += v;
    }
    if (total != 1) throw DomainError("eta0 does not sum to 1");
    if ((int)kernels.size() != n) throw DomainError("expected one kernel per transition");
    for (int k = 1; k <= n; ++k) {
        const Matrix& m = kernels[k - 1];
        if ((int)m.size() != levels[k - 1]) throw DomainError("kernel row count mismatch at k=" + std::to_string(k));
        for (const auto& row : m) {
            if ((int)row.size() != levels[k]) throw DomainError("kernel column count mismatch at k=" + std::to_string(k));
            Rational s = 0;
            for (const auto& v : row) {
                if (v < 0) throw DomainError("kernel has a negative entry");
                s += v;
            }
            if (s != 1) throw DomainError("kernel row does not sum to 1 at k=" + std::to_string(k));
        }
    }
    if ((int)potentials.size() != n + 1) throw DomainError("expected one potential per level");
    for (int k = 0; k <= n; ++k) {
        if ((int)potentials[k].size() != levels[k]) throw DomainError("potential length mismatch at k=" + std::to_string(k));
        for (const auto& v : potentials[k])
            if (v <= 0) throw DomainError("potentials must be strictly positive (k=" + std::to_string(k) + ")");
    }
}

std::vector<Vec> flow_eta(const FiniteFKModel& m, int n) {
    if (n < 0 || n > m.horizon()) throw DomainError("flow_eta: time beyond horizon");
    std::vector<Vec> eta{m.eta0};
    for (int k = 0; k < n; ++k) {
        Vec w = hadamard(eta[k], m.G(k));
        Rational z = vec_sum(w);
        Vec next = vec_mat(w, m.M(k + 1));
        for (auto& v : next) v /= z;
        eta.push_back(std::move(next));
    }
    return eta;
}

GammaFlow flow_gamma(const FiniteFKModel& m, int n) {
    auto eta = flow_eta(m, n);
    GammaFlow out;
    Rational z = 1;
    for (int k = 0; k <= n; ++k) {
        out.normalizers.push_back(z);
        Vec g = eta[k];
        for (auto& v : g) v *= z;
        out.gamma.push_back(std::move(g));
        z *= dot(eta[k], m.G(k));
    }
    return out;
}

Matrix identity(int d) {
    Matrix I(d, Vec(d, 0));
    for (int i = 0; i < d; ++i) I[i][i] = 1;
    return I;
}

Matrix semigroup(const FiniteFKModel& m, int p, int n) {
    if (p < 0 || p > n || n > m.horizon()) throw DomainError("semigroup: need 0 <= p <= n <= horizon");
    Matrix r = identity(m.levels[p]);
    for (int k = p + 1; k <= n; ++k) r = mat_mul(r, m.Q(k));
    return r;
}

Matrix mat_mul(const Matrix& a, const Matrix& b) {
    size_t rows = a.size(), inner = b.size(), cols = inner ? b[0].size() : 0;
    Matrix c(rows, Vec(cols, 0));
    for (size_t i = 0; i < rows; ++i)
        for (size_t k = 0; k < inner; ++k) {
            if (a[i][k] == 0) continue;
            for (size_t j = 0; j < cols; ++j) c[i][j] += a[i][k] * b[k][j];
        }
    return c;
}

Vec mat_vec(const Matrix& a, const Vec& f) {
    Vec r(a.size(), 0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < f.size(); ++j) r[i] += a[i][j] * f[j];
    return r;
}

Vec vec_mat(const Vec& mu, const Matrix& a) {
    size_t cols = a.empty() ? 0 : a[0].size();
    Vec r(cols, 0);
    for (size_t i = 0; i < mu.size(); ++i) {
        if (mu[i] == 0) continue;
        for (size_t j = 0; j < cols; ++j) r[j] += mu[i] * a[i][j];
    }
    return r;
}

Rational dot(const Vec& a, const Vec& b) {
    Rational s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

Vec hadamard(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] * b[i];
    return r;
}

Rational vec_sum(const Vec& a) {
    Rational s = 0;
    for (const auto& v : a) s += v;
    return s;
}

static FiniteFKModel homogeneous_model(const Vec& eta0, const Matrix& kernel, const Vec& g, int horizon) {
    FiniteFKModel m;
    int d = (int)eta0.size();
    m.levels.assign(horizon + 1, d);
    m.eta0 = eta0;
    m.kernels.assign(horizon, kernel);
    m.potentials.assign(horizon + 1, g);
    return m;
}

FiniteFKModel ref2_model(int horizon) {
    Rational h(1, 2);
    return homogeneous_model({h, h}, {{h, h}, {h, h}}, {Rational(1), h}, horizon);
}

FiniteFKModel ref2b_model(int horizon) {
    Rational a(2, 3), b(1, 3);
    Rational h(1, 2);
    return homogeneous_model({h, h}, {{a, b}, {b, a}}, {Rational(1), h}, horizon);
}

FiniteFKModel unit_potential_model(const Matrix& kernel, const Vec& eta0, int horizon) {
    return homogeneous_model(eta0, kernel, Vec(eta0.size(), Rational(1)), horizon);
}

using nlohmann::json;

static Rational json_rational(const json& j) {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(BigInt(std::to_string(j.get<long long>())));
    throw DomainError("rational must be a \"p/q\" string or an integer");
}

FiniteFKModel model_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw DomainError(std::string("model JSON parse error: ") + e.what());
    }
    FiniteFKModel m;
    try {
        for (const auto& v : j.at("levels")) m.levels.push_back(v.get<int>());
        for (const auto& v : j.at("eta0")) m.eta0.push_back(json_rational(v));
        for (const auto& mat : j.at("kernels")) {
            Matrix M;
            for (const auto& row : mat) {
                Vec r;
                for (const auto& v : row) r.push_back(json_rational(v));
                M.push_back(std::move(r));
            }
            m.kernels.push_back(std::move(M));
        }
        for (const auto& g : j.at("potentials")) {
            Vec r;
            for (const auto& v : g) r.push_back(json_rational(v));
            m.potentials.push_back(std::move(r));
        }
    } catch (const json::exception& e) {
        throw DomainError(std::string("model JSON schema error: ") + e.what());
    }
    m.validate();
    return m;
}

FiniteFKModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open model file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return model_from_json_text(ss.str());
}

std::string model_to_json_text(const FiniteFKModel& m) {
    json j;
    j["levels"] = m.levels;
    auto vec = [](const Vec& v) {
        json a = json::array();
        for (const auto& x : v) a.push_back(to_string(x));
        return a;
    };
    j["eta0"] = vec(m.eta0);
    j["kernels"] = json::array();
    for (const auto& M : m.kernels) {
        json mat = json::array();
        for (const auto& row : M) mat.push_back(vec(row));
        j["kernels"].push_back(mat);
    }
    j["potentials"] = json::array();
    for (const auto& g : m.potentials) j["potentials"].push_back(vec(g));
    return j.dump(2) + "\n";
}

} // namespace fklab
