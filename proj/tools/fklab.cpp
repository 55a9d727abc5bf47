// Command line front end: forests, series, expansions, simulation, verification.
#include "CLI11.hpp"
#include "json.hpp"

#include "fklab/acceptance.hpp"
#include "fklab/expansion.hpp"
#include "fklab/hilbert.hpp"
#include "fklab/particle_engine.hpp"
#include "fklab/path_expansion.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

using namespace fklab;
using nlohmann::json;

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Header plus rows of already formatted cells.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

void emit(const Table& t, const std::string& format, std::ostream& os) {
    if (format == "json") {
        json a = json::array();
        for (const auto& r : t.rows) {
            json o;
            for (size_t i = 0; i < t.header.size(); ++i) o[t.header[i]] = r[i];
            a.push_back(o);
        }
        os << a.dump(2) << '\n';
        return;
    }
    auto line = [&](const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) {
            if (i) os << ',';
            const auto& c = cells[i];
            if (c.find_first_of(",\"\n") != std::string::npos) {
                os << '"';
                for (char ch : c) os << (ch == '"' ? "\"\"" : std::string(1, ch));
                os << '"';
            } else {
                os << c;
            }
        }
        os << '\n';
    };
    line(t.header);
    for (const auto& r : t.rows) line(r);
}

std::vector<int> parse_ints(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            size_t pos = 0;
            out.push_back(std::stoi(item, &pos));
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("not an integer list: " + s);
        }
    }
    return out;
}

Vec parse_vec(const std::string& s) {
    Vec v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) v.push_back(parse_rational(item));
    return v;
}

std::string join(const std::vector<int>& v, char sep = ';') {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) s += (i ? std::string(1, sep) : "") + std::to_string(v[i]);
    return s;
}

std::string point_label(const TensorFunction& F) {
    // orbit indicators are labelled by their first support point
    for (size_t i = 0; i < F.values.size(); ++i)
        if (F.values[i] != 0) return join(unflatten(i, F.dims));
    return "zero";
}

struct Options {
    std::string model_path;
    std::string output;
    std::string format = "csv";
    int n = 1;
    int q = 2;
    std::string qseq;
    std::string Ns;
    std::string max_coal;
    int degree = 6;
    int total = -1;
    bool coalescent = false;
    std::string forest;
    std::string product;
    std::string function_file;
    bool closed_form = false;
    bool wick = false;
    std::string mode = "qbar";
    int order = 1;
    bool tilde = false;
    int N = 10;
    int runs = 100;
    std::uint64_t seed = 1;
    std::string quantity = "gamma";
    std::string f;
    std::string suite = "all";
};

FiniteFKModel get_model(const Options& o) { return o.model_path.empty() ? ref2_model() : load_model(o.model_path); }

// Symmetrized product from "a,b;c,d" or the dense JSON {"dims":[..],"values":[..]}.
std::vector<std::pair<std::string, TensorFunction>> functions(const Options& o, const std::vector<int>& block_dims,
                                                              const std::vector<int>& block_sizes) {
    std::vector<int> dims;
    for (size_t k = 0; k < block_dims.size(); ++k)
        for (int i = 0; i < block_sizes[k]; ++i) dims.push_back(block_dims[k]);
    if (!o.function_file.empty()) {
        std::ifstream in(o.function_file);
        if (!in) throw ConfigError("cannot open function file " + o.function_file);
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw ConfigError(std::string("function file: ") + e.what());
        }
        TensorFunction F;
        F.dims = j.at("dims").get<std::vector<int>>();
        for (const auto& v : j.at("values")) F.values.push_back(v.is_string() ? parse_rational(v.get<std::string>()) : Rational(v.get<long>()));
        if (F.dims != dims || F.values.size() != space_size(dims)) throw ConfigError("function file does not fit the space");
        return {{"file", symmetrize(F, block_sizes)}};
    }
    if (!o.product.empty()) {
        std::vector<Vec> fs;
        std::stringstream ss(o.product);
        std::string item;
        while (std::getline(ss, item, ';')) fs.push_back(parse_vec(item));
        if (fs.size() != dims.size()) throw ConfigError("--product needs one vector per coordinate");
        for (size_t i = 0; i < fs.size(); ++i)
            if ((int)fs[i].size() != dims[i]) throw ConfigError("--product vector length mismatch");
        return {{"product", symmetrize(product_function(fs), block_sizes)}};
    }
    std::vector<std::pair<std::string, TensorFunction>> out;
    for (auto& F : block_symmetric_basis(block_dims, block_sizes)) out.emplace_back(point_label(F), F);
    return out;
}

Table cmd_enumerate(const Options& o) {
    Table t{{"id", "forest", "count", "coalescence", "degree"}, {}};
    std::vector<Forest> fs;
    LevelProfile prof;
    if (!o.qseq.empty()) {
        auto q = q_prime(parse_ints(o.qseq));
        prof = colored_profile(q);
        std::optional<MultiIndex> mc;
        if (!o.max_coal.empty()) mc = parse_ints(o.max_coal);
        fs = enumerate_colored_forests(q, mc);
    } else {
        prof = uncolored_profile(o.n, o.q);
        std::optional<MultiIndex> mc;
        if (!o.max_coal.empty()) mc = parse_ints(o.max_coal);
        fs = enumerate_forests(o.n, o.q, mc);
    }
    int id = 0;
    for (const auto& f : fs) {
        auto c = coalescence_data(f, prof.height());
        t.rows.push_back({std::to_string(id++), f.text(), count_jungles(f, prof).get_str(), join(c.sequence),
                          std::to_string(c.degree)});
    }
    return t;
}

Table cmd_hilbert(const Options& o) {
    auto s = o.coalescent ? coalescent_hilbert(o.n, o.degree, o.total) : forest_hilbert(o.n, o.degree, o.total);
    Table t{{"x_exponents", "y_exponents", "coefficient"}, {}};
    for (const auto& [e, v] : s.coeffs) {
        if (v == 0) continue;
        std::vector<int> x(e.begin(), e.begin() + s.nx), y(e.begin() + s.nx, e.end());
        t.rows.push_back({join(x), join(y), v.get_str()});
    }
    return t;
}

Table cmd_count(const Options& o) {
    if (o.forest.empty()) throw ConfigError("count-jungles needs --forest");
    Forest f = parse_forest(o.forest);
    LevelProfile prof = o.qseq.empty() ? uncolored_profile(o.n, o.q) : colored_profile(q_prime(parse_ints(o.qseq)));
    Table t{{"forest", "count", "stabilizer"}, {}};
    t.rows.push_back({f.text(), count_jungles(f, prof).get_str(), stabilizer_order(f).get_str()});
    return t;
}

Table cmd_expand(const Options& o) {
    auto m = get_model(o);
    Table t{{"kind", "index", "function", "value"}, {}};
    auto table = forest_table(m, o.n, o.q);
    for (const auto& [label, F] : functions(o, {m.levels.at(o.n)}, {o.q})) {
        auto orders = laurent_table(table, F);
        for (size_t k = 0; k < orders.size(); ++k) t.rows.push_back({"order", std::to_string(k), label, to_string(orders[k])});
        if (!o.Ns.empty())
            for (int N : parse_ints(o.Ns)) t.rows.push_back({"exact", std::to_string(N), label, to_string(q_exact(table, N, F))});
        if (o.closed_form) {
            auto lo = low_order_closed_form(m, o.n, o.q, F);
            t.rows.push_back({"closed", "0", label, to_string(lo.d0)});
            t.rows.push_back({"closed", "1", label, to_string(lo.d1)});
            if (lo.d2) t.rows.push_back({"closed", "2", label, to_string(*lo.d2)});
        }
        if (o.wick) {
            auto w = wick_derivative(m, o.n, o.q, F);
            t.rows.push_back({"wick", std::to_string(w.order), label, to_string(w.value)});
        }
    }
    return t;
}

Table cmd_path(const Options& o) {
    auto m = get_model(o);
    Table t{{"kind", "index", "function", "value"}, {}};
    if (o.mode == "qbar") {
        if (o.qseq.empty()) throw ConfigError("path-expand qbar needs --q-seq");
        auto q = q_prime(parse_ints(o.qseq));
        std::vector<int> bd, bs;
        for (int k = 0; k <= q.n(); ++k)
            if (q.q[k] > 0) {
                bd.push_back(m.levels.at(k));
                bs.push_back(q.q[k]);
            }
        auto table = path_table(m, q);
        for (const auto& [label, F] : functions(o, bd, bs)) {
            auto orders = qbar_orders(table, F);
            for (size_t k = 0; k < orders.size(); ++k) t.rows.push_back({"order", std::to_string(k), label, to_string(orders[k])});
            if (!o.Ns.empty())
                for (int N : parse_ints(o.Ns)) t.rows.push_back({"exact", std::to_string(N), label, to_string(qbar_exact(table, N, F))});
            if (o.wick) {
                auto w = colored_wick(m, q, F);
                t.rows.push_back({"wick", std::to_string(w.order), label, to_string(w.value)});
            }
        }
    } else if (o.mode == "moments") {
        auto e = e_moments(m, o.n, o.q);
        for (size_t k = 0; k < e.size(); ++k) t.rows.push_back({"order", std::to_string(k), "moment", to_string(e[k])});
        if (!o.Ns.empty())
            for (int N : parse_ints(o.Ns)) t.rows.push_back({"exact", std::to_string(N), "moment", to_string(evaluate_orders(e, N))});
    } else if (o.mode == "chaos") {
        // --n is the terminal time n+1
        for (const auto& [label, F] : functions(o, {m.levels.at(o.n)}, {o.q})) {
            for (int k = 0; k <= o.order; ++k)
                t.rows.push_back({o.tilde ? "tensor" : "symmetric", std::to_string(k), label,
                                  to_string(p_derivative(m, k, o.n, o.q, F, o.tilde ? PMode::Tensor : PMode::Symmetric))});
            if (!o.tilde) t.rows.push_back({"explicit", "1", label, to_string(p1_explicit(m, o.n, o.q, F))});
        }
    } else {
        throw ConfigError("unknown path-expand mode " + o.mode);
    }
    return t;
}

Table cmd_simulate(const Options& o) {
    auto m = get_model(o);
    if (o.quantity == "states") {
        auto tr = simulate(m, o.N, o.n, o.seed);
        Table t{{"time", "particle", "state"}, {}};
        for (size_t k = 0; k < tr.states.size(); ++k)
            for (size_t i = 0; i < tr.states[k].size(); ++i)
                t.rows.push_back({std::to_string(k), std::to_string(i), std::to_string(tr.states[k][i])});
        return t;
    }
    Vec f = o.f.empty() ? Vec(m.levels.at(o.n), Rational(1)) : parse_vec(o.f);
    std::vector<double> v;
    if (o.quantity == "gamma") {
        if ((int)f.size() != m.levels.at(o.n)) throw ConfigError("--f length mismatch");
        v = gamma_samples(m, o.N, o.n, o.runs, o.seed, f);
    } else if (o.quantity == "lambda") {
        v = lambda_samples(m, o.N, o.n, o.runs, o.seed);
    } else if (o.quantity == "ground-state") {
        v = ground_state_samples(m, o.N, o.n, o.runs, o.seed, f);
    } else if (o.quantity == "ustat") {
        auto fs = functions(o, {m.levels.at(o.n)}, {o.q});
        if (fs.size() != 1) throw ConfigError("ustat needs --product or --function");
        v = u_statistic_samples(m, o.N, o.n, o.runs, o.seed, fs[0].second);
    } else {
        throw ConfigError("unknown quantity " + o.quantity);
    }
    Table t{{"run_id", "quantity", "value"}, {}};
    for (size_t r = 0; r < v.size(); ++r) t.rows.push_back({std::to_string(r), o.quantity, format_double(v[r])});
    return t;
}

Table cmd_verify(const Options& o, bool& ok) {
    AcceptanceOptions opt;
    if (!o.model_path.empty()) opt.model = load_model(o.model_path);
    opt.seed = o.seed;
    std::vector<int> ids;
    try {
        ids = suite_criteria(o.suite);
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    Table t{{"criterion", "name", "pass", "detail", "seconds"}, {}};
    ok = true;
    for (int id : ids) {
        auto r = run_criterion(id, opt);
        std::cerr << format_result(r) << '\n';
        ok = ok && r.pass;
        t.rows.push_back({std::to_string(r.id), r.name, r.pass ? "true" : "false", r.detail, format_double(r.seconds)});
    }
    return t;
}

// Config keys become flags placed before the user's own, so the command line wins.
std::vector<std::string> config_args(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    std::vector<std::string> args;
    for (const auto& [k, v] : j.items()) {
        if (k == "command") continue;
        std::string flag = "--" + k;
        if (v.is_boolean()) {
            if (v.get<bool>()) args.push_back(flag);
        } else if (v.is_array()) {
            std::string s;
            for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + (v[i].is_string() ? v[i].get<std::string>() : v[i].dump());
            args.push_back(flag);
            args.push_back(s);
        } else {
            args.push_back(flag);
            args.push_back(v.is_string() ? v.get<std::string>() : v.dump());
        }
    }
    return args;
}

} // namespace

int main(int argc, char** argv) {
    const std::vector<std::string> commands = {"enumerate-forests", "hilbert", "count-jungles", "expand",
                                               "path-expand", "simulate", "verify"};
    std::vector<std::string> user(argv + 1, argv + argc);
    try {
        std::string config, command;
        for (size_t i = 0; i < user.size(); ++i) {
            if (user[i] == "--config" && i + 1 < user.size()) config = user[i + 1];
            if (user[i].rfind("--config=", 0) == 0) config = user[i].substr(9);
            if (command.empty() && std::find(commands.begin(), commands.end(), user[i]) != commands.end()) command = user[i];
        }
        std::vector<std::string> args;
        if (!config.empty()) {
            auto extra = config_args(config);
            if (command.empty()) {
                std::ifstream in(config);
                json j = json::parse(in, nullptr, false);
                if (j.is_object() && j.contains("command")) command = j["command"].get<std::string>();
                if (command.empty()) throw ConfigError("no command given");
                args.push_back(command);
            } else {
                args.push_back(command);
                user.erase(std::find(user.begin(), user.end(), command));
            }
            args.insert(args.end(), extra.begin(), extra.end());
        }
        args.insert(args.end(), user.begin(), user.end());

        CLI::App app{"fklab: exact expansions and simulation of Feynman-Kac particle models"};
        app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        app.require_subcommand(1);
        app.fallthrough();
        Options o;
        std::string config_unused;
        app.add_option("--config", config_unused, "JSON config; flags override its keys");
        app.add_option("--model", o.model_path, "model JSON file (default: built-in REF2)");
        app.add_option("--output", o.output, "output file (default: stdout)");
        app.add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        app.add_option("--seed", o.seed, "random seed");

        auto* en = app.add_subcommand("enumerate-forests", "list forests with orbit sizes");
        auto* hi = app.add_subcommand("hilbert", "coefficients of the forest generating series");
        auto* cj = app.add_subcommand("count-jungles", "orbit size and stabilizer of one forest");
        auto* ex = app.add_subcommand("expand", "Laurent orders of the particle block measure");
        auto* pe = app.add_subcommand("path-expand", "path space orders, moments, chaos derivatives");
        auto* si = app.add_subcommand("simulate", "Monte Carlo runs of the particle model");
        auto* ve = app.add_subcommand("verify", "acceptance criteria");
        for (auto* s : {en, hi, cj, ex, pe, si}) s->add_option("--n", o.n, "time index");
        for (auto* s : {en, cj, ex, pe, si}) s->add_option("--q", o.q, "block size");
        for (auto* s : {en, cj, pe}) s->add_option("--q-seq", o.qseq, "path block sizes, comma separated");
        en->add_option("--max-coal", o.max_coal, "coalescence caps per level");
        hi->add_option("--degree", o.degree, "max exponent per variable");
        hi->add_option("--total", o.total, "max total x degree");
        hi->add_flag("--coalescent", o.coalescent, "track coalescences");
        cj->add_option("--forest", o.forest, "canonical forest text");
        for (auto* s : {ex, pe, si}) {
            s->add_option("--product", o.product, "symmetrized product f1;f2;... of comma separated vectors");
            s->add_option("--function", o.function_file, "dense function JSON {dims, values}");
        }
        for (auto* s : {ex, pe}) {
            s->add_option("--N", o.Ns, "population sizes for exact values");
            s->add_flag("--wick", o.wick, "Wick order through pair forests");
        }
        ex->add_flag("--closed-form", o.closed_form, "low orders through the closed formulas");
        pe->add_option("--mode", o.mode, "qbar, moments or chaos")->check(CLI::IsMember({"qbar", "moments", "chaos"}));
        pe->add_option("--order", o.order, "highest chaos derivative");
        pe->add_flag("--tilde", o.tilde, "tensor occupation measure instead of the U-statistic law");
        si->add_option("--N", o.N, "population size");
        si->add_option("--runs", o.runs, "independent runs");
        si->add_option("--quantity", o.quantity, "gamma, lambda, ground-state, ustat or states");
        si->add_option("--f", o.f, "test function, comma separated");
        ve->add_option("--suite", o.suite, "combinatorics, expansion, path, montecarlo or all");

        std::vector<std::string> rev(args.rbegin(), args.rend());
        try {
            app.parse(rev);
        } catch (const CLI::CallForHelp& e) {
            return app.exit(e);
        } catch (const CLI::ParseError& e) {
            std::cerr << "error: " << e.what() << '\n';
            return 2;
        }

        Table t;
        bool ok = true;
        if (*en) t = cmd_enumerate(o);
        else if (*hi) t = cmd_hilbert(o);
        else if (*cj) t = cmd_count(o);
        else if (*ex) t = cmd_expand(o);
        else if (*pe) t = cmd_path(o);
        else if (*si) t = cmd_simulate(o);
        else t = cmd_verify(o, ok);

        if (o.output.empty()) {
            emit(t, o.format, std::cout);
        } else {
            std::ofstream out(o.output, std::ios::binary);
            if (!out) throw ConfigError("cannot write " + o.output);
            emit(t, o.format, out);
        }
        return ok ? 0 : 1;
    } catch (const ResourceError& e) {
        std::cerr << "resource limit: " << e.what() << '\n';
        return 3;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
