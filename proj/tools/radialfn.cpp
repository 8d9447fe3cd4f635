#include <charconv>
#include <cstdint>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <radialfn/radialfn.hpp>

using namespace radialfn;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitAccuracy = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void emit(const json& j) { std::cout << j.dump() << std::endl; }

json value_record(const Spectrum& x, const Spectrum& k, double beta, const RadialValue& r) {
    json j;
    j["beta"] = beta;
    j["x"] = x.vec();
    j["k"] = k.vec();
    j["value_re"] = r.value.real();
    j["value_im"] = r.value.imag();
    j["abs_err_est"] = r.abs_err_est;
    j["method"] = to_string(r.method);
    if (r.nodes_used > 0) j["nodes_used"] = r.nodes_used;
    j["warnings"] = r.warnings;
    return j;
}

json report_record(const ResidualReport& r) {
    json j;
    j["context"] = r.context;
    j["beta"] = r.beta;
    j["n"] = r.n;
    j["residual"] = r.residual;
    j["h"] = r.h;
    j["richardson_order"] = r.richardson_order;
    j["tolerance"] = r.tolerance;
    j["passed"] = r.passed;
    return j;
}

struct EvalOptions {
    double beta = 2.0;
    std::vector<double> x, k;
    std::string method = "auto";
    int nodes = 0;
    double rel_tol = 0.0;
    double abs_tol = -1.0;
    std::int64_t samples = 100000;
    std::uint64_t seed = 1;
    bool rotated = false;
    bool csv = false;
};

QuadratureConfig config_from(const EvalOptions& o) {
    QuadratureConfig cfg;
    if (o.nodes > 0) cfg.nodes_per_variable = o.nodes;
    if (o.rel_tol > 0.0) cfg.rel_tol = o.rel_tol;
    if (o.abs_tol >= 0.0) cfg.abs_tol = o.abs_tol;
    return cfg;
}

RadialValue symplectic_rotated(const Spectrum& x, const Spectrum& k) {
    switch (x.n()) {
    case 2: return phi2_usp(x, k, true);
    case 3: return phi3_usp(x, k, true);
    case 4: return phi4_usp(x, k, true);
    default: throw UsageError("--rotated needs beta = 4 and N in {2, 3, 4}");
    }
}

// Evaluates one point; MC extras are appended to `extra`.
RadialValue evaluate(const EvalOptions& o, const Spectrum& x, const Spectrum& k, json& extra) {
    const DysonIndex beta(o.beta);
    const int n = x.n();
    std::string method = o.method;
    if (o.rotated) {
        if (beta.value() != 4.0 || (method != "closed" && method != "auto"))
            throw UsageError("--rotated is only defined for the beta = 4 closed forms");
        return symplectic_rotated(x, k);
    }
    if (method == "auto") method = has_closed_form(beta, n) ? "closed" : "recursion";
    if (method == "closed") {
        if (!has_closed_form(beta, n)) throw UsageError("no closed form for this (beta, N)");
        return closed_form(beta, x, k);
    }
    if (method == "recursion") return phi_radial(beta, x, k, config_from(o));
    if (method == "asymptotic") return phi_asymptotic(beta, x, k);
    if (method == "mc") {
        if (!beta.is_group_case()) throw UsageError("--method mc requires beta in {1, 2, 4}");
        const MCEstimate e = mc_phi(beta, x, k, o.samples, o.seed);
        RadialValue r;
        r.value = e.mean;
        r.abs_err_est = e.std_err;
        r.method = Method::monte_carlo;
        extra["samples"] = e.samples;
        extra["seed"] = e.seed;
        return r;
    }
    throw UsageError("unknown method: " + method);
}

int cmd_eval(const EvalOptions& o) {
    if (o.x.empty() || o.x.size() != o.k.size()) throw UsageError("--x and --k must be non-empty and of equal length");
    const Spectrum x(o.x), k(o.k);
    json extra = json::object();
    int code = kExitOk;
    RadialValue r;
    try {
        r = evaluate(o, x, k, extra);
    } catch (const AccuracyNotReached& e) {
        r = e.best;
        r.warnings.emplace_back(e.what());
        code = kExitAccuracy;
    }
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
    if (o.csv) {
        std::cout << "value_re,value_im,abs_err_est,method\n"
                  << fmt(r.value.real()) << ',' << fmt(r.value.imag()) << ',' << fmt(r.abs_err_est) << ','
                  << to_string(r.method) << std::endl;
    } else {
        json j = value_record(x, k, o.beta, r);
        j.update(extra);
        emit(j);
    }
    return code;
}

// Sorted random spectrum with gaps in [0.4, 1.2], centered near the origin.
Spectrum random_spectrum(int n, std::mt19937_64& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> gap(0.4, 1.2), shift(-0.5, 0.5);
    std::vector<double> v(n);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        v[i] = acc;
        acc += gap(rng);
    }
    const double center = 0.5 * v.back() + shift(rng);
    for (double& d : v) d = scale * (d - center);
    return Spectrum(std::move(v));
}

struct VerifyOptions {
    std::vector<std::string> suites;
    std::optional<double> beta;
    std::optional<int> n;
    std::vector<double> x, k;
    std::uint64_t seed = 1;
    int points = 3;
};

struct GridPoint {
    double beta;
    Spectrum x, k;
};

std::vector<GridPoint> grid_for(const VerifyOptions& o, const std::vector<std::pair<double, int>>& defaults,
                                std::mt19937_64& rng) {
    std::vector<GridPoint> pts;
    if (!o.x.empty()) {
        if (!o.beta) throw UsageError("--x/--k require --beta");
        if (o.x.size() != o.k.size()) throw UsageError("--x and --k must have equal length");
        pts.push_back({*o.beta, Spectrum(o.x), Spectrum(o.k)});
        return pts;
    }
    std::vector<std::pair<double, int>> cases = defaults;
    if (o.beta || o.n) {
        cases.clear();
        std::vector<double> betas;
        std::vector<int> ns;
        for (const auto& [b, m] : defaults) {
            if (std::find(betas.begin(), betas.end(), b) == betas.end()) betas.push_back(b);
            if (std::find(ns.begin(), ns.end(), m) == ns.end()) ns.push_back(m);
        }
        if (o.beta) betas = {*o.beta};
        if (o.n) ns = {*o.n};
        for (double b : betas)
            for (int m : ns) cases.emplace_back(b, m);
    }
    for (const auto& [b, m] : cases)
        for (int p = 0; p < o.points; ++p) {
            Spectrum x = random_spectrum(m, rng);
            Spectrum k = random_spectrum(m, rng, 0.8);
            pts.push_back({b, std::move(x), std::move(k)});
        }
    return pts;
}

int cmd_verify(const VerifyOptions& o) {
    if (o.suites.empty()) throw UsageError("--suite must name at least one of pde, hankel, symmetry, translation, measure, crosscheck");
    std::mt19937_64 rng(o.seed);
    bool all_passed = true;
    auto record = [&](const ResidualReport& r) {
        all_passed = all_passed && r.passed;
        emit(report_record(r));
    };

    for (const auto& suite : o.suites) {
        if (suite == "pde") {
            for (const auto& p : grid_for(o, {{1.3, 3}, {2.5, 3}}, rng))
                record(pde_residual(p.beta, p.x, p.k, EvaluatorKind::recursion));
            if (!o.beta && o.x.empty())
                for (const auto& p : grid_for(o, {{1.0, 2}, {2.5, 2}, {2.0, 3}}, rng)) {
                    auto r = pde_residual(p.beta, p.x, p.k, EvaluatorKind::closed_form, 1e-2);
                    r.passed = r.passed && std::abs(r.richardson_order - 2.0) <= 0.2;
                    record(r);
                }
        } else if (suite == "hankel") {
            for (const auto& p : grid_for(o, {{2.0, 3}, {4.0, 3}, {4.0, 4}}, rng)) {
                if (p.beta != 2.0 && p.beta != 4.0) throw UsageError("hankel suite needs beta in {2, 4}");
                record(hankel_residual(p.beta, p.x, p.k, Permutation::identity(p.x.n()), default_step(p.x)));
            }
        } else if (suite == "symmetry" || suite == "translation") {
            std::vector<std::pair<double, int>> defaults;
            for (double b : {0.5, 1.0, 2.0, 3.0, 4.0})
                for (int m : {2, 3}) defaults.emplace_back(b, m);
            for (const auto& p : grid_for(o, defaults, rng)) {
                const auto ev = make_evaluator(p.beta, EvaluatorKind::recursion);
                record(suite == "symmetry" ? check_symmetry(p.beta, p.x, p.k, ev)
                                           : check_translation(p.beta, p.x, p.k, 0.7, ev));
            }
        } else if (suite == "measure") {
            std::vector<std::pair<double, int>> defaults;
            for (double b : {0.5, 1.0, 1.7, 2.0, 3.0, 4.0})
                for (int m : {2, 3, 4}) defaults.emplace_back(b, m);
            for (const auto& p : grid_for(o, defaults, rng)) record(check_measure(p.beta, p.x));
        } else if (suite == "crosscheck") {
            for (const auto& p : grid_for(o, {{0.5, 2}, {3.0, 2}, {2.0, 3}, {4.0, 3}}, rng)) {
                if (!has_closed_form(p.beta, p.x.n())) throw UsageError("crosscheck needs a (beta, N) with a closed form");
                record(check_crosscheck(p.beta, p.x, p.k));
            }
        } else {
            throw UsageError("unknown suite: " + suite);
        }
    }
    return all_passed ? kExitOk : kExitFailed;
}

struct SweepOptions {
    EvalOptions eval;
    std::string param = "z";
    double from = 0.0, to = 0.0;
    int steps = 51;
};

int cmd_sweep(const SweepOptions& o) {
    if (!(o.from != o.to)) throw UsageError("sweep range has zero length");
    if (o.steps < 2) throw UsageError("--steps must be >= 2");
    if (o.param != "z" && (o.eval.x.empty() || o.eval.x.size() != o.eval.k.size()))
        throw UsageError("--x and --k are required for this sweep");

    std::cout << "param,value_re,value_im,abs_err_est,method\n";
    int code = kExitOk;
    for (int i = 0; i < o.steps; ++i) {
        const double t = o.from + (o.to - o.from) * i / (o.steps - 1);
        EvalOptions e = o.eval;
        Spectrum x, k;
        if (o.param == "z") {
            x = Spectrum{0.5 * t, -0.5 * t};
            k = Spectrum{1.0, -1.0};
        } else if (o.param == "beta") {
            e.beta = t;
            x = Spectrum(e.x);
            k = Spectrum(e.k);
        } else if (o.param == "scale") {
            x = Spectrum(e.x).scaled(t);
            k = Spectrum(e.k).scaled(t);
        } else {
            throw UsageError("--param must be z, beta or scale");
        }
        json extra;
        RadialValue r;
        try {
            r = evaluate(e, x, k, extra);
        } catch (const AccuracyNotReached& ex) {
            r = ex.best;
            code = kExitAccuracy;
        }
        std::cout << fmt(t) << ',' << fmt(r.value.real()) << ',' << fmt(r.value.imag()) << ',' << fmt(r.abs_err_est)
                  << ',' << to_string(r.method) << std::endl;
    }
    return code;
}

void add_eval_flags(CLI::App* cmd, EvalOptions& o, bool need_points) {
    cmd->add_option("--beta", o.beta, "Dyson index beta > 0")->required(need_points);
    auto* xo = cmd->add_option("--x", o.x, "spectrum x, comma separated")->delimiter(',');
    auto* ko = cmd->add_option("--k", o.k, "spectrum k, comma separated")->delimiter(',');
    if (need_points) {
        xo->required();
        ko->required();
    }
    cmd->add_option("--method", o.method, "auto, recursion, closed, mc or asymptotic")
        ->check(CLI::IsMember({"auto", "recursion", "closed", "mc", "asymptotic"}));
    cmd->add_option("--nodes", o.nodes, "base quadrature nodes per variable (>= 4)");
    cmd->add_option("--rel-tol", o.rel_tol, "relative tolerance");
    cmd->add_option("--abs-tol", o.abs_tol, "absolute tolerance floor");
    cmd->add_option("--samples", o.samples, "Monte-Carlo samples");
    cmd->add_option("--seed", o.seed, "Monte-Carlo seed");
    cmd->add_flag("--rotated", o.rotated, "beta = 4 closed forms in the real-exponential convention Phi(-ix, k)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Radial functions for arbitrary Dyson index"};
    app.require_subcommand(1);

    EvalOptions eval_opts;
    auto* eval = app.add_subcommand("eval", "evaluate Phi_N(x, k)");
    add_eval_flags(eval, eval_opts, true);
    bool eval_json = false;
    eval->add_flag("--json", eval_json, "JSON output (default)");
    eval->add_flag("--csv", eval_opts.csv, "CSV output");

    VerifyOptions verify_opts;
    std::string suite_list = "pde,hankel,symmetry,translation,measure,crosscheck";
    std::vector<double> vbeta;
    std::vector<int> vn;
    auto* verify = app.add_subcommand("verify", "run verification suites, one JSON line per check");
    verify->add_option("--suite", suite_list, "comma separated: pde,hankel,symmetry,translation,measure,crosscheck")
        ->capture_default_str();
    verify->add_option("--beta", vbeta, "restrict to one beta")->expected(1);
    verify->add_option("--n", vn, "restrict to one N")->expected(1);
    verify->add_option("--x", verify_opts.x, "explicit x")->delimiter(',');
    verify->add_option("--k", verify_opts.k, "explicit k")->delimiter(',');
    verify->add_option("--seed", verify_opts.seed, "seed for the random grid");
    verify->add_option("--points", verify_opts.points, "random points per (beta, N)")->check(CLI::PositiveNumber);
    bool verify_json = false;
    verify->add_flag("--json", verify_json, "JSON lines (default)");

    SweepOptions sweep_opts;
    auto* sweep = app.add_subcommand("sweep", "vary one parameter and print CSV");
    add_eval_flags(sweep, sweep_opts.eval, false);
    sweep->add_option("--param", sweep_opts.param, "z (N=2 with x=(z/2,-z/2), k=(1,-1)), beta, or scale");
    sweep->add_option("--from", sweep_opts.from, "start")->required();
    sweep->add_option("--to", sweep_opts.to, "end")->required();
    sweep->add_option("--steps", sweep_opts.steps, "number of points");
    bool sweep_csv = true;
    sweep->add_flag("--csv", sweep_csv, "CSV output (default)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*eval) return cmd_eval(eval_opts);
        if (*verify) {
            std::stringstream ss(suite_list);
            for (std::string s; std::getline(ss, s, ',');)
                if (!s.empty()) verify_opts.suites.push_back(s);
            if (!vbeta.empty()) verify_opts.beta = vbeta.front();
            if (!vn.empty()) verify_opts.n = vn.front();
            return cmd_verify(verify_opts);
        }
        if (*sweep) return cmd_sweep(sweep_opts);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const AccuracyNotReached& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitAccuracy;
    }
    return kExitUsage;
}
