#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "config.hpp"
#include "memkernel/validation.hpp"

namespace fs = std::filesystem;
using namespace memkernel;
using namespace memkernel::cli;

namespace {

constexpr const char* kVersion = "1.0.0";

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class Csv {
public:
    explicit Csv(std::vector<std::string> header) : width_(header.size()) { row_strings(header); }

    void row(std::initializer_list<std::variant<double, std::string>> cells) {
        std::vector<std::string> s;
        for (const auto& c : cells) s.push_back(std::holds_alternative<double>(c) ? num(std::get<double>(c))
                                                                                 : std::get<std::string>(c));
        row_strings(s);
    }

    void write(const fs::path& file) const {
        std::ofstream out(file, std::ios::binary);
        out << text_;
        if (!out) throw NumericalFailure("cannot write " + file.string());
    }

private:
    void row_strings(const std::vector<std::string>& cells) {
        if (cells.size() != width_) throw NumericalFailure("CSV row width mismatch");
        for (std::size_t k = 0; k < cells.size(); ++k) text_ += (k ? "," : "") + cells[k];
        text_ += '\n';
    }

    std::size_t width_;
    std::string text_;
};

// Result of a run: files to write and the command-specific part of the report.
struct Outcome {
    std::vector<std::pair<std::string, Csv>> files;
    json results = json::object();
    int exit_code = 0;
};

using Job = std::function<Outcome()>;

void solution_rows(Csv& csv, const GridSolution& s, const GridSolution* oracle) {
    for (std::size_t j = 0; j < s.t_nodes.size(); ++j)
        for (std::size_t i = 0; i < s.x_nodes.size(); ++i) {
            const double v = s.values(j, i);
            if (oracle) {
                const double o = oracle->values(j, i);
                csv.row({s.x_nodes[i], s.t_nodes[j], v, o, std::fabs(v - o)});
            } else {
                csv.row({s.x_nodes[i], s.t_nodes[j], v});
            }
        }
}

json diagnostics_json(const SolveDiagnostics& d) {
    json j;
    j["iterations"] = d.iterations;
    j["increments"] = d.increments;
    j["contraction_ratios"] = d.ratios;
    j["max_contraction_ratio"] = d.max_ratio();
    j["boundary_error"] = d.boundary_error;
    j["warnings"] = d.warnings;
    return j;
}

// FD oracle steps per solver step; the FD time step must divide the solver step.
int oracle_stride(double horizon, int nt_steps, double dt) {
    const double per = horizon / nt_steps / dt;
    const int k = static_cast<int>(std::lround(per));
    if (k < 1 || std::fabs(per - k) > 1e-9 * per)
        throw ConfigError("fd_oracle.dt must divide the solver time step horizon/nt_steps");
    return k;
}

FdGrid fd_grid(const json& j, int nx, double horizon, int nt_steps) {
    allow_keys(j, "fd_oracle", {"dt", "scheme"});
    FdGrid g;
    g.nx = nx;
    g.dt = number(j, "fd_oracle", "dt");
    if (!(g.dt > 0)) throw ConfigError("fd_oracle.dt must be positive");
    const std::string scheme = j.value("scheme", std::string("semi-implicit"));
    if (scheme == "explicit")
        g.scheme = FdGrid::Scheme::explicit_euler;
    else if (scheme != "semi-implicit")
        throw ConfigError("fd_oracle.scheme must be 'explicit' or 'semi-implicit'");
    g.output_every = oracle_stride(horizon, nt_steps, g.dt);
    return g;
}

double positive(const json& j, const std::string& path, const char* key, std::optional<double> fallback = {}) {
    const double v = number(j, path, key, fallback);
    if (!(v > 0)) throw ConfigError("'" + path + "." + key + "' must be positive");
    return v;
}

json sub(const json& j, const char* key) { return j.contains(key) ? j.at(key) : json::object(); }

Job kernel_eval(const json& cfg) {
    allow_keys(cfg, "config", {"params", "control", "x", "t", "laplace", "threads"});
    const OperatorParams p = operator_params(sub(cfg, "params"));
    const SeriesControl c = series_control(sub(cfg, "control"));
    const auto xs = numbers(cfg, "config", "x");
    const auto ts = numbers(cfg, "config", "t");
    for (double t : ts)
        if (t < c.t_floor) throw ConfigError("every t must be >= control.t_floor");
    std::vector<double> rs, ss;
    if (cfg.contains("laplace")) {
        const json& l = cfg.at("laplace");
        allow_keys(l, "laplace", {"r", "s"});
        rs = numbers(l, "laplace", "r");
        ss = numbers(l, "laplace", "s");
        for (double s : ss)
            if (!(s > std::max(-p.a, -p.beta))) throw ConfigError("laplace.s must exceed max(-a, -beta)");
        for (double r : rs)
            if (r < 0) throw ConfigError("laplace.r must be non-negative");
    }
    return [=] {
        Outcome o;
        const int n = static_cast<int>(xs.size() * ts.size());
        std::vector<std::array<double, 3>> v(n);
        parallel_for(0, n, [&](int k) {
            const double x = xs[k % xs.size()], t = ts[k / xs.size()];
            v[k] = {eval_k(x, t, p, c), eval_k1(x, t, p, c), eval_kx(x, t, p, c)};
        });
        Csv csv({"x", "t", "K", "K1", "Kx"});
        for (int k = 0; k < n; ++k) csv.row({xs[k % xs.size()], ts[k / xs.size()], v[k][0], v[k][1], v[k][2]});
        o.files.emplace_back("kernel.csv", std::move(csv));
        if (!rs.empty()) {
            const int m = static_cast<int>(rs.size() * ss.size());
            std::vector<LaplaceCheck> lc(m);
            parallel_for(0, m, [&](int k) { lc[k] = laplace_check(rs[k % rs.size()], ss[k / rs.size()], p, c); });
            Csv lap({"r", "s", "value", "oracle", "abs_diff"});
            double worst = 0.0;
            for (int k = 0; k < m; ++k) {
                const double d = std::fabs(lc[k].numeric - lc[k].closed_form);
                worst = std::max(worst, d);
                lap.row({rs[k % rs.size()], ss[k / rs.size()], lc[k].numeric, lc[k].closed_form, d});
            }
            o.files.emplace_back("laplace.csv", std::move(lap));
            o.results["laplace_max_abs_diff"] = worst;
        }
        o.results["E_of_t"] = json::array();
        for (double t : ts) o.results["E_of_t"].push_back({{"t", t}, {"E", e_of_t(t, p)}});
        return o;
    };
}

Job green_eval(const json& cfg) {
    allow_keys(cfg, "config", {"params", "control", "domain", "x", "xi", "t", "modes", "threads"});
    const OperatorParams p = operator_params(sub(cfg, "params"));
    const SeriesControl c = series_control(sub(cfg, "control"));
    const StripDomain d = strip(sub(cfg, "domain"));
    const auto xs = numbers(cfg, "config", "x"), xis = numbers(cfg, "config", "xi"), ts = numbers(cfg, "config", "t");
    const int modes = integer(cfg, "config", "modes", 200);
    if (modes < 1) throw ConfigError("modes must be >= 1");
    for (double x : xs)
        if (x < 0 || x > d.length) throw ConfigError("x values must lie in [0, L]");
    for (double x : xis)
        if (x < 0 || x > d.length) throw ConfigError("xi values must lie in [0, L]");
    for (double t : ts)
        if (t < c.t_floor) throw ConfigError("every t must be >= control.t_floor");
    return [=] {
        Outcome o;
        const std::size_t nx = xs.size(), nxi = xis.size();
        const int n = static_cast<int>(nx * nxi * ts.size());
        std::vector<std::array<double, 2>> g(n);
        parallel_for(0, n, [&](int k) {
            const double x = xs[k % nx], xi = xis[(k / nx) % nxi], t = ts[k / (nx * nxi)];
            g[k] = {green(x, xi, t, p, d, c), eigen_green(x, xi, t, p, d, modes)};
        });
        Csv csv({"x", "xi", "t", "value", "oracle", "abs_diff"});
        double worst = 0.0;
        for (int k = 0; k < n; ++k) {
            const double diff = std::fabs(g[k][0] - g[k][1]);
            worst = std::max(worst, diff);
            csv.row({xs[k % nx], xis[(k / nx) % nxi], ts[k / (nx * nxi)], g[k][0], g[k][1], diff});
        }
        o.files.emplace_back("green.csv", std::move(csv));
        const int m = static_cast<int>(nx * ts.size());
        std::vector<std::array<double, 2>> th(m);
        parallel_for(0, m, [&](int k) {
            const double x = xs[k % nx], t = ts[k / nx];
            th[k] = {theta(x, t, p, d, c), theta_x_retry(x, t, p, d, c)};
        });
        Csv tcsv({"x", "t", "theta", "theta_x"});
        for (int k = 0; k < m; ++k) tcsv.row({xs[k % nx], ts[k / nx], th[k][0], th[k][1]});
        o.files.emplace_back("theta.csv", std::move(tcsv));
        o.results["green_vs_eigen_max_abs_diff"] = worst;
        return o;
    };
}

Job solve_linear_job(const json& cfg) {
    allow_keys(cfg, "config",
               {"params", "control", "domain", "horizon", "grid", "u0", "g1", "g2", "source", "fd_oracle", "threads"});
    DirichletProblem prob;
    prob.params = operator_params(sub(cfg, "params"));
    const SeriesControl c = series_control(sub(cfg, "control"));
    prob.domain = strip(sub(cfg, "domain"));
    prob.horizon = positive(cfg, "config", "horizon");
    const GridSpec grid = grid_spec(sub(cfg, "grid"));
    const double L = prob.domain.length;
    if (cfg.contains("u0")) prob.u0 = space_preset(cfg.at("u0"), "u0", L);
    if (cfg.contains("g1")) prob.g1 = time_preset(cfg.at("g1"), "g1");
    if (cfg.contains("g2")) prob.g2 = time_preset(cfg.at("g2"), "g2");
    if (cfg.contains("source")) {
        const json& s = cfg.at("source");
        expect_object(s, "source");
        const std::string type = s.value("type", std::string());
        if (type == "separable") {
            allow_keys(s, "source", {"type", "space", "time"});
            if (!s.contains("space") || !s.contains("time")) throw ConfigError("source needs 'space' and 'time'");
            SpaceFn a = space_preset(s.at("space"), "source.space", L);
            TimeFn b = time_preset(s.at("time"), "source.time");
            if (a && b) prob.source = SourceSpec::linear([a, b](double x, double t) { return a(x) * b(t); });
        } else if (type != "zero") {
            throw ConfigError("source.type must be 'zero' or 'separable'");
        } else {
            allow_keys(s, "source", {"type"});
        }
    }
    std::optional<FdGrid> fd;
    if (cfg.contains("fd_oracle")) fd = fd_grid(cfg.at("fd_oracle"), grid.nx_cells, prob.horizon, grid.nt_steps);
    checked("problem", [&] { prob.validate(); });
    return [=] {
        Outcome o;
        const GridSolution s = solve_linear(prob, grid, c);
        std::optional<GridSolution> oracle;
        if (fd) oracle = solve_integrodiff_fd(prob, *fd).u;
        Csv csv(oracle ? std::vector<std::string>{"x", "t", "value", "oracle", "abs_diff"}
                       : std::vector<std::string>{"x", "t", "value"});
        solution_rows(csv, s, oracle ? &*oracle : nullptr);
        o.files.emplace_back("solution.csv", std::move(csv));
        o.results["diagnostics"] = diagnostics_json(s.diagnostics);
        if (oracle) o.results["fd_oracle_max_abs_diff"] = max_abs_diff(s.values, oracle->values);
        return o;
    };
}

Job solve_esjj_job(const json& cfg) {
    allow_keys(cfg, "config",
               {"esjj", "control", "horizon", "grid", "u0", "v0", "g1", "g2", "picard", "fd_oracle", "threads"});
    EsjjProblem prob;
    prob.params = esjj_params(sub(cfg, "esjj"));
    const SeriesControl c = series_control(sub(cfg, "control"));
    prob.horizon = positive(cfg, "config", "horizon");
    const GridSpec grid = grid_spec(sub(cfg, "grid"));
    const double L = prob.params.length;
    if (!cfg.contains("v0")) throw ConfigError("missing key 'config.v0' (use {\"type\": \"zero\"} for rest)");
    if (cfg.contains("u0")) prob.u0 = space_preset(cfg.at("u0"), "u0", L);
    prob.v0 = space_preset(cfg.at("v0"), "v0", L);
    if (cfg.contains("g1")) prob.g1 = time_preset(cfg.at("g1"), "g1");
    if (cfg.contains("g2")) prob.g2 = time_preset(cfg.at("g2"), "g2");
    PicardOptions opt;
    if (cfg.contains("picard")) {
        const json& pj = cfg.at("picard");
        allow_keys(pj, "picard", {"tol", "max_iter"});
        opt.tol = positive(pj, "picard", "tol", opt.tol);
        opt.max_iter = integer(pj, "picard", "max_iter", opt.max_iter);
        if (opt.max_iter < 1) throw ConfigError("picard.max_iter must be >= 1");
    }
    std::optional<FdGrid> fd;
    if (cfg.contains("fd_oracle")) {
        fd = fd_grid(cfg.at("fd_oracle"), grid.nx_cells, prob.horizon, grid.nt_steps);
        // Stability limits of the oracle are part of the configuration contract.
        const double h = L / grid.nx_cells;
        const auto& e = prob.params;
        if (fd->dt > h || fd->dt > 2.0 / (e.eps * e.lam * e.lam) || fd->dt > 2.0 / e.alpha)
            throw ConfigError("fd_oracle.dt violates the oracle stability bound");
    }
    return [=] {
        Outcome o;
        const GridSolution s = solve_esjj(prob, grid, c, opt);
        std::optional<GridSolution> oracle;
        if (fd) oracle = solve_pde_esjj(prob, *fd);
        Csv csv(oracle ? std::vector<std::string>{"x", "t", "value", "oracle", "abs_diff"}
                       : std::vector<std::string>{"x", "t", "value"});
        solution_rows(csv, s, oracle ? &*oracle : nullptr);
        o.files.emplace_back("solution.csv", std::move(csv));
        const OperatorParams p = map_params(prob.params);
        o.results["mapped_params"] = {{"eps", p.eps}, {"a", p.a}, {"b", p.b}, {"beta", p.beta}, {"sigma0", p.sigma0()}};
        o.results["diagnostics"] = diagnostics_json(s.diagnostics);
        if (oracle) o.results["fd_oracle_max_abs_diff"] = max_abs_diff(s.values, oracle->values);
        return o;
    };
}

Job asymptotics_job(const json& cfg) {
    allow_keys(cfg, "config", {"params", "control", "domain", "steady", "decay", "convolution", "threads"});
    const OperatorParams p = operator_params(sub(cfg, "params"));
    const SeriesControl c = series_control(sub(cfg, "control"));
    const StripDomain d = strip(sub(cfg, "domain"));
    const double L = d.length;

    const json st = sub(cfg, "steady");
    allow_keys(st, "steady", {"g1_inf", "g2_inf", "horizon", "grid"});
    const double g1 = number(st, "steady", "g1_inf", 1.0), g2 = number(st, "steady", "g2_inf", 0.0);
    const double T = positive(st, "steady", "horizon", 50.0);
    const GridSpec sgrid = grid_spec(st.contains("grid") ? st.at("grid") : json{{"nx_cells", 64}, {"nt_steps", 50}},
                                     "steady.grid");

    const json de = sub(cfg, "decay");
    allow_keys(de, "decay", {"u0", "horizon", "grid"});
    const SpaceFn u0 = space_preset(de.contains("u0") ? de.at("u0") : json{{"type", "sine"}, {"amplitude", 1.0}},
                                    "decay.u0", L);
    const double Td = positive(de, "decay", "horizon", 5.0);
    const GridSpec dgrid = grid_spec(de.contains("grid") ? de.at("grid") : json{{"nx_cells", 64}, {"nt_steps", 50}},
                                     "decay.grid");

    const json cv = sub(cfg, "convolution");
    allow_keys(cv, "convolution", {"x", "horizon", "h"});
    const double cx = number(cv, "convolution", "x", 0.5 * L);
    if (cx < 0 || cx > L) throw ConfigError("convolution.x must lie in [0, L]");
    const double Tc = positive(cv, "convolution", "horizon", 40.0);
    const json hj = cv.contains("h") ? cv.at("h") : json{{"type", "step"}, {"limit", 1.0}, {"rate", 1.0}};
    TimeFn h = time_preset(hj, "convolution.h");
    if (!h) h = [](double) { return 0.0; };
    const auto h_inf = time_limit(hj);
    if (!h_inf) throw ConfigError("convolution.h needs a preset with a finite limit (zero, constant or step)");

    return [=] {
        Outcome o;
        // Steady profile from a long-horizon time-domain solve.
        DirichletProblem sp;
        sp.params = p;
        sp.domain = d;
        sp.horizon = T;
        sp.u0 = [=](double x) { return g1 + (g2 - g1) * x / L; };
        sp.g1 = [=](double) { return g1; };
        sp.g2 = [=](double) { return g2; };
        const GridSolution s = solve_linear(sp, sgrid, c);
        const auto bvp = steady_bvp(g1, g2, p, d, sgrid.nx_cells);
        const double s0 = p.sigma0();
        Csv steady({"x", "t", "value", "oracle", "abs_diff"});
        const std::size_t last = s.t_nodes.size() - 1;
        double to_closed = 0.0, to_bvp = 0.0;
        for (std::size_t i = 0; i < s.x_nodes.size(); ++i) {
            const double x = s.x_nodes[i];
            const double closed = (g1 * std::sinh(s0 * (L - x)) + g2 * std::sinh(s0 * x)) / std::sinh(s0 * L);
            const double v = s.values(last, i);
            to_closed = std::max(to_closed, std::fabs(v - closed));
            to_bvp = std::max(to_bvp, std::fabs(v - bvp[i]));
            steady.row({x, s.t_nodes[last], v, closed, std::fabs(v - closed)});
        }
        o.files.emplace_back("steady.csv", std::move(steady));
        o.results["steady"] = {{"sigma0", s0}, {"max_abs_diff_closed_form", to_closed}, {"max_abs_diff_bvp", to_bvp}};

        // Decay of the initial datum against the a-priori envelope.
        DirichletProblem dp;
        dp.params = p;
        dp.domain = d;
        dp.horizon = Td;
        dp.u0 = u0;
        const GridSolution ds = solve_linear(dp, dgrid, c);
        double nu = 0.0;
        for (int i = 0; i <= 4000; ++i) nu = std::max(nu, std::fabs(u0 ? u0(L * i / 4000.0) : 0.0));
        Csv decay({"t", "value", "bound", "ratio"});
        double tight = 0.0;
        for (std::size_t j = 0; j < ds.t_nodes.size(); ++j) {
            double sup = 0.0;
            for (std::size_t i = 0; i < ds.x_nodes.size(); ++i) sup = std::max(sup, std::fabs(ds.values(j, i)));
            const double b = apriori_bound(ds.t_nodes[j], nu, 0.0, 0.0, p);
            const double ratio = b > 0 ? sup / b : 0.0;
            tight = std::max(tight, ratio);
            decay.row({ds.t_nodes[j], sup, b, ratio});
        }
        o.files.emplace_back("decay.csv", std::move(decay));
        o.results["apriori_max_tightness"] = tight;

        // Convolution legs: theta_x against h' (limit 0) and the boundary term (limit g_inf times steady kernel).
        TimeFunction chi{[&](double t) { return t < c.t_floor ? 0.0 : theta_x_retry(cx, t, p, d, c); }, {}, 0.0, 0.0};
        TimeFunction hh{h, {}, *h_inf, h(0.0)};
        const ConvolutionLimit leg = convolution_limit(chi, hh, Tc);
        const double boundary = boundary_convolution(h, cx, Tc, BoundarySide::left, p, d, c);
        const double predicted = -2.0 * p.eps * steady_boundary_kernel(cx, p, d) * *h_inf;
        Csv conv({"leg", "value", "oracle", "abs_diff"});
        conv.row({std::string("theta_x"), leg.numeric, leg.predicted, std::fabs(leg.numeric - leg.predicted)});
        conv.row({std::string("boundary"), boundary, predicted, std::fabs(boundary - predicted)});
        o.files.emplace_back("convolution.csv", std::move(conv));
        return o;
    };
}

Job validate_job(const json& cfg) {
    allow_keys(cfg, "config", {"seed", "checks", "threads"});
    validation::Reference ref;
    if (cfg.contains("seed")) {
        if (!cfg.at("seed").is_number_unsigned()) throw ConfigError("seed must be a non-negative integer");
        ref.seed = cfg.at("seed").get<std::uint64_t>();
    }
    std::vector<int> ids;
    if (cfg.contains("checks")) {
        for (double v : numbers(cfg, "config", "checks")) {
            const int id = static_cast<int>(v);
            if (id != v || id < 1 || id > 10) throw ConfigError("checks must be integers in 1..10");
            ids.push_back(id);
        }
    } else {
        for (int i = 1; i <= 10; ++i) ids.push_back(i);
    }
    return [=] {
        Outcome o;
        const auto suite = validation::suite();
        Csv csv({"id", "name", "status", "measured", "threshold"});
        o.results["checks"] = json::array();
        bool all = true;
        for (int id : ids) {
            const auto r = suite[id - 1](ref);
            all = all && r.pass;
            csv.row({static_cast<double>(r.id), r.name, std::string(r.pass ? "pass" : "fail"), r.measured, r.threshold});
            o.results["checks"].push_back({{"id", r.id},
                                           {"name", r.name},
                                           {"status", r.pass ? "pass" : "fail"},
                                           {"measured", r.measured},
                                           {"threshold", r.threshold},
                                           {"seconds", r.seconds},
                                           {"detail", r.detail}});
            std::cout << (r.pass ? "PASS " : "FAIL ") << r.id << ' ' << r.name << ": " << r.detail << '\n';
        }
        o.results["seed"] = ref.seed;
        o.files.emplace_back("validate.csv", std::move(csv));
        o.exit_code = all ? 0 : 1;
        return o;
    };
}

const std::map<std::string, std::function<Job(const json&)>>& commands() {
    static const std::map<std::string, std::function<Job(const json&)>> table{
        {"kernel-eval", kernel_eval},       {"green-eval", green_eval},         {"solve-linear", solve_linear_job},
        {"solve-esjj", solve_esjj_job},     {"asymptotics", asymptotics_job},   {"validate", validate_job},
    };
    return table;
}

void write_report(const fs::path& dir, json report) {
    std::ofstream out(dir / "report.json", std::ios::binary);
    out << report.dump(2) << '\n';
}

int run(const std::string& command, const std::string& config_path, const std::string& out_dir, int threads_flag) {
    json cfg;
    Job job;
    int threads = 0;
    try {
        cfg = read_config(config_path);
        job = commands().at(command)(cfg);
        threads = integer(cfg, "config", "threads", 0);
        if (threads < 0) throw ConfigError("threads must be >= 0 (0 = all available)");
    } catch (const Error& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    }
    if (threads_flag >= 0) threads = threads_flag;
    set_threads(threads);

    const fs::path dir(out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        std::cerr << "configuration error: cannot create output directory " << dir << '\n';
        return 2;
    }

    json report{{"command", command}, {"version", kVersion}, {"config", cfg}, {"threads", thread_count()}};
    const auto start = std::chrono::steady_clock::now();
    int code = 0;
    try {
        Outcome o = job();
        for (const auto& [name, csv] : o.files) csv.write(dir / name);
        report["results"] = o.results;
        report["outputs"] = json::array();
        for (const auto& f : o.files) report["outputs"].push_back(f.first);
        code = o.exit_code;
        report["status"] = code == 0 ? "ok" : "validation_failure";
    } catch (const Error& e) {
        code = e.code() == 2 ? 2 : 3;
        report["status"] = code == 2 ? "configuration_error" : "numerical_failure";
        report["error"] = e.what();
        std::cerr << e.what() << '\n';
    }
    report["exit_code"] = code;
    report["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_report(dir, report);
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"memkernel: integro-differential memory-kernel operator toolkit"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1, 1);
    std::string config, out = "out";
    int threads = -1;
    for (const auto& [name, _] : commands()) {
        auto* sc = app.add_subcommand(name, "run " + name);
        sc->add_option("--config", config, "JSON configuration file")->required();
        sc->add_option("--out", out, "output directory");
        sc->add_option("--threads", threads, "worker threads (0 = all available)")->check(CLI::NonNegativeNumber);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    return run(app.get_subcommands().front()->get_name(), config, out, threads);
}
