#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "memkernel/esjj.hpp"
#include "memkernel/fd_oracle.hpp"
#include "memkernel/ibvp_solver.hpp"
#include "memkernel/kernel.hpp"
#include "memkernel/theta_green.hpp"

// The acceptance suite. Each check reports a measured quantity against a fixed threshold.

namespace memkernel::validation {

struct CheckResult {
    int id = 0;
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double threshold = 0.0;
    double seconds = 0.0;
    std::string detail;
};

struct Reference {
    OperatorParams params;  // {eps=1, a=0.5, b=0.5, beta=1}
    SeriesControl control;
    StripDomain domain;
    EsjjParams esjj{1.0, 0.5, 2.0, 0.3, 1.0};
    std::uint64_t seed = 20240607;
};

namespace detail {

template <class Body>
CheckResult timed(int id, std::string name, double threshold, double time_limit, Body body) {
    CheckResult r;
    r.id = id;
    r.name = std::move(name);
    r.threshold = threshold;
    const auto start = std::chrono::steady_clock::now();
    try {
        body(r);
    } catch (const Error& e) {
        r.pass = false;
        r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (r.seconds > time_limit) {
        r.pass = false;
        r.detail += "; runtime " + std::to_string(r.seconds) + " s exceeds " + std::to_string(time_limit) + " s";
    }
    return r;
}

inline std::string fmt(double v) {
    std::ostringstream s;
    s.precision(3);
    s << std::scientific << v;
    return s.str();
}

inline EsjjProblem reference_esjj(const Reference& ref) {
    EsjjProblem pr;
    pr.params = ref.esjj;
    pr.horizon = 2.0;
    return pr;
}

// Memory integral of e^{-tau}: int_0^t e^{-beta(t - tau)} e^{-tau} dtau.
inline double exp_memory(double t, double beta) {
    if (std::fabs(beta - 1.0) < 1e-12) return t * std::exp(-t);
    return (std::exp(-t) - std::exp(-beta * t)) / (beta - 1.0);
}

inline double manufactured_error(const Reference& ref, int cells, int steps) {
    const auto& p = ref.params;
    const double L = ref.domain.length, k = std::numbers::pi / L;
    DirichletProblem prob;
    prob.params = p;
    prob.domain = ref.domain;
    prob.horizon = 1.0;
    prob.u0 = [k](double x) { return std::sin(k * x); };
    prob.source = SourceSpec::linear([=](double x, double t) {
        const double e = std::exp(-t);
        return std::sin(k * x) * ((-1.0 + p.eps * k * k + p.a) * e + p.b * exp_memory(t, p.beta));
    });
    const GridSolution s = solve_linear(prob, GridSpec{cells, steps}, ref.control);
    double err = 0.0;
    for (std::size_t j = 0; j < s.t_nodes.size(); ++j)
        for (std::size_t i = 0; i < s.x_nodes.size(); ++i)
            err = std::max(err, std::fabs(s.values(j, i) - std::exp(-s.t_nodes[j]) * std::sin(k * s.x_nodes[i])));
    return err;
}

inline double equivalence_gap(const Reference& ref, int cells, int picard_steps, double fd_dt) {
    const EsjjProblem pr = reference_esjj(ref);
    const int stride = static_cast<int>(std::lround(pr.horizon / fd_dt)) / picard_steps;
    const GridSolution fd = solve_pde_esjj(pr, FdGrid{cells, fd_dt, FdGrid::Scheme::semi_implicit, stride});
    const GridSolution pic = solve_esjj(pr, GridSpec{cells, picard_steps}, ref.control);
    return max_abs_diff(fd.values, pic.values);
}

}  // namespace detail

inline CheckResult laplace_identity(const Reference& ref) {
    return detail::timed(1, "Laplace identity", 1e-6, 10.0, [&](CheckResult& r) {
        double worst = 0.0;
        for (double x : {0.0, 0.5, 1.0, 2.0})
            for (double s : {0.5, 1.0, 2.0}) {
                const LaplaceCheck lc = laplace_check(x, s, ref.params, ref.control);
                worst = std::max(worst, std::fabs(lc.numeric - lc.closed_form));
            }
        r.measured = worst;
        r.pass = worst <= r.threshold;
        r.detail = "max |numeric - closed form| over 12 (r, s) pairs";
    });
}

inline CheckResult green_equivalence(const Reference& ref) {
    return detail::timed(2, "Green representation equivalence", 1e-8, 60.0, [&](CheckResult& r) {
        SeriesControl c = ref.control;
        c.n_images = 16;
        const double L = ref.domain.length;
        const std::vector<double> ts{0.05, 0.1, 0.5, 1.0, 5.0};
        std::vector<double> worst(17 * ts.size(), 0.0);
        parallel_for(0, static_cast<int>(worst.size()), [&](int n) {
            const double x = L * (n % 17) / 16.0, t = ts[n / 17];
            for (int k = 0; k <= 16; ++k) {
                const double xi = L * k / 16.0;
                const double d = green(x, xi, t, ref.params, ref.domain, c) -
                                 eigen_green(x, xi, t, ref.params, ref.domain, 200);
                worst[n] = std::max(worst[n], std::fabs(d));
            }
        });
        r.measured = *std::max_element(worst.begin(), worst.end());
        r.pass = r.measured <= r.threshold;
        r.detail = "17x17x5 grid, 16 images, 200 modes";
    });
}

inline CheckResult dirichlet_recovery(const Reference& ref) {
    return detail::timed(3, "Dirichlet recovery", 5e-4, 600.0, [&](CheckResult& r) {
        DirichletProblem prob;
        prob.params = ref.params;
        prob.domain = ref.domain;
        prob.horizon = 5.0;
        prob.u0 = [](double x) { return 0.5 * x; };
        prob.g1 = [](double t) { return -std::expm1(-t); };
        prob.g2 = [](double) { return 0.5; };
        const GridSolution s = solve_linear(prob, GridSpec{64, 500}, ref.control);
        const double column = s.diagnostics.boundary_error;
        // Off-grid evaluation a short distance inside each edge.
        const double delta = 1e-5, L = ref.domain.length;
        const std::vector<double> ts{0.01, 0.05, 0.2, 1.0, 2.5, 5.0};
        std::vector<double> near(ts.size());
        parallel_for(0, static_cast<int>(ts.size()), [&](int n) {
            const double t = ts[n];
            const double left = evaluate_linear_point(prob, 64, delta, t, ref.control);
            const double right = evaluate_linear_point(prob, 64, L - delta, t, ref.control);
            near[n] = std::max(std::fabs(left - prob.g1(t)), std::fabs(right - prob.g2(t)));
        });
        const double inner = *std::max_element(near.begin(), near.end());
        r.measured = std::max(column, inner);
        r.pass = r.measured <= r.threshold;
        r.detail = "boundary columns " + detail::fmt(column) + ", at distance 1e-5 " + detail::fmt(inner);
    });
}

inline CheckResult manufactured_solution(const Reference& ref) {
    return detail::timed(4, "Manufactured solution", 1e-4, 600.0, [&](CheckResult& r) {
        const double coarse = detail::manufactured_error(ref, 64, 20);
        const double fine = detail::manufactured_error(ref, 128, 40);
        r.measured = coarse;
        r.pass = coarse <= r.threshold && coarse / fine >= 3.0;
        r.detail = "65 nodes " + detail::fmt(coarse) + ", 129 nodes " + detail::fmt(fine) + ", ratio " +
                   detail::fmt(coarse / fine);
    });
}

inline CheckResult esjj_equivalence(const Reference& ref) {
    return detail::timed(5, "ESJJ equivalence", 2e-3, 300.0, [&](CheckResult& r) {
        const double coarse = detail::equivalence_gap(ref, 32, 100, 2e-3);
        const double fine = detail::equivalence_gap(ref, 64, 200, 1e-3);
        r.measured = fine;
        r.pass = fine <= r.threshold && fine < coarse;
        r.detail = "h=1/32 " + detail::fmt(coarse) + ", h=1/64 " + detail::fmt(fine);
    });
}

inline CheckResult contraction(const Reference& ref) {
    return detail::timed(6, "Picard contraction", 1.0, 600.0, [&](CheckResult& r) {
        const EsjjProblem pr = detail::reference_esjj(ref);
        const DirichletProblem d = mapped_problem(pr);
        const GridSpec grid{64, 100};
        PicardOptions opt;
        const GridSolution a = solve_nonlinear_picard(d, grid, ref.control, opt);
        Matrix guess(grid.nt_steps, grid.nx_cells + 1);
        for (std::size_t j = 0; j < guess.rows(); ++j)
            for (std::size_t i = 0; i < guess.cols(); ++i)
                guess(j, i) = 0.5 * std::cos(3.0 * a.x_nodes[i]) * (1.0 + a.t_nodes[j]);
        opt.initial_guess = guess;
        const GridSolution b = solve_nonlinear_picard(d, grid, ref.control, opt);
        const double ratio = std::max(a.diagnostics.max_ratio(), b.diagnostics.max_ratio());
        const double gap = max_abs_diff(a.values, b.values);
        r.measured = ratio;
        r.pass = ratio < 1.0 && gap <= 2.0 * opt.tol;
        r.detail = "max ratio " + detail::fmt(ratio) + ", fixed-point gap " + detail::fmt(gap) + " (limit " +
                   detail::fmt(2.0 * opt.tol) + ")";
    });
}

inline CheckResult apriori(const Reference& ref) {
    return detail::timed(7, "A-priori bound", 1.0, 600.0, [&](CheckResult& r) {
        std::mt19937_64 rng(ref.seed);
        std::uniform_real_distribution<double> U(0.0, 1.0);
        double worst = 0.0, worst_literal = 0.0;
        const double pi = std::numbers::pi;
        for (int trial = 0; trial < 20; ++trial) {
            EsjjProblem pr;
            auto& e = pr.params;
            e.eps = 0.3 + 1.7 * U(rng);
            e.alpha = (0.1 + 0.8 * U(rng)) / e.eps;
            const double b = (1.0 - e.alpha * e.eps) / (e.eps * e.eps);
            e.lam = 2.0 * std::sqrt(b) * (1.1 + 1.4 * U(rng));
            e.gamma = 2.0 * U(rng) - 1.0;
            e.length = 0.5 + 1.5 * U(rng);
            pr.horizon = 2.0;
            const double L = e.length;
            const int m = 1 + static_cast<int>(3 * U(rng));
            const double su = U(rng) < 0.5 ? -1.0 : 1.0;
            pr.u0 = [=](double x) { return su * std::sin(m * pi * x / L); };
            const double c1 = 2.0 * U(rng) - 1.0, c2 = 2.0 * U(rng) - 1.0;
            auto raw = [=](double x) { return c1 * std::sin(pi * x / L) + c2 * std::sin(2.0 * pi * x / L); };
            double vs = 0.0;
            for (int i = 0; i <= 2000; ++i) vs = std::max(vs, std::fabs(raw(L * i / 2000.0)));
            pr.v0 = [=](double x) { return raw(x) / vs; };

            const OperatorParams p = map_params(e);
            const DirichletProblem d = mapped_problem(pr);
            const GridSolution s = solve_nonlinear_picard(d, GridSpec{32, 40}, ref.control);

            double nu = 0.0, nv = 0.0;
            for (int i = 0; i <= 2000; ++i) {
                const double x = L * i / 2000.0;
                nu = std::max(nu, std::fabs(d.u0(x)));
                nv = std::max(nv, std::fabs(std::exp(-0.5 * e.lam * x) * pr.v0(x)));
            }
            EsjjSource probe(e, p, d.u0, operator_velocity(pr));
            probe.reset(uniform_nodes(0.0, L, 2000), 1.0);
            double nc = 0.0;
            for (double v : probe.data_term()) nc = std::max(nc, std::fabs(v));
            double nf = 0.0;
            for (std::size_t i = 0; i < s.x_nodes.size(); ++i) {
                nf = std::max(nf, std::fabs(f1_source(s.x_nodes[i], d.u0(s.x_nodes[i]), e)));
                for (std::size_t j = 0; j < s.t_nodes.size(); ++j)
                    nf = std::max(nf, std::fabs(f1_source(s.x_nodes[i], s.values(j, i), e)));
            }
            for (std::size_t j = 0; j < s.t_nodes.size(); ++j) {
                const double t = s.t_nodes[j];
                const double bound = apriori_bound(t, nu, nc, nf, p);
                const double literal = apriori_bound(t, nu, nv, nf, p);
                for (std::size_t i = 0; i < s.x_nodes.size(); ++i) {
                    worst = std::max(worst, std::fabs(s.values(j, i)) / bound);
                    worst_literal = std::max(worst_literal, std::fabs(s.values(j, i)) / literal);
                }
            }
        }
        r.measured = worst;
        r.pass = worst <= 1.0;
        r.detail = "max |u|/bound over 20 problems " + detail::fmt(worst) + " (with |v0| in place of the full " +
                   "initial forcing: " + detail::fmt(worst_literal) + ")";
    });
}

inline CheckResult long_time(const Reference& ref) {
    return detail::timed(8, "Long-time asymptotics", 1e-4, 600.0, [&](CheckResult& r) {
        const EsjjParams& e = ref.esjj;
        DirichletProblem prob;
        prob.params = map_params(e);
        prob.domain.length = e.length;
        prob.horizon = 50.0;
        const double g1 = 1.0, g2 = 0.5;
        prob.u0 = [=](double x) { return g1 + (g2 - g1) * x / e.length; };
        prob.g1 = [=](double) { return g1; };
        prob.g2 = [=](double) { return g2; };
        const int cells = 64;
        const GridSolution s = solve_linear(prob, GridSpec{cells, 50}, ref.control);
        const auto bvp = steady_bvp(g1, g2, prob.params, prob.domain, cells);
        double to_bvp = 0.0, to_sinh = 0.0;
        const std::size_t last = s.t_nodes.size() - 1;
        for (std::size_t i = 0; i < s.x_nodes.size(); ++i) {
            to_bvp = std::max(to_bvp, std::fabs(s.values(last, i) - bvp[i]));
            to_sinh = std::max(to_sinh, std::fabs(s.values(last, i) - boundary_asymptote(s.x_nodes[i], g1, g2, e)));
        }
        const double sigma_gap = std::fabs(prob.params.sigma0() - 0.5 * e.lam);
        r.measured = std::max(to_bvp, to_sinh);
        r.pass = r.measured <= r.threshold && sigma_gap < 1e-14;
        r.detail = "vs steady_bvp " + detail::fmt(to_bvp) + ", vs sinh profile " + detail::fmt(to_sinh) +
                   ", |sigma0 - lam/2| " + detail::fmt(sigma_gap);
    });
}

inline CheckResult convolution_limits(const Reference& ref) {
    return detail::timed(9, "Convolution limits", 1e-5, 600.0, [&](CheckResult& r) {
        auto fn = [](std::function<double(double)> v, double lim, double init) {
            TimeFunction f;
            f.value = std::move(v);
            f.limit = lim;
            f.initial = init;
            return f;
        };
        const TimeFunction ramp = fn([](double t) { return -std::expm1(-t); }, 1.0, 0.0);
        const TimeFunction fast = fn([](double t) { return -std::expm1(-2.0 * t); }, 1.0, 0.0);
        const TimeFunction gamma2 = fn([](double t) { return 0.75 - 0.5 * (1.0 + t) * std::exp(-t); }, 0.75, 0.25);
        auto p = ref.params;
        auto d = ref.domain;
        auto c = ref.control;
        const TimeFunction thx = fn([=](double t) { return t < c.t_floor ? 0.0 : theta_x_retry(0.5, t, p, d, c); }, 0.0, 0.0);

        struct Pair {
            TimeFunction chi, h;
        };
        std::vector<Pair> pairs{
            {fn([](double) { return 1.0; }, 1.0, 1.0), ramp},
            {fn([](double t) { return std::exp(-t); }, 0.0, 1.0), fast},
            {fn([](double t) { return 1.0 + std::exp(-2.0 * t); }, 1.0, 2.0), ramp},
            {fn([](double t) { return 2.0 - std::exp(-3.0 * t); }, 2.0, 1.0), gamma2},
            {thx, ramp},
        };
        double worst = 0.0, theta_leg = 0.0;
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            const ConvolutionLimit cl = convolution_limit(pairs[k].chi, pairs[k].h, 40.0, 1e-9, 1e-6);
            const double gap = std::fabs(cl.numeric - cl.predicted);
            worst = std::max(worst, gap);
            if (k + 1 == pairs.size()) theta_leg = cl.numeric;
        }
        r.measured = worst;
        r.pass = worst <= r.threshold;
        r.detail = "5 pairs at horizon 40; theta_x leg " + detail::fmt(theta_leg);
    });
}

inline CheckResult kernel_estimates(const Reference& ref) {
    return detail::timed(10, "Kernel estimates", 1e-6, 600.0, [&](CheckResult& r) {
        const auto& p = ref.params;
        const auto& c = ref.control;
        const double pi = std::numbers::pi;
        int failed = 0;
        std::ostringstream note;
        for (double t : {0.1, 0.5, 1.0, 2.0, 5.0}) {
            const double envelope = (1.0 + std::sqrt(p.b) * pi * t) * std::exp(-p.omega() * t);
            if (kernel_l1_norm(t, p, c) > envelope) ++failed;
            if (kernel1_l1_norm(t, p, c) > e_of_t(t, p)) ++failed;
            const double rr = 1.0 / std::sqrt(p.eps);
            const double kx_bound = rr * std::exp(-rr * rr / (4 * t)) / (4 * std::sqrt(pi * p.eps * t * t * t)) *
                                    (1 + 4 * p.b * t * t) * std::exp(-p.omega() * t);
            if (std::fabs(eval_kx(1.0, t, p, c)) > kx_bound) ++failed;
            auto th = [&](double xi) { return std::fabs(theta(std::fabs(0.5 - xi), t, p, ref.domain, c)); };
            if (quad::integrate(th, 0.0, ref.domain.length, 1e-9, "theta L1") > envelope) ++failed;
        }
        double saturation = 0.0, C = 0.0;
        for (double x : {0.25, 0.5}) {
            const double a = theta_x_time_integral(x, 25.0, p, ref.domain, c, true);
            const double b = theta_x_time_integral(x, 50.0, p, ref.domain, c, true);
            saturation = std::max(saturation, std::fabs(b - a));
            C = std::max(C, b);
        }
        r.measured = saturation;
        r.pass = failed == 0 && saturation < r.threshold;
        note << failed << " of 20 inequality checks failed; int |theta_x| saturation " << detail::fmt(saturation)
             << ", empirical C " << detail::fmt(C);
        r.detail = note.str();
    });
}

inline std::vector<std::function<CheckResult(const Reference&)>> suite() {
    return {laplace_identity, green_equivalence, dirichlet_recovery, manufactured_solution, esjj_equivalence,
            contraction,      apriori,           long_time,          convolution_limits,    kernel_estimates};
}

inline std::vector<CheckResult> run_all(const Reference& ref = {}) {
    std::vector<CheckResult> out;
    for (auto& check : suite()) out.push_back(check(ref));
    return out;
}

}  // namespace memkernel::validation
