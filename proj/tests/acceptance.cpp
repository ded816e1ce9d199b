/*
 Copyright 2026 The asrti Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "advanced_problem.hpp"
#include "oracles.hpp"

#include "asrti/benchmark.hpp"
#include "asrti/errors.hpp"
#include "asrti/integrator.hpp"
#include "asrti/mli.hpp"
#include "asrti/pendulum.hpp"
#include "asrti/qp.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

using namespace asrti;

namespace
{
    using Clock = std::chrono::steady_clock;

    double seconds_since(Clock::time_point t0)
    {
        return std::chrono::duration<double>(Clock::now() - t0).count();
    }

    struct Outcome
    {
        bool pass = false;
        std::string detail;
    };

    std::string fmt(const char *f, double a)
    {
        char buf[64];
        std::snprintf(buf, sizeof buf, f, a);
        return buf;
    }

    /// Least-squares slope of log(y) over log(x).
    double loglog_slope(const std::vector<double> &x, const std::vector<double> &y)
    {
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        const double n = static_cast<double>(x.size());
        for (std::size_t i = 0; i < x.size(); ++i)
        {
            const double lx = std::log(x[i]), ly = std::log(y[i]);
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
        }
        return (n * sxy - sx * sy) / (n * sxx - sx * sx);
    }

    Outcome qp_oracle_equivalence()
    {
        const auto t0 = Clock::now();
        std::mt19937_64 rng(2024);
        std::uniform_int_distribution<int> dim(1, 6);
        double worst_x = 0.0, worst_mu = 0.0;
        int degenerate = 0;
        for (int t = 0; t < 200; ++t)
        {
            const oracle::RandomQp p = oracle::random_qp(rng, dim(rng), dim(rng));
            const auto ref = oracle::enumerate_active_sets(p.H, p.q, p.C, p.b);
            if (!ref)
                return {false, "enumeration found no KKT point in trial " + std::to_string(t)};
            const DenseQpSolution s = solve_dense_qp(p.H, p.q, p.C, p.b);
            worst_x = std::max(worst_x, (s.x - ref->x).lpNorm<Eigen::Infinity>());
            if (ref->dual_unique)
                worst_mu = std::max(worst_mu, (s.multipliers - ref->mu).lpNorm<Eigen::Infinity>());
            else
            {
                // non-unique duals: check stationarity and sign instead
                ++degenerate;
                const Vector r = p.H * s.x + p.q - p.C.transpose() * s.multipliers;
                worst_mu = std::max({worst_mu, r.lpNorm<Eigen::Infinity>(), std::max(0.0, -s.multipliers.minCoeff())});
            }
        }
        const double secs = seconds_since(t0);
        Outcome o;
        o.pass = worst_x <= 1e-8 && worst_mu <= 1e-8 && secs < 10.0;
        o.detail = "200 QPs, max primal err " + fmt("%.1e", worst_x) + ", max dual err " + fmt("%.1e", worst_mu) +
                   ", degenerate " + std::to_string(degenerate) + ", " + fmt("%.2f s", secs);
        return o;
    }

    Outcome condensing_equivalence()
    {
        const auto t0 = Clock::now();
        std::mt19937_64 rng(2025);
        double worst_kkt = 0.0, worst_match = 0.0;
        for (int t = 0; t < 100; ++t)
        {
            Vector x;
            const int N = 1 + t % 5;
            const OcpQpData d = oracle::random_ocp_qp(rng, N, 1 + t % 3, 1 + (t / 5) % 2, 2, x);
            const CondensedLhs lhs = condense_lhs(d.matrices);
            const QpSolution s = condense_rhs_and_solve(lhs, d.vectors, x);
            worst_kkt = std::max(worst_kkt, oracle::full_kkt_error(d, x, s.dw, s.lambda, s.mu).max());

            std::vector<int> active;
            for (int i = 0; i < s.mu.size(); ++i)
                if (s.mu[i] > 0.0)
                    active.push_back(i);
            const oracle::FullKkt ref = oracle::solve_full_kkt(d, x, active);
            worst_match = std::max({worst_match, (s.dw - ref.dw).lpNorm<Eigen::Infinity>(),
                                    (s.lambda - ref.lambda).lpNorm<Eigen::Infinity>(),
                                    (s.mu - ref.mu).lpNorm<Eigen::Infinity>()});
        }
        const double secs = seconds_since(t0);
        Outcome o;
        o.pass = worst_kkt <= 1e-8 && worst_match <= 1e-8 && secs < 10.0;
        o.detail = "100 OCP QPs, max full KKT err " + fmt("%.1e", worst_kkt) + ", max diff to dense KKT " +
                   fmt("%.1e", worst_match) + ", " + fmt("%.2f s", secs);
        return o;
    }

    Outcome integrator_order()
    {
        // x1' = -x1^2, x2' = x1 x2 + u with x1(0) = 1:
        // x1 = 1 / (1 + t), x2 = (1 + t) (x2(0) + u ln(1 + t))
        OdeModel model;
        model.nx = 2;
        model.nu = 1;
        model.rhs = [](const Vector &x, const Vector &u)
        { return Eigen::Vector2d(-x[0] * x[0], x[0] * x[1] + u[0]).eval(); };
        model.rhs_jacobians = [](const Vector &x, const Vector &, Matrix &dfdx, Matrix &dfdu)
        {
            dfdx.resize(2, 2);
            dfdx << -2.0 * x[0], 0.0, x[1], x[0];
            dfdu = Eigen::Vector2d(0.0, 1.0);
        };
        const double T = 1.0, u = 0.5, x20 = 0.3;
        const Eigen::Vector2d exact(1.0 / (1.0 + T), (1.0 + T) * (x20 + u * std::log(1.0 + T)));
        const Vector x0 = Eigen::Vector2d(1.0, x20);
        RadauOptions tight;
        tight.newton_tol = 1e-14;

        std::vector<double> hs, errs;
        std::string seq;
        for (int steps : {100, 316, 1000, 3162, 10000})
        {
            const double err = (simulate_plant(model, x0, Vector::Constant(1, u), T, steps, tight) - exact).norm();
            seq += " " + fmt("%.1e", err);
            // below ~1e-13 the error is round-off, not truncation
            if (err < 1e-13)
                break;
            hs.push_back(T / steps);
            errs.push_back(err);
        }
        if (hs.size() < 3)
            return {false, "fewer than 3 step sizes above the noise floor:" + seq};
        const double slope = loglog_slope(hs, errs);

        // sensitivities of one pendulum step against central differences
        const OdeModel pend = pendulum_model(PendulumParams{});
        std::mt19937_64 rng(11);
        double worst = 0.0;
        for (int t = 0; t < 50; ++t)
        {
            const Vector x = oracle::random_vector(rng, 4);
            const Vector uu = oracle::random_vector(rng, 1, 20.0);
            const IntegrationResult r = radau3_step(pend, x, uu, 0.05, true, tight);
            const Matrix fx = oracle::fd_jacobian([&](const Vector &z)
                                                  { return radau3_step(pend, z, uu, 0.05, false, tight).x_next; },
                                                  x);
            const Matrix fu = oracle::fd_jacobian([&](const Vector &z)
                                                  { return radau3_step(pend, x, z, 0.05, false, tight).x_next; },
                                                  uu);
            worst = std::max({worst, oracle::rel_error(r.sens_x, fx), oracle::rel_error(r.sens_u, fu)});
        }
        Outcome o;
        o.pass = std::abs(slope - 3.0) <= 0.3 && worst <= 1e-5;
        o.detail = "slope " + fmt("%.3f", slope) + " over " + std::to_string(hs.size()) + " step sizes (errors" + seq +
                   "), sensitivity rel err " + fmt("%.1e", worst);
        return o;
    }

    Outcome level_b_identity(const oracle::AdvancedProblem &p)
    {
        PreparedLinearization prep = prepare_linearization(*p.nlp, p.z_hat, p.x0);
        const Iterate z = level_b(prep, *p.nlp, p.x_pred, p.z_hat, 20);
        const KktResidual r = eval_kkt(*p.nlp, z, p.x_pred);
        const double beta = beta_vector(prep, z, *p.nlp).lpNorm<Eigen::Infinity>();
        Outcome o;
        o.pass = r.eq <= 1e-8 && std::abs(r.stat - beta) <= 1e-6;
        o.detail = "eq " + fmt("%.1e", r.eq) + ", stat " + fmt("%.6e", r.stat) + ", |beta| " + fmt("%.6e", beta);
        return o;
    }

    Outcome contraction_ordering(const oracle::AdvancedProblem &p)
    {
        // the tight SQP solution is accurate to a few 1e-11 in distance
        constexpr double floor = 1e-9;
        auto sequence = [&](bool level_c_run)
        {
            std::vector<double> e{distance(p.z_hat, p.z_star)};
            const IterateObserver obs = [&](int, const Iterate &z)
            { e.push_back(distance(z, p.z_star)); };
            PreparedLinearization prep = prepare_linearization(*p.nlp, p.z_hat, p.x0);
            if (level_c_run)
                level_c(prep, *p.nlp, p.x_pred, p.z_hat, 10, {}, obs);
            else
                level_d(*p.nlp, p.x_pred, p.z_hat, 10, {}, obs);
            while (e.size() > 3 && e.back() < floor)
                e.pop_back();
            return e;
        };
        const std::vector<double> ec = sequence(true), ed = sequence(false);
        auto monotone = [](const std::vector<double> &e)
        {
            for (std::size_t j = 1; j < e.size(); ++j)
                if (!(e[j] < e[j - 1]))
                    return false;
            return true;
        };
        const ContractionDiagnostics c = estimate_contraction(ec), d = estimate_contraction(ed);
        Outcome o;
        o.pass = monotone(ec) && monotone(ed) && d.kappa <= c.kappa;
        o.detail = std::string("C monotone ") + (monotone(ec) ? "yes" : "no") + ", D monotone " +
                   (monotone(ed) ? "yes" : "no") + ", kappa_C " + fmt("%.3e", c.kappa) + ", kappa_D " +
                   fmt("%.3e", d.kappa);
        return o;
    }

    void print_table(const BenchmarkResults &res)
    {
        std::ostringstream os;
        write_results_csv(os, res);
        std::istringstream is(os.str());
        for (std::string line; std::getline(is, line);)
            std::cout << "    " << line << '\n';
    }

    Outcome table_reproduction(const BenchmarkResults &res)
    {
        const double rti = res.row("rti").rel_subopt_pct;
        bool worst = rti >= 1.0;
        for (const ResultRow &r : res.rows)
            if (r.algorithm != "rti" && r.algorithm.rfind("sqp", 0) != 0 && !(r.rel_subopt_pct < rti))
                worst = false;
        const double a = res.row("as-rti-a").rel_subopt_pct;
        const double c2 = res.row("as-rti-c-2").rel_subopt_pct, d2 = res.row("as-rti-d-2").rel_subopt_pct;
        bool sig = true;
        std::string sig_detail;
        for (const char *n : {"1", "2"})
        {
            const ResultRow &b = res.row(std::string("as-rti-b-") + n);
            const ResultRow &c = res.row(std::string("as-rti-c-") + n);
            const bool ok = b.mean_g_norm_x1e3 < res.row("rti").mean_g_norm_x1e3 && b.rel_subopt_pct > c.rel_subopt_pct;
            sig = sig && ok;
            sig_detail += std::string(" B-") + n + (ok ? " ok" : " no");
        }
        int failed = res.reference.failed_scenarios;
        for (const ResultRow &r : res.rows)
            failed += r.failed_scenarios;

        const bool pa = worst, pb = a <= rti / 3.0, pc = c2 <= 0.2 && d2 <= 0.2, pt = res.wall_seconds < 300.0;
        Outcome o;
        o.pass = pa && pb && pc && sig && pt && failed == 0;
        o.detail = std::string("(a) ") + (pa ? "ok" : "no") + " RTI " + fmt("%.3f%%", rti) + "; (b) " +
                   (pb ? "ok" : "no") + " A " + fmt("%.3f%%", a) + " vs RTI/3 " + fmt("%.3f%%", rti / 3.0) + "; (c) " +
                   (pc ? "ok" : "no") + " C-2 " + fmt("%.3f%%", c2) + ", D-2 " + fmt("%.3f%%", d2) + "; (d)" +
                   sig_detail + "; runtime " + fmt("%.1f s", res.wall_seconds) + "; failed scenarios " +
                   std::to_string(failed);
        return o;
    }

    Outcome timing_split(const BenchmarkResults &res)
    {
        bool ok = true;
        std::string bad;
        for (const ResultRow &r : res.rows)
        {
            if (r.algorithm.rfind("sqp", 0) == 0)
            {
                if (!(r.max_prep_ms < 0.05 * r.max_feedback_ms))
                {
                    ok = false;
                    bad += " " + r.algorithm + " prep " + fmt("%.3f ms", r.max_prep_ms);
                }
                continue;
            }
            if (!(r.max_feedback_ms < r.max_prep_ms) || r.feedback_evaluations != 0)
            {
                ok = false;
                bad += " " + r.algorithm + " fb " + fmt("%.3f", r.max_feedback_ms) + "/prep " +
                       fmt("%.3f ms", r.max_prep_ms) + " evals " + std::to_string(r.feedback_evaluations);
            }
        }
        return {ok, ok ? "feedback < preparation and 0 feedback evaluations for all AS-RTI/RTI rows; SQP-n prep ~ 0"
                       : "violations:" + bad};
    }

    Outcome predictor_corrector()
    {
        // exact linearization: z = 0 solves the problem at x = 0 and has zero duals
        const ParametricNlp nlp = transcribe(build_pendulum_ocp());
        const Iterate z0 = nlp.zero_iterate();
        PreparedLinearization prep = prepare_linearization(nlp, z0, Vector::Zero(4));
        const Vector dir = (Vector(4) << 0.5, 0.2, 0.1, -0.1).finished();
        std::vector<double> deltas, errs;
        std::string seq;
        for (double delta : {1e-1, 3.16e-2, 1e-2, 3.16e-3, 1e-3})
        {
            const Vector x = delta * dir;
            const QpSolution qp = condense_rhs_and_solve(prep.lhs, prep.data.vectors, x);
            const SqpResult ref = sqp_solve(nlp, x, z0, 1e-13, 50);
            if (!qp.active_set.empty() || ref.z.mu.lpNorm<Eigen::Infinity>() > 0.0)
                return {false, "active set changed at delta " + fmt("%.1e", delta)};
            const double err = distance(Iterate{z0.w + qp.dw, qp.lambda, qp.mu}, ref.z);
            deltas.push_back(delta);
            errs.push_back(err);
            seq += " " + fmt("%.2e", err);
        }
        const double slope = loglog_slope(deltas, errs);
        return {slope >= 1.9, "slope " + fmt("%.3f", slope) + " over delta 1e-1..1e-3 (errors" + seq + ")"};
    }

    void report(int id, const std::string &name, const std::function<Outcome()> &run, bool &all)
    {
        Outcome o;
        try
        {
            o = run();
        }
        catch (const std::exception &e)
        {
            o = {false, std::string("exception: ") + e.what()};
        }
        all = all && o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << name << "): " << o.detail
                  << std::endl;
    }
} // namespace

int main()
{
    bool all = true;
    report(1, "QP oracle equivalence", qp_oracle_equivalence, all);
    report(2, "condensing equivalence", condensing_equivalence, all);
    report(3, "integrator order and sensitivities", integrator_order, all);

    std::optional<oracle::AdvancedProblem> problem;
    try
    {
        problem = oracle::pendulum_advanced_problem();
    }
    catch (const std::exception &e)
    {
        std::cout << "advanced problem setup failed: " << e.what() << std::endl;
    }
    auto need_problem = [&](Outcome (*f)(const oracle::AdvancedProblem &))
    {
        return [&, f]() -> Outcome
        {
            if (!problem)
                return {false, "no advanced problem"};
            return f(*problem);
        };
    };
    report(4, "level-B fixed point identity", need_problem(level_b_identity), all);
    report(5, "contraction ordering", need_problem(contraction_ordering), all);

    std::optional<BenchmarkResults> results;
    try
    {
        results = run_benchmark(BenchmarkConfig{}, default_algorithms());
        print_table(*results);
    }
    catch (const std::exception &e)
    {
        std::cout << "benchmark failed: " << e.what() << std::endl;
    }
    auto need_results = [&](Outcome (*f)(const BenchmarkResults &))
    {
        return [&, f]() -> Outcome
        {
            if (!results)
                return {false, "benchmark did not run"};
            return f(*results);
        };
    };
    report(6, "benchmark table reproduction", need_results(table_reproduction), all);
    report(7, "timing split", need_results(timing_split), all);
    report(8, "predictor-corrector scaling", predictor_corrector, all);
    return all ? 0 : 1;
}
