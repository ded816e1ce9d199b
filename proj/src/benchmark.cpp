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

#include "asrti/benchmark.hpp"
#include "asrti/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

namespace asrti
{

    namespace
    {
        using json = nlohmann::json;

        void reject_unknown(const json &obj, const std::string &where, std::initializer_list<const char *> keys)
        {
            if (!obj.is_object())
                throw ConfigurationError("config: '" + where + "' must be an object");
            const std::set<std::string> allowed(keys.begin(), keys.end());
            for (const auto &item : obj.items())
                if (!allowed.count(item.key()))
                    throw ConfigurationError("config: unknown key '" + where + "." + item.key() + "'");
        }

        template <class T>
        void read(const json &obj, const char *key, T &out)
        {
            if (obj.contains(key))
                out = obj.at(key).get<T>();
        }

        double nan()
        {
            return std::numeric_limits<double>::quiet_NaN();
        }

        bool finite(const Vector &v)
        {
            return v.allFinite();
        }
    } // namespace

    int ScenarioConfig::cycles() const
    {
        return static_cast<int>(std::lround(sim_time / sampling_time));
    }

    std::vector<int> ScenarioConfig::disturbance_cycles() const
    {
        std::vector<int> out;
        for (double t : disturbance_times)
            out.push_back(static_cast<int>(std::lround(t / sampling_time)));
        std::sort(out.begin(), out.end());
        return out;
    }

    void ScenarioConfig::validate() const
    {
        if (!(sampling_time > 0.0) || !(sim_time >= sampling_time))
            throw ConfigurationError("ScenarioConfig: invalid simulation or sampling time");
        if (std::abs(cycles() * sampling_time - sim_time) > 1e-9 * sim_time)
            throw ConfigurationError("ScenarioConfig: simulation time is not a multiple of the sampling time");
        if (scenarios < 1 || plant_substeps < 1)
            throw ConfigurationError("ScenarioConfig: scenarios and plant substeps must be >= 1");
        if (!std::isfinite(p0_min) || !std::isfinite(p0_max) || p0_min > p0_max)
            throw ConfigurationError("ScenarioConfig: invalid initial position range");
        if (!std::isfinite(disturbance_min) || !std::isfinite(disturbance_max) || disturbance_min > disturbance_max)
            throw ConfigurationError("ScenarioConfig: invalid disturbance range");
        const std::vector<int> dc = disturbance_cycles();
        for (std::size_t i = 0; i < dc.size(); ++i)
        {
            const double t = dc[i] * sampling_time;
            const bool on_grid = std::any_of(disturbance_times.begin(), disturbance_times.end(),
                                             [&](double d)
                                             { return std::abs(d - t) <= 1e-9; });
            if (!on_grid || dc[i] < 0 || dc[i] >= cycles())
                throw ConfigurationError("ScenarioConfig: disturbance times must lie on the sampling grid");
            if (i > 0 && dc[i] == dc[i - 1])
                throw ConfigurationError("ScenarioConfig: duplicate disturbance time");
        }
    }

    Scenario make_scenario(const ScenarioConfig &cfg, int index)
    {
        cfg.validate();
        if (index < 0)
            throw ConfigurationError("make_scenario: negative index");
        std::seed_seq seq{static_cast<std::uint64_t>(cfg.seed), static_cast<std::uint64_t>(index)};
        std::mt19937_64 rng(seq);
        std::uniform_real_distribution<double> p0(cfg.p0_min, cfg.p0_max);
        std::uniform_real_distribution<double> force(cfg.disturbance_min, cfg.disturbance_max);

        Scenario s;
        s.index = index;
        s.x0 = Vector::Zero(4);
        s.x0[0] = p0(rng);
        for (int c : cfg.disturbance_cycles())
            s.disturbances[c] = force(rng);
        return s;
    }

    BenchmarkConfig BenchmarkConfig::from_json(const std::string &text)
    {
        json doc;
        try
        {
            doc = json::parse(text);
        }
        catch (const json::exception &e)
        {
            throw ConfigurationError(std::string("config: ") + e.what());
        }

        BenchmarkConfig cfg;
        try
        {
            reject_unknown(doc, "root", {"scenario", "pendulum", "ocp", "reference", "qp", "integrator"});
            if (doc.contains("scenario"))
            {
                const json &j = doc["scenario"];
                reject_unknown(j, "scenario",
                               {"sim_time", "sampling_time", "scenarios", "p0_min", "p0_max", "disturbance_times",
                                "disturbance_min", "disturbance_max", "seed", "plant_substeps"});
                ScenarioConfig &s = cfg.scenario;
                read(j, "sim_time", s.sim_time);
                read(j, "sampling_time", s.sampling_time);
                read(j, "scenarios", s.scenarios);
                read(j, "p0_min", s.p0_min);
                read(j, "p0_max", s.p0_max);
                read(j, "disturbance_times", s.disturbance_times);
                read(j, "disturbance_min", s.disturbance_min);
                read(j, "disturbance_max", s.disturbance_max);
                read(j, "seed", s.seed);
                read(j, "plant_substeps", s.plant_substeps);
            }
            for (PendulumOcpConfig *o : {&cfg.ocp, &cfg.reference_ocp})
            {
                o->sampling_time = cfg.scenario.sampling_time;
                if (doc.contains("pendulum"))
                {
                    const json &j = doc["pendulum"];
                    reject_unknown(j, "pendulum", {"cart_mass", "pole_mass", "pole_length", "gravity"});
                    read(j, "cart_mass", o->params.cart_mass);
                    read(j, "pole_mass", o->params.pole_mass);
                    read(j, "pole_length", o->params.pole_length);
                    read(j, "gravity", o->params.gravity);
                }
                if (doc.contains("ocp"))
                {
                    const json &j = doc["ocp"];
                    reject_unknown(j, "ocp",
                                   {"horizon_time", "intervals", "first_interval", "state_weights", "control_weight",
                                    "control_bound"});
                    read(j, "horizon_time", o->horizon_time);
                    read(j, "state_weights", o->state_weights);
                    read(j, "control_weight", o->control_weight);
                    read(j, "control_bound", o->control_bound);
                    if (o == &cfg.ocp)
                    {
                        read(j, "intervals", o->intervals);
                        read(j, "first_interval", o->first_interval);
                    }
                }
                if (doc.contains("integrator"))
                {
                    const json &j = doc["integrator"];
                    reject_unknown(j, "integrator", {"newton_tol", "max_newton_iters"});
                    read(j, "newton_tol", o->integrator.newton_tol);
                    read(j, "max_newton_iters", o->integrator.max_newton_iters);
                }
            }
            if (doc.contains("reference"))
            {
                const json &j = doc["reference"];
                reject_unknown(j, "reference", {"intervals", "tol", "max_iterations"});
                read(j, "intervals", cfg.reference_ocp.intervals);
                read(j, "tol", cfg.reference_tol);
                read(j, "max_iterations", cfg.reference_max_iterations);
            }
            if (doc.contains("qp"))
            {
                const json &j = doc["qp"];
                reject_unknown(j, "qp", {"max_iterations", "regularization", "refinement_steps"});
                read(j, "max_iterations", cfg.qp.max_iterations);
                read(j, "refinement_steps", cfg.qp.refinement_steps);
                read(j, "regularization", cfg.qp.regularization);
            }
        }
        catch (const json::exception &e)
        {
            throw ConfigurationError(std::string("config: ") + e.what());
        }
        cfg.validate();
        return cfg;
    }

    BenchmarkConfig BenchmarkConfig::from_file(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw ConfigurationError("config: cannot open '" + path + "'");
        std::stringstream buf;
        buf << in.rdbuf();
        return from_json(buf.str());
    }

    void BenchmarkConfig::validate() const
    {
        scenario.validate();
        ocp.params.validate();
        ocp.grid();
        reference_ocp.grid();
        if (ocp.state_weights.size() != 4 || reference_ocp.state_weights.size() != 4)
            throw ConfigurationError("BenchmarkConfig: four state weights expected");
        if (!(reference_tol > 0.0) || reference_max_iterations < 1)
            throw ConfigurationError("BenchmarkConfig: invalid reference solver settings");
        if (qp.max_iterations < 1 || !(qp.regularization >= 0.0) || qp.refinement_steps < 0)
            throw ConfigurationError("BenchmarkConfig: invalid QP options");
    }

    ScenarioRun run_scenario(const ControllerConfig &controller, std::shared_ptr<const ParametricNlp> nlp,
                             const PendulumOcpConfig &ocp, const ScenarioConfig &cfg, const Scenario &scenario,
                             bool record_trace)
    {
        ScenarioRun run;
        RunMetrics &m = run.metrics;
        const OdeModel plant = pendulum_model(ocp.params);
        const int cycles = cfg.cycles();
        const double dt = cfg.sampling_time;

        Vector x = scenario.x0;
        run.states.push_back(x);
        double g_sum = 0.0, grad_sum = 0.0;
        try
        {
            AsRtiController ctrl(nlp, controller);
            int trace_cycle = 0;
            if (record_trace)
                ctrl.set_inner_observer(
                    [&](int j, const Iterate &z, const Vector &x_pred)
                    {
                        const KktResidual r = eval_kkt(*nlp, z, x_pred);
                        run.trace.push_back({trace_cycle, j, r.eq, r.stat});
                    });

            ctrl.initialize(x);
            for (int cycle = 0; cycle < cycles; ++cycle)
            {
                Vector u = ctrl.feedback(x);
                const KktResidual r = eval_kkt(*nlp, ctrl.output(), x);
                g_sum += r.eq;
                grad_sum += r.stat;
                if (record_trace)
                    run.trace.push_back({cycle, -1, r.eq, r.stat});

                if (const auto it = scenario.disturbances.find(cycle); it != scenario.disturbances.end())
                    u = Vector::Constant(1, it->second);
                m.cost += dt * pendulum_stage_cost(ocp, x, u);
                run.controls.push_back(u);

                if (cycle + 1 < cycles)
                {
                    // inner iterates are listed under the cycle they prepare
                    trace_cycle = cycle + 1;
                    ctrl.prepare(x);
                }
                x = simulate_plant(plant, x, u, dt, cfg.plant_substeps, ocp.integrator);
                if (!finite(x))
                    throw SolverError("closed loop diverged");
                run.states.push_back(x);
            }
            const ControllerSnapshot snap = ctrl.snapshot();
            m.max_preparation = snap.max.preparation;
            m.max_feedback = snap.max.feedback;
            m.fallbacks = snap.fallbacks;
            m.feedback_evaluations = snap.feedback_evaluations;
            m.mean_g_norm = g_sum / cycles;
            m.mean_lagrange_grad = grad_sum / cycles;
        }
        catch (const std::exception &e)
        {
            m.failed = true;
            m.error = e.what();
            m.cost = nan();
            m.mean_g_norm = nan();
            m.mean_lagrange_grad = nan();
        }
        return run;
    }

    const ResultRow &BenchmarkResults::row(const std::string &algorithm) const
    {
        if (algorithm == kReferenceLabel)
            return reference;
        for (const ResultRow &r : rows)
            if (r.algorithm == algorithm)
                return r;
        throw ConfigurationError("no results for algorithm '" + algorithm + "'");
    }

    ControllerConfig reference_controller(const BenchmarkConfig &cfg)
    {
        ControllerConfig c;
        c.algorithm = Algorithm::Sqp;
        c.iterations = cfg.reference_max_iterations;
        c.sqp_tol = cfg.reference_tol;
        c.qp = cfg.qp;
        return c;
    }

    namespace
    {
        ResultRow aggregate(const std::string &label, const std::vector<ScenarioRun> &runs,
                            const std::vector<double> &reference_costs)
        {
            ResultRow row;
            row.algorithm = label;
            double subopt = 0.0, g = 0.0, grad = 0.0;
            int ok = 0;
            for (std::size_t s = 0; s < runs.size(); ++s)
            {
                const RunMetrics &m = runs[s].metrics;
                row.costs.push_back(m.cost);
                row.max_prep_ms = std::max(row.max_prep_ms, 1e3 * m.max_preparation);
                row.max_feedback_ms = std::max(row.max_feedback_ms, 1e3 * m.max_feedback);
                row.feedback_evaluations += m.feedback_evaluations;
                row.fallbacks += m.fallbacks;
                if (m.failed || !std::isfinite(reference_costs[s]))
                {
                    row.failed_scenarios += m.failed ? 1 : 0;
                    continue;
                }
                subopt += 100.0 * (m.cost - reference_costs[s]) / reference_costs[s];
                g += m.mean_g_norm;
                grad += m.mean_lagrange_grad;
                ++ok;
            }
            row.rel_subopt_pct = ok ? subopt / ok : nan();
            row.mean_g_norm_x1e3 = ok ? 1e3 * g / ok : nan();
            row.mean_lagrange_grad = ok ? grad / ok : nan();
            return row;
        }

        std::vector<ScenarioRun> run_all(const ControllerConfig &controller, std::shared_ptr<const ParametricNlp> nlp,
                                         const PendulumOcpConfig &ocp, const std::vector<Scenario> &scenarios,
                                         const ScenarioConfig &cfg)
        {
            std::vector<ScenarioRun> runs;
            for (const Scenario &s : scenarios)
                runs.push_back(run_scenario(controller, nlp, ocp, cfg, s));
            return runs;
        }
    } // namespace

    BenchmarkResults run_benchmark(const BenchmarkConfig &cfg, const std::vector<std::string> &algorithms)
    {
        cfg.validate();
        std::vector<ControllerConfig> controllers;
        for (const std::string &a : algorithms)
        {
            if (a == kReferenceLabel)
                continue;
            ControllerConfig c = ControllerConfig::parse(a);
            c.qp = cfg.qp;
            c.validate();
            controllers.push_back(c);
        }

        const auto start = std::chrono::steady_clock::now();
        std::vector<Scenario> scenarios;
        for (int s = 0; s < cfg.scenario.scenarios; ++s)
            scenarios.push_back(make_scenario(cfg.scenario, s));

        auto ref_nlp = std::make_shared<const ParametricNlp>(build_pendulum_ocp(cfg.reference_ocp));
        const std::vector<ScenarioRun> ref_runs =
            run_all(reference_controller(cfg), ref_nlp, cfg.reference_ocp, scenarios, cfg.scenario);
        std::vector<double> ref_costs;
        for (const ScenarioRun &r : ref_runs)
            ref_costs.push_back(r.metrics.failed ? nan() : r.metrics.cost);

        BenchmarkResults results;
        results.reference = aggregate(kReferenceLabel, ref_runs, ref_costs);

        auto nlp = std::make_shared<const ParametricNlp>(build_pendulum_ocp(cfg.ocp));
        for (const ControllerConfig &c : controllers)
            results.rows.push_back(aggregate(c.name(), run_all(c, nlp, cfg.ocp, scenarios, cfg.scenario), ref_costs));
        results.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return results;
    }

    std::vector<TraceRow> run_traces(const BenchmarkConfig &cfg, const std::string &algorithm, int scenario)
    {
        cfg.validate();
        if (scenario < 0 || scenario >= cfg.scenario.scenarios)
            throw ConfigurationError("run_traces: scenario index out of range");
        ControllerConfig c = ControllerConfig::parse(algorithm);
        c.qp = cfg.qp;
        auto nlp = std::make_shared<const ParametricNlp>(build_pendulum_ocp(cfg.ocp));
        ScenarioRun run = run_scenario(c, nlp, cfg.ocp, cfg.scenario, make_scenario(cfg.scenario, scenario), true);
        if (run.metrics.failed)
            throw SolverError("run_traces: scenario failed: " + run.metrics.error);
        return run.trace;
    }

    std::vector<std::string> default_algorithms()
    {
        return {"rti",        "as-rti-a",   "as-rti-b-1", "as-rti-b-2", "as-rti-c-1",
                "as-rti-c-2", "as-rti-d-1", "as-rti-d-2", "sqp-2",      "sqp-100"};
    }

    void write_results_csv(std::ostream &os, const BenchmarkResults &results)
    {
        os << "algorithm,max_prep_ms,max_feedback_ms,rel_subopt_pct,mean_g_norm_x1e3,mean_lagrange_grad,"
              "failed_scenarios\n";
        os << std::setprecision(10);
        auto line = [&](const ResultRow &r)
        {
            os << r.algorithm << ',' << r.max_prep_ms << ',' << r.max_feedback_ms << ',' << r.rel_subopt_pct << ','
               << r.mean_g_norm_x1e3 << ',' << r.mean_lagrange_grad << ',' << r.failed_scenarios << '\n';
        };
        line(results.reference);
        for (const ResultRow &r : results.rows)
            line(r);
    }

    std::vector<ResultRow> read_results_csv(std::istream &is)
    {
        std::string text;
        if (!std::getline(is, text))
            throw ConfigurationError("results csv: empty input");
        if (text.rfind("algorithm,max_prep_ms,max_feedback_ms,rel_subopt_pct", 0) != 0)
            throw ConfigurationError("results csv: unexpected header");

        std::vector<ResultRow> rows;
        int line_no = 1;
        while (std::getline(is, text))
        {
            ++line_no;
            if (text.empty())
                continue;
            std::vector<std::string> f;
            std::stringstream ss(text);
            for (std::string cell; std::getline(ss, cell, ',');)
                f.push_back(cell);
            if (f.size() != 7)
                throw ConfigurationError("results csv: line " + std::to_string(line_no) + " has " +
                                         std::to_string(f.size()) + " fields");
            try
            {
                ResultRow r;
                r.algorithm = f[0];
                r.max_prep_ms = std::stod(f[1]);
                r.max_feedback_ms = std::stod(f[2]);
                r.rel_subopt_pct = std::stod(f[3]);
                r.mean_g_norm_x1e3 = std::stod(f[4]);
                r.mean_lagrange_grad = std::stod(f[5]);
                r.failed_scenarios = std::stoi(f[6]);
                rows.push_back(std::move(r));
            }
            catch (const std::logic_error &)
            {
                throw ConfigurationError("results csv: malformed number on line " + std::to_string(line_no));
            }
        }
        return rows;
    }

    std::vector<ParetoPoint> pareto_front(const std::vector<ResultRow> &rows)
    {
        std::vector<ParetoPoint> pts;
        for (const ResultRow &r : rows)
            if (r.algorithm != kReferenceLabel)
                pts.push_back({r.algorithm, r.max_prep_ms + r.max_feedback_ms, r.rel_subopt_pct, false});
        for (ParetoPoint &p : pts)
        {
            p.pareto_optimal = std::isfinite(p.rel_subopt_pct);
            for (const ParetoPoint &q : pts)
            {
                if (&p == &q || !std::isfinite(q.rel_subopt_pct))
                    continue;
                const bool no_worse = q.max_total_ms <= p.max_total_ms && q.rel_subopt_pct <= p.rel_subopt_pct;
                const bool better = q.max_total_ms < p.max_total_ms || q.rel_subopt_pct < p.rel_subopt_pct;
                if (no_worse && better)
                {
                    p.pareto_optimal = false;
                    break;
                }
            }
        }
        return pts;
    }

    void write_pareto_csv(std::ostream &os, const std::vector<ParetoPoint> &points)
    {
        os << "algorithm,max_total_ms,rel_subopt_pct,pareto_optimal\n" << std::setprecision(10);
        for (const ParetoPoint &p : points)
            os << p.algorithm << ',' << p.max_total_ms << ',' << p.rel_subopt_pct << ',' << (p.pareto_optimal ? 1 : 0)
               << '\n';
    }

    void write_traces_csv(std::ostream &os, const std::vector<TraceRow> &rows)
    {
        os << "cycle,inner_iter,primal_residual,dual_residual\n" << std::setprecision(10);
        for (const TraceRow &r : rows)
            os << r.cycle << ',' << r.inner_iter << ',' << r.primal_residual << ',' << r.dual_residual << '\n';
    }

} // namespace asrti
