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

#ifndef ASRTI_BENCHMARK_HPP
#define ASRTI_BENCHMARK_HPP

#include "asrti/controller.hpp"
#include "asrti/pendulum.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace asrti
{

    struct ScenarioConfig
    {
        double sim_time = 4.0;      // [s]
        double sampling_time = 0.05; // [s]
        int scenarios = 20;
        double p0_min = -0.5; // [m]
        double p0_max = 0.5;  // [m]
        std::vector<double> disturbance_times{0.0, 2.0}; // [s], on the sampling grid
        double disturbance_min = -100.0; // [N]
        double disturbance_max = 100.0;  // [N]
        std::uint64_t seed = 42;
        int plant_substeps = 10;

        int cycles() const;
        /// Disturbance times as cycle indices, sorted.
        std::vector<int> disturbance_cycles() const;
        void validate() const;
    };

    /// One realization: initial state and control overwrites by cycle.
    struct Scenario
    {
        int index = 0;
        Vector x0;
        std::map<int, double> disturbances;
    };

    /**
     * Draws scenario `index` from a mt19937_64 seeded with seed_seq{seed, index}:
     * first p0, then one force per disturbance time in chronological order.
     */
    Scenario make_scenario(const ScenarioConfig &cfg, int index);

    struct BenchmarkConfig
    {
        ScenarioConfig scenario;
        PendulumOcpConfig ocp;
        PendulumOcpConfig reference_ocp = PendulumOcpConfig::reference();
        double reference_tol = 1e-8;
        int reference_max_iterations = 100;
        QpOptions qp;

        /// Overrides from a JSON document; unknown keys are rejected.
        static BenchmarkConfig from_json(const std::string &text);
        static BenchmarkConfig from_file(const std::string &path);
        void validate() const;
    };

    struct RunMetrics
    {
        double cost = 0.0;               ///< sum of dt * l(x_k, u_k) with the applied controls
        double mean_g_norm = 0.0;        ///< mean infinity norm of g(w) + Mx at the feedback output
        double mean_lagrange_grad = 0.0; ///< mean infinity norm of grad_w L at the feedback output
        double max_preparation = 0.0;    // [s]
        double max_feedback = 0.0;       // [s]
        int fallbacks = 0;
        long feedback_evaluations = 0;
        bool failed = false;
        std::string error;
    };

    /// Residuals of one iterate; inner_iter = -1 marks the feedback output.
    struct TraceRow
    {
        int cycle = 0;
        int inner_iter = 0;
        double primal_residual = 0.0;
        double dual_residual = 0.0;
    };

    struct ScenarioRun
    {
        RunMetrics metrics;
        std::vector<Vector> states;   ///< x_0 .. x_K
        std::vector<Vector> controls; ///< applied controls, K entries
        /// Inner iterates computed while preparing cycle k carry cycle = k and are
        /// evaluated at the predicted state; the feedback row follows them.
        std::vector<TraceRow> trace;
    };

    /// Closed loop over cfg.cycles() sampling instants. Exceptions are caught and
    /// reported through metrics.failed.
    ScenarioRun run_scenario(const ControllerConfig &controller, std::shared_ptr<const ParametricNlp> nlp,
                             const PendulumOcpConfig &ocp, const ScenarioConfig &cfg, const Scenario &scenario,
                             bool record_trace = false);

    /// Label of the fine-grid converged SQP row.
    inline constexpr const char *kReferenceLabel = "reference";

    struct ResultRow
    {
        std::string algorithm;
        double max_prep_ms = 0.0;
        double max_feedback_ms = 0.0;
        double rel_subopt_pct = 0.0;
        double mean_g_norm_x1e3 = 0.0;
        double mean_lagrange_grad = 0.0;
        int failed_scenarios = 0;
        std::vector<double> costs; ///< per scenario, NaN when failed
        long feedback_evaluations = 0;
        int fallbacks = 0;
    };

    struct BenchmarkResults
    {
        ResultRow reference;
        std::vector<ResultRow> rows; ///< in the requested order
        double wall_seconds = 0.0;

        const ResultRow &row(const std::string &algorithm) const;
    };

    ControllerConfig reference_controller(const BenchmarkConfig &cfg);

    /// Runs the reference and every algorithm on the same scenarios.
    BenchmarkResults run_benchmark(const BenchmarkConfig &cfg, const std::vector<std::string> &algorithms);

    /// Residual trace of one algorithm on one scenario.
    std::vector<TraceRow> run_traces(const BenchmarkConfig &cfg, const std::string &algorithm, int scenario);

    std::vector<std::string> default_algorithms();

    void write_results_csv(std::ostream &os, const BenchmarkResults &results);
    std::vector<ResultRow> read_results_csv(std::istream &is);

    struct ParetoPoint
    {
        std::string algorithm;
        double max_total_ms = 0.0; ///< max preparation + max feedback
        double rel_subopt_pct = 0.0;
        bool pareto_optimal = false;
    };

    /// Non-dominated in (time, suboptimality); the reference row is skipped.
    std::vector<ParetoPoint> pareto_front(const std::vector<ResultRow> &rows);
    void write_pareto_csv(std::ostream &os, const std::vector<ParetoPoint> &points);
    void write_traces_csv(std::ostream &os, const std::vector<TraceRow> &rows);

} // namespace asrti

#endif // ASRTI_BENCHMARK_HPP
