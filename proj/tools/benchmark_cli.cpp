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

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace
{
    std::ofstream open_out(const std::string &path)
    {
        std::ofstream out(path);
        if (!out)
            throw asrti::ConfigurationError("cannot write '" + path + "'");
        return out;
    }
} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Closed-loop pendulum benchmark for RTI, AS-RTI and SQP controllers"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "JSON file with scenario, model and solver overrides")
        ->check(CLI::ExistingFile);

    auto *run = app.add_subcommand("run", "Run all algorithms over the seeded scenarios");
    std::vector<std::string> algorithms = asrti::default_algorithms();
    int scenarios = 0;
    long long seed = -1;
    std::string results_out = "results.csv";
    run->add_option("--algorithms", algorithms, "Comma-separated algorithm labels")->delimiter(',');
    run->add_option("--scenarios", scenarios, "Number of scenarios (overrides the config)")->check(CLI::PositiveNumber);
    run->add_option("--seed", seed, "RNG seed (overrides the config)")->check(CLI::NonNegativeNumber);
    run->add_option("--out", results_out, "Results CSV path");

    auto *traces = app.add_subcommand("traces", "Residual traces of one algorithm on one scenario");
    std::string trace_algorithm = "as-rti-b-2";
    int trace_scenario = 0;
    std::string traces_out = "traces.csv";
    traces->add_option("--algorithm", trace_algorithm, "Algorithm label");
    traces->add_option("--scenario", trace_scenario, "Scenario index")->check(CLI::NonNegativeNumber);
    traces->add_option("--seed", seed, "RNG seed (overrides the config)")->check(CLI::NonNegativeNumber);
    traces->add_option("--out", traces_out, "Traces CSV path");

    auto *pareto = app.add_subcommand("pareto", "Pareto data from a results CSV");
    std::string pareto_in;
    std::string pareto_out = "pareto.csv";
    pareto->add_option("--in", pareto_in, "Results CSV produced by 'run'")->required()->check(CLI::ExistingFile);
    pareto->add_option("--out", pareto_out, "Pareto CSV path");

    CLI11_PARSE(app, argc, argv);

    try
    {
        asrti::BenchmarkConfig cfg =
            config_path.empty() ? asrti::BenchmarkConfig{} : asrti::BenchmarkConfig::from_file(config_path);
        if (scenarios > 0)
            cfg.scenario.scenarios = scenarios;
        if (seed >= 0)
            cfg.scenario.seed = static_cast<std::uint64_t>(seed);

        if (*run)
        {
            const asrti::BenchmarkResults results = asrti::run_benchmark(cfg, algorithms);
            std::ofstream out = open_out(results_out);
            asrti::write_results_csv(out, results);
            asrti::write_results_csv(std::cout, results);
            std::cerr << "wall time " << results.wall_seconds << " s\n";
        }
        else if (*traces)
        {
            const auto rows = asrti::run_traces(cfg, trace_algorithm, trace_scenario);
            std::ofstream out = open_out(traces_out);
            asrti::write_traces_csv(out, rows);
            std::cerr << rows.size() << " trace rows written to " << traces_out << "\n";
        }
        else if (*pareto)
        {
            std::ifstream in(pareto_in);
            const auto points = asrti::pareto_front(asrti::read_results_csv(in));
            std::ofstream out = open_out(pareto_out);
            asrti::write_pareto_csv(out, points);
            asrti::write_pareto_csv(std::cout, points);
        }
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
