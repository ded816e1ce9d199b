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

#include "asrti/controller.hpp"
#include "asrti/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>

namespace asrti
{

    namespace
    {
        using Clock = std::chrono::steady_clock;

        double seconds_since(Clock::time_point start)
        {
            return std::chrono::duration<double>(Clock::now() - start).count();
        }

        int parse_count(std::string_view text, std::string_view label)
        {
            int value = 0;
            const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
            if (ec != std::errc() || ptr != text.data() + text.size() || value < 1)
                throw ConfigurationError("invalid iteration count in algorithm label '" + std::string(label) + "'");
            return value;
        }
    } // namespace

    std::string ControllerConfig::name() const
    {
        const std::string n = std::to_string(iterations);
        switch (algorithm)
        {
        case Algorithm::Sqp:
            return "sqp-" + n;
        case Algorithm::Rti:
            return "rti";
        case Algorithm::AsRtiA:
            return "as-rti-a";
        case Algorithm::AsRtiB:
            return "as-rti-b-" + n;
        case Algorithm::AsRtiC:
            return "as-rti-c-" + n;
        case Algorithm::AsRtiD:
            return "as-rti-d-" + n;
        }
        return "unknown";
    }

    ControllerConfig ControllerConfig::parse(std::string_view label)
    {
        std::string lower(label);
        std::transform(lower.begin(), lower.end(), lower.begin(),
                       [](unsigned char c)
                       { return static_cast<char>(std::tolower(c)); });
        std::string_view s = lower;

        ControllerConfig cfg;
        if (s == "rti")
        {
            cfg.algorithm = Algorithm::Rti;
        }
        else if (s == "as-rti-a")
        {
            cfg.algorithm = Algorithm::AsRtiA;
        }
        else if (s.starts_with("sqp-"))
        {
            cfg.algorithm = Algorithm::Sqp;
            cfg.iterations = parse_count(s.substr(4), label);
        }
        else if (s.size() > 9 && s.starts_with("as-rti-") && s[8] == '-')
        {
            switch (s[7])
            {
            case 'b':
                cfg.algorithm = Algorithm::AsRtiB;
                break;
            case 'c':
                cfg.algorithm = Algorithm::AsRtiC;
                break;
            case 'd':
                cfg.algorithm = Algorithm::AsRtiD;
                break;
            default:
                throw ConfigurationError("unknown algorithm label '" + std::string(label) + "'");
            }
            cfg.iterations = parse_count(s.substr(9), label);
        }
        else
        {
            throw ConfigurationError("unknown algorithm label '" + std::string(label) + "'");
        }
        return cfg;
    }

    void ControllerConfig::validate() const
    {
        if (iterations < 1)
            throw ConfigurationError("ControllerConfig: iterations must be >= 1");
        if ((algorithm == Algorithm::Rti || algorithm == Algorithm::AsRtiA) && iterations != 1)
            throw ConfigurationError("ControllerConfig: RTI and AS-RTI-A take no iteration count");
        if (prediction == PredictionStrategy::ExternalCallback && !external_predictor)
            throw ConfigurationError("ControllerConfig: external prediction requires a callback");
        if (qp.max_iterations < 1)
            throw ConfigurationError("ControllerConfig: QP iteration cap must be >= 1");
    }

    Vector predict_state(const ParametricNlp &nlp, const ControllerConfig &config, const Vector &x_k,
                         const Iterate &z_k)
    {
        const Vector u0 = z_k.w.segment(nlp.control_index(0), nlp.nu());
        if (config.prediction == PredictionStrategy::ExternalCallback)
            return config.external_predictor(x_k, u0);
        ++nlp.counter().dynamics;
        return nlp.spec().dynamics(0, x_k, u0, false).next;
    }

    AsRtiController::AsRtiController(std::shared_ptr<const ParametricNlp> nlp, ControllerConfig config)
        : nlp_(std::move(nlp)), config_(std::move(config))
    {
        if (!nlp_)
            throw ConfigurationError("AsRtiController: NLP is required");
        config_.validate();
    }

    void AsRtiController::initialize(const Vector &x0)
    {
        if (x0.size() != nlp_->nx())
            throw ConfigurationError("AsRtiController: initial state has wrong size");
        const auto start = Clock::now();
        const int N = nlp_->horizon();
        output_ = nlp_->zero_iterate();
        for (int k = 0; k <= N; ++k)
            output_.w.segment(nlp_->state_index(k), nlp_->nx()) = x0 * (1.0 - static_cast<double>(k) / N);
        linearization_ = output_;
        prepared_.reset();
        if (config_.algorithm != Algorithm::Sqp)
            prepared_ = prepare_linearization(*nlp_, linearization_, x0, config_.qp);
        snapshot_ = ControllerSnapshot{};
        snapshot_.last.preparation = seconds_since(start);
        phase_ = Phase::AwaitingFeedback;
    }

    Iterate AsRtiController::advance(const Vector &x_pred)
    {
        const int n = config_.iterations;
        IterateObserver inner;
        if (observer_)
            inner = [&](int j, const Iterate &z)
            { observer_(j, z, x_pred); };

        switch (config_.algorithm)
        {
        case Algorithm::AsRtiA:
        {
            // Re-solve the QP of the previous cycle at the predicted state.
            Iterate z = level_a(*prepared_, x_pred, config_.qp);
            if (inner)
                inner(0, z);
            return z;
        }
        case Algorithm::AsRtiB:
            return level_b(*prepared_, *nlp_, x_pred, output_, n, config_.qp, inner);
        case Algorithm::AsRtiC:
            return level_c(*prepared_, *nlp_, x_pred, output_, n, config_.qp, inner);
        case Algorithm::AsRtiD:
            return level_d(*nlp_, x_pred, output_, n, config_.qp, inner);
        default:
            return output_;
        }
    }

    double AsRtiController::prepare(const Vector &x_k)
    {
        if (phase_ != Phase::AwaitingPreparation)
            throw ConfigurationError("AsRtiController: prepare() must follow feedback()");
        if (x_k.size() != nlp_->nx())
            throw ConfigurationError("AsRtiController: state has wrong size");

        const auto start = Clock::now();
        snapshot_.last_fallback = false;
        if (config_.algorithm != Algorithm::Sqp)
        {
            linearization_ = output_;
            Vector parameter = x_k;
            if (config_.algorithm != Algorithm::Rti)
            {
                parameter = predict_state(*nlp_, config_, x_k, output_);
                try
                {
                    linearization_ = advance(parameter);
                }
                catch (const SolverError &)
                {
                    linearization_ = output_;
                    snapshot_.last_fallback = true;
                    ++snapshot_.fallbacks;
                }
            }
            std::vector<int> warm = prepared_ ? prepared_->active_set : std::vector<int>{};
            prepared_ = prepare_linearization(*nlp_, linearization_, parameter, config_.qp);
            prepared_->active_set = std::move(warm);
        }
        const double elapsed = seconds_since(start);
        snapshot_.last.preparation = elapsed;
        snapshot_.max.preparation = std::max(snapshot_.max.preparation, elapsed);
        phase_ = Phase::AwaitingFeedback;
        return elapsed;
    }

    Vector AsRtiController::feedback(const Vector &x_next)
    {
        if (phase_ != Phase::AwaitingFeedback)
            throw ConfigurationError("AsRtiController: feedback() must follow prepare() or initialize()");
        if (x_next.size() != nlp_->nx())
            throw ConfigurationError("AsRtiController: state has wrong size");

        const long evals_before = nlp_->counter().total();
        const auto start = Clock::now();
        if (config_.algorithm == Algorithm::Sqp)
        {
            SqpResult r = sqp_solve(*nlp_, x_next, output_, config_.sqp_tol, config_.iterations, config_.qp);
            output_ = std::move(r.z);
            snapshot_.last_qp_iterations = r.iterations;
        }
        else
        {
            PreparedLinearization &prep = *prepared_;
            const QpSolution sol =
                condense_rhs_and_solve(prep.lhs, prep.data.vectors, x_next, config_.qp, prep.active_set);
            prep.active_set = sol.active_set;
            prep.parameter = x_next;
            output_ = Iterate{linearization_.w + sol.dw, sol.lambda, sol.mu};
            snapshot_.last_qp_iterations = sol.iterations;
        }
        const double elapsed = seconds_since(start);
        const long evals = nlp_->counter().total() - evals_before;

        snapshot_.last.feedback = elapsed;
        snapshot_.max.feedback = std::max(snapshot_.max.feedback, elapsed);
        snapshot_.last_feedback_evaluations = evals;
        snapshot_.feedback_evaluations += evals;
        ++snapshot_.cycles;
        phase_ = Phase::AwaitingPreparation;
        return output_.w.segment(nlp_->control_index(0), nlp_->nu());
    }

} // namespace asrti
