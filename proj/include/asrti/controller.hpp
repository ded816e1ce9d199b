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

#ifndef ASRTI_CONTROLLER_HPP
#define ASRTI_CONTROLLER_HPP

#include "asrti/mli.hpp"
#include "asrti/nlp.hpp"
#include "asrti/qp.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace asrti
{

    enum class Algorithm
    {
        Sqp,
        Rti,
        AsRtiA,
        AsRtiB,
        AsRtiC,
        AsRtiD
    };

    enum class PredictionStrategy
    {
        InternalSimulation,
        ExternalCallback
    };

    struct ControllerConfig
    {
        Algorithm algorithm = Algorithm::Rti;
        int iterations = 1; ///< n in SQP-n and AS-RTI-{B,C,D}-n
        PredictionStrategy prediction = PredictionStrategy::InternalSimulation;
        /// (x_k, u_0) -> predicted next state; used by ExternalCallback.
        std::function<Vector(const Vector &, const Vector &)> external_predictor;
        QpOptions qp;
        double sqp_tol = 1e-8; ///< early exit for SQP-n

        /// Lower-case label: "rti", "as-rti-a", "as-rti-c-2", "sqp-100".
        std::string name() const;
        /// Inverse of name(); throws ConfigurationError on unknown labels.
        static ControllerConfig parse(std::string_view label);
        void validate() const;
    };

    struct PhaseTimings
    {
        double preparation = 0.0; ///< seconds
        double feedback = 0.0;    ///< seconds
    };

    struct ControllerSnapshot
    {
        PhaseTimings last;
        PhaseTimings max;
        int fallbacks = 0;
        bool last_fallback = false;
        long last_feedback_evaluations = 0; ///< user callbacks invoked during the last feedback
        long feedback_evaluations = 0;      ///< summed over all feedback calls
        int last_qp_iterations = 0;
        int cycles = 0;
    };

    /// Called for every inner iterate during preparation: (index, iterate, predicted parameter).
    using InnerObserver = std::function<void(int, const Iterate &, const Vector &)>;

    /// x_pred = phi_0(x_k, u_0(z_k)) for internal simulation, or the external callback.
    Vector predict_state(const ParametricNlp &nlp, const ControllerConfig &config, const Vector &x_k,
                         const Iterate &z_k);

    /**
     * Real-time controller running SQP-n, RTI or one of the AS-RTI variants.
     *
     * Calls must alternate prepare(x_k) -> feedback(x_{k+1}); initialize()
     * leaves the controller ready for feedback. The feedback phase of RTI and
     * AS-RTI only runs the vector phase of the prepared QP.
     */
    class AsRtiController
    {
    public:
        AsRtiController(std::shared_ptr<const ParametricNlp> nlp, ControllerConfig config);

        /// Cold start around x0 followed by one preparation at that point.
        void initialize(const Vector &x0);

        /// Steps S1-S3 for the next sampling instant. Returns elapsed seconds.
        double prepare(const Vector &x_k);

        /// Step S4: solve the prepared QP at x_next and return the first control.
        Vector feedback(const Vector &x_next);

        const Iterate &output() const { return output_; }
        const Iterate &linearization_point() const { return linearization_; }
        const std::optional<PreparedLinearization> &prepared() const { return prepared_; }
        const ControllerConfig &config() const { return config_; }
        const ParametricNlp &nlp() const { return *nlp_; }
        ControllerSnapshot snapshot() const { return snapshot_; }

        void set_inner_observer(InnerObserver observer) { observer_ = std::move(observer); }

    private:
        enum class Phase
        {
            Uninitialized,
            AwaitingFeedback,
            AwaitingPreparation
        };

        Iterate advance(const Vector &x_pred);

        std::shared_ptr<const ParametricNlp> nlp_;
        ControllerConfig config_;
        Phase phase_ = Phase::Uninitialized;
        Iterate output_;
        Iterate linearization_;
        std::optional<PreparedLinearization> prepared_;
        ControllerSnapshot snapshot_;
        InnerObserver observer_;
    };

} // namespace asrti

#endif // ASRTI_CONTROLLER_HPP
