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

#ifndef ASRTI_MLI_HPP
#define ASRTI_MLI_HPP

#include "asrti/nlp.hpp"
#include "asrti/qp.hpp"

#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace asrti
{

    enum class MliLevel
    {
        A,
        B,
        C,
        D
    };

    struct MliConfig
    {
        MliLevel level = MliLevel::D;
        int inner_iterations = 1; ///< forced to 1 for level A
        QpOptions qp;

        void validate() const;
    };

    /**
     * QP data frozen at a reference point z_hat: matrices (A_hat, G_hat,
     * H_hat), the vectors evaluated there (objective gradient, residuals) and
     * the condensed matrix phase. Levels A, B and C only ever run the vector
     * phase on top of it.
     */
    struct PreparedLinearization
    {
        Iterate reference;
        Vector parameter; ///< parameter the last QP on this data was solved for
        OcpQpData data;
        CondensedLhs lhs;
        std::vector<int> active_set; ///< warm start for the next solve
    };

    PreparedLinearization prepare_linearization(const ParametricNlp &nlp, const Iterate &reference,
                                                const Vector &parameter, const QpOptions &options = {});

    struct IterationRecord
    {
        int iteration = 0;
        double stat = 0.0;
        double eq = 0.0;
        double step_norm = 0.0;
    };

    struct SqpResult
    {
        Iterate z;
        KktResidual residual;
        bool converged = false;
        int iterations = 0; ///< QP solves performed
        std::vector<IterationRecord> log;
    };

    /// Called with (inner iteration index, iterate after that iteration).
    using IterateObserver = std::function<void(int, const Iterate &)>;

    /// Full-step SQP with Gauss-Newton Hessian; stops when every KKT residual is <= tol.
    SqpResult sqp_solve(const ParametricNlp &nlp, const Vector &x, const Iterate &z0, double tol, int max_iter,
                        const QpOptions &options = {});

    /// Exactly n full SQP iterations at fixed parameter, no convergence check.
    Iterate level_d(const ParametricNlp &nlp, const Vector &x, const Iterate &z_start, int n,
                    const QpOptions &options = {}, const IterateObserver &observer = {});

    /// Frozen matrices, exact residuals and Lagrange gradient corrected for the frozen Jacobians.
    Iterate level_c(PreparedLinearization &prep, const ParametricNlp &nlp, const Vector &x, const Iterate &z_start,
                    int n, const QpOptions &options = {}, const IterateObserver &observer = {});

    /// Zero-order iterations: only g and h are evaluated, gradient is the frozen quadratic model.
    Iterate level_b(PreparedLinearization &prep, const ParametricNlp &nlp, const Vector &x, const Iterate &z_start,
                    int n, const QpOptions &options = {}, const IterateObserver &observer = {});

    /// One vector-phase solve of the prepared QP at a new parameter: w = w_hat + dw.
    Iterate level_a(PreparedLinearization &prep, const Vector &x, const QpOptions &options = {});

    /// Gradient perturbation for which a level-B fixed point z_B is a KKT point.
    Vector beta_vector(const PreparedLinearization &prep, const Iterate &z_b, const ParametricNlp &nlp);

    struct ContractionDiagnostics
    {
        std::vector<double> ratios; ///< e_{j+1} / e_j
        double kappa = std::numeric_limits<double>::quiet_NaN();
        double omega = std::numeric_limits<double>::quiet_NaN();
        double radius_z = std::numeric_limits<double>::quiet_NaN(); ///< 2 (1 - kappa) / omega
        double radius_x = std::numeric_limits<double>::quiet_NaN();
        double sigma = std::numeric_limits<double>::quiet_NaN();   ///< solution-map Lipschitz estimate
        double sigma_b = std::numeric_limits<double>::quiet_NaN(); ///< same for the beta-perturbed problem
        double beta_norm = std::numeric_limits<double>::quiet_NaN();
        bool contractive = false;
    };

    /// Needs at least 3 errors. kappa is the terminal ratio; omega comes from
    /// a least-squares fit ratio ~ c + omega/2 * error over the last max(3, n-2) ratios.
    ContractionDiagnostics estimate_contraction(std::span<const double> errors);

    /// Euclidean norm of the stacked primal-dual difference.
    double distance(const Iterate &a, const Iterate &b);

    /// |z(x_b) - z(x_a)| / |x_b - x_a| from two converged SQP solves.
    double estimate_solution_lipschitz(const ParametricNlp &nlp, const Vector &x_a, const Vector &x_b,
                                       const Iterate &guess, double tol = 1e-10);

} // namespace asrti

#endif // ASRTI_MLI_HPP
