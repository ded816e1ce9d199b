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

#include "asrti/mli.hpp"
#include "asrti/errors.hpp"

#include <algorithm>
#include <cmath>

namespace asrti
{

    namespace
    {
        void split_gradient(const OcpQpMatrices &m, const Vector &stacked, std::vector<Vector> &grad)
        {
            grad.resize(m.horizon() + 1);
            for (int k = 0; k <= m.horizon(); ++k)
            {
                const int width = k < m.horizon() ? m.nx + m.nu : m.nx;
                grad[k] = stacked.segment(m.state_index(k), width);
            }
        }

        Iterate apply_step(const Iterate &z, const QpSolution &sol)
        {
            return Iterate{z.w + sol.dw, sol.lambda, sol.mu};
        }
    } // namespace

    void MliConfig::validate() const
    {
        if (inner_iterations < 1)
            throw ConfigurationError("MliConfig: inner_iterations must be >= 1");
        if (level == MliLevel::A && inner_iterations != 1)
            throw ConfigurationError("MliConfig: level A performs exactly one iteration");
    }

    PreparedLinearization prepare_linearization(const ParametricNlp &nlp, const Iterate &reference,
                                                const Vector &parameter, const QpOptions &options)
    {
        nlp.check(reference);
        PreparedLinearization prep;
        prep.reference = reference;
        prep.parameter = parameter;
        prep.data = nlp.linearize(reference.w);
        prep.lhs = condense_lhs(prep.data.matrices, options);
        return prep;
    }

    SqpResult sqp_solve(const ParametricNlp &nlp, const Vector &x, const Iterate &z0, double tol, int max_iter,
                        const QpOptions &options)
    {
        nlp.check(z0);
        SqpResult out;
        out.z = z0;
        std::vector<int> active;
        double step = 0.0;
        for (int j = 0;; ++j)
        {
            const OcpQpData lin = nlp.linearize(out.z.w);
            out.residual = eval_kkt(lin, out.z, x);
            out.log.push_back({j, out.residual.stat, out.residual.eq, step});
            if (out.residual.within(tol))
            {
                out.converged = true;
                break;
            }
            if (j >= max_iter)
                break;
            const QpSolution sol = condense_and_solve(lin, x, options, active);
            active = sol.active_set;
            step = sol.dw.lpNorm<Eigen::Infinity>();
            out.z = apply_step(out.z, sol);
            ++out.iterations;
        }
        return out;
    }

    Iterate level_d(const ParametricNlp &nlp, const Vector &x, const Iterate &z_start, int n,
                    const QpOptions &options, const IterateObserver &observer)
    {
        nlp.check(z_start);
        Iterate z = z_start;
        std::vector<int> active;
        for (int j = 0; j < n; ++j)
        {
            const OcpQpData lin = nlp.linearize(z.w);
            const QpSolution sol = condense_and_solve(lin, x, options, active);
            active = sol.active_set;
            z = apply_step(z, sol);
            if (observer)
                observer(j, z);
        }
        return z;
    }

    Iterate level_c(PreparedLinearization &prep, const ParametricNlp &nlp, const Vector &x, const Iterate &z_start,
                    int n, const QpOptions &options, const IterateObserver &observer)
    {
        nlp.check(z_start);
        const OcpQpMatrices &frozen = prep.data.matrices;
        Iterate z = z_start;
        for (int j = 0; j < n; ++j)
        {
            OcpQpData lin = nlp.linearize(z.w);
            // a = grad L(z) + G_hat' lambda + H_hat' mu
            const Vector a = lagrange_gradient(lin, z) + eq_jacobian_transpose_times(frozen, z.lambda) +
                             ineq_jacobian_transpose_times(frozen, z.mu);
            split_gradient(frozen, a, lin.vectors.grad);
            const QpSolution sol = condense_rhs_and_solve(prep.lhs, lin.vectors, x, options, prep.active_set);
            prep.active_set = sol.active_set;
            prep.parameter = x;
            z = apply_step(z, sol);
            if (observer)
                observer(j, z);
        }
        return z;
    }

    Iterate level_b(PreparedLinearization &prep, const ParametricNlp &nlp, const Vector &x, const Iterate &z_start,
                    int n, const QpOptions &options, const IterateObserver &observer)
    {
        nlp.check(z_start);
        const OcpQpMatrices &frozen = prep.data.matrices;
        const Vector grad_hat = stack_gradient(frozen, prep.data.vectors);
        Iterate z = z_start;
        for (int j = 0; j < n; ++j)
        {
            OcpQpVectors vec = nlp.constraint_vectors(z.w);
            const Vector a = grad_hat + hessian_times(frozen, z.w - prep.reference.w);
            split_gradient(frozen, a, vec.grad);
            const QpSolution sol = condense_rhs_and_solve(prep.lhs, vec, x, options, prep.active_set);
            prep.active_set = sol.active_set;
            prep.parameter = x;
            z = apply_step(z, sol);
            if (observer)
                observer(j, z);
        }
        return z;
    }

    Iterate level_a(PreparedLinearization &prep, const Vector &x, const QpOptions &options)
    {
        const QpSolution sol = condense_rhs_and_solve(prep.lhs, prep.data.vectors, x, options, prep.active_set);
        prep.active_set = sol.active_set;
        prep.parameter = x;
        return apply_step(prep.reference, sol);
    }

    Vector beta_vector(const PreparedLinearization &prep, const Iterate &z_b, const ParametricNlp &nlp)
    {
        nlp.check(z_b);
        const OcpQpMatrices &frozen = prep.data.matrices;
        const OcpQpData lin = nlp.linearize(z_b.w);
        return stack_gradient(frozen, prep.data.vectors) + hessian_times(frozen, z_b.w - prep.reference.w) -
               stack_gradient(lin.matrices, lin.vectors) +
               eq_jacobian_transpose_times(lin.matrices, z_b.lambda) -
               eq_jacobian_transpose_times(frozen, z_b.lambda) +
               ineq_jacobian_transpose_times(lin.matrices, z_b.mu) -
               ineq_jacobian_transpose_times(frozen, z_b.mu);
    }

    ContractionDiagnostics estimate_contraction(std::span<const double> errors)
    {
        if (errors.size() < 3)
            throw ConfigurationError("estimate_contraction: need at least 3 error values");
        ContractionDiagnostics d;
        for (std::size_t j = 0; j + 1 < errors.size(); ++j)
            d.ratios.push_back(errors[j] > 0.0 ? errors[j + 1] / errors[j] : 0.0);
        d.kappa = d.ratios.back();

        // ratio_j ~ c + (omega / 2) e_j
        const std::size_t n = d.ratios.size();
        const std::size_t used = std::min(n, std::max<std::size_t>(3, n >= 2 ? n - 2 : 0));
        const std::size_t first = n - used;
        double se = 0.0, sr = 0.0, see = 0.0, ser = 0.0;
        for (std::size_t j = first; j < n; ++j)
        {
            se += errors[j];
            sr += d.ratios[j];
            see += errors[j] * errors[j];
            ser += errors[j] * d.ratios[j];
        }
        const double cnt = static_cast<double>(used);
        const double denom = cnt * see - se * se;
        const double slope = std::abs(denom) > 1e-300 ? (cnt * ser - se * sr) / denom : 0.0;
        d.omega = std::max(0.0, 2.0 * slope);
        d.radius_z = d.omega > 0.0 ? 2.0 * (1.0 - d.kappa) / d.omega : std::numeric_limits<double>::infinity();
        d.contractive = d.kappa < 1.0 && errors.back() < errors.front();
        return d;
    }

    double distance(const Iterate &a, const Iterate &b)
    {
        return std::sqrt((a.w - b.w).squaredNorm() + (a.lambda - b.lambda).squaredNorm() +
                         (a.mu - b.mu).squaredNorm());
    }

    double estimate_solution_lipschitz(const ParametricNlp &nlp, const Vector &x_a, const Vector &x_b,
                                       const Iterate &guess, double tol)
    {
        const SqpResult a = sqp_solve(nlp, x_a, guess, tol, 100);
        const SqpResult b = sqp_solve(nlp, x_b, a.z, tol, 100);
        if (!a.converged || !b.converged)
            throw SolverError("estimate_solution_lipschitz: SQP did not converge");
        return distance(a.z, b.z) / (x_b - x_a).norm();
    }

} // namespace asrti
