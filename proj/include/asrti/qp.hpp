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

#ifndef ASRTI_QP_HPP
#define ASRTI_QP_HPP

#include "asrti/qp_data.hpp"

#include <span>
#include <vector>

namespace asrti
{

    struct QpOptions
    {
        int max_iterations = 200;     ///< active-set changes before giving up
        double regularization = 1e-8; ///< added to the Hessian diagonal if Cholesky fails
        int refinement_steps = 3;     ///< iterative refinement sweeps after a condensed solve
    };

    struct DenseQpSolution
    {
        Vector x;
        Vector multipliers;          ///< one per inequality row, zero when inactive
        std::vector<int> active_set; ///< sorted row indices
        int iterations = 0;          ///< number of active-set changes
    };

    /**
     * Strictly convex dense QP  min 1/2 x'Hx + q'x  s.t.  C x + b >= 0.
     *
     * The matrix part (Cholesky factor of H and the transformed constraint
     * normals) is computed once; solve() only needs q and b. The active-set
     * loop works in the variables y = L'x where the Hessian is the identity:
     * it starts from the minimizer over a (warm-start) working set with
     * nonnegative multipliers and adds the most violated row, dropping rows
     * whose multiplier would turn negative. Ties go to the lowest row index.
     */
    class FactoredDenseQp
    {
    public:
        FactoredDenseQp() = default;
        FactoredDenseQp(const Matrix &H, const Matrix &C, double regularization = 1e-8);

        int num_variables() const { return static_cast<int>(chol_.rows()); }
        int num_constraints() const { return static_cast<int>(normals_.cols()); }
        bool regularized() const { return regularized_; }

        /// Throws QpInfeasibleError or SolverError (iteration cap).
        DenseQpSolution solve(const Vector &q, const Vector &b, std::span<const int> warm_start = {},
                              int max_iterations = 200) const;

    private:
        Matrix chol_;    ///< lower Cholesky factor L of H
        Matrix normals_; ///< L^{-1} C', one column per row of C
        bool regularized_ = false;
    };

    DenseQpSolution solve_dense_qp(const Matrix &H, const Vector &q, const Matrix &C, const Vector &b,
                                   const QpOptions &options = {}, std::span<const int> warm_start = {});

    /// Full-space primal-dual QP solution. Signs follow the Lagrangian
    /// 1/2 dw'Q dw + a'dw - lambda'(g + Mx + G dw) - mu'(h + H dw).
    struct QpSolution
    {
        Vector dw;
        Vector lambda;
        Vector mu;
        std::vector<int> active_set;
        int iterations = 0;
    };

    /**
     * Matrix phase of full condensing. States are eliminated through the
     * linearized dynamics and s_0 through the initial-state constraint, so
     * ds = t + Gamma * du where t depends only on vectors and the parameter.
     */
    class CondensedLhs
    {
    public:
        const OcpQpMatrices &matrices() const { return mats_; }
        const Matrix &hessian() const { return hessian_; }
        const Matrix &ineq_matrix() const { return ineq_; }
        const Matrix &control_to_state() const { return gamma_; }
        const FactoredDenseQp &dense_qp() const { return qp_; }
        int num_controls() const { return static_cast<int>(hessian_.rows()); }

    private:
        friend CondensedLhs condense_lhs(const OcpQpMatrices &m, const QpOptions &options);
        friend QpSolution condense_rhs_and_solve(const CondensedLhs &lhs, const OcpQpVectors &v, const Vector &x,
                                                 const QpOptions &options, std::span<const int> warm_start);

        OcpQpMatrices mats_;
        Matrix gamma_;    ///< (N+1)nx x N nu
        Matrix grad_map_; ///< N nu x (N+1)nx, condensed gradient contribution of t
        Matrix hessian_;
        Matrix ineq_;
        FactoredDenseQp qp_;
        // Block Cholesky factor of the block-tridiagonal G G' used to recover the
        // equality multipliers: diagonal factors and subdiagonal blocks.
        std::vector<Eigen::LLT<Matrix>> normal_diag_;
        std::vector<Matrix> normal_sub_;
    };

    /// Throws SolverError when the condensed Hessian is not PD after regularization.
    CondensedLhs condense_lhs(const OcpQpMatrices &m, const QpOptions &options = {});

    /// Vector phase: condensed gradient and bounds, dense solve with iterative
    /// refinement, expansion, and equality multipliers from the stationarity rows.
    QpSolution condense_rhs_and_solve(const CondensedLhs &lhs, const OcpQpVectors &v, const Vector &x,
                                      const QpOptions &options = {}, std::span<const int> warm_start = {});

    /// Both phases in one call.
    QpSolution condense_and_solve(const OcpQpData &data, const Vector &x, const QpOptions &options = {},
                                  std::span<const int> warm_start = {});

} // namespace asrti

#endif // ASRTI_QP_HPP
