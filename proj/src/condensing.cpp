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

#include "asrti/errors.hpp"
#include "asrti/qp.hpp"

#include <algorithm>
#include <vector>

namespace asrti
{

    namespace
    {
        // Objective gradient (without the -C'mu term) and constraint values of
        // the condensed QP at du, computed through the stage recursions rather
        // than the dense condensed matrices. The dense matrices lose accuracy
        // when the dynamics are unstable over the horizon; these sums do not.
        void structured_residuals(const OcpQpMatrices &m, const OcpQpVectors &v, const Vector &x, const Vector &du,
                                  Vector &grad, Vector &slack)
        {
            const int N = m.horizon();
            const int nx = m.nx;
            const int nu = m.nu;
            std::vector<Vector> ds(N + 1);
            ds[0] = x - v.init;
            for (int k = 0; k < N; ++k)
                ds[k + 1] = m.A[k] * ds[k] + m.B[k] * du.segment(k * nu, nu) + v.gap[k];

            grad.resize(N * nu);
            Vector adj = m.hess[N] * ds[N] + v.grad[N];
            for (int k = N - 1; k >= 0; --k)
            {
                Vector z(nx + nu);
                z << ds[k], du.segment(k * nu, nu);
                const Vector r = m.hess[k] * z + v.grad[k];
                grad.segment(k * nu, nu) = r.tail(nu) + m.B[k].transpose() * adj;
                adj = r.head(nx) + m.A[k].transpose() * adj;
            }

            slack.resize(m.nh());
            int row = 0;
            for (int k = 0; k <= N; ++k)
            {
                const int r = m.ineq_rows(k);
                if (r == 0)
                    continue;
                slack.segment(row, r) = v.ineq[k] + m.C[k] * ds[k];
                if (k < N)
                    slack.segment(row, r) += m.D[k] * du.segment(k * nu, nu);
                row += r;
            }
        }
    } // namespace

    CondensedLhs condense_lhs(const OcpQpMatrices &m, const QpOptions &options)
    {
        check_dimensions(m);
        const int N = m.horizon();
        const int nx = m.nx;
        const int nu = m.nu;
        const int nc = N * nu;

        CondensedLhs lhs;
        lhs.mats_ = m;

        // Gamma block row k maps the stacked control step to ds_k (s_0 is fixed).
        Matrix &gamma = lhs.gamma_;
        gamma = Matrix::Zero((N + 1) * nx, nc);
        for (int k = 0; k < N; ++k)
        {
            gamma.block((k + 1) * nx, 0, nx, k * nu).noalias() = m.A[k] * gamma.block(k * nx, 0, nx, k * nu);
            gamma.block((k + 1) * nx, k * nu, nx, nu) = m.B[k];
        }

        Matrix &H = lhs.hessian_;
        Matrix &W = lhs.grad_map_;
        H = Matrix::Zero(nc, nc);
        W = Matrix::Zero(nc, (N + 1) * nx);
        for (int k = 0; k <= N; ++k)
        {
            // Only the first k control blocks influence s_k.
            const int cols = k * nu;
            const auto Gk = gamma.block(k * nx, 0, nx, cols);
            const auto Qss = m.hess[k].topLeftCorner(nx, nx);
            if (cols > 0)
            {
                const Matrix QG = Qss * Gk;
                H.topLeftCorner(cols, cols).noalias() += Gk.transpose() * QG;
                W.block(0, k * nx, cols, nx) = QG.transpose();
            }
            if (k < N)
            {
                const auto Qsu = m.hess[k].topRightCorner(nx, nu);
                const auto Quu = m.hess[k].bottomRightCorner(nu, nu);
                if (cols > 0)
                {
                    const Matrix cross = Gk.transpose() * Qsu;
                    H.block(0, k * nu, cols, nu) += cross;
                    H.block(k * nu, 0, nu, cols) += cross.transpose();
                }
                H.block(k * nu, k * nu, nu, nu) += Quu;
                W.block(k * nu, k * nx, nu, nx) = m.hess[k].bottomLeftCorner(nu, nx);
            }
        }
        H = 0.5 * (H + H.transpose()).eval();

        Matrix &Cc = lhs.ineq_;
        Cc = Matrix::Zero(m.nh(), nc);
        int row = 0;
        for (int k = 0; k <= N; ++k)
        {
            const int r = m.ineq_rows(k);
            if (r == 0)
                continue;
            if (k > 0)
                Cc.block(row, 0, r, k * nu).noalias() = m.C[k] * gamma.block(k * nx, 0, nx, k * nu);
            if (k < N)
                Cc.block(row, k * nu, r, nu) += m.D[k];
            row += r;
        }

        lhs.qp_ = FactoredDenseQp(H, Cc, options.regularization);

        // G G' is block tridiagonal: I, then A_k A_k' + B_k B_k' + I on the
        // diagonal, and the coupling of gap row k with the row before it through
        // s_k (A_0 for the initial row, -A_k otherwise). The -I blocks of G keep
        // it PD.
        lhs.normal_diag_.resize(N + 1);
        lhs.normal_sub_.resize(N);
        lhs.normal_diag_[0].compute(Matrix::Identity(nx, nx));
        for (int k = 0; k < N; ++k)
        {
            const Matrix coupling = k == 0 ? Matrix(m.A[0]) : Matrix(-m.A[k]);
            // sub = coupling * L_prev^{-T}
            Matrix sub = lhs.normal_diag_[k].matrixL().solve(coupling.transpose()).transpose();
            Matrix diag = m.A[k] * m.A[k].transpose() + m.B[k] * m.B[k].transpose() + Matrix::Identity(nx, nx);
            diag.noalias() -= sub * sub.transpose();
            lhs.normal_diag_[k + 1].compute(diag);
            if (lhs.normal_diag_[k + 1].info() != Eigen::Success)
                throw SolverError("condense_lhs: equality Jacobian is rank deficient");
            lhs.normal_sub_[k] = std::move(sub);
        }
        return lhs;
    }

    QpSolution condense_rhs_and_solve(const CondensedLhs &lhs, const OcpQpVectors &v, const Vector &x,
                                      const QpOptions &options, std::span<const int> warm_start)
    {
        const OcpQpMatrices &m = lhs.mats_;
        check_dimensions(m, v);
        const int N = m.horizon();
        const int nx = m.nx;
        const int nu = m.nu;
        if (x.size() != nx)
            throw ConfigurationError("condense_rhs_and_solve: parameter has wrong size");

        // Affine part of the state trajectory: ds = t + Gamma du.
        Vector t((N + 1) * nx);
        t.head(nx) = x - v.init;
        for (int k = 0; k < N; ++k)
            t.segment((k + 1) * nx, nx).noalias() = m.A[k] * t.segment(k * nx, nx) + v.gap[k];

        Vector grad_s((N + 1) * nx);
        Vector q(N * nu);
        for (int k = 0; k <= N; ++k)
            grad_s.segment(k * nx, nx) = v.grad[k].head(nx);
        for (int k = 0; k < N; ++k)
            q.segment(k * nu, nu) = v.grad[k].tail(nu);
        q.noalias() += lhs.grad_map_ * t;
        q.noalias() += lhs.gamma_.transpose() * grad_s;

        Vector b(m.nh());
        int row = 0;
        for (int k = 0; k <= N; ++k)
        {
            const int r = m.ineq_rows(k);
            if (r == 0)
                continue;
            b.segment(row, r).noalias() = v.ineq[k] + m.C[k] * t.segment(k * nx, nx);
            row += r;
        }

        DenseQpSolution dense = lhs.qp_.solve(q, b, warm_start, options.max_iterations);

        // Iterative refinement: correction QPs on the same factorization with
        // accurately computed residuals.
        Vector grad, slack;
        for (int j = 0; j < options.refinement_steps; ++j)
        {
            structured_residuals(m, v, x, dense.x, grad, slack);
            const DenseQpSolution corr = lhs.qp_.solve(grad, slack, dense.active_set, options.max_iterations);
            dense.x += corr.x;
            dense.multipliers = corr.multipliers;
            dense.active_set = corr.active_set;
            dense.iterations += corr.iterations;
            if (corr.x.lpNorm<Eigen::Infinity>() <= 1e-15 * std::max(1.0, dense.x.lpNorm<Eigen::Infinity>()))
                break;
        }

        QpSolution sol;
        sol.dw.resize(m.nw());
        const Vector ds = t + lhs.gamma_ * dense.x;
        for (int k = 0; k <= N; ++k)
            sol.dw.segment(m.state_index(k), nx) = ds.segment(k * nx, nx);
        for (int k = 0; k < N; ++k)
            sol.dw.segment(m.control_index(k), nu) = dense.x.segment(k * nu, nu);
        sol.mu = dense.multipliers;
        sol.active_set = dense.active_set;
        sol.iterations = dense.iterations;

        // Equality multipliers: least-squares solution of G' lambda = Q dw + a - H' mu.
        // Back-substitution through the state rows alone is exact in exact
        // arithmetic but amplifies rounding by the growth of the dynamics.
        const Vector rhs = hessian_times(m, sol.dw) + stack_gradient(m, v) - ineq_jacobian_transpose_times(m, sol.mu);
        sol.lambda = eq_jacobian_times(m, rhs);
        for (int k = 0; k <= N; ++k)
        {
            auto y = sol.lambda.segment(k * nx, nx);
            if (k > 0)
                y -= lhs.normal_sub_[k - 1] * sol.lambda.segment((k - 1) * nx, nx);
            lhs.normal_diag_[k].matrixL().solveInPlace(y);
        }
        for (int k = N; k >= 0; --k)
        {
            auto y = sol.lambda.segment(k * nx, nx);
            if (k < N)
                y -= lhs.normal_sub_[k].transpose() * sol.lambda.segment((k + 1) * nx, nx);
            lhs.normal_diag_[k].matrixU().solveInPlace(y);
        }
        return sol;
    }

    QpSolution condense_and_solve(const OcpQpData &data, const Vector &x, const QpOptions &options,
                                  std::span<const int> warm_start)
    {
        return condense_rhs_and_solve(condense_lhs(data.matrices, options), data.vectors, x, options, warm_start);
    }

} // namespace asrti
