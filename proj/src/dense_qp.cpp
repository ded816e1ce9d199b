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

#include "asrti/qp.hpp"
#include "asrti/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace asrti
{

    namespace
    {
        constexpr double kDependenceTol = 1e-10;
        constexpr double kFeasibilityTol = 1e-12;

        /// Working set with a thin QR factorization of its normals.
        class WorkingSet
        {
        public:
            explicit WorkingSet(const Matrix &normals) : normals_(normals) {}

            const std::vector<int> &rows() const { return rows_; }
            int size() const { return static_cast<int>(rows_.size()); }
            bool contains(int i) const { return std::find(rows_.begin(), rows_.end(), i) != rows_.end(); }

            void add(int i)
            {
                rows_.push_back(i);
                refactor();
            }

            void remove_at(int pos)
            {
                rows_.erase(rows_.begin() + pos);
                refactor();
            }

            /// Component of n orthogonal to the span of the working normals.
            Vector project_out(const Vector &n) const
            {
                if (rows_.empty())
                    return n;
                return n - q1_ * (q1_.transpose() * n);
            }

            /// Multiplier change -(N'N)^{-1} N' n for moving along n.
            Vector multiplier_direction(const Vector &n) const
            {
                if (rows_.empty())
                    return Vector();
                return -r_.triangularView<Eigen::Upper>().solve(q1_.transpose() * n);
            }

            /// Minimizer of 1/2|y + qhat|^2 subject to N'y + b_W = 0 and its multipliers.
            void solve_eqp(const Vector &qhat, const Vector &b, Vector &y, Vector &u) const
            {
                if (rows_.empty())
                {
                    y = -qhat;
                    u.resize(0);
                    return;
                }
                const int m = size();
                Vector rhs(m);
                for (int j = 0; j < m; ++j)
                    rhs[j] = normals_.col(rows_[j]).dot(qhat) - b[rows_[j]];
                // (N'N) u = N'qhat - b_W with N'N = R'R.
                u = r_.triangularView<Eigen::Upper>().transpose().solve(rhs);
                u = r_.triangularView<Eigen::Upper>().solve(u);
                y = -qhat;
                for (int j = 0; j < m; ++j)
                    y += u[j] * normals_.col(rows_[j]);
            }

        private:
            void refactor()
            {
                if (rows_.empty())
                {
                    q1_.resize(0, 0);
                    r_.resize(0, 0);
                    return;
                }
                const int n = static_cast<int>(normals_.rows());
                const int m = size();
                Matrix active(n, m);
                for (int j = 0; j < m; ++j)
                    active.col(j) = normals_.col(rows_[j]);
                Eigen::HouseholderQR<Matrix> qr(active);
                q1_ = qr.householderQ() * Matrix::Identity(n, m);
                r_ = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
            }

            const Matrix &normals_;
            std::vector<int> rows_;
            Matrix q1_;
            Matrix r_;
        };
    } // namespace

    FactoredDenseQp::FactoredDenseQp(const Matrix &H, const Matrix &C, double regularization)
    {
        const Eigen::Index n = H.rows();
        if (H.cols() != n || C.cols() != n)
            throw ConfigurationError("dense QP: Hessian and constraint matrix dimensions do not match");
        Eigen::LLT<Matrix> llt(H);
        if (llt.info() != Eigen::Success)
        {
            llt.compute(H + regularization * Matrix::Identity(n, n));
            regularized_ = true;
            if (llt.info() != Eigen::Success)
                throw SolverError("dense QP: Hessian is not positive definite after regularization");
        }
        chol_ = llt.matrixL();
        normals_ = chol_.triangularView<Eigen::Lower>().solve(C.transpose());
    }

    DenseQpSolution FactoredDenseQp::solve(const Vector &q, const Vector &b, std::span<const int> warm_start,
                                           int max_iterations) const
    {
        const int n = num_variables();
        const int m = num_constraints();
        if (q.size() != n || b.size() != m)
            throw ConfigurationError("dense QP: gradient or bound vector has wrong size");

        const Vector qhat = chol_.triangularView<Eigen::Lower>().solve(q);
        WorkingSet ws(normals_);
        int iterations = 0;

        auto count_change = [&]()
        {
            if (++iterations > max_iterations)
                throw SolverError("dense QP: iteration limit of " + std::to_string(max_iterations) + " exceeded");
        };
        auto feas_tol = [&](int i)
        { return kFeasibilityTol * (1.0 + std::abs(b[i])); };

        for (int i : warm_start)
        {
            if (i < 0 || i >= m || ws.contains(i))
                continue;
            const Vector n_i = normals_.col(i);
            if (ws.project_out(n_i).norm() > kDependenceTol * n_i.norm())
                ws.add(i);
        }

        Vector y, u;
        ws.solve_eqp(qhat, b, y, u);
        // Warm start must be dual feasible before entering the main loop.
        for (;;)
        {
            int worst = -1;
            double worst_val = 0.0;
            for (int j = 0; j < ws.size(); ++j)
            {
                const double tol = 1e-12 * (1.0 + u.cwiseAbs().maxCoeff());
                if (u[j] < -tol && (worst < 0 || u[j] < worst_val ||
                                    (u[j] == worst_val && ws.rows()[j] < ws.rows()[worst])))
                {
                    worst = j;
                    worst_val = u[j];
                }
            }
            if (worst < 0)
                break;
            ws.remove_at(worst);
            count_change();
            ws.solve_eqp(qhat, b, y, u);
        }
        u = u.cwiseMax(0.0);

        for (;;)
        {
            // Most violated inactive row.
            int p = -1;
            double s_min = 0.0;
            for (int i = 0; i < m; ++i)
            {
                const double s = normals_.col(i).dot(y) + b[i];
                if (s < -feas_tol(i) && (p < 0 || s < s_min) && !ws.contains(i))
                {
                    p = i;
                    s_min = s;
                }
            }
            if (p < 0)
                break;

            const Vector n_p = normals_.col(p);
            for (;;)
            {
                const Vector z = ws.project_out(n_p);
                const Vector du = ws.multiplier_direction(n_p);

                int block = -1;
                double t_dual = std::numeric_limits<double>::infinity();
                for (int j = 0; j < ws.size(); ++j)
                {
                    if (du[j] >= 0.0)
                        continue;
                    const double ratio = u[j] / -du[j];
                    if (ratio < t_dual || (ratio == t_dual && ws.rows()[j] < ws.rows()[block]))
                    {
                        t_dual = ratio;
                        block = j;
                    }
                }

                const double z2 = z.squaredNorm();
                if (std::sqrt(z2) <= kDependenceTol * n_p.norm())
                {
                    if (block < 0)
                    {
                        std::vector<int> violated;
                        for (int i = 0; i < m; ++i)
                            if (normals_.col(i).dot(y) + b[i] < -feas_tol(i))
                                violated.push_back(i);
                        throw QpInfeasibleError("dense QP: infeasible (row " + std::to_string(p) +
                                                    " cannot be satisfied)",
                                                std::move(violated));
                    }
                    u += t_dual * du;
                    u[block] = 0.0;
                    Vector kept(ws.size() - 1);
                    for (int j = 0, k = 0; j < ws.size(); ++j)
                        if (j != block)
                            kept[k++] = u[j];
                    ws.remove_at(block);
                    u = kept;
                    count_change();
                    continue;
                }

                const double s_p = n_p.dot(y) + b[p];
                const double t_primal = -s_p / z2;
                if (t_primal <= t_dual)
                {
                    y += t_primal * z;
                    ws.add(p);
                    count_change();
                    ws.solve_eqp(qhat, b, y, u);
                    u = u.cwiseMax(0.0);
                    break;
                }
                y += t_dual * z;
                u += t_dual * du;
                Vector kept(ws.size() - 1);
                for (int j = 0, k = 0; j < ws.size(); ++j)
                    if (j != block)
                        kept[k++] = u[j];
                ws.remove_at(block);
                u = kept;
                count_change();
            }
        }

        ws.solve_eqp(qhat, b, y, u);
        DenseQpSolution out;
        out.x = chol_.transpose().triangularView<Eigen::Upper>().solve(y);
        out.multipliers = Vector::Zero(m);
        for (int j = 0; j < ws.size(); ++j)
            out.multipliers[ws.rows()[j]] = std::max(0.0, u[j]);
        out.active_set = ws.rows();
        std::sort(out.active_set.begin(), out.active_set.end());
        out.iterations = iterations;
        return out;
    }

    DenseQpSolution solve_dense_qp(const Matrix &H, const Vector &q, const Matrix &C, const Vector &b,
                                   const QpOptions &options, std::span<const int> warm_start)
    {
        if (H.rows() != H.cols() || (H.size() > 0 && (H - H.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + H.cwiseAbs().maxCoeff())))
            throw ConfigurationError("dense QP: Hessian must be square and symmetric");
        FactoredDenseQp qp(H, C, options.regularization);
        return qp.solve(q, b, warm_start, options.max_iterations);
    }

} // namespace asrti
