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

#ifndef ASRTI_QP_DATA_HPP
#define ASRTI_QP_DATA_HPP

#include <Eigen/Dense>

#include <vector>

namespace asrti
{

    using Vector = Eigen::VectorXd;
    using Matrix = Eigen::MatrixXd;

    /**
     * Matrix part of an OCP-structured QP
     *
     *   min  sum_k 1/2 [ds;du]' hess_k [ds;du] + grad_k' [ds;du]
     *   s.t. ds_0 = x - init
     *        ds_{k+1} = A_k ds_k + B_k du_k + gap_k
     *        C_k ds_k + D_k du_k + ineq_k >= 0
     *
     * with primal ordering (s_0, u_0, s_1, u_1, ..., s_N). The terminal stage
     * k = N has an (nx x nx) Hessian block and no control.
     */
    struct OcpQpMatrices
    {
        int nx = 0;
        int nu = 0;
        std::vector<Matrix> hess; ///< N+1 blocks, stage order [s; u]
        std::vector<Matrix> A;    ///< N dynamics Jacobians wrt state
        std::vector<Matrix> B;    ///< N dynamics Jacobians wrt control
        std::vector<Matrix> C;    ///< N+1 inequality Jacobians wrt state
        std::vector<Matrix> D;    ///< N inequality Jacobians wrt control

        int horizon() const { return static_cast<int>(A.size()); }
        int nw() const { return (horizon() + 1) * nx + horizon() * nu; }
        int ng() const { return (horizon() + 1) * nx; }
        int nh() const;
        int ineq_rows(int k) const { return static_cast<int>(C[k].rows()); }
        int state_index(int k) const { return k * (nx + nu); }
        int control_index(int k) const { return k * (nx + nu) + nx; }
        int ineq_offset(int k) const;
    };

    /// Vector part of the QP. `init` is the value of the initial-state rows of
    /// g (i.e. s_0); the parameter enters as init - x.
    struct OcpQpVectors
    {
        std::vector<Vector> grad; ///< N+1
        Vector init;
        std::vector<Vector> gap;  ///< N, phi_k(s_k, u_k) - s_{k+1}
        std::vector<Vector> ineq; ///< N+1
    };

    struct OcpQpData
    {
        OcpQpMatrices matrices;
        OcpQpVectors vectors;
    };

    // Structured products with the full-space QP operators. G and H denote the
    // equality and inequality Jacobians, Q the block-diagonal Hessian.
    Vector hessian_times(const OcpQpMatrices &m, const Vector &dw);
    Vector eq_jacobian_times(const OcpQpMatrices &m, const Vector &dw);
    Vector ineq_jacobian_times(const OcpQpMatrices &m, const Vector &dw);
    Vector eq_jacobian_transpose_times(const OcpQpMatrices &m, const Vector &lambda);
    Vector ineq_jacobian_transpose_times(const OcpQpMatrices &m, const Vector &mu);

    Vector stack_gradient(const OcpQpMatrices &m, const OcpQpVectors &v);
    /// g + M x with M = -I on the initial-state rows.
    Vector stack_eq_residual(const OcpQpMatrices &m, const OcpQpVectors &v, const Vector &x);
    Vector stack_ineq(const OcpQpMatrices &m, const OcpQpVectors &v);

    Matrix dense_hessian(const OcpQpMatrices &m);
    Matrix dense_eq_jacobian(const OcpQpMatrices &m);
    Matrix dense_ineq_jacobian(const OcpQpMatrices &m);

    /// Throws ConfigurationError when block sizes are inconsistent.
    void check_dimensions(const OcpQpMatrices &m);
    void check_dimensions(const OcpQpMatrices &m, const OcpQpVectors &v);

} // namespace asrti

#endif // ASRTI_QP_DATA_HPP
