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

#include "asrti/qp_data.hpp"
#include "asrti/errors.hpp"

#include <string>

namespace asrti
{

    int OcpQpMatrices::nh() const
    {
        int rows = 0;
        for (const auto &c : C)
            rows += static_cast<int>(c.rows());
        return rows;
    }

    int OcpQpMatrices::ineq_offset(int k) const
    {
        int offset = 0;
        for (int j = 0; j < k; ++j)
            offset += static_cast<int>(C[j].rows());
        return offset;
    }

    namespace
    {
        int stage_width(const OcpQpMatrices &m, int k)
        {
            return k < m.horizon() ? m.nx + m.nu : m.nx;
        }
    } // namespace

    Vector hessian_times(const OcpQpMatrices &m, const Vector &dw)
    {
        Vector out(m.nw());
        for (int k = 0; k <= m.horizon(); ++k)
        {
            const int w = stage_width(m, k);
            const int idx = m.state_index(k);
            out.segment(idx, w).noalias() = m.hess[k] * dw.segment(idx, w);
        }
        return out;
    }

    Vector eq_jacobian_times(const OcpQpMatrices &m, const Vector &dw)
    {
        const int nx = m.nx;
        Vector out(m.ng());
        out.head(nx) = dw.segment(m.state_index(0), nx);
        for (int k = 0; k < m.horizon(); ++k)
        {
            out.segment((k + 1) * nx, nx) = m.A[k] * dw.segment(m.state_index(k), nx) +
                                            m.B[k] * dw.segment(m.control_index(k), m.nu) -
                                            dw.segment(m.state_index(k + 1), nx);
        }
        return out;
    }

    Vector ineq_jacobian_times(const OcpQpMatrices &m, const Vector &dw)
    {
        Vector out(m.nh());
        int row = 0;
        for (int k = 0; k <= m.horizon(); ++k)
        {
            const int r = m.ineq_rows(k);
            if (r == 0)
                continue;
            out.segment(row, r) = m.C[k] * dw.segment(m.state_index(k), m.nx);
            if (k < m.horizon())
                out.segment(row, r) += m.D[k] * dw.segment(m.control_index(k), m.nu);
            row += r;
        }
        return out;
    }

    Vector eq_jacobian_transpose_times(const OcpQpMatrices &m, const Vector &lambda)
    {
        const int nx = m.nx;
        Vector out = Vector::Zero(m.nw());
        out.segment(m.state_index(0), nx) = lambda.head(nx);
        for (int k = 0; k < m.horizon(); ++k)
        {
            const auto lk = lambda.segment((k + 1) * nx, nx);
            out.segment(m.state_index(k), nx) += m.A[k].transpose() * lk;
            out.segment(m.control_index(k), m.nu) += m.B[k].transpose() * lk;
            out.segment(m.state_index(k + 1), nx) -= lk;
        }
        return out;
    }

    Vector ineq_jacobian_transpose_times(const OcpQpMatrices &m, const Vector &mu)
    {
        Vector out = Vector::Zero(m.nw());
        int row = 0;
        for (int k = 0; k <= m.horizon(); ++k)
        {
            const int r = m.ineq_rows(k);
            if (r == 0)
                continue;
            const auto mk = mu.segment(row, r);
            out.segment(m.state_index(k), m.nx) += m.C[k].transpose() * mk;
            if (k < m.horizon())
                out.segment(m.control_index(k), m.nu) += m.D[k].transpose() * mk;
            row += r;
        }
        return out;
    }

    Vector stack_gradient(const OcpQpMatrices &m, const OcpQpVectors &v)
    {
        Vector out(m.nw());
        for (int k = 0; k <= m.horizon(); ++k)
            out.segment(m.state_index(k), stage_width(m, k)) = v.grad[k];
        return out;
    }

    Vector stack_eq_residual(const OcpQpMatrices &m, const OcpQpVectors &v, const Vector &x)
    {
        const int nx = m.nx;
        Vector out(m.ng());
        out.head(nx) = v.init - x;
        for (int k = 0; k < m.horizon(); ++k)
            out.segment((k + 1) * nx, nx) = v.gap[k];
        return out;
    }

    Vector stack_ineq(const OcpQpMatrices &m, const OcpQpVectors &v)
    {
        Vector out(m.nh());
        int row = 0;
        for (int k = 0; k <= m.horizon(); ++k)
        {
            const int r = m.ineq_rows(k);
            out.segment(row, r) = v.ineq[k];
            row += r;
        }
        return out;
    }

    Matrix dense_hessian(const OcpQpMatrices &m)
    {
        Matrix out = Matrix::Zero(m.nw(), m.nw());
        for (int k = 0; k <= m.horizon(); ++k)
        {
            const int w = stage_width(m, k);
            const int idx = m.state_index(k);
            out.block(idx, idx, w, w) = m.hess[k];
        }
        return out;
    }

    Matrix dense_eq_jacobian(const OcpQpMatrices &m)
    {
        const int nx = m.nx;
        Matrix out = Matrix::Zero(m.ng(), m.nw());
        out.block(0, m.state_index(0), nx, nx).setIdentity();
        for (int k = 0; k < m.horizon(); ++k)
        {
            const int row = (k + 1) * nx;
            out.block(row, m.state_index(k), nx, nx) = m.A[k];
            out.block(row, m.control_index(k), nx, m.nu) = m.B[k];
            out.block(row, m.state_index(k + 1), nx, nx) = -Matrix::Identity(nx, nx);
        }
        return out;
    }

    Matrix dense_ineq_jacobian(const OcpQpMatrices &m)
    {
        Matrix out = Matrix::Zero(m.nh(), m.nw());
        int row = 0;
        for (int k = 0; k <= m.horizon(); ++k)
        {
            const int r = m.ineq_rows(k);
            if (r == 0)
                continue;
            out.block(row, m.state_index(k), r, m.nx) = m.C[k];
            if (k < m.horizon())
                out.block(row, m.control_index(k), r, m.nu) = m.D[k];
            row += r;
        }
        return out;
    }

    void check_dimensions(const OcpQpMatrices &m)
    {
        const int N = m.horizon();
        auto fail = [](const std::string &what)
        { throw ConfigurationError("OCP QP: " + what); };

        if (N < 1)
            fail("horizon must be at least 1");
        if (static_cast<int>(m.B.size()) != N || static_cast<int>(m.D.size()) != N)
            fail("B/D must have one block per stage");
        if (static_cast<int>(m.hess.size()) != N + 1 || static_cast<int>(m.C.size()) != N + 1)
            fail("hess/C must have N+1 blocks");
        for (int k = 0; k <= N; ++k)
        {
            const int w = stage_width(m, k);
            if (m.hess[k].rows() != w || m.hess[k].cols() != w)
                fail("Hessian block " + std::to_string(k) + " has wrong size");
            if (m.C[k].cols() != m.nx)
                fail("C block " + std::to_string(k) + " has wrong column count");
            if (k < N)
            {
                if (m.A[k].rows() != m.nx || m.A[k].cols() != m.nx)
                    fail("A block " + std::to_string(k) + " has wrong size");
                if (m.B[k].rows() != m.nx || m.B[k].cols() != m.nu)
                    fail("B block " + std::to_string(k) + " has wrong size");
                if (m.D[k].rows() != m.C[k].rows() || m.D[k].cols() != m.nu)
                    fail("D block " + std::to_string(k) + " has wrong size");
            }
        }
    }

    void check_dimensions(const OcpQpMatrices &m, const OcpQpVectors &v)
    {
        check_dimensions(m);
        const int N = m.horizon();
        auto fail = [](const std::string &what)
        { throw ConfigurationError("OCP QP vectors: " + what); };
        if (static_cast<int>(v.grad.size()) != N + 1 || static_cast<int>(v.ineq.size()) != N + 1 ||
            static_cast<int>(v.gap.size()) != N)
            fail("wrong number of stage vectors");
        if (v.init.size() != m.nx)
            fail("init has wrong size");
        for (int k = 0; k <= N; ++k)
        {
            if (v.grad[k].size() != stage_width(m, k))
                fail("gradient " + std::to_string(k) + " has wrong size");
            if (v.ineq[k].size() != m.C[k].rows())
                fail("inequality residual " + std::to_string(k) + " has wrong size");
            if (k < N && v.gap[k].size() != m.nx)
                fail("gap " + std::to_string(k) + " has wrong size");
        }
    }

} // namespace asrti
