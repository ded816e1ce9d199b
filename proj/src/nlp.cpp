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

#include "asrti/nlp.hpp"
#include "asrti/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace asrti
{

    namespace
    {
        std::vector<int> finite_indices(const Vector &bound)
        {
            std::vector<int> idx;
            for (int i = 0; i < bound.size(); ++i)
                if (std::isfinite(bound[i]))
                    idx.push_back(i);
            return idx;
        }

        double inf_norm(const Vector &v)
        {
            return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
        }
    } // namespace

    void OcpSpec::validate() const
    {
        auto fail = [](const std::string &what)
        { throw ConfigurationError("OcpSpec: " + what); };

        if (horizon < 1)
            fail("horizon must be >= 1");
        if (static_cast<int>(dt_grid.size()) != horizon)
            fail("dt_grid must have one entry per stage");
        for (double dt : dt_grid)
            if (!(dt > 0.0))
                fail("dt_grid entries must be positive");
        if (nx < 1 || nu < 0)
            fail("invalid state/control dimension");
        if (!stage_cost || !terminal_cost || !dynamics)
            fail("stage_cost, terminal_cost and dynamics are required");
        if (n_path > 0 && !path_constraints)
            fail("n_path > 0 requires path_constraints");
        if (n_terminal > 0 && !terminal_constraints)
            fail("n_terminal > 0 requires terminal_constraints");
        if (u_lower.size() != 0 && u_lower.size() != nu)
            fail("u_lower has wrong size");
        if (u_upper.size() != 0 && u_upper.size() != nu)
            fail("u_upper has wrong size");
        if (s_lower.size() != 0 && s_lower.size() != nx)
            fail("s_lower has wrong size");
        if (s_upper.size() != 0 && s_upper.size() != nx)
            fail("s_upper has wrong size");
    }

    double KktResidual::max() const
    {
        return std::max({stat, eq, ineq, comp});
    }

    ParametricNlp::ParametricNlp(OcpSpec spec)
        : spec_(std::move(spec)), counter_(std::make_shared<EvaluationCounter>())
    {
        spec_.validate();
        u_lower_idx_ = finite_indices(spec_.u_lower);
        u_upper_idx_ = finite_indices(spec_.u_upper);
        s_lower_idx_ = finite_indices(spec_.s_lower);
        s_upper_idx_ = finite_indices(spec_.s_upper);

        const int n_u_bounds = static_cast<int>(u_lower_idx_.size() + u_upper_idx_.size());
        const int n_s_bounds = static_cast<int>(s_lower_idx_.size() + s_upper_idx_.size());
        ineq_offsets_.assign(spec_.horizon + 2, 0);
        for (int k = 0; k <= spec_.horizon; ++k)
        {
            int rows = 0;
            if (k < spec_.horizon)
                rows = spec_.n_path + n_u_bounds + (k > 0 ? n_s_bounds : 0);
            else
                rows = spec_.n_terminal + n_s_bounds;
            ineq_offsets_[k + 1] = ineq_offsets_[k] + rows;
        }
    }

    ParametricNlp transcribe(OcpSpec spec)
    {
        return ParametricNlp(std::move(spec));
    }

    Matrix ParametricNlp::embedding() const
    {
        Matrix M = Matrix::Zero(ng(), nx());
        M.topRows(nx()) = -Matrix::Identity(nx(), nx());
        return M;
    }

    Iterate ParametricNlp::zero_iterate() const
    {
        return Iterate{Vector::Zero(nw()), Vector::Zero(ng()), Vector::Zero(nh())};
    }

    void ParametricNlp::check(const Iterate &z) const
    {
        if (z.w.size() != nw() || z.lambda.size() != ng() || z.mu.size() != nh())
            throw ConfigurationError("iterate dimensions do not match the NLP");
    }

    std::vector<Vector> ParametricNlp::unpack_states(const Vector &w) const
    {
        std::vector<Vector> s;
        s.reserve(horizon() + 1);
        for (int k = 0; k <= horizon(); ++k)
            s.push_back(w.segment(state_index(k), nx()));
        return s;
    }

    std::vector<Vector> ParametricNlp::unpack_controls(const Vector &w) const
    {
        std::vector<Vector> u;
        u.reserve(horizon());
        for (int k = 0; k < horizon(); ++k)
            u.push_back(w.segment(control_index(k), nu()));
        return u;
    }

    Vector ParametricNlp::pack(const std::vector<Vector> &states, const std::vector<Vector> &controls) const
    {
        if (static_cast<int>(states.size()) != horizon() + 1 || static_cast<int>(controls.size()) != horizon())
            throw ConfigurationError("pack: wrong number of stages");
        Vector w(nw());
        for (int k = 0; k <= horizon(); ++k)
            w.segment(state_index(k), nx()) = states[k];
        for (int k = 0; k < horizon(); ++k)
            w.segment(control_index(k), nu()) = controls[k];
        return w;
    }

    ConstraintEval ParametricNlp::stage_constraints(int k, const Vector &s, const Vector &u,
                                                     bool with_jacobians) const
    {
        const int rows = ineq_rows(k);
        ConstraintEval out;
        out.value.resize(rows);
        if (with_jacobians)
        {
            out.d_state = Matrix::Zero(rows, nx());
            out.d_control = Matrix::Zero(rows, nu());
        }
        int r = 0;
        if (spec_.n_path > 0)
        {
            ++counter_->constraints;
            ConstraintEval path = spec_.path_constraints(k, s, u, with_jacobians);
            if (path.value.size() != spec_.n_path)
                throw ConfigurationError("path constraint callback returned wrong size");
            out.value.head(spec_.n_path) = path.value;
            if (with_jacobians)
            {
                if (path.d_state.rows() != spec_.n_path || path.d_state.cols() != nx() ||
                    path.d_control.rows() != spec_.n_path || path.d_control.cols() != nu())
                    throw ConfigurationError("path constraint Jacobian has wrong size");
                out.d_state.topRows(spec_.n_path) = path.d_state;
                out.d_control.topRows(spec_.n_path) = path.d_control;
            }
            r = spec_.n_path;
        }
        for (int i : u_lower_idx_)
        {
            out.value[r] = u[i] - spec_.u_lower[i];
            if (with_jacobians)
                out.d_control(r, i) = 1.0;
            ++r;
        }
        for (int i : u_upper_idx_)
        {
            out.value[r] = spec_.u_upper[i] - u[i];
            if (with_jacobians)
                out.d_control(r, i) = -1.0;
            ++r;
        }
        if (k > 0)
        {
            for (int i : s_lower_idx_)
            {
                out.value[r] = s[i] - spec_.s_lower[i];
                if (with_jacobians)
                    out.d_state(r, i) = 1.0;
                ++r;
            }
            for (int i : s_upper_idx_)
            {
                out.value[r] = spec_.s_upper[i] - s[i];
                if (with_jacobians)
                    out.d_state(r, i) = -1.0;
                ++r;
            }
        }
        return out;
    }

    ConstraintEval ParametricNlp::terminal_constraints(const Vector &s, bool with_jacobians) const
    {
        const int rows = ineq_rows(horizon());
        ConstraintEval out;
        out.value.resize(rows);
        if (with_jacobians)
            out.d_state = Matrix::Zero(rows, nx());
        int r = 0;
        if (spec_.n_terminal > 0)
        {
            ++counter_->constraints;
            ConstraintEval term = spec_.terminal_constraints(s, with_jacobians);
            if (term.value.size() != spec_.n_terminal)
                throw ConfigurationError("terminal constraint callback returned wrong size");
            out.value.head(spec_.n_terminal) = term.value;
            if (with_jacobians)
            {
                if (term.d_state.rows() != spec_.n_terminal || term.d_state.cols() != nx())
                    throw ConfigurationError("terminal constraint Jacobian has wrong size");
                out.d_state.topRows(spec_.n_terminal) = term.d_state;
            }
            r = spec_.n_terminal;
        }
        for (int i : s_lower_idx_)
        {
            out.value[r] = s[i] - spec_.s_lower[i];
            if (with_jacobians)
                out.d_state(r, i) = 1.0;
            ++r;
        }
        for (int i : s_upper_idx_)
        {
            out.value[r] = spec_.s_upper[i] - s[i];
            if (with_jacobians)
                out.d_state(r, i) = -1.0;
            ++r;
        }
        return out;
    }

    double ParametricNlp::objective(const Vector &w) const
    {
        double f = 0.0;
        for (int k = 0; k < horizon(); ++k)
        {
            ++counter_->cost;
            f += spec_.stage_cost(k, w.segment(state_index(k), nx()), w.segment(control_index(k), nu())).value;
        }
        ++counter_->cost;
        f += spec_.terminal_cost(w.segment(state_index(horizon()), nx())).value;
        return f;
    }

    Vector ParametricNlp::objective_gradient(const Vector &w) const
    {
        Vector grad(nw());
        const int width = nx() + nu();
        for (int k = 0; k < horizon(); ++k)
        {
            ++counter_->cost;
            CostEval c = spec_.stage_cost(k, w.segment(state_index(k), nx()), w.segment(control_index(k), nu()));
            if (c.gradient.size() != width)
                throw ConfigurationError("stage cost gradient has wrong size");
            grad.segment(state_index(k), width) = c.gradient;
        }
        ++counter_->cost;
        CostEval e = spec_.terminal_cost(w.segment(state_index(horizon()), nx()));
        if (e.gradient.size() != nx())
            throw ConfigurationError("terminal cost gradient has wrong size");
        grad.segment(state_index(horizon()), nx()) = e.gradient;
        return grad;
    }

    Vector ParametricNlp::eq_residual(const Vector &w) const
    {
        OcpQpVectors v = constraint_vectors(w);
        Vector g(ng());
        g.head(nx()) = v.init;
        for (int k = 0; k < horizon(); ++k)
            g.segment((k + 1) * nx(), nx()) = v.gap[k];
        return g;
    }

    Vector ParametricNlp::ineq_residual(const Vector &w) const
    {
        Vector h(nh());
        for (int k = 0; k < horizon(); ++k)
            h.segment(ineq_offset(k), ineq_rows(k)) =
                stage_constraints(k, w.segment(state_index(k), nx()), w.segment(control_index(k), nu()), false).value;
        h.segment(ineq_offset(horizon()), ineq_rows(horizon())) =
            terminal_constraints(w.segment(state_index(horizon()), nx()), false).value;
        return h;
    }

    OcpQpVectors ParametricNlp::constraint_vectors(const Vector &w) const
    {
        if (w.size() != nw())
            throw ConfigurationError("primal vector has wrong size");
        const int N = horizon();
        OcpQpVectors v;
        v.grad.resize(N + 1);
        v.gap.resize(N);
        v.ineq.resize(N + 1);
        v.init = w.segment(state_index(0), nx());
        for (int k = 0; k < N; ++k)
        {
            const Vector s = w.segment(state_index(k), nx());
            const Vector u = w.segment(control_index(k), nu());
            ++counter_->dynamics;
            DynamicsEval d = spec_.dynamics(k, s, u, false);
            if (d.next.size() != nx())
                throw ConfigurationError("dynamics callback returned wrong size");
            v.gap[k] = d.next - w.segment(state_index(k + 1), nx());
            v.ineq[k] = stage_constraints(k, s, u, false).value;
        }
        v.ineq[N] = terminal_constraints(w.segment(state_index(N), nx()), false).value;
        return v;
    }

    OcpQpData ParametricNlp::linearize(const Vector &w) const
    {
        if (w.size() != nw())
            throw ConfigurationError("primal vector has wrong size");
        const int N = horizon();
        const int width = nx() + nu();
        OcpQpData data;
        OcpQpMatrices &m = data.matrices;
        OcpQpVectors &v = data.vectors;
        m.nx = nx();
        m.nu = nu();
        m.hess.resize(N + 1);
        m.A.resize(N);
        m.B.resize(N);
        m.C.resize(N + 1);
        m.D.resize(N);
        v.grad.resize(N + 1);
        v.gap.resize(N);
        v.ineq.resize(N + 1);
        v.init = w.segment(state_index(0), nx());

        for (int k = 0; k < N; ++k)
        {
            const Vector s = w.segment(state_index(k), nx());
            const Vector u = w.segment(control_index(k), nu());

            ++counter_->cost;
            CostEval c = spec_.stage_cost(k, s, u);
            if (c.gradient.size() != width || c.hessian.rows() != width || c.hessian.cols() != width)
                throw ConfigurationError("stage cost derivatives have wrong size");
            m.hess[k] = c.hessian;
            v.grad[k] = c.gradient;

            ++counter_->dynamics;
            DynamicsEval d = spec_.dynamics(k, s, u, true);
            if (d.next.size() != nx() || d.d_state.rows() != nx() || d.d_state.cols() != nx() ||
                d.d_control.rows() != nx() || d.d_control.cols() != nu())
                throw ConfigurationError("dynamics callback returned wrong size");
            m.A[k] = std::move(d.d_state);
            m.B[k] = std::move(d.d_control);
            v.gap[k] = d.next - w.segment(state_index(k + 1), nx());

            ConstraintEval h = stage_constraints(k, s, u, true);
            m.C[k] = std::move(h.d_state);
            m.D[k] = std::move(h.d_control);
            v.ineq[k] = std::move(h.value);
        }

        const Vector sN = w.segment(state_index(N), nx());
        ++counter_->cost;
        CostEval e = spec_.terminal_cost(sN);
        if (e.gradient.size() != nx() || e.hessian.rows() != nx() || e.hessian.cols() != nx())
            throw ConfigurationError("terminal cost derivatives have wrong size");
        m.hess[N] = e.hessian;
        v.grad[N] = e.gradient;
        ConstraintEval hN = terminal_constraints(sN, true);
        m.C[N] = std::move(hN.d_state);
        v.ineq[N] = std::move(hN.value);
        return data;
    }

    Vector lagrange_gradient(const OcpQpData &lin, const Iterate &z)
    {
        return stack_gradient(lin.matrices, lin.vectors) -
               eq_jacobian_transpose_times(lin.matrices, z.lambda) -
               ineq_jacobian_transpose_times(lin.matrices, z.mu);
    }

    KktResidual eval_kkt(const OcpQpData &lin, const Iterate &z, const Vector &x)
    {
        const OcpQpMatrices &m = lin.matrices;
        KktResidual r;
        r.stat = inf_norm(lagrange_gradient(lin, z));
        r.eq = inf_norm(stack_eq_residual(m, lin.vectors, x));
        const Vector h = stack_ineq(m, lin.vectors);
        r.ineq = h.size() == 0 ? 0.0 : std::max(0.0, (-h).maxCoeff());
        r.comp = inf_norm(z.mu.cwiseProduct(h));
        return r;
    }

    Vector lagrange_gradient(const ParametricNlp &nlp, const Iterate &z, const Vector &x)
    {
        nlp.check(z);
        if (x.size() != nlp.nx())
            throw ConfigurationError("parameter has wrong size");
        return lagrange_gradient(nlp.linearize(z.w), z);
    }

    KktResidual eval_kkt(const ParametricNlp &nlp, const Iterate &z, const Vector &x)
    {
        nlp.check(z);
        if (x.size() != nlp.nx())
            throw ConfigurationError("parameter has wrong size");
        return eval_kkt(nlp.linearize(z.w), z, x);
    }

} // namespace asrti
