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

#ifndef ASRTI_NLP_HPP
#define ASRTI_NLP_HPP

#include "asrti/qp_data.hpp"

#include <atomic>
#include <functional>
#include <memory>
#include <vector>

namespace asrti
{

    struct CostEval
    {
        double value = 0.0;
        Vector gradient;
        Matrix hessian;
    };

    /// Jacobians are left empty when the caller did not request them.
    struct DynamicsEval
    {
        Vector next;
        Matrix d_state;
        Matrix d_control;
    };

    struct ConstraintEval
    {
        Vector value;
        Matrix d_state;
        Matrix d_control;
    };

    /**
     * Discrete-time optimal control problem
     *
     *   min  sum_{k<N} L_k(s_k, u_k) + E(s_N)
     *   s.t. s_0 = x,  s_{k+1} = phi_k(s_k, u_k),  h_k(s_k, u_k) >= 0,  h_N(s_N) >= 0.
     *
     * Cost callbacks return value, gradient and a symmetric positive definite
     * Hessian block (ordering [s; u]). Control bounds apply to every stage,
     * state bounds to nodes 1..N; infinite entries produce no rows.
     */
    struct OcpSpec
    {
        int horizon = 0;
        std::vector<double> dt_grid;
        int nx = 0;
        int nu = 0;

        std::function<CostEval(int k, const Vector &s, const Vector &u)> stage_cost;
        std::function<CostEval(const Vector &s)> terminal_cost;
        std::function<DynamicsEval(int k, const Vector &s, const Vector &u, bool with_jacobians)> dynamics;

        int n_path = 0;
        std::function<ConstraintEval(int k, const Vector &s, const Vector &u, bool with_jacobians)> path_constraints;
        int n_terminal = 0;
        std::function<ConstraintEval(const Vector &s, bool with_jacobians)> terminal_constraints;

        Vector u_lower;
        Vector u_upper;
        Vector s_lower;
        Vector s_upper;

        /// Throws ConfigurationError on invalid horizon, grid or dimensions.
        void validate() const;
    };

    /// Primal-dual point z = (w, lambda, mu).
    struct Iterate
    {
        Vector w;
        Vector lambda;
        Vector mu;
    };

    /// Infinity norms of the KKT conditions.
    struct KktResidual
    {
        double stat = 0.0;
        double eq = 0.0;
        double ineq = 0.0;
        double comp = 0.0;

        double max() const;
        bool within(double tol) const { return max() <= tol; }
    };

    /// Invocation counts of user callbacks, shared by copies of one NLP.
    struct EvaluationCounter
    {
        std::atomic<long> cost{0};
        std::atomic<long> dynamics{0};
        std::atomic<long> constraints{0};

        long total() const { return cost.load() + dynamics.load() + constraints.load(); }
    };

    /**
     * Compact parametric NLP  min f(w)  s.t.  g(w) + M x = 0,  h(w) >= 0
     * obtained from an OcpSpec by multiple shooting.
     *
     * Equality rows: s_0 (with M = -I, so the residual is s_0 - x), then the
     * shooting gaps phi_k(s_k, u_k) - s_{k+1}. Inequality rows stack
     * h_0, ..., h_N where each stage lists path constraints first, then finite
     * lower/upper control bounds, then finite lower/upper state bounds.
     */
    class ParametricNlp
    {
    public:
        explicit ParametricNlp(OcpSpec spec);

        const OcpSpec &spec() const { return spec_; }
        int horizon() const { return spec_.horizon; }
        int nx() const { return spec_.nx; }
        int nu() const { return spec_.nu; }
        int nw() const { return (horizon() + 1) * nx() + horizon() * nu(); }
        int ng() const { return (horizon() + 1) * nx(); }
        int nh() const { return ineq_offsets_.back(); }

        int state_index(int k) const { return k * (nx() + nu()); }
        int control_index(int k) const { return k * (nx() + nu()) + nx(); }
        int ineq_offset(int k) const { return ineq_offsets_[k]; }
        int ineq_rows(int k) const { return ineq_offsets_[k + 1] - ineq_offsets_[k]; }

        Matrix embedding() const;
        Iterate zero_iterate() const;
        void check(const Iterate &z) const;

        std::vector<Vector> unpack_states(const Vector &w) const;
        std::vector<Vector> unpack_controls(const Vector &w) const;
        Vector pack(const std::vector<Vector> &states, const std::vector<Vector> &controls) const;

        double objective(const Vector &w) const;
        Vector objective_gradient(const Vector &w) const;
        Vector eq_residual(const Vector &w) const;
        Vector ineq_residual(const Vector &w) const;

        /// Full QP data at w: Gauss-Newton Hessian blocks, all Jacobians and vectors.
        OcpQpData linearize(const Vector &w) const;
        /// Constraint values only (g and h); gradient entries are left empty.
        OcpQpVectors constraint_vectors(const Vector &w) const;

        EvaluationCounter &counter() const { return *counter_; }

    private:
        ConstraintEval stage_constraints(int k, const Vector &s, const Vector &u, bool with_jacobians) const;
        ConstraintEval terminal_constraints(const Vector &s, bool with_jacobians) const;

        OcpSpec spec_;
        std::vector<int> ineq_offsets_;
        std::vector<int> u_lower_idx_, u_upper_idx_, s_lower_idx_, s_upper_idx_;
        std::shared_ptr<EvaluationCounter> counter_;
    };

    ParametricNlp transcribe(OcpSpec spec);

    /// grad_w L = grad f(w) - grad g(w) lambda - grad h(w) mu.
    Vector lagrange_gradient(const ParametricNlp &nlp, const Iterate &z, const Vector &x);
    KktResidual eval_kkt(const ParametricNlp &nlp, const Iterate &z, const Vector &x);
    /// Same quantities from QP data already evaluated at z.w.
    KktResidual eval_kkt(const OcpQpData &lin, const Iterate &z, const Vector &x);
    Vector lagrange_gradient(const OcpQpData &lin, const Iterate &z);

} // namespace asrti

#endif // ASRTI_NLP_HPP
