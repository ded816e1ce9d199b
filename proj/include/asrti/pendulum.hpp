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

#ifndef ASRTI_PENDULUM_HPP
#define ASRTI_PENDULUM_HPP

#include "asrti/integrator.hpp"
#include "asrti/nlp.hpp"

#include <vector>

namespace asrti
{

    /// Cart-pole with state [p, theta, v, omega]; theta = 0 is upright.
    struct PendulumParams
    {
        double cart_mass = 1.0;   // [kg]
        double pole_mass = 0.1;   // [kg]
        double pole_length = 0.8; // [m]
        double gravity = 9.81;    // [m/s^2]

        void validate() const;
    };

    Vector pendulum_rhs(const PendulumParams &p, const Vector &x, const Vector &u);
    void pendulum_jacobians(const PendulumParams &p, const Vector &x, const Vector &u, Matrix &dfdx, Matrix &dfdu);
    OdeModel pendulum_model(const PendulumParams &p);

    /**
     * Stabilizing solution of  P = Q + A'PA - A'PB (R + B'PB)^{-1} B'PA
     * by fixed-point iteration from P = Q. Throws SolverError when
     * |P_{j+1} - P_j|_inf > tol after max_iter iterations.
     */
    Matrix dare_terminal_cost(const Matrix &A, const Matrix &B, const Matrix &Q, const Matrix &R, double tol = 1e-10,
                              int max_iter = 10000);
    /// Infinity norm of the Riccati equation residual at P.
    double dare_residual(const Matrix &A, const Matrix &B, const Matrix &Q, const Matrix &R, const Matrix &P);

    enum class CostDiscretization
    {
        Node,      ///< dt_k * l(s_k, u_k)
        Integrated ///< Radau quadrature of l along the collocation stages, Gauss-Newton Hessian
    };

    struct PendulumOcpConfig
    {
        PendulumParams params;
        double horizon_time = 4.0;   // [s]
        int intervals = 20;
        double first_interval = 0.05; ///< <= 0 selects a uniform grid
        double sampling_time = 0.05;  ///< discretization used for the terminal Riccati cost
        std::vector<double> state_weights{100.0, 1e3, 0.01, 0.01};
        double control_weight = 0.2;
        double control_bound = 40.0;
        CostDiscretization cost = CostDiscretization::Node;
        RadauOptions integrator;

        static PendulumOcpConfig reference(); ///< uniform 80-interval grid
        std::vector<double> grid() const;
    };

    /// l(x, u) = x'Qx + u'Ru.
    double pendulum_stage_cost(const PendulumOcpConfig &cfg, const Vector &x, const Vector &u);

    /// Terminal weight P from the Riccati equation of the linearization at the
    /// upright equilibrium, discretized with one Radau step over sampling_time
    /// and stage weights scaled by sampling_time.
    Matrix pendulum_terminal_weight(const PendulumOcpConfig &cfg);

    /// Stage cost per cfg.cost, terminal x'Px, |u| <= bound, one Radau step per interval.
    OcpSpec build_pendulum_ocp(const PendulumOcpConfig &cfg = {});

} // namespace asrti

#endif // ASRTI_PENDULUM_HPP
