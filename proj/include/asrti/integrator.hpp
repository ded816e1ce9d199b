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

#ifndef ASRTI_INTEGRATOR_HPP
#define ASRTI_INTEGRATOR_HPP

#include "asrti/qp_data.hpp"

#include <functional>

namespace asrti
{

    /// Autonomous controlled ODE  xdot = f(x, u)  with analytic Jacobians.
    struct OdeModel
    {
        int nx = 0;
        int nu = 0;
        std::function<Vector(const Vector &x, const Vector &u)> rhs;
        std::function<void(const Vector &x, const Vector &u, Matrix &dfdx, Matrix &dfdu)> rhs_jacobians;
    };

    struct IntegrationResult
    {
        Vector x_next;
        Matrix sens_x; ///< d x_next / d x, empty without sensitivities
        Matrix sens_u; ///< d x_next / d u
        Vector stage_values;     ///< [X_1; X_2] at the converged Newton point
        Matrix stage_sens_x;     ///< d [X_1; X_2] / d x, empty without sensitivities
        Matrix stage_sens_u;     ///< d [X_1; X_2] / d u
        int newton_iters = 0;
    };

    struct RadauOptions
    {
        double newton_tol = 1e-10; ///< infinity norm of the stage residual
        int max_newton_iters = 20;
    };

    /// Radau IIA quadrature weights b = (3/4, 1/4) at the nodes c = (1/3, 1).
    inline constexpr double kRadauWeights[2] = {0.75, 0.25};

    /**
     * One step of the two-stage Radau IIA method (order 3).
     *
     * Stage values X_i = x + h sum_j a_ij f(X_j, u) with c = (1/3, 1) and
     * a = [[5/12, -1/12], [3/4, 1/4]] are solved by exact Newton from X_i = x.
     * The method is stiffly accurate, so x_next = X_2. Sensitivities follow
     * from the implicit function theorem on the converged stage system using
     * the factorization at the converged stage values.
     *
     * Throws IntegrationError when Newton does not converge.
     */
    IntegrationResult radau3_step(const OdeModel &model, const Vector &x, const Vector &u, double h,
                                  bool with_sensitivities = true, const RadauOptions &options = {});

    /// Integrates over dt with `substeps` equal Radau steps, constant u.
    Vector simulate_plant(const OdeModel &model, const Vector &x, const Vector &u, double dt,
                          int substeps = 10, const RadauOptions &options = {});

} // namespace asrti

#endif // ASRTI_INTEGRATOR_HPP
