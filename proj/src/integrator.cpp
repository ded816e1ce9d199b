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

#include "asrti/integrator.hpp"
#include "asrti/errors.hpp"

#include <string>

namespace asrti
{

    namespace
    {
        // Radau IIA, s = 2.
        constexpr double kA[2][2] = {{5.0 / 12.0, -1.0 / 12.0}, {3.0 / 4.0, 1.0 / 4.0}};
    } // namespace

    IntegrationResult radau3_step(const OdeModel &model, const Vector &x, const Vector &u, double h,
                                  bool with_sensitivities, const RadauOptions &options)
    {
        if (!(h > 0.0))
            throw ConfigurationError("radau3_step: step length must be positive");
        const int nx = model.nx;
        const int nu = model.nu;
        if (x.size() != nx || u.size() != nu)
            throw ConfigurationError("radau3_step: state/control dimension mismatch");

        Vector stages(2 * nx);
        stages << x, x;

        Vector f[2];
        Matrix fx[2], fu[2];
        Matrix jac(2 * nx, 2 * nx);
        Eigen::PartialPivLU<Matrix> lu;

        auto residual = [&]()
        {
            f[0] = model.rhs(stages.head(nx), u);
            f[1] = model.rhs(stages.tail(nx), u);
            Vector r(2 * nx);
            for (int i = 0; i < 2; ++i)
                r.segment(i * nx, nx) = stages.segment(i * nx, nx) - x - h * (kA[i][0] * f[0] + kA[i][1] * f[1]);
            return r;
        };
        auto factor = [&]()
        {
            for (int j = 0; j < 2; ++j)
                model.rhs_jacobians(stages.segment(j * nx, nx), u, fx[j], fu[j]);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                {
                    jac.block(i * nx, j * nx, nx, nx) = -h * kA[i][j] * fx[j];
                    if (i == j)
                        jac.block(i * nx, j * nx, nx, nx).diagonal().array() += 1.0;
                }
            lu.compute(jac);
        };

        IntegrationResult out;
        for (;;)
        {
            const Vector r = residual();
            if (!r.allFinite())
                throw IntegrationError("radau3_step: non-finite stage residual");
            const bool converged = r.lpNorm<Eigen::Infinity>() <= options.newton_tol;
            if (converged && !with_sensitivities)
                break;
            if (!converged && out.newton_iters >= options.max_newton_iters)
                throw IntegrationError("radau3_step: Newton did not converge in " +
                                       std::to_string(options.max_newton_iters) + " iterations");
            factor();
            if (converged)
                break;
            stages -= lu.solve(r);
            ++out.newton_iters;
        }

        out.x_next = stages.tail(nx);
        out.stage_values = stages;
        if (with_sensitivities)
        {
            Matrix rhs_x(2 * nx, nx);
            rhs_x << Matrix::Identity(nx, nx), Matrix::Identity(nx, nx);
            Matrix rhs_u(2 * nx, nu);
            for (int i = 0; i < 2; ++i)
                rhs_u.middleRows(i * nx, nx) = h * (kA[i][0] * fu[0] + kA[i][1] * fu[1]);
            out.stage_sens_x = lu.solve(rhs_x);
            out.stage_sens_u = lu.solve(rhs_u);
            out.sens_x = out.stage_sens_x.bottomRows(nx);
            out.sens_u = out.stage_sens_u.bottomRows(nx);
        }
        return out;
    }

    Vector simulate_plant(const OdeModel &model, const Vector &x, const Vector &u, double dt, int substeps,
                          const RadauOptions &options)
    {
        if (substeps < 1)
            throw ConfigurationError("simulate_plant: substeps must be >= 1");
        const double h = dt / substeps;
        Vector state = x;
        for (int i = 0; i < substeps; ++i)
            state = radau3_step(model, state, u, h, false, options).x_next;
        return state;
    }

} // namespace asrti
