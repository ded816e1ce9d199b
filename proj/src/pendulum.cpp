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

#include "asrti/pendulum.hpp"
#include "asrti/errors.hpp"

#include <cmath>
#include <string>

namespace asrti
{

    void PendulumParams::validate() const
    {
        if (!(cart_mass > 0.0) || !(pole_mass > 0.0) || !(pole_length > 0.0))
            throw ConfigurationError("PendulumParams: masses and length must be positive");
    }

    Vector pendulum_rhs(const PendulumParams &p, const Vector &x, const Vector &u)
    {
        const double M = p.cart_mass, m = p.pole_mass, l = p.pole_length, g = p.gravity;
        const double theta = x[1], v = x[2], omega = x[3], F = u[0];
        const double s = std::sin(theta), c = std::cos(theta);
        const double denom = M + m - m * c * c;

        Vector xdot(4);
        xdot[0] = v;
        xdot[1] = omega;
        xdot[2] = (-m * l * s * omega * omega + m * g * c * s + F) / denom;
        xdot[3] = (-m * l * c * s * omega * omega + F * c + (M + m) * g * s) / (l * denom);
        return xdot;
    }

    void pendulum_jacobians(const PendulumParams &p, const Vector &x, const Vector &u, Matrix &dfdx, Matrix &dfdu)
    {
        const double M = p.cart_mass, m = p.pole_mass, l = p.pole_length, g = p.gravity;
        const double theta = x[1], omega = x[3], F = u[0];
        const double s = std::sin(theta), c = std::cos(theta);
        const double denom = M + m - m * c * c;
        const double ddenom = 2.0 * m * s * c;
        const double w2 = omega * omega;

        const double n1 = -m * l * s * w2 + m * g * c * s + F;
        const double dn1_dth = -m * l * c * w2 + m * g * (c * c - s * s);
        const double dn1_dom = -2.0 * m * l * s * omega;

        const double n2 = -m * l * c * s * w2 + F * c + (M + m) * g * s;
        const double dn2_dth = -m * l * (c * c - s * s) * w2 - F * s + (M + m) * g * c;
        const double dn2_dom = -2.0 * m * l * c * s * omega;

        dfdx = Matrix::Zero(4, 4);
        dfdx(0, 2) = 1.0;
        dfdx(1, 3) = 1.0;
        dfdx(2, 1) = (dn1_dth * denom - n1 * ddenom) / (denom * denom);
        dfdx(2, 3) = dn1_dom / denom;
        dfdx(3, 1) = (dn2_dth * denom - n2 * ddenom) / (l * denom * denom);
        dfdx(3, 3) = dn2_dom / (l * denom);

        dfdu = Matrix::Zero(4, 1);
        dfdu(2, 0) = 1.0 / denom;
        dfdu(3, 0) = c / (l * denom);
    }

    OdeModel pendulum_model(const PendulumParams &p)
    {
        p.validate();
        OdeModel model;
        model.nx = 4;
        model.nu = 1;
        model.rhs = [p](const Vector &x, const Vector &u)
        { return pendulum_rhs(p, x, u); };
        model.rhs_jacobians = [p](const Vector &x, const Vector &u, Matrix &dfdx, Matrix &dfdu)
        { pendulum_jacobians(p, x, u, dfdx, dfdu); };
        return model;
    }

    namespace
    {
        Matrix riccati_map(const Matrix &A, const Matrix &B, const Matrix &Q, const Matrix &R, const Matrix &P)
        {
            const Matrix PA = P * A;
            const Matrix PB = P * B;
            const Matrix S = R + B.transpose() * PB;
            const Matrix next = Q + A.transpose() * PA - PA.transpose() * B * S.ldlt().solve(PB.transpose() * A);
            return 0.5 * (next + next.transpose());
        }
    } // namespace

    Matrix dare_terminal_cost(const Matrix &A, const Matrix &B, const Matrix &Q, const Matrix &R, double tol,
                              int max_iter)
    {
        const Eigen::Index n = A.rows();
        if (A.cols() != n || B.rows() != n || Q.rows() != n || Q.cols() != n || R.rows() != B.cols() ||
            R.cols() != B.cols())
            throw ConfigurationError("dare_terminal_cost: dimension mismatch");
        Matrix P = Q;
        for (int j = 0; j < max_iter; ++j)
        {
            Matrix next = riccati_map(A, B, Q, R, P);
            const double change = (next - P).cwiseAbs().maxCoeff();
            P = std::move(next);
            if (change <= tol)
                return P;
        }
        throw SolverError("dare_terminal_cost: no convergence in " + std::to_string(max_iter) + " iterations");
    }

    double dare_residual(const Matrix &A, const Matrix &B, const Matrix &Q, const Matrix &R, const Matrix &P)
    {
        return (riccati_map(A, B, Q, R, P) - P).cwiseAbs().maxCoeff();
    }

    PendulumOcpConfig PendulumOcpConfig::reference()
    {
        PendulumOcpConfig cfg;
        cfg.intervals = 80;
        cfg.first_interval = 0.0;
        return cfg;
    }

    std::vector<double> PendulumOcpConfig::grid() const
    {
        if (intervals < 1 || !(horizon_time > 0.0))
            throw ConfigurationError("PendulumOcpConfig: invalid horizon");
        if (first_interval <= 0.0 || intervals == 1)
            return std::vector<double>(intervals, horizon_time / intervals);
        if (first_interval >= horizon_time)
            throw ConfigurationError("PendulumOcpConfig: first interval exceeds the horizon");
        std::vector<double> dt(intervals, (horizon_time - first_interval) / (intervals - 1));
        dt[0] = first_interval;
        return dt;
    }

    double pendulum_stage_cost(const PendulumOcpConfig &cfg, const Vector &x, const Vector &u)
    {
        double l = cfg.control_weight * u[0] * u[0];
        for (int i = 0; i < 4; ++i)
            l += cfg.state_weights[i] * x[i] * x[i];
        return l;
    }

    Matrix pendulum_terminal_weight(const PendulumOcpConfig &cfg)
    {
        const OdeModel model = pendulum_model(cfg.params);
        const IntegrationResult lin =
            radau3_step(model, Vector::Zero(4), Vector::Zero(1), cfg.sampling_time, true, cfg.integrator);
        const Matrix Q = cfg.sampling_time * Eigen::Map<const Vector>(cfg.state_weights.data(), 4).asDiagonal().toDenseMatrix();
        const Matrix R = Matrix::Constant(1, 1, cfg.sampling_time * cfg.control_weight);
        return dare_terminal_cost(lin.sens_x, lin.sens_u, Q, R);
    }

    OcpSpec build_pendulum_ocp(const PendulumOcpConfig &cfg)
    {
        if (cfg.state_weights.size() != 4)
            throw ConfigurationError("PendulumOcpConfig: four state weights expected");
        const OdeModel model = pendulum_model(cfg.params);

        OcpSpec spec;
        spec.horizon = cfg.intervals;
        spec.dt_grid = cfg.grid();
        spec.nx = 4;
        spec.nu = 1;

        Vector weights(5);
        weights << cfg.state_weights[0], cfg.state_weights[1], cfg.state_weights[2], cfg.state_weights[3],
            cfg.control_weight;
        const std::vector<double> dt = spec.dt_grid;
        const RadauOptions opts = cfg.integrator;
        if (cfg.cost == CostDiscretization::Node)
        {
            spec.stage_cost = [weights, dt](int k, const Vector &s, const Vector &u)
            {
                Vector z(5);
                z << s, u;
                CostEval c;
                c.value = dt[k] * z.dot(weights.cwiseProduct(z));
                c.gradient = 2.0 * dt[k] * weights.cwiseProduct(z);
                c.hessian = (2.0 * dt[k] * weights).asDiagonal();
                return c;
            };
        }
        else
        {
            spec.stage_cost = [model, weights, dt, opts](int k, const Vector &s, const Vector &u)
            {
                const IntegrationResult r = radau3_step(model, s, u, dt[k], true, opts);
                const Vector q = weights.head(4);
                const double rho = weights[4];
                CostEval c;
                c.value = dt[k] * rho * u.squaredNorm();
                c.gradient = Vector::Zero(5);
                c.gradient.tail(1) = 2.0 * dt[k] * rho * u;
                c.hessian = Matrix::Zero(5, 5);
                c.hessian(4, 4) = 2.0 * dt[k] * rho;
                Matrix J(4, 5);
                for (int i = 0; i < 2; ++i)
                {
                    const double wi = dt[k] * kRadauWeights[i];
                    const Vector X = r.stage_values.segment(4 * i, 4);
                    J << r.stage_sens_x.middleRows(4 * i, 4), r.stage_sens_u.middleRows(4 * i, 4);
                    c.value += wi * X.dot(q.cwiseProduct(X));
                    c.gradient += 2.0 * wi * J.transpose() * q.cwiseProduct(X);
                    c.hessian += 2.0 * wi * J.transpose() * q.asDiagonal() * J;
                }
                return c;
            };
        }

        const Matrix P = pendulum_terminal_weight(cfg);
        spec.terminal_cost = [P](const Vector &s)
        {
            CostEval c;
            c.value = s.dot(P * s);
            c.gradient = 2.0 * P * s;
            c.hessian = 2.0 * P;
            return c;
        };

        spec.dynamics = [model, dt, opts](int k, const Vector &s, const Vector &u, bool with_jacobians)
        {
            IntegrationResult r = radau3_step(model, s, u, dt[k], with_jacobians, opts);
            return DynamicsEval{std::move(r.x_next), std::move(r.sens_x), std::move(r.sens_u)};
        };

        spec.u_lower = Vector::Constant(1, -cfg.control_bound);
        spec.u_upper = Vector::Constant(1, cfg.control_bound);
        return spec;
    }

} // namespace asrti
