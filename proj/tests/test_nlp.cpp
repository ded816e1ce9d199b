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
#include "asrti/nlp.hpp"
#include "asrti/pendulum.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace asrti;

namespace
{
    // N = 1, nx = nu = 1: cost 1/2 s0^2 + 1/2 u0^2 + 1/2 s1^2, dynamics s1 = u0.
    OcpSpec scalar_spec()
    {
        OcpSpec s;
        s.horizon = 1;
        s.dt_grid = {1.0};
        s.nx = 1;
        s.nu = 1;
        s.stage_cost = [](int, const Vector &x, const Vector &u)
        {
            Vector z(2);
            z << x, u;
            return CostEval{0.5 * z.squaredNorm(), z, Matrix::Identity(2, 2)};
        };
        s.terminal_cost = [](const Vector &x)
        { return CostEval{0.5 * x.squaredNorm(), x, Matrix::Identity(1, 1)}; };
        s.dynamics = [](int, const Vector &, const Vector &u, bool jac)
        {
            DynamicsEval d;
            d.next = u;
            if (jac)
            {
                d.d_state = Matrix::Zero(1, 1);
                d.d_control = Matrix::Identity(1, 1);
            }
            return d;
        };
        return s;
    }

    // Pendulum with a nonlinear path constraint, a terminal constraint and state bounds.
    OcpSpec constrained_pendulum()
    {
        PendulumOcpConfig cfg;
        cfg.intervals = 4;
        cfg.horizon_time = 0.8;
        OcpSpec s = build_pendulum_ocp(cfg);
        s.n_path = 1;
        s.path_constraints = [](int, const Vector &x, const Vector &u, bool jac)
        {
            ConstraintEval c;
            c.value = Vector::Constant(1, 1.0 - x[1] * x[1] - 0.01 * u[0] * u[0] * x[3]);
            if (jac)
            {
                c.d_state = Matrix::Zero(1, 4);
                c.d_state(0, 1) = -2.0 * x[1];
                c.d_state(0, 3) = -0.01 * u[0] * u[0];
                c.d_control = Matrix::Constant(1, 1, -0.02 * u[0] * x[3]);
            }
            return c;
        };
        s.n_terminal = 1;
        s.terminal_constraints = [](const Vector &x, bool jac)
        {
            ConstraintEval c;
            c.value = Vector::Constant(1, 2.0 - std::sin(x[1]) - x[0] * x[0]);
            if (jac)
            {
                c.d_state = Matrix::Zero(1, 4);
                c.d_state(0, 0) = -2.0 * x[0];
                c.d_state(0, 1) = -std::cos(x[1]);
            }
            return c;
        };
        s.s_lower = Vector::Constant(4, -std::numeric_limits<double>::infinity());
        s.s_lower[0] = -2.0;
        s.s_upper = Vector::Constant(4, std::numeric_limits<double>::infinity());
        s.s_upper[2] = 3.0;
        return s;
    }

    Iterate random_iterate(const ParametricNlp &nlp, std::mt19937_64 &rng)
    {
        return Iterate{oracle::random_vector(rng, nlp.nw(), 0.5), oracle::random_vector(rng, nlp.ng()),
                       oracle::random_vector(rng, nlp.nh())};
    }

    Vector parameter_part(const ParametricNlp &nlp, const Vector &x)
    {
        Vector mx = Vector::Zero(nlp.ng());
        mx.head(nlp.nx()) = -x;
        return mx;
    }
} // namespace

TEST(Transcription, Dimensions)
{
    OcpSpec s = oracle::linear_quadratic_spec(2, Matrix::Identity(4, 4), Matrix::Ones(4, 1),
                                              Matrix::Identity(4, 4), Matrix::Identity(1, 1),
                                              Matrix::Identity(4, 4));
    const ParametricNlp nlp = transcribe(s);
    EXPECT_EQ(nlp.nw(), 14);
    EXPECT_EQ(nlp.ng(), 12);
    EXPECT_EQ(nlp.nh(), 0);

    const ParametricNlp pend = transcribe(build_pendulum_ocp());
    EXPECT_EQ(pend.nw(), 104);
    EXPECT_EQ(pend.ng(), 84);
    EXPECT_EQ(pend.nh(), 40);
    EXPECT_EQ(pend.embedding().rows(), 84);
    EXPECT_TRUE(pend.embedding().topRows(4).isApprox(-Matrix::Identity(4, 4)));
}

TEST(Transcription, FeasibleRolloutHasZeroEqualityResidual)
{
    const ParametricNlp nlp = transcribe(build_pendulum_ocp());
    const Vector x = (Vector(4) << 0.1, 0.2, 0.0, -0.3).finished();
    std::vector<Vector> states{x}, controls;
    for (int k = 0; k < nlp.horizon(); ++k)
    {
        controls.push_back(Vector::Constant(1, std::sin(k)));
        states.push_back(nlp.spec().dynamics(k, states.back(), controls.back(), false).next);
    }
    Iterate z = nlp.zero_iterate();
    z.w = nlp.pack(states, controls);
    EXPECT_EQ(eval_kkt(nlp, z, x).eq, 0.0);
}

TEST(Transcription, PackUnpackRoundTrip)
{
    const ParametricNlp nlp = transcribe(constrained_pendulum());
    std::mt19937_64 rng(1);
    const Vector w = oracle::random_vector(rng, nlp.nw());
    EXPECT_EQ(nlp.pack(nlp.unpack_states(w), nlp.unpack_controls(w)), w);
}

TEST(Transcription, InequalityLayout)
{
    const ParametricNlp nlp = transcribe(constrained_pendulum());
    // stage 0: path + 2 control bounds; stages 1..3: + 2 state bounds; terminal: 1 + 2
    EXPECT_EQ(nlp.ineq_rows(0), 3);
    EXPECT_EQ(nlp.ineq_rows(1), 5);
    EXPECT_EQ(nlp.ineq_rows(4), 3);
    EXPECT_EQ(nlp.nh(), 3 + 3 * 5 + 3);

    Vector w = Vector::Zero(nlp.nw());
    w[nlp.control_index(1)] = 10.0;
    w[nlp.state_index(1) + 2] = 1.0;
    const Vector h = nlp.ineq_residual(w);
    const int o = nlp.ineq_offset(1);
    EXPECT_DOUBLE_EQ(h[o], 1.0);          // path
    EXPECT_DOUBLE_EQ(h[o + 1], 50.0);     // u + 40
    EXPECT_DOUBLE_EQ(h[o + 2], 30.0);     // 40 - u
    EXPECT_DOUBLE_EQ(h[o + 3], 2.0);      // p + 2
    EXPECT_DOUBLE_EQ(h[o + 4], 2.0);      // 3 - v
}

TEST(Kkt, ScalarHandSolution)
{
    const ParametricNlp nlp = transcribe(scalar_spec());
    const double x = 0.7;
    // stationarity in s0 gives lambda_init = s0 = x; the gap multiplier vanishes
    Iterate z{(Vector(3) << x, 0.0, 0.0).finished(), (Vector(2) << x, 0.0).finished(), Vector(0)};
    const KktResidual r = eval_kkt(nlp, z, Vector::Constant(1, x));
    EXPECT_EQ(r.stat, 0.0);
    EXPECT_EQ(r.eq, 0.0);
    EXPECT_EQ(r.ineq, 0.0);
    EXPECT_EQ(r.comp, 0.0);
}

TEST(Kkt, ZeroMultipliersGiveObjectiveGradient)
{
    const ParametricNlp nlp = transcribe(constrained_pendulum());
    std::mt19937_64 rng(2);
    Iterate z = random_iterate(nlp, rng);
    z.lambda.setZero();
    z.mu.setZero();
    const Vector x = oracle::random_vector(rng, 4);
    const Vector grad = lagrange_gradient(nlp, z, x);
    EXPECT_LT((grad - nlp.objective_gradient(z.w)).norm(), 1e-14);
    const KktResidual r = eval_kkt(nlp, z, x);
    EXPECT_EQ(r.stat, grad.lpNorm<Eigen::Infinity>());
    EXPECT_EQ(r.comp, 0.0);
}

TEST(Kkt, StationarityIsInfinityNormOfLagrangeGradient)
{
    const ParametricNlp nlp = transcribe(constrained_pendulum());
    std::mt19937_64 rng(3);
    for (int t = 0; t < 5; ++t)
    {
        const Iterate z = random_iterate(nlp, rng);
        const Vector x = oracle::random_vector(rng, 4);
        EXPECT_EQ(eval_kkt(nlp, z, x).stat, lagrange_gradient(nlp, z, x).lpNorm<Eigen::Infinity>());
    }
}

TEST(Kkt, QuadraticProblemAtSolutionIsStationary)
{
    Matrix A(2, 2), B(2, 1);
    A << 1.0, 0.1, 0.0, 1.0;
    B << 0.0, 0.1;
    const ParametricNlp nlp = transcribe(oracle::linear_quadratic_spec(
        3, A, B, Matrix::Identity(2, 2), Matrix::Identity(1, 1), Matrix::Identity(2, 2)));
    const Vector x = (Vector(2) << 1.0, -0.5).finished();
    const OcpQpData lin = nlp.linearize(nlp.zero_iterate().w);
    const oracle::FullKkt sol = oracle::solve_full_kkt(lin, x, {});
    const Iterate z{sol.dw, sol.lambda, Vector(0)};
    EXPECT_LT(lagrange_gradient(nlp, z, x).lpNorm<Eigen::Infinity>(), 1e-12);
    EXPECT_LT(eval_kkt(nlp, z, x).max(), 1e-12);
}

TEST(Linearization, MatchesFiniteDifferences)
{
    const ParametricNlp nlp = transcribe(constrained_pendulum());
    std::mt19937_64 rng(4);
    for (int t = 0; t < 5; ++t)
    {
        const Iterate z = random_iterate(nlp, rng);
        const Vector x = oracle::random_vector(rng, 4);
        const OcpQpData lin = nlp.linearize(z.w);

        const Matrix G = oracle::fd_jacobian([&](const Vector &w)
                                             { return nlp.eq_residual(w); },
                                             z.w);
        const Matrix H = oracle::fd_jacobian([&](const Vector &w)
                                             { return nlp.ineq_residual(w); },
                                             z.w);
        EXPECT_LT(oracle::rel_error(dense_eq_jacobian(lin.matrices), G), 1e-6);
        EXPECT_LT(oracle::rel_error(dense_ineq_jacobian(lin.matrices), H), 1e-6);

        auto lagrangian = [&](const Vector &w)
        {
            return Vector::Constant(1, nlp.objective(w) - z.lambda.dot(nlp.eq_residual(w) + parameter_part(nlp, x)) -
                                           z.mu.dot(nlp.ineq_residual(w)));
        };
        const Vector fd = oracle::fd_jacobian(lagrangian, z.w).transpose();
        EXPECT_LT(oracle::rel_error(lagrange_gradient(nlp, z, x), fd), 1e-6);
    }
}

TEST(Linearization, ConstraintVectorsSkipJacobians)
{
    const ParametricNlp nlp = transcribe(constrained_pendulum());
    std::mt19937_64 rng(5);
    const Vector w = oracle::random_vector(rng, nlp.nw(), 0.5);
    const OcpQpData full = nlp.linearize(w);
    const OcpQpVectors v = nlp.constraint_vectors(w);
    EXPECT_EQ(v.init, full.vectors.init);
    for (int k = 0; k < nlp.horizon(); ++k)
        EXPECT_LT((v.gap[k] - full.vectors.gap[k]).norm(), 1e-15);
    for (int k = 0; k <= nlp.horizon(); ++k)
        EXPECT_EQ(v.ineq[k], full.vectors.ineq[k]);
}

TEST(Linearization, CounterTracksCallbacks)
{
    const ParametricNlp nlp = transcribe(constrained_pendulum());
    const long before = nlp.counter().total();
    nlp.constraint_vectors(Vector::Zero(nlp.nw()));
    EXPECT_GT(nlp.counter().dynamics.load(), 0);
    EXPECT_EQ(nlp.counter().cost.load(), 0);
    const ParametricNlp copy = nlp;
    copy.objective(Vector::Zero(nlp.nw()));
    EXPECT_GT(nlp.counter().cost.load(), 0); // copies share the counter
    EXPECT_GT(nlp.counter().total(), before);
}

TEST(Transcription, RejectsInvalidSpecs)
{
    OcpSpec s = scalar_spec();
    s.horizon = 0;
    EXPECT_THROW(transcribe(s), ConfigurationError);
    s = scalar_spec();
    s.dt_grid = {1.0, 1.0};
    EXPECT_THROW(transcribe(s), ConfigurationError);
    s = scalar_spec();
    s.n_path = 1;
    EXPECT_THROW(transcribe(s), ConfigurationError);
    s = scalar_spec();
    s.u_lower = Vector::Zero(2);
    EXPECT_THROW(transcribe(s), ConfigurationError);

    const ParametricNlp nlp = transcribe(scalar_spec());
    Iterate bad = nlp.zero_iterate();
    bad.lambda = Vector::Zero(5);
    EXPECT_THROW(eval_kkt(nlp, bad, Vector::Zero(1)), ConfigurationError);
    EXPECT_THROW(eval_kkt(nlp, nlp.zero_iterate(), Vector::Zero(2)), ConfigurationError);
}
