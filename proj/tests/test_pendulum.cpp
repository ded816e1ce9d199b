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

#include <numeric>

using namespace asrti;

TEST(PendulumModel, UprightEquilibrium)
{
    const PendulumParams p;
    EXPECT_TRUE(pendulum_rhs(p, Vector::Zero(4), Vector::Zero(1)).isZero(0.0));
}

TEST(PendulumModel, KinematicRows)
{
    const PendulumParams p;
    std::mt19937_64 rng(1);
    for (int t = 0; t < 10; ++t)
    {
        const Vector x = oracle::random_vector(rng, 4, 3.0);
        const Vector f = pendulum_rhs(p, x, oracle::random_vector(rng, 1, 50.0));
        EXPECT_EQ(f[0], x[2]);
        EXPECT_EQ(f[1], x[3]);
    }
}

TEST(PendulumModel, JacobiansMatchFiniteDifferences)
{
    const PendulumParams p;
    std::mt19937_64 rng(2);
    for (int t = 0; t < 100; ++t)
    {
        const Vector x = oracle::random_vector(rng, 4, 3.0);
        const Vector u = oracle::random_vector(rng, 1, 40.0);
        Matrix fx, fu;
        pendulum_jacobians(p, x, u, fx, fu);
        const Matrix fdx = oracle::fd_jacobian([&](const Vector &y)
                                               { return pendulum_rhs(p, y, u); },
                                               x);
        const Matrix fdu = oracle::fd_jacobian([&](const Vector &v)
                                               { return pendulum_rhs(p, x, v); },
                                               u);
        EXPECT_LT(oracle::rel_error(fx, fdx), 1e-6);
        EXPECT_LT(oracle::rel_error(fu, fdu), 1e-6);
    }
}

TEST(PendulumModel, RejectsNonPhysicalParameters)
{
    PendulumParams p;
    p.pole_length = 0.0;
    EXPECT_THROW(pendulum_model(p), ConfigurationError);
}

TEST(Dare, ZeroDynamicsGiveStageWeight)
{
    const Matrix Q = Matrix::Identity(2, 2) * 3.0;
    const Matrix P = dare_terminal_cost(Matrix::Zero(2, 2), Matrix::Ones(2, 1), Q, Matrix::Identity(1, 1));
    EXPECT_TRUE(P.isApprox(Q, 1e-14));
}

TEST(Dare, ScalarGoldenRatio)
{
    // P^2 - P - 1 = 0 for A = B = Q = R = 1
    const Matrix one = Matrix::Identity(1, 1);
    const Matrix P = dare_terminal_cost(one, one, one, one);
    EXPECT_NEAR(P(0, 0), (1.0 + std::sqrt(5.0)) / 2.0, 1e-10);
}

TEST(Dare, PendulumTerminalWeight)
{
    const PendulumOcpConfig cfg;
    const Matrix P = pendulum_terminal_weight(cfg);
    const IntegrationResult lin =
        radau3_step(pendulum_model(cfg.params), Vector::Zero(4), Vector::Zero(1), cfg.sampling_time);
    const Matrix Q = cfg.sampling_time * Vector::Map(cfg.state_weights.data(), 4).asDiagonal().toDenseMatrix();
    const Matrix R = Matrix::Constant(1, 1, cfg.sampling_time * cfg.control_weight);
    EXPECT_LE(dare_residual(lin.sens_x, lin.sens_u, Q, R, P), 1e-8);
    EXPECT_TRUE(P.isApprox(P.transpose(), 0.0));
    EXPECT_GT(Eigen::SelfAdjointEigenSolver<Matrix>(P).eigenvalues().minCoeff(), 0.0);
}

TEST(Dare, NonStabilizableDoesNotConverge)
{
    const Matrix A = Matrix::Constant(1, 1, 2.0);
    EXPECT_THROW(dare_terminal_cost(A, Matrix::Zero(1, 1), Matrix::Identity(1, 1), Matrix::Identity(1, 1)),
                 SolverError);
    EXPECT_THROW(dare_terminal_cost(A, Matrix::Zero(2, 1), Matrix::Identity(1, 1), Matrix::Identity(1, 1)),
                 ConfigurationError);
}

TEST(PendulumOcp, NonuniformGrid)
{
    const OcpSpec spec = build_pendulum_ocp();
    ASSERT_EQ(spec.dt_grid.size(), 20u);
    EXPECT_NEAR(std::accumulate(spec.dt_grid.begin(), spec.dt_grid.end(), 0.0), 4.0, 1e-12);
    EXPECT_DOUBLE_EQ(spec.dt_grid[0], 0.05);
    EXPECT_NEAR(spec.dt_grid[1], 3.95 / 19.0, 1e-15);
    EXPECT_NEAR(spec.dt_grid[1], 0.20789, 1e-5);

    const std::vector<double> ref = PendulumOcpConfig::reference().grid();
    ASSERT_EQ(ref.size(), 80u);
    EXPECT_DOUBLE_EQ(ref.front(), 0.05);
    EXPECT_DOUBLE_EQ(ref.back(), 0.05);
}

TEST(PendulumOcp, ControlBoundRows)
{
    const ParametricNlp nlp = transcribe(build_pendulum_ocp());
    EXPECT_EQ(nlp.nh(), 2 * 20);
    Vector w = Vector::Zero(nlp.nw());
    w[nlp.control_index(3)] = 40.0;
    const Vector h = nlp.ineq_residual(w);
    EXPECT_DOUBLE_EQ(h.minCoeff(), 0.0);
}

TEST(PendulumOcp, NodeCostScaledByInterval)
{
    const OcpSpec spec = build_pendulum_ocp();
    const Vector s = (Vector(4) << 1.0, 0.0, 0.0, 0.0).finished();
    const Vector u = Vector::Constant(1, 2.0);
    EXPECT_NEAR(spec.stage_cost(0, s, u).value, 0.05 * (100.0 + 0.2 * 4.0), 1e-12);
    EXPECT_NEAR(spec.stage_cost(1, s, u).value, 3.95 / 19.0 * (100.0 + 0.8), 1e-12);
    EXPECT_DOUBLE_EQ(pendulum_stage_cost(PendulumOcpConfig{}, s, u), 100.8);
}

TEST(PendulumOcp, IntegratedCostDerivatives)
{
    PendulumOcpConfig cfg;
    cfg.cost = CostDiscretization::Integrated;
    const OcpSpec spec = build_pendulum_ocp(cfg);
    std::mt19937_64 rng(3);
    for (int t = 0; t < 10; ++t)
    {
        const Vector s = oracle::random_vector(rng, 4, 0.5);
        const Vector u = oracle::random_vector(rng, 1, 10.0);
        const int k = t % 3;
        const CostEval c = spec.stage_cost(k, s, u);
        auto f = [&](const Vector &z)
        { return Vector::Constant(1, spec.stage_cost(k, z.head(4), z.tail(1)).value); };
        Vector z(5);
        z << s, u;
        EXPECT_LT(oracle::rel_error(c.gradient, oracle::fd_jacobian(f, z).transpose()), 1e-6);
        EXPECT_TRUE(c.hessian.isApprox(c.hessian.transpose()));
        EXPECT_GT(Eigen::SelfAdjointEigenSolver<Matrix>(c.hessian).eigenvalues().minCoeff(), 0.0);
    }
    EXPECT_EQ(spec.stage_cost(1, Vector::Zero(4), Vector::Zero(1)).value, 0.0);
}

TEST(PendulumOcp, InvalidGrids)
{
    PendulumOcpConfig cfg;
    cfg.first_interval = 5.0;
    EXPECT_THROW(cfg.grid(), ConfigurationError);
    cfg = PendulumOcpConfig{};
    cfg.intervals = 0;
    EXPECT_THROW(build_pendulum_ocp(cfg), ConfigurationError);
    cfg = PendulumOcpConfig{};
    cfg.state_weights = {1.0};
    EXPECT_THROW(build_pendulum_ocp(cfg), ConfigurationError);
}
