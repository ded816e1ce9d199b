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

#ifndef ASRTI_ERRORS_HPP
#define ASRTI_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace asrti
{

    /// Inconsistent dimensions or invalid problem/controller setup.
    class ConfigurationError : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    /// Numerical failure inside a solver (QP, Newton, Riccati).
    class SolverError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    class IntegrationError : public SolverError
    {
    public:
        using SolverError::SolverError;
    };

    /// The QP has no feasible point. Carries the inequality rows that were
    /// still violated when infeasibility was detected.
    class QpInfeasibleError : public SolverError
    {
    public:
        QpInfeasibleError(const std::string &what, std::vector<int> violated)
            : SolverError(what), violated_(std::move(violated)) {}

        const std::vector<int> &violated() const noexcept { return violated_; }

    private:
        std::vector<int> violated_;
    };

} // namespace asrti

#endif // ASRTI_ERRORS_HPP
