// Copyright 2026 The bellforge authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "bellforge/hilbert.hpp"

namespace bellforge {

struct NonEigenvector : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NonStationary : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnsupportedPerturbation : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// One measurement-perturbation parameter of a single party: the listed
/// settings shift by weight * delta each. For qubitXZ a setting shift moves
/// along the tangent -sin(a)Z + cos(a)X; for qutritFourierPhase it shifts
/// the phase.
struct PerturbationDirection {
    int party;  // 1-based
    std::vector<std::pair<int, double>> components;  // (setting, weight)

    PerturbationDirection(int p, int setting) : party(p), components{{setting, 1.0}} {}
    PerturbationDirection(int p, std::vector<std::pair<int, double>> comps)
        : party(p), components(std::move(comps)) {}

    /// Relative variation s1 - s2 (lift +delta on s1, -delta on s2).
    static PerturbationDirection relative(int party, int s1, int s2) {
        return {party, {{s1, 1.0}, {s2, -1.0}}};
    }
};

/// All settings except the first per party (quotients out local unitaries).
std::vector<PerturbationDirection> defaultDirections(const Measurements& meas);

/// Measurements with each direction's parameter shifted by deltas(i).
Measurements perturbedMeasurements(const Measurements& meas,
                                   const std::vector<PerturbationDirection>& dirs,
                                   const Eigen::VectorXd& deltas);

/// <psi| dS/d delta_i |psi> per direction. Throws NonEigenvector unless the
/// state is an eigenvector of the Bell operator (to 1e-8).
Eigen::VectorXd firstOrderResiduals(const BellExpression& expr, const Realization& real,
                                    const std::vector<PerturbationDirection>& dirs);

enum class HessianVerdict { LocalMax, Saddle, Degenerate };
std::string to_string(HessianVerdict v);

struct HessianReport {
    Eigen::MatrixXd gamma;  // mu + nu; empty when verdict == Degenerate
    Eigen::MatrixXd mu;
    Eigen::MatrixXd nu;
    Eigen::VectorXd eigenvalues;
    HessianVerdict verdict = HessianVerdict::Degenerate;
    double gap = 0.0;  // spectral gap of the normalized Bell operator

    std::string toJson() const;
};

/// Exact Hessian of the top eigenvalue of the Bell operator under the given
/// measurement perturbations (gamma = mu + nu with eigenvalue-perturbation
/// denominators lambda_max - lambda_l). Requires a stationary point
/// (residual norm <= 1e-6); verdict Degenerate (no gamma) when the spectral
/// gap is below 1e-8.
HessianReport hessian(const BellExpression& expr, const Realization& real,
                      const std::vector<PerturbationDirection>& dirs);

struct LocalMaxReport {
    bool stationary;
    double residualNorm;
    double gap;
    HessianVerdict verdict;
    HessianReport hess;  // populated only when stationary

    bool isLocalMax() const { return stationary && verdict == HessianVerdict::LocalMax; }
};

LocalMaxReport checkLocalMax(const BellExpression& expr, const Realization& real,
                             const std::vector<PerturbationDirection>& dirs);

}  // namespace bellforge
