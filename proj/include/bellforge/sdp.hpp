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

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace bellforge {

/// Block-diagonal real symmetric matrix, stored as dense blocks.
using BlockMatrix = std::vector<Eigen::MatrixXd>;

enum class SdpStatus { Optimal, MaxIterations, NumericalFailure };

std::string to_string(SdpStatus s);

/// Standard-form semidefinite program
///   (P) min tr(C X)   s.t. tr(A_i X) = b_i,  X >= 0
///   (D) max b^T y     s.t. C - sum_i y_i A_i >= 0.
struct SdpProblem {
    BlockMatrix C;
    std::vector<BlockMatrix> A;
    Eigen::VectorXd b;

    double gapTol = 1e-8;
    int maxIterations = 200;
};

struct SdpResult {
    SdpStatus status = SdpStatus::NumericalFailure;
    double primalValue = 0.0;  // tr(C X)
    double dualValue = 0.0;    // b^T y
    BlockMatrix X;
    Eigen::VectorXd y;
    BlockMatrix Z;
    int iterations = 0;
};

/// Deterministic primal-dual interior-point solve (HKM direction with
/// Mehrotra predictor-corrector).
SdpResult sdpSolve(const SdpProblem& prob);

/// Convenience wrapper for the LMI form
///   max c^T y  s.t.  F0 + sum_k y_k F_k >= 0.
/// Maps to the dual of the standard form with C = F0, A_k = -F_k, b = c.
struct LmiProblem {
    BlockMatrix F0;
    std::vector<BlockMatrix> F;
    Eigen::VectorXd c;
    double gapTol = 1e-8;
    int maxIterations = 200;
};

struct LmiResult {
    SdpStatus status;
    double value;  // c^T y at the solution
    Eigen::VectorXd y;
    BlockMatrix slack;  // F0 + sum y_k F_k
    int iterations;
};

LmiResult lmiSolve(const LmiProblem& prob);

}  // namespace bellforge
