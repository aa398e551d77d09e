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

#include <array>

#include "bellforge/hilbert.hpp"
#include "bellforge/sdp.hpp"

namespace bellforge {

struct UnsupportedScenario : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct EnumerationBudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SolverFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Fixed outcome per (party, setting).
struct DeterministicStrategy {
    std::vector<std::vector<int>> outcomes;  // [party][setting-1]
};

struct LocalBoundResult {
    double value;
    DeterministicStrategy argmax;  // lexicographically first maximizer
};

/// Exact maximum over deterministic strategies (budget d^(n*m) <= 1e7).
LocalBoundResult localBound(const BellExpression& expr);
/// Brute-force re-enumeration in reversed strategy order (oracle self-check).
double localBoundReversed(const BellExpression& expr);

enum class NpaLevel { One, OnePlusAB, Two };
NpaLevel npaLevelFromString(const std::string& s);  // "1" | "1ab" | "2"
std::string to_string(NpaLevel level);

struct NpaOptions {
    double gapTol = 1e-8;
    int maxIterations = 200;
};

/// NPA moment-matrix upper bound (bipartite, binary outcomes only).
double npaUpperBound(const BellExpression& expr, NpaLevel level, const NpaOptions& opt = {});

/// TLM quantum-membership residual for a 2x2 correlation point with zero
/// marginals. Correlator order: <A1B1>, <A1B2>, <A2B1>, <A2B2>.
double tlmResidual(const std::array<double, 4>& corr);
double tlmResidual(const Behavior& P, double marginalTol = 1e-10);

struct ProbeResult {
    double residual;
    bool member;
    std::array<double, 4> correlators;
};

/// Evaluates the TLM residual at the perturbed boundary point
/// P_{x,y}(1+dAlpha, 1-beta2*dAlpha^2).
ProbeResult nonExposedProbe(double x, double y, double dAlpha, double beta2);

/// Boundary test: min over the 8 marginal+correlator coordinates of
/// (max - min) of that coordinate over the NPA relaxation with the other 7
/// fixed to P's values.
double decomposability(const Behavior& P, NpaLevel level, const NpaOptions& opt = {});

/// The 8-dim (marginal, correlator) coordinate vector of a 2x2x2 behavior:
/// (<A1>, <A2>, <B1>, <B2>, <A1B1>, <A1B2>, <A2B1>, <A2B2>).
std::array<double, 8> behaviorVector(const Behavior& P);

}  // namespace bellforge
