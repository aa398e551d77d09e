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

#include "bellforge/families.hpp"

namespace bellforge {

/// Relation residuals outside tolerance, or a degenerate swap extraction.
struct SelfTestError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Residual norms of the self-testing relations: the SOS nullifiers
/// ("nullifier_*" keys) plus the anticommutation and regularity relations
/// derived from them.
struct RelationReport {
    FamilyKind kind;
    std::map<std::string, double> residuals;
    double tolerance = 1e-8;
    bool pass = false;
    std::vector<std::string> notes;

    double maxResidual() const;
    /// Max over the "nullifier_*" residuals only; bounded by sqrt(eps/w_min)
    /// when the Bell value is eps-close to the certified maximum.
    double maxNullifierResidual() const;
    std::string toJson() const;
};

/// Outcome of the swap-gate extraction.
struct SwapResult {
    /// Joint register (x) junk state, dims = n qubits followed by the
    /// physical space folded into one slot.
    KetState extracted;
    double fidelity = 0.0;  // with target (x) best junk
    double junkNorm = 0.0;
    std::vector<std::string> notes;

    std::string toJson() const;
};

/// Builds the regularized control operators for `family` from the
/// realization's measurements and reports each relation's residual on the
/// state. Supported kinds: partialTheta, ghz, partialTwoParam,
/// singletAllSettings.
RelationReport relationResiduals(const Realization& real, const FamilyInstance& family,
                                 double tol = 1e-8);

/// The register state the swap gate extracts from an ideal realization:
/// (|0...0> + t_theta |1...1>)/norm with t_theta = (1-cos 2theta)/sin 2theta.
KetState extractionTarget(const FamilyInstance& family);

/// Applies the ancilla swap isometry and returns the fidelity of the
/// extracted register with `target`. Requires the relation residuals to pass
/// at 1e-6 (the exact-saturation regime).
SwapResult swapFidelity(const Realization& real, const FamilyInstance& family,
                        const KetState& target);

}  // namespace bellforge
