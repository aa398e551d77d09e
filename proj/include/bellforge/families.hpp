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

#include <optional>

#include "bellforge/sos.hpp"

namespace bellforge {

enum class FamilyKind {
    ChshC,
    SingletAllSettings,
    PartialTheta,
    PartialTwoParam,
    Ghz,
    Qutrit,
    TiltedChsh,
    Wagner,
    Limitation,
};

std::string to_string(FamilyKind kind);
FamilyKind familyKindFromString(const std::string& name);
std::vector<FamilyKind> allFamilyKinds();

/// Parameters outside the kind's validity region; `constraint` names the
/// violated condition.
struct OutOfRegion : std::domain_error {
    std::string constraint;
    OutOfRegion(std::string constraint_, const std::string& msg)
        : std::domain_error(msg + " [constraint: " + constraint_ + "]"),
          constraint(std::move(constraint_)) {}
};

struct FamilyInstance {
    FamilyKind kind;
    Assignment params;     // as passed to build()
    Assignment canonical;  // canonicalized angles plus derived internals (lambda^2, p, ...)
    BellExpression expr{Scenario{}};
    Realization ideal;
    std::optional<SOSCertificate> certificate;  // absent for variational-only kinds
    double C = 0.0;
    bool singleSquare = false;
    std::vector<std::string> notes;
    /// Limitation kind only: the generating operator S_{theta,p,q} expressed
    /// over Z/X measurements on both parties.
    std::optional<BellExpression> generator;

    std::string toJson() const;
    /// Human-readable correlator-basis coefficient listing.
    std::string coefficientTable() const;
};

FamilyInstance build(FamilyKind kind, const Assignment& params);

/// Tangent hyperplane to the quantum set at the singletAllSettings point:
/// coefficients for (A1B1, A2B1, A2B2, A1B2) and the local/quantum offset.
struct Hyperplane {
    std::vector<double> coefficients;
    double offset;
    BellExpression expr{Scenario{}};
};

Hyperplane tangentHyperplane(double a2, double b1, double b2);

/// Two distinct Bell expressions maximized by the same behavior (an angulous
/// point of the quantum set).
struct AngulousPair {
    FamilyInstance first;   // tilted CHSH (or the wagner expression)
    FamilyInstance second;  // S_{theta,b} at the matching Bob angle
    Behavior shared;
    /// Normalized (coefficients, offset) distance between the two
    /// hyperplanes; below ~1e-9 the two tangents coincide.
    double coefficientDistance = 0.0;
    bool coincident = false;
};

AngulousPair angulousPair(double theta);
AngulousPair wagnerPair(double theta);

}  // namespace bellforge
