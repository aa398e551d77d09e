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

#include <compare>
#include <map>
#include <string>
#include <vector>

#include "bellforge/scalar.hpp"

namespace bellforge {

struct ScenarioMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct WordLengthExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bell scenario: n parties, m settings per party, d outcomes per setting.
struct Scenario {
    int parties = 2;
    int settings = 2;
    int outcomes = 2;
    /// Per-party word length cap for formal monomials.
    int wordCap = 4;

    friend bool operator==(const Scenario& a, const Scenario& b) {
        return a.parties == b.parties && a.settings == b.settings && a.outcomes == b.outcomes;
    }
    void check(int party, int setting, int outcome) const;
};

/// Projector indeterminate X_{a|x}^{(k)}. In normal form the top outcome
/// d-1 never appears (it is eliminated through the normalization rule).
struct ProjectorSymbol {
    int party;    // 1..n
    int setting;  // 1..m
    int outcome;  // 0..d-2 inside normal-form monomials

    auto operator<=>(const ProjectorSymbol&) const = default;
};

/// Product of projector indeterminates in normal form: one word per party
/// (inter-party order fixed by commutation), no two adjacent symbols within
/// a word sharing a setting.
struct Monomial {
    std::vector<std::vector<ProjectorSymbol>> words;  // indexed by party-1

    bool isIdentity() const;
    int partyDegree(int party) const { return static_cast<int>(words[party - 1].size()); }
    int localDegree() const;

    auto operator<=>(const Monomial&) const = default;
};

/// Fourier (correlator) indeterminate (Y_x^{(k)})^e with power e in 1..d-1.
struct CorrelatorSymbol {
    int party;
    int setting;
    int power;

    auto operator<=>(const CorrelatorSymbol&) const = default;
};

struct CorrelatorMonomial {
    std::vector<std::vector<CorrelatorSymbol>> words;

    bool isIdentity() const;
    int localDegree() const;

    auto operator<=>(const CorrelatorMonomial&) const = default;
};

/// Linear combination of normal-form monomials with symbolic scalars.
class FormalPolynomial {
public:
    explicit FormalPolynomial(Scenario scen);

    static FormalPolynomial zero(Scenario scen) { return FormalPolynomial(scen); }
    static FormalPolynomial one(Scenario scen);
    /// X_{a|x}^{(k)}; outcome d-1 expands to 1 - sum of the others.
    static FormalPolynomial projector(Scenario scen, int party, int setting, int outcome);
    /// (Y_x^{(k)})^e as a projector-basis polynomial; power reduced mod d.
    static FormalPolynomial correlator(Scenario scen, int party, int setting, int power);

    const Scenario& scenario() const { return scen_; }
    const std::map<Monomial, ScalarExpr>& terms() const { return terms_; }
    bool isZero() const { return terms_.empty(); }

    /// Adds coeff * mono, pruning constant-zero results. The monomial must
    /// already be in normal form.
    void addTerm(const Monomial& mono, const ScalarExpr& coeff);

    FormalPolynomial adjoint() const;

    friend FormalPolynomial operator+(const FormalPolynomial&, const FormalPolynomial&);
    friend FormalPolynomial operator-(const FormalPolynomial&, const FormalPolynomial&);
    friend FormalPolynomial operator*(const FormalPolynomial&, const FormalPolynomial&);
    friend FormalPolynomial operator*(const ScalarExpr&, const FormalPolynomial&);
    friend FormalPolynomial operator-(const FormalPolynomial&);

    /// Re-evaluates every coefficient at the assignment and prunes terms
    /// within tol of zero; remaining coefficients become constants.
    FormalPolynomial evaluated(const Assignment& a, double tol = ScalarExpr::kZeroTol) const;

private:
    Scenario scen_;
    std::map<Monomial, ScalarExpr> terms_;
};

FormalPolynomial operator+(const FormalPolynomial&, const FormalPolynomial&);
FormalPolynomial operator-(const FormalPolynomial&, const FormalPolynomial&);
FormalPolynomial operator*(const FormalPolynomial&, const FormalPolynomial&);
FormalPolynomial operator*(const ScalarExpr&, const FormalPolynomial&);
FormalPolynomial operator-(const FormalPolynomial&);

struct DegreeSplit {
    ScalarExpr constant;
    FormalPolynomial bellPart;  // local degree exactly 1
    FormalPolynomial gamma;     // local degree >= 2 leftover
};

/// Splits p = constant + bellPart + gamma by local degree, measured in the
/// correlator basis (where the identity component is unambiguous).
DegreeSplit localDegreeSplit(const FormalPolynomial& p);

/// Polynomial over Fourier indeterminates; used as an alternate view of a
/// FormalPolynomial, not as a second algebra.
class CorrelatorPolynomial {
public:
    explicit CorrelatorPolynomial(Scenario scen) : scen_(scen) {}

    const Scenario& scenario() const { return scen_; }
    const std::map<CorrelatorMonomial, ScalarExpr>& terms() const { return terms_; }
    void addTerm(const CorrelatorMonomial& mono, const ScalarExpr& coeff);

private:
    Scenario scen_;
    std::map<CorrelatorMonomial, ScalarExpr> terms_;
};

CorrelatorPolynomial toCorrelatorBasis(const FormalPolynomial& p);
FormalPolynomial fromCorrelatorBasis(const CorrelatorPolynomial& p);

/// Canonical text form: terms "coeff * X[k,x,a] X[k,x,a] ..." joined by " + ".
std::string toText(const FormalPolynomial& p);
FormalPolynomial polynomialFromText(Scenario scen, const std::string& text);

/// Structured JSON form (scenario header + term list); round-trips with
/// polynomialFromJson.
std::string polynomialToJson(const FormalPolynomial& p);
FormalPolynomial polynomialFromJson(const std::string& json);

}  // namespace bellforge
