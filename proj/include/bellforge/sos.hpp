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

#include <limits>

#include "bellforge/hilbert.hpp"

namespace bellforge {

/// Linear combination of products of named abstract local operators
/// (e.g. Z_A, X_B) with symbolic coefficients.
class AbstractExpr {
public:
    AbstractExpr() = default;

    static AbstractExpr one();
    static AbstractExpr op(const std::string& name);

    const std::map<std::vector<std::string>, ScalarExpr>& terms() const { return terms_; }

    friend AbstractExpr operator+(const AbstractExpr&, const AbstractExpr&);
    friend AbstractExpr operator-(const AbstractExpr&, const AbstractExpr&);
    friend AbstractExpr operator*(const AbstractExpr&, const AbstractExpr&);
    friend AbstractExpr operator*(const ScalarExpr&, const AbstractExpr&);
    friend AbstractExpr operator-(const AbstractExpr&);

private:
    std::map<std::vector<std::string>, ScalarExpr> terms_;
    void add(const std::vector<std::string>& word, const ScalarExpr& coeff);
};

AbstractExpr operator+(const AbstractExpr&, const AbstractExpr&);
AbstractExpr operator-(const AbstractExpr&, const AbstractExpr&);
AbstractExpr operator*(const AbstractExpr&, const AbstractExpr&);
AbstractExpr operator*(const ScalarExpr&, const AbstractExpr&);
AbstractExpr operator-(const AbstractExpr&);

/// Re-expressions of abstract local operators in the measurement
/// indeterminates, with symbolic angle coefficients.
struct MeasurementDictionary {
    Scenario scen;
    std::map<std::string, FormalPolynomial> entries;

    void define(const std::string& name, const FormalPolynomial& poly);
};

struct MissingSymbol : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Substitutes every abstract symbol by its dictionary polynomial.
FormalPolynomial promoteNullifier(const AbstractExpr& expr, const MeasurementDictionary& dict);

struct SOSCertificate {
    Scenario scen;
    ScalarExpr C;
    // sign convention: sum w_i N_i^dag N_i = C - S + Gamma
    FormalPolynomial S{Scenario{}};
    FormalPolynomial gamma{Scenario{}};
    std::vector<std::pair<ScalarExpr, FormalPolynomial>> squares;  // (weight, N_i)
    Assignment bindings;
    bool singleSquare = false;

    std::string toJson() const;
    static SOSCertificate fromJson(const std::string& json);
};

/// Expands sum_i w_i N_i^dag N_i and splits it into (C, -S, Gamma).
SOSCertificate sosExpand(const std::vector<std::pair<ScalarExpr, FormalPolynomial>>& squares);

/// Real/imaginary parts of every Gamma coefficient (correlator basis) at the
/// assignment, in deterministic order.
std::vector<double> gammaResiduals(const SOSCertificate& cert, const Assignment& asg);

struct SolveGammaResult {
    bool converged = false;
    Assignment assignment;
    double residualNorm = std::numeric_limits<double>::infinity();
    double conditionNumber = std::numeric_limits<double>::quiet_NaN();
    int restartIndex = -1;
    int iterations = 0;
};

struct SolveGammaOptions {
    int maxIterations = 200;
    int restarts = 20;
    double tolerance = 1e-10;
    double fdStep = 1e-7;
};

/// Damped Gauss-Newton root find on gammaResiduals over the free parameters.
SolveGammaResult solveGamma(const SOSCertificate& cert, const std::vector<std::string>& freeParams,
                            const Assignment& fixed, const Assignment& init,
                            const SolveGammaOptions& opt = {});

struct CertificateCheck {
    bool pass;
    std::string name;
    double residual;
};

struct VerifyReport {
    bool pass;
    std::vector<CertificateCheck> checks;
};

/// Numeric verification of a solved certificate against a realization:
/// nullifier norms, ideal value = C, operator identity, weight positivity.
VerifyReport verifyCertificate(const SOSCertificate& cert, const Realization& real,
                               double tol = 1e-9);

}  // namespace bellforge
