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

#include "bellforge/algebra.hpp"

namespace bellforge {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Pure state on a tensor product of party Hilbert spaces.
struct KetState {
    Vector amps;
    std::vector<int> dims;  // per-party local dimension

    int totalDim() const;
    double norm() const { return amps.norm(); }

    static KetState product(const std::vector<Vector>& locals);
    /// cos(theta)|00..0> + sin(theta)|11..1> on n qubits
    static KetState ghz(int parties, double theta);
    /// (|00>+|11>+|22>)/sqrt(3)
    static KetState maxEntangledQutrits();
};

/// Measurement bases of one party, all settings.
struct PartyMeasurements {
    enum class Kind { QubitXZ, QutritFourierPhase, Explicit };
    Kind kind = Kind::QubitXZ;
    /// QubitXZ: observable angle per setting, M = cos(a)Z + sin(a)X.
    /// QutritFourierPhase: phase parameter per setting.
    std::vector<double> angles;
    /// Explicit: projectors[setting][outcome].
    std::vector<std::vector<Matrix>> explicitProjectors;

    static PartyMeasurements qubitXZ(std::vector<double> angles);
    static PartyMeasurements qutritFourierPhase(std::vector<double> phases);
    static PartyMeasurements explicitOps(std::vector<std::vector<Matrix>> projectors);

    int settings() const;
    int outcomes() const;
    int dim() const;
    Matrix projector(int setting, int outcome) const;  // 1-based setting
    /// Fourier observable sum_a w^a Proj_a (Hermitian for d=2, unitary for d=3)
    Matrix observable(int setting) const;
    /// Validity: Hermitian/idempotent/complete within tolerances.
    void validate() const;
};

using Measurements = std::vector<PartyMeasurements>;

/// Coefficient tensor over (x-tuple, a-tuple); setting index 0 encodes an
/// identity factor (marginal terms) with outcome fixed to 0.
class BellExpression {
public:
    struct Key {
        std::vector<int> settings;  // per party, 0..m (0 = identity)
        std::vector<int> outcomes;  // per party, 0..d-1 (0 at identity slots)
        auto operator<=>(const Key&) const = default;
    };

    explicit BellExpression(Scenario scen) : scen_(scen) {}

    const Scenario& scenario() const { return scen_; }
    const std::map<Key, double>& coefficients() const { return coeffs_; }
    void add(const Key& key, double coeff);
    double at(const Key& key) const;

    /// Correlator-basis coefficients (d=2 only): key by per-party setting
    /// tuple with 0 = identity; value multiplies the product of +-1 observables.
    std::map<std::vector<int>, double> correlatorView() const;
    static BellExpression fromCorrelators(Scenario scen,
                                          const std::map<std::vector<int>, double>& corr);

    std::string toJson() const;
    static BellExpression fromJson(const std::string& json);
    std::string toCsv() const;

private:
    Scenario scen_;
    std::map<Key, double> coeffs_;
};

/// Conditional probability tensor P(a-tuple | x-tuple).
class Behavior {
public:
    explicit Behavior(Scenario scen);

    const Scenario& scenario() const { return scen_; }
    double& at(const std::vector<int>& settings, const std::vector<int>& outcomes);
    double at(const std::vector<int>& settings, const std::vector<int>& outcomes) const;

    /// Marginal probability for the parties with setting != 0 in the key
    /// (summing the rest over outcomes at their first setting).
    double marginal(const BellExpression::Key& key) const;

    /// normalization + nonnegativity + no-signaling within tol
    void validate(double tol = 1e-10) const;

    std::string toJson() const;
    static Behavior fromJson(const std::string& json);
    std::string toCsv() const;

private:
    Scenario scen_;
    std::vector<double> p_;
    size_t index(const std::vector<int>& settings, const std::vector<int>& outcomes) const;
};

struct Realization {
    KetState state;
    Measurements measurements;

    Scenario scenario(int wordCap = 4) const;
};

/// The Bell operator of expr under the given measurements (Eq. of the
/// operator form; identity factors at setting 0).
Matrix bellOperator(const BellExpression& expr, const Measurements& meas);

Behavior behavior(const Realization& real);

double bellValue(const BellExpression& expr, const Behavior& P);

struct EigenMaxResult {
    double value;
    KetState vector;
    double gap;  // to the second-largest eigenvalue
    bool degenerate;
};
EigenMaxResult eigenMax(const Matrix& op, const std::vector<int>& dims);

/// Matrix representation of a formal polynomial: each projector symbol is
/// substituted by the corresponding measurement projector.
Matrix polynomialMatrix(const FormalPolynomial& p, const Measurements& meas,
                        const Assignment& asg = {});

/// Degree-<=1 polynomial (projector basis) -> Bell expression. Coefficients
/// are evaluated at asg and must be real within tol.
BellExpression bellExpressionFromPolynomial(const FormalPolynomial& p, const Assignment& asg = {},
                                            double tol = 1e-9);

/// Bell expression -> degree-<=1 formal polynomial with constant coefficients.
FormalPolynomial polynomialFromBellExpression(const BellExpression& expr);

}  // namespace bellforge
