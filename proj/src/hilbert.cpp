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

#include "bellforge/hilbert.hpp"

#include <cmath>
#include <numbers>

#include "json.hpp"

namespace bellforge {

namespace {

constexpr double kPi = std::numbers::pi;

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// iterate tuples in mixed radix, least-significant first; returns false at end
bool nextTuple(std::vector<int>& t, int radix, int lo) {
    for (size_t i = 0; i < t.size(); ++i) {
        if (++t[i] < lo + radix) return true;
        t[i] = lo;
    }
    return false;
}

}  // namespace

int KetState::totalDim() const {
    int d = 1;
    for (int dk : dims) d *= dk;
    return d;
}

KetState KetState::product(const std::vector<Vector>& locals) {
    KetState out;
    out.amps = Vector::Ones(1);
    for (const auto& v : locals) {
        Vector next(out.amps.size() * v.size());
        for (Eigen::Index i = 0; i < out.amps.size(); ++i)
            for (Eigen::Index j = 0; j < v.size(); ++j)
                next(i * v.size() + j) = out.amps(i) * v(j);
        out.amps = next;
        out.dims.push_back(static_cast<int>(v.size()));
    }
    return out;
}

KetState KetState::ghz(int parties, double theta) {
    KetState out;
    out.dims.assign(parties, 2);
    out.amps = Vector::Zero(1 << parties);
    out.amps(0) = std::cos(theta);
    out.amps((1 << parties) - 1) = std::sin(theta);
    return out;
}

KetState KetState::maxEntangledQutrits() {
    KetState out;
    out.dims = {3, 3};
    out.amps = Vector::Zero(9);
    out.amps(0) = out.amps(4) = out.amps(8) = 1.0 / std::sqrt(3.0);
    return out;
}

PartyMeasurements PartyMeasurements::qubitXZ(std::vector<double> angles) {
    PartyMeasurements m;
    m.kind = Kind::QubitXZ;
    m.angles = std::move(angles);
    return m;
}

PartyMeasurements PartyMeasurements::qutritFourierPhase(std::vector<double> phases) {
    PartyMeasurements m;
    m.kind = Kind::QutritFourierPhase;
    m.angles = std::move(phases);
    return m;
}

PartyMeasurements PartyMeasurements::explicitOps(std::vector<std::vector<Matrix>> projectors) {
    PartyMeasurements m;
    m.kind = Kind::Explicit;
    m.explicitProjectors = std::move(projectors);
    return m;
}

int PartyMeasurements::settings() const {
    return kind == Kind::Explicit ? static_cast<int>(explicitProjectors.size())
                                  : static_cast<int>(angles.size());
}

int PartyMeasurements::outcomes() const {
    switch (kind) {
        case Kind::QubitXZ:
            return 2;
        case Kind::QutritFourierPhase:
            return 3;
        case Kind::Explicit:
            return static_cast<int>(explicitProjectors.at(0).size());
    }
    return 0;
}

int PartyMeasurements::dim() const {
    switch (kind) {
        case Kind::QubitXZ:
            return 2;
        case Kind::QutritFourierPhase:
            return 3;
        case Kind::Explicit:
            return static_cast<int>(explicitProjectors.at(0).at(0).rows());
    }
    return 0;
}

Matrix PartyMeasurements::projector(int setting, int outcome) const {
    if (setting < 1 || setting > settings() || outcome < 0 || outcome >= outcomes())
        throw DimensionMismatch("projector index out of range");
    switch (kind) {
        case Kind::QubitXZ: {
            double a = angles[setting - 1];
            Matrix m(2, 2);
            m << std::cos(a), std::sin(a), std::sin(a), -std::cos(a);
            return (Matrix::Identity(2, 2) + (outcome == 0 ? 1.0 : -1.0) * m) / 2.0;
        }
        case Kind::QutritFourierPhase: {
            Complex w = std::polar(1.0, 2.0 * kPi / 3.0);
            Matrix F(3, 3);
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l) F(k, l) = std::pow(w, k * l) / std::sqrt(3.0);
            double phi = angles[setting - 1];
            Matrix U = Matrix::Zero(3, 3);
            for (int k = 0; k < 3; ++k) U(k, k) = std::polar(1.0, 2.0 * kPi * k * phi / 3.0);
            Vector e = Vector::Zero(3);
            e(outcome) = 1.0;
            Vector col = U * (F.adjoint() * e);
            return col * col.adjoint();
        }
        case Kind::Explicit:
            return explicitProjectors[setting - 1][outcome];
    }
    throw DimensionMismatch("unknown measurement kind");
}

Matrix PartyMeasurements::observable(int setting) const {
    int d = outcomes();
    Matrix m = Matrix::Zero(dim(), dim());
    for (int a = 0; a < d; ++a) {
        Complex w = (a == 0) ? Complex(1.0)
                             : (2 * a == d ? Complex(-1.0)
                                           : std::polar(1.0, 2.0 * kPi * a / d));
        m += w * projector(setting, a);
    }
    return m;
}

void PartyMeasurements::validate() const {
    int d = dim();
    for (int x = 1; x <= settings(); ++x) {
        Matrix sum = Matrix::Zero(d, d);
        for (int a = 0; a < outcomes(); ++a) {
            Matrix p = projector(x, a);
            if ((p - p.adjoint()).norm() > 1e-10)
                throw DimensionMismatch("projector not Hermitian");
            if ((p * p - p).norm() > 1e-10) throw DimensionMismatch("projector not idempotent");
            sum += p;
        }
        if ((sum - Matrix::Identity(d, d)).norm() > 1e-10)
            throw DimensionMismatch("projectors do not sum to identity");
    }
}

void BellExpression::add(const Key& key, double coeff) {
    if (static_cast<int>(key.settings.size()) != scen_.parties ||
        static_cast<int>(key.outcomes.size()) != scen_.parties)
        throw ScenarioMismatch("key arity mismatch");
    for (int k = 0; k < scen_.parties; ++k) {
        int x = key.settings[k], a = key.outcomes[k];
        if (x < 0 || x > scen_.settings) throw ScenarioMismatch("setting out of range");
        if (x == 0 && a != 0) throw ScenarioMismatch("identity slot requires outcome 0");
        if (a < 0 || a >= scen_.outcomes) throw ScenarioMismatch("outcome out of range");
    }
    if (!std::isfinite(coeff)) throw std::invalid_argument("non-finite coefficient");
    double& slot = coeffs_[key];
    slot += coeff;
    if (slot == 0.0) coeffs_.erase(key);
}

double BellExpression::at(const Key& key) const {
    auto it = coeffs_.find(key);
    return it == coeffs_.end() ? 0.0 : it->second;
}

Behavior::Behavior(Scenario scen) : scen_(scen) {
    size_t size = 1;
    for (int k = 0; k < scen.parties; ++k) size *= scen.settings * scen.outcomes;
    p_.assign(size, 0.0);
}

size_t Behavior::index(const std::vector<int>& settings, const std::vector<int>& outcomes) const {
    if (static_cast<int>(settings.size()) != scen_.parties ||
        static_cast<int>(outcomes.size()) != scen_.parties)
        throw ScenarioMismatch("tuple arity mismatch");
    size_t idx = 0;
    for (int k = 0; k < scen_.parties; ++k) {
        int x = settings[k], a = outcomes[k];
        if (x < 1 || x > scen_.settings || a < 0 || a >= scen_.outcomes)
            throw ScenarioMismatch("behavior index out of range");
        idx = idx * (scen_.settings * scen_.outcomes) + (x - 1) * scen_.outcomes + a;
    }
    return idx;
}

double& Behavior::at(const std::vector<int>& settings, const std::vector<int>& outcomes) {
    return p_[index(settings, outcomes)];
}

double Behavior::at(const std::vector<int>& settings, const std::vector<int>& outcomes) const {
    return p_[index(settings, outcomes)];
}

double Behavior::marginal(const BellExpression::Key& key) const {
    // sum over the outcomes of identity-slot parties, at their first setting
    std::vector<int> settings(scen_.parties), outcomes(scen_.parties, 0);
    std::vector<int> freeParties;
    for (int k = 0; k < scen_.parties; ++k) {
        if (key.settings[k] == 0) {
            settings[k] = 1;
            freeParties.push_back(k);
        } else {
            settings[k] = key.settings[k];
            outcomes[k] = key.outcomes[k];
        }
    }
    double total = 0.0;
    std::vector<int> free(freeParties.size(), 0);
    while (true) {
        for (size_t i = 0; i < freeParties.size(); ++i) outcomes[freeParties[i]] = free[i];
        total += at(settings, outcomes);
        if (free.empty() || !nextTuple(free, scen_.outcomes, 0)) break;
    }
    return total;
}

void Behavior::validate(double tol) const {
    for (double v : p_)
        if (v < -tol || !std::isfinite(v)) throw std::invalid_argument("negative probability");
    std::vector<int> settings(scen_.parties, 1);
    do {
        double sum = 0.0;
        std::vector<int> outcomes(scen_.parties, 0);
        do {
            sum += at(settings, outcomes);
        } while (nextTuple(outcomes, scen_.outcomes, 0));
        if (std::abs(sum - 1.0) > tol) throw std::invalid_argument("behavior not normalized");
    } while (nextTuple(settings, scen_.settings, 1));

    // no-signaling: each party's marginal is independent of the others' settings
    for (int k = 0; k < scen_.parties; ++k) {
        for (int x = 1; x <= scen_.settings; ++x) {
            for (int a = 0; a < scen_.outcomes; ++a) {
                double ref = std::nan("");
                std::vector<int> others(scen_.parties, 1);
                do {
                    std::vector<int> settings2 = others;
                    settings2[k] = x;
                    double sum = 0.0;
                    std::vector<int> out(scen_.parties, 0);
                    do {
                        if (out[k] != a) continue;
                        sum += at(settings2, out);
                    } while (nextTuple(out, scen_.outcomes, 0));
                    if (std::isnan(ref))
                        ref = sum;
                    else if (std::abs(sum - ref) > tol)
                        throw std::invalid_argument("no-signaling violated");
                } while (nextTuple(others, scen_.settings, 1));
            }
        }
    }
}

Scenario Realization::scenario(int wordCap) const {
    Scenario s;
    s.parties = static_cast<int>(measurements.size());
    s.settings = measurements.at(0).settings();
    s.outcomes = measurements.at(0).outcomes();
    s.wordCap = wordCap;
    for (const auto& m : measurements)
        if (m.settings() != s.settings || m.outcomes() != s.outcomes)
            throw DimensionMismatch("non-uniform scenario");
    return s;
}

Matrix bellOperator(const BellExpression& expr, const Measurements& meas) {
    const Scenario& scen = expr.scenario();
    if (static_cast<int>(meas.size()) != scen.parties)
        throw DimensionMismatch("party count mismatch");
    int dim = 1;
    for (const auto& m : meas) dim *= m.dim();
    Matrix op = Matrix::Zero(dim, dim);
    for (const auto& [key, coeff] : expr.coefficients()) {
        Matrix term = Matrix::Identity(1, 1);
        for (int k = 0; k < scen.parties; ++k) {
            Matrix factor = key.settings[k] == 0
                                ? Matrix(Matrix::Identity(meas[k].dim(), meas[k].dim()))
                                : meas[k].projector(key.settings[k], key.outcomes[k]);
            term = kron(term, factor);
        }
        op += coeff * term;
    }
    return op;
}

Behavior behavior(const Realization& real) {
    Scenario scen = real.scenario();
    Behavior P(scen);
    int n = scen.parties;
    std::vector<int> settings(n, 1);
    do {
        std::vector<int> outcomes(n, 0);
        do {
            Matrix proj = Matrix::Identity(1, 1);
            for (int k = 0; k < n; ++k)
                proj = kron(proj, real.measurements[k].projector(settings[k], outcomes[k]));
            Complex v = real.state.amps.adjoint() * proj * real.state.amps;
            P.at(settings, outcomes) = v.real();
        } while (nextTuple(outcomes, scen.outcomes, 0));
    } while (nextTuple(settings, scen.settings, 1));
    return P;
}

double bellValue(const BellExpression& expr, const Behavior& P) {
    if (!(expr.scenario() == P.scenario())) throw ScenarioMismatch("scenario mismatch");
    double total = 0.0;
    for (const auto& [key, coeff] : expr.coefficients()) total += coeff * P.marginal(key);
    return total;
}

EigenMaxResult eigenMax(const Matrix& op, const std::vector<int>& dims) {
    if ((op - op.adjoint()).norm() > 1e-10 * std::max(1.0, op.norm()))
        throw std::invalid_argument("operator not Hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix> es(op);
    Eigen::Index n = op.rows();
    EigenMaxResult out;
    out.value = es.eigenvalues()(n - 1);
    out.vector = KetState{es.eigenvectors().col(n - 1), dims};
    out.gap = n > 1 ? es.eigenvalues()(n - 1) - es.eigenvalues()(n - 2) : 0.0;
    out.degenerate = out.gap < 1e-8;
    return out;
}

Matrix polynomialMatrix(const FormalPolynomial& p, const Measurements& meas,
                        const Assignment& asg) {
    int dim = 1;
    for (const auto& m : meas) dim *= m.dim();
    Matrix out = Matrix::Zero(dim, dim);
    for (const auto& [mono, coeff] : p.terms()) {
        Matrix term = Matrix::Identity(1, 1);
        for (size_t k = 0; k < meas.size(); ++k) {
            Matrix word = Matrix::Identity(meas[k].dim(), meas[k].dim());
            for (const auto& sym : mono.words[k])
                word *= meas[k].projector(sym.setting, sym.outcome);
            term = kron(term, word);
        }
        out += coeff.eval(asg) * term;
    }
    return out;
}

BellExpression bellExpressionFromPolynomial(const FormalPolynomial& p, const Assignment& asg,
                                            double tol) {
    const Scenario& scen = p.scenario();
    BellExpression expr(scen);
    for (const auto& [mono, coeff] : p.terms()) {
        if (mono.localDegree() > 1)
            throw std::invalid_argument("polynomial has local degree above 1");
        Complex v = coeff.eval(asg);
        if (std::abs(v.imag()) > tol)
            throw std::invalid_argument("non-real Bell coefficient");
        BellExpression::Key key{std::vector<int>(scen.parties, 0),
                                std::vector<int>(scen.parties, 0)};
        for (int k = 0; k < scen.parties; ++k) {
            if (!mono.words[k].empty()) {
                key.settings[k] = mono.words[k][0].setting;
                key.outcomes[k] = mono.words[k][0].outcome;
            }
        }
        expr.add(key, v.real());
    }
    return expr;
}

FormalPolynomial polynomialFromBellExpression(const BellExpression& expr) {
    const Scenario& scen = expr.scenario();
    FormalPolynomial p(scen);
    for (const auto& [key, coeff] : expr.coefficients()) {
        FormalPolynomial term = ScalarExpr(coeff) * FormalPolynomial::one(scen);
        for (int k = 0; k < scen.parties; ++k)
            if (key.settings[k] != 0)
                term = term *
                       FormalPolynomial::projector(scen, k + 1, key.settings[k], key.outcomes[k]);
        p = p + term;
    }
    return p;
}

std::map<std::vector<int>, double> BellExpression::correlatorView() const {
    if (scen_.outcomes != 2)
        throw std::invalid_argument("correlator view requires binary outcomes");
    CorrelatorPolynomial corr = toCorrelatorBasis(polynomialFromBellExpression(*this));
    std::map<std::vector<int>, double> out;
    for (const auto& [mono, coeff] : corr.terms()) {
        std::vector<int> key(scen_.parties, 0);
        for (int k = 0; k < scen_.parties; ++k) {
            if (mono.words[k].size() > 1)
                throw std::invalid_argument("expression has local degree above 1");
            if (!mono.words[k].empty()) key[k] = mono.words[k][0].setting;
        }
        Complex v = coeff.eval({});
        if (std::abs(v.imag()) > 1e-12) throw std::invalid_argument("non-real correlator");
        out[key] += v.real();
    }
    return out;
}

BellExpression BellExpression::fromCorrelators(Scenario scen,
                                               const std::map<std::vector<int>, double>& corr) {
    if (scen.outcomes != 2)
        throw std::invalid_argument("correlator form requires binary outcomes");
    FormalPolynomial p(scen);
    for (const auto& [key, coeff] : corr) {
        if (static_cast<int>(key.size()) != scen.parties)
            throw ScenarioMismatch("correlator key arity mismatch");
        FormalPolynomial term = ScalarExpr(coeff) * FormalPolynomial::one(scen);
        for (int k = 0; k < scen.parties; ++k)
            if (key[k] != 0) term = term * FormalPolynomial::correlator(scen, k + 1, key[k], 1);
        p = p + term;
    }
    return bellExpressionFromPolynomial(p);
}

std::string BellExpression::toJson() const {
    nlohmann::json j;
    j["scenario"] = {{"parties", scen_.parties},
                     {"settings", scen_.settings},
                     {"outcomes", scen_.outcomes}};
    j["coefficients"] = nlohmann::json::array();
    for (const auto& [key, coeff] : coeffs_)
        j["coefficients"].push_back(
            {{"settings", key.settings}, {"outcomes", key.outcomes}, {"value", coeff}});
    return j.dump(2);
}

BellExpression BellExpression::fromJson(const std::string& json) {
    nlohmann::json j = nlohmann::json::parse(json);
    Scenario scen{j["scenario"]["parties"].get<int>(), j["scenario"]["settings"].get<int>(),
                  j["scenario"]["outcomes"].get<int>(), 4};
    BellExpression expr(scen);
    for (const auto& c : j["coefficients"])
        expr.add(Key{c["settings"].get<std::vector<int>>(), c["outcomes"].get<std::vector<int>>()},
                 c["value"].get<double>());
    return expr;
}

std::string BellExpression::toCsv() const {
    std::string out = "settings,outcomes,value\n";
    char buf[64];
    for (const auto& [key, coeff] : coeffs_) {
        for (size_t i = 0; i < key.settings.size(); ++i)
            out += (i ? " " : "") + std::to_string(key.settings[i]);
        out += ",";
        for (size_t i = 0; i < key.outcomes.size(); ++i)
            out += (i ? " " : "") + std::to_string(key.outcomes[i]);
        std::snprintf(buf, sizeof buf, ",%.12g\n", coeff);
        out += buf;
    }
    return out;
}

std::string Behavior::toJson() const {
    nlohmann::json j;
    j["scenario"] = {{"parties", scen_.parties},
                     {"settings", scen_.settings},
                     {"outcomes", scen_.outcomes}};
    j["probabilities"] = p_;
    return j.dump(2);
}

Behavior Behavior::fromJson(const std::string& json) {
    nlohmann::json j = nlohmann::json::parse(json);
    Scenario scen{j["scenario"]["parties"].get<int>(), j["scenario"]["settings"].get<int>(),
                  j["scenario"]["outcomes"].get<int>(), 4};
    Behavior P(scen);
    auto probs = j["probabilities"].get<std::vector<double>>();
    if (probs.size() != P.p_.size()) throw std::invalid_argument("probability list size mismatch");
    P.p_ = probs;
    return P;
}

std::string Behavior::toCsv() const {
    // flat (x, a) index order: per party (x-1)*outcomes + a, party 1 most
    // significant
    std::string out = "settings,outcomes,probability\n";
    char buf[64];
    std::vector<int> settings(scen_.parties, 1);
    do {
        std::vector<int> outcomes(scen_.parties, 0);
        do {
            std::string row;
            for (size_t i = 0; i < settings.size(); ++i)
                row += (i ? " " : "") + std::to_string(settings[i]);
            row += ",";
            for (size_t i = 0; i < outcomes.size(); ++i)
                row += (i ? " " : "") + std::to_string(outcomes[i]);
            std::snprintf(buf, sizeof buf, ",%.12g\n", at(settings, outcomes));
            out += row + buf;
        } while (nextTuple(outcomes, scen_.outcomes, 0));
    } while (nextTuple(settings, scen_.settings, 1));
    return out;
}

}  // namespace bellforge
