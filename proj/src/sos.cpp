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

#include "bellforge/sos.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>

#include "json.hpp"

namespace bellforge {

void AbstractExpr::add(const std::vector<std::string>& word, const ScalarExpr& coeff) {
    auto it = terms_.find(word);
    if (it == terms_.end()) {
        if (!coeff.isZero()) terms_.emplace(word, coeff);
        return;
    }
    ScalarExpr sum = it->second + coeff;
    if (sum.isZero())
        terms_.erase(it);
    else
        it->second = sum;
}

AbstractExpr AbstractExpr::one() {
    AbstractExpr e;
    e.add({}, ScalarExpr(1.0));
    return e;
}

AbstractExpr AbstractExpr::op(const std::string& name) {
    AbstractExpr e;
    e.add({name}, ScalarExpr(1.0));
    return e;
}

AbstractExpr operator+(const AbstractExpr& a, const AbstractExpr& b) {
    AbstractExpr out = a;
    for (const auto& [word, coeff] : b.terms_) out.add(word, coeff);
    return out;
}

AbstractExpr operator-(const AbstractExpr& a, const AbstractExpr& b) {
    AbstractExpr out = a;
    for (const auto& [word, coeff] : b.terms_) out.add(word, -coeff);
    return out;
}

AbstractExpr operator*(const AbstractExpr& a, const AbstractExpr& b) {
    AbstractExpr out;
    for (const auto& [wa, ca] : a.terms_)
        for (const auto& [wb, cb] : b.terms_) {
            std::vector<std::string> word = wa;
            word.insert(word.end(), wb.begin(), wb.end());
            out.add(word, ca * cb);
        }
    return out;
}

AbstractExpr operator*(const ScalarExpr& s, const AbstractExpr& a) {
    AbstractExpr out;
    for (const auto& [word, coeff] : a.terms_) out.add(word, s * coeff);
    return out;
}

AbstractExpr operator-(const AbstractExpr& a) { return ScalarExpr(-1.0) * a; }

void MeasurementDictionary::define(const std::string& name, const FormalPolynomial& poly) {
    if (!(poly.scenario() == scen))
        throw ScenarioMismatch("dictionary entry scenario mismatch: " + name);
    entries.insert_or_assign(name, poly);
}

FormalPolynomial promoteNullifier(const AbstractExpr& expr, const MeasurementDictionary& dict) {
    FormalPolynomial out = FormalPolynomial::zero(dict.scen);
    for (const auto& [word, coeff] : expr.terms()) {
        FormalPolynomial prod = FormalPolynomial::one(dict.scen);
        for (const auto& name : word) {
            auto it = dict.entries.find(name);
            if (it == dict.entries.end()) throw MissingSymbol("undefined abstract operator: " + name);
            prod = prod * it->second;
        }
        out = out + coeff * prod;
    }
    return out;
}

SOSCertificate sosExpand(const std::vector<std::pair<ScalarExpr, FormalPolynomial>>& squares) {
    if (squares.empty()) throw std::invalid_argument("sosExpand: no squares");
    const Scenario scen = squares.front().second.scenario();
    FormalPolynomial sum = FormalPolynomial::zero(scen);
    for (const auto& [w, n] : squares) {
        if (!(n.scenario() == scen)) throw ScenarioMismatch("sosExpand: mixed scenarios");
        sum = sum + w * (n.adjoint() * n);
    }
    auto split = localDegreeSplit(sum);
    SOSCertificate cert;
    cert.scen = scen;
    cert.C = split.constant;
    cert.S = -split.bellPart;
    cert.gamma = split.gamma;
    cert.squares = squares;
    cert.singleSquare = squares.size() == 1;
    return cert;
}

std::vector<double> gammaResiduals(const SOSCertificate& cert, const Assignment& asg) {
    std::vector<double> out;
    auto corr = toCorrelatorBasis(cert.gamma);
    out.reserve(2 * corr.terms().size());
    for (const auto& [mono, coeff] : corr.terms()) {
        Complex v = coeff.eval(asg);
        out.push_back(v.real());
        out.push_back(v.imag());
    }
    return out;
}

namespace {

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

SolveGammaResult solveGamma(const SOSCertificate& cert, const std::vector<std::string>& freeParams,
                            const Assignment& fixed, const Assignment& init,
                            const SolveGammaOptions& opt) {
    const int np = static_cast<int>(freeParams.size());

    auto assignmentAt = [&](const Eigen::VectorXd& x) {
        Assignment asg = fixed;
        for (int i = 0; i < np; ++i) asg[freeParams[i]] = x(i);
        return asg;
    };
    auto residualsAt = [&](const Eigen::VectorXd& x) -> std::optional<std::vector<double>> {
        try {
            return gammaResiduals(cert, assignmentAt(x));
        } catch (const DomainError&) {
            return std::nullopt;
        }
    };

    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(np);
    for (int i = 0; i < np; ++i) {
        auto it = init.find(freeParams[i]);
        if (it != init.end()) x0(i) = it->second;
    }

    SolveGammaResult best;
    for (int restart = 0; restart < std::max(1, opt.restarts); ++restart) {
        Eigen::VectorXd x = x0;
        if (restart > 0) {
            std::mt19937 rng(7919u + static_cast<unsigned>(restart));
            std::uniform_real_distribution<double> u(-1.0, 1.0);
            const double scale = 0.1 * restart;
            for (int i = 0; i < np; ++i) x(i) += scale * u(rng) * std::max(1.0, std::abs(x0(i)));
        }

        auto r0 = residualsAt(x);
        if (!r0) continue;
        std::vector<double> r = *r0;
        const int nr = static_cast<int>(r.size());
        double rnorm = norm2(r);
        double lambda = 1e-3;
        int iter = 0;
        Eigen::MatrixXd J(nr, np);
        for (; iter < opt.maxIterations && rnorm > opt.tolerance && np > 0; ++iter) {
            // central-difference Jacobian
            bool jacOk = true;
            for (int i = 0; i < np && jacOk; ++i) {
                double h = opt.fdStep * std::max(1.0, std::abs(x(i)));
                Eigen::VectorXd xp = x, xm = x;
                xp(i) += h;
                xm(i) -= h;
                auto rp = residualsAt(xp), rm = residualsAt(xm);
                if (!rp || !rm) {
                    jacOk = false;
                    break;
                }
                for (int j = 0; j < nr; ++j) J(j, i) = ((*rp)[j] - (*rm)[j]) / (2.0 * h);
            }
            if (!jacOk) break;

            Eigen::VectorXd rv = Eigen::Map<const Eigen::VectorXd>(r.data(), nr);
            Eigen::MatrixXd H = J.transpose() * J;
            Eigen::VectorXd g = J.transpose() * rv;

            bool accepted = false;
            while (lambda < 1e12) {
                Eigen::MatrixXd Hd = H + lambda * Eigen::MatrixXd::Identity(np, np);
                Eigen::VectorXd dx = Hd.ldlt().solve(-g);
                auto rt = residualsAt(x + dx);
                if (rt && norm2(*rt) < rnorm) {
                    x += dx;
                    r = *rt;
                    rnorm = norm2(r);
                    lambda = std::max(lambda * 0.3, 1e-12);
                    accepted = true;
                    break;
                }
                lambda *= 10.0;
            }
            if (!accepted) break;
        }

        if (rnorm < best.residualNorm) {
            best.converged = rnorm <= opt.tolerance;
            best.assignment = assignmentAt(x);
            best.residualNorm = rnorm;
            best.restartIndex = restart;
            best.iterations = iter;
            if (np > 0 && nr > 0) {
                Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
                double smin = svd.singularValues()(svd.singularValues().size() - 1);
                best.conditionNumber =
                    smin > 0 ? svd.singularValues()(0) / smin : std::numeric_limits<double>::infinity();
            }
        }
        if (best.converged && np == 0) break;
    }
    return best;
}

VerifyReport verifyCertificate(const SOSCertificate& cert, const Realization& real, double tol) {
    VerifyReport rep;
    rep.pass = true;
    auto push = [&](const std::string& name, double residual, double bound) {
        bool ok = residual <= bound;
        rep.checks.push_back({ok, name, residual});
        rep.pass = rep.pass && ok;
    };
    const Assignment& asg = cert.bindings;

    // weights real and nonnegative
    double worstWeight = 0.0;
    for (const auto& [w, n] : cert.squares) {
        Complex v = w.eval(asg);
        worstWeight = std::max(worstWeight, std::max(-v.real(), std::abs(v.imag())));
    }
    push("weights_nonnegative", worstWeight, tol);

    Complex cval = cert.C.eval(asg);
    push("constant_real", std::abs(cval.imag()), tol);

    // each promoted nullifier annihilates the state
    const Vector& psi = real.state.amps;
    double worstNull = 0.0;
    for (const auto& [w, n] : cert.squares) {
        Matrix m = polynomialMatrix(n, real.measurements, asg);
        worstNull = std::max(worstNull, (m * psi).norm());
    }
    push("nullifier_norms", worstNull, tol);

    // the realization attains the SOS constant
    BellExpression expr = bellExpressionFromPolynomial(cert.S, asg, tol);
    double value = bellValue(expr, behavior(real));
    push("ideal_value", std::abs(value - cval.real()), tol);

    // operator identity sum w_i N_i^dag N_i = C - S + Gamma under substitution
    int dim = static_cast<int>(psi.size());
    Matrix lhs = Matrix::Zero(dim, dim);
    for (const auto& [w, n] : cert.squares) {
        Matrix m = polynomialMatrix(n, real.measurements, asg);
        lhs += w.eval(asg).real() * (m.adjoint() * m);
    }
    Matrix rhs = cval.real() * Matrix::Identity(dim, dim) -
                 polynomialMatrix(cert.S, real.measurements, asg) +
                 polynomialMatrix(cert.gamma, real.measurements, asg);
    push("operator_identity", (lhs - rhs).norm(), tol * dim);

    // solved certificate should have no leftover Gamma
    double gammaNorm = norm2(gammaResiduals(cert, asg));
    push("gamma_zero", gammaNorm, tol);

    return rep;
}

std::string SOSCertificate::toJson() const {
    nlohmann::json j;
    j["scenario"] = {{"parties", scen.parties},
                     {"settings", scen.settings},
                     {"outcomes", scen.outcomes},
                     {"wordCap", scen.wordCap}};
    j["C"] = C.str();
    j["S"] = nlohmann::json::parse(polynomialToJson(S));
    j["gamma"] = nlohmann::json::parse(polynomialToJson(gamma));
    j["squares"] = nlohmann::json::array();
    for (const auto& [w, n] : squares)
        j["squares"].push_back(
            {{"weight", w.str()}, {"nullifier", nlohmann::json::parse(polynomialToJson(n))}});
    j["bindings"] = bindings;
    j["singleSquare"] = singleSquare;
    return j.dump(2);
}

SOSCertificate SOSCertificate::fromJson(const std::string& json) {
    nlohmann::json j = nlohmann::json::parse(json);
    SOSCertificate cert;
    cert.scen = Scenario{j["scenario"]["parties"].get<int>(), j["scenario"]["settings"].get<int>(),
                         j["scenario"]["outcomes"].get<int>(), j["scenario"]["wordCap"].get<int>()};
    cert.C = ScalarExpr::parse(j["C"].get<std::string>());
    cert.S = polynomialFromJson(j["S"].dump());
    cert.gamma = polynomialFromJson(j["gamma"].dump());
    for (const auto& sq : j["squares"])
        cert.squares.emplace_back(ScalarExpr::parse(sq["weight"].get<std::string>()),
                                  polynomialFromJson(sq["nullifier"].dump()));
    cert.bindings = j["bindings"].get<Assignment>();
    cert.singleSquare = j["singleSquare"].get<bool>();
    return cert;
}

}  // namespace bellforge
