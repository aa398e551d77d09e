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

#include "bellforge/families.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "json.hpp"

namespace bellforge {

namespace {

constexpr double kPi = std::numbers::pi;
/// Within this distance of a region edge the instance degenerates to a
/// single square instead of erroring out.
constexpr double kLimitTol = 1e-9;
/// Bound on the gamma residual of a closed-form parameter solution; a larger
/// leftover means the closed form and the expansion disagree.
constexpr double kResidualTol = 1e-8;

double need(const Assignment& params, const std::string& key) {
    auto it = params.find(key);
    if (it == params.end()) throw std::invalid_argument("missing parameter: " + key);
    return it->second;
}

void rejectUnknown(const Assignment& params, std::initializer_list<const char*> keys) {
    for (const auto& [k, v] : params) {
        bool known = false;
        for (const char* key : keys) known = known || k == key;
        if (!known) throw std::invalid_argument("unknown parameter: " + k);
    }
}

FormalPolynomial Y(const Scenario& scen, int party, int setting) {
    return FormalPolynomial::correlator(scen, party, setting, 1);
}

double gammaResidualNorm(const SOSCertificate& cert, const Assignment& asg) {
    double s = 0.0;
    for (double r : gammaResiduals(cert, asg)) s += r * r;
    return std::sqrt(s);
}

/// Closed-form parameter solutions must leave no gamma residual; anything
/// else is an internal inconsistency, not a user error.
void requireGammaVanishes(const SOSCertificate& cert, const std::string& kind) {
    double res = gammaResidualNorm(cert, cert.bindings);
    if (res > kResidualTol)
        throw std::runtime_error(kind + ": closed-form parameters leave gamma residual " +
                                 std::to_string(res));
}

void crossCheckValue(const std::string& kind, const std::string& name, double solver,
                     double closed) {
    double tol = 1e-6 * std::max(1.0, std::abs(closed));
    if (std::abs(solver - closed) > tol)
        throw std::runtime_error(kind + ": solveGamma cross-check mismatch for " + name + ": " +
                                 std::to_string(solver) + " vs " + std::to_string(closed));
}

Measurements qubitPair(std::vector<double> alice, std::vector<double> bob) {
    return {PartyMeasurements::qubitXZ(std::move(alice)), PartyMeasurements::qubitXZ(std::move(bob))};
}

double coefficientDistance(const BellExpression& a, const BellExpression& b) {
    double d = 0.0;
    for (const auto& [k, v] : a.coefficients()) d = std::max(d, std::abs(v - b.at(k)));
    for (const auto& [k, v] : b.coefficients()) d = std::max(d, std::abs(v - a.at(k)));
    return d;
}

// ---------------------------------------------------------------------------
// chsh_c: beta_c rescaled to the familiar CHSH normalization (C = 2 sqrt 2).

FamilyInstance buildChsh(const Assignment& params) {
    rejectUnknown(params, {"c"});
    const double cval = need(params, "c");
    if (!(cval > 0.0 && cval < kPi / 2.0))
        throw OutOfRegion("c in (0, pi/2)", "chsh_c: c = " + std::to_string(cval));

    Scenario scen{2, 2, 2, 4};
    ScalarExpr c = ScalarExpr::param("c");
    auto A1 = Y(scen, 1, 1), A2 = Y(scen, 1, 2), B1 = Y(scen, 2, 1), B2 = Y(scen, 2, 2);
    FormalPolynomial N0 = A1 - cos(c) * B1 - sin(c) * B2;
    FormalPolynomial N1 = A2 - sin(c) * B1 + cos(c) * B2;
    ScalarExpr w(1.0 / std::sqrt(2.0));

    SOSCertificate cert = sosExpand({{w, N0}, {w, N1}});
    cert.bindings = {{"c", cval}};
    requireGammaVanishes(cert, "chsh_c");

    FamilyInstance inst;
    inst.kind = FamilyKind::ChshC;
    inst.params = params;
    inst.expr = bellExpressionFromPolynomial(cert.S, cert.bindings);
    inst.ideal = {KetState::ghz(2, kPi / 4.0), qubitPair({0.0, kPi / 2.0}, {cval, cval - kPi / 2.0})};
    inst.C = cert.C.eval(cert.bindings).real();
    inst.certificate = std::move(cert);
    inst.canonical = {{"c", std::min(cval, kPi / 2.0 - cval)}};
    if (cval > kPi / 4.0)
        inst.notes.push_back("canonical c = pi/2 - c (relabels Bob's settings)");
    return inst;
}

// ---------------------------------------------------------------------------
// partialTheta / ghz: S_{theta,b}^n with nullifiers Z^(i)-Z^(n) and the
// X-string nullifier; n = 2 is the bipartite partialTheta family.

FamilyInstance buildGhzLike(FamilyKind kind, int n, double thetaVal, double bVal,
                            const Assignment& params) {
    if (n < 2) throw OutOfRegion("n >= 2", "ghz: n = " + std::to_string(n));
    if (!(thetaVal > 0.0 && thetaVal <= kPi / 4.0))
        throw OutOfRegion("theta in (0, pi/4]", "theta = " + std::to_string(thetaVal));

    const double s2t = std::sin(2.0 * thetaVal);
    const double c2t = std::cos(2.0 * thetaVal);
    if (std::abs(std::sin(bVal)) < 1e-12)
        throw OutOfRegion("b != 0", "b = " + std::to_string(bVal));
    if (std::abs(bVal) > 2.0 * thetaVal + kLimitTol)
        throw OutOfRegion("|b| <= 2 theta", "b = " + std::to_string(bVal) +
                                                ", theta = " + std::to_string(thetaVal));
    const double cotb = std::cos(bVal) / std::sin(bVal);
    const double invLambda2 = s2t * s2t * cotb * cotb - c2t * c2t;
    const bool limitPoint = std::abs(invLambda2) <= kLimitTol ||
                            std::abs(std::abs(bVal) - 2.0 * thetaVal) <= kLimitTol;
    if (!limitPoint && invLambda2 < 0.0)
        throw OutOfRegion("sin(2theta)^2 cot(b)^2 > cos(2theta)^2",
                          "b = " + std::to_string(bVal) + " outside (-2theta, 2theta)");

    Scenario scen{n, 2, 2, 4};
    ScalarExpr theta = ScalarExpr::param("theta");
    ScalarExpr b = ScalarExpr::param("b");
    ScalarExpr s2theta = sin(ScalarExpr(2.0) * theta);
    ScalarExpr c2theta = cos(ScalarExpr(2.0) * theta);

    FormalPolynomial Zn =
        (ScalarExpr(1.0) / (ScalarExpr(2.0) * cos(b))) * (Y(scen, n, 1) + Y(scen, n, 2));
    FormalPolynomial Xn =
        (ScalarExpr(1.0) / (ScalarExpr(2.0) * sin(b))) * (Y(scen, n, 1) - Y(scen, n, 2));
    FormalPolynomial PX = FormalPolynomial::one(scen);
    for (int i = 1; i < n; ++i) PX = PX * Y(scen, i, 2);
    FormalPolynomial N1 = PX - s2theta * Xn - c2theta * (PX * Zn);

    std::vector<std::pair<ScalarExpr, FormalPolynomial>> squares;
    if (!limitPoint) {
        for (int i = 1; i < n; ++i)
            squares.emplace_back(ScalarExpr(1.0 / (n - 1)), Y(scen, i, 1) - Zn);
        squares.emplace_back(ScalarExpr::param("lambda2"), N1);
    } else {
        squares.emplace_back(ScalarExpr(1.0), N1);
    }

    SOSCertificate cert = sosExpand(squares);
    cert.bindings = {{"theta", thetaVal}, {"b", bVal}};
    double lambda2 = 0.0;
    if (!limitPoint) {
        lambda2 = 1.0 / invLambda2;
        cert.bindings["lambda2"] = lambda2;
        requireGammaVanishes(cert, to_string(kind));
        SolveGammaResult sol = solveGamma(cert, {"lambda2"},
                                          {{"theta", thetaVal}, {"b", bVal}}, {{"lambda2", 1.0}});
        if (!sol.converged) throw std::runtime_error(to_string(kind) + ": solveGamma cross-check diverged");
        crossCheckValue(to_string(kind), "lambda2", sol.assignment.at("lambda2"), lambda2);
    } else {
        requireGammaVanishes(cert, to_string(kind));
    }

    FamilyInstance inst;
    inst.kind = kind;
    inst.params = params;
    inst.expr = bellExpressionFromPolynomial(cert.S, cert.bindings);
    Measurements meas;
    for (int i = 1; i < n; ++i) meas.push_back(PartyMeasurements::qubitXZ({0.0, kPi / 2.0}));
    meas.push_back(PartyMeasurements::qubitXZ({bVal, -bVal}));
    inst.ideal = {KetState::ghz(n, thetaVal), std::move(meas)};
    inst.C = cert.C.eval(cert.bindings).real();
    inst.singleSquare = cert.singleSquare;
    inst.certificate = std::move(cert);
    inst.canonical = {{"theta", thetaVal}, {"b", bVal}, {"n", double(n)}};
    if (!limitPoint)
        inst.canonical["lambda2"] = lambda2;
    else
        inst.notes.push_back("limit point |b| = 2 theta: 1/lambda^2 = 0, certificate reduced to the"
                             " rescaled single square");
    return inst;
}

FamilyInstance buildPartialTheta(const Assignment& params) {
    rejectUnknown(params, {"theta", "b"});
    return buildGhzLike(FamilyKind::PartialTheta, 2, need(params, "theta"), need(params, "b"),
                        params);
}

FamilyInstance buildGhz(const Assignment& params) {
    rejectUnknown(params, {"n", "theta", "b"});
    double nRaw = need(params, "n");
    int n = static_cast<int>(std::lround(nRaw));
    if (std::abs(nRaw - n) > 1e-12) throw std::invalid_argument("ghz: n must be an integer");
    FamilyInstance inst =
        buildGhzLike(FamilyKind::Ghz, n, need(params, "theta"), need(params, "b"), params);
    if (n == 2) inst.notes.push_back("n = 2 coincides with partialTheta coefficients exactly");
    return inst;
}

// ---------------------------------------------------------------------------
// partialTwoParam: Bob's angles free inside the squared region; the single
// mixed square (lambda1 N1 + lambda2 N2)^2 absorbs the extra nullifier.

FamilyInstance buildPartialTwoParam(const Assignment& params) {
    rejectUnknown(params, {"theta", "b1", "b2"});
    const double thetaVal = need(params, "theta");
    const double b1Val = need(params, "b1");
    const double b2Val = need(params, "b2");
    if (!(thetaVal > 0.0 && thetaVal <= kPi / 4.0))
        throw OutOfRegion("theta in (0, pi/4]", "theta = " + std::to_string(thetaVal));
    if (!(b1Val > -2.0 * thetaVal && b1Val < 0.0))
        throw OutOfRegion("b1 in (-2 theta, 0)", "b1 = " + std::to_string(b1Val));
    if (!(b2Val > 0.0 && b2Val < 2.0 * thetaVal))
        throw OutOfRegion("b2 in (0, 2 theta)", "b2 = " + std::to_string(b2Val));

    const double s4t = std::sin(4.0 * thetaVal), c4t = std::cos(4.0 * thetaVal);
    const double s2t = std::sin(2.0 * thetaVal), c2t = std::cos(2.0 * thetaVal);
    const double sb1 = std::sin(b1Val), sb2 = std::sin(b2Val);
    const double den = (std::cos(2.0 * b1Val) - c4t) * (std::cos(2.0 * b2Val) - c4t);
    const double prod = -sb1 * sb2 * std::sin(b1Val + b2Val) * s4t / den;  // lambda1 lambda2
    const double cotb1 = std::cos(b1Val) / sb1, cotb2 = std::cos(b2Val) / sb2;
    const double sum =
        -4.0 * sb1 * sb1 * sb2 * sb2 * (c2t * c2t + cotb1 * cotb2 * s2t * s2t) / den;
    const double disc = sum * sum - 4.0 * prod * prod;  // (lambda1^2 - lambda2^2)^2
    if (!(sum > 0.0) || disc <= 0.0)
        throw OutOfRegion("(lambda1^2 - lambda2^2)^2 > 0",
                          "degenerate lambda solution at b1 = " + std::to_string(b1Val) +
                              ", b2 = " + std::to_string(b2Val));
    const double l1 = std::sqrt((sum + std::sqrt(disc)) / 2.0);
    const double l2 = prod / l1;

    Scenario scen{2, 2, 2, 4};
    ScalarExpr theta = ScalarExpr::param("theta");
    ScalarExpr b1 = ScalarExpr::param("b1");
    ScalarExpr b2 = ScalarExpr::param("b2");
    ScalarExpr s2theta = sin(ScalarExpr(2.0) * theta);
    ScalarExpr c2theta = cos(ScalarExpr(2.0) * theta);
    ScalarExpr sdiff = sin(b2 - b1);
    auto A1 = Y(scen, 1, 1), A2 = Y(scen, 1, 2), B1 = Y(scen, 2, 1), B2 = Y(scen, 2, 2);
    FormalPolynomial ZB = (ScalarExpr(1.0) / sdiff) * (sin(b2) * B1 - sin(b1) * B2);
    FormalPolynomial XB = (ScalarExpr(1.0) / sdiff) * (cos(b1) * B2 - cos(b2) * B1);
    FormalPolynomial N0 = A1 - ZB;
    FormalPolynomial N1 = A2 - s2theta * XB - c2theta * (A2 * ZB);
    FormalPolynomial N2 = FormalPolynomial::one(scen) - s2theta * (A2 * XB) - c2theta * ZB;
    ScalarExpr lambda1 = ScalarExpr::param("lambda1");
    ScalarExpr lambda2 = ScalarExpr::param("lambda2");

    SOSCertificate cert =
        sosExpand({{ScalarExpr(1.0), N0}, {ScalarExpr(1.0), lambda1 * N1 + lambda2 * N2}});
    cert.bindings = {{"theta", thetaVal}, {"b1", b1Val}, {"b2", b2Val},
                     {"lambda1", l1},     {"lambda2", l2}};
    requireGammaVanishes(cert, "partialTwoParam");

    Assignment fixed = {{"theta", thetaVal}, {"b1", b1Val}, {"b2", b2Val}};
    SolveGammaResult sol =
        solveGamma(cert, {"lambda1", "lambda2"}, fixed, {{"lambda1", 0.7}, {"lambda2", 0.3}});
    if (!sol.converged) throw std::runtime_error("partialTwoParam: solveGamma cross-check diverged");
    double sl1 = sol.assignment.at("lambda1"), sl2 = sol.assignment.at("lambda2");
    crossCheckValue("partialTwoParam", "lambda1*lambda2", sl1 * sl2, prod);
    crossCheckValue("partialTwoParam", "lambda1^2+lambda2^2", sl1 * sl1 + sl2 * sl2, sum);

    FamilyInstance inst;
    inst.kind = FamilyKind::PartialTwoParam;
    inst.params = params;
    inst.expr = bellExpressionFromPolynomial(cert.S, cert.bindings);
    inst.ideal = {KetState::ghz(2, thetaVal), qubitPair({0.0, kPi / 2.0}, {b1Val, b2Val})};
    inst.C = cert.C.eval(cert.bindings).real();
    inst.certificate = std::move(cert);
    inst.canonical = {{"theta", thetaVal}, {"b1", b1Val},  {"b2", b2Val},
                      {"lambda1", l1},     {"lambda2", l2}};

    if (std::abs(b1Val + b2Val) < 1e-12) {
        FamilyInstance pt = buildPartialTheta({{"theta", thetaVal}, {"b", b1Val}});
        double dist = coefficientDistance(inst.expr, pt.expr);
        if (dist > 1e-9)
            throw std::runtime_error(
                "partialTwoParam: expected coincidence with partialTheta at b2 = -b1, distance " +
                std::to_string(dist));
        inst.notes.push_back("b2 = -b1: coincides with partialTheta at b = b1 (lambda2 = 0, "
                             "lambda1^2 = partialTheta lambda^2)");
    }
    return inst;
}

// ---------------------------------------------------------------------------
// singletAllSettings: phi+ with Alice (0, a2) and Bob (b1, b2); the second
// square carries the weight 1/(sin(a2)^2 f).

FamilyInstance buildSingletAllSettings(const Assignment& params) {
    rejectUnknown(params, {"a2", "b1", "b2"});
    const double a2Val = need(params, "a2");
    double b1Val = need(params, "b1");
    double b2Val = need(params, "b2");

    FamilyInstance inst;
    inst.kind = FamilyKind::SingletAllSettings;
    inst.params = params;
    if (b1Val > b2Val) {
        std::swap(b1Val, b2Val);
        inst.notes.push_back("canonicalized b1 < b2 by relabeling Bob's settings");
    }
    if (!(b1Val > 0.0)) throw OutOfRegion("0 < b1", "b1 = " + std::to_string(b1Val));
    if (!(b2Val < kPi)) throw OutOfRegion("b2 < pi", "b2 = " + std::to_string(b2Val));
    if (!(a2Val > b1Val - kLimitTol && a2Val < b2Val + kLimitTol))
        throw OutOfRegion("b1 < a2 < b2", "a2 = " + std::to_string(a2Val));
    const bool limitPoint =
        std::abs(a2Val - b1Val) <= kLimitTol || std::abs(a2Val - b2Val) <= kLimitTol;

    const double sa2 = std::sin(a2Val);
    double w1Val = 0.0;
    if (!limitPoint) {
        const double f = (std::cos(a2Val) / sa2 - std::cos(b2Val) / std::sin(b2Val)) *
                         (std::cos(b1Val) / std::sin(b1Val) - std::cos(a2Val) / sa2);
        if (!(f > 0.0))
            throw OutOfRegion("f(a2, b1, b2) > 0", "f = " + std::to_string(f));
        w1Val = 1.0 / (sa2 * sa2 * f);
    }

    Scenario scen{2, 2, 2, 4};
    ScalarExpr a2 = ScalarExpr::param("a2");
    ScalarExpr b1 = ScalarExpr::param("b1");
    ScalarExpr b2 = ScalarExpr::param("b2");
    ScalarExpr sdiff = sin(b2 - b1);
    auto A1 = Y(scen, 1, 1), A2 = Y(scen, 1, 2), B1 = Y(scen, 2, 1), B2 = Y(scen, 2, 2);
    FormalPolynomial N0 = A1 - (ScalarExpr(1.0) / sdiff) * (sin(b2) * B1 - sin(b1) * B2);
    FormalPolynomial N1 =
        A2 - (ScalarExpr(1.0) / sdiff) * (sin(b2 - a2) * B1 + sin(a2 - b1) * B2);

    std::vector<std::pair<ScalarExpr, FormalPolynomial>> squares;
    if (!limitPoint) {
        squares.emplace_back(ScalarExpr(1.0), N0);
        squares.emplace_back(ScalarExpr::param("w1"), N1);
    } else {
        squares.emplace_back(ScalarExpr(1.0), N1);
    }

    SOSCertificate cert = sosExpand(squares);
    cert.bindings = {{"a2", a2Val}, {"b1", b1Val}, {"b2", b2Val}};
    if (!limitPoint) {
        cert.bindings["w1"] = w1Val;
        requireGammaVanishes(cert, "singletAllSettings");
        SolveGammaResult sol = solveGamma(cert, {"w1"}, {{"a2", a2Val}, {"b1", b1Val}, {"b2", b2Val}},
                                          {{"w1", 1.0}});
        if (!sol.converged)
            throw std::runtime_error("singletAllSettings: solveGamma cross-check diverged");
        crossCheckValue("singletAllSettings", "w1", sol.assignment.at("w1"), w1Val);
    } else {
        requireGammaVanishes(cert, "singletAllSettings");
    }

    inst.expr = bellExpressionFromPolynomial(cert.S, cert.bindings);
    inst.ideal = {KetState::ghz(2, kPi / 4.0), qubitPair({0.0, a2Val}, {b1Val, b2Val})};
    inst.C = cert.C.eval(cert.bindings).real();
    inst.singleSquare = cert.singleSquare;
    inst.certificate = std::move(cert);
    inst.canonical = {{"a2", a2Val}, {"b1", b1Val}, {"b2", b2Val}};
    if (!limitPoint)
        inst.canonical["w1"] = w1Val;
    else
        inst.notes.push_back("limit point a2 = b1 or a2 = b2 (shared measurement direction): "
                             "non-exposed single-square certificate");
    return inst;
}

// ---------------------------------------------------------------------------
// qutrit: maximally entangled qutrits with Fourier-phase measurements.

Complex wpow(double t) {
    const double ang = 2.0 * kPi * t / 3.0;
    return {std::cos(ang), std::sin(ang)};
}

FamilyInstance buildQutrit(const Assignment& params) {
    rejectUnknown(params, {"a1", "a2", "b1", "b2"});
    const double a1 = need(params, "a1"), a2 = need(params, "a2");
    const double b1 = need(params, "b1"), b2 = need(params, "b2");

    Complex den1 = wpow(-2.0 * b1) - wpow(b1 - 3.0 * b2);
    Complex den2 = wpow(-2.0 * b2) - wpow(b2 - 3.0 * b1);
    if (std::abs(den1) < 1e-12 || std::abs(den2) < 1e-12)
        throw OutOfRegion("b2 - b1 not an integer", "degenerate Bob phases");
    auto mu = [&](int which, double ax) {
        if (which == 1) return (wpow(2.0 * ax) - wpow(-ax - 3.0 * b2)) / den1;
        return (wpow(2.0 * ax) - wpow(-ax - 3.0 * b1)) / den2;
    };
    Complex mu11 = mu(1, a1), mu21 = mu(2, a1), mu12 = mu(1, a2), mu22 = mu(2, a2);

    const double t1 = std::sin(kPi * (a1 + b2)) * std::sin(kPi * (a1 + b1));
    const double t2 = std::sin(kPi * (a2 + b2)) * std::sin(kPi * (a2 + b1));
    if (std::abs(t1 - t2) < 1e-12)
        throw OutOfRegion("p solvable", "degenerate phase choice (t1 = t2)");
    const double pVal = t2 / (t2 - t1);
    if (!(pVal > 0.0 && pVal < 1.0))
        throw OutOfRegion("alternating condition -b1 < a2 < -b2 (mod 1)",
                          "p = " + std::to_string(pVal) + " outside (0, 1)");

    Scenario scen{2, 2, 3, 4};
    ScalarExpr p = ScalarExpr::param("p");
    auto barB = [&](Complex m1, Complex m2) {
        return ScalarExpr(m1) * Y(scen, 2, 1) + ScalarExpr(m2) * Y(scen, 2, 2);
    };
    FormalPolynomial N1 = FormalPolynomial::one(scen) - Y(scen, 1, 1) * barB(mu11, mu21);
    FormalPolynomial N2 = FormalPolynomial::one(scen) - Y(scen, 1, 2) * barB(mu12, mu22);

    SOSCertificate cert = sosExpand({{p, N1}, {ScalarExpr(1.0) - p, N2}});
    cert.bindings = {{"a1", a1}, {"a2", a2}, {"b1", b1}, {"b2", b2}, {"p", pVal}};
    requireGammaVanishes(cert, "qutrit");
    SolveGammaResult sol = solveGamma(cert, {"p"}, {}, {{"p", 0.5}});
    if (!sol.converged) throw std::runtime_error("qutrit: solveGamma cross-check diverged");
    crossCheckValue("qutrit", "p", sol.assignment.at("p"), pVal);

    FamilyInstance inst;
    inst.kind = FamilyKind::Qutrit;
    inst.params = params;
    inst.expr = bellExpressionFromPolynomial(cert.S, cert.bindings);
    inst.ideal = {KetState::maxEntangledQutrits(),
                  {PartyMeasurements::qutritFourierPhase({a1, a2}),
                   PartyMeasurements::qutritFourierPhase({b1, b2})}};
    inst.C = cert.C.eval(cert.bindings).real();
    inst.certificate = std::move(cert);

    // gauge: shift all phases by -a1, reduce mod 1, order Bob so that the
    // alternating chain -b1 < a2 < -b2 is explicit
    auto mod1 = [](double x) { return x - std::floor(x); };
    double ca2 = mod1(a2 - a1);
    double cnb1 = mod1(-(b1 + a1)), cnb2 = mod1(-(b2 + a1));
    if (cnb1 > cnb2) {
        std::swap(cnb1, cnb2);
        inst.notes.push_back("canonical form relabels Bob's settings");
    }
    inst.canonical = {{"a1", 0.0},     {"a2", ca2},      {"minus_b1", cnb1},
                      {"minus_b2", cnb2}, {"p", pVal}};
    return inst;
}

// ---------------------------------------------------------------------------
// tiltedChsh / wagner / limitation: variational-method kinds (no SOS
// certificate attached).

FamilyInstance buildTiltedChsh(const Assignment& params) {
    rejectUnknown(params, {"theta"});
    const double theta = need(params, "theta");
    if (!(theta > 0.0 && theta <= kPi / 4.0))
        throw OutOfRegion("theta in (0, pi/4]", "theta = " + std::to_string(theta));
    const double s2t = std::sin(2.0 * theta), c2t = std::cos(2.0 * theta);
    // alpha = 2/sqrt(1 + 2 tan(2 theta)^2) written pole-free at theta = pi/4
    const double alpha = 2.0 * c2t / std::sqrt(1.0 + s2t * s2t);
    const double mu = std::atan(s2t);

    Scenario scen{2, 2, 2, 4};
    FamilyInstance inst;
    inst.kind = FamilyKind::TiltedChsh;
    inst.params = params;
    inst.expr = BellExpression::fromCorrelators(
        scen, {{{1, 1}, 1.0}, {{1, 2}, 1.0}, {{2, 1}, 1.0}, {{2, 2}, -1.0}, {{1, 0}, alpha}});
    inst.ideal = {KetState::ghz(2, theta), qubitPair({0.0, kPi / 2.0}, {mu, -mu})};
    inst.C = std::sqrt(8.0 + 2.0 * alpha * alpha);
    inst.canonical = {{"theta", theta}, {"alpha", alpha}, {"mu", mu}};
    return inst;
}

double wagnerB(double theta) {
    const double s2t = std::sin(2.0 * theta), c2t = std::cos(2.0 * theta);
    return kPi / 2.0 - std::atan(std::sqrt((1.0 + 0.5 * c2t * c2t) / (s2t * s2t)));
}

FamilyInstance buildWagner(const Assignment& params) {
    rejectUnknown(params, {"theta"});
    const double theta = need(params, "theta");
    if (!(theta > 0.0 && theta <= kPi / 4.0))
        throw OutOfRegion("theta in (0, pi/4]", "theta = " + std::to_string(theta));
    const double s2t = std::sin(2.0 * theta), c2t = std::cos(2.0 * theta);
    const double b = wagnerB(theta);
    const double cb = std::cos(b), sb = std::sin(b);

    Scenario scen{2, 2, 2, 4};
    FamilyInstance inst;
    inst.kind = FamilyKind::Wagner;
    inst.params = params;
    inst.expr = BellExpression::fromCorrelators(
        scen, {{{1, 1}, 1.0 / (2.0 * cb)},
               {{1, 2}, 1.0 / (2.0 * cb)},
               {{2, 1}, s2t / (2.0 * sb)},
               {{2, 2}, -s2t / (2.0 * sb)},
               {{1, 0}, c2t / 2.0},
               {{0, 1}, c2t / (4.0 * cb)},
               {{0, 2}, c2t / (4.0 * cb)}});
    inst.ideal = {KetState::ghz(2, theta), qubitPair({0.0, kPi / 2.0}, {b, -b})};
    inst.C = 2.0;
    inst.canonical = {{"theta", theta}, {"b_theta", b}};
    return inst;
}

FamilyInstance buildLimitation(const Assignment& params) {
    rejectUnknown(params, {"q"});
    const double q = need(params, "q");
    if (!(q >= 0.0 && q <= 4.0)) throw OutOfRegion("q in [0, 4]", "q = " + std::to_string(q));
    const double theta = kPi / 8.0;
    const double s2t = std::sin(2.0 * theta), c2t = std::cos(2.0 * theta);
    const double p = (2.0 + q) / (4.0 + q);
    // unique-maximal-eigenvector condition (always holds on [0, 4])
    const double gap = 4.0 * p + (1.0 - p) * (1.0 - p) * 2.0 * q * (1.0 - q) *
                                     (std::cos(4.0 * theta) + 1.0);
    if (!(gap > 0.0))
        throw OutOfRegion("4p + 2 q (1-q) (1-p)^2 (cos(4 theta)+1) > 0",
                          "q = " + std::to_string(q));

    Scenario scen{2, 2, 2, 4};
    const double r3 = std::sqrt(3.0), r2 = std::sqrt(2.0), r6 = std::sqrt(6.0);
    FamilyInstance inst;
    inst.kind = FamilyKind::Limitation;
    inst.params = params;
    inst.expr = BellExpression::fromCorrelators(
        scen, {{{1, 1}, p / r3},
               {{1, 2}, p / r3},
               {{2, 1}, (1.0 - p) / r2},
               {{2, 2}, -(1.0 - p) / r2},
               {{1, 0}, (1.0 - p) * q / r2},
               {{0, 1}, (1.0 - p) * (1.0 - q) / r6},
               {{0, 2}, (1.0 - p) * (1.0 - q) / r6}});
    inst.ideal = {KetState::ghz(2, theta), qubitPair({0.0, kPi / 2.0}, {kPi / 6.0, -kPi / 6.0})};
    inst.C = 1.0;  // value at the ideal point; a global quantum bound only for q < ~2.83
    inst.generator = BellExpression::fromCorrelators(
        scen, {{{1, 1}, p},
               {{2, 2}, (1.0 - p) * s2t},
               {{1, 0}, (1.0 - p) * c2t * q},
               {{0, 1}, (1.0 - p) * c2t * (1.0 - q)}});
    inst.canonical = {{"q", q}, {"p", p}, {"theta", theta}, {"a2", kPi / 2.0}};
    inst.notes.push_back("generator coefficients are over Z/X settings on both parties "
                         "(angles {0, pi/2})");
    return inst;
}

AngulousPair makePair(FamilyInstance first, double theta, double b) {
    FamilyInstance second = build(FamilyKind::PartialTheta, {{"theta", theta}, {"b", b}});
    Behavior shared = behavior(second.ideal);

    double v1 = bellValue(first.expr, shared);
    double v2 = bellValue(second.expr, shared);
    if (std::abs(v1 - first.C) > 1e-9 || std::abs(v2 - second.C) > 1e-9)
        throw std::runtime_error("angulous pair: shared behavior does not maximize both "
                                 "expressions (values " +
                                 std::to_string(v1) + ", " + std::to_string(v2) + ")");

    // compare the two tangent hyperplanes (coefficients, offset) after unit
    // normalization
    auto normalized = [](const BellExpression& e, double offset) {
        std::map<std::vector<int>, double> corr = e.correlatorView();
        corr[{0, 0}] = offset;
        double n = 0.0;
        for (const auto& [k, v] : corr) n += v * v;
        n = std::sqrt(n);
        for (auto& [k, v] : corr) v /= n;
        return corr;
    };
    auto c1 = normalized(first.expr, first.C);
    auto c2 = normalized(second.expr, second.C);
    double dist = 0.0;
    for (const auto& [k, v] : c1) {
        auto it = c2.find(k);
        dist = std::max(dist, std::abs(v - (it == c2.end() ? 0.0 : it->second)));
    }
    for (const auto& [k, v] : c2)
        if (!c1.count(k)) dist = std::max(dist, std::abs(v));

    AngulousPair pair{std::move(first), std::move(second), std::move(shared), dist, dist <= 1e-9};
    if (pair.coincident)
        pair.first.notes.push_back("tangent hyperplanes coincide (single supporting hyperplane)");
    return pair;
}

}  // namespace

std::string to_string(FamilyKind kind) {
    switch (kind) {
        case FamilyKind::ChshC: return "chsh_c";
        case FamilyKind::SingletAllSettings: return "singletAllSettings";
        case FamilyKind::PartialTheta: return "partialTheta";
        case FamilyKind::PartialTwoParam: return "partialTwoParam";
        case FamilyKind::Ghz: return "ghz";
        case FamilyKind::Qutrit: return "qutrit";
        case FamilyKind::TiltedChsh: return "tiltedChsh";
        case FamilyKind::Wagner: return "wagner";
        case FamilyKind::Limitation: return "limitation";
    }
    return "?";
}

FamilyKind familyKindFromString(const std::string& name) {
    for (FamilyKind k : allFamilyKinds())
        if (to_string(k) == name) return k;
    throw std::invalid_argument("unknown family kind: " + name);
}

std::vector<FamilyKind> allFamilyKinds() {
    return {FamilyKind::ChshC,      FamilyKind::SingletAllSettings, FamilyKind::PartialTheta,
            FamilyKind::PartialTwoParam, FamilyKind::Ghz,           FamilyKind::Qutrit,
            FamilyKind::TiltedChsh, FamilyKind::Wagner,             FamilyKind::Limitation};
}

FamilyInstance build(FamilyKind kind, const Assignment& params) {
    switch (kind) {
        case FamilyKind::ChshC: return buildChsh(params);
        case FamilyKind::SingletAllSettings: return buildSingletAllSettings(params);
        case FamilyKind::PartialTheta: return buildPartialTheta(params);
        case FamilyKind::PartialTwoParam: return buildPartialTwoParam(params);
        case FamilyKind::Ghz: return buildGhz(params);
        case FamilyKind::Qutrit: return buildQutrit(params);
        case FamilyKind::TiltedChsh: return buildTiltedChsh(params);
        case FamilyKind::Wagner: return buildWagner(params);
        case FamilyKind::Limitation: return buildLimitation(params);
    }
    throw std::invalid_argument("unknown family kind");
}

Hyperplane tangentHyperplane(double a2, double b1, double b2) {
    if (!(b1 > 0.0)) throw OutOfRegion("0 < b1", "b1 = " + std::to_string(b1));
    if (!(b2 < kPi)) throw OutOfRegion("b2 < pi", "b2 = " + std::to_string(b2));
    if (!(a2 > b1 && a2 < b2))
        throw OutOfRegion("b1 < a2 < b2 (f > 0)", "a2 = " + std::to_string(a2));

    Hyperplane h;
    h.coefficients = {1.0 / std::sin(b1), 1.0 / std::sin(a2 - b1), 1.0 / std::sin(b2 - a2),
                      -1.0 / std::sin(b2)};
    auto cot = [](double x) { return std::cos(x) / std::sin(x); };
    h.offset = cot(b1) + cot(a2 - b1) + cot(b2 - a2) - cot(b2);
    h.expr = BellExpression::fromCorrelators(Scenario{2, 2, 2, 4},
                                             {{{1, 1}, h.coefficients[0]},
                                              {{2, 1}, h.coefficients[1]},
                                              {{2, 2}, h.coefficients[2]},
                                              {{1, 2}, h.coefficients[3]}});
    return h;
}

AngulousPair angulousPair(double theta) {
    FamilyInstance tilted = build(FamilyKind::TiltedChsh, {{"theta", theta}});
    double mu = tilted.canonical.at("mu");
    return makePair(std::move(tilted), theta, mu);
}

AngulousPair wagnerPair(double theta) {
    FamilyInstance wag = build(FamilyKind::Wagner, {{"theta", theta}});
    double b = wag.canonical.at("b_theta");
    return makePair(std::move(wag), theta, b);
}

std::string FamilyInstance::coefficientTable() const {
    FormalPolynomial poly = polynomialFromBellExpression(expr);
    CorrelatorPolynomial corr = toCorrelatorBasis(poly);
    std::ostringstream out;
    out << "# coefficient      term\n";
    for (const auto& [mono, coeff] : corr.terms()) {
        std::string term;
        for (size_t p = 0; p < mono.words.size(); ++p)
            for (const auto& sym : mono.words[p]) {
                if (!term.empty()) term += " ";
                term += static_cast<char>('A' + static_cast<int>(p));
                term += std::to_string(sym.setting);
                if (sym.power > 1) term += "^" + std::to_string(sym.power);
            }
        if (term.empty()) term = "1";
        Complex v = coeff.eval({});
        out << std::setw(16) << std::setprecision(12) << v.real();
        if (std::abs(v.imag()) > 1e-12) out << (v.imag() >= 0 ? "+" : "") << v.imag() << "i";
        out << "  <" << term << ">\n";
    }
    return out.str();
}

std::string FamilyInstance::toJson() const {
    nlohmann::json j;
    j["kind"] = to_string(kind);
    j["params"] = params;
    j["canonical"] = canonical;
    j["C"] = C;
    j["singleSquare"] = singleSquare;
    j["notes"] = notes;
    j["expression"] = nlohmann::json::parse(expr.toJson());
    if (certificate) j["certificate"] = nlohmann::json::parse(certificate->toJson());
    if (generator) j["generator"] = nlohmann::json::parse(generator->toJson());

    nlohmann::json ideal_;
    ideal_["dims"] = ideal.state.dims;
    nlohmann::json amps = nlohmann::json::array();
    for (int i = 0; i < ideal.state.amps.size(); ++i)
        amps.push_back({ideal.state.amps(i).real(), ideal.state.amps(i).imag()});
    ideal_["state"] = amps;
    nlohmann::json meas = nlohmann::json::array();
    for (const auto& pm : ideal.measurements) {
        nlohmann::json m;
        m["kind"] = pm.kind == PartyMeasurements::Kind::QubitXZ ? "qubitXZ" : "qutritFourierPhase";
        m["angles"] = pm.angles;
        meas.push_back(m);
    }
    ideal_["measurements"] = meas;
    j["ideal"] = ideal_;
    return j.dump(2);
}

}  // namespace bellforge
