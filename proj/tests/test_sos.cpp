#include <cmath>
#include <numbers>

#include "bellforge/sos.hpp"
#include "doctest.h"

using namespace bellforge;

namespace {

constexpr double kPi = std::numbers::pi;
const Scenario kQubit{2, 2, 2, 4};

FormalPolynomial A(int x) { return FormalPolynomial::correlator(kQubit, 1, x, 1); }
FormalPolynomial B(int y) { return FormalPolynomial::correlator(kQubit, 2, y, 1); }

ScalarExpr bp() { return ScalarExpr::param("b"); }
ScalarExpr lam() { return ScalarExpr::param("lam"); }

// N0 = A1 - (B1+B2)/(2 cos b), N1 = lam * (A2 - (B1-B2)/(2 sin b))
std::vector<std::pair<ScalarExpr, FormalPolynomial>> singletSquares() {
    ScalarExpr one(1.0);
    FormalPolynomial n0 = A(1) - (one / (ScalarExpr(2.0) * cos(bp()))) * (B(1) + B(2));
    FormalPolynomial n1 =
        lam() * (A(2) - (one / (ScalarExpr(2.0) * sin(bp()))) * (B(1) - B(2)));
    return {{one, n0}, {one, n1}};
}

// partially entangled family: Alice (Z, X), Bob at +-b, weight lam^2 on N1
std::vector<std::pair<ScalarExpr, FormalPolynomial>> partialThetaSquares(double theta) {
    ScalarExpr one(1.0);
    ScalarExpr s2t(std::sin(2.0 * theta)), c2t(std::cos(2.0 * theta));
    ScalarExpr zb = one / (ScalarExpr(2.0) * cos(bp()));
    ScalarExpr xb = one / (ScalarExpr(2.0) * sin(bp()));
    FormalPolynomial n0 = A(1) - zb * (B(1) + B(2));
    FormalPolynomial n1 =
        A(2) - (s2t * xb) * (B(1) - B(2)) - (c2t * zb) * (A(2) * (B(1) + B(2)));
    return {{one, n0}, {lam() * lam(), n1}};
}

double norm2(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

TEST_CASE("promoteNullifier substitutes dictionary entries") {
    MeasurementDictionary dict{kQubit, {}};
    dict.define("Z_A", A(1));
    dict.define("Z_B", (ScalarExpr(1.0) / (ScalarExpr(2.0) * cos(bp()))) * (B(1) + B(2)));
    auto n = promoteNullifier(AbstractExpr::op("Z_A") - AbstractExpr::op("Z_B"), dict);
    FormalPolynomial expected =
        A(1) - (ScalarExpr(1.0) / (ScalarExpr(2.0) * cos(bp()))) * (B(1) + B(2));
    Assignment asg{{"b", 0.9}};
    auto diff = (n - expected).evaluated(asg);
    CHECK(diff.isZero());
    CHECK_THROWS_AS(promoteNullifier(AbstractExpr::op("X_A"), dict), MissingSymbol);
}

TEST_CASE("abstract products concatenate words") {
    MeasurementDictionary dict{kQubit, {}};
    dict.define("X_A", A(2));
    dict.define("Z_B", B(1));
    auto n = promoteNullifier(AbstractExpr::op("X_A") * AbstractExpr::op("Z_B"), dict);
    auto diff = (n - A(2) * B(1)).evaluated({});
    CHECK(diff.isZero());
}

TEST_CASE("CHSH expansion with weights 1/sqrt2") {
    ScalarExpr w(1.0 / std::sqrt(2.0));
    ScalarExpr inv = ScalarExpr(1.0) / sqrt(ScalarExpr(2.0));
    FormalPolynomial n0 = A(1) - inv * (B(1) + B(2));
    FormalPolynomial n1 = A(2) - inv * (B(1) - B(2));
    auto cert = sosExpand({{w, n0}, {w, n1}});
    CHECK(cert.C.eval({}).real() == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-12));
    CHECK(cert.gamma.isZero());
    CHECK_FALSE(cert.singleSquare);
    auto expr = bellExpressionFromPolynomial(cert.S);
    auto corr = expr.correlatorView();
    CHECK(corr.at({1, 1}) == doctest::Approx(1.0));
    CHECK(corr.at({1, 2}) == doctest::Approx(1.0));
    CHECK(corr.at({2, 1}) == doctest::Approx(1.0));
    CHECK(corr.at({2, 2}) == doctest::Approx(-1.0));
}

TEST_CASE("single square splits as 2 - 2 A1 B1") {
    auto cert = sosExpand({{ScalarExpr(1.0), A(1) - B(1)}});
    CHECK(cert.singleSquare);
    CHECK(cert.C.eval({}).real() == doctest::Approx(2.0));
    CHECK(cert.gamma.isZero());
    auto corr = bellExpressionFromPolynomial(cert.S).correlatorView();
    CHECK(corr.at({1, 1}) == doctest::Approx(2.0));
}

TEST_CASE("singlet gamma residuals vanish exactly at lam = tan b") {
    auto cert = sosExpand(singletSquares());
    double b = 0.7;
    CHECK(norm2(gammaResiduals(cert, {{"b", b}, {"lam", std::tan(b)}})) < 1e-12);
    CHECK(norm2(gammaResiduals(cert, {{"b", b}, {"lam", 0.3}})) > 1e-3);
}

TEST_CASE("solveGamma recovers the singlet weight") {
    auto cert = sosExpand(singletSquares());
    double b = 0.7;
    auto res = solveGamma(cert, {"lam"}, {{"b", b}}, {{"lam", 0.5}});
    REQUIRE(res.converged);
    CHECK(res.residualNorm <= 1e-10);
    double got = res.assignment.at("lam");
    CHECK(got * got == doctest::Approx(std::tan(b) * std::tan(b)).epsilon(1e-8));

    // bitwise deterministic
    auto res2 = solveGamma(cert, {"lam"}, {{"b", b}}, {{"lam", 0.5}});
    CHECK(res2.assignment.at("lam") == got);
    CHECK(res2.restartIndex == res.restartIndex);
}

TEST_CASE("solveGamma escapes a stationary initial point via restarts") {
    auto cert = sosExpand(singletSquares());
    double b = 0.6;
    auto res = solveGamma(cert, {"lam"}, {{"b", b}}, {{"lam", 0.0}});
    REQUIRE(res.converged);
    CHECK(res.assignment.at("lam") * res.assignment.at("lam") ==
          doctest::Approx(std::tan(b) * std::tan(b)).epsilon(1e-8));
    CHECK(res.restartIndex >= 1);  // the unperturbed start has zero gradient
}

TEST_CASE("partial entanglement weight matches the closed form") {
    double theta = kPi / 8, b = 0.5;
    auto cert = sosExpand(partialThetaSquares(theta));
    auto res = solveGamma(cert, {"lam"}, {{"b", b}}, {{"lam", 1.0}});
    REQUIRE(res.converged);
    double l2 = res.assignment.at("lam") * res.assignment.at("lam");
    double s2t = std::sin(2 * theta), c2t = std::cos(2 * theta);
    double expect = 1.0 / (s2t * s2t / std::pow(std::tan(b), 2) - c2t * c2t);
    CHECK(l2 == doctest::Approx(expect).epsilon(1e-8));
}

TEST_CASE("verifyCertificate accepts the solved partial-theta certificate") {
    double theta = kPi / 8, b = 0.5;
    auto cert = sosExpand(partialThetaSquares(theta));
    auto res = solveGamma(cert, {"lam"}, {{"b", b}}, {{"lam", 1.0}});
    REQUIRE(res.converged);
    cert.bindings = res.assignment;

    Realization real{KetState::ghz(2, theta),
                     {PartyMeasurements::qubitXZ({0.0, kPi / 2}),
                      PartyMeasurements::qubitXZ({b, -b})}};
    auto rep = verifyCertificate(cert, real, 1e-8);
    for (const auto& c : rep.checks) {
        INFO(c.name, " residual ", c.residual);
        CHECK(c.pass);
    }
    CHECK(rep.pass);

    // a wrong measurement binding must be rejected
    SOSCertificate bad = cert;
    bad.bindings["b"] = b + 0.05;
    Realization mism{KetState::ghz(2, theta),
                     {PartyMeasurements::qubitXZ({0.0, kPi / 2}),
                      PartyMeasurements::qubitXZ({b + 0.2, -b - 0.2})}};
    CHECK_FALSE(verifyCertificate(bad, mism, 1e-8).pass);
}

TEST_CASE("verifyCertificate accepts the singlet certificate") {
    double b = 0.7;
    auto cert = sosExpand(singletSquares());
    cert.bindings = {{"b", b}, {"lam", std::tan(b)}};
    KetState phiPlus;
    phiPlus.dims = {2, 2};
    phiPlus.amps = Vector::Zero(4);
    phiPlus.amps(0) = phiPlus.amps(3) = 1.0 / std::sqrt(2.0);
    Realization real{phiPlus,
                     {PartyMeasurements::qubitXZ({0.0, kPi / 2}),
                      PartyMeasurements::qubitXZ({b, -b})}};
    CHECK(verifyCertificate(cert, real, 1e-9).pass);
}

TEST_CASE("negative weights are rejected") {
    auto cert = sosExpand({{ScalarExpr(-1.0), A(1) - B(1)}});
    KetState phiPlus;
    phiPlus.dims = {2, 2};
    phiPlus.amps = Vector::Zero(4);
    phiPlus.amps(0) = phiPlus.amps(3) = 1.0 / std::sqrt(2.0);
    Realization real{phiPlus,
                     {PartyMeasurements::qubitXZ({0.0, kPi / 2}),
                      PartyMeasurements::qubitXZ({0.0, kPi / 2})}};
    auto rep = verifyCertificate(cert, real, 1e-9);
    CHECK_FALSE(rep.pass);
    bool sawWeight = false;
    for (const auto& c : rep.checks)
        if (c.name == "weights_nonnegative") sawWeight = !c.pass;
    CHECK(sawWeight);
}

TEST_CASE("certificate JSON round trip") {
    double b = 0.7;
    auto cert = sosExpand(singletSquares());
    cert.bindings = {{"b", b}, {"lam", std::tan(b)}};
    auto back = SOSCertificate::fromJson(cert.toJson());
    CHECK(back.scen == cert.scen);
    CHECK(back.squares.size() == cert.squares.size());
    CHECK(back.singleSquare == cert.singleSquare);
    CHECK(back.bindings == cert.bindings);
    Assignment asg = cert.bindings;
    CHECK(back.C.eval(asg).real() == doctest::Approx(cert.C.eval(asg).real()).epsilon(1e-12));
    CHECK(norm2(gammaResiduals(back, asg)) == doctest::Approx(norm2(gammaResiduals(cert, asg))));
    auto e1 = bellExpressionFromPolynomial(cert.S, asg);
    auto e2 = bellExpressionFromPolynomial(back.S, asg);
    CHECK(e1.correlatorView() == e2.correlatorView());
}

TEST_CASE("solveGamma reports failure when gamma cannot vanish") {
    // (A1 A2 - 1)^2 leaves an irreducible same-party remainder
    auto cert = sosExpand({{ScalarExpr(1.0), A(1) * A(2) - FormalPolynomial::one(kQubit)}});
    auto res = solveGamma(cert, {}, {}, {});
    CHECK_FALSE(res.converged);
    CHECK(res.residualNorm > 1e-3);
}
