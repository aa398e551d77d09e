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

#include "bellforge/selftest.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"

using namespace bellforge;

namespace {
constexpr double kPi = std::numbers::pi;

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Matrix randomUnitary(int d, std::mt19937& rng) {
    std::normal_distribution<double> g;
    Matrix m(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = Complex(g(rng), g(rng));
    Eigen::HouseholderQR<Matrix> qr(m);
    return Matrix(qr.householderQ());
}

Realization rotateLocal(const Realization& real, const std::vector<Matrix>& us) {
    Realization out;
    out.state.dims = real.state.dims;
    Matrix big = Matrix::Identity(1, 1);
    for (const Matrix& u : us) big = kron(big, u);
    out.state.amps = big * real.state.amps;
    for (size_t k = 0; k < real.measurements.size(); ++k) {
        const auto& pm = real.measurements[k];
        std::vector<std::vector<Matrix>> projs;
        for (int x = 1; x <= pm.settings(); ++x) {
            std::vector<Matrix> row;
            for (int a = 0; a < pm.outcomes(); ++a)
                row.push_back(us[k] * pm.projector(x, a) * us[k].adjoint());
            projs.push_back(row);
        }
        out.measurements.push_back(PartyMeasurements::explicitOps(projs));
    }
    return out;
}

/// Embeds a two-qubit realization into C^3 (x) C^3; the spare level is folded
/// into outcome 0 so the projectors stay complete.
Realization padToQutrits(const Realization& real) {
    Realization out;
    out.state.dims.assign(2, 3);
    out.state.amps = Vector::Zero(9);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) out.state.amps[3 * i + j] = real.state.amps[2 * i + j];
    for (const auto& pm : real.measurements) {
        std::vector<std::vector<Matrix>> projs;
        for (int x = 1; x <= pm.settings(); ++x) {
            Matrix p0 = Matrix::Zero(3, 3), p1 = Matrix::Zero(3, 3);
            p0.topLeftCorner(2, 2) = pm.projector(x, 0);
            p1.topLeftCorner(2, 2) = pm.projector(x, 1);
            p0(2, 2) = 1.0;
            projs.push_back({p0, p1});
        }
        out.measurements.push_back(PartyMeasurements::explicitOps(projs));
    }
    return out;
}

double minWeight(const SOSCertificate& cert) {
    double w = std::numeric_limits<double>::infinity();
    for (const auto& [weight, poly] : cert.squares)
        w = std::min(w, weight.eval(cert.bindings).real());
    return w;
}
}  // namespace

TEST_CASE("ideal GHZ(3, pi/6) passes relations and extracts with fidelity 1") {
    FamilyInstance inst =
        build(FamilyKind::Ghz, {{"n", 3.0}, {"theta", kPi / 6.0}, {"b", 0.4}});
    RelationReport rep = relationResiduals(inst.ideal, inst, 1e-8);
    CHECK(rep.pass);
    CHECK(rep.maxResidual() <= 1e-10);
    SwapResult swap = swapFidelity(inst.ideal, inst, KetState::ghz(3, kPi / 6.0));
    CHECK(swap.fidelity == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(swap.junkNorm > 0.1);

    KetState target = extractionTarget(inst);
    CHECK(target.amps[0].real() == doctest::Approx(std::cos(kPi / 6.0)).epsilon(1e-12));
    CHECK(target.amps[7].real() == doctest::Approx(std::sin(kPi / 6.0)).epsilon(1e-12));
}

TEST_CASE("ideal partialTwoParam(pi/8, -pi/6, pi/6) extracts phi_theta") {
    FamilyInstance inst = build(FamilyKind::PartialTwoParam,
                                {{"theta", kPi / 8.0}, {"b1", -kPi / 6.0}, {"b2", kPi / 6.0}});
    RelationReport rep = relationResiduals(inst.ideal, inst);
    CHECK(rep.pass);
    CHECK(rep.maxResidual() <= 1e-10);
    SwapResult swap = swapFidelity(inst.ideal, inst, KetState::ghz(2, kPi / 8.0));
    CHECK(swap.fidelity == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("ideal singletAllSettings relations include the Bob anticommutator") {
    FamilyInstance inst =
        build(FamilyKind::SingletAllSettings, {{"a2", 1.2}, {"b1", 0.5}, {"b2", 2.1}});
    RelationReport rep = relationResiduals(inst.ideal, inst);
    CHECK(rep.pass);
    CHECK(rep.maxResidual() <= 1e-10);
    CHECK(rep.residuals.count("anticomm_M1B_M2B") == 1);
    CHECK(rep.residuals.at("anticomm_M1B_M2B") <= 1e-10);
    SwapResult swap = swapFidelity(inst.ideal, inst, KetState::ghz(2, kPi / 4.0));
    CHECK(swap.fidelity == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("|00> under partialTheta: Z relation exact, X relation broken") {
    FamilyInstance inst = build(FamilyKind::PartialTheta, {{"theta", kPi / 8.0}, {"b", 0.3}});
    Realization real = inst.ideal;
    real.state.amps = Vector::Zero(4);
    real.state.amps[0] = 1.0;
    RelationReport rep = relationResiduals(real, inst);
    CHECK(rep.residuals.at("nullifier_Z_1") <= 1e-12);
    CHECK(rep.residuals.at("nullifier_X") > 0.1);
    CHECK(!rep.pass);
    CHECK_THROWS_AS(swapFidelity(real, inst, KetState::ghz(2, kPi / 8.0)), SelfTestError);
}

TEST_CASE("|++> under singletAllSettings breaks the Z relation") {
    FamilyInstance inst =
        build(FamilyKind::SingletAllSettings, {{"a2", 1.2}, {"b1", 0.5}, {"b2", 2.1}});
    Realization real = inst.ideal;
    real.state.amps = Vector::Constant(4, Complex(0.5));
    RelationReport rep = relationResiduals(real, inst);
    CHECK(rep.residuals.at("nullifier_0") > 0.1);
    CHECK(!rep.pass);
}

TEST_CASE("padding into qutrits leaves residuals and fidelity unchanged") {
    FamilyInstance inst = build(FamilyKind::PartialTheta, {{"theta", kPi / 8.0}, {"b", 0.3}});
    Realization padded = padToQutrits(inst.ideal);
    RelationReport rep = relationResiduals(padded, inst);
    CHECK(rep.pass);
    CHECK(rep.maxResidual() <= 1e-10);
    SwapResult swap = swapFidelity(padded, inst, KetState::ghz(2, kPi / 8.0));
    CHECK(swap.fidelity == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("fidelity is invariant under local unitaries") {
    std::mt19937 rng(1234);
    FamilyInstance inst =
        build(FamilyKind::Ghz, {{"n", 3.0}, {"theta", kPi / 6.0}, {"b", 0.35}});
    SwapResult base = swapFidelity(inst.ideal, inst, KetState::ghz(3, kPi / 6.0));
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<Matrix> us;
        for (int k = 0; k < 3; ++k) us.push_back(randomUnitary(2, rng));
        Realization rotated = rotateLocal(inst.ideal, us);
        RelationReport rep = relationResiduals(rotated, inst);
        CHECK(rep.maxResidual() <= 1e-9);
        SwapResult swap = swapFidelity(rotated, inst, KetState::ghz(3, kPi / 6.0));
        CHECK(std::abs(swap.fidelity - base.fidelity) <= 1e-9);
    }
}

TEST_CASE("ideal grid: residuals below 1e-10 and fidelity above 1 - 1e-9") {
    for (double theta : {kPi / 16.0, kPi / 8.0, kPi / 6.0, kPi / 4.0}) {
        for (int n : {2, 3, 4}) {
            double b = 0.7 * std::min(2.0 * theta, kPi / 2.0);
            FamilyInstance inst =
                build(FamilyKind::Ghz, {{"n", double(n)}, {"theta", theta}, {"b", b}});
            RelationReport rep = relationResiduals(inst.ideal, inst);
            CHECK(rep.maxResidual() <= 1e-10);
            SwapResult swap = swapFidelity(inst.ideal, inst, KetState::ghz(n, theta));
            CHECK(swap.fidelity >= 1.0 - 1e-9);
        }
        if (theta < kPi / 4.0 - 1e-12) {
            FamilyInstance two =
                build(FamilyKind::PartialTwoParam,
                      {{"theta", theta}, {"b1", -1.2 * theta}, {"b2", 0.9 * theta}});
            RelationReport rep = relationResiduals(two.ideal, two);
            CHECK(rep.maxResidual() <= 1e-10);
            SwapResult swap = swapFidelity(two.ideal, two, KetState::ghz(2, theta));
            CHECK(swap.fidelity >= 1.0 - 1e-9);
        }
    }
}

TEST_CASE("near-maximal value bounds the nullifier residuals by sqrt(eps/w_min)") {
    std::mt19937 rng(99);
    std::normal_distribution<double> g;
    for (auto kind : {FamilyKind::PartialTheta, FamilyKind::SingletAllSettings}) {
        FamilyInstance inst =
            kind == FamilyKind::PartialTheta
                ? build(kind, {{"theta", kPi / 8.0}, {"b", 0.3}})
                : build(kind, {{"a2", 1.2}, {"b1", 0.5}, {"b2", 2.1}});
        double wmin = minWeight(*inst.certificate);
        for (int trial = 0; trial < 10; ++trial) {
            Realization real = inst.ideal;
            Vector noise(real.state.amps.size());
            for (int i = 0; i < noise.size(); ++i) noise[i] = Complex(g(rng), g(rng));
            real.state.amps += 0.01 * noise;
            real.state.amps.normalize();
            double eps = inst.C - bellValue(inst.expr, behavior(real));
            REQUIRE(eps >= -1e-9);
            RelationReport rep = relationResiduals(real, inst);
            CHECK(rep.maxNullifierResidual() <=
                  std::sqrt(std::max(eps, 0.0) / wmin) + 1e-6);
        }
    }
}

TEST_CASE("limit points carry the single-square warning") {
    const double theta = kPi / 8.0;
    FamilyInstance inst =
        build(FamilyKind::PartialTheta, {{"theta", theta}, {"b", 2.0 * theta}});
    REQUIRE(inst.singleSquare);
    RelationReport rep = relationResiduals(inst.ideal, inst);
    CHECK(!rep.notes.empty());
    SwapResult swap = swapFidelity(inst.ideal, inst, KetState::ghz(2, theta));
    CHECK(!swap.notes.empty());
    CHECK(swap.fidelity == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("unsupported kinds and mismatched shapes are rejected") {
    FamilyInstance chsh = build(FamilyKind::ChshC, {{"c", 0.5}});
    CHECK_THROWS_AS(relationResiduals(chsh.ideal, chsh), std::invalid_argument);
    CHECK_THROWS_AS(extractionTarget(chsh), std::invalid_argument);

    FamilyInstance ghz3 = build(FamilyKind::Ghz, {{"n", 3.0}, {"theta", 0.4}, {"b", 0.3}});
    FamilyInstance ghz2 = build(FamilyKind::Ghz, {{"n", 2.0}, {"theta", 0.4}, {"b", 0.3}});
    CHECK_THROWS_AS(relationResiduals(ghz2.ideal, ghz3), DimensionMismatch);
    CHECK_THROWS_AS(swapFidelity(ghz3.ideal, ghz3, KetState::ghz(2, 0.4)), DimensionMismatch);
}

TEST_CASE("reports serialize to JSON") {
    FamilyInstance inst = build(FamilyKind::PartialTheta, {{"theta", kPi / 8.0}, {"b", 0.3}});
    RelationReport rep = relationResiduals(inst.ideal, inst);
    std::string j = rep.toJson();
    CHECK(j.find("\"residuals\"") != std::string::npos);
    CHECK(j.find("nullifier_X") != std::string::npos);
    SwapResult swap = swapFidelity(inst.ideal, inst, KetState::ghz(2, kPi / 8.0));
    std::string sj = swap.toJson();
    CHECK(sj.find("\"fidelity\"") != std::string::npos);
    CHECK(sj.find("\"junk_norm\"") != std::string::npos);
}
