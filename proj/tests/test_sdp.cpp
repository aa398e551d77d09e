#include <random>

#include "bellforge/sdp.hpp"
#include "doctest.h"

using namespace bellforge;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd randomSym(int n, std::mt19937& rng) {
    std::normal_distribution<double> g;
    MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = g(rng);
    return (m + m.transpose()) / 2.0;
}

}  // namespace

TEST_CASE("scalar LMI: max x subject to x <= 3") {
    LmiProblem p;
    p.F0 = {MatrixXd::Zero(1, 1), 3.0 * MatrixXd::Identity(1, 1)};
    p.F = {{MatrixXd::Identity(1, 1), -MatrixXd::Identity(1, 1)}};
    p.c = VectorXd::Ones(1);
    auto r = lmiSolve(p);
    REQUIRE(r.status == SdpStatus::Optimal);
    CHECK(r.value == doctest::Approx(3.0).epsilon(1e-7));
}

TEST_CASE("max tr(CX) with tr(X)=1 equals the top eigenvalue") {
    std::mt19937 rng(31);
    for (int trial = 0; trial < 5; ++trial) {
        MatrixXd C = randomSym(5, rng);
        SdpProblem p;
        p.C = {-C};  // engine minimizes
        p.A = {{MatrixXd::Identity(5, 5)}};
        p.b = VectorXd::Ones(1);
        auto r = sdpSolve(p);
        REQUIRE(r.status == SdpStatus::Optimal);
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(C, Eigen::EigenvaluesOnly);
        CHECK(-r.primalValue == doctest::Approx(es.eigenvalues()(4)).epsilon(1e-7));
        // primal solution is PSD and feasible
        Eigen::SelfAdjointEigenSolver<MatrixXd> ex(r.X[0], Eigen::EigenvaluesOnly);
        CHECK(ex.eigenvalues()(0) > -1e-9);
        CHECK(r.X[0].trace() == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("duality gap below tolerance at optimum") {
    std::mt19937 rng(37);
    MatrixXd C = randomSym(6, rng);
    SdpProblem p;
    p.C = {C};
    p.A = {{MatrixXd::Identity(6, 6)}, {randomSym(6, rng)}};
    p.b = VectorXd::Zero(2);
    p.b(0) = 1.0;
    p.b(1) = 0.1;
    auto r = sdpSolve(p);
    REQUIRE(r.status == SdpStatus::Optimal);
    CHECK(std::abs(r.primalValue - r.dualValue) < 1e-6);
}

TEST_CASE("block problems and determinism") {
    LmiProblem p;
    p.F0 = {MatrixXd::Identity(2, 2), 2.0 * MatrixXd::Identity(3, 3)};
    MatrixXd f1(2, 2), f2(3, 3);
    f1 << 1, 0.3, 0.3, -1;
    f2 << -0.5, 0.1, 0, 0.1, -0.2, 0, 0, 0, -1;
    p.F = {{f1, f2}};
    p.c = VectorXd::Ones(1);
    auto r1 = lmiSolve(p);
    auto r2 = lmiSolve(p);
    REQUIRE(r1.status == SdpStatus::Optimal);
    CHECK(r1.value == r2.value);  // bitwise reproducible
    CHECK(r1.iterations == r2.iterations);
    // slack stays PSD
    for (const auto& blk : r1.slack) {
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(blk, Eigen::EigenvaluesOnly);
        CHECK(es.eigenvalues()(0) > -1e-9);
    }
}

TEST_CASE("tight tolerance solve") {
    // squeeze the gap to 1e-10 on a small well-conditioned problem
    LmiProblem p;
    p.F0 = {MatrixXd::Zero(1, 1), 3.0 * MatrixXd::Identity(1, 1)};
    p.F = {{MatrixXd::Identity(1, 1), -MatrixXd::Identity(1, 1)}};
    p.c = VectorXd::Ones(1);
    p.gapTol = 1e-10;
    auto r = lmiSolve(p);
    REQUIRE(r.status == SdpStatus::Optimal);
    CHECK(r.value == doctest::Approx(3.0).epsilon(1e-9));
}
