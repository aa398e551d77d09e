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

#include "bellforge/sdp.hpp"

#include <cmath>

namespace bellforge {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double blockDot(const BlockMatrix& a, const BlockMatrix& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += (a[i].array() * b[i].array()).sum();
    return s;
}

double blockNorm(const BlockMatrix& a) { return std::sqrt(blockDot(a, a)); }

BlockMatrix blockZeroLike(const BlockMatrix& a) {
    BlockMatrix out;
    out.reserve(a.size());
    for (const auto& m : a) out.push_back(MatrixXd::Zero(m.rows(), m.cols()));
    return out;
}

void blockAxpy(double alpha, const BlockMatrix& x, BlockMatrix& y) {
    for (size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

// largest alpha in (0, cap] with S + alpha*dS >= 0, via the generalized
// eigenvalue bound on L^{-1} dS L^{-T}
double maxStep(const BlockMatrix& S, const BlockMatrix& dS, double cap) {
    double alpha = cap;
    for (size_t i = 0; i < S.size(); ++i) {
        Eigen::LLT<MatrixXd> llt(S[i]);
        if (llt.info() != Eigen::Success) return 0.0;
        MatrixXd L = llt.matrixL();
        MatrixXd T = L.triangularView<Eigen::Lower>().solve(dS[i]);
        T = L.triangularView<Eigen::Lower>().solve(T.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<MatrixXd> es((T + T.transpose()) / 2.0,
                                                   Eigen::EigenvaluesOnly);
        double lmin = es.eigenvalues()(0);
        if (lmin < -1e-14) alpha = std::min(alpha, -1.0 / lmin);
    }
    return alpha;
}

}  // namespace

std::string to_string(SdpStatus s) {
    switch (s) {
        case SdpStatus::Optimal:
            return "optimal";
        case SdpStatus::MaxIterations:
            return "max_iterations";
        case SdpStatus::NumericalFailure:
            return "numerical_failure";
    }
    return "unknown";
}

SdpResult sdpSolve(const SdpProblem& prob) {
    const size_t nb = prob.C.size();
    const int m = static_cast<int>(prob.A.size());
    int n = 0;
    for (const auto& blk : prob.C) n += static_cast<int>(blk.rows());

    SdpResult res;
    res.y = VectorXd::Zero(m);

    // deterministic starting point scaled to the data
    double dataScale = blockNorm(prob.C);
    for (const auto& a : prob.A) dataScale = std::max(dataScale, blockNorm(a));
    double bScale = m ? prob.b.cwiseAbs().maxCoeff() : 0.0;
    double eta = std::max({10.0, std::sqrt(static_cast<double>(n)) * dataScale, bScale});
    res.X = blockZeroLike(prob.C);
    res.Z = blockZeroLike(prob.C);
    for (size_t i = 0; i < nb; ++i) {
        res.X[i] = eta * MatrixXd::Identity(prob.C[i].rows(), prob.C[i].cols());
        res.Z[i] = eta * MatrixXd::Identity(prob.C[i].rows(), prob.C[i].cols());
    }

    BlockMatrix Zinv = blockZeroLike(prob.C);
    std::vector<BlockMatrix> W(m);  // W_j = X A_j Zinv
    MatrixXd M(m, m);
    VectorXd aZinv(m), rp(m);

    for (res.iterations = 0; res.iterations < prob.maxIterations; ++res.iterations) {
        // residuals
        for (int i = 0; i < m; ++i) rp(i) = prob.b(i) - blockDot(prob.A[i], res.X);
        BlockMatrix Rd = prob.C;
        for (size_t k = 0; k < nb; ++k) Rd[k] -= res.Z[k];
        for (int i = 0; i < m; ++i) blockAxpy(-res.y(i), prob.A[i], Rd);

        double gap = blockDot(res.X, res.Z);
        double mu = gap / n;
        double pObj = blockDot(prob.C, res.X);
        double dObj = m ? prob.b.dot(res.y) : 0.0;
        double scale = 1.0 + std::abs(pObj) + std::abs(dObj);
        res.primalValue = pObj;
        res.dualValue = dObj;
        if (gap / scale < prob.gapTol && (m == 0 || rp.norm() / scale < prob.gapTol) &&
            blockNorm(Rd) / scale < prob.gapTol) {
            res.status = SdpStatus::Optimal;
            return res;
        }

        // factor Z and form Zinv
        bool ok = true;
        for (size_t k = 0; k < nb; ++k) {
            Eigen::LLT<MatrixXd> llt(res.Z[k]);
            if (llt.info() != Eigen::Success) {
                ok = false;
                break;
            }
            Zinv[k] = llt.solve(MatrixXd::Identity(res.Z[k].rows(), res.Z[k].cols()));
        }
        if (!ok) {
            res.status = SdpStatus::NumericalFailure;
            return res;
        }

        // Schur complement M_ij = tr(A_i X A_j Z^{-1})
        for (int j = 0; j < m; ++j) {
            W[j] = blockZeroLike(prob.C);
            for (size_t k = 0; k < nb; ++k) W[j][k] = res.X[k] * prob.A[j][k] * Zinv[k];
        }
        for (int i = 0; i < m; ++i) {
            aZinv(i) = blockDot(prob.A[i], Zinv);
            for (int j = 0; j <= i; ++j) {
                double v = 0.0;
                for (size_t k = 0; k < nb; ++k)
                    v += (prob.A[i][k].array() * W[j][k].transpose().array()).sum();
                M(i, j) = v;
                M(j, i) = v;
            }
        }
        Eigen::LDLT<MatrixXd> mldlt(M + 1e-13 * std::max(1.0, M.norm()) *
                                            MatrixXd::Identity(m, m));

        VectorXd g(m);
        auto solveDirection = [&](double sigmu, const BlockMatrix* corr, VectorXd& dy,
                                  BlockMatrix& dX, BlockMatrix& dZ) {
            for (int i = 0; i < m; ++i) {
                double v = 0.0;
                for (size_t k = 0; k < nb; ++k) {
                    MatrixXd t = res.X[k] * Rd[k] * Zinv[k];
                    if (corr) t += (*corr)[k] * Zinv[k];
                    v += (prob.A[i][k].array() * t.transpose().array()).sum();
                }
                g(i) = prob.b(i) - sigmu * aZinv(i) + v;
            }
            dy = m ? VectorXd(mldlt.solve(g)) : VectorXd();
            dZ = Rd;
            for (int i = 0; i < m; ++i) blockAxpy(-dy(i), prob.A[i], dZ);
            dX = blockZeroLike(prob.C);
            for (size_t k = 0; k < nb; ++k) {
                MatrixXd t = res.X[k] * dZ[k];
                if (corr) t += (*corr)[k];
                MatrixXd raw = sigmu * Zinv[k] - res.X[k] - t * Zinv[k];
                dX[k] = (raw + raw.transpose()) / 2.0;
            }
        };

        // predictor (affine scaling)
        VectorXd dyA;
        BlockMatrix dXA, dZA;
        solveDirection(0.0, nullptr, dyA, dXA, dZA);
        double apA = maxStep(res.X, dXA, 1.0);
        double adA = maxStep(res.Z, dZA, 1.0);
        BlockMatrix Xa = res.X, Za = res.Z;
        blockAxpy(apA, dXA, Xa);
        blockAxpy(adA, dZA, Za);
        double gapA = blockDot(Xa, Za);
        double sigma = std::pow(std::max(gapA, 0.0) / gap, 3.0);
        sigma = std::min(1.0, std::max(sigma, 1e-10));

        // corrector
        BlockMatrix corr = blockZeroLike(prob.C);
        for (size_t k = 0; k < nb; ++k) corr[k] = dXA[k] * dZA[k];
        VectorXd dy;
        BlockMatrix dX, dZ;
        solveDirection(sigma * mu, &corr, dy, dX, dZ);

        double tau = mu < 1e-5 ? 0.99 : 0.95;
        double ap = tau * maxStep(res.X, dX, 1.0 / tau);
        double ad = tau * maxStep(res.Z, dZ, 1.0 / tau);
        ap = std::min(ap, 1.0);
        ad = std::min(ad, 1.0);
        if (ap < 1e-10 && ad < 1e-10) {
            res.status = SdpStatus::NumericalFailure;
            return res;
        }

        blockAxpy(ap, dX, res.X);
        if (m) res.y += ad * dy;
        blockAxpy(ad, dZ, res.Z);
    }
    res.status = SdpStatus::MaxIterations;
    return res;
}

LmiResult lmiSolve(const LmiProblem& prob) {
    SdpProblem sp;
    sp.C = prob.F0;
    sp.b = prob.c;
    sp.gapTol = prob.gapTol;
    sp.maxIterations = prob.maxIterations;
    for (const auto& Fk : prob.F) {
        BlockMatrix a;
        a.reserve(Fk.size());
        for (const auto& blk : Fk) a.push_back(-blk);
        sp.A.push_back(std::move(a));
    }
    SdpResult r = sdpSolve(sp);
    LmiResult out;
    out.status = r.status;
    out.value = r.dualValue;
    out.y = r.y;
    out.iterations = r.iterations;
    out.slack = prob.F0;
    for (size_t k = 0; k < prob.F.size(); ++k) blockAxpy(r.y(k), prob.F[k], out.slack);
    return out;
}

}  // namespace bellforge
