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

#include "bellforge/variational.hpp"

#include <cmath>
#include <numbers>

#include "json.hpp"

namespace bellforge {

namespace {

constexpr double kStationaryTol = 1e-6;
constexpr double kGapTol = 1e-8;
constexpr double kEigenvectorTol = 1e-8;

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

/// d^order/d delta^order of the projector under the module's perturbation.
Matrix projectorDeriv(const PartyMeasurements& pm, int setting, int outcome, int order) {
    switch (pm.kind) {
        case PartyMeasurements::Kind::QubitXZ: {
            double a = pm.angles[setting - 1];
            double sgn = outcome == 0 ? 1.0 : -1.0;
            Matrix m(2, 2);
            if (order == 1)
                m << -std::sin(a), std::cos(a), std::cos(a), std::sin(a);
            else
                m << -std::cos(a), -std::sin(a), -std::sin(a), std::cos(a);
            return (sgn / 2.0) * m;
        }
        case PartyMeasurements::Kind::QutritFourierPhase: {
            const double c = 2.0 * std::numbers::pi / 3.0;
            Matrix K = Matrix::Zero(3, 3);
            K(1, 1) = 1.0;
            K(2, 2) = 2.0;
            Matrix pi = pm.projector(setting, outcome);
            Matrix comm = K * pi - pi * K;
            if (order == 1) return Complex(0.0, c) * comm;
            return -c * c * (K * comm - comm * K);
        }
        case PartyMeasurements::Kind::Explicit:
            throw UnsupportedPerturbation("explicit measurements have no canonical tangent");
    }
    throw UnsupportedPerturbation("unknown measurement kind");
}

struct Slot {
    int party;
    int setting;
    int order;
};

/// Bell operator with derivative projectors inserted at the listed
/// (party, setting) slots; terms not containing a perturbed measurement
/// drop out.
Matrix slotDerivative(const BellExpression& expr, const Measurements& meas,
                      const std::vector<Slot>& slots) {
    const int n = static_cast<int>(meas.size());
    int total = 1;
    for (const auto& pm : meas) total *= pm.dim();
    Matrix out = Matrix::Zero(total, total);
    for (const auto& [key, coeff] : expr.coefficients()) {
        Matrix term = Matrix::Identity(1, 1);
        bool dead = false;
        for (int p = 1; p <= n && !dead; ++p) {
            int s = key.settings[p - 1];
            int deriv = 0;
            for (const auto& slot : slots)
                if (slot.party == p) {
                    if (slot.setting == s)
                        deriv += slot.order;
                    else
                        dead = true;
                }
            if (dead) break;
            Matrix f;
            if (s == 0)
                f = Matrix::Identity(meas[p - 1].dim(), meas[p - 1].dim());
            else if (deriv == 0)
                f = meas[p - 1].projector(s, key.outcomes[p - 1]);
            else
                f = projectorDeriv(meas[p - 1], s, key.outcomes[p - 1], deriv);
            term = kron(term, f);
        }
        if (!dead) out += coeff * term;
    }
    return out;
}

/// dS/d delta for one direction (sum over its weighted setting components).
Matrix firstDerivative(const BellExpression& expr, const Measurements& meas,
                       const PerturbationDirection& dir) {
    int total = 1;
    for (const auto& pm : meas) total *= pm.dim();
    Matrix out = Matrix::Zero(total, total);
    for (const auto& [s, w] : dir.components)
        out += w * slotDerivative(expr, meas, {{dir.party, s, 1}});
    return out;
}

/// d^2 S / (d delta_i d delta_j); i == j is allowed.
Matrix secondDerivative(const BellExpression& expr, const Measurements& meas,
                        const PerturbationDirection& di, const PerturbationDirection& dj) {
    int total = 1;
    for (const auto& pm : meas) total *= pm.dim();
    Matrix out = Matrix::Zero(total, total);
    for (const auto& [si, wi] : di.components)
        for (const auto& [sj, wj] : dj.components) {
            if (di.party == dj.party && si != sj) continue;  // no term holds both
            std::vector<Slot> slots;
            if (di.party == dj.party && si == sj)
                slots = {{di.party, si, 2}};
            else
                slots = {{di.party, si, 1}, {dj.party, sj, 1}};
            out += wi * wj * slotDerivative(expr, meas, slots);
        }
    return out;
}

struct Spectrum {
    Matrix op;
    Eigen::VectorXd eigenvalues;  // ascending
    Matrix eigenvectors;
    double stateEigenvalue;
};

Spectrum analyze(const BellExpression& expr, const Realization& real) {
    Matrix S = bellOperator(expr, real.measurements);
    const Vector& psi = real.state.amps;
    if (psi.size() != S.rows()) throw DimensionMismatch("state does not match the Bell operator");
    Complex lam = psi.dot(S * psi);
    double scale = std::max(1.0, S.norm());
    if ((S * psi - lam * psi).norm() > kEigenvectorTol * scale)
        throw NonEigenvector("state is not an eigenvector of the Bell operator");
    Eigen::SelfAdjointEigenSolver<Matrix> es(S);
    return {std::move(S), es.eigenvalues(), es.eigenvectors(), lam.real()};
}

}  // namespace

std::vector<PerturbationDirection> defaultDirections(const Measurements& meas) {
    std::vector<PerturbationDirection> dirs;
    for (int p = 1; p <= static_cast<int>(meas.size()); ++p)
        for (int s = 2; s <= meas[p - 1].settings(); ++s) dirs.push_back({p, s});
    return dirs;
}

Measurements perturbedMeasurements(const Measurements& meas,
                                   const std::vector<PerturbationDirection>& dirs,
                                   const Eigen::VectorXd& deltas) {
    if (deltas.size() != static_cast<Eigen::Index>(dirs.size()))
        throw std::invalid_argument("perturbedMeasurements: size mismatch");
    Measurements out = meas;
    for (size_t i = 0; i < dirs.size(); ++i) {
        auto& pm = out[dirs[i].party - 1];
        if (pm.kind == PartyMeasurements::Kind::Explicit)
            throw UnsupportedPerturbation("explicit measurements have no canonical tangent");
        for (const auto& [s, w] : dirs[i].components) pm.angles.at(s - 1) += w * deltas(i);
    }
    return out;
}

Eigen::VectorXd firstOrderResiduals(const BellExpression& expr, const Realization& real,
                                    const std::vector<PerturbationDirection>& dirs) {
    analyze(expr, real);  // eigenvector precondition
    const Vector& psi = real.state.amps;
    Eigen::VectorXd out(dirs.size());
    for (size_t i = 0; i < dirs.size(); ++i)
        out(i) = psi.dot(firstDerivative(expr, real.measurements, dirs[i]) * psi).real();
    return out;
}

std::string to_string(HessianVerdict v) {
    switch (v) {
        case HessianVerdict::LocalMax:
            return "localMax";
        case HessianVerdict::Saddle:
            return "saddle";
        case HessianVerdict::Degenerate:
            return "degenerate";
    }
    return "?";
}

HessianReport hessian(const BellExpression& expr, const Realization& real,
                      const std::vector<PerturbationDirection>& dirs) {
    Eigen::VectorXd res = firstOrderResiduals(expr, real, dirs);
    if (res.norm() > kStationaryTol) throw NonStationary("first-order residuals do not vanish");

    Spectrum sp = analyze(expr, real);
    const int dim = static_cast<int>(sp.eigenvalues.size());
    double lamMax = sp.eigenvalues(dim - 1);
    if (std::abs(sp.stateEigenvalue - lamMax) > kEigenvectorTol * std::max(1.0, std::abs(lamMax)))
        throw NonEigenvector("state eigenvalue is not the top eigenvalue");

    HessianReport rep;
    rep.gap = dim > 1 ? lamMax - sp.eigenvalues(dim - 2) : 1.0;
    if (rep.gap < kGapTol * std::max(1.0, std::abs(lamMax))) {
        rep.verdict = HessianVerdict::Degenerate;
        return rep;
    }

    const int nd = static_cast<int>(dirs.size());
    const Vector& psi = real.state.amps;
    std::vector<Matrix> D(nd);
    for (int i = 0; i < nd; ++i) D[i] = firstDerivative(expr, real.measurements, dirs[i]);

    rep.mu.resize(nd, nd);
    rep.nu.resize(nd, nd);
    for (int i = 0; i < nd; ++i)
        for (int j = i; j < nd; ++j) {
            Matrix dij = secondDerivative(expr, real.measurements, dirs[i], dirs[j]);
            rep.mu(i, j) = rep.mu(j, i) = psi.dot(dij * psi).real();

            double nu = 0.0;
            for (int l = 0; l < dim - 1; ++l) {
                Vector phi = sp.eigenvectors.col(l);
                Complex di = psi.dot(D[i] * phi);
                Complex dj = phi.dot(D[j] * psi);
                nu += 2.0 * (di * dj).real() / (lamMax - sp.eigenvalues(l));
            }
            rep.nu(i, j) = rep.nu(j, i) = nu;
        }
    rep.gamma = rep.mu + rep.nu;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rep.gamma, Eigen::EigenvaluesOnly);
    rep.eigenvalues = es.eigenvalues();
    rep.verdict = rep.eigenvalues(nd - 1) <= kGapTol ? HessianVerdict::LocalMax
                                                     : HessianVerdict::Saddle;
    return rep;
}

LocalMaxReport checkLocalMax(const BellExpression& expr, const Realization& real,
                             const std::vector<PerturbationDirection>& dirs) {
    LocalMaxReport out;
    Eigen::VectorXd res = firstOrderResiduals(expr, real, dirs);
    out.residualNorm = res.norm();
    out.stationary = out.residualNorm <= kStationaryTol;
    if (!out.stationary) {
        out.verdict = HessianVerdict::Saddle;
        out.gap = 0.0;
        return out;
    }
    out.hess = hessian(expr, real, dirs);
    out.verdict = out.hess.verdict;
    out.gap = out.hess.gap;
    return out;
}

std::string HessianReport::toJson() const {
    nlohmann::json j;
    auto mat = [](const Eigen::MatrixXd& m) {
        nlohmann::json rows = nlohmann::json::array();
        for (int i = 0; i < m.rows(); ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (int k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
            rows.push_back(row);
        }
        return rows;
    };
    j["gamma"] = mat(gamma);
    j["mu"] = mat(mu);
    j["nu"] = mat(nu);
    j["eigenvalues"] = std::vector<double>(eigenvalues.data(), eigenvalues.data() + eigenvalues.size());
    j["verdict"] = to_string(verdict);
    j["gap"] = gap;
    return j.dump(2);
}

}  // namespace bellforge
