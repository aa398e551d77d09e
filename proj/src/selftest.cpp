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

#include "json.hpp"

namespace bellforge {

namespace {

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Matrix embed(const Measurements& meas, size_t party, const Matrix& local) {
    Matrix out = Matrix::Identity(1, 1);
    for (size_t k = 0; k < meas.size(); ++k) {
        int d = meas[k].dim();
        out = kron(out, k == party ? local : Matrix(Matrix::Identity(d, d)));
    }
    return out;
}

Matrix anticomm(const Matrix& a, const Matrix& b) { return a * b + b * a; }

double param(const FamilyInstance& fam, const std::string& key) {
    auto it = fam.canonical.find(key);
    if (it == fam.canonical.end())
        throw std::invalid_argument("family instance lacks parameter: " + key);
    return it->second;
}

Vector normalizedState(const Realization& real) {
    int full = 1;
    if (real.measurements.empty()) throw DimensionMismatch("realization has no parties");
    if (real.state.dims.size() != real.measurements.size())
        throw DimensionMismatch("party count mismatch between state and measurements");
    for (size_t k = 0; k < real.measurements.size(); ++k) {
        if (real.state.dims[k] != real.measurements[k].dim())
            throw DimensionMismatch("local dimension mismatch at party " + std::to_string(k));
        full *= real.state.dims[k];
    }
    if (real.state.amps.size() != full) throw DimensionMismatch("state vector length mismatch");
    double n = real.state.amps.norm();
    if (n < 1e-12) throw DimensionMismatch("state vector has vanishing norm");
    return real.state.amps / n;
}

void addResidual(RelationReport& rep, const std::string& name, const Matrix& op,
                 const Vector& psi) {
    rep.residuals[name] = (op * psi).norm();
}

/// Per-party control operators (Z, X) in the full space; the swap gate is
/// built from these pairs.
struct ControlOps {
    std::vector<std::pair<Matrix, Matrix>> zx;
};

ControlOps ghzRelations(RelationReport& rep, const Realization& real,
                        const FamilyInstance& fam, const Vector& psi) {
    size_t n = real.measurements.size();
    if (n != size_t(std::lround(param(fam, "n"))))
        throw DimensionMismatch("realization party count does not match the family's n");
    double theta = param(fam, "theta"), b = param(fam, "b");
    double cb = std::cos(b), sb = std::sin(b);
    double s2t = std::sin(2.0 * theta), c2t = std::cos(2.0 * theta);
    if (std::abs(cb) < 1e-12 || std::abs(sb) < 1e-12)
        throw std::invalid_argument("degenerate regularization angle b");

    int D = 1;
    for (size_t k = 0; k < n; ++k) D *= real.measurements[k].dim();
    Matrix id = Matrix::Identity(D, D);

    Matrix m1n = embed(real.measurements, n - 1, real.measurements[n - 1].observable(1));
    Matrix m2n = embed(real.measurements, n - 1, real.measurements[n - 1].observable(2));
    Matrix zn = (m1n + m2n) / (2.0 * cb);
    Matrix xn = (m1n - m2n) / (2.0 * sb);

    Matrix prodX = id;
    ControlOps ops;
    for (size_t i = 0; i + 1 < n; ++i) {
        Matrix zi = embed(real.measurements, i, real.measurements[i].observable(1));
        Matrix xi = embed(real.measurements, i, real.measurements[i].observable(2));
        addResidual(rep, "nullifier_Z_" + std::to_string(i + 1), zi - zn, psi);
        prodX = prodX * xi;
        ops.zx.emplace_back(zi, xi);
    }
    addResidual(rep, "nullifier_X", prodX - s2t * xn - c2t * prodX * zn, psi);

    addResidual(rep, "Zn_squared", zn * zn - id, psi);
    addResidual(rep, "Xn_squared", xn * xn - id, psi);
    addResidual(rep, "anticomm_Zn_Xn", anticomm(zn, xn), psi);
    addResidual(rep, "anticomm_M1n_M2n", anticomm(m1n, m2n) - 2.0 * std::cos(2.0 * b) * id, psi);
    Matrix pPlus = (id + zn) / 2.0, pMinus = (id - zn) / 2.0;
    addResidual(rep, "Xn_flip", xn * pMinus - pPlus * xn, psi);
    addResidual(rep, "swap_X_relation", xn - prodX * (id - c2t * zn) / s2t, psi);

    ops.zx.emplace_back(zn, xn);
    return ops;
}

/// Shared by singletAllSettings and partialTwoParam: Bob's regularized Pauli
/// pair from his two observables at angles (b1, b2).
void bobPaulis(const Realization& real, double b1, double b2, Matrix& zb, Matrix& xb,
               Matrix& m1b, Matrix& m2b) {
    double den = std::sin(b2 - b1);
    if (std::abs(den) < 1e-12) throw std::invalid_argument("degenerate Bob angles (b1 = b2)");
    m1b = embed(real.measurements, 1, real.measurements[1].observable(1));
    m2b = embed(real.measurements, 1, real.measurements[1].observable(2));
    zb = (std::sin(b2) * m1b - std::sin(b1) * m2b) / den;
    xb = (-std::cos(b2) * m1b + std::cos(b1) * m2b) / den;
}

ControlOps singletRelations(RelationReport& rep, const Realization& real,
                            const FamilyInstance& fam, const Vector& psi) {
    if (real.measurements.size() != 2) throw DimensionMismatch("expected a bipartite realization");
    double a2 = param(fam, "a2"), b1 = param(fam, "b1"), b2 = param(fam, "b2");
    double sa2 = std::sin(a2);
    if (std::abs(sa2) < 1e-12) throw std::invalid_argument("degenerate Alice angle a2");
    int D = real.measurements[0].dim() * real.measurements[1].dim();
    Matrix id = Matrix::Identity(D, D);

    Matrix za = embed(real.measurements, 0, real.measurements[0].observable(1));
    Matrix m2a = embed(real.measurements, 0, real.measurements[0].observable(2));
    Matrix xa = (m2a - std::cos(a2) * za) / sa2;
    Matrix zb, xb, m1b, m2b;
    bobPaulis(real, b1, b2, zb, xb, m1b, m2b);

    addResidual(rep, "nullifier_0", za - zb, psi);
    addResidual(rep, "nullifier_1", m2a - std::cos(a2) * zb - sa2 * xb, psi);

    addResidual(rep, "ZB_squared", zb * zb - id, psi);
    addResidual(rep, "XB_squared", xb * xb - id, psi);
    addResidual(rep, "anticomm_ZB_XB", anticomm(zb, xb), psi);
    addResidual(rep, "anticomm_ZA_XA", anticomm(za, xa), psi);
    addResidual(rep, "anticomm_M1B_M2B",
                anticomm(m1b, m2b) - 2.0 * std::cos(b1 - b2) * id, psi);
    addResidual(rep, "X_A_minus_X_B", xa - xb, psi);

    ControlOps ops;
    ops.zx.emplace_back(za, xa);
    ops.zx.emplace_back(zb, xb);
    return ops;
}

ControlOps twoParamRelations(RelationReport& rep, const Realization& real,
                             const FamilyInstance& fam, const Vector& psi) {
    if (real.measurements.size() != 2) throw DimensionMismatch("expected a bipartite realization");
    double theta = param(fam, "theta"), b1 = param(fam, "b1"), b2 = param(fam, "b2");
    double l1 = param(fam, "lambda1"), l2 = param(fam, "lambda2");
    double s2t = std::sin(2.0 * theta), c2t = std::cos(2.0 * theta);
    int D = real.measurements[0].dim() * real.measurements[1].dim();
    Matrix id = Matrix::Identity(D, D);

    Matrix za = embed(real.measurements, 0, real.measurements[0].observable(1));
    Matrix xa = embed(real.measurements, 0, real.measurements[0].observable(2));
    Matrix zb, xb, m1b, m2b;
    bobPaulis(real, b1, b2, zb, xb, m1b, m2b);

    Matrix u = xa - s2t * xb - c2t * xa * zb;
    Matrix v = id - s2t * xa * xb - c2t * zb;
    addResidual(rep, "nullifier_0", za - zb, psi);
    addResidual(rep, "nullifier_1", l1 * u + l2 * v, psi);

    addResidual(rep, "ZB_squared", zb * zb - id, psi);
    addResidual(rep, "XB_squared", xb * xb - id, psi);
    addResidual(rep, "anticomm_ZB_XB", anticomm(zb, xb), psi);
    double sb1 = std::sin(b1), sb2 = std::sin(b2), sd = std::sin(b1 - b2);
    addResidual(rep, "anticomm_M1B_M2B",
                sb1 * sb2 * anticomm(m1b, m2b) - (sb1 * sb1 + sb2 * sb2 - sd * sd) * id, psi);
    addResidual(rep, "U_relation", u, psi);
    addResidual(rep, "V_relation", v, psi);

    ControlOps ops;
    ops.zx.emplace_back(za, xa);
    ops.zx.emplace_back(zb, xb);
    return ops;
}

ControlOps buildRelations(RelationReport& rep, const Realization& real,
                          const FamilyInstance& fam, const Vector& psi) {
    switch (fam.kind) {
        case FamilyKind::PartialTheta:
        case FamilyKind::Ghz:
            return ghzRelations(rep, real, fam, psi);
        case FamilyKind::SingletAllSettings:
            return singletRelations(rep, real, fam, psi);
        case FamilyKind::PartialTwoParam:
            return twoParamRelations(rep, real, fam, psi);
        default:
            throw std::invalid_argument("no self-testing construction for kind " +
                                        to_string(fam.kind));
    }
}

}  // namespace

double RelationReport::maxResidual() const {
    double m = 0.0;
    for (const auto& [name, r] : residuals) m = std::max(m, r);
    return m;
}

double RelationReport::maxNullifierResidual() const {
    double m = 0.0;
    for (const auto& [name, r] : residuals)
        if (name.rfind("nullifier_", 0) == 0) m = std::max(m, r);
    return m;
}

std::string RelationReport::toJson() const {
    nlohmann::json j;
    j["kind"] = to_string(kind);
    j["residuals"] = residuals;
    j["tolerance"] = tolerance;
    j["pass"] = pass;
    j["notes"] = notes;
    return j.dump(2);
}

std::string SwapResult::toJson() const {
    nlohmann::json j;
    j["fidelity"] = fidelity;
    j["junk_norm"] = junkNorm;
    j["dims"] = extracted.dims;
    nlohmann::json amps = nlohmann::json::array();
    for (int i = 0; i < extracted.amps.size(); ++i)
        amps.push_back({extracted.amps[i].real(), extracted.amps[i].imag()});
    j["extracted"] = amps;
    j["notes"] = notes;
    return j.dump(2);
}

RelationReport relationResiduals(const Realization& real, const FamilyInstance& family,
                                 double tol) {
    Vector psi = normalizedState(real);
    RelationReport rep;
    rep.kind = family.kind;
    rep.tolerance = tol;
    buildRelations(rep, real, family, psi);
    rep.pass = rep.maxResidual() <= tol;
    if (family.singleSquare)
        rep.notes.push_back(
            "limit point: single-square certificate, so the maximal value only "
            "constrains the remaining nullifier; self-testing of this boundary "
            "point is not established");
    return rep;
}

KetState extractionTarget(const FamilyInstance& family) {
    int n = 2;
    double theta = 0.0;
    switch (family.kind) {
        case FamilyKind::PartialTheta:
        case FamilyKind::Ghz:
            n = int(std::lround(param(family, "n")));
            theta = param(family, "theta");
            break;
        case FamilyKind::PartialTwoParam:
            theta = param(family, "theta");
            break;
        case FamilyKind::SingletAllSettings:
            theta = std::numbers::pi / 4.0;
            break;
        default:
            throw std::invalid_argument("no self-testing construction for kind " +
                                        to_string(family.kind));
    }
    double s2t = std::sin(2.0 * theta);
    if (std::abs(s2t) < 1e-12) throw std::invalid_argument("degenerate theta");
    double t = (1.0 - std::cos(2.0 * theta)) / s2t;
    double scale = 1.0 / std::sqrt(1.0 + t * t);
    KetState target;
    target.dims.assign(n, 2);
    target.amps = Vector::Zero(1 << n);
    target.amps[0] = scale;
    target.amps[(1 << n) - 1] = t * scale;
    return target;
}

SwapResult swapFidelity(const Realization& real, const FamilyInstance& family,
                        const KetState& target) {
    RelationReport rep = relationResiduals(real, family, 1e-6);
    if (!rep.pass)
        throw SelfTestError("relations not satisfied (max residual " +
                            std::to_string(rep.maxResidual()) + "); the swap gate assumes exact "
                            "saturation");

    Vector psi = normalizedState(real);
    RelationReport scratch;
    ControlOps ops = buildRelations(scratch, real, family, psi);
    int n = int(ops.zx.size());
    int D = int(psi.size());
    if (target.totalDim() != (1 << n))
        throw DimensionMismatch("target dimension does not match the extracted register");
    Vector t = target.amps / target.amps.norm();

    // ancilla isometry: |a> component carries prod_i X_i^{a_i} P_{a_i}^{(i)} |psi>
    SwapResult out;
    out.extracted.dims.assign(n, 2);
    out.extracted.dims.push_back(D);
    Vector full = Vector::Zero((1 << n) * D);
    Vector junkDir = Vector::Zero(D);
    for (int a = 0; a < (1 << n); ++a) {
        Vector block = psi;
        for (int i = n - 1; i >= 0; --i) {
            const auto& [z, x] = ops.zx[i];
            int bit = (a >> (n - 1 - i)) & 1;
            Matrix proj = (Matrix::Identity(D, D) + (bit == 0 ? 1.0 : -1.0) * z) / 2.0;
            block = proj * block;
            if (bit == 1) block = x * block;
        }
        full.segment(a * D, D) = block;
        junkDir += std::conj(t[a]) * block;
    }
    double total = full.norm();
    if (total < 1e-9) throw SelfTestError("swap output has vanishing norm");
    out.extracted.amps = full / total;
    out.junkNorm = junkDir.norm();
    if (out.junkNorm < 1e-9)
        throw SelfTestError("degenerate extraction: junk norm " + std::to_string(out.junkNorm));
    out.fidelity = (out.junkNorm * out.junkNorm) / (total * total);
    out.notes = rep.notes;
    return out;
}

}  // namespace bellforge
