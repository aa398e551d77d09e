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

#include "bellforge.h"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <numbers>
#include <thread>

#include "bellforge/bounds.hpp"
#include "bellforge/selftest.hpp"
#include "bellforge/variational.hpp"
#include "json.hpp"

using namespace bellforge;

struct bf_family {
    FamilyInstance inst;
};

namespace {

thread_local std::string g_error;

template <typename F>
bf_status guard(F&& f) {
    try {
        f();
        return BF_OK;
    } catch (const SelfTestError& e) {
        g_error = e.what();
        return BF_ERR_VERIFY;
    } catch (const std::invalid_argument& e) {
        g_error = e.what();
        return BF_ERR_USAGE;
    } catch (const std::domain_error& e) {
        g_error = e.what();
        return BF_ERR_USAGE;
    } catch (const std::exception& e) {
        g_error = e.what();
        return BF_ERR_SOLVER;
    }
}

char* dupString(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

// retries with looser duality gaps: near-degenerate expressions stall the
// interior point method at tight tolerances
double npaWithRetry(const BellExpression& expr, NpaLevel lvl) {
    const std::vector<NpaOptions> ladder{{1e-8, 200}, {1e-7, 400}, {1e-6, 600}};
    for (size_t i = 0;; ++i) {
        try {
            return npaUpperBound(expr, lvl, ladder[i]);
        } catch (const SolverFailure&) {
            if (i + 1 == ladder.size()) throw;
        }
    }
}

Assignment toAssignment(const char* const* keys, const double* values, int n) {
    if (n > 0 && (keys == nullptr || values == nullptr))
        throw std::invalid_argument("null parameter arrays");
    Assignment asg;
    for (int i = 0; i < n; ++i) {
        if (keys[i] == nullptr) throw std::invalid_argument("null parameter key");
        asg[keys[i]] = values[i];
    }
    return asg;
}

const FamilyInstance& deref(const bf_family* fam) {
    if (fam == nullptr) throw std::invalid_argument("null family handle");
    return fam->inst;
}

NpaLevel levelArg(const char* level) {
    if (level == nullptr) throw std::invalid_argument("null level");
    return npaLevelFromString(level);
}

BellExpression scaled(const BellExpression& expr, double factor) {
    BellExpression out(expr.scenario());
    for (const auto& [key, coeff] : expr.coefficients()) out.add(key, factor * coeff);
    return out;
}

nlohmann::json hessianJson(const FamilyInstance& inst) {
    LocalMaxReport rep = checkLocalMax(scaled(inst.expr, 0.5), inst.ideal,
                                       defaultDirections(inst.ideal.measurements));
    nlohmann::json j;
    j["stationary"] = rep.stationary;
    j["residual_norm"] = rep.residualNorm;
    j["gap"] = rep.gap;
    j["verdict"] = to_string(rep.verdict);
    nlohmann::json notes = nlohmann::json::array();
    if (rep.stationary && rep.hess.eigenvalues.size() > 0) {
        nlohmann::json eig = nlohmann::json::array();
        for (int i = 0; i < rep.hess.eigenvalues.size(); ++i)
            eig.push_back(rep.hess.eigenvalues(i));
        j["eigenvalues"] = eig;
        double lo = rep.hess.eigenvalues.minCoeff(), hi = rep.hess.eigenvalues.maxCoeff();
        if (hi - lo <= 1e-6) notes.push_back("hessian eigenvalues equal");
    }
    j["notes"] = notes;
    return j;
}

nlohmann::json certifyJson(const FamilyInstance& inst, const char* certJson, NpaLevel level,
                           double tol, bool& pass) {
    if (certJson == nullptr && !inst.certificate)
        throw std::invalid_argument("kind " + to_string(inst.kind) +
                                    " carries no SOS certificate");
    SOSCertificate cert =
        certJson != nullptr ? SOSCertificate::fromJson(certJson) : *inst.certificate;

    nlohmann::json checks = nlohmann::json::array();
    auto push = [&checks](const std::string& name, bool ok, double residual) {
        checks.push_back({{"name", name}, {"pass", ok}, {"residual", residual}});
    };

    pass = true;
    VerifyReport vr = verifyCertificate(cert, inst.ideal, tol);
    for (const auto& c : vr.checks) push(c.name, c.pass, c.residual);
    pass = pass && vr.pass;

    double value = bellValue(inst.expr, behavior(inst.ideal));
    double dv = std::abs(value - inst.C);
    push("ideal_value_equals_C", dv <= 1e-9 * std::max(1.0, std::abs(inst.C)), dv);
    pass = pass && checks.back()["pass"].get<bool>();

    double local = localBound(inst.expr).value;
    if (inst.singleSquare) {
        // non-exposed limit point: the local bound meets C
        push("local_bound_at_most_C", local <= inst.C + 1e-9, local - inst.C);
    } else {
        push("local_bound_below_C", local < inst.C - 1e-9, inst.C - local);
    }
    pass = pass && checks.back()["pass"].get<bool>();

    nlohmann::json j;
    const Scenario& scen = inst.expr.scenario();
    if (scen.parties == 2 && scen.outcomes == 2) {
        double npa = npaWithRetry(inst.expr, level);
        double gap = std::abs(npa - inst.C);
        push("npa_confirms_C", gap <= 1e-6 * std::max(1.0, std::abs(inst.C)), gap);
        pass = pass && checks.back()["pass"].get<bool>();
        j["npa_bound"] = npa;
        j["npa_level"] = to_string(level);
    }

    LocalMaxReport rep = checkLocalMax(scaled(inst.expr, 0.5), inst.ideal,
                                       defaultDirections(inst.ideal.measurements));
    push("variational_local_max", rep.stationary && rep.verdict != HessianVerdict::Saddle,
         rep.residualNorm);
    pass = pass && checks.back()["pass"].get<bool>();

    j["kind"] = to_string(inst.kind);
    j["C"] = inst.C;
    j["ideal_value"] = value;
    j["local_bound"] = local;
    j["single_square"] = inst.singleSquare;
    j["checks"] = checks;
    j["pass"] = pass;
    return j;
}

/// Runs f(0..n-1) on a pool; results must be written by index so output
/// stays in grid order regardless of completion order.
template <typename F>
void parallelFor(int n, int jobs, F&& f) {
    jobs = std::max(1, jobs);
    jobs = std::min(jobs, n);
    if (jobs <= 1) {
        for (int i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (int t = 0; t < jobs; ++t)
        pool.emplace_back([&]() {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) f(i);
        });
    for (auto& th : pool) th.join();
}

int gridCount(double lo, double hi, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("scan step must be positive");
    if (hi < lo) throw std::invalid_argument("empty scan range");
    return int(std::floor((hi - lo) / step + 1e-9)) + 1;
}

}  // namespace

extern "C" {

const char* bf_version(void) { return "0.1.0"; }

const char* bf_last_error(void) { return g_error.c_str(); }

void bf_string_free(char* s) { std::free(s); }

bf_status bf_family_kinds(char** out) {
    return guard([&] {
        if (out == nullptr) throw std::invalid_argument("null output pointer");
        std::string s;
        for (FamilyKind k : allFamilyKinds()) {
            if (!s.empty()) s += '\n';
            s += to_string(k);
        }
        *out = dupString(s);
    });
}

bf_status bf_family_build(const char* kind, const char* const* keys, const double* values,
                          int nparams, bf_family** out) {
    return guard([&] {
        if (out == nullptr) throw std::invalid_argument("null output pointer");
        if (kind == nullptr) throw std::invalid_argument("null kind");
        FamilyInstance inst = build(familyKindFromString(kind), toAssignment(keys, values, nparams));
        *out = new bf_family{std::move(inst)};
    });
}

void bf_family_free(bf_family* fam) { delete fam; }

bf_status bf_family_json(const bf_family* fam, char** out) {
    return guard([&] { *out = dupString(deref(fam).toJson()); });
}

bf_status bf_family_table(const bf_family* fam, char** out) {
    return guard([&] { *out = dupString(deref(fam).coefficientTable()); });
}

bf_status bf_family_bound(const bf_family* fam, double* out) {
    return guard([&] { *out = deref(fam).C; });
}

bf_status bf_family_ideal_value(const bf_family* fam, double* out) {
    return guard([&] {
        const FamilyInstance& inst = deref(fam);
        *out = bellValue(inst.expr, behavior(inst.ideal));
    });
}

bf_status bf_family_single_square(const bf_family* fam, int* out) {
    return guard([&] { *out = deref(fam).singleSquare ? 1 : 0; });
}

bf_status bf_family_local_bound(const bf_family* fam, double* out) {
    return guard([&] { *out = localBound(deref(fam).expr).value; });
}

bf_status bf_family_npa_bound(const bf_family* fam, const char* level, double* out) {
    return guard([&] { *out = npaWithRetry(deref(fam).expr, levelArg(level)); });
}

bf_status bf_family_hessian(const bf_family* fam, char** out) {
    return guard([&] { *out = dupString(hessianJson(deref(fam)).dump(2)); });
}

bf_status bf_family_certify(const bf_family* fam, const char* cert_json, const char* level,
                            double tol, char** out, int* pass) {
    return guard([&] {
        if (out == nullptr || pass == nullptr) throw std::invalid_argument("null output pointer");
        bool ok = false;
        nlohmann::json j = certifyJson(deref(fam), cert_json, levelArg(level), tol, ok);
        *out = dupString(j.dump(2));
        *pass = ok ? 1 : 0;
    });
}

bf_status bf_family_selftest(const bf_family* fam, char** out, double* fidelity) {
    return guard([&] {
        if (out == nullptr || fidelity == nullptr)
            throw std::invalid_argument("null output pointer");
        const FamilyInstance& inst = deref(fam);
        RelationReport rep = relationResiduals(inst.ideal, inst);
        SwapResult swap = swapFidelity(inst.ideal, inst, extractionTarget(inst));
        nlohmann::json j;
        j["relations"] = nlohmann::json::parse(rep.toJson());
        j["swap"] = nlohmann::json::parse(swap.toJson());
        j["single_square"] = inst.singleSquare;
        *out = dupString(j.dump(2));
        *fidelity = swap.fidelity;
    });
}

bf_status bf_scan_fig1(double qmin, double qmax, double qstep, const char* level, int jobs,
                       char** out) {
    return guard([&] {
        if (out == nullptr) throw std::invalid_argument("null output pointer");
        NpaLevel lvl = levelArg(level);
        int n = gridCount(qmin, qmax, qstep);
        std::vector<std::string> rows(n);
        parallelFor(n, jobs, [&](int i) {
            double q = qmin + i * qstep;
            std::string npa = "nan", local = "nan", ideal = "nan";
            try {
                FamilyInstance inst = build(FamilyKind::Limitation, {{"q", q}});
                npa = fmt(npaWithRetry(inst.expr, lvl));
                local = fmt(localBound(inst.expr).value);
                ideal = fmt(bellValue(inst.expr, behavior(inst.ideal)));
            } catch (const std::exception&) {
                // leave the failure markers in place, keep scanning
            }
            rows[i] = fmt(q) + "," + npa + "," + local + "," + ideal;
        });
        std::string csv = "q,npa_bound,local_bound,ideal_value\n";
        for (const auto& r : rows) csv += r + "\n";
        *out = dupString(csv);
    });
}

bf_status bf_scan_fig4(double theta, int grid, const char* level, int jobs, char** out) {
    return guard([&] {
        if (out == nullptr) throw std::invalid_argument("null output pointer");
        if (grid < 1) throw std::invalid_argument("grid size must be positive");
        NpaLevel lvl = levelArg(level);
        const double kPi = std::numbers::pi;
        // interior cells of (-1.5, 0) x (0, 1.5): b1 = 0 or b2 = 0 puts a
        // zero probability in the behavior, and a pi-commensurate lattice
        // would park cells exactly on the singular region edge |b| = 2 theta
        const double span = 1.5;
        auto b1At = [&](int i) { return -span + (i + 1) * span / (grid + 1); };
        auto b2At = [&](int j) { return (j + 1) * span / (grid + 1); };
        int n = grid * grid;
        std::vector<std::string> rows(n);
        parallelFor(n, jobs, [&](int cell) {
            double b1 = b1At(cell / grid), b2 = b2At(cell % grid);
            std::string delta = "nan";
            Realization real{KetState::ghz(2, theta),
                             {PartyMeasurements::qubitXZ({0.0, kPi / 2.0}),
                              PartyMeasurements::qubitXZ({b1, b2})}};
            Behavior P = behavior(real);
            // loosen the duality gap on retries: near-singular slices at the
            // region edge stall the interior point method at tight gaps
            for (NpaOptions opt : {NpaOptions{1e-8, 200}, NpaOptions{1e-7, 400},
                                   NpaOptions{1e-6, 400}, NpaOptions{1e-5, 800}}) {
                try {
                    delta = fmt(decomposability(P, lvl, opt));
                    break;
                } catch (const std::exception&) {
                }
            }
            rows[cell] = fmt(b1) + "," + fmt(b2) + "," + delta;
        });
        std::string csv = "b1,b2,delta\n";
        for (const auto& r : rows) csv += r + "\n";
        *out = dupString(csv);
    });
}

bf_status bf_scan_family(const char* kind, const char* const* fixed_keys,
                         const double* fixed_values, int nfixed, const char* param, double lo,
                         double hi, double step, const char* level, int jobs, char** out) {
    return guard([&] {
        if (out == nullptr) throw std::invalid_argument("null output pointer");
        if (param == nullptr) throw std::invalid_argument("null scan parameter");
        FamilyKind k = kind == nullptr ? throw std::invalid_argument("null kind")
                                       : familyKindFromString(kind);
        NpaLevel lvl = levelArg(level);
        Assignment fixed = toAssignment(fixed_keys, fixed_values, nfixed);
        int n = gridCount(lo, hi, step);
        std::vector<std::string> rows(n);
        parallelFor(n, jobs, [&](int i) {
            double v = lo + i * step;
            std::string local = "nan", npa = "nan", c = "nan";
            try {
                Assignment params = fixed;
                params[param] = v;
                FamilyInstance inst = build(k, params);
                c = fmt(inst.C);
                local = fmt(localBound(inst.expr).value);
                const Scenario& scen = inst.expr.scenario();
                if (scen.parties == 2 && scen.outcomes == 2)
                    npa = fmt(npaWithRetry(inst.expr, lvl));
            } catch (const std::exception&) {
            }
            rows[i] = fmt(v) + "," + local + "," + npa + "," + c;
        });
        std::string csv = std::string(param) + ",local_bound,npa_bound,sos_C\n";
        for (const auto& r : rows) csv += r + "\n";
        *out = dupString(csv);
    });
}

}  // extern "C"
