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

#include "bellforge/bounds.hpp"

#include <algorithm>
#include <cmath>

namespace bellforge {

namespace {

// value of expr on a deterministic strategy
double strategyValue(const BellExpression& expr, const std::vector<std::vector<int>>& outcomes) {
    double total = 0.0;
    for (const auto& [key, coeff] : expr.coefficients()) {
        bool hit = true;
        for (size_t k = 0; k < key.settings.size() && hit; ++k) {
            int x = key.settings[k];
            if (x != 0 && outcomes[k][x - 1] != key.outcomes[k]) hit = false;
        }
        if (hit) total += coeff;
    }
    return total;
}

long long strategyCount(const Scenario& scen) {
    long long count = 1;
    for (int i = 0; i < scen.parties * scen.settings; ++i) {
        count *= scen.outcomes;
        if (count > 10'000'000) throw EnumerationBudgetExceeded("too many deterministic strategies");
    }
    return count;
}

std::vector<std::vector<int>> strategyFromIndex(const Scenario& scen, long long idx) {
    // lexicographic: party 1 setting 1 most significant
    std::vector<std::vector<int>> out(scen.parties, std::vector<int>(scen.settings, 0));
    for (int k = scen.parties - 1; k >= 0; --k)
        for (int x = scen.settings - 1; x >= 0; --x) {
            out[k][x] = static_cast<int>(idx % scen.outcomes);
            idx /= scen.outcomes;
        }
    return out;
}

}  // namespace

LocalBoundResult localBound(const BellExpression& expr) {
    const Scenario& scen = expr.scenario();
    long long count = strategyCount(scen);
    LocalBoundResult best{-std::numeric_limits<double>::infinity(), {}};
    for (long long i = 0; i < count; ++i) {
        auto strat = strategyFromIndex(scen, i);
        double v = strategyValue(expr, strat);
        if (v > best.value) best = {v, {strat}};
    }
    return best;
}

double localBoundReversed(const BellExpression& expr) {
    const Scenario& scen = expr.scenario();
    long long count = strategyCount(scen);
    double best = -std::numeric_limits<double>::infinity();
    for (long long i = count - 1; i >= 0; --i)
        best = std::max(best, strategyValue(expr, strategyFromIndex(scen, i)));
    return best;
}

NpaLevel npaLevelFromString(const std::string& s) {
    if (s == "1") return NpaLevel::One;
    if (s == "1ab") return NpaLevel::OnePlusAB;
    if (s == "2") return NpaLevel::Two;
    throw std::invalid_argument("unknown NPA level: " + s);
}

std::string to_string(NpaLevel level) {
    switch (level) {
        case NpaLevel::One:
            return "1";
        case NpaLevel::OnePlusAB:
            return "1ab";
        case NpaLevel::Two:
            return "2";
    }
    return "?";
}

namespace {

// A word in the dichotomic-observable algebra: reduced per-party setting
// sequences (involutive letters, Alice commutes with Bob).
struct NpaWord {
    std::vector<int> alice, bob;
    auto operator<=>(const NpaWord&) const = default;
    bool isIdentity() const { return alice.empty() && bob.empty(); }
};

std::vector<int> reduceWord(std::vector<int> w) {
    std::vector<int> out;
    for (int letter : w) {
        if (!out.empty() && out.back() == letter)
            out.pop_back();
        else
            out.push_back(letter);
    }
    return out;
}

NpaWord concatAdjoint(const NpaWord& u, const NpaWord& v) {
    // reverse(u) . v per party
    std::vector<int> a(u.alice.rbegin(), u.alice.rend());
    a.insert(a.end(), v.alice.begin(), v.alice.end());
    std::vector<int> b(u.bob.rbegin(), u.bob.rend());
    b.insert(b.end(), v.bob.begin(), v.bob.end());
    return NpaWord{reduceWord(std::move(a)), reduceWord(std::move(b))};
}

// moments of w and its adjoint coincide for a real moment matrix
NpaWord canonical(NpaWord w) {
    NpaWord rev{{w.alice.rbegin(), w.alice.rend()}, {w.bob.rbegin(), w.bob.rend()}};
    return std::min(w, rev);
}

std::vector<NpaWord> monomialList(int settings, NpaLevel level) {
    std::vector<NpaWord> list;
    list.push_back({});  // identity
    for (int x = 1; x <= settings; ++x) list.push_back({{x}, {}});
    for (int y = 1; y <= settings; ++y) list.push_back({{}, {y}});
    if (level == NpaLevel::OnePlusAB || level == NpaLevel::Two)
        for (int x = 1; x <= settings; ++x)
            for (int y = 1; y <= settings; ++y) list.push_back({{x}, {y}});
    if (level == NpaLevel::Two) {
        for (int x = 1; x <= settings; ++x)
            for (int x2 = 1; x2 <= settings; ++x2)
                if (x != x2) list.push_back({{x, x2}, {}});
        for (int y = 1; y <= settings; ++y)
            for (int y2 = 1; y2 <= settings; ++y2)
                if (y != y2) list.push_back({{}, {y, y2}});
    }
    return list;
}

struct MomentProblem {
    std::vector<NpaWord> monomials;
    std::map<NpaWord, int> varIndex;           // free moment -> variable id
    std::map<NpaWord, double> fixed;           // pinned moments
    Eigen::MatrixXd F0;                        // constants (identity + fixed)
    std::vector<Eigen::MatrixXd> F;            // indicator per free moment
};

MomentProblem buildMomentProblem(int settings, NpaLevel level,
                                 const std::map<NpaWord, double>& fixed) {
    MomentProblem mp;
    mp.monomials = monomialList(settings, level);
    mp.fixed = fixed;
    int n = static_cast<int>(mp.monomials.size());
    // first pass: discover free variables in deterministic order
    std::vector<std::vector<NpaWord>> entry(n, std::vector<NpaWord>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            entry[i][j] = canonical(concatAdjoint(mp.monomials[i], mp.monomials[j]));
            const NpaWord& w = entry[i][j];
            if (!w.isIdentity() && !fixed.count(w) && !mp.varIndex.count(w)) {
                int id = static_cast<int>(mp.varIndex.size());
                mp.varIndex.emplace(w, id);
            }
        }
    mp.F0 = Eigen::MatrixXd::Zero(n, n);
    mp.F.assign(mp.varIndex.size(), Eigen::MatrixXd::Zero(n, n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const NpaWord& w = entry[i][j];
            if (w.isIdentity())
                mp.F0(i, j) += 1.0;
            else if (auto it = fixed.find(w); it != fixed.end())
                mp.F0(i, j) += it->second;
            else
                mp.F[mp.varIndex.at(w)](i, j) += 1.0;
        }
    return mp;
}

// maximize sum(objective[w] * moment(w)) + const over the relaxation
double npaOptimize(int settings, NpaLevel level, const std::map<NpaWord, double>& objective,
                   double constant, const std::map<NpaWord, double>& fixed,
                   const NpaOptions& opt) {
    MomentProblem mp = buildMomentProblem(settings, level, fixed);
    LmiProblem lmi;
    lmi.F0 = {mp.F0};
    lmi.gapTol = opt.gapTol;
    lmi.maxIterations = opt.maxIterations;
    lmi.c = Eigen::VectorXd::Zero(mp.varIndex.size());
    for (const auto& Fk : mp.F) lmi.F.push_back({Fk});
    for (const auto& [w, coeff] : objective) {
        NpaWord cw = canonical(w);
        if (cw.isIdentity()) {
            constant += coeff;
            continue;
        }
        if (auto it = fixed.find(cw); it != fixed.end()) {
            constant += coeff * it->second;
            continue;
        }
        auto it = mp.varIndex.find(cw);
        if (it == mp.varIndex.end())
            throw UnsupportedScenario("objective moment outside the hierarchy level");
        lmi.c(it->second) += coeff;
    }
    LmiResult r = lmiSolve(lmi);
    if (r.status != SdpStatus::Optimal)
        throw SolverFailure("SDP did not converge: " + to_string(r.status));
    return r.value + constant;
}

// correlator view -> NPA objective
std::pair<std::map<NpaWord, double>, double> npaObjective(const BellExpression& expr) {
    const Scenario& scen = expr.scenario();
    if (scen.parties != 2 || scen.outcomes != 2)
        throw UnsupportedScenario("NPA bounds require bipartite binary scenarios");
    std::map<NpaWord, double> obj;
    double constant = 0.0;
    for (const auto& [key, coeff] : expr.correlatorView()) {
        NpaWord w;
        if (key[0] != 0) w.alice.push_back(key[0]);
        if (key[1] != 0) w.bob.push_back(key[1]);
        if (w.isIdentity())
            constant += coeff;
        else
            obj[w] += coeff;
    }
    return {obj, constant};
}

}  // namespace

double npaUpperBound(const BellExpression& expr, NpaLevel level, const NpaOptions& opt) {
    auto [obj, constant] = npaObjective(expr);
    return npaOptimize(expr.scenario().settings, level, obj, constant, {}, opt);
}

double tlmResidual(const std::array<double, 4>& corr) {
    double prod = 1.0, prodRoot = 1.0, sumSq = 0.0;
    for (double c : corr) {
        if (std::abs(c) > 1.0 + 1e-12) throw std::invalid_argument("correlator out of range");
        prod *= c;
        prodRoot *= std::sqrt(std::max(0.0, 1.0 - c * c));
        sumSq += c * c;
    }
    return 1.0 + prod + prodRoot - 0.5 * sumSq;
}

std::array<double, 8> behaviorVector(const Behavior& P) {
    const Scenario& scen = P.scenario();
    if (scen.parties != 2 || scen.settings != 2 || scen.outcomes != 2)
        throw UnsupportedScenario("behavior vector requires the 2x2x2 scenario");
    auto sign = [](int a) { return a == 0 ? 1.0 : -1.0; };
    std::array<double, 8> v{};
    for (int x = 1; x <= 2; ++x) {
        double m = 0.0;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) m += sign(a) * P.at({x, 1}, {a, b});
        v[x - 1] = m;
    }
    for (int y = 1; y <= 2; ++y) {
        double m = 0.0;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) m += sign(b) * P.at({1, y}, {a, b});
        v[1 + y] = m;
    }
    for (int x = 1; x <= 2; ++x)
        for (int y = 1; y <= 2; ++y) {
            double m = 0.0;
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) m += sign(a) * sign(b) * P.at({x, y}, {a, b});
            v[4 + (x - 1) * 2 + (y - 1)] = m;
        }
    return v;
}

double tlmResidual(const Behavior& P, double marginalTol) {
    auto v = behaviorVector(P);
    for (int i = 0; i < 4; ++i)
        if (std::abs(v[i]) > marginalTol)
            throw std::invalid_argument("TLM criterion requires zero marginals");
    return tlmResidual({v[4], v[5], v[6], v[7]});
}

ProbeResult nonExposedProbe(double x, double y, double dAlpha, double beta2) {
    if (!(x > 0 && y > 0 && x + y < std::numbers::pi))
        throw std::invalid_argument("require 0 < x, y and x + y < pi");
    double alpha = 1.0 + dAlpha;
    std::array<double, 4> corr{1.0 - beta2 * dAlpha * dAlpha, alpha * std::cos(x + y),
                               alpha * std::cos(x), alpha * std::cos(y)};
    for (double& c : corr) c = std::clamp(c, -1.0, 1.0);
    double r = tlmResidual(corr);
    return ProbeResult{r, r >= -1e-12, corr};
}

double decomposability(const Behavior& P, NpaLevel level, const NpaOptions& opt) {
    auto v = behaviorVector(P);
    std::array<NpaWord, 8> words{NpaWord{{1}, {}},    NpaWord{{2}, {}},    NpaWord{{}, {1}},
                                 NpaWord{{}, {2}},    NpaWord{{1}, {1}},   NpaWord{{1}, {2}},
                                 NpaWord{{2}, {1}},   NpaWord{{2}, {2}}};
    double delta = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 8; ++i) {
        std::map<NpaWord, double> fixed;
        for (int j = 0; j < 8; ++j)
            if (j != i) fixed[words[j]] = v[j];
        std::map<NpaWord, double> objUp{{words[i], 1.0}}, objDown{{words[i], -1.0}};
        double hi = npaOptimize(2, level, objUp, 0.0, fixed, opt);
        double lo = -npaOptimize(2, level, objDown, 0.0, fixed, opt);
        delta = std::min(delta, hi - lo);
    }
    return delta;
}

}  // namespace bellforge
