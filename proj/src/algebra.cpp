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

#include "bellforge/algebra.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>

#include "json.hpp"

namespace bellforge {

void Scenario::check(int party, int setting, int outcome) const {
    if (party < 1 || party > parties) throw ScenarioMismatch("party index out of range");
    if (setting < 1 || setting > settings) throw ScenarioMismatch("setting index out of range");
    if (outcome < 0 || outcome >= outcomes) throw ScenarioMismatch("outcome index out of range");
}

bool Monomial::isIdentity() const {
    for (const auto& w : words)
        if (!w.empty()) return false;
    return true;
}

int Monomial::localDegree() const {
    size_t deg = 0;
    for (const auto& w : words) deg = std::max(deg, w.size());
    return static_cast<int>(deg);
}

bool CorrelatorMonomial::isIdentity() const {
    for (const auto& w : words)
        if (!w.empty()) return false;
    return true;
}

int CorrelatorMonomial::localDegree() const {
    size_t deg = 0;
    for (const auto& w : words) deg = std::max(deg, w.size());
    return static_cast<int>(deg);
}

FormalPolynomial::FormalPolynomial(Scenario scen) : scen_(scen) {}

FormalPolynomial FormalPolynomial::one(Scenario scen) {
    FormalPolynomial p(scen);
    p.addTerm(Monomial{std::vector<std::vector<ProjectorSymbol>>(scen.parties)}, ScalarExpr(1.0));
    return p;
}

FormalPolynomial FormalPolynomial::projector(Scenario scen, int party, int setting, int outcome) {
    scen.check(party, setting, outcome);
    FormalPolynomial p(scen);
    if (outcome == scen.outcomes - 1) {
        // normalization rule: X_{d-1|x} = 1 - sum of the lower outcomes
        p = one(scen);
        for (int a = 0; a + 1 < scen.outcomes; ++a)
            p = p - projector(scen, party, setting, a);
        return p;
    }
    Monomial m{std::vector<std::vector<ProjectorSymbol>>(scen.parties)};
    m.words[party - 1].push_back(ProjectorSymbol{party, setting, outcome});
    p.addTerm(m, ScalarExpr(1.0));
    return p;
}

FormalPolynomial FormalPolynomial::correlator(Scenario scen, int party, int setting, int power) {
    int d = scen.outcomes;
    int e = ((power % d) + d) % d;
    if (e == 0) return one(scen);
    FormalPolynomial p(scen);
    for (int a = 0; a < d; ++a) {
        Complex w;
        int m = (a * e) % d;
        if (m == 0)
            w = 1.0;
        else if (2 * m == d)
            w = -1.0;
        else
            w = std::polar(1.0, 2.0 * std::numbers::pi * m / d);
        p = p + ScalarExpr(w) * projector(scen, party, setting, a);
    }
    return p;
}

void FormalPolynomial::addTerm(const Monomial& mono, const ScalarExpr& coeff) {
    if (coeff.isZero()) return;
    auto it = terms_.find(mono);
    if (it == terms_.end()) {
        terms_.emplace(mono, coeff);
        return;
    }
    ScalarExpr sum = it->second + coeff;
    if (sum.isZero())
        terms_.erase(it);
    else
        it->second = sum;
}

FormalPolynomial FormalPolynomial::adjoint() const {
    FormalPolynomial out(scen_);
    for (const auto& [mono, coeff] : terms_) {
        Monomial rev = mono;
        for (auto& w : rev.words) std::reverse(w.begin(), w.end());
        out.addTerm(rev, coeff.conj());
    }
    return out;
}

FormalPolynomial operator+(const FormalPolynomial& p, const FormalPolynomial& q) {
    if (!(p.scen_ == q.scen_)) throw ScenarioMismatch("polynomial scenarios differ");
    FormalPolynomial out = p;
    for (const auto& [mono, coeff] : q.terms_) out.addTerm(mono, coeff);
    return out;
}

FormalPolynomial operator-(const FormalPolynomial& p) {
    FormalPolynomial out(p.scen_);
    for (const auto& [mono, coeff] : p.terms_) out.addTerm(mono, -coeff);
    return out;
}

FormalPolynomial operator-(const FormalPolynomial& p, const FormalPolynomial& q) {
    return p + (-q);
}

FormalPolynomial operator*(const ScalarExpr& s, const FormalPolynomial& p) {
    FormalPolynomial out(p.scen_);
    if (s.isZero()) return out;
    for (const auto& [mono, coeff] : p.terms_) out.addTerm(mono, s * coeff);
    return out;
}

namespace {

// Concatenates two normal-form words with seam reduction. Returns nullopt
// when orthogonality annihilates the product.
std::optional<std::vector<ProjectorSymbol>> concatWords(const std::vector<ProjectorSymbol>& a,
                                                        const std::vector<ProjectorSymbol>& b,
                                                        int wordCap) {
    std::vector<ProjectorSymbol> out = a;
    size_t i = 0;
    if (!out.empty() && i < b.size() && out.back().setting == b[i].setting) {
        if (out.back().outcome != b[i].outcome) return std::nullopt;
        ++i;  // idempotency: X X = X
    }
    for (; i < b.size(); ++i) out.push_back(b[i]);
    if (static_cast<int>(out.size()) > wordCap)
        throw WordLengthExceeded("monomial word length exceeds cap");
    return out;
}

}  // namespace

FormalPolynomial operator*(const FormalPolynomial& p, const FormalPolynomial& q) {
    if (!(p.scen_ == q.scen_)) throw ScenarioMismatch("polynomial scenarios differ");
    FormalPolynomial out(p.scen_);
    int cap = std::max(p.scen_.wordCap, q.scen_.wordCap);
    for (const auto& [mp, cp] : p.terms_) {
        for (const auto& [mq, cq] : q.terms_) {
            Monomial prod{std::vector<std::vector<ProjectorSymbol>>(p.scen_.parties)};
            bool dead = false;
            for (int k = 0; k < p.scen_.parties && !dead; ++k) {
                auto w = concatWords(mp.words[k], mq.words[k], cap);
                if (!w)
                    dead = true;
                else
                    prod.words[k] = std::move(*w);
            }
            if (!dead) out.addTerm(prod, cp * cq);
        }
    }
    return out;
}

FormalPolynomial FormalPolynomial::evaluated(const Assignment& a, double tol) const {
    FormalPolynomial out(scen_);
    for (const auto& [mono, coeff] : terms_) {
        Complex v = coeff.eval(a);
        if (std::abs(v) > tol) out.addTerm(mono, ScalarExpr(v));
    }
    return out;
}

DegreeSplit localDegreeSplit(const FormalPolynomial& p) {
    // The constant/linear/leftover decomposition is taken in the correlator
    // basis: that is where the empty monomial separates cleanly from the
    // marginal terms (in the projector basis 1 = sum_a X_{a|x} mixes them).
    CorrelatorPolynomial corr = toCorrelatorBasis(p);
    CorrelatorPolynomial bell(p.scenario()), gamma(p.scenario());
    ScalarExpr constant;
    for (const auto& [mono, coeff] : corr.terms()) {
        int deg = mono.localDegree();
        if (deg == 0)
            constant = constant + coeff;
        else if (deg == 1)
            bell.addTerm(mono, coeff);
        else
            gamma.addTerm(mono, coeff);
    }
    return DegreeSplit{constant, fromCorrelatorBasis(bell), fromCorrelatorBasis(gamma)};
}

void CorrelatorPolynomial::addTerm(const CorrelatorMonomial& mono, const ScalarExpr& coeff) {
    if (coeff.isZero()) return;
    auto it = terms_.find(mono);
    if (it == terms_.end()) {
        terms_.emplace(mono, coeff);
        return;
    }
    ScalarExpr sum = it->second + coeff;
    if (sum.isZero())
        terms_.erase(it);
    else
        it->second = sum;
}

namespace {

// Pushes (Y_x)^e onto a reduced correlator word, merging same-setting
// neighbors with powers mod d.
void pushCorrelator(std::vector<CorrelatorSymbol>& word, int party, int setting, int power,
                    int d) {
    int e = ((power % d) + d) % d;
    if (e == 0) return;
    if (!word.empty() && word.back().setting == setting) {
        int merged = (word.back().power + e) % d;
        word.pop_back();
        if (merged != 0) pushCorrelator(word, party, setting, merged, d);
        return;
    }
    word.push_back(CorrelatorSymbol{party, setting, e});
}

}  // namespace

CorrelatorPolynomial toCorrelatorBasis(const FormalPolynomial& p) {
    const Scenario& scen = p.scenario();
    int d = scen.outcomes;
    CorrelatorPolynomial out(scen);
    for (const auto& [mono, coeff] : p.terms()) {
        // X_{a|x} = (1/d) sum_e w^{-ae} (Y_x)^e; expand the full product.
        std::vector<ProjectorSymbol> syms;
        for (const auto& w : mono.words) syms.insert(syms.end(), w.begin(), w.end());
        size_t n = syms.size();
        std::vector<int> exps(n, 0);
        while (true) {
            Complex c = 1.0;
            for (size_t i = 0; i < n; ++i) {
                int m = ((-syms[i].outcome * exps[i]) % d + d) % d;
                Complex w;
                if (m == 0)
                    w = 1.0;
                else if (2 * m == d)
                    w = -1.0;
                else
                    w = std::polar(1.0, 2.0 * std::numbers::pi * m / d);
                c *= w / static_cast<double>(d);
            }
            CorrelatorMonomial cm{std::vector<std::vector<CorrelatorSymbol>>(scen.parties)};
            for (size_t i = 0; i < n; ++i)
                pushCorrelator(cm.words[syms[i].party - 1], syms[i].party, syms[i].setting,
                               exps[i], d);
            out.addTerm(cm, ScalarExpr(c) * coeff);
            // next exponent tuple
            size_t j = 0;
            for (; j < n; ++j) {
                if (++exps[j] < d) break;
                exps[j] = 0;
            }
            if (j == n) break;
            if (n == 0) break;
        }
        if (n == 0) continue;  // identity handled by the single e=() iteration above
    }
    return out;
}

FormalPolynomial fromCorrelatorBasis(const CorrelatorPolynomial& p) {
    const Scenario& scen = p.scenario();
    FormalPolynomial out(scen);
    for (const auto& [mono, coeff] : p.terms()) {
        FormalPolynomial term = coeff * FormalPolynomial::one(scen);
        for (const auto& w : mono.words)
            for (const auto& sym : w)
                term = term * FormalPolynomial::correlator(scen, sym.party, sym.setting, sym.power);
        out = out + term;
    }
    return out;
}

std::string toText(const FormalPolynomial& p) {
    if (p.terms().empty()) return "(0) * 1";
    std::ostringstream os;
    bool first = true;
    for (const auto& [mono, coeff] : p.terms()) {
        if (!first) os << " + ";
        first = false;
        os << "(" << coeff.str() << ") *";
        if (mono.isIdentity()) {
            os << " 1";
        } else {
            for (const auto& w : mono.words)
                for (const auto& s : w)
                    os << " X[" << s.party << "," << s.setting << "," << s.outcome << "]";
        }
    }
    return os.str();
}

FormalPolynomial polynomialFromText(Scenario scen, const std::string& text) {
    FormalPolynomial out(scen);
    size_t pos = 0;
    while (pos < text.size()) {
        // coefficient: balanced parenthesized prefix
        if (text[pos] != '(') throw std::invalid_argument("expected '(' at term start");
        int depth = 0;
        size_t end = pos;
        for (; end < text.size(); ++end) {
            if (text[end] == '(') ++depth;
            if (text[end] == ')' && --depth == 0) break;
        }
        if (depth != 0) throw std::invalid_argument("unbalanced parentheses");
        ScalarExpr coeff = ScalarExpr::parse(text.substr(pos + 1, end - pos - 1));
        pos = end + 1;
        if (text.compare(pos, 2, " *") != 0) throw std::invalid_argument("expected '*'");
        pos += 2;
        Monomial mono{std::vector<std::vector<ProjectorSymbol>>(scen.parties)};
        bool identity = false;
        while (pos < text.size() && text[pos] == ' ') {
            if (pos + 1 < text.size() && text[pos + 1] == '1') {
                identity = true;
                pos += 2;
                break;
            }
            if (text.compare(pos + 1, 2, "X[") != 0) break;
            ++pos;
            size_t close = text.find(']', pos);
            if (close == std::string::npos) throw std::invalid_argument("unterminated symbol");
            int k, x, a;
            if (std::sscanf(text.c_str() + pos, "X[%d,%d,%d]", &k, &x, &a) != 3)
                throw std::invalid_argument("malformed symbol");
            scen.check(k, x, a);
            mono.words[k - 1].push_back(ProjectorSymbol{k, x, a});
            pos = close + 1;
        }
        (void)identity;
        out.addTerm(mono, coeff);
        if (pos < text.size()) {
            if (text.compare(pos, 3, " + ") != 0) throw std::invalid_argument("expected ' + '");
            pos += 3;
        }
    }
    return out;
}

std::string polynomialToJson(const FormalPolynomial& p) {
    nlohmann::json j;
    j["scenario"] = {{"parties", p.scenario().parties},
                     {"settings", p.scenario().settings},
                     {"outcomes", p.scenario().outcomes},
                     {"word_cap", p.scenario().wordCap}};
    j["terms"] = nlohmann::json::array();
    for (const auto& [mono, coeff] : p.terms()) {
        nlohmann::json words = nlohmann::json::array();
        for (const auto& w : mono.words) {
            nlohmann::json word = nlohmann::json::array();
            for (const auto& s : w) word.push_back({s.party, s.setting, s.outcome});
            words.push_back(word);
        }
        j["terms"].push_back({{"coeff", coeff.str()}, {"monomial", words}});
    }
    return j.dump(2);
}

FormalPolynomial polynomialFromJson(const std::string& json) {
    nlohmann::json j = nlohmann::json::parse(json);
    Scenario scen{j["scenario"]["parties"].get<int>(), j["scenario"]["settings"].get<int>(),
                  j["scenario"]["outcomes"].get<int>(),
                  j["scenario"].value("word_cap", 4)};
    FormalPolynomial p(scen);
    for (const auto& term : j["terms"]) {
        Monomial mono{std::vector<std::vector<ProjectorSymbol>>(scen.parties)};
        int k = 0;
        for (const auto& word : term["monomial"]) {
            for (const auto& s : word) {
                ProjectorSymbol sym{s[0].get<int>(), s[1].get<int>(), s[2].get<int>()};
                scen.check(sym.party, sym.setting, sym.outcome);
                if (sym.party != k + 1) throw std::invalid_argument("symbol party mismatch");
                mono.words[k].push_back(sym);
            }
            ++k;
        }
        p.addTerm(mono, ScalarExpr::parse(term["coeff"].get<std::string>()));
    }
    return p;
}

}  // namespace bellforge
