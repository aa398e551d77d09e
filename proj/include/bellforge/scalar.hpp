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

#pragma once

#include <complex>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>

namespace bellforge {

using Complex = std::complex<double>;

/// Binding of named real parameters to values.
using Assignment = std::map<std::string, double>;

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnboundParameter : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Symbolic scalar: an expression tree over named real parameters with
/// complex constants. Only constant folding and zero pruning are performed,
/// no algebraic simplification.
class ScalarExpr {
public:
    /// Divisors smaller than this (and negative sqrt arguments beyond it)
    /// raise DomainError at evaluation time. Chosen so that poles hit at
    /// floating-point approximations of exact angles (e.g. cos(pi/2)) are
    /// still detected.
    static constexpr double kPoleTol = 1e-14;
    /// Constants with modulus below this count as zero for term pruning.
    static constexpr double kZeroTol = 1e-12;

    ScalarExpr();  // zero
    ScalarExpr(double value);
    ScalarExpr(const Complex& value);
    static ScalarExpr param(const std::string& name);

    Complex eval(const Assignment& a) const;
    ScalarExpr conj() const;

    bool isConstant(Complex* value = nullptr) const;
    bool isZero(double tol = kZeroTol) const;

    std::string str() const;
    void collectParams(std::set<std::string>& out) const;

    /// Parses the canonical text form produced by str().
    static ScalarExpr parse(const std::string& text);

    friend ScalarExpr operator+(const ScalarExpr&, const ScalarExpr&);
    friend ScalarExpr operator-(const ScalarExpr&, const ScalarExpr&);
    friend ScalarExpr operator*(const ScalarExpr&, const ScalarExpr&);
    friend ScalarExpr operator/(const ScalarExpr&, const ScalarExpr&);
    friend ScalarExpr operator-(const ScalarExpr&);
    friend ScalarExpr sin(const ScalarExpr&);
    friend ScalarExpr cos(const ScalarExpr&);
    friend ScalarExpr tan(const ScalarExpr&);
    friend ScalarExpr cot(const ScalarExpr&);
    friend ScalarExpr sqrt(const ScalarExpr&);

    struct Node;

private:
    explicit ScalarExpr(std::shared_ptr<const Node> node);
    std::shared_ptr<const Node> node_;
};

ScalarExpr operator+(const ScalarExpr&, const ScalarExpr&);
ScalarExpr operator-(const ScalarExpr&, const ScalarExpr&);
ScalarExpr operator*(const ScalarExpr&, const ScalarExpr&);
ScalarExpr operator/(const ScalarExpr&, const ScalarExpr&);
ScalarExpr operator-(const ScalarExpr&);
ScalarExpr sin(const ScalarExpr&);
ScalarExpr cos(const ScalarExpr&);
ScalarExpr tan(const ScalarExpr&);
ScalarExpr cot(const ScalarExpr&);
ScalarExpr sqrt(const ScalarExpr&);

}  // namespace bellforge
