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

#include "bellforge/scalar.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace bellforge {

enum class Op {
    Const,
    Param,
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Sin,
    Cos,
    Tan,
    Cot,
    Sqrt,
    Conj,
};

struct ScalarExpr::Node {
    Op op = Op::Const;
    Complex value{0.0, 0.0};
    std::string name;
    std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const ScalarExpr::Node>;

NodePtr makeConst(const Complex& v) {
    auto n = std::make_shared<ScalarExpr::Node>();
    n->op = Op::Const;
    n->value = v;
    return n;
}

Complex evalNode(const ScalarExpr::Node& n, const Assignment& a) {
    switch (n.op) {
        case Op::Const:
            return n.value;
        case Op::Param: {
            auto it = a.find(n.name);
            if (it == a.end()) throw UnboundParameter("unbound parameter: " + n.name);
            return Complex(it->second, 0.0);
        }
        case Op::Add:
            return evalNode(*n.a, a) + evalNode(*n.b, a);
        case Op::Sub:
            return evalNode(*n.a, a) - evalNode(*n.b, a);
        case Op::Mul:
            return evalNode(*n.a, a) * evalNode(*n.b, a);
        case Op::Div: {
            Complex den = evalNode(*n.b, a);
            if (std::abs(den) <= ScalarExpr::kPoleTol)
                throw DomainError("division by (numerically) zero");
            return evalNode(*n.a, a) / den;
        }
        case Op::Neg:
            return -evalNode(*n.a, a);
        case Op::Sin:
            return std::sin(evalNode(*n.a, a));
        case Op::Cos:
            return std::cos(evalNode(*n.a, a));
        case Op::Tan: {
            Complex c = std::cos(evalNode(*n.a, a));
            if (std::abs(c) <= ScalarExpr::kPoleTol) throw DomainError("tan at pole");
            return std::sin(evalNode(*n.a, a)) / c;
        }
        case Op::Cot: {
            Complex s = std::sin(evalNode(*n.a, a));
            if (std::abs(s) <= ScalarExpr::kPoleTol) throw DomainError("cot at pole");
            return std::cos(evalNode(*n.a, a)) / s;
        }
        case Op::Sqrt: {
            Complex v = evalNode(*n.a, a);
            if (v.imag() == 0.0 && v.real() < -ScalarExpr::kPoleTol)
                throw DomainError("sqrt of negative real");
            if (v.imag() == 0.0 && v.real() < 0.0) v = Complex(0.0, 0.0);
            return std::sqrt(v);
        }
        case Op::Conj:
            return std::conj(evalNode(*n.a, a));
    }
    throw std::logic_error("unreachable");
}

// Folds an operator node into a constant when every operand is constant and
// the operation is defined there.
NodePtr fold(NodePtr n) {
    if ((n->a && n->a->op != Op::Const) || (n->b && n->b->op != Op::Const)) return n;
    if (n->op == Op::Const || n->op == Op::Param) return n;
    try {
        return makeConst(evalNode(*n, {}));
    } catch (const DomainError&) {
        return n;  // surfaces at eval time
    }
}

NodePtr makeUnary(Op op, NodePtr a) {
    auto n = std::make_shared<ScalarExpr::Node>();
    n->op = op;
    n->a = std::move(a);
    return fold(n);
}

NodePtr makeBinary(Op op, NodePtr a, NodePtr b) {
    auto n = std::make_shared<ScalarExpr::Node>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return fold(n);
}

bool isConstVal(const NodePtr& n, const Complex& v) {
    return n->op == Op::Const && n->value == v;
}

std::string formatReal(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string formatComplex(const Complex& v) {
    if (v.imag() == 0.0) {
        if (v.real() < 0.0) return "(" + formatReal(v.real()) + ")";
        return formatReal(v.real());
    }
    return "(" + formatReal(v.real()) + "+" + formatReal(v.imag()) + "*i)";
}

void strNode(const ScalarExpr::Node& n, std::ostream& os) {
    switch (n.op) {
        case Op::Const:
            os << formatComplex(n.value);
            return;
        case Op::Param:
            os << n.name;
            return;
        case Op::Add:
            os << "(";
            strNode(*n.a, os);
            os << " + ";
            strNode(*n.b, os);
            os << ")";
            return;
        case Op::Sub:
            os << "(";
            strNode(*n.a, os);
            os << " - ";
            strNode(*n.b, os);
            os << ")";
            return;
        case Op::Mul:
            os << "(";
            strNode(*n.a, os);
            os << " * ";
            strNode(*n.b, os);
            os << ")";
            return;
        case Op::Div:
            os << "(";
            strNode(*n.a, os);
            os << " / ";
            strNode(*n.b, os);
            os << ")";
            return;
        case Op::Neg:
            os << "(-";
            strNode(*n.a, os);
            os << ")";
            return;
        case Op::Sin:
        case Op::Cos:
        case Op::Tan:
        case Op::Cot:
        case Op::Sqrt:
        case Op::Conj: {
            const char* f = n.op == Op::Sin   ? "sin"
                            : n.op == Op::Cos ? "cos"
                            : n.op == Op::Tan ? "tan"
                            : n.op == Op::Cot ? "cot"
                            : n.op == Op::Sqrt ? "sqrt"
                                               : "conj";
            os << f << "(";
            strNode(*n.a, os);
            os << ")";
            return;
        }
    }
}

void collectNode(const ScalarExpr::Node& n, std::set<std::string>& out) {
    if (n.op == Op::Param) out.insert(n.name);
    if (n.a) collectNode(*n.a, out);
    if (n.b) collectNode(*n.b, out);
}

NodePtr conjNode(const NodePtr& n) {
    switch (n->op) {
        case Op::Const:
            return makeConst(std::conj(n->value));
        case Op::Param:
            return n;  // parameters are real
        case Op::Conj:
            return n->a;
        default: {
            if (n->b) return makeBinary(n->op, conjNode(n->a), conjNode(n->b));
            if (n->op == Op::Sqrt) return makeUnary(Op::Conj, n);  // branch cut
            return makeUnary(n->op, conjNode(n->a));
        }
    }
}

// --- tiny recursive-descent parser for the canonical text form ---

struct Parser {
    const std::string& s;
    size_t pos = 0;

    explicit Parser(const std::string& text) : s(text) {}

    void skipWs() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool consume(char c) {
        skipWs();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& what) {
        throw std::invalid_argument("scalar parse error at " + std::to_string(pos) + ": " + what);
    }

    NodePtr parseExpr() {
        NodePtr lhs = parseTerm();
        for (;;) {
            skipWs();
            if (consume('+'))
                lhs = makeBinary(Op::Add, lhs, parseTerm());
            else if (consume('-'))
                lhs = makeBinary(Op::Sub, lhs, parseTerm());
            else
                return lhs;
        }
    }
    NodePtr parseTerm() {
        NodePtr lhs = parseFactor();
        for (;;) {
            skipWs();
            if (consume('*'))
                lhs = makeBinary(Op::Mul, lhs, parseFactor());
            else if (consume('/'))
                lhs = makeBinary(Op::Div, lhs, parseFactor());
            else
                return lhs;
        }
    }
    NodePtr parseFactor() {
        skipWs();
        if (consume('-')) return makeUnary(Op::Neg, parseFactor());
        if (consume('(')) {
            NodePtr inner = parseExpr();
            if (!consume(')')) fail("expected ')'");
            return inner;
        }
        if (pos >= s.size()) fail("unexpected end of input");
        char c = s[pos];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            size_t consumed = 0;
            double v = std::stod(s.substr(pos), &consumed);
            pos += consumed;
            return makeConst(Complex(v, 0.0));
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = pos;
            while (pos < s.size() &&
                   (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
                ++pos;
            std::string name = s.substr(start, pos - start);
            skipWs();
            if (pos < s.size() && s[pos] == '(') {
                ++pos;
                NodePtr arg = parseExpr();
                if (!consume(')')) fail("expected ')'");
                if (name == "sin") return makeUnary(Op::Sin, arg);
                if (name == "cos") return makeUnary(Op::Cos, arg);
                if (name == "tan") return makeUnary(Op::Tan, arg);
                if (name == "cot") return makeUnary(Op::Cot, arg);
                if (name == "sqrt") return makeUnary(Op::Sqrt, arg);
                if (name == "conj") return makeUnary(Op::Conj, arg);
                fail("unknown function " + name);
            }
            if (name == "i") return makeConst(Complex(0.0, 1.0));
            auto n = std::make_shared<ScalarExpr::Node>();
            n->op = Op::Param;
            n->name = name;
            return n;
        }
        fail(std::string("unexpected character '") + c + "'");
    }
};

}  // namespace

ScalarExpr::ScalarExpr() : node_(makeConst(Complex(0.0, 0.0))) {}
ScalarExpr::ScalarExpr(double value) : node_(makeConst(Complex(value, 0.0))) {}
ScalarExpr::ScalarExpr(const Complex& value) : node_(makeConst(value)) {}
ScalarExpr::ScalarExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

ScalarExpr ScalarExpr::param(const std::string& name) {
    auto n = std::make_shared<Node>();
    n->op = Op::Param;
    n->name = name;
    return ScalarExpr(n);
}

Complex ScalarExpr::eval(const Assignment& a) const {
    Complex v = evalNode(*node_, a);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw DomainError("non-finite scalar value");
    return v;
}

ScalarExpr ScalarExpr::conj() const { return ScalarExpr(conjNode(node_)); }

bool ScalarExpr::isConstant(Complex* value) const {
    if (node_->op != Op::Const) return false;
    if (value) *value = node_->value;
    return true;
}

bool ScalarExpr::isZero(double tol) const {
    Complex v;
    return isConstant(&v) && std::abs(v) <= tol;
}

std::string ScalarExpr::str() const {
    std::ostringstream os;
    strNode(*node_, os);
    return os.str();
}

void ScalarExpr::collectParams(std::set<std::string>& out) const { collectNode(*node_, out); }

ScalarExpr ScalarExpr::parse(const std::string& text) {
    Parser p(text);
    NodePtr n = p.parseExpr();
    p.skipWs();
    if (p.pos != text.size()) p.fail("trailing input");
    return ScalarExpr(n);
}

ScalarExpr operator+(const ScalarExpr& a, const ScalarExpr& b) {
    if (isConstVal(a.node_, Complex(0, 0))) return b;
    if (isConstVal(b.node_, Complex(0, 0))) return a;
    return ScalarExpr(makeBinary(Op::Add, a.node_, b.node_));
}
ScalarExpr operator-(const ScalarExpr& a, const ScalarExpr& b) {
    if (isConstVal(b.node_, Complex(0, 0))) return a;
    if (isConstVal(a.node_, Complex(0, 0))) return -b;
    return ScalarExpr(makeBinary(Op::Sub, a.node_, b.node_));
}
ScalarExpr operator*(const ScalarExpr& a, const ScalarExpr& b) {
    if (isConstVal(a.node_, Complex(0, 0)) || isConstVal(b.node_, Complex(0, 0)))
        return ScalarExpr();
    if (isConstVal(a.node_, Complex(1, 0))) return b;
    if (isConstVal(b.node_, Complex(1, 0))) return a;
    return ScalarExpr(makeBinary(Op::Mul, a.node_, b.node_));
}
ScalarExpr operator/(const ScalarExpr& a, const ScalarExpr& b) {
    if (isConstVal(b.node_, Complex(1, 0))) return a;
    return ScalarExpr(makeBinary(Op::Div, a.node_, b.node_));
}
ScalarExpr operator-(const ScalarExpr& a) { return ScalarExpr(makeUnary(Op::Neg, a.node_)); }
ScalarExpr sin(const ScalarExpr& a) { return ScalarExpr(makeUnary(Op::Sin, a.node_)); }
ScalarExpr cos(const ScalarExpr& a) { return ScalarExpr(makeUnary(Op::Cos, a.node_)); }
ScalarExpr tan(const ScalarExpr& a) { return ScalarExpr(makeUnary(Op::Tan, a.node_)); }
ScalarExpr cot(const ScalarExpr& a) { return ScalarExpr(makeUnary(Op::Cot, a.node_)); }
ScalarExpr sqrt(const ScalarExpr& a) { return ScalarExpr(makeUnary(Op::Sqrt, a.node_)); }

}  // namespace bellforge
