#include <cmath>
#include <numbers>

#include "bellforge/scalar.hpp"
#include "doctest.h"

using namespace bellforge;

namespace {
constexpr double kPi = std::numbers::pi;
ScalarExpr P(const char* n) { return ScalarExpr::param(n); }
}  // namespace

TEST_CASE("constants fold and evaluate") {
    ScalarExpr e = ScalarExpr(2.0) * ScalarExpr(3.0) + ScalarExpr(1.0);
    Complex v;
    CHECK(e.isConstant(&v));
    CHECK(v == Complex(7.0, 0.0));
    CHECK(e.eval({}) == Complex(7.0, 0.0));
}

TEST_CASE("tan squared at pi/4") {
    ScalarExpr e = tan(P("b")) * tan(P("b"));
    CHECK(std::abs(e.eval({{"b", kPi / 4}}) - Complex(1.0)) < 1e-12);
}

TEST_CASE("pole raises domain error") {
    ScalarExpr e = ScalarExpr(1.0) / (ScalarExpr(2.0) * cos(P("b")));
    CHECK_THROWS_AS(e.eval({{"b", kPi / 2}}), DomainError);
    CHECK(std::abs(e.eval({{"b", 0.0}}) - Complex(0.5)) < 1e-12);
}

TEST_CASE("tangent hyperplane C formula evaluates to 4") {
    // 2 sin(a2) sin(a2-b1-b2) / (sin(a2-b1) sin(a2-b2)) at (pi/2, pi/4, 3pi/4)
    ScalarExpr a2 = P("a2"), b1 = P("b1"), b2 = P("b2");
    ScalarExpr e = ScalarExpr(2.0) * sin(a2) * sin(a2 - b1 - b2) / (sin(a2 - b1) * sin(a2 - b2));
    Assignment asg{{"a2", kPi / 2}, {"b1", kPi / 4}, {"b2", 3 * kPi / 4}};
    // sin(a2-b1-b2) = sin(-pi/2) = -1; sin(a2-b2) = sin(-pi/4) = -1/sqrt2
    CHECK(std::abs(e.eval(asg) - Complex(4.0)) < 1e-12);
}

TEST_CASE("unbound parameter raises") {
    ScalarExpr e = sin(P("x"));
    CHECK_THROWS_AS(e.eval({}), UnboundParameter);
}

TEST_CASE("sqrt of negative raises, sqrt of positive works") {
    ScalarExpr e = sqrt(P("x"));
    CHECK_THROWS_AS(e.eval({{"x", -1.0}}), DomainError);
    CHECK(std::abs(e.eval({{"x", 2.0}}) - Complex(std::sqrt(2.0))) < 1e-14);
}

TEST_CASE("conjugation") {
    ScalarExpr e = ScalarExpr(Complex(0.0, 1.0)) * P("x");
    CHECK(std::abs(e.conj().eval({{"x", 3.0}}) - Complex(0.0, -3.0)) < 1e-14);
    // conj is an involution
    CHECK(std::abs(e.conj().conj().eval({{"x", 3.0}}) - Complex(0.0, 3.0)) < 1e-14);
}

TEST_CASE("str/parse round trip") {
    ScalarExpr exprs[] = {
        ScalarExpr(1.5),
        ScalarExpr(Complex(2.0, -0.5)),
        P("theta") + ScalarExpr(2.0) * cos(P("b1") - P("b2")),
        sqrt(P("x") * P("x") + ScalarExpr(1.0)) / tan(P("y")),
        -cot(P("a")) * sin(P("b")),
    };
    Assignment asg{{"theta", 0.3}, {"b1", 0.7}, {"b2", -0.2}, {"x", 1.1}, {"y", 0.4},
                   {"a", 0.9},     {"b", 1.3}};
    for (const auto& e : exprs) {
        ScalarExpr back = ScalarExpr::parse(e.str());
        CHECK(std::abs(back.eval(asg) - e.eval(asg)) < 1e-12);
    }
}

TEST_CASE("zero detection and pruning arithmetic") {
    CHECK(ScalarExpr().isZero());
    CHECK((P("x") - P("x")).eval({{"x", 2.0}}) == Complex(0.0));
    CHECK((ScalarExpr(1.0) - ScalarExpr(1.0)).isZero());
    CHECK_FALSE(P("x").isZero());
}

TEST_CASE("collectParams") {
    std::set<std::string> names;
    (sin(P("a")) * cos(P("b")) + P("c")).collectParams(names);
    CHECK(names == std::set<std::string>{"a", "b", "c"});
}
