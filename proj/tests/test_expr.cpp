#include <doctest.h>

#include <numbers>

#include "scsr/expr.hpp"
#include "fuzz_util.hpp"
#include "test_util.hpp"

using namespace scsr;
using scsr::testing::inside;
using namespace scsr::testing;

namespace {

Expression x(int i) { return Expression::variable(i); }
Expression p(double v) { return Expression::parameter(v); }
Expression add(Expression const& a, Expression const& b) { return Expression::binary(BinaryOp::Add, a, b); }
Expression mul(Expression const& a, Expression const& b) { return Expression::binary(BinaryOp::Mul, a, b); }
Expression div(Expression const& a, Expression const& b) { return Expression::binary(BinaryOp::Div, a, b); }
Expression un(UnaryFn f, Expression const& a) { return Expression::unary(f, a); }

Eigen::MatrixXd rows(std::initializer_list<std::initializer_list<double>> r)
{
    Eigen::MatrixXd X(static_cast<Eigen::Index>(r.size()), static_cast<Eigen::Index>(r.begin()->size()));
    Eigen::Index i = 0;
    for (auto const& row : r) {
        Eigen::Index j = 0;
        for (double v : row) {
            X(i, j++) = v;
        }
        ++i;
    }
    return X;
}

} // namespace

TEST_CASE("point evaluation")
{
    CHECK(evaluate(add(x(0), x(1)), rows({{2, 3}}))(0) == 5.0);
    CHECK(evaluate(div(x(0), x(0)), rows({{0}}))(0) == 1.0);
    auto const sq = evaluate(un(UnaryFn::Square, x(0)), rows({{1}, {-2}}));
    CHECK(sq(0) == 1.0);
    CHECK(sq(1) == 4.0);
    CHECK(std::isnan(evaluate(un(UnaryFn::Sqrt, x(0)), rows({{-1}}))(0)));
    CHECK(std::isnan(evaluate(un(UnaryFn::Log, x(0)), rows({{-1}}))(0)));
}

TEST_CASE("protected division guard")
{
    auto const e = div(p(3.0), x(0));
    auto const v = evaluate(e, rows({{0.0}, {1e-13}, {2.0}}));
    CHECK(v(0) == kDivGuardValue);
    CHECK(v(1) == kDivGuardValue);
    CHECK(v(2) == 1.5);
    auto const hit = guarded_rows(e, rows({{0.0}, {2.0}}));
    CHECK(hit[0]);
    CHECK_FALSE(hit[1]);
}

TEST_CASE("zero times an overflowed factor is zero")
{
    auto const e = mul(x(0), un(UnaryFn::Exp, x(1)));
    auto const v = evaluate(e, rows({{0.0, 1000.0}, {2.0, 1000.0}, {0.0, 1.0}}));
    CHECK(v(0) == 0.0);
    CHECK(std::isinf(v(1)));
    CHECK(v(2) == 0.0);
    CHECK(evaluate_interval(e, {Interval::point(0.0), Interval::point(1000.0)}).contains(0.0));
    CHECK(std::isnan(evaluate(mul(x(0), x(1)), rows({{0.0, std::nan("")}}))(0)));
}

TEST_CASE("chain-rule quotients are not protected")
{
    // d/dx log(x) = 1/x even below the division guard
    auto const d = differentiate(un(UnaryFn::Log, x(0)), 0);
    CHECK(evaluate(d, rows({{1e-13}}))(0) == doctest::Approx(1e13));
    auto const q = differentiate(div(p(1.0), x(0)), 0);
    CHECK(evaluate(q, rows({{2.0}}))(0) == doctest::Approx(-0.25));
    CHECK(evaluate(un(UnaryFn::Recip, x(0)), rows({{4.0}}))(0) == 0.25);
}

TEST_CASE("structure bookkeeping")
{
    auto const e = add(mul(x(0), p(1.5)), un(UnaryFn::Sqrt, x(1)));
    CHECK(e.length() == 6);
    CHECK(e.depth() == 3);
    CHECK(e.parameter_count() == 1);
    CHECK(to_infix(e) == "((x0 * 1.5) + sqrt(x1))");
    CHECK(e.subtree(e.left_child(e.root())) == mul(x(0), p(1.5)));
    CHECK(e.replace_subtree(e.left_child(e.root()), x(2)) == add(x(2), un(UnaryFn::Sqrt, x(1))));
    CHECK_THROWS_AS(Expression({Node::variable(0), Node::variable(1)}), std::invalid_argument);
}

TEST_CASE("parameters extract and update")
{
    auto const e = add(mul(p(1.0), x(0)), p(-2.0));
    CHECK(extract_params(e) == ParameterVector{1.0, -2.0});
    CHECK(update_params(e, extract_params(e)) == e);
    auto const no_params = add(x(0), x(1));
    CHECK(update_params(no_params, {}) == no_params);
    std::vector<double> const theta{5.0, 6.0};
    CHECK(extract_params(update_params(e, theta)) == theta);
    CHECK_THROWS_AS(update_params(e, std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("parameter order is pre-order")
{
    // pre-order visits the left subtree's parameters before the right subtree's
    auto const e = mul(add(p(1), un(UnaryFn::Exp, p(2))), add(x(0), p(3)));
    CHECK(extract_params(e) == ParameterVector{1, 2, 3});
}

TEST_CASE("symbolic derivatives")
{
    auto const d1 = differentiate(mul(x(0), x(1)), 0);
    CHECK(evaluate(d1, rows({{2.0, 7.0}}))(0) == 7.0);
    CHECK(d1 == x(1));

    auto const d2 = differentiate(un(UnaryFn::Square, x(0)), 0);
    CHECK(to_infix(d2) == "({2} * x0)");

    auto const e = un(UnaryFn::Sin, mul(x(0), x(0)));
    double const fd = central_difference(e, {0.7}, 0, 1e-5);
    double const sym = evaluate_point(differentiate(e, 0), std::vector<double>{0.7});
    CHECK(std::abs(sym - fd) / std::abs(fd) < 1e-6);

    // independent variable drops out entirely
    CHECK(differentiate(un(UnaryFn::Log, x(1)), 0) == Expression::constant(0.0));

    auto const second = differentiate(mul(mul(x(0), x(0)), x(0)), 0, 2);
    CHECK(evaluate_point(second, std::vector<double>{2.0}) == doctest::Approx(12.0));
}

TEST_CASE("derivatives agree with finite differences on random trees")
{
    Rng rng(1234);
    int checked = 0;
    int failures = 0;
    for (int t = 0; t < 300; ++t) {
        auto const e = ptc2_random(30, 10, 3, rng);
        auto const var = uniform_int(rng, 0, 2);
        auto const d = differentiate(e, var);
        for (int k = 0; k < 100; ++k) {
            std::vector<double> pt{uniform_real(rng, 0.5, 2.0), uniform_real(rng, 0.5, 2.0), uniform_real(rng, 0.5, 2.0)};
            if (min_abs_denominator(e, pt) < 0.1) {
                continue;
            }
            double const h = 1e-5;
            double const fd = central_difference(e, pt, var, h);
            double const sym = evaluate_point(d, pt);
            if (!std::isfinite(fd) || !std::isfinite(sym) || std::abs(sym) > 1e6) {
                continue;
            }
            // the finite-difference oracle itself is unreliable where the function
            // oscillates faster than the stencil resolves
            double const fd_fine = central_difference(e, pt, var, h / 10);
            if (std::abs(fd - fd_fine) > 1e-5 * std::max(1.0, std::abs(fd))) {
                continue;
            }
            // the guard region of a protected division was crossed by the stencil
            auto lo = pt;
            lo[var] -= h;
            auto hi = pt;
            hi[var] += h;
            if (min_abs_denominator(e, lo) < 0.1 || min_abs_denominator(e, hi) < 0.1) {
                continue;
            }
            ++checked;
            double const err = std::abs(sym - fd) / std::max(1.0, std::abs(fd));
            if (err >= 1e-4) {
                ++failures;
            }
        }
    }
    CHECK(checked > 5000);
    CHECK(failures == 0);
}

TEST_CASE("interval evaluation")
{
    Box const box{{1.0, 3.0}};
    auto const e = add(x(0), mul(p(-1.0), x(0)));
    CHECK(evaluate_interval(e, box) == Interval{-2.0, 2.0});
    CHECK(evaluate_interval(p(3.5), box) == Interval{3.5, 3.5});
    auto const ex = evaluate_interval(un(UnaryFn::Exp, x(0)), Box{{0.0, 1.0}});
    CHECK(ex.lo == 1.0);
    CHECK(ex.hi == doctest::Approx(std::numbers::e));
    CHECK_FALSE(evaluate_interval(div(x(0), x(0)), Box{{-1.0, 1.0}}).defined);
}

TEST_CASE("interval containment on random trees")
{
    Rng rng(99);
    int failures = 0;
    int defined = 0;
    for (int t = 0; t < 1000; ++t) {
        auto const e = ptc2_random(50, 20, 2, rng);
        Box box;
        for (int j = 0; j < 2; ++j) {
            box.push_back(scsr::testing::random_interval(rng, -3.0, 3.0));
        }
        auto const iv = evaluate_interval(e, box);
        if (!iv.defined) {
            continue;
        }
        ++defined;
        Eigen::MatrixXd X(1000, 2);
        for (int r = 0; r < 1000; ++r) {
            X(r, 0) = uniform_real(rng, box[0].lo, box[0].hi);
            X(r, 1) = uniform_real(rng, box[1].lo, box[1].hi);
        }
        auto const v = evaluate(e, X);
        auto const guarded = guarded_rows(e, X);
        for (int r = 0; r < 1000; ++r) {
            if (!std::isfinite(v(r)) && overflowed(e, X.row(r))) {
                continue;
            }
            if (!guarded[r] && !inside(iv, v(r), 1e-9)) {
                ++failures;
            }
        }
    }
    CHECK(defined > 100);
    CHECK(failures == 0);
}

TEST_CASE("PTC2 respects limits")
{
    Rng rng(5);
    CHECK(ptc2_random(1, 20, 3, rng).length() == 1);
    for (int i = 0; i < 100000; ++i) {
        int const max_len = uniform_int(rng, 1, 50);
        int const max_depth = uniform_int(rng, 1, 20);
        auto const e = ptc2_random(max_len, max_depth, 4, rng);
        REQUIRE(e.length() <= max_len);
        REQUIRE(e.depth() <= max_depth);
        REQUIRE(e.max_variable_index() < 4);
    }
}

TEST_CASE("PTC2 length distribution")
{
    Rng rng(17);
    double total = 0.0;
    constexpr int n = 10000;
    for (int i = 0; i < n; ++i) {
        total += ptc2_random(50, 20, 3, rng).length();
    }
    double const mean = total / n;
    CHECK(mean >= 15.0);
    CHECK(mean <= 45.0);
}

TEST_CASE("infix text round trip")
{
    Rng rng(23);
    for (int i = 0; i < 2000; ++i) {
        auto const e = ptc2_random(50, 20, 5, rng);
        auto const back = parse_infix(to_infix(e));
        REQUIRE(back == e);
    }
    auto const d = differentiate(parse_infix("(sqrt(x0) / x1)"), 1);
    CHECK(parse_infix(to_infix(d)) == d);
    CHECK_THROWS_AS(parse_infix("(x0 + )"), std::invalid_argument);
    CHECK_THROWS_AS(parse_infix("asin(x0)"), std::invalid_argument);
    CHECK_THROWS_AS(parse_infix("(x0 + x1) x2"), std::invalid_argument);
}
