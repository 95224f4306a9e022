#include <doctest.h>

#include <cmath>

#include "scsr/localopt.hpp"
#include "test_util.hpp"

using namespace scsr;

namespace {

Expression x(int i) { return Expression::variable(i); }
Expression p(double v) { return Expression::parameter(v); }
Expression mul(Expression const& a, Expression const& b) { return Expression::binary(BinaryOp::Mul, a, b); }

Eigen::MatrixXd grid(int n, double lo, double hi)
{
    Eigen::MatrixXd X(n, 1);
    for (int i = 0; i < n; ++i) {
        X(i, 0) = lo + (hi - lo) * i / (n - 1);
    }
    return X;
}

double sse(Expression const& e, Eigen::MatrixXd const& X, Eigen::ArrayXd const& y)
{
    return (evaluate(e, X) - y).square().sum();
}

} // namespace

TEST_CASE("linear parameter recovered")
{
    auto const X = grid(50, -2.0, 2.0);
    Eigen::ArrayXd const y = 3.0 * X.col(0).array();
    auto const r = optimize_parameters(mul(p(1.0), x(0)), LMConfig{}, X, y);
    REQUIRE(r.expression.parameter_count() == 1);
    CHECK(std::abs(extract_params(r.expression)[0] - 3.0) < 1e-6);
    CHECK(r.final_sse <= r.initial_sse);
}

TEST_CASE("zero iterations is a no-op")
{
    auto const X = grid(20, 0.0, 1.0);
    Eigen::ArrayXd const y = 3.0 * X.col(0).array();
    LMConfig cfg;
    cfg.max_iterations = 0;
    auto const e = mul(p(1.0), x(0));
    CHECK(optimize(e, cfg, X, y) == e);
}

TEST_CASE("exponential rate recovered")
{
    auto const X = grid(100, -2.0, 2.0);
    Eigen::ArrayXd const y = (0.5 * X.col(0).array()).exp();
    auto const e = Expression::unary(UnaryFn::Exp, mul(p(0.1), x(0)));
    LMConfig cfg;
    cfg.max_iterations = 50;
    auto const r = optimize_parameters(e, cfg, X, y);
    CHECK(std::abs(extract_params(r.expression)[0] - 0.5) < 1e-4);
}

TEST_CASE("optimization never worsens the fit and keeps the structure")
{
    Rng rng(11);
    Eigen::MatrixXd X(60, 2);
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        X(i, 0) = uniform_real(rng, -2.0, 2.0);
        X(i, 1) = uniform_real(rng, 0.5, 3.0);
    }
    Eigen::ArrayXd const y = X.col(0).array().sin() * X.col(1).array() + 0.3;
    int improved = 0;
    for (int trial = 0; trial < 200; ++trial) {
        auto const e = ptc2_random(20, 8, 2, rng);
        auto const r = optimize_parameters(e, LMConfig{}, X, y);
        // same node kinds and symbols, only parameter values may differ
        REQUIRE(r.expression.length() == e.length());
        for (int i = 0; i < e.length(); ++i) {
            CHECK(r.expression[i].kind == e[i].kind);
            if (e[i].kind != NodeKind::Parameter) {
                CHECK(r.expression[i].value == e[i].value);
            }
        }
        double const before = sse(e, X, y);
        double const after = sse(r.expression, X, y);
        if (std::isfinite(before)) {
            CHECK(after <= before * (1 + 1e-12));
            improved += after < before * 0.999;
        }
    }
    CHECK(improved > 20);
}

TEST_CASE("symbolic parameter Jacobian matches finite differences")
{
    Rng rng(12);
    Eigen::MatrixXd X(10, 2);
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        X(i, 0) = uniform_real(rng, 0.2, 2.0);
        X(i, 1) = uniform_real(rng, 0.2, 2.0);
    }
    int checked = 0;
    for (int trial = 0; trial < 300; ++trial) {
        auto const e = ptc2_random(15, 6, 2, rng);
        auto theta = extract_params(e);
        if (theta.empty()) {
            continue;
        }
        for (auto& t : theta) {
            t = uniform_real(rng, -1.5, 1.5);
        }
        auto const J = parameter_jacobian(e, X, theta);
        if (!J.allFinite()) {
            continue;
        }
        REQUIRE(J.cols() == static_cast<Eigen::Index>(theta.size()));
        for (std::size_t k = 0; k < theta.size(); ++k) {
            for (double const h : {1e-6}) {
                auto plus = theta;
                auto minus = theta;
                plus[k] += h;
                minus[k] -= h;
                Eigen::ArrayXd const fd = (evaluate(e, X, plus) - evaluate(e, X, minus)) / (2 * h);
                auto plus2 = theta;
                auto minus2 = theta;
                plus2[k] += h / 10;
                minus2[k] -= h / 10;
                Eigen::ArrayXd const fd2 = (evaluate(e, X, plus2) - evaluate(e, X, minus2)) / (h / 5);
                for (Eigen::Index i = 0; i < X.rows(); ++i) {
                    double const scale = std::max(1.0, std::abs(fd(i)));
                    // skip points where the difference quotient itself is unstable
                    if (!std::isfinite(fd(i)) || std::abs(fd(i) - fd2(i)) > 1e-5 * scale) {
                        continue;
                    }
                    CHECK(std::abs(J(i, static_cast<Eigen::Index>(k)) - fd(i)) <= 1e-4 * scale);
                    ++checked;
                }
            }
        }
    }
    CHECK(checked > 500);
}
