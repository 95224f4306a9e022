#include <algorithm>
#include <stdexcept>
#include <string>

#include <Eigen/QR>

#include "scsr/itea.hpp"

namespace scsr::itea {

namespace {

bool allowed_transform(UnaryFn f)
{
    return std::find(std::begin(kTransforms), std::end(kTransforms), f) != std::end(kTransforms);
}

Eigen::ArrayXd map(UnaryFn f, Eigen::ArrayXd const& p)
{
    return p.unaryExpr([f](double v) { return apply(f, v); });
}

// first and second derivative of the transform, pointwise
Eigen::ArrayXd d1(UnaryFn f, Eigen::ArrayXd const& p)
{
    switch (f) {
    case UnaryFn::Id: return Eigen::ArrayXd::Ones(p.size());
    case UnaryFn::Sin: return map(UnaryFn::Cos, p);
    case UnaryFn::Cos: return -map(UnaryFn::Sin, p);
    case UnaryFn::Tanh: return 1.0 - map(UnaryFn::Tanh, p).square();
    case UnaryFn::Sqrt: return 0.5 / p.sqrt();
    case UnaryFn::Log: return 1.0 / p;
    case UnaryFn::Log1p: return 1.0 / (1.0 + p);
    case UnaryFn::Exp: return map(UnaryFn::Exp, p);
    default: throw std::logic_error("transform outside the IT function set");
    }
}

Eigen::ArrayXd d2(UnaryFn f, Eigen::ArrayXd const& p)
{
    switch (f) {
    case UnaryFn::Id: return Eigen::ArrayXd::Zero(p.size());
    case UnaryFn::Sin: return -map(UnaryFn::Sin, p);
    case UnaryFn::Cos: return -map(UnaryFn::Cos, p);
    case UnaryFn::Tanh: {
        Eigen::ArrayXd const t = map(UnaryFn::Tanh, p);
        return -2.0 * t * (1.0 - t.square());
    }
    case UnaryFn::Sqrt: return -0.25 / (p * p.sqrt());
    case UnaryFn::Log: return -1.0 / p.square();
    case UnaryFn::Log1p: return -1.0 / (1.0 + p).square();
    case UnaryFn::Exp: return map(UnaryFn::Exp, p);
    default: throw std::logic_error("transform outside the IT function set");
    }
}

// interval images of the transform derivatives
Interval d1(UnaryFn f, Interval const& p)
{
    switch (f) {
    case UnaryFn::Id: return Interval::point(1.0);
    case UnaryFn::Sin: return cos(p);
    case UnaryFn::Cos: return -sin(p);
    case UnaryFn::Tanh: return 1.0 - square(tanh(p));
    case UnaryFn::Sqrt: return 0.5 / sqrt(p);
    case UnaryFn::Log: return 1.0 / p;
    case UnaryFn::Log1p: return 1.0 / (1.0 + p);
    case UnaryFn::Exp: return exp(p);
    default: throw std::logic_error("transform outside the IT function set");
    }
}

Interval d2(UnaryFn f, Interval const& p)
{
    switch (f) {
    case UnaryFn::Id: return Interval::point(0.0);
    case UnaryFn::Sin: return -sin(p);
    case UnaryFn::Cos: return -cos(p);
    case UnaryFn::Tanh: {
        auto const t = tanh(p);
        return -2.0 * t * (1.0 - square(t));
    }
    case UnaryFn::Sqrt: return -0.25 / (p * sqrt(p));
    case UnaryFn::Log: return -1.0 / square(p);
    case UnaryFn::Log1p: return -1.0 / square(1.0 + p);
    case UnaryFn::Exp: return exp(p);
    default: throw std::logic_error("transform outside the IT function set");
    }
}

std::vector<int> shifted(std::span<int const> k, int var, int delta)
{
    std::vector<int> out(k.begin(), k.end());
    out[static_cast<std::size_t>(var)] += delta;
    return out;
}

void check_order(int order)
{
    if (order != 1 && order != 2) {
        throw std::invalid_argument("IT derivatives support order 1 and 2 only");
    }
}

} // namespace

int ITTerm::length() const noexcept
{
    return static_cast<int>(std::count_if(strengths.begin(), strengths.end(), [](int k) { return k != 0; }));
}

void ITExpression::validate(int dim) const
{
    if (terms.empty()) {
        throw std::invalid_argument("IT expression needs at least one term");
    }
    if (weights.size() != terms.size()) {
        throw std::invalid_argument("IT expression has " + std::to_string(terms.size()) + " terms but "
            + std::to_string(weights.size()) + " weights");
    }
    for (auto const& t : terms) {
        if (static_cast<int>(t.strengths.size()) != dim) {
            throw std::invalid_argument("IT term strength vector does not match the input dimension");
        }
        if (t.length() == 0) {
            throw std::invalid_argument("IT term with all-zero strengths");
        }
        if (!allowed_transform(t.transform)) {
            throw std::invalid_argument("transform '" + std::string(to_string(t.transform)) + "' is not an IT transform");
        }
    }
}

Eigen::ArrayXd monomial(std::span<int const> strengths, Eigen::MatrixXd const& X)
{
    Eigen::ArrayXd out = Eigen::ArrayXd::Ones(X.rows());
    for (std::size_t j = 0; j < strengths.size(); ++j) {
        int const k = strengths[j];
        if (k == 0) {
            continue;
        }
        auto const col = X.col(static_cast<Eigen::Index>(j)).array();
        out *= col.pow(static_cast<double>(k));
    }
    return out;
}

Interval monomial_interval(std::span<int const> strengths, Box const& box)
{
    Interval out = Interval::point(1.0);
    for (std::size_t j = 0; j < strengths.size(); ++j) {
        if (strengths[j] != 0) {
            out = ia_mul(out, ia_pow_int(box.at(j), strengths[j]));
        }
    }
    return out;
}

Eigen::ArrayXd term_values(ITTerm const& t, Eigen::MatrixXd const& X)
{
    Eigen::ArrayXd p = monomial(t.strengths, X);
    return p.unaryExpr([f = t.transform](double v) { return apply(f, v); });
}

Eigen::ArrayXd it_eval(ITExpression const& f, Eigen::MatrixXd const& X)
{
    Eigen::ArrayXd out = Eigen::ArrayXd::Constant(X.rows(), f.intercept);
    for (std::size_t i = 0; i < f.terms.size(); ++i) {
        out += f.weights[i] * term_values(f.terms[i], X);
    }
    return out;
}

Eigen::ArrayXd it_partial(ITExpression const& f, Eigen::MatrixXd const& X, int var, int order)
{
    check_order(order);
    Eigen::ArrayXd out = Eigen::ArrayXd::Zero(X.rows());
    auto const j = static_cast<std::size_t>(var);
    for (std::size_t i = 0; i < f.terms.size(); ++i) {
        auto const& t = f.terms[i];
        int const k = t.strengths.at(j);
        if (k == 0) {
            continue;
        }
        auto const kd = static_cast<double>(k);
        Eigen::ArrayXd const p = monomial(t.strengths, X);
        // d p / d x_j = k * q
        Eigen::ArrayXd const q = monomial(shifted(t.strengths, var, -1), X);
        if (order == 1) {
            out += f.weights[i] * kd * d1(t.transform, p) * q;
        } else {
            Eigen::ArrayXd const r = monomial(shifted(t.strengths, var, -2), X);
            out += f.weights[i] * (d2(t.transform, p) * (kd * q).square() + kd * (kd - 1.0) * d1(t.transform, p) * r);
        }
    }
    return out;
}

Interval it_image(ITExpression const& f, Box const& box)
{
    Interval out = Interval::point(f.intercept);
    for (std::size_t i = 0; i < f.terms.size(); ++i) {
        auto const& t = f.terms[i];
        out = out + f.weights[i] * ia_unary(t.transform, monomial_interval(t.strengths, box));
    }
    return out;
}

Interval it_derivative_interval(ITExpression const& f, int var, Box const& box, int order)
{
    check_order(order);
    Interval out = Interval::point(0.0);
    auto const j = static_cast<std::size_t>(var);
    for (std::size_t i = 0; i < f.terms.size(); ++i) {
        auto const& t = f.terms[i];
        int const k = t.strengths.at(j);
        if (k == 0) {
            continue;
        }
        auto const p = monomial_interval(t.strengths, box);
        auto const q = monomial_interval(shifted(t.strengths, var, -1), box);
        Interval term;
        if (order == 1) {
            term = d1(t.transform, p) * (static_cast<double>(k) * q);
        } else {
            // (k q)^2 as a single monomial with doubled strengths
            std::vector<int> q2(t.strengths.begin(), t.strengths.end());
            for (auto& s : q2) {
                s *= 2;
            }
            q2[j] = 2 * (k - 1);
            auto const kq_sq = static_cast<double>(k) * static_cast<double>(k) * monomial_interval(q2, box);
            auto const r = monomial_interval(shifted(t.strengths, var, -2), box);
            term = d2(t.transform, p) * kq_sq + d1(t.transform, p) * (static_cast<double>(k * (k - 1)) * r);
        }
        out = out + f.weights[i] * term;
    }
    return out;
}

std::vector<ITTerm> deduplicate(std::vector<ITTerm> terms)
{
    std::vector<ITTerm> out;
    out.reserve(terms.size());
    for (auto& t : terms) {
        if (t.length() == 0) {
            continue;
        }
        if (std::find(out.begin(), out.end(), t) == out.end()) {
            out.push_back(std::move(t));
        }
    }
    return out;
}

OlsFit fit_weights_ols(std::span<ITTerm const> terms, Eigen::MatrixXd const& X, Eigen::ArrayXd const& y)
{
    OlsFit fit;
    auto const n = X.rows();
    auto const m = static_cast<Eigen::Index>(terms.size());
    Eigen::MatrixXd A(n, m + 1);
    A.col(0).setOnes();
    for (Eigen::Index i = 0; i < m; ++i) {
        A.col(i + 1) = term_values(terms[static_cast<std::size_t>(i)], X).matrix();
    }
    if (!A.allFinite()) {
        fit.weights.assign(terms.size(), 0.0);
        return fit;
    }
    Eigen::VectorXd scale(m + 1);
    for (Eigen::Index c = 0; c <= m; ++c) {
        double const norm = A.col(c).norm();
        scale(c) = norm > 0.0 ? norm : 1.0;
        A.col(c) /= scale(c);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    Eigen::VectorXd const beta = qr.solve(y.matrix()).cwiseQuotient(scale);
    if (!beta.allFinite()) {
        fit.weights.assign(terms.size(), 0.0);
        return fit;
    }
    fit.intercept = beta(0);
    fit.weights.assign(beta.data() + 1, beta.data() + 1 + m);
    A.array().rowwise() *= scale.transpose().array();
    Eigen::ArrayXd const resid = (A * beta).array() - y;
    fit.rmse = std::sqrt(resid.square().mean());
    fit.ok = std::isfinite(fit.rmse);
    if (!fit.ok) {
        fit.rmse = std::numeric_limits<double>::infinity();
    }
    return fit;
}

std::vector<int> positive_interaction(std::span<int const> a, std::span<int const> b)
{
    std::vector<int> out(a.begin(), a.end());
    for (std::size_t j = 0; j < out.size(); ++j) {
        out[j] += b[j];
    }
    return out;
}

std::vector<int> negative_interaction(std::span<int const> a, std::span<int const> b)
{
    std::vector<int> out(a.begin(), a.end());
    for (std::size_t j = 0; j < out.size(); ++j) {
        out[j] -= b[j];
    }
    return out;
}

} // namespace scsr::itea
