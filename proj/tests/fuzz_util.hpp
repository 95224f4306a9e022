#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Core>

#include "scsr/expr.hpp"
#include "scsr/interval.hpp"
#include "scsr/random.hpp"

// Oracles shared by the fuzz tests and the acceptance run.
namespace scsr::testing {

inline Eigen::MatrixXd sample_box(Rng& rng, Box const& box, Eigen::Index n)
{
    Eigen::MatrixXd X(n, static_cast<Eigen::Index>(box.size()));
    for (Eigen::Index i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < box.size(); ++j) {
            X(i, static_cast<Eigen::Index>(j)) = uniform_real(rng, box[j].lo, box[j].hi);
        }
    }
    return X;
}

inline double central_difference(Expression const& e, std::vector<double> pt, int var, double h)
{
    auto plus = pt;
    auto minus = pt;
    plus[var] += h;
    minus[var] -= h;
    return (evaluate_point(e, plus) - evaluate_point(e, minus)) / (2 * h);
}

// smallest |denominator| over all protected divisions at a point
inline double min_abs_denominator(Expression const& e, std::vector<double> const& pt)
{
    double m = INFINITY;
    for (int i = 0; i < e.length(); ++i) {
        if (e[i].kind == NodeKind::Binary && e[i].op == BinaryOp::Div) {
            m = std::min(m, std::abs(evaluate_point(e.subtree(e.right_child(i)), pt)));
        }
    }
    return m;
}

// some intermediate value overflowed to infinity at this point
inline bool overflowed(Expression const& e, Eigen::MatrixXd const& row)
{
    for (int i = 0; i < e.length(); ++i) {
        if (std::isinf(evaluate(e.subtree(i), row)(0))) {
            return true;
        }
    }
    return false;
}

} // namespace scsr::testing
