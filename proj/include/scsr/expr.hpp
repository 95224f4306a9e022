#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "scsr/interval.hpp"
#include "scsr/random.hpp"

namespace scsr {

enum class NodeKind : std::uint8_t {
    Constant,  // fixed numeric literal, introduced by differentiation
    Parameter, // tunable coefficient, part of the genotype
    Variable,
    Unary,
    Binary,
};

enum class BinaryOp : std::uint8_t {
    Add,
    Mul,
    Div, // protected division
};

std::string_view to_string(BinaryOp op) noexcept;

struct Node {
    NodeKind kind{NodeKind::Constant};
    UnaryFn fn{UnaryFn::Id};
    BinaryOp op{BinaryOp::Add};
    double value{0.0};
    int index{0}; // variable index, or parameter slot
    int size{1};  // number of nodes in the subtree rooted here

    static Node constant(double v) { return {NodeKind::Constant, UnaryFn::Id, BinaryOp::Add, v, 0, 1}; }
    static Node parameter(double v, int slot = 0) { return {NodeKind::Parameter, UnaryFn::Id, BinaryOp::Add, v, slot, 1}; }
    static Node variable(int i) { return {NodeKind::Variable, UnaryFn::Id, BinaryOp::Add, 0.0, i, 1}; }
    static Node unary(UnaryFn f) { return {NodeKind::Unary, f, BinaryOp::Add, 0.0, 0, 0}; }
    static Node binary(BinaryOp o) { return {NodeKind::Binary, UnaryFn::Id, o, 0.0, 0, 0}; }

    [[nodiscard]] int arity() const noexcept
    {
        return kind == NodeKind::Unary ? 1 : (kind == NodeKind::Binary ? 2 : 0);
    }
    [[nodiscard]] bool is_leaf() const noexcept { return arity() == 0; }
};

/// The unary symbols of the tree-GP function set.
inline constexpr UnaryFn kTreeUnaryFns[] = {
    UnaryFn::Log, UnaryFn::Exp, UnaryFn::Sin, UnaryFn::Cos, UnaryFn::Tanh, UnaryFn::Square, UnaryFn::Sqrt};
inline constexpr BinaryOp kTreeBinaryOps[] = {BinaryOp::Add, BinaryOp::Mul, BinaryOp::Div};

/// Protected division returns this value when |denominator| falls below kDivGuard.
inline constexpr double kDivGuard = 1e-12;
inline constexpr double kDivGuardValue = 1.0;

inline double protected_div(double num, double den) noexcept
{
    return std::abs(den) < kDivGuard ? kDivGuardValue : num / den;
}

/// Immutable expression tree stored in postfix order: children precede their
/// parent and the root is the last node. Parameter slots follow the pre-order
/// numbering of parameter nodes (which, for leaves, is also their postfix order).
class Expression {
public:
    Expression() = default;
    /// Builds from postfix nodes; subtree sizes and parameter slots are recomputed.
    explicit Expression(std::vector<Node> nodes);

    static Expression constant(double v);
    static Expression parameter(double v);
    static Expression variable(int i);
    static Expression unary(UnaryFn f, Expression const& child);
    static Expression binary(BinaryOp op, Expression const& left, Expression const& right);

    /// Keeps parameter slots as given. Used for derivative trees, whose
    /// parameter nodes refer back to slots of the tree they were derived from.
    static Expression with_slots(std::vector<Node> nodes);

    [[nodiscard]] std::span<Node const> nodes() const noexcept { return nodes_; }
    [[nodiscard]] Node const& operator[](std::size_t i) const { return nodes_[i]; }
    [[nodiscard]] int length() const noexcept { return static_cast<int>(nodes_.size()); }
    [[nodiscard]] bool empty() const noexcept { return nodes_.empty(); }
    [[nodiscard]] int root() const noexcept { return length() - 1; }
    [[nodiscard]] int depth() const;
    [[nodiscard]] int parameter_count() const noexcept;
    [[nodiscard]] int max_variable_index() const noexcept; // -1 without variables

    /// Levels below the root for every node, root = 1.
    [[nodiscard]] std::vector<int> node_levels() const;
    /// Height of the subtree rooted at every node, leaf = 1.
    [[nodiscard]] std::vector<int> node_heights() const;

    [[nodiscard]] Expression subtree(int i) const;
    /// Returns a copy with the subtree at i replaced by `branch`.
    [[nodiscard]] Expression replace_subtree(int i, Expression const& branch) const;

    /// Index of the first child (left operand) and last child (right operand).
    [[nodiscard]] int left_child(int i) const noexcept
    {
        return nodes_[i].kind == NodeKind::Binary ? i - 1 - nodes_[i - 1].size : i - 1;
    }
    [[nodiscard]] int right_child(int i) const noexcept { return i - 1; }

    friend bool operator==(Expression const& a, Expression const& b);

private:
    std::vector<Node> nodes_;
};

using ParameterVector = std::vector<double>;

ParameterVector extract_params(Expression const& e);
/// Throws std::invalid_argument when theta's length differs from the parameter count.
Expression update_params(Expression const& e, std::span<double const> theta);

/// Row-wise evaluation. `theta`, when non-empty, overrides parameter values by slot.
Eigen::ArrayXd evaluate(Expression const& e, Eigen::MatrixXd const& X, std::span<double const> theta = {});
double evaluate_point(Expression const& e, std::span<double const> x);
/// True for rows where some protected division hit its guard.
std::vector<bool> guarded_rows(Expression const& e, Eigen::MatrixXd const& X);

Interval evaluate_interval(Expression const& e, Box const& box);

/// Symbolic partial derivative of the given order in variable `var`.
Expression differentiate(Expression const& e, int var, int order = 1);
/// Derivative with respect to the parameter in slot `slot`.
Expression differentiate_param(Expression const& e, int slot);

/// Probabilistic tree creation (PTC2) under length and depth limits.
Expression ptc2_random(int max_len, int max_depth, int dim, Rng& rng);

std::string to_infix(Expression const& e);
/// Parses the output of to_infix; throws std::invalid_argument on malformed text.
Expression parse_infix(std::string_view text);

} // namespace scsr
