// Symbolic differentiation of postfix expression trees.
//
// Derivatives are assembled from postfix fragments with light constant
// folding (x + 0, x * 1, x * 0, constant-only subtrees). Parameter nodes copied
// into a derivative keep the slot of the tree they came from, so the
// derivative can be evaluated against an overriding parameter vector.

#include "scsr/expr.hpp"

#include <stdexcept>

namespace scsr {

namespace {

using Frag = std::vector<Node>;

bool is_constant(Frag const& f) { return f.size() == 1 && f.front().kind == NodeKind::Constant; }
bool is_constant(Frag const& f, double v) { return is_constant(f) && f.front().value == v; }

Frag constant(double v) { return {Node::constant(v)}; }

Frag join(Frag a, Frag const& b, Node parent)
{
    a.insert(a.end(), b.begin(), b.end());
    a.push_back(parent);
    return a;
}

Frag add(Frag const& a, Frag const& b)
{
    if (is_constant(a, 0.0)) {
        return b;
    }
    if (is_constant(b, 0.0)) {
        return a;
    }
    if (is_constant(a) && is_constant(b)) {
        return constant(a.front().value + b.front().value);
    }
    return join(a, b, Node::binary(BinaryOp::Add));
}

Frag mul(Frag const& a, Frag const& b)
{
    if (is_constant(a, 0.0) || is_constant(b, 0.0)) {
        return constant(0.0);
    }
    if (is_constant(a, 1.0)) {
        return b;
    }
    if (is_constant(b, 1.0)) {
        return a;
    }
    if (is_constant(a) && is_constant(b)) {
        return constant(a.front().value * b.front().value);
    }
    return join(a, b, Node::binary(BinaryOp::Mul));
}

Frag div(Frag const& a, Frag const& b)
{
    if (is_constant(a, 0.0)) {
        return constant(0.0);
    }
    if (is_constant(b, 1.0)) {
        return a;
    }
    if (is_constant(a) && is_constant(b)) {
        return constant(protected_div(a.front().value, b.front().value));
    }
    return join(a, b, Node::binary(BinaryOp::Div));
}

Frag neg(Frag const& a) { return mul(constant(-1.0), a); }

Frag unary(UnaryFn f, Frag a)
{
    if (is_constant(a)) {
        return constant(apply(f, a.front().value));
    }
    a.push_back(Node::unary(f));
    return a;
}

struct Target {
    NodeKind kind; // Variable or Parameter
    int index;
};

class Differentiator {
public:
    Differentiator(Expression const& e, Target t)
        : e_(e)
        , t_(t)
    {
    }

    Frag run() { return d(e_.root()); }

private:
    Frag copy(int i) const
    {
        auto const nodes = e_.nodes();
        auto const first = i - nodes[i].size + 1;
        return Frag(nodes.begin() + first, nodes.begin() + i + 1);
    }

    Frag d(int i)
    {
        auto const& n = e_[i];
        switch (n.kind) {
        case NodeKind::Constant:
            return constant(0.0);
        case NodeKind::Parameter:
        case NodeKind::Variable:
            return constant(n.kind == t_.kind && n.index == t_.index ? 1.0 : 0.0);
        case NodeKind::Unary:
            return d_unary(n.fn, i - 1);
        case NodeKind::Binary:
            return d_binary(n.op, e_.left_child(i), e_.right_child(i));
        }
        return constant(0.0);
    }

    Frag d_unary(UnaryFn f, int c)
    {
        auto du = d(c);
        if (is_constant(du, 0.0)) {
            return du;
        }
        auto const u = copy(c);
        switch (f) {
        case UnaryFn::Id:
            return du;
        // chain-rule quotients use the unprotected reciprocal: the function
        // itself has no guard there
        case UnaryFn::Log:
            return mul(unary(UnaryFn::Recip, u), du);
        case UnaryFn::Log1p:
            return mul(unary(UnaryFn::Recip, add(constant(1.0), u)), du);
        case UnaryFn::Exp:
            return mul(unary(UnaryFn::Exp, u), du);
        case UnaryFn::Sin:
            return mul(unary(UnaryFn::Cos, u), du);
        case UnaryFn::Cos:
            return mul(neg(unary(UnaryFn::Sin, u)), du);
        case UnaryFn::Tanh:
            return mul(add(constant(1.0), neg(unary(UnaryFn::Square, unary(UnaryFn::Tanh, u)))), du);
        case UnaryFn::Square:
            return mul(mul(constant(2.0), u), du);
        case UnaryFn::Sqrt:
            return mul(mul(constant(0.5), unary(UnaryFn::Recip, unary(UnaryFn::Sqrt, u))), du);
        case UnaryFn::Recip:
            return mul(neg(unary(UnaryFn::Square, unary(UnaryFn::Recip, u))), du);
        }
        throw std::logic_error("unhandled unary function in differentiation");
    }

    Frag d_binary(BinaryOp op, int l, int r)
    {
        auto dl = d(l);
        auto dr = d(r);
        switch (op) {
        case BinaryOp::Add:
            return add(dl, dr);
        case BinaryOp::Mul:
            return add(mul(dl, copy(r)), mul(copy(l), dr));
        case BinaryOp::Div: {
            // quotient rule as dl/r - ((l/r) dr)/r, so every division guards at
            // the same |r| as the original; the guard itself is not differentiated
            auto const lhs = div(dl, copy(r));
            if (is_constant(dr, 0.0)) {
                return lhs;
            }
            return add(lhs, neg(div(mul(div(copy(l), copy(r)), dr), copy(r))));
        }
        }
        throw std::logic_error("unhandled binary operator in differentiation");
    }

    Expression const& e_;
    Target t_;
};

} // namespace

Expression differentiate(Expression const& e, int var, int order)
{
    if (order < 1) {
        throw std::invalid_argument("derivative order must be at least 1");
    }
    Expression out = e;
    for (int k = 0; k < order; ++k) {
        out = Expression::with_slots(Differentiator(out, {NodeKind::Variable, var}).run());
    }
    return out;
}

Expression differentiate_param(Expression const& e, int slot)
{
    return Expression::with_slots(Differentiator(e, {NodeKind::Parameter, slot}).run());
}

} // namespace scsr
