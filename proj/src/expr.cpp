#include "scsr/expr.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

namespace scsr {

namespace {

void recompute(std::vector<Node>& nodes, bool renumber)
{
    int slot = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        auto& n = nodes[i];
        switch (n.kind) {
        case NodeKind::Unary:
            if (i < 1) {
                throw std::invalid_argument("malformed postfix expression");
            }
            n.size = 1 + nodes[i - 1].size;
            break;
        case NodeKind::Binary: {
            if (i < 1) {
                throw std::invalid_argument("malformed postfix expression");
            }
            auto const right = nodes[i - 1].size;
            if (static_cast<std::size_t>(right) + 1 > i) {
                throw std::invalid_argument("malformed postfix expression");
            }
            n.size = 1 + right + nodes[i - 1 - right].size;
            break;
        }
        case NodeKind::Parameter:
            if (renumber) {
                n.index = slot++;
            }
            n.size = 1;
            break;
        default:
            n.size = 1;
        }
        if (static_cast<std::size_t>(n.size) > i + 1) {
            throw std::invalid_argument("malformed postfix expression");
        }
    }
    if (!nodes.empty() && static_cast<std::size_t>(nodes.back().size) != nodes.size()) {
        throw std::invalid_argument("postfix expression does not form a single tree");
    }
}

} // namespace

std::string_view to_string(BinaryOp op) noexcept
{
    switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    }
    return "?";
}

Expression::Expression(std::vector<Node> nodes)
    : nodes_(std::move(nodes))
{
    recompute(nodes_, true);
}

Expression Expression::with_slots(std::vector<Node> nodes)
{
    Expression e;
    e.nodes_ = std::move(nodes);
    recompute(e.nodes_, false);
    return e;
}

Expression Expression::constant(double v) { return Expression({Node::constant(v)}); }
Expression Expression::parameter(double v) { return Expression({Node::parameter(v)}); }
Expression Expression::variable(int i) { return Expression({Node::variable(i)}); }

Expression Expression::unary(UnaryFn f, Expression const& child)
{
    auto nodes = child.nodes_;
    nodes.push_back(Node::unary(f));
    return Expression(std::move(nodes));
}

Expression Expression::binary(BinaryOp op, Expression const& left, Expression const& right)
{
    auto nodes = left.nodes_;
    nodes.insert(nodes.end(), right.nodes_.begin(), right.nodes_.end());
    nodes.push_back(Node::binary(op));
    return Expression(std::move(nodes));
}

std::vector<int> Expression::node_heights() const
{
    std::vector<int> h(nodes_.size(), 1);
    for (int i = 0; i < length(); ++i) {
        auto const& n = nodes_[i];
        if (n.kind == NodeKind::Unary) {
            h[i] = 1 + h[i - 1];
        } else if (n.kind == NodeKind::Binary) {
            h[i] = 1 + std::max(h[right_child(i)], h[left_child(i)]);
        }
    }
    return h;
}

std::vector<int> Expression::node_levels() const
{
    std::vector<int> level(nodes_.size(), 1);
    for (int i = root(); i >= 0; --i) {
        auto const& n = nodes_[i];
        if (n.arity() >= 1) {
            level[right_child(i)] = level[i] + 1;
        }
        if (n.arity() == 2) {
            level[left_child(i)] = level[i] + 1;
        }
    }
    return level;
}

int Expression::depth() const
{
    if (nodes_.empty()) {
        return 0;
    }
    return node_heights().back();
}

int Expression::parameter_count() const noexcept
{
    return static_cast<int>(std::count_if(
        nodes_.begin(), nodes_.end(), [](Node const& n) { return n.kind == NodeKind::Parameter; }));
}

int Expression::max_variable_index() const noexcept
{
    int m = -1;
    for (auto const& n : nodes_) {
        if (n.kind == NodeKind::Variable) {
            m = std::max(m, n.index);
        }
    }
    return m;
}

Expression Expression::subtree(int i) const
{
    auto const first = i - nodes_[i].size + 1;
    return Expression(std::vector<Node>(nodes_.begin() + first, nodes_.begin() + i + 1));
}

Expression Expression::replace_subtree(int i, Expression const& branch) const
{
    auto const first = i - nodes_[i].size + 1;
    std::vector<Node> out;
    out.reserve(nodes_.size() - nodes_[i].size + branch.nodes_.size());
    out.insert(out.end(), nodes_.begin(), nodes_.begin() + first);
    out.insert(out.end(), branch.nodes_.begin(), branch.nodes_.end());
    out.insert(out.end(), nodes_.begin() + i + 1, nodes_.end());
    return Expression(std::move(out));
}

bool operator==(Expression const& a, Expression const& b)
{
    if (a.nodes_.size() != b.nodes_.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.nodes_.size(); ++i) {
        auto const& x = a.nodes_[i];
        auto const& y = b.nodes_[i];
        if (x.kind != y.kind) {
            return false;
        }
        switch (x.kind) {
        case NodeKind::Constant:
        case NodeKind::Parameter:
            if (x.value != y.value) {
                return false;
            }
            break;
        case NodeKind::Variable:
            if (x.index != y.index) {
                return false;
            }
            break;
        case NodeKind::Unary:
            if (x.fn != y.fn) {
                return false;
            }
            break;
        case NodeKind::Binary:
            if (x.op != y.op) {
                return false;
            }
            break;
        }
    }
    return true;
}

ParameterVector extract_params(Expression const& e)
{
    ParameterVector theta;
    for (auto const& n : e.nodes()) {
        if (n.kind == NodeKind::Parameter) {
            theta.push_back(n.value);
        }
    }
    return theta;
}

Expression update_params(Expression const& e, std::span<double const> theta)
{
    if (static_cast<int>(theta.size()) != e.parameter_count()) {
        throw std::invalid_argument("parameter vector length " + std::to_string(theta.size())
            + " does not match parameter count " + std::to_string(e.parameter_count()));
    }
    std::vector<Node> nodes(e.nodes().begin(), e.nodes().end());
    std::size_t k = 0;
    for (auto& n : nodes) {
        if (n.kind == NodeKind::Parameter) {
            n.value = theta[k++];
        }
    }
    return Expression(std::move(nodes));
}

Eigen::ArrayXd evaluate(Expression const& e, Eigen::MatrixXd const& X, std::span<double const> theta)
{
    auto const rows = X.rows();
    auto const nodes = e.nodes();
    Eigen::ArrayXXd buf(rows, static_cast<Eigen::Index>(nodes.size()));
    for (int i = 0; i < e.length(); ++i) {
        auto const& n = nodes[i];
        auto out = buf.col(i);
        switch (n.kind) {
        case NodeKind::Constant:
            out.setConstant(n.value);
            break;
        case NodeKind::Parameter:
            out.setConstant(theta.empty() ? n.value : theta[n.index]);
            break;
        case NodeKind::Variable:
            out = X.col(n.index).array();
            break;
        case NodeKind::Unary: {
            auto const a = buf.col(i - 1);
            // the scalar library functions, matching the interval endpoints
            switch (n.fn) {
            case UnaryFn::Id: out = a; break;
            case UnaryFn::Square: out = a.square(); break;
            case UnaryFn::Sqrt: out = a.sqrt(); break;
            default: out = a.unaryExpr([f = n.fn](double v) { return apply(f, v); }); break;
            }
            break;
        }
        case NodeKind::Binary: {
            auto const l = buf.col(e.left_child(i));
            auto const r = buf.col(e.right_child(i));
            switch (n.op) {
            case BinaryOp::Add: out = l + r; break;
            case BinaryOp::Mul:
                // an exact zero times an overflowed factor is zero, as in the interval product
                out = ((l == 0.0 && r.isInf()) || (r == 0.0 && l.isInf())).select(0.0, l * r);
                break;
            case BinaryOp::Div: out = (r.abs() < kDivGuard).select(kDivGuardValue, l / r); break;
            }
            break;
        }
        }
    }
    return buf.col(e.root());
}

double evaluate_point(Expression const& e, std::span<double const> x)
{
    Eigen::MatrixXd X(1, static_cast<Eigen::Index>(x.size()));
    for (std::size_t j = 0; j < x.size(); ++j) {
        X(0, static_cast<Eigen::Index>(j)) = x[j];
    }
    return evaluate(e, X)(0);
}

std::vector<bool> guarded_rows(Expression const& e, Eigen::MatrixXd const& X)
{
    std::vector<bool> hit(static_cast<std::size_t>(X.rows()), false);
    for (int i = 0; i < e.length(); ++i) {
        if (e[i].kind == NodeKind::Binary && e[i].op == BinaryOp::Div) {
            auto const den = evaluate(e.subtree(e.right_child(i)), X);
            for (Eigen::Index r = 0; r < den.size(); ++r) {
                if (std::abs(den(r)) < kDivGuard) {
                    hit[static_cast<std::size_t>(r)] = true;
                }
            }
        }
    }
    return hit;
}

Interval evaluate_interval(Expression const& e, Box const& box)
{
    std::vector<Interval> buf(static_cast<std::size_t>(e.length()));
    for (int i = 0; i < e.length(); ++i) {
        auto const& n = e[i];
        switch (n.kind) {
        case NodeKind::Constant:
        case NodeKind::Parameter:
            buf[i] = Interval::point(n.value);
            break;
        case NodeKind::Variable:
            buf[i] = box.at(static_cast<std::size_t>(n.index));
            break;
        case NodeKind::Unary:
            buf[i] = ia_unary(n.fn, buf[i - 1]);
            break;
        case NodeKind::Binary: {
            auto const& l = buf[e.left_child(i)];
            auto const& r = buf[e.right_child(i)];
            switch (n.op) {
            case BinaryOp::Add: buf[i] = ia_add(l, r); break;
            case BinaryOp::Mul: buf[i] = ia_mul(l, r); break;
            case BinaryOp::Div: buf[i] = ia_div(l, r); break;
            }
            break;
        }
        }
    }
    return buf.empty() ? Interval::undefined() : buf.back();
}

// ---------------------------------------------------------------------------
// infix text form

namespace {

std::string format_number(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(std::begin(buf), std::end(buf), v);
    return std::string(buf, ptr);
}

void write_infix(Expression const& e, int i, std::string& out)
{
    auto const& n = e[i];
    switch (n.kind) {
    case NodeKind::Constant:
        out += '{';
        out += format_number(n.value);
        out += '}';
        break;
    case NodeKind::Parameter:
        out += format_number(n.value);
        break;
    case NodeKind::Variable:
        out += 'x';
        out += std::to_string(n.index);
        break;
    case NodeKind::Unary:
        out += to_string(n.fn);
        out += '(';
        write_infix(e, i - 1, out);
        out += ')';
        break;
    case NodeKind::Binary:
        out += '(';
        write_infix(e, e.left_child(i), out);
        out += ' ';
        out += to_string(n.op);
        out += ' ';
        write_infix(e, e.right_child(i), out);
        out += ')';
        break;
    }
}

class InfixParser {
public:
    explicit InfixParser(std::string_view text)
        : text_(text)
    {
    }

    std::vector<Node> parse()
    {
        std::vector<Node> out;
        parse_expr(out);
        skip_ws();
        if (pos_ != text_.size()) {
            fail("trailing characters");
        }
        return out;
    }

private:
    [[noreturn]] void fail(std::string const& what) const
    {
        throw std::invalid_argument("cannot parse expression at offset " + std::to_string(pos_) + ": " + what);
    }

    void skip_ws()
    {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n')) {
            ++pos_;
        }
    }

    void expect(char c)
    {
        skip_ws();
        if (pos_ >= text_.size() || text_[pos_] != c) {
            fail(std::string("expected '") + c + "'");
        }
        ++pos_;
    }

    double parse_number()
    {
        skip_ws();
        double v = 0.0;
        auto const* first = text_.data() + pos_;
        auto const* last = text_.data() + text_.size();
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc {}) {
            fail("expected number");
        }
        pos_ += static_cast<std::size_t>(ptr - first);
        return v;
    }

    void parse_expr(std::vector<Node>& out)
    {
        skip_ws();
        if (pos_ >= text_.size()) {
            fail("unexpected end of input");
        }
        char const c = text_[pos_];
        if (c == '(') {
            ++pos_;
            parse_expr(out);
            skip_ws();
            if (pos_ >= text_.size()) {
                fail("unexpected end of input");
            }
            BinaryOp op {};
            switch (text_[pos_]) {
            case '+': op = BinaryOp::Add; break;
            case '*': op = BinaryOp::Mul; break;
            case '/': op = BinaryOp::Div; break;
            default: fail("expected binary operator");
            }
            ++pos_;
            parse_expr(out);
            expect(')');
            out.push_back(Node::binary(op));
        } else if (c == '{') {
            ++pos_;
            auto const v = parse_number();
            expect('}');
            out.push_back(Node::constant(v));
        } else if (c == 'x' && pos_ + 1 < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))) {
            ++pos_;
            int idx = 0;
            auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), idx);
            pos_ = static_cast<std::size_t>(ptr - text_.data());
            out.push_back(Node::variable(idx));
        } else if (std::isalpha(static_cast<unsigned char>(c))) {
            auto const start = pos_;
            while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) {
                ++pos_;
            }
            auto const name = text_.substr(start, pos_ - start);
            if (name == "inf" || name == "nan") {
                pos_ = start;
                out.push_back(Node::parameter(parse_number()));
                return;
            }
            UnaryFn f {};
            try {
                f = unary_fn_from_string(name);
            } catch (std::invalid_argument const&) {
                pos_ = start;
                fail("unknown function '" + std::string(name) + "'");
            }
            expect('(');
            parse_expr(out);
            expect(')');
            out.push_back(Node::unary(f));
        } else {
            out.push_back(Node::parameter(parse_number()));
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

} // namespace

std::string to_infix(Expression const& e)
{
    std::string out;
    if (!e.empty()) {
        write_infix(e, e.root(), out);
    }
    return out;
}

Expression parse_infix(std::string_view text)
{
    return Expression(InfixParser(text).parse());
}

} // namespace scsr
