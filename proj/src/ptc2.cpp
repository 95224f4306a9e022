#include "scsr/expr.hpp"

#include <stdexcept>

namespace scsr {

namespace {

struct Slot {
    int parent;
    int position;
    int level;
};

struct TmpNode {
    Node node;
    int children[2] = {-1, -1};
};

Node random_leaf(int dim, Rng& rng)
{
    if (std::bernoulli_distribution(0.5)(rng)) {
        return Node::variable(uniform_int(rng, 0, dim - 1));
    }
    return Node::parameter(standard_normal(rng));
}

Node random_function(int max_arity, Rng& rng)
{
    constexpr int n_unary = static_cast<int>(std::size(kTreeUnaryFns));
    constexpr int n_binary = static_cast<int>(std::size(kTreeBinaryOps));
    int const n = max_arity >= 2 ? n_unary + n_binary : n_unary;
    int const k = uniform_int(rng, 0, n - 1);
    if (k < n_unary) {
        return Node::unary(kTreeUnaryFns[k]);
    }
    return Node::binary(kTreeBinaryOps[k - n_unary]);
}

void emit(std::vector<TmpNode> const& tmp, int i, std::vector<Node>& out)
{
    auto const& t = tmp[i];
    for (int c = 0; c < t.node.arity(); ++c) {
        emit(tmp, t.children[c], out);
    }
    out.push_back(t.node);
}

} // namespace

Expression ptc2_random(int max_len, int max_depth, int dim, Rng& rng)
{
    if (max_len < 1 || max_depth < 1 || dim < 1) {
        throw std::invalid_argument("ptc2_random: limits and dimension must be positive");
    }
    int const target = uniform_int(rng, 1, max_len);
    std::vector<TmpNode> tmp;
    std::vector<Slot> open;

    auto add_node = [&](Node n, int level) {
        tmp.push_back({n});
        int const id = static_cast<int>(tmp.size()) - 1;
        for (int c = 0; c < n.arity(); ++c) {
            open.push_back({id, c, level + 1});
        }
        return id;
    };

    if (target == 1 || max_depth == 1) {
        add_node(random_leaf(dim, rng), 1);
    } else {
        add_node(random_function(target - 1, rng), 1);
        while (!open.empty() && static_cast<int>(tmp.size() + open.size()) < target) {
            auto const pick = uniform_int<std::size_t>(rng, 0, open.size() - 1);
            auto const slot = open[pick];
            open[pick] = open.back();
            open.pop_back();
            // remaining budget for children of the node placed in this slot
            int const budget = target - static_cast<int>(tmp.size() + open.size()) - 1;
            Node n = slot.level < max_depth ? random_function(budget, rng) : random_leaf(dim, rng);
            int const id = add_node(n, slot.level);
            tmp[slot.parent].children[slot.position] = id;
        }
        for (auto const& slot : open) {
            int const id = add_node(random_leaf(dim, rng), slot.level);
            tmp[slot.parent].children[slot.position] = id;
        }
    }

    std::vector<Node> nodes;
    nodes.reserve(tmp.size());
    emit(tmp, 0, nodes);
    return Expression(std::move(nodes));
}

} // namespace scsr
