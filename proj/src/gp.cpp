#include "scsr/gp.hpp"

#include <algorithm>
#include <stdexcept>

#include "scsr/parallel.hpp"
#include "scsr/stats.hpp"

namespace scsr::gp {

namespace {

std::size_t find_elite(std::vector<Individual> const& pop)
{
    std::size_t best = 0;
    for (std::size_t i = 1; i < pop.size(); ++i) {
        if (pop[i].fitness < pop[best].fitness) {
            best = i;
        }
    }
    return best;
}

void evaluate_individual(Individual& ind, GPConfig const& cfg, Dataset const& train, ConstraintSet const& c)
{
    if (cfg.n_opt > 0 && ind.expression.parameter_count() > 0) {
        LMConfig lm;
        lm.max_iterations = cfg.n_opt;
        ind.expression = optimize(ind.expression, lm, train.X, train.y);
    }
    auto const eval = evaluate_fitness(TreeModel(ind.expression), train.X, train.y, c);
    ind.fitness = eval.nmse;
    ind.scaling = eval.scaling;
    ind.feasible = eval.feasible;
}

ConvergenceRow summarize(int generation, std::size_t evaluations, std::vector<Individual> const& pop)
{
    std::vector<double> f;
    f.reserve(pop.size());
    for (auto const& ind : pop) {
        f.push_back(ind.fitness);
    }
    return {generation, evaluations, *std::min_element(f.begin(), f.end()), median(std::move(f))};
}

std::vector<int> function_nodes(Expression const& e)
{
    std::vector<int> idx;
    for (int i = 0; i < e.length(); ++i) {
        if (!e[i].is_leaf()) {
            idx.push_back(i);
        }
    }
    return idx;
}

Expression replace_subtree_randomly(Expression const& e, int dim, int max_length, int max_depth, Rng& rng)
{
    int const i = uniform_int(rng, 0, e.length() - 1);
    auto const levels = e.node_levels();
    int const len_budget = max_length - (e.length() - e[i].size);
    int const depth_budget = max_depth - levels[i] + 1;
    auto const branch = ptc2_random(std::max(1, len_budget), std::max(1, depth_budget), dim, rng);
    return e.replace_subtree(i, branch);
}

} // namespace

std::size_t tournament_select(std::span<double const> errors, int size, Rng& rng)
{
    if (errors.empty() || size < 1) {
        throw std::invalid_argument("tournament_select needs a non-empty population and group size >= 1");
    }
    std::size_t best = uniform_int<std::size_t>(rng, 0, errors.size() - 1);
    for (int k = 1; k < size; ++k) {
        auto const c = uniform_int<std::size_t>(rng, 0, errors.size() - 1);
        if (errors[c] < errors[best]) {
            best = c;
        }
    }
    return best;
}

Expression subtree_crossover(Expression const& p1, Expression const& p2, int max_length, int max_depth, Rng& rng)
{
    int const cut = uniform_int(rng, 0, p1.length() - 1);
    int const len_budget = max_length - (p1.length() - p1[cut].size);
    int const depth_budget = max_depth - p1.node_levels()[cut] + 1;
    auto const heights = p2.node_heights();
    std::vector<int> candidates;
    for (int j = 0; j < p2.length(); ++j) {
        if (p2[j].size <= len_budget && heights[j] <= depth_budget) {
            candidates.push_back(j);
        }
    }
    if (candidates.empty()) {
        return p1;
    }
    int const pick = candidates[uniform_int<std::size_t>(rng, 0, candidates.size() - 1)];
    return p1.replace_subtree(cut, p2.subtree(pick));
}

Expression mutate(Expression const& e, MutationKind kind, int dim, int max_length, int max_depth, Rng& rng)
{
    switch (kind) {
    case MutationKind::ReplaceSubtree:
        break;
    case MutationKind::ShiftAllParameters: {
        auto theta = extract_params(e);
        if (theta.empty()) {
            break;
        }
        for (auto& t : theta) {
            t += standard_normal(rng);
        }
        return update_params(e, theta);
    }
    case MutationKind::ShiftOneParameter: {
        auto theta = extract_params(e);
        if (theta.empty()) {
            break;
        }
        theta[uniform_int<std::size_t>(rng, 0, theta.size() - 1)] += standard_normal(rng);
        return update_params(e, theta);
    }
    case MutationKind::ChangeSymbol: {
        auto const fns = function_nodes(e);
        if (fns.empty()) {
            break;
        }
        int const i = fns[uniform_int<std::size_t>(rng, 0, fns.size() - 1)];
        std::vector<Node> nodes(e.nodes().begin(), e.nodes().end());
        auto& n = nodes[static_cast<std::size_t>(i)];
        if (n.kind == NodeKind::Unary) {
            std::vector<UnaryFn> others;
            for (auto f : kTreeUnaryFns) {
                if (f != n.fn) {
                    others.push_back(f);
                }
            }
            n.fn = others[uniform_int<std::size_t>(rng, 0, others.size() - 1)];
        } else {
            std::vector<BinaryOp> others;
            for (auto op : kTreeBinaryOps) {
                if (op != n.op) {
                    others.push_back(op);
                }
            }
            n.op = others[uniform_int<std::size_t>(rng, 0, others.size() - 1)];
        }
        return Expression(std::move(nodes));
    }
    }
    return replace_subtree_randomly(e, dim, max_length, max_depth, rng);
}

Expression mutate(Expression const& e, int dim, int max_length, int max_depth, Rng& rng)
{
    auto const kind = static_cast<MutationKind>(uniform_int(rng, 0, 3));
    return mutate(e, kind, dim, max_length, max_depth, rng);
}

GPResult run(GPConfig const& cfg, Dataset const& train, ConstraintSet const& constraints)
{
    if (cfg.population_size < 2 || cfg.tournament_size < 1) {
        throw std::invalid_argument("GP needs population size >= 2 and tournament size >= 1");
    }
    auto const n = static_cast<std::size_t>(cfg.population_size);
    int const dim = train.dim();
    Rng rng(cfg.seed);
    GPResult result;

    std::vector<Individual> pop(n);
    for (auto& ind : pop) {
        ind.expression = ptc2_random(cfg.max_length, cfg.max_depth, dim, rng);
    }
    parallel_for(n, cfg.workers, [&](std::size_t i) {
        auto const eval = evaluate_fitness(TreeModel(pop[i].expression), train.X, train.y, constraints);
        pop[i].fitness = eval.nmse;
        pop[i].scaling = eval.scaling;
        pop[i].feasible = eval.feasible;
    });
    result.evaluations = n;
    result.log.push_back(summarize(0, result.evaluations, pop));

    std::vector<double> errors(n);
    std::bernoulli_distribution crossover_coin(cfg.crossover_rate);
    std::bernoulli_distribution mutation_coin(cfg.mutation_rate);

    for (int g = 1; g <= cfg.generations; ++g) {
        for (std::size_t i = 0; i < n; ++i) {
            errors[i] = pop[i].fitness;
        }
        std::vector<Individual> next(n);
        next[0] = pop[find_elite(pop)];
        for (std::size_t i = 1; i < n; ++i) {
            auto const& p1 = pop[tournament_select(errors, cfg.tournament_size, rng)].expression;
            auto const& p2 = pop[tournament_select(errors, cfg.tournament_size, rng)].expression;
            auto child = crossover_coin(rng) ? subtree_crossover(p1, p2, cfg.max_length, cfg.max_depth, rng) : p1;
            if (mutation_coin(rng)) {
                child = mutate(child, dim, cfg.max_length, cfg.max_depth, rng);
            }
            next[i].expression = std::move(child);
        }
        parallel_for(n - 1, cfg.workers, [&](std::size_t k) { evaluate_individual(next[k + 1], cfg, train, constraints); });
        result.evaluations += n - 1;
        pop = std::move(next);
        result.log.push_back(summarize(g, result.evaluations, pop));
    }

    result.best = pop[find_elite(pop)];
    result.feasible = constraints.empty() || result.best.feasible;
    return result;
}

} // namespace scsr::gp
