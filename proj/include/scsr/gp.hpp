#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "scsr/constraints.hpp"
#include "scsr/dataset.hpp"
#include "scsr/expr.hpp"
#include "scsr/fitness.hpp"
#include "scsr/localopt.hpp"

namespace scsr::gp {

struct GPConfig {
    int population_size{1000};
    int generations{200};
    double mutation_rate{0.15};
    int tournament_size{5};
    double crossover_rate{1.0};
    int max_length{50};
    int max_depth{20};
    int n_opt{0}; // Levenberg-Marquardt iterations per child, 0 disables the memetic step
    std::uint64_t seed{0};
    int workers{1};

    /// GP with memetic parameter optimization (GPC).
    static GPConfig memetic()
    {
        GPConfig c;
        c.generations = 20;
        c.n_opt = 10;
        return c;
    }
};

struct Individual {
    Expression expression;
    double fitness{1.0};
    LinearScaling scaling{};
    bool feasible{false};
};

struct GPResult {
    Individual best;
    ConvergenceLog log;
    std::size_t evaluations{0};
    /// Constrained runs: whether the returned model passed the interval check.
    bool feasible{true};
};

/// Index of the winner among `size` uniform draws with replacement; the first
/// sampled individual wins ties.
std::size_t tournament_select(std::span<double const> errors, int size, Rng& rng);

/// Replaces a random subtree of a copy of `p1` with a random subtree of `p2`
/// that keeps the child within the limits; returns `p1` unchanged if none fits.
Expression subtree_crossover(Expression const& p1, Expression const& p2, int max_length, int max_depth, Rng& rng);

enum class MutationKind {
    ReplaceSubtree,
    ShiftAllParameters,
    ShiftOneParameter,
    ChangeSymbol,
};

/// Applies the given action; actions without a target (no parameters, no
/// function symbols) fall back to subtree replacement.
Expression mutate(Expression const& e, MutationKind kind, int dim, int max_length, int max_depth, Rng& rng);
/// Uniformly chosen mutation action.
Expression mutate(Expression const& e, int dim, int max_length, int max_depth, Rng& rng);

/// Tree GP with tournament selection, subtree crossover, optional mutation,
/// optional memetic optimization, single-elite generational replacement.
/// An empty constraint set runs the unconstrained search.
GPResult run(GPConfig const& cfg, Dataset const& train, ConstraintSet const& constraints);

} // namespace scsr::gp
