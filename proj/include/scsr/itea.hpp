#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "scsr/constraints.hpp"
#include "scsr/dataset.hpp"
#include "scsr/interval.hpp"
#include "scsr/model.hpp"

namespace scsr::itea {

/// Transformation functions available to IT terms.
inline constexpr UnaryFn kTransforms[] = {UnaryFn::Id, UnaryFn::Sin, UnaryFn::Cos, UnaryFn::Tanh, UnaryFn::Sqrt,
    UnaryFn::Log, UnaryFn::Log1p, UnaryFn::Exp};

/// t(prod_j x_j^k_j)
struct ITTerm {
    std::vector<int> strengths;
    UnaryFn transform{UnaryFn::Id};

    [[nodiscard]] int length() const noexcept; // number of non-zero strengths
    friend bool operator==(ITTerm const&, ITTerm const&) = default;
};

/// intercept + sum_i weights[i] * terms[i](x)
struct ITExpression {
    std::vector<ITTerm> terms;
    std::vector<double> weights;
    double intercept{0.0};

    /// Rejects empty term lists, all-zero strength vectors, mismatched
    /// dimensions and transforms outside kTransforms.
    void validate(int dim) const;
    friend bool operator==(ITExpression const&, ITExpression const&) = default;
};

Eigen::ArrayXd monomial(std::span<int const> strengths, Eigen::MatrixXd const& X);
Interval monomial_interval(std::span<int const> strengths, Box const& box);

Eigen::ArrayXd term_values(ITTerm const& t, Eigen::MatrixXd const& X);
Eigen::ArrayXd it_eval(ITExpression const& f, Eigen::MatrixXd const& X);

/// Pointwise partial derivative of order 1 or 2 in variable `var` via the chain rule.
Eigen::ArrayXd it_partial(ITExpression const& f, Eigen::MatrixXd const& X, int var, int order);

Interval it_image(ITExpression const& f, Box const& box);
/// Interval of the order-1 or order-2 partial derivative. The quotient
/// monomial p(x) / x_j is formed by decrementing strength j, not by division.
Interval it_derivative_interval(ITExpression const& f, int var, Box const& box, int order = 1);

/// Removes repeated (strengths, transform) pairs and all-zero strength vectors,
/// keeping first occurrences.
std::vector<ITTerm> deduplicate(std::vector<ITTerm> terms);

struct OlsFit {
    std::vector<double> weights;
    double intercept{0.0};
    double rmse{std::numeric_limits<double>::infinity()};
    bool ok{false}; // false for non-finite design columns
};

/// Least squares with intercept through a column-pivoted QR of the
/// column-normalized design; rank-deficient columns receive zero weight.
OlsFit fit_weights_ols(std::span<ITTerm const> terms, Eigen::MatrixXd const& X, Eigen::ArrayXd const& y);

std::vector<int> positive_interaction(std::span<int const> a, std::span<int const> b);
std::vector<int> negative_interaction(std::span<int const> a, std::span<int const> b);

struct ITEAConfig {
    int population_size{200};
    int iterations{500};
    int max_terms_init{4};
    int max_terms{6}; // cap during evolution, 0 for none
    int min_strength{-4};
    int max_strength{4};
    int min_term_length{2};
    int max_term_length{6};
    std::uint64_t seed{0};
    int workers{1};
};

ITTerm random_term(int dim, ITEAConfig const& cfg, Rng& rng);
ITExpression random_expression(int dim, ITEAConfig const& cfg, Rng& rng); // weights left at zero

enum class ITMutation {
    RemoveTerm,
    AddTerm,
    ReplaceStrengths,
    PositiveInteraction,
    NegativeInteraction,
};

/// New term list after one mutation action (deduplicated, never empty).
/// Degenerate cases (removing or interacting with a single term, an
/// interaction cancelling to a constant) fall back to adding a term. Adding to
/// an expression with max_terms terms replaces one of them.
std::vector<ITTerm> mutate_terms(std::span<ITTerm const> terms, ITMutation action, int dim, ITEAConfig const& cfg, Rng& rng);

/// IT expression as a constraint-checkable model.
class ITModel final : public ShapeModel {
public:
    explicit ITModel(ITExpression f)
        : f_(std::move(f))
    {
    }

    [[nodiscard]] ITExpression const& expression() const noexcept { return f_; }

    Eigen::ArrayXd predict(Eigen::MatrixXd const& X) const override { return it_eval(f_, X); }
    Eigen::ArrayXd partial(Eigen::MatrixXd const& X, int var, int order) const override
    {
        return it_partial(f_, X, var, order);
    }
    Interval image(Box const& box) const override { return it_image(f_, box); }
    Interval partial_interval(Box const& box, int var, int order) const override
    {
        return it_derivative_interval(f_, var, box, order);
    }

private:
    ITExpression f_;
};

struct ITIndividual {
    ITExpression expression;
    double rmse{std::numeric_limits<double>::infinity()};
    double violation{0.0};
};

struct ITEAResult {
    std::optional<ITIndividual> best; // empty when no feasible model was ever found
    ConvergenceLog log;
    std::size_t evaluations{0};
};

/// Fits weights by OLS on the training data and records RMSE.
ITIndividual fit_individual(std::vector<ITTerm> terms, Dataset const& train);

/// Mutation-only search with pairwise parent/child replacement.
ITEAResult run_itea(ITEAConfig const& cfg, Dataset const& train);

/// Feasible/infeasible two-population search; feasibility by the pessimistic
/// interval check, infeasible individuals ranked by total violation.
ITEAResult run_fi2pop(ITEAConfig const& cfg, Dataset const& train, ConstraintSet const& constraints);

} // namespace scsr::itea
