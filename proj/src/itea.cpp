#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "scsr/itea.hpp"
#include "scsr/parallel.hpp"
#include "scsr/stats.hpp"

namespace scsr::itea {

namespace {

int random_strength(ITEAConfig const& cfg, Rng& rng)
{
    // non-zero strength from [min_strength, max_strength]
    for (;;) {
        int const k = uniform_int(rng, cfg.min_strength, cfg.max_strength);
        if (k != 0) {
            return k;
        }
    }
}

std::vector<int> random_strengths(int dim, ITEAConfig const& cfg, Rng& rng)
{
    int const lo = std::min(cfg.min_term_length, dim);
    int const hi = std::min(cfg.max_term_length, dim);
    int const len = uniform_int(rng, lo, std::max(lo, hi));
    std::vector<int> positions(static_cast<std::size_t>(dim));
    std::iota(positions.begin(), positions.end(), 0);
    std::shuffle(positions.begin(), positions.end(), rng);
    std::vector<int> k(static_cast<std::size_t>(dim), 0);
    for (int i = 0; i < len; ++i) {
        k[static_cast<std::size_t>(positions[static_cast<std::size_t>(i)])] = random_strength(cfg, rng);
    }
    return k;
}

double nmse_from_rmse(double rmse, double target_variance)
{
    if (!std::isfinite(rmse)) {
        return 1.0;
    }
    return std::min(rmse * rmse / target_variance, 1.0);
}

double population_variance(Eigen::ArrayXd const& y)
{
    return (y - y.mean()).square().mean();
}

ConvergenceRow summarize(int iteration, std::size_t evaluations, std::vector<ITIndividual> const& pop, double var_y)
{
    if (pop.empty()) {
        return {iteration, evaluations, 1.0, 1.0};
    }
    std::vector<double> f;
    f.reserve(pop.size());
    for (auto const& ind : pop) {
        f.push_back(nmse_from_rmse(ind.rmse, var_y));
    }
    return {iteration, evaluations, *std::min_element(f.begin(), f.end()), median(std::move(f))};
}

std::vector<ITTerm> pick_existing(std::span<ITTerm const> terms) { return {terms.begin(), terms.end()}; }

} // namespace

ITTerm random_term(int dim, ITEAConfig const& cfg, Rng& rng)
{
    ITTerm t;
    t.strengths = random_strengths(dim, cfg, rng);
    t.transform = kTransforms[uniform_int<std::size_t>(rng, 0, std::size(kTransforms) - 1)];
    return t;
}

ITExpression random_expression(int dim, ITEAConfig const& cfg, Rng& rng)
{
    int const n_terms = uniform_int(rng, 1, cfg.max_terms_init);
    std::vector<ITTerm> terms;
    for (int i = 0; i < n_terms; ++i) {
        terms.push_back(random_term(dim, cfg, rng));
    }
    ITExpression f;
    f.terms = deduplicate(std::move(terms));
    f.weights.assign(f.terms.size(), 0.0);
    return f;
}

std::vector<ITTerm> mutate_terms(std::span<ITTerm const> terms, ITMutation action, int dim, ITEAConfig const& cfg, Rng& rng)
{
    auto out = pick_existing(terms);
    // a full expression swaps a random term for the new one
    auto add_term = [&] {
        auto t = random_term(dim, cfg, rng);
        if (cfg.max_terms > 0 && out.size() >= static_cast<std::size_t>(cfg.max_terms)) {
            out[uniform_int<std::size_t>(rng, 0, out.size() - 1)] = std::move(t);
        } else {
            out.push_back(std::move(t));
        }
        return deduplicate(std::move(out));
    };
    if (out.empty()) {
        return add_term();
    }
    auto const i = uniform_int<std::size_t>(rng, 0, out.size() - 1);
    switch (action) {
    case ITMutation::RemoveTerm:
        if (out.size() == 1) {
            return add_term();
        }
        out.erase(out.begin() + static_cast<std::ptrdiff_t>(i));
        return out;
    case ITMutation::AddTerm:
        return add_term();
    case ITMutation::ReplaceStrengths:
        out[i].strengths = random_strengths(dim, cfg, rng);
        break;
    case ITMutation::PositiveInteraction:
    case ITMutation::NegativeInteraction: {
        if (out.size() == 1) {
            return add_term();
        }
        auto j = uniform_int<std::size_t>(rng, 0, out.size() - 2);
        if (j >= i) {
            ++j;
        }
        out[i].strengths = action == ITMutation::PositiveInteraction
            ? positive_interaction(out[i].strengths, out[j].strengths)
            : negative_interaction(out[i].strengths, out[j].strengths);
        break;
    }
    }
    out = deduplicate(std::move(out));
    if (out.empty()) {
        return add_term();
    }
    return out;
}

ITIndividual fit_individual(std::vector<ITTerm> terms, Dataset const& train)
{
    ITIndividual ind;
    auto const fit = fit_weights_ols(terms, train.X, train.y);
    ind.expression.terms = std::move(terms);
    ind.expression.weights = fit.weights;
    ind.expression.intercept = fit.intercept;
    ind.rmse = fit.ok ? fit.rmse : std::numeric_limits<double>::infinity();
    return ind;
}

ITEAResult run_itea(ITEAConfig const& cfg, Dataset const& train)
{
    if (cfg.population_size < 1) {
        throw std::invalid_argument("ITEA population size must be positive");
    }
    auto const n = static_cast<std::size_t>(cfg.population_size);
    int const dim = train.dim();
    double const var_y = population_variance(train.y);
    Rng rng(cfg.seed);
    ITEAResult result;

    std::vector<std::vector<ITTerm>> genomes(n);
    for (auto& g : genomes) {
        g = random_expression(dim, cfg, rng).terms;
    }
    std::vector<ITIndividual> pop(n);
    parallel_for(n, cfg.workers, [&](std::size_t i) { pop[i] = fit_individual(genomes[i], train); });
    result.evaluations = n;
    result.log.push_back(summarize(0, result.evaluations, pop, var_y));

    for (int it = 1; it <= cfg.iterations; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            auto const action = static_cast<ITMutation>(uniform_int(rng, 0, 4));
            genomes[i] = mutate_terms(pop[i].expression.terms, action, dim, cfg, rng);
        }
        std::vector<ITIndividual> children(n);
        parallel_for(n, cfg.workers, [&](std::size_t i) { children[i] = fit_individual(genomes[i], train); });
        result.evaluations += n;
        for (std::size_t i = 0; i < n; ++i) {
            if (children[i].rmse <= pop[i].rmse) {
                pop[i] = std::move(children[i]);
            }
        }
        result.log.push_back(summarize(it, result.evaluations, pop, var_y));
    }

    auto const best = std::min_element(
        pop.begin(), pop.end(), [](ITIndividual const& a, ITIndividual const& b) { return a.rmse < b.rmse; });
    result.best = *best;
    return result;
}

ITEAResult run_fi2pop(ITEAConfig const& cfg, Dataset const& train, ConstraintSet const& constraints)
{
    if (cfg.population_size < 1) {
        throw std::invalid_argument("FI-2POP population size must be positive");
    }
    auto const n = static_cast<std::size_t>(cfg.population_size);
    int const dim = train.dim();
    double const var_y = population_variance(train.y);
    Rng rng(cfg.seed);
    ITEAResult result;

    auto evaluate_all = [&](std::vector<std::vector<ITTerm>> const& genomes) {
        std::vector<ITIndividual> out(genomes.size());
        parallel_for(genomes.size(), cfg.workers, [&](std::size_t i) {
            out[i] = fit_individual(genomes[i], train);
            out[i].violation = check_pessimistic(ITModel(out[i].expression), constraints).total_violation;
        });
        result.evaluations += genomes.size();
        return out;
    };
    auto split = [](std::vector<ITIndividual>&& all, std::vector<ITIndividual>& feas, std::vector<ITIndividual>& infeas) {
        for (auto& ind : all) {
            (ind.violation == 0.0 ? feas : infeas).push_back(std::move(ind));
        }
    };
    auto truncate = [n](std::vector<ITIndividual>& pop, auto key) {
        std::stable_sort(pop.begin(), pop.end(), [&](ITIndividual const& a, ITIndividual const& b) { return key(a) < key(b); });
        if (pop.size() > n) {
            pop.resize(n);
        }
    };
    auto by_rmse = [](ITIndividual const& a) { return a.rmse; };
    auto by_violation = [](ITIndividual const& a) { return a.violation; };

    std::vector<std::vector<ITTerm>> genomes(n);
    for (auto& g : genomes) {
        g = random_expression(dim, cfg, rng).terms;
    }
    std::vector<ITIndividual> feas;
    std::vector<ITIndividual> infeas;
    split(evaluate_all(genomes), feas, infeas);
    truncate(feas, by_rmse);
    truncate(infeas, by_violation);
    result.log.push_back(summarize(0, result.evaluations, feas, var_y));

    for (int it = 1; it <= cfg.iterations; ++it) {
        genomes.clear();
        for (auto const* pop : {&feas, &infeas}) {
            for (auto const& ind : *pop) {
                auto const action = static_cast<ITMutation>(uniform_int(rng, 0, 4));
                genomes.push_back(mutate_terms(ind.expression.terms, action, dim, cfg, rng));
            }
        }
        split(evaluate_all(genomes), feas, infeas);
        truncate(feas, by_rmse);
        truncate(infeas, by_violation);
        result.log.push_back(summarize(it, result.evaluations, feas, var_y));
    }

    if (!feas.empty()) {
        result.best = feas.front();
    }
    return result;
}

} // namespace scsr::itea
