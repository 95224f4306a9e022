#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "scsr/gp.hpp"
#include "test_util.hpp"

using namespace scsr;
using namespace scsr::gp;

namespace {

Expression x(int i) { return Expression::variable(i); }
Expression p(double v) { return Expression::parameter(v); }
Expression add(Expression const& a, Expression const& b) { return Expression::binary(BinaryOp::Add, a, b); }
Expression mul(Expression const& a, Expression const& b) { return Expression::binary(BinaryOp::Mul, a, b); }

Dataset make_data(std::uint64_t seed, int n = 100)
{
    Rng rng(seed);
    Dataset d;
    d.X.resize(n, 2);
    for (int i = 0; i < n; ++i) {
        d.X(i, 0) = uniform_real(rng, 0.5, 2.0);
        d.X(i, 1) = uniform_real(rng, 0.5, 2.0);
    }
    d.y = d.X.col(0).array() * d.X.col(1).array() + d.X.col(0).array().square();
    return d;
}

bool within_limits(Expression const& e, int max_length, int max_depth)
{
    return e.length() <= max_length && e.depth() <= max_depth;
}

} // namespace

TEST_CASE("tournament selection")
{
    Rng rng(1);
    std::vector<double> const errs{0.5, 0.2, 0.9, 0.1, 0.7};
    // a group far larger than the population almost surely contains everyone
    for (int i = 0; i < 50; ++i) {
        CHECK(tournament_select(errs, 200, rng) == 3);
    }

    std::vector<int> counts(errs.size(), 0);
    for (int i = 0; i < 50'000; ++i) {
        ++counts[tournament_select(errs, 1, rng)];
    }
    for (int c : counts) {
        CHECK(std::abs(c - 10'000) < 600);
    }

    // ties go to the first sampled individual
    std::vector<double> const flat(7, 1.0);
    for (int i = 0; i < 100; ++i) {
        Rng probe = rng;
        auto const first = uniform_int<std::size_t>(probe, 0, flat.size() - 1);
        CHECK(tournament_select(flat, 5, rng) == first);
    }

    CHECK_THROWS(tournament_select(std::vector<double>{}, 2, rng));
    CHECK_THROWS(tournament_select(errs, 0, rng));
}

TEST_CASE("crossover of single leaves returns that leaf")
{
    Rng rng(2);
    for (int i = 0; i < 20; ++i) {
        CHECK(subtree_crossover(x(0), x(0), 50, 20, rng) == x(0));
    }
}

TEST_CASE("crossover outcomes match the enumerated set")
{
    auto const p1 = add(x(0), x(1));
    auto const p2 = mul(x(0), x(1));
    std::set<std::string> expected;
    for (int cut = 0; cut < p1.length(); ++cut) {
        for (int pick = 0; pick < p2.length(); ++pick) {
            expected.insert(to_infix(p1.replace_subtree(cut, p2.subtree(pick))));
        }
    }
    CHECK(expected.size() == 8); // (x0 + x1) arises twice among the 9 pairs

    Rng rng(3);
    std::set<std::string> seen;
    for (int i = 0; i < 2000; ++i) {
        auto const child = subtree_crossover(p1, p2, 50, 20, rng);
        CHECK(expected.count(to_infix(child)) == 1);
        seen.insert(to_infix(child));
    }
    CHECK(seen == expected);
}

TEST_CASE("crossover at the length limit grafts only fitting subtrees")
{
    Rng rng(4);
    auto const p1 = add(x(0), x(1));
    auto const big = mul(add(x(0), x(1)), add(x(1), x(0)));
    for (int i = 0; i < 200; ++i) {
        CHECK(within_limits(subtree_crossover(p1, big, 3, 2, rng), 3, 2));
    }
}

TEST_CASE("random operators respect limits")
{
    Rng rng(5);
    for (int i = 0; i < 2000; ++i) {
        int const lmax = uniform_int(rng, 1, 30);
        int const dmax = uniform_int(rng, 1, 10);
        auto const a = ptc2_random(lmax, dmax, 3, rng);
        auto const b = ptc2_random(lmax, dmax, 3, rng);
        REQUIRE(within_limits(a, lmax, dmax));
        CHECK(within_limits(subtree_crossover(a, b, lmax, dmax, rng), lmax, dmax));
        auto const m = mutate(a, 3, lmax, dmax, rng);
        CHECK(within_limits(m, lmax, dmax));
        CHECK(m.max_variable_index() < 3);
    }
}

TEST_CASE("parameter mutations keep the structure")
{
    Rng rng(6);
    auto const e = add(mul(p(1.0), x(0)), p(2.0));
    auto const one = mutate(e, MutationKind::ShiftOneParameter, 1, 50, 20, rng);
    REQUIRE(one.length() == e.length());
    auto const before = extract_params(e);
    auto const after = extract_params(one);
    int changed = 0;
    for (std::size_t k = 0; k < before.size(); ++k) {
        changed += before[k] != after[k];
    }
    CHECK(changed == 1);
    CHECK(update_params(one, before) == e);

    auto const all = mutate(e, MutationKind::ShiftAllParameters, 1, 50, 20, rng);
    auto const shifted = extract_params(all);
    CHECK(shifted[0] != before[0]);
    CHECK(shifted[1] != before[1]);
    CHECK(update_params(all, before) == e);

    // shifts are standard normal
    std::vector<double> deltas;
    auto const single = mul(p(1.0), x(0));
    for (int i = 0; i < 20'000; ++i) {
        deltas.push_back(extract_params(mutate(single, MutationKind::ShiftAllParameters, 1, 50, 20, rng))[0] - 1.0);
    }
    double mean = 0;
    for (double d : deltas) {
        mean += d;
    }
    mean /= static_cast<double>(deltas.size());
    double var = 0;
    for (double d : deltas) {
        var += (d - mean) * (d - mean);
    }
    var /= static_cast<double>(deltas.size());
    CHECK(std::abs(mean) < 0.05);
    CHECK(std::abs(var - 1.0) < 0.05);
}

TEST_CASE("symbol change keeps arity")
{
    Rng rng(7);
    auto const e = Expression::unary(UnaryFn::Sin, x(0));
    std::set<UnaryFn> seen;
    for (int i = 0; i < 500; ++i) {
        auto const m = mutate(e, MutationKind::ChangeSymbol, 1, 50, 20, rng);
        REQUIRE(m.length() == 2);
        REQUIRE(m[1].kind == NodeKind::Unary);
        CHECK(m[1].fn != UnaryFn::Sin);
        CHECK(m[0].kind == NodeKind::Variable);
        seen.insert(m[1].fn);
    }
    CHECK(seen.size() == 6);

    auto const b = add(x(0), x(1));
    for (int i = 0; i < 50; ++i) {
        auto const m = mutate(b, MutationKind::ChangeSymbol, 2, 50, 20, rng);
        CHECK(m[2].kind == NodeKind::Binary);
        CHECK(m[2].op != BinaryOp::Add);
    }
}

TEST_CASE("inapplicable mutations fall back to subtree replacement")
{
    Rng rng(8);
    int changed = 0;
    for (int i = 0; i < 100; ++i) {
        auto const m = mutate(x(0), MutationKind::ShiftOneParameter, 2, 10, 5, rng);
        CHECK(within_limits(m, 10, 5));
        changed += !(m == x(0));
        auto const s = mutate(x(1), MutationKind::ChangeSymbol, 2, 10, 5, rng);
        CHECK(within_limits(s, 10, 5));
    }
    CHECK(changed > 50);
}

TEST_CASE("minimal run counts evaluations")
{
    GPConfig cfg;
    cfg.population_size = 2;
    cfg.generations = 1;
    cfg.seed = 9;
    auto const data = make_data(1);
    auto const r = run(cfg, data, ConstraintSet{});
    // two initial evaluations, one child; the elite is carried over without re-evaluation
    CHECK(r.evaluations == 3);
    REQUIRE(r.log.size() == 2);
    CHECK(r.log[0].evaluations == 2);
    CHECK(r.log[1].evaluations == 3);
    CHECK_THROWS(run(GPConfig{.population_size = 1}, data, ConstraintSet{}));
}

TEST_CASE("elitism and deterministic replay")
{
    GPConfig cfg;
    cfg.population_size = 60;
    cfg.generations = 15;
    cfg.seed = 10;
    auto const data = make_data(2);
    auto const a = run(cfg, data, ConstraintSet{});
    for (std::size_t g = 1; g < a.log.size(); ++g) {
        CHECK(a.log[g].best_nmse <= a.log[g - 1].best_nmse);
        CHECK(a.log[g].best_nmse <= a.log[g].median_nmse);
    }
    CHECK(a.best.fitness == a.log.back().best_nmse);
    CHECK(within_limits(a.best.expression, cfg.max_length, cfg.max_depth));

    cfg.workers = 4;
    auto const b = run(cfg, data, ConstraintSet{});
    CHECK(a.best.expression == b.best.expression);
    REQUIRE(a.log.size() == b.log.size());
    for (std::size_t g = 0; g < a.log.size(); ++g) {
        CHECK(a.log[g].best_nmse == b.log[g].best_nmse);
        CHECK(a.log[g].median_nmse == b.log[g].median_nmse);
    }

    cfg.seed = 11;
    auto const c = run(cfg, data, ConstraintSet{});
    CHECK_FALSE(to_infix(a.best.expression) == to_infix(c.best.expression));
}

TEST_CASE("memetic run improves parameters")
{
    auto cfg = GPConfig::memetic();
    CHECK(cfg.generations == 20);
    CHECK(cfg.n_opt == 10);
    cfg.population_size = 40;
    cfg.generations = 5;
    cfg.seed = 12;
    auto const data = make_data(3);
    auto const r = run(cfg, data, ConstraintSet{});
    CHECK(r.best.fitness < 0.5);
    CHECK(r.evaluations == 40 + 5 * 39);
}

TEST_CASE("constrained runs return audited feasible models")
{
    auto const data = make_data(4);
    Box const box{{0.5, 2.0, true}, {0.5, 2.0, true}};
    std::vector<int> const tuple{1, 1};
    auto const c = from_monotonicity_tuple(tuple, box);
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        GPConfig cfg;
        cfg.population_size = 80;
        cfg.generations = 10;
        cfg.seed = seed;
        auto const r = run(cfg, data, c);
        if (r.best.fitness < 1.0) {
            CHECK(r.feasible);
            CHECK(r.best.feasible);
            ScaledModel const m(std::make_shared<TreeModel>(r.best.expression), r.best.scaling.offset, r.best.scaling.scale);
            CHECK(audit_empirical(m, c, 20'000, seed).feasible());
        }
        CHECK(r.best.fitness < 1.0);
    }
}
