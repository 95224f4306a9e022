#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scsr/constraints.hpp"
#include "scsr/dataset.hpp"
#include "scsr/dual.hpp"
#include "scsr/interval.hpp"
#include "scsr/model.hpp"

namespace scsr {

/// A closed-form generating function, evaluable pointwise, over boxes, and
/// differentiable in one variable at a time (forward mode).
struct Formula {
    std::function<double(std::span<double const>)> eval;
    std::function<Interval(Box const&)> bound;
    std::function<double(std::span<double const>, int var)> derivative;
    std::function<Interval(Box const&, int var)> derivative_bound;
};

/// Benchmark formula as a checkable model (first-order derivatives only).
class FormulaModel final : public ShapeModel {
public:
    explicit FormulaModel(Formula f)
        : f_(std::move(f))
    {
    }

    Eigen::ArrayXd predict(Eigen::MatrixXd const& X) const override;
    Eigen::ArrayXd partial(Eigen::MatrixXd const& X, int var, int order) const override;
    Interval image(Box const& box) const override { return f_.bound(box); }
    Interval partial_interval(Box const& box, int var, int order) const override;

private:
    Formula f_;
};

struct Builtin {
    std::string name;
    std::string slug;
    std::string expression; // human-readable generating formula
    std::vector<std::string> variables;
    Box box;
    std::vector<int> monotonicity;
    Formula formula;
};

/// The 19 synthetic benchmark problems.
std::span<Builtin const> builtin_registry();
/// Looks up by display name or slug, case-insensitively; the error lists all slugs.
Builtin const& find_builtin(std::string_view name);

/// Real-world problems: constraints and domains only, data is user supplied.
struct RealWorldProblem {
    std::string name;
    std::string slug;
    std::vector<std::string> variables;
    std::string target;
    Box box;
    std::vector<int> monotonicity;
};
std::span<RealWorldProblem const> real_world_registry();

/// Which targets define sd(y) for the noise: each split's own, or all samples together.
enum class NoiseScale { PerSplit, Pooled };

struct ProblemSpec {
    std::string name;
    std::string builtin;  // slug of a builtin formula, or empty
    std::string csv_path; // data file when not a builtin
    std::string target;   // target column of the data file
    std::vector<std::string> variables;
    Box box;
    std::vector<int> monotonicity;
    std::optional<Interval> image_bounds;
    int n_train{100};
    int n_test{100};
    double noise{0.0}; // relative noise level sigma_rel
    NoiseScale noise_scale{NoiseScale::PerSplit};
    std::uint64_t seed{0};
    double train_fraction{0.75}; // data files only
};

ProblemSpec builtin_spec(Builtin const& b, double noise = 0.0, std::uint64_t seed = 0);
ConstraintSet constraints_of(ProblemSpec const& spec);

struct DataSplit {
    Dataset train;
    Dataset test;
};

/// Samples n_train + n_test points uniformly from the box (training rows
/// first), evaluates the builtin formula and adds N(0, noise * sd(y)) noise.
/// Throws std::domain_error when the formula is undefined at a sample.
DataSplit generate(ProblemSpec const& spec);

/// Reads a comma-separated file with a header row; every column except
/// `target` becomes an input. Errors name the offending line.
Dataset load_csv(std::string const& path, std::string const& target);
void write_csv(std::string const& path, Dataset const& data);

/// Seeded shuffle followed by a split at round(train_fraction * rows).
DataSplit split_dataset(Dataset const& data, double train_fraction, std::uint64_t seed);

/// Builtins are generated, data files loaded and split.
DataSplit load_problem(ProblemSpec const& spec);

/// JSON problem-spec files.
ProblemSpec read_problem_spec(std::string const& path);
void write_problem_spec(std::string const& path, ProblemSpec const& spec);
std::string problem_spec_json(ProblemSpec const& spec);
ProblemSpec problem_spec_from_json(std::string const& text);

} // namespace scsr
