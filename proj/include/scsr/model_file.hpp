#pragma once

#include <memory>
#include <optional>
#include <string>

#include "scsr/expr.hpp"
#include "scsr/fitness.hpp"
#include "scsr/itea.hpp"
#include "scsr/model.hpp"
#include "scsr/problems.hpp"

namespace scsr {

/// A fitted model with everything needed to re-check it later: the expression
/// (tree or IT), the linear scaling applied on top and the problem it was fitted to.
struct ModelFile {
    enum class Kind { Tree, IT };

    Kind kind{Kind::Tree};
    Expression tree;
    itea::ITExpression it;
    LinearScaling scaling{}; // identity for IT models, whose weights already absorb it
    ProblemSpec problem;

    /// The predictive model offset + scale * f.
    [[nodiscard]] std::shared_ptr<ShapeModel const> model() const;
    [[nodiscard]] std::string expression_text() const;
};

ModelFile tree_model_file(Expression e, LinearScaling s, ProblemSpec problem);
ModelFile it_model_file(itea::ITExpression f, ProblemSpec problem);

/// Compact single-line JSON; numbers use shortest round-trip formatting.
std::string model_file_json(ModelFile const& m);
ModelFile model_file_from_json(std::string const& text);

void write_model_file(std::string const& path, ModelFile const& m);
ModelFile read_model_file(std::string const& path);

} // namespace scsr
