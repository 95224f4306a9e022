#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "scsr/model_file.hpp"

namespace scsr {

using json = nlohmann::json;

std::shared_ptr<ShapeModel const> ModelFile::model() const
{
    std::shared_ptr<ShapeModel const> inner;
    if (kind == Kind::Tree) {
        inner = std::make_shared<TreeModel>(tree);
    } else {
        inner = std::make_shared<itea::ITModel>(it);
    }
    return std::make_shared<ScaledModel>(std::move(inner), scaling.offset, scaling.scale);
}

std::string ModelFile::expression_text() const
{
    std::ostringstream out;
    out.precision(17);
    if (kind == Kind::Tree) {
        if (scaling.offset == 0.0 && scaling.scale == 1.0) {
            return to_infix(tree);
        }
        out << scaling.offset << " + " << scaling.scale << " * " << to_infix(tree);
        return out.str();
    }
    out << it.intercept;
    for (std::size_t i = 0; i < it.terms.size(); ++i) {
        out << " + " << it.weights[i] << " * " << to_string(it.terms[i].transform) << "(";
        bool first = true;
        for (std::size_t j = 0; j < it.terms[i].strengths.size(); ++j) {
            int const k = it.terms[i].strengths[j];
            if (k == 0) {
                continue;
            }
            out << (first ? "" : " * ") << "x" << j << (k == 1 ? "" : "^" + std::to_string(k));
            first = false;
        }
        out << ")";
    }
    return out.str();
}

ModelFile tree_model_file(Expression e, LinearScaling s, ProblemSpec problem)
{
    ModelFile m;
    m.kind = ModelFile::Kind::Tree;
    m.tree = std::move(e);
    m.scaling = s;
    m.problem = std::move(problem);
    return m;
}

ModelFile it_model_file(itea::ITExpression f, ProblemSpec problem)
{
    ModelFile m;
    m.kind = ModelFile::Kind::IT;
    m.it = std::move(f);
    m.problem = std::move(problem);
    return m;
}

std::string model_file_json(ModelFile const& m)
{
    json j;
    j["kind"] = m.kind == ModelFile::Kind::Tree ? "tree" : "it";
    if (m.kind == ModelFile::Kind::Tree) {
        j["expression"] = to_infix(m.tree);
    } else {
        json terms = json::array();
        for (std::size_t i = 0; i < m.it.terms.size(); ++i) {
            terms.push_back({{"strengths", m.it.terms[i].strengths},
                {"transform", std::string(to_string(m.it.terms[i].transform))}, {"weight", m.it.weights[i]}});
        }
        j["terms"] = std::move(terms);
        j["intercept"] = m.it.intercept;
    }
    j["scaling"] = {{"a", m.scaling.offset}, {"b", m.scaling.scale}};
    j["problem"] = json::parse(problem_spec_json(m.problem));
    return j.dump();
}

ModelFile model_file_from_json(std::string const& text)
{
    try {
        auto const j = json::parse(text);
        ModelFile m;
        auto const kind = j.at("kind").get<std::string>();
        m.problem = problem_spec_from_json(j.at("problem").dump());
        if (kind == "tree") {
            m.kind = ModelFile::Kind::Tree;
            m.tree = parse_infix(j.at("expression").get<std::string>());
        } else if (kind == "it") {
            m.kind = ModelFile::Kind::IT;
            for (auto const& t : j.at("terms")) {
                m.it.terms.push_back(
                    {t.at("strengths").get<std::vector<int>>(), unary_fn_from_string(t.at("transform").get<std::string>())});
                m.it.weights.push_back(t.at("weight").get<double>());
            }
            m.it.intercept = j.at("intercept").get<double>();
            m.it.validate(static_cast<int>(m.problem.box.size()));
        } else {
            throw std::invalid_argument("unknown model kind '" + kind + "'");
        }
        m.scaling.offset = j.at("scaling").at("a").get<double>();
        m.scaling.scale = j.at("scaling").at("b").get<double>();
        return m;
    } catch (json::exception const& e) {
        throw std::invalid_argument(std::string("malformed model file: ") + e.what());
    }
}

void write_model_file(std::string const& path, ModelFile const& m)
{
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write '" + path + "'");
    }
    out << model_file_json(m) << '\n';
}

ModelFile read_model_file(std::string const& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open '" + path + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return model_file_from_json(buf.str());
}

} // namespace scsr
