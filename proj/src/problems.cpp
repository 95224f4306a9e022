#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "scsr/problems.hpp"

namespace scsr {

namespace {

using json = nlohmann::json;

std::vector<std::string> split_line(std::string const& line)
{
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        auto const b = cell.find_first_not_of(" \t\r");
        auto const e = cell.find_last_not_of(" \t\r");
        cells.push_back(b == std::string::npos ? std::string{} : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') {
        cells.emplace_back();
    }
    return cells;
}

Dataset rows_of(Dataset const& d, std::span<std::size_t const> idx)
{
    Dataset out;
    out.columns = d.columns;
    out.target = d.target;
    out.provenance = d.provenance;
    out.X.resize(static_cast<Eigen::Index>(idx.size()), d.X.cols());
    out.y.resize(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) {
        auto const src = static_cast<Eigen::Index>(idx[i]);
        out.X.row(static_cast<Eigen::Index>(i)) = d.X.row(src);
        out.y(static_cast<Eigen::Index>(i)) = d.y(src);
    }
    return out;
}

} // namespace

ProblemSpec builtin_spec(Builtin const& b, double noise, std::uint64_t seed)
{
    ProblemSpec s;
    s.name = b.name;
    s.builtin = b.slug;
    s.variables = b.variables;
    s.target = "y";
    s.box = b.box;
    s.monotonicity = b.monotonicity;
    s.noise = noise;
    s.seed = seed;
    return s;
}

ConstraintSet constraints_of(ProblemSpec const& spec)
{
    return from_monotonicity_tuple(spec.monotonicity, spec.box, spec.image_bounds);
}

DataSplit generate(ProblemSpec const& spec)
{
    if (spec.builtin.empty()) {
        throw std::invalid_argument("problem '" + spec.name + "' has no generating formula");
    }
    auto const& b = find_builtin(spec.builtin);
    if (spec.box.size() != b.variables.size()) {
        throw std::invalid_argument("problem '" + spec.name + "': box dimension does not match the formula");
    }
    if (spec.n_train < 1 || spec.n_test < 0) {
        throw std::invalid_argument("problem '" + spec.name + "': invalid sample counts");
    }
    auto const n = static_cast<Eigen::Index>(spec.n_train + spec.n_test);
    auto const d = static_cast<Eigen::Index>(spec.box.size());
    Rng rng(spec.seed);
    Eigen::MatrixXd X(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            auto const& iv = spec.box[static_cast<std::size_t>(j)];
            X(i, j) = uniform_real(rng, iv.lo, iv.hi);
        }
    }
    Eigen::ArrayXd y = FormulaModel(b.formula).predict(X);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!std::isfinite(y(i))) {
            throw std::domain_error("problem '" + spec.name + "': generating formula is undefined at sample "
                + std::to_string(i) + " inside the declared box");
        }
    }
    if (spec.noise > 0.0) {
        auto const n_train = static_cast<Eigen::Index>(spec.n_train);
        auto add_noise = [&](Eigen::Index begin, Eigen::Index count, double sd) {
            for (Eigen::Index i = begin; i < begin + count; ++i) {
                y(i) += spec.noise * sd * standard_normal(rng);
            }
        };
        auto population_sd = [](auto const& v) { return v.size() ? std::sqrt((v - v.mean()).square().mean()) : 0.0; };
        if (spec.noise_scale == NoiseScale::Pooled) {
            add_noise(0, n, population_sd(y));
        } else {
            double const sd_train = population_sd(y.head(n_train));
            double const sd_test = population_sd(y.tail(n - n_train));
            add_noise(0, n_train, sd_train);
            add_noise(n_train, n - n_train, sd_test);
        }
    }

    Dataset all;
    all.X = std::move(X);
    all.y = std::move(y);
    all.columns = b.variables;
    all.target = "y";
    all.provenance = b.slug + " seed=" + std::to_string(spec.seed) + " noise=" + std::to_string(spec.noise);
    std::vector<std::size_t> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    auto const cut = static_cast<std::size_t>(spec.n_train);
    return {rows_of(all, std::span(idx).first(cut)), rows_of(all, std::span(idx).subspan(cut))};
}

Dataset load_csv(std::string const& path, std::string const& target)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open '" + path + "'");
    }
    std::string line;
    if (!std::getline(in, line) || line.find_first_not_of(" \t\r") == std::string::npos) {
        throw std::runtime_error(path + ": empty file");
    }
    auto const header = split_line(line);
    auto const t = std::find(header.begin(), header.end(), target);
    if (t == header.end()) {
        throw std::runtime_error(path + ": target column '" + target + "' not found");
    }
    auto const target_col = static_cast<std::size_t>(t - header.begin());

    Dataset d;
    d.target = target;
    d.provenance = path;
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (j != target_col) {
            d.columns.push_back(header[j]);
        }
    }
    std::vector<std::vector<double>> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        auto const cells = split_line(line);
        if (cells.size() != header.size()) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected " + std::to_string(header.size())
                + " cells, found " + std::to_string(cells.size()));
        }
        std::vector<double> row(cells.size());
        for (std::size_t j = 0; j < cells.size(); ++j) {
            auto const& c = cells[j];
            auto const [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), row[j]);
            if (ec != std::errc{} || ptr != c.data() + c.size() || c.empty() || !std::isfinite(row[j])) {
                throw std::runtime_error(path + ":" + std::to_string(line_no) + ": column '" + header[j]
                    + "' is not a finite number ('" + c + "')");
            }
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw std::runtime_error(path + ": no data rows");
    }
    auto const n = static_cast<Eigen::Index>(rows.size());
    d.X.resize(n, static_cast<Eigen::Index>(d.columns.size()));
    d.y.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::Index k = 0;
        auto const& r = rows[static_cast<std::size_t>(i)];
        for (std::size_t j = 0; j < r.size(); ++j) {
            if (j == target_col) {
                d.y(i) = r[j];
            } else {
                d.X(i, k++) = r[j];
            }
        }
    }
    return d;
}

void write_csv(std::string const& path, Dataset const& data)
{
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write '" + path + "'");
    }
    for (auto const& c : data.columns) {
        out << c << ',';
    }
    out << (data.target.empty() ? "y" : data.target) << '\n';
    char buf[32];
    auto put = [&](double v) {
        auto const r = std::to_chars(buf, buf + sizeof buf, v);
        out.write(buf, r.ptr - buf);
    };
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        for (Eigen::Index j = 0; j < data.X.cols(); ++j) {
            put(data.X(i, j));
            out << ',';
        }
        put(data.y(i));
        out << '\n';
    }
}

DataSplit split_dataset(Dataset const& data, double train_fraction, std::uint64_t seed)
{
    if (!(train_fraction > 0.0 && train_fraction <= 1.0)) {
        throw std::invalid_argument("train fraction must lie in (0, 1]");
    }
    std::vector<std::size_t> idx(static_cast<std::size_t>(data.rows()));
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    auto const cut = static_cast<std::size_t>(std::lround(train_fraction * static_cast<double>(idx.size())));
    return {rows_of(data, std::span(idx).first(cut)), rows_of(data, std::span(idx).subspan(cut))};
}

DataSplit load_problem(ProblemSpec const& spec)
{
    if (!spec.builtin.empty()) {
        return generate(spec);
    }
    auto data = load_csv(spec.csv_path, spec.target);
    if (static_cast<std::size_t>(data.dim()) != spec.box.size()) {
        throw std::invalid_argument("problem '" + spec.name + "': data has " + std::to_string(data.dim())
            + " inputs but the box has " + std::to_string(spec.box.size()));
    }
    return split_dataset(data, spec.train_fraction, spec.seed);
}

std::string problem_spec_json(ProblemSpec const& spec)
{
    json j;
    j["name"] = spec.name;
    if (!spec.builtin.empty()) {
        j["builtin"] = spec.builtin;
    } else {
        j["csv"] = {{"path", spec.csv_path}, {"target", spec.target}};
        j["train_fraction"] = spec.train_fraction;
    }
    j["variables"] = spec.variables;
    json box = json::array();
    for (auto const& iv : spec.box) {
        box.push_back({iv.lo, iv.hi});
    }
    j["box"] = box;
    j["monotonicity"] = spec.monotonicity;
    if (spec.image_bounds) {
        j["image_bounds"] = {spec.image_bounds->lo, spec.image_bounds->hi};
    }
    j["n_train"] = spec.n_train;
    j["n_test"] = spec.n_test;
    j["noise"] = spec.noise;
    j["noise_scale"] = spec.noise_scale == NoiseScale::Pooled ? "pooled" : "per-split";
    j["seed"] = spec.seed;
    return j.dump(2);
}

ProblemSpec problem_spec_from_json(std::string const& text)
{
    json const j = json::parse(text);
    ProblemSpec s;
    if (j.contains("builtin")) {
        auto const& b = find_builtin(j.at("builtin").get<std::string>());
        s = builtin_spec(b);
    } else if (j.contains("csv")) {
        s.csv_path = j.at("csv").at("path").get<std::string>();
        s.target = j.at("csv").at("target").get<std::string>();
    } else {
        throw std::invalid_argument("problem spec needs either 'builtin' or 'csv'");
    }
    s.name = j.value("name", s.name);
    if (j.contains("variables")) {
        s.variables = j.at("variables").get<std::vector<std::string>>();
    }
    if (j.contains("box")) {
        s.box.clear();
        for (auto const& pair : j.at("box")) {
            auto const lo = pair.at(0).get<double>();
            auto const hi = pair.at(1).get<double>();
            if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
                throw std::invalid_argument("problem spec box entries must be finite [lo, hi] pairs");
            }
            s.box.push_back({lo, hi, true});
        }
    }
    if (j.contains("monotonicity")) {
        s.monotonicity = j.at("monotonicity").get<std::vector<int>>();
    }
    if (j.contains("image_bounds")) {
        auto const& ib = j.at("image_bounds");
        s.image_bounds = Interval{ib.at(0).get<double>(), ib.at(1).get<double>(), true};
    }
    s.n_train = j.value("n_train", s.n_train);
    s.n_test = j.value("n_test", s.n_test);
    s.noise = j.value("noise", s.noise);
    if (j.contains("noise_scale")) {
        auto const ns = j.at("noise_scale").get<std::string>();
        if (ns != "pooled" && ns != "per-split") {
            throw std::invalid_argument("noise_scale must be 'pooled' or 'per-split'");
        }
        s.noise_scale = ns == "pooled" ? NoiseScale::Pooled : NoiseScale::PerSplit;
    }
    s.seed = j.value("seed", s.seed);
    s.train_fraction = j.value("train_fraction", s.train_fraction);
    if (s.monotonicity.size() != s.box.size()) {
        throw std::invalid_argument("problem spec: monotonicity tuple length differs from the box dimension");
    }
    return s;
}

ProblemSpec read_problem_spec(std::string const& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open '" + path + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return problem_spec_from_json(ss.str());
}

void write_problem_spec(std::string const& path, ProblemSpec const& spec)
{
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write '" + path + "'");
    }
    out << problem_spec_json(spec) << '\n';
}

} // namespace scsr
