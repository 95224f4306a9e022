#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

#include <nlohmann/json.hpp>

#include "scsr/experiment.hpp"
#include "scsr/fitness.hpp"
#include "scsr/model_file.hpp"
#include "scsr/parallel.hpp"
#include "scsr/stats.hpp"

namespace scsr {

namespace {

using json = nlohmann::json;

constexpr std::uint64_t kAuditStream = 0xa0d17;

double pct(double nmse_value) { return 100.0 * nmse_value; }

std::string problem_label(ProblemSpec const& p)
{
    std::string base = p.builtin.empty() ? p.name : p.builtin;
    return p.noise > 0.0 ? base + "-noisy" : base;
}

std::string file_stem(RunRecord const& r)
{
    std::string s = r.problem + "_" + std::string(to_string(r.algorithm)) + (r.constraints ? "_c_" : "_u_")
        + std::to_string(r.seed);
    std::replace_if(s.begin(), s.end(), [](char c) { return !(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.'); }, '_');
    return s;
}

using CellKey = std::tuple<std::string, Algorithm, bool>;

std::ofstream open_out(std::string const& path)
{
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write '" + path + "'");
    }
    out << std::fixed << std::setprecision(2);
    return out;
}

} // namespace

std::string_view to_string(Algorithm a) noexcept
{
    switch (a) {
    case Algorithm::GP: return "GP";
    case Algorithm::GPC: return "GPC";
    case Algorithm::ITEA: return "ITEA";
    case Algorithm::FIIT: return "FIIT";
    }
    return "?";
}

Algorithm algorithm_from_string(std::string_view name)
{
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "gp") return Algorithm::GP;
    if (lower == "gpc") return Algorithm::GPC;
    if (lower == "itea") return Algorithm::ITEA;
    if (lower == "fiit") return Algorithm::FIIT;
    throw std::invalid_argument("unknown algorithm '" + std::string(name) + "' (expected gp, gpc, itea or fiit)");
}

RunRecord run_once(ProblemSpec const& problem, DataSplit const& data, AlgorithmChoice choice, std::uint64_t seed,
    ExperimentConfig const& cfg, ConvergenceLog* log)
{
    if (choice.algorithm == Algorithm::ITEA && choice.constraints) {
        throw std::invalid_argument("ITEA is unconstrained; use FIIT for the constrained variant");
    }
    bool const constrained = choice.algorithm == Algorithm::FIIT || choice.constraints;
    auto const problem_constraints = constraints_of(problem);
    if (choice.algorithm == Algorithm::FIIT && problem_constraints.empty() && !cfg.allow_empty_constraints) {
        throw std::invalid_argument("FI-2POP requires constraints; the problem declares none");
    }
    ConstraintSet const search_constraints = constrained ? problem_constraints : ConstraintSet{{}, problem.box};

    RunRecord r;
    r.problem = problem_label(problem);
    r.algorithm = choice.algorithm;
    r.constraints = constrained;
    r.seed = seed;

    auto const start = std::chrono::steady_clock::now();
    std::optional<ModelFile> model;
    ConvergenceLog trace;
    if (choice.algorithm == Algorithm::GP || choice.algorithm == Algorithm::GPC) {
        auto g = choice.algorithm == Algorithm::GP ? cfg.gp : cfg.gpc;
        g.seed = seed;
        auto res = gp::run(g, data.train, search_constraints);
        r.evaluations = res.evaluations;
        r.no_solution = constrained && !res.feasible;
        trace = std::move(res.log);
        model = tree_model_file(std::move(res.best.expression), res.best.scaling, problem);
    } else {
        auto c = cfg.itea;
        c.seed = seed;
        auto res = choice.algorithm == Algorithm::ITEA ? itea::run_itea(c, data.train)
                                                       : itea::run_fi2pop(c, data.train, search_constraints);
        r.evaluations = res.evaluations;
        trace = std::move(res.log);
        if (res.best) {
            model = it_model_file(std::move(res.best->expression), problem);
        } else {
            r.no_solution = true;
        }
    }
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (model) {
        r.model = model_file_json(*model);
        auto const m = model->model();
        if (!r.no_solution) {
            r.train_nmse_pct = pct(nmse(m->predict(data.train.X), data.train.y));
            r.test_nmse_pct = data.test.rows() > 0 ? pct(nmse(m->predict(data.test.X), data.test.y)) : 0.0;
        }
        if (cfg.audit_samples > 0) {
            r.audit = audit_empirical(*m, problem_constraints, cfg.audit_samples, derive_seed(seed, kAuditStream), cfg.audit_workers);
        }
    }
    if (!cfg.convergence_dir.empty()) {
        write_convergence_csv(cfg.convergence_dir + "/" + file_stem(r) + ".csv", trace);
    }
    if (log) {
        *log = std::move(trace);
    }
    return r;
}

std::vector<RunRecord> run_batch(std::vector<ProblemSpec> const& problems, std::vector<AlgorithmChoice> const& algorithms,
    int repetitions, std::uint64_t base_seed, ExperimentConfig const& cfg)
{
    if (repetitions < 1) {
        throw std::invalid_argument("repetitions must be at least 1");
    }
    std::vector<std::optional<DataSplit>> data(problems.size());
    std::vector<std::string> load_errors(problems.size());
    for (std::size_t p = 0; p < problems.size(); ++p) {
        try {
            data[p] = load_problem(problems[p]);
        } catch (std::exception const& e) {
            load_errors[p] = e.what();
        }
    }

    struct Task {
        std::size_t problem;
        AlgorithmChoice choice;
        std::uint64_t seed;
    };
    std::vector<Task> tasks;
    for (std::size_t p = 0; p < problems.size(); ++p) {
        for (auto const& a : algorithms) {
            for (int rep = 0; rep < repetitions; ++rep) {
                tasks.push_back({p, a, base_seed + static_cast<std::uint64_t>(rep)});
            }
        }
    }

    std::vector<RunRecord> records(tasks.size());
    std::mutex writer;
    parallel_for(tasks.size(), cfg.workers, [&](std::size_t i) {
        auto const& t = tasks[i];
        auto const& spec = problems[t.problem];
        RunRecord r;
        try {
            if (!data[t.problem]) {
                throw std::runtime_error(load_errors[t.problem]);
            }
            r = run_once(spec, *data[t.problem], t.choice, t.seed, cfg);
        } catch (std::exception const& e) {
            r = RunRecord{};
            r.problem = problem_label(spec);
            r.algorithm = t.choice.algorithm;
            r.constraints = t.choice.algorithm == Algorithm::FIIT || t.choice.constraints;
            r.seed = t.seed;
            r.error = e.what();
        }
        if (!cfg.records_path.empty()) {
            std::lock_guard lock(writer);
            append_record(cfg.records_path, r);
        }
        records[i] = std::move(r);
    });
    return records;
}

std::string record_json(RunRecord const& r)
{
    json j{{"problem", r.problem}, {"algorithm", std::string(to_string(r.algorithm))}, {"constraints", r.constraints},
        {"seed", r.seed}, {"train_nmse_pct", r.train_nmse_pct}, {"test_nmse_pct", r.test_nmse_pct},
        {"wall_seconds", r.wall_seconds}, {"evaluations", r.evaluations}, {"no_solution", r.no_solution}};
    j["model"] = r.model.empty() ? json(nullptr) : json::parse(r.model);
    if (r.audit) {
        j["audit"] = {{"samples", r.audit->samples}, {"violated", r.audit->violated}, {"feasible", r.audit->feasible()}};
    }
    if (!r.error.empty()) {
        j["error"] = r.error;
    }
    return j.dump();
}

RunRecord record_from_json(std::string const& line)
{
    auto const j = json::parse(line);
    RunRecord r;
    r.problem = j.at("problem").get<std::string>();
    r.algorithm = algorithm_from_string(j.at("algorithm").get<std::string>());
    r.constraints = j.at("constraints").get<bool>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.train_nmse_pct = j.at("train_nmse_pct").get<double>();
    r.test_nmse_pct = j.at("test_nmse_pct").get<double>();
    r.wall_seconds = j.at("wall_seconds").get<double>();
    r.evaluations = j.at("evaluations").get<std::size_t>();
    r.no_solution = j.at("no_solution").get<bool>();
    if (!j.at("model").is_null()) {
        r.model = j.at("model").dump();
    }
    if (j.contains("audit")) {
        AuditReport a;
        a.samples = j.at("audit").at("samples").get<std::size_t>();
        a.violated = j.at("audit").at("violated").get<std::vector<std::size_t>>();
        r.audit = std::move(a);
    }
    r.error = j.value("error", std::string{});
    return r;
}

void append_record(std::string const& path, RunRecord const& r)
{
    std::ofstream out(path, std::ios::app);
    if (!out) {
        throw std::runtime_error("cannot append to '" + path + "'");
    }
    out << record_json(r) << '\n';
    out.flush();
}

std::vector<RunRecord> read_records(std::string const& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open '" + path + "'");
    }
    std::vector<RunRecord> out;
    std::string line;
    for (int line_no = 1; std::getline(in, line); ++line_no) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        try {
            out.push_back(record_from_json(line));
        } catch (std::exception const& e) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

double truncate2(double v) noexcept
{
    return std::floor(v * 100.0 + 1e-9) / 100.0;
}

MedianReport report_medians(std::vector<RunRecord> const& records)
{
    std::map<CellKey, std::pair<std::vector<double>, std::vector<double>>> cells;
    std::map<CellKey, std::size_t> failed;
    for (auto const& r : records) {
        CellKey key{r.problem, r.algorithm, r.constraints};
        if (!r.error.empty()) {
            ++failed[key];
            continue;
        }
        cells[key].first.push_back(r.train_nmse_pct);
        cells[key].second.push_back(r.test_nmse_pct);
    }
    MedianReport rep;
    for (auto const& [key, v] : cells) {
        auto const& [problem, algo, constrained] = key;
        rep.rows.push_back({problem, algo, constrained, v.first.size(), truncate2(median(v.first)), truncate2(median(v.second))});
    }
    for (auto const& [key, n] : failed) {
        if (!cells.contains(key)) {
            rep.warnings.push_back(std::get<0>(key) + " / " + std::string(to_string(std::get<1>(key)))
                + ": all " + std::to_string(n) + " runs failed, cell omitted");
        }
    }
    return rep;
}

std::vector<ViolationRow> report_violations(std::vector<RunRecord> const& records)
{
    std::map<CellKey, ViolationRow> cells;
    for (auto const& r : records) {
        if (!r.audit) {
            continue;
        }
        auto& row = cells[{r.problem, r.algorithm, r.constraints}];
        row.problem = r.problem;
        row.algorithm = r.algorithm;
        row.constraints = r.constraints;
        ++row.audited;
        row.infeasible += r.audit->feasible() ? 0 : 1;
    }
    std::vector<ViolationRow> out;
    for (auto& [key, row] : cells) {
        out.push_back(row);
    }
    return out;
}

std::vector<RuntimeRow> report_runtime(std::vector<RunRecord> const& records)
{
    // family -> (unconstrained, constrained) wall times
    std::map<std::pair<std::string, std::string>, std::pair<std::vector<double>, std::vector<double>>> cells;
    for (auto const& r : records) {
        if (!r.error.empty()) {
            continue;
        }
        std::string const family = r.algorithm == Algorithm::FIIT ? "ITEA" : std::string(to_string(r.algorithm));
        auto& c = cells[{r.problem, family}];
        (r.constraints ? c.second : c.first).push_back(r.wall_seconds);
    }
    std::vector<RuntimeRow> out;
    for (auto const& [key, c] : cells) {
        if (!c.first.empty() && !c.second.empty()) {
            out.push_back({key.first, key.second, median(c.first), median(c.second)});
        }
    }
    return out;
}

void write_medians_csv(std::string const& path, std::vector<MedianRow> const& rows)
{
    auto out = open_out(path);
    out << "problem,algorithm,constraints,runs,train_nmse_pct,test_nmse_pct\n";
    for (auto const& r : rows) {
        out << r.problem << ',' << to_string(r.algorithm) << ',' << (r.constraints ? 1 : 0) << ',' << r.runs << ','
            << r.train_nmse_pct << ',' << r.test_nmse_pct << '\n';
    }
}

void write_violations_csv(std::string const& path, std::vector<ViolationRow> const& rows)
{
    auto out = open_out(path);
    out << "problem,algorithm,constraints,audited,infeasible,frequency\n";
    for (auto const& r : rows) {
        out << r.problem << ',' << to_string(r.algorithm) << ',' << (r.constraints ? 1 : 0) << ',' << r.audited << ','
            << r.infeasible << ',' << r.frequency() << '\n';
    }
}

void write_runtime_csv(std::string const& path, std::vector<RuntimeRow> const& rows)
{
    auto out = open_out(path);
    out << "problem,family,unconstrained_s,constrained_s,ratio\n";
    for (auto const& r : rows) {
        out << r.problem << ',' << r.family << ',' << r.unconstrained_seconds << ',' << r.constrained_seconds << ','
            << r.ratio() << '\n';
    }
}

void write_convergence_csv(std::string const& path, ConvergenceLog const& log)
{
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write '" + path + "'");
    }
    out << std::setprecision(17) << "generation,evaluations,best,median\n";
    for (auto const& row : log) {
        out << row.generation << ',' << row.evaluations << ',' << row.best_nmse << ',' << row.median_nmse << '\n';
    }
}

} // namespace scsr
