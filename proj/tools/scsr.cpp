#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "scsr/experiment.hpp"
#include "scsr/model_file.hpp"

using namespace scsr;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1; // infeasible model, unknown name, unreadable file
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotFound : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int default_workers()
{
    if (char const* env = std::getenv("SCSR_WORKERS")) {
        int const n = std::atoi(env);
        if (n > 0) {
            return n;
        }
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

Builtin const& lookup(std::string const& name)
{
    try {
        return find_builtin(name);
    } catch (std::invalid_argument const& e) {
        throw NotFound(e.what());
    }
}

struct ProblemSource {
    std::string builtin;
    std::string spec_file;
    bool noisy{false};
    std::uint64_t data_seed{0};

    void add_to(CLI::App& cmd)
    {
        auto* b = cmd.add_option("--problem", builtin, "builtin problem name or slug");
        auto* f = cmd.add_option("--spec", spec_file, "problem spec JSON file");
        b->excludes(f);
        cmd.add_flag("--noise", noisy, "noisy variant of a builtin (5% of sd(y))");
        cmd.add_option("--data-seed", data_seed, "seed of the data generation or split");
    }

    [[nodiscard]] ProblemSpec resolve() const
    {
        if (builtin.empty() == spec_file.empty()) {
            throw UsageError("exactly one of --problem or --spec is required");
        }
        if (!spec_file.empty()) {
            if (!std::filesystem::exists(spec_file)) {
                throw NotFound("problem spec '" + spec_file + "' not found");
            }
            auto s = read_problem_spec(spec_file);
            if (noisy) {
                s.noise = 0.05;
            }
            return s;
        }
        return builtin_spec(lookup(builtin), noisy ? 0.05 : 0.0, data_seed);
    }
};

struct Overrides {
    std::optional<int> pop_size;
    std::optional<int> generations;
    std::optional<int> iterations;
    std::optional<int> n_opt;
    std::optional<int> max_length;
    std::optional<int> max_depth;
    std::optional<int> tournament_size;
    std::optional<double> mutation_rate;
    std::optional<int> max_terms;

    void add_to(CLI::App& cmd)
    {
        cmd.add_option("--pop-size", pop_size, "population size (GP and ITEA)");
        cmd.add_option("--generations", generations, "GP generations");
        cmd.add_option("--iterations", iterations, "ITEA iterations");
        cmd.add_option("--n-opt", n_opt, "Levenberg-Marquardt iterations for GP (GPC stays at 10)");
        cmd.add_option("--max-length", max_length, "GP tree length limit");
        cmd.add_option("--max-depth", max_depth, "GP tree depth limit");
        cmd.add_option("--tournament-size", tournament_size, "GP tournament size");
        cmd.add_option("--mutation-rate", mutation_rate, "GP mutation rate");
        cmd.add_option("--max-terms", max_terms, "initial ITEA terms per expression");
    }

    void apply(ExperimentConfig& cfg) const
    {
        for (auto* g : {&cfg.gp, &cfg.gpc}) {
            if (pop_size) g->population_size = *pop_size;
            if (generations) g->generations = *generations;
            if (max_length) g->max_length = *max_length;
            if (max_depth) g->max_depth = *max_depth;
            if (tournament_size) g->tournament_size = *tournament_size;
            if (mutation_rate) g->mutation_rate = *mutation_rate;
        }
        if (n_opt) cfg.gp.n_opt = *n_opt;
        cfg.gpc.n_opt = 10;
        if (pop_size) cfg.itea.population_size = *pop_size;
        if (iterations) cfg.itea.iterations = *iterations;
        if (max_terms) cfg.itea.max_terms_init = *max_terms;
    }
};

void print_pct(std::ostream& out, char const* label, double v)
{
    out << label << std::fixed << std::setprecision(2) << v << "%";
}

int cmd_generate(ProblemSource const& src, std::string const& out_dir)
{
    auto const spec = src.resolve();
    auto const data = generate(spec);
    std::filesystem::create_directories(out_dir);
    auto const train = (std::filesystem::path(out_dir) / "train.csv").string();
    auto const test = (std::filesystem::path(out_dir) / "test.csv").string();
    write_csv(train, data.train);
    write_csv(test, data.test);
    std::cout << "wrote " << train << " (" << data.train.rows() << " rows) and " << test << " (" << data.test.rows()
              << " rows)\n";
    return kOk;
}

int cmd_run(ProblemSource const& src, std::string const& algo, bool constraints, bool allow_empty, std::uint64_t seed,
    ExperimentConfig cfg, std::string const& model_path, std::string const& records_path)
{
    auto const spec = src.resolve();
    AlgorithmChoice choice{algorithm_from_string(algo), constraints};
    if (choice.algorithm == Algorithm::ITEA && constraints) {
        throw UsageError("ITEA runs unconstrained; use --algo fiit for the constrained variant");
    }
    if (choice.algorithm == Algorithm::FIIT && constraints_of(spec).empty() && !allow_empty) {
        throw UsageError("FI-2POP requires constraints; the problem declares none (pass --allow-empty-constraints "
                         "to run the degenerate single-population mode)");
    }
    cfg.allow_empty_constraints = allow_empty;
    auto const data = load_problem(spec);
    auto const r = run_once(spec, data, choice, seed, cfg);
    if (!r.model.empty()) {
        std::ofstream(model_path) << r.model << '\n';
    }
    if (!records_path.empty()) {
        append_record(records_path, r);
    }
    std::cout << r.problem << " " << to_string(r.algorithm) << (r.constraints ? " (constrained)" : "") << " seed "
              << seed << "\n";
    if (r.no_solution) {
        std::cout << "no feasible model found\n";
    }
    print_pct(std::cout, "train NMSE: ", r.train_nmse_pct);
    print_pct(std::cout, "  test NMSE: ", r.test_nmse_pct);
    std::cout << "\nevaluations: " << r.evaluations << "  wall time: " << std::fixed << std::setprecision(2)
              << r.wall_seconds << " s\n";
    if (!r.model.empty()) {
        std::cout << "model: " << model_file_from_json(r.model).expression_text() << "\nwritten to " << model_path
                  << "\n";
    }
    if (r.audit) {
        std::cout << "audit (" << r.audit->samples << " points): " << (r.audit->feasible() ? "feasible" : "infeasible")
                  << "\n";
    }
    return kOk;
}

int cmd_check(std::string const& model_path, ProblemSource const& src, std::size_t samples, std::uint64_t seed, int workers)
{
    if (!std::filesystem::exists(model_path)) {
        throw NotFound("model file '" + model_path + "' not found");
    }
    auto const mf = read_model_file(model_path);
    bool const override_problem = !src.builtin.empty() || !src.spec_file.empty();
    auto const spec = override_problem ? src.resolve() : mf.problem;
    auto const constraints = constraints_of(spec);
    if (static_cast<std::size_t>(spec.box.size()) != mf.problem.box.size()) {
        throw UsageError("problem dimension differs from the model's");
    }
    auto const report = audit_empirical(*mf.model(), constraints, samples, seed, workers);
    std::cout << "model: " << mf.expression_text() << "\n";
    std::cout << "audit of " << report.samples << " points over the box of " << (spec.builtin.empty() ? spec.name : spec.builtin)
              << "\n";
    for (std::size_t i = 0; i < constraints.size(); ++i) {
        std::cout << "  " << constraints.constraints[i].describe() << ": " << report.violated[i] << " violations\n";
    }
    std::cout << (report.feasible() ? "feasible" : "infeasible") << "\n";
    return report.feasible() ? kOk : kFailed;
}

std::vector<ProblemSpec> batch_problems(std::vector<std::string> const& names, std::string const& noise_mode, std::uint64_t data_seed)
{
    std::vector<double> levels;
    if (noise_mode == "clean" || noise_mode == "both") levels.push_back(0.0);
    if (noise_mode == "noisy" || noise_mode == "both") levels.push_back(0.05);
    if (levels.empty()) {
        throw UsageError("--noise-mode must be clean, noisy or both");
    }
    std::vector<ProblemSpec> out;
    for (auto const& n : names) {
        if (n == "all") {
            for (auto const& b : builtin_registry()) {
                for (double l : levels) out.push_back(builtin_spec(b, l, data_seed));
            }
        } else if (n.ends_with(".json")) {
            if (!std::filesystem::exists(n)) {
                throw NotFound("problem spec '" + n + "' not found");
            }
            out.push_back(read_problem_spec(n));
        } else {
            auto const& b = lookup(n);
            for (double l : levels) out.push_back(builtin_spec(b, l, data_seed));
        }
    }
    return out;
}

std::vector<AlgorithmChoice> batch_algorithms(std::vector<std::string> const& names, std::string const& mode)
{
    bool const plain = mode == "unconstrained" || mode == "both";
    bool const constrained = mode == "constrained" || mode == "both";
    if (!plain && !constrained) {
        throw UsageError("--mode must be unconstrained, constrained or both");
    }
    std::vector<AlgorithmChoice> out;
    for (auto const& n : names) {
        auto const a = algorithm_from_string(n);
        if (a == Algorithm::ITEA) {
            if (plain) out.push_back({a, false});
        } else if (a == Algorithm::FIIT) {
            if (constrained) out.push_back({a, true});
        } else {
            if (plain) out.push_back({a, false});
            if (constrained) out.push_back({a, true});
        }
    }
    if (out.empty()) {
        throw UsageError("no algorithm runs in the selected --mode");
    }
    return out;
}

void write_reports(std::vector<RunRecord> const& records, std::filesystem::path const& dir)
{
    auto const medians = report_medians(records);
    for (auto const& w : medians.warnings) {
        std::cerr << "warning: " << w << "\n";
    }
    write_medians_csv((dir / "medians.csv").string(), medians.rows);
    write_violations_csv((dir / "violations.csv").string(), report_violations(records));
    write_runtime_csv((dir / "runtime.csv").string(), report_runtime(records));
}

int cmd_batch(std::vector<std::string> const& problems, std::string const& noise_mode, std::vector<std::string> const& algos,
    std::string const& mode, int reps, std::uint64_t base_seed, std::uint64_t data_seed, ExperimentConfig cfg,
    std::string const& out_dir)
{
    auto const specs = batch_problems(problems, noise_mode, data_seed);
    auto const choices = batch_algorithms(algos, mode);
    std::filesystem::path const dir(out_dir);
    std::filesystem::create_directories(dir / "convergence");
    cfg.records_path = (dir / "records.jsonl").string();
    cfg.convergence_dir = (dir / "convergence").string();
    std::cerr << specs.size() * choices.size() * static_cast<std::size_t>(reps) << " runs on " << cfg.workers
              << " workers, records appended to " << cfg.records_path << "\n";
    auto const records = run_batch(specs, choices, reps, base_seed, cfg);
    write_reports(records, dir);
    std::size_t failed = 0;
    for (auto const& r : records) {
        if (!r.error.empty()) {
            ++failed;
            std::cerr << "run failed: " << r.problem << " " << to_string(r.algorithm) << " seed " << r.seed << ": " << r.error << "\n";
        }
    }
    std::cout << records.size() << " runs (" << failed << " failed); reports in " << dir.string() << "\n";
    return failed == 0 ? kOk : kFailed;
}

int cmd_report(std::string const& kind, std::string const& records_path, std::string const& out)
{
    if (!std::filesystem::exists(records_path)) {
        throw NotFound("records file '" + records_path + "' not found");
    }
    auto const records = read_records(records_path);
    auto const target = out.empty() ? std::string("/dev/stdout") : out;
    if (kind == "medians") {
        auto const rep = report_medians(records);
        for (auto const& w : rep.warnings) {
            std::cerr << "warning: " << w << "\n";
        }
        write_medians_csv(target, rep.rows);
    } else if (kind == "violations") {
        write_violations_csv(target, report_violations(records));
    } else if (kind == "runtime") {
        write_runtime_csv(target, report_runtime(records));
    } else {
        throw UsageError("report kind must be medians, violations or runtime");
    }
    return kOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Shape-constrained symbolic regression"};
    app.require_subcommand(1);
    int const workers_default = default_workers();

    auto* gen = app.add_subcommand("generate", "write train.csv and test.csv for a builtin problem");
    ProblemSource gen_src;
    std::string gen_name;
    std::string gen_out = ".";
    gen->add_option("name", gen_name, "builtin problem name or slug");
    gen_src.add_to(*gen);
    gen->add_option("--seed", gen_src.data_seed, "sampling seed");
    gen->add_option("--out", gen_out, "output directory");

    auto* run = app.add_subcommand("run", "one run of one algorithm");
    ProblemSource run_src;
    std::string algo;
    bool constraints = false;
    bool allow_empty = false;
    std::uint64_t seed = 0;
    std::string model_path = "model.json";
    std::string records_path = "records.jsonl";
    std::size_t run_audit = 0;
    int run_workers = workers_default;
    Overrides run_over;
    run->add_option("--algo", algo, "gp, gpc, itea or fiit")->required();
    run_src.add_to(*run);
    run->add_flag("--constraints", constraints, "enforce the problem's shape constraints (gp, gpc)");
    run->add_flag("--allow-empty-constraints", allow_empty, "let fiit run on a problem without constraints");
    run->add_option("--seed", seed, "search seed");
    run->add_option("--model-out", model_path, "model file to write");
    run->add_option("--records", records_path, "records file to append to (empty disables)");
    run->add_option("--audit-samples", run_audit, "audit the result with this many points (0 skips)");
    run->add_option("--workers", run_workers, "evaluation threads (default: SCSR_WORKERS or all cores)");
    run_over.add_to(*run);

    auto* check = app.add_subcommand("check", "empirical audit of a model file");
    ProblemSource check_src;
    std::string check_model;
    std::size_t samples = 1'000'000;
    std::uint64_t check_seed = 0;
    int check_workers = workers_default;
    check->add_option("model", check_model, "model file")->required();
    check_src.add_to(*check);
    check->add_option("--samples", samples, "audit points");
    check->add_option("--seed", check_seed, "audit sampling seed");
    check->add_option("--workers", check_workers, "audit threads");

    auto* batch = app.add_subcommand("batch", "repeated runs over problems and algorithms");
    std::vector<std::string> batch_names{"all"};
    std::string noise_mode = "both";
    std::vector<std::string> batch_algos{"gp", "gpc", "itea", "fiit"};
    std::string mode = "both";
    int reps = 30;
    std::uint64_t base_seed = 0;
    std::uint64_t batch_data_seed = 0;
    std::string batch_out = "results";
    std::size_t batch_audit = 1'000'000;
    int batch_workers = workers_default;
    Overrides batch_over;
    batch->add_option("--problems", batch_names, "builtin names, spec files, or 'all'")->delimiter(',');
    batch->add_option("--noise-mode", noise_mode, "clean, noisy or both (builtins)");
    batch->add_option("--algos", batch_algos, "subset of gp,gpc,itea,fiit")->delimiter(',');
    batch->add_option("--mode", mode, "unconstrained, constrained or both");
    batch->add_option("--reps", reps, "repetitions per cell");
    batch->add_option("--base-seed", base_seed, "seed of the first repetition");
    batch->add_option("--data-seed", batch_data_seed, "seed of the builtin data sets");
    batch->add_option("--out", batch_out, "output directory");
    batch->add_option("--audit-samples", batch_audit, "audit points per run (0 skips)");
    batch->add_option("--workers", batch_workers, "concurrent runs");
    batch_over.add_to(*batch);

    auto* report = app.add_subcommand("report", "tables from a records file");
    std::string report_kind;
    std::string report_records;
    std::string report_out;
    report->add_option("kind", report_kind, "medians, violations or runtime")->required();
    report->add_option("records", report_records, "records file")->required();
    report->add_option("--out", report_out, "CSV path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (CLI::ParseError const& e) {
        int const code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*gen) {
            if (!gen_name.empty()) {
                if (!gen_src.builtin.empty()) {
                    throw UsageError("give the problem either positionally or with --problem");
                }
                gen_src.builtin = gen_name;
            }
            return cmd_generate(gen_src, gen_out);
        }
        if (*run) {
            ExperimentConfig cfg;
            run_over.apply(cfg);
            cfg.gp.workers = cfg.gpc.workers = cfg.itea.workers = cfg.audit_workers = std::max(1, run_workers);
            cfg.audit_samples = run_audit;
            return cmd_run(run_src, algo, constraints, allow_empty, seed, cfg, model_path, records_path);
        }
        if (*check) {
            return cmd_check(check_model, check_src, samples, check_seed, std::max(1, check_workers));
        }
        if (*batch) {
            if (reps < 1) {
                throw UsageError("--reps must be at least 1");
            }
            ExperimentConfig cfg;
            batch_over.apply(cfg);
            cfg.workers = std::max(1, batch_workers);
            cfg.audit_samples = batch_audit;
            return cmd_batch(batch_names, noise_mode, batch_algos, mode, reps, base_seed, batch_data_seed, cfg, batch_out);
        }
        if (*report) {
            return cmd_report(report_kind, report_records, report_out);
        }
    } catch (NotFound const& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailed;
    } catch (UsageError const& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (std::invalid_argument const& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (std::exception const& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailed;
    }
    return kUsage;
}
