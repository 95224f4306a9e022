#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scsr/constraints.hpp"
#include "scsr/gp.hpp"
#include "scsr/itea.hpp"
#include "scsr/problems.hpp"

namespace scsr {

enum class Algorithm { GP, GPC, ITEA, FIIT };

std::string_view to_string(Algorithm a) noexcept;
/// Case-insensitive "gp", "gpc", "itea" or "fiit".
Algorithm algorithm_from_string(std::string_view name);

struct AlgorithmChoice {
    Algorithm algorithm{Algorithm::GP};
    bool constraints{false}; // ITEA is always unconstrained and FIIT always constrained
};

struct RunRecord {
    std::string problem;
    Algorithm algorithm{Algorithm::GP};
    bool constraints{false};
    std::uint64_t seed{0};
    double train_nmse_pct{100.0};
    double test_nmse_pct{100.0};
    double wall_seconds{0.0};
    std::size_t evaluations{0};
    std::string model; // model file JSON, empty when no model was returned
    std::optional<AuditReport> audit;
    bool no_solution{false}; // the constrained search ended without a feasible model
    std::string error;       // failure message of the run, empty on success

    friend bool operator==(RunRecord const&, RunRecord const&) = default;
};

struct ExperimentConfig {
    gp::GPConfig gp{};
    gp::GPConfig gpc{gp::GPConfig::memetic()};
    itea::ITEAConfig itea{};
    std::size_t audit_samples{0}; // 0 skips the audit
    int audit_workers{1};
    int workers{1};               // concurrent runs in a batch
    std::string records_path;     // JSON-lines file appended per finished run
    std::string convergence_dir;  // per-run convergence CSVs when non-empty
    bool allow_empty_constraints{false};
};

/// One run on already loaded data. Data is fixed by the problem spec, `seed`
/// drives the search. The audit uses the problem's constraints even for
/// unconstrained runs.
RunRecord run_once(ProblemSpec const& problem, DataSplit const& data, AlgorithmChoice choice, std::uint64_t seed,
    ExperimentConfig const& cfg, ConvergenceLog* log = nullptr);

/// Every (problem, algorithm, rep) with seed base_seed + rep. Records come back
/// in that order; failed runs are recorded with their error and the batch goes on.
std::vector<RunRecord> run_batch(std::vector<ProblemSpec> const& problems, std::vector<AlgorithmChoice> const& algorithms,
    int repetitions, std::uint64_t base_seed, ExperimentConfig const& cfg);

std::string record_json(RunRecord const& r);
RunRecord record_from_json(std::string const& line);
void append_record(std::string const& path, RunRecord const& r);
std::vector<RunRecord> read_records(std::string const& path);

/// floor(v * 100) / 100 with a small allowance for representation error.
double truncate2(double v) noexcept;

struct MedianRow {
    std::string problem;
    Algorithm algorithm{Algorithm::GP};
    bool constraints{false};
    std::size_t runs{0};
    double train_nmse_pct{0.0};
    double test_nmse_pct{0.0};
};

struct MedianReport {
    std::vector<MedianRow> rows;
    std::vector<std::string> warnings;
};

/// Median train/test NMSE % per (problem, algorithm, constraints), truncated
/// to two decimals. Failed runs are skipped; cells left empty are reported as warnings.
MedianReport report_medians(std::vector<RunRecord> const& records);

struct ViolationRow {
    std::string problem;
    Algorithm algorithm{Algorithm::GP};
    bool constraints{false};
    std::size_t audited{0};
    std::size_t infeasible{0};
    [[nodiscard]] double frequency() const noexcept { return audited ? double(infeasible) / double(audited) : 0.0; }
};

/// Fraction of audited runs whose model violated some constraint at some audit point.
std::vector<ViolationRow> report_violations(std::vector<RunRecord> const& records);

struct RuntimeRow {
    std::string problem;
    std::string family; // GP, GPC or ITEA (ITEA vs FIIT)
    double unconstrained_seconds{0.0};
    double constrained_seconds{0.0};
    [[nodiscard]] double ratio() const noexcept { return constrained_seconds / unconstrained_seconds; }
};

/// Median wall time with and without constraints for every family that has both.
std::vector<RuntimeRow> report_runtime(std::vector<RunRecord> const& records);

void write_medians_csv(std::string const& path, std::vector<MedianRow> const& rows);
void write_violations_csv(std::string const& path, std::vector<ViolationRow> const& rows);
void write_runtime_csv(std::string const& path, std::vector<RuntimeRow> const& rows);
void write_convergence_csv(std::string const& path, ConvergenceLog const& log);

} // namespace scsr
