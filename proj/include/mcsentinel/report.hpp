#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mcsentinel/batch_means.hpp"
#include "mcsentinel/chain.hpp"
#include "mcsentinel/diagnostics.hpp"
#include "mcsentinel/moments.hpp"
#include "mcsentinel/stopping_rule.hpp"

namespace mcsentinel {

enum class RunStatus {
    kTerminated,     ///< the criterion held at a scheduled check
    kTruncated,      ///< the source ran dry first
    kMaxIterations,  ///< the safety cap was reached first
    kAnalyzed,       ///< post-hoc analysis of a fixed-length chain
};

[[nodiscard]] std::string to_string(RunStatus s);
[[nodiscard]] RunStatus parse_run_status(const std::string& s);
[[nodiscard]] std::string to_string(VarianceMethod m);
[[nodiscard]] std::string to_string(DegeneratePolicy p);

/// Per-coordinate summary. Fields are empty where the quantity is undefined
/// (too few samples, or a degenerate coordinate for ratios).
struct CoordinateReport {
    std::optional<double> mean;
    std::optional<double> lambda_hat;
    std::optional<double> sigma_hat;
    std::optional<double> mcse;
    std::optional<double> ci_low;
    std::optional<double> ci_high;
    std::optional<double> width;
    std::optional<double> width_ratio;
    std::optional<double> ess_ratio;  ///< capped at 2n
    bool ess_ratio_flagged = false;   ///< raw ratio exceeded n
    std::optional<double> ess_acf;
    bool degenerate = false;
    std::optional<double> geweke_z;
    std::optional<bool> geweke_pass;

    bool operator==(const CoordinateReport&) const = default;
};

struct TerminationReport {
    RunStatus status = RunStatus::kTruncated;
    std::uint64_t n_stop = 0;
    double epsilon = 0.0;
    double delta = 0.0;
    std::uint64_t n_star = 0;
    std::uint64_t check_gap_batches = 0;
    double tau = 0.0;
    std::string variance_method;
    std::string degenerate_policy;
    double z_critical = 0.0;
    double min_ess_bound = 0.0;
    bool criterion_met = false;
    std::size_t degenerate_count = 0;
    std::vector<CoordinateReport> coordinates;
    double wall_seconds = 0.0;
    std::uint64_t checks_performed = 0;

    bool operator==(const TerminationReport&) const = default;
};

/// Assembles the report from the final estimator state. `sigma2` may be
/// null when fewer than two batches exist; `chain`, when given, enables
/// the autocorrelation ESS column.
[[nodiscard]] TerminationReport build_report(RunStatus status, const MomentAccumulator& moments,
                                             const std::vector<double>* sigma2,
                                             const FwsrConfig& cfg, VarianceMethod method,
                                             const ChainMatrix* chain);

/// Adds Geweke columns to a report.
void attach_geweke(TerminationReport& report, const GewekeResult& geweke);

void to_json(nlohmann::json& j, const TerminationReport& r);
void from_json(const nlohmann::json& j, TerminationReport& r);

/// One row per coordinate, with a header line.
void write_coordinates_csv(std::ostream& out, const TerminationReport& r);

/// Versioned checkpoint of a streaming batch-means state.
[[nodiscard]] nlohmann::json checkpoint_json(const DoublingBatchMeans& state);
[[nodiscard]] DoublingBatchMeans restore_checkpoint(const nlohmann::json& j);

}  // namespace mcsentinel
