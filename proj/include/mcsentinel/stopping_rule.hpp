#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "mcsentinel/batch_means.hpp"
#include "mcsentinel/chain.hpp"
#include "mcsentinel/moments.hpp"
#include "mcsentinel/source.hpp"

namespace mcsentinel {

struct TerminationReport;

/// How coordinates with zero observed posterior variance enter the
/// all-satisfied conjunction.
enum class DegeneratePolicy {
    kExclude,   ///< left out of the conjunction, reported
    kBlocking,  ///< never satisfied, so the run cannot terminate
};

/// Which asymptotic-variance estimator feeds the interval widths.
enum class VarianceMethod {
    kDoubling,  ///< power-of-two batches with pairwise merging (default)
    kUsual,     ///< floor(n^tau) batches recomputed from the stored chain
};

struct FwsrConfig {
    double epsilon = 0.05;
    double delta = 0.05;
    std::uint64_t n_star = 16384;
    std::uint64_t check_gap_batches = 20;
    double tau = kDefaultTau;
    std::uint64_t max_iterations = 100'000'000;
    DegeneratePolicy degenerate_policy = DegeneratePolicy::kExclude;

    /// Throws InvalidArgument on any out-of-range field.
    void validate() const;
};

/// 2 z_{delta/2} sqrt(sigma2 / n).
[[nodiscard]] double interval_width(double sigma2, std::uint64_t n, double delta);

/// epsilon * 1{n <= n*} + 1/n.
[[nodiscard]] double padding(std::uint64_t n, const FwsrConfig& cfg);

/// 4 z_{delta/2}^2 / epsilon^2, the smallest ESS any terminating check admits.
[[nodiscard]] double min_ess_bound(double epsilon, double delta);

struct CoordinateCheck {
    double sigma2 = 0.0;
    double width = 0.0;
    double lambda_hat = 0.0;
    double threshold = 0.0;  ///< epsilon * lambda_hat
    bool satisfied = false;
    bool degenerate = false;
};

struct CheckResult {
    std::uint64_t n = 0;
    std::uint64_t batch_size = 0;
    std::size_t completed_batches = 0;
    double padding = 0.0;
    std::vector<CoordinateCheck> coordinates;
    std::size_t degenerate_count = 0;
    bool all_satisfied = false;
};

/// Evaluates w_i + p(n) <= epsilon * lambda_hat_i with the doubling estimator.
[[nodiscard]] CheckResult check(const DoublingBatchMeans& abm, const MomentAccumulator& moments,
                                const FwsrConfig& cfg);

/// Same criterion with externally supplied sigma2 estimates.
[[nodiscard]] CheckResult check(std::span<const double> sigma2, const MomentAccumulator& moments,
                                const FwsrConfig& cfg);

using ProgressSink = std::function<void(const CheckResult&)>;

struct RunOptions {
    VarianceMethod variance = VarianceMethod::kDoubling;
    /// When set, every draw is appended here. Required for per-coordinate
    /// autocorrelation ESS in the report; kUsual keeps its own copy if null.
    ChainMatrix* retain = nullptr;
    std::vector<ProgressSink> sinks;
};

/// Pulls draws until the relative fixed-width criterion holds at a
/// scheduled check, the source runs dry, or max_iterations is reached.
///
/// The first check happens at the first batch boundary with n >= n*. Later
/// checks come every check_gap_batches completed batches, or one batch later
/// when the completed count would be odd.
[[nodiscard]] TerminationReport run_until_stop(SampleSource& source, const FwsrConfig& cfg,
                                               const RunOptions& options = {});

}  // namespace mcsentinel
