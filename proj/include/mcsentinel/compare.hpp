#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mcsentinel/samplers.hpp"
#include "mcsentinel/stopping_rule.hpp"

namespace mcsentinel {

/// One stopping criterion in a comparison, parsed from a token:
///   fwsr:EPS          relative fixed-width rule with doubling batch means
///   fwsr-ubm:EPS      same rule, usual batch means recomputed at each check
///   gd:ALPHA@N        Geweke test applied once after N iterations
struct Criterion {
    enum class Kind { kFwsr, kFwsrUsual, kGeweke };
    Kind kind = Kind::kFwsr;
    double epsilon = 0.05;
    double alpha = 0.05;
    std::uint64_t check_at = 15000;
    std::string token;
};

/// Throws InvalidArgument for an unknown or malformed token.
[[nodiscard]] Criterion parse_criterion(std::string_view token);

struct CompareOptions {
    SamplerSpec sampler = Ar1Spec{};
    FwsrConfig base;  ///< epsilon is overridden per criterion
    std::vector<Criterion> criteria;
    std::size_t reps = 20;
    std::uint64_t seed = 1;
    bool with_ubm = false;
    unsigned threads = 1;
};

/// Per (criterion, replication) summary with quality-ratio quantiles.
struct CompareRow {
    std::string criterion;
    std::size_t replication = 0;
    std::uint64_t seed = 0;
    std::string status;
    std::uint64_t n_stop = 0;
    double median_ess = 0.0;
    double wall_seconds = 0.0;
    std::vector<double> quality_ratios;  ///< non-degenerate coordinates
    std::size_t degenerate = 0;
    std::optional<double> gd_pass_fraction;
    std::optional<bool> gd_converged;
    std::vector<double> ubm_sigma_ratios;  ///< aBM sigma_hat / uBM sigma_hat
};

/// Seed of replication `rep`; identical across criteria so rows for the same
/// replication see the same sample path.
[[nodiscard]] std::uint64_t replication_seed(std::uint64_t base, std::size_t rep);

[[nodiscard]] std::vector<CompareRow> run_comparison(const CompareOptions& options);

/// Linear-interpolation quantile (R type 7). Throws on an empty input.
[[nodiscard]] double quantile(std::vector<double> values, double q);
[[nodiscard]] double median(std::vector<double> values);

void write_comparison_csv(std::ostream& out, const std::vector<CompareRow>& rows);

/// MCSENTINEL_THREADS if set to a positive integer, else hardware concurrency.
[[nodiscard]] unsigned replication_threads();

/// Runs body(i) for i in [0, count) on up to `threads` worker threads.
template <typename Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body);

}  // namespace mcsentinel

#include "mcsentinel/detail/parallel_for.hpp"
