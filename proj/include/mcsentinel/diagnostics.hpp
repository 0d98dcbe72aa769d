#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mcsentinel/chain.hpp"

namespace mcsentinel {

/// n * lambda2 / sigma2 per coordinate. Throws DegenerateError when any
/// sigma2 is not positive.
[[nodiscard]] std::vector<double> ess_ratio(std::uint64_t n, std::span<const double> lambda2,
                                            std::span<const double> sigma2);

/// An ESS value clamped to [0, 2n] for reporting. `flagged` is set when the
/// raw value exceeded n.
struct CappedEss {
    double value;
    bool flagged;
};
[[nodiscard]] CappedEss cap_ess(double ess, std::uint64_t n);

/// Sample autocorrelations rho_0..rho_max_lag with the 1/n-normalised
/// estimator around the sample mean.
[[nodiscard]] std::vector<double> autocorrelations(std::span<const double> series,
                                                   std::size_t max_lag);

/// n / (1 + 2 sum_k rho_k), the sum truncated at the first lag pair
/// (rho_{2m+1} + rho_{2m+2}) that is not positive.
///
/// Throws InsufficientDataError below 10 samples and DegenerateError for a
/// zero-variance series.
[[nodiscard]] double ess_acf(std::span<const double> series);

inline constexpr double kGewekeFirst = 0.1;
inline constexpr double kGewekeLast = 0.5;

/// Geweke z-score comparing the first `frac1` and last `frac2` of a series.
///
/// Each segment's spectral density at zero is the batch-means variance with
/// batch size the largest power of two <= sqrt(segment length). Returns
/// nullopt (undetermined) when either segment has zero variance. Throws
/// InvalidArgument when a segment has fewer than 16 samples or the
/// fractions overlap.
[[nodiscard]] std::optional<double> geweke_z(std::span<const double> series,
                                             double frac1 = kGewekeFirst,
                                             double frac2 = kGewekeLast);

struct GewekeResult {
    std::vector<std::optional<double>> z;
    std::vector<std::optional<bool>> passed;  ///< nullopt where undetermined
    std::size_t n1 = 0;
    std::size_t n2 = 0;
    double frac1 = kGewekeFirst;
    double frac2 = kGewekeLast;
    double alpha = 0.05;
    std::size_t undetermined = 0;
    /// Every determined coordinate passed. Undetermined ones are left out.
    bool converged = false;
};

/// Per-coordinate Geweke test at level alpha (two-sided p-value >= alpha
/// passes), without multiplicity correction.
[[nodiscard]] GewekeResult geweke_converged(const ChainMatrix& chain, double alpha = 0.05,
                                            double frac1 = kGewekeFirst,
                                            double frac2 = kGewekeLast);

/// Elementwise width / lambda_hat. Throws DegenerateError on a zero lambda_hat.
[[nodiscard]] std::vector<double> quality_ratios(std::span<const double> widths,
                                                 std::span<const double> lambda_hat);

}  // namespace mcsentinel
