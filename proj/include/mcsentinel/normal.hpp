#pragma once

namespace mcsentinel {

/// Standard normal CDF.
[[nodiscard]] double normal_cdf(double x);

/// Inverse of the standard normal CDF for p in (0, 1).
///
/// Acklam's rational approximation refined by one Halley step against
/// erfc, which brings the error to roundoff level.
[[nodiscard]] double normal_quantile(double p);

/// z_{delta/2}: the upper delta/2 critical value. delta must lie in (0, 1).
[[nodiscard]] double z_critical(double delta);

/// Two-sided p-value of a z statistic.
[[nodiscard]] double two_sided_p_value(double z);

}  // namespace mcsentinel
