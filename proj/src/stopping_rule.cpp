#include "mcsentinel/stopping_rule.hpp"

#include <chrono>
#include <cmath>
#include <optional>
#include <string>

#include "mcsentinel/error.hpp"
#include "mcsentinel/normal.hpp"
#include "mcsentinel/report.hpp"

namespace mcsentinel {

void FwsrConfig::validate() const {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidArgument("epsilon must lie in (0, 1)");
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0, 1)");
    if (n_star < 4) throw InvalidArgument("n* must be at least 4");
    if (check_gap_batches < 1) throw InvalidArgument("check gap must be at least one batch");
    validate_tau(tau);
    if (max_iterations <= n_star) throw InvalidArgument("max iterations must exceed n*");
}

double interval_width(double sigma2, std::uint64_t n, double delta) {
    if (!(sigma2 >= 0.0)) throw InvalidArgument("variance must be non-negative");
    if (n < 1) throw InvalidArgument("n must be at least 1");
    return 2.0 * z_critical(delta) * std::sqrt(sigma2 / static_cast<double>(n));
}

double padding(std::uint64_t n, const FwsrConfig& cfg) {
    if (n < 1) throw InvalidArgument("n must be at least 1");
    return (n <= cfg.n_star ? cfg.epsilon : 0.0) + 1.0 / static_cast<double>(n);
}

double min_ess_bound(double epsilon, double delta) {
    if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
    const double z = z_critical(delta);
    return 4.0 * z * z / (epsilon * epsilon);
}

CheckResult check(std::span<const double> sigma2, const MomentAccumulator& moments,
                  const FwsrConfig& cfg) {
    if (sigma2.size() != moments.dim()) throw DimensionError("sigma2 length differs from dimension");
    const std::uint64_t n = moments.count();
    if (n < 2) throw InsufficientDataError("stopping check needs at least 2 samples");
    const auto lambda = moments.posterior_sd();
    const double z = z_critical(cfg.delta);

    CheckResult r;
    r.n = n;
    r.padding = padding(n, cfg);
    r.coordinates.resize(sigma2.size());
    bool all = true;
    for (std::size_t i = 0; i < sigma2.size(); ++i) {
        auto& c = r.coordinates[i];
        c.sigma2 = sigma2[i];
        c.width = 2.0 * z * std::sqrt(sigma2[i] / static_cast<double>(n));
        c.lambda_hat = lambda[i];
        c.threshold = cfg.epsilon * lambda[i];
        c.degenerate = lambda[i] == 0.0;
        c.satisfied = !c.degenerate && c.width + r.padding <= c.threshold;
        if (c.degenerate) {
            ++r.degenerate_count;
            if (cfg.degenerate_policy == DegeneratePolicy::kBlocking) all = false;
        } else if (!c.satisfied) {
            all = false;
        }
    }
    r.all_satisfied = all;
    return r;
}

CheckResult check(const DoublingBatchMeans& abm, const MomentAccumulator& moments,
                  const FwsrConfig& cfg) {
    auto r = check(abm.sigma2(), moments, cfg);
    r.batch_size = abm.batch_size();
    r.completed_batches = abm.completed_batches();
    return r;
}

TerminationReport run_until_stop(SampleSource& source, const FwsrConfig& cfg,
                                 const RunOptions& options) {
    cfg.validate();
    const auto started = std::chrono::steady_clock::now();
    const std::size_t p = source.dim();

    MomentAccumulator moments(p);
    DoublingBatchMeans abm(p, cfg.tau);
    std::optional<ChainMatrix> own_chain;
    ChainMatrix* chain = options.retain;
    if (chain == nullptr && options.variance == VarianceMethod::kUsual) {
        own_chain.emplace(p);
        chain = &*own_chain;
    }
    if (chain != nullptr && chain->dim() != p) throw DimensionError("retained chain has wrong dimension");

    std::vector<double> x(p);
    std::uint64_t checks = 0;
    std::uint64_t batches_since_check = 0;
    bool first_check_done = false;
    RunStatus status = RunStatus::kMaxIterations;

    auto sigma2_now = [&]() {
        return options.variance == VarianceMethod::kUsual ? ubm_sigma2(*chain, cfg.tau) : abm.sigma2();
    };

    while (moments.count() < cfg.max_iterations) {
        if (!source.next(x)) {
            status = RunStatus::kTruncated;
            break;
        }
        moments.push(x);
        abm.push(x);
        if (chain != nullptr) chain->append(x);
        if (!abm.at_batch_boundary()) continue;

        bool due = false;
        if (!first_check_done) {
            due = moments.count() >= cfg.n_star;
        } else {
            ++batches_since_check;
            const bool even = abm.completed_batches() % 2 == 0;
            due = (batches_since_check == cfg.check_gap_batches && even) ||
                  batches_since_check > cfg.check_gap_batches;
        }
        if (!due) continue;

        first_check_done = true;
        batches_since_check = 0;
        ++checks;
        auto result = check(sigma2_now(), moments, cfg);
        result.batch_size = abm.batch_size();
        result.completed_batches = abm.completed_batches();
        for (const auto& sink : options.sinks) sink(result);
        if (result.all_satisfied) {
            status = RunStatus::kTerminated;
            break;
        }
    }

    std::optional<std::vector<double>> sigma2;
    if (options.variance == VarianceMethod::kUsual) {
        if (moments.count() >= 4 && moments.count() / ubm_batch_size(moments.count(), cfg.tau) >= 2) {
            sigma2 = ubm_sigma2(*chain, cfg.tau);
        }
    } else if (abm.completed_batches() >= 2) {
        sigma2 = abm.sigma2();
    }
    auto report = build_report(status, moments, sigma2 ? &*sigma2 : nullptr, cfg, options.variance,
                               chain);
    report.checks_performed = checks;
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return report;
}

}  // namespace mcsentinel
