#include "mcsentinel/compare.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <thread>

#include "mcsentinel/batch_means.hpp"
#include "mcsentinel/diagnostics.hpp"
#include "mcsentinel/error.hpp"
#include "mcsentinel/report.hpp"
#include "mcsentinel/rng.hpp"

namespace mcsentinel {

namespace {

double parse_number(std::string_view s, std::string_view token) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        throw InvalidArgument("malformed criterion '" + std::string(token) + "'");
    }
    return v;
}

std::uint64_t parse_count(std::string_view s, std::string_view token) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        throw InvalidArgument("malformed criterion '" + std::string(token) + "'");
    }
    return v;
}

std::vector<double> non_degenerate(const TerminationReport& r,
                                   std::optional<double> CoordinateReport::*field) {
    std::vector<double> out;
    for (const auto& c : r.coordinates) {
        if (!c.degenerate && (c.*field)) out.push_back(*(c.*field));
    }
    return out;
}

CompareRow run_fwsr(const CompareOptions& opt, const Criterion& crit, std::size_t rep) {
    CompareRow row;
    row.criterion = crit.token;
    row.replication = rep;
    row.seed = replication_seed(opt.seed, rep);

    FwsrConfig cfg = opt.base;
    cfg.epsilon = crit.epsilon;
    auto sampler = make_sampler(opt.sampler, row.seed);
    RunOptions run;
    run.variance = crit.kind == Criterion::Kind::kFwsrUsual ? VarianceMethod::kUsual
                                                            : VarianceMethod::kDoubling;
    std::optional<ChainMatrix> chain;
    if (opt.with_ubm || run.variance == VarianceMethod::kUsual) {
        chain.emplace(sampler->dim());
        run.retain = &*chain;
    }
    const auto report = run_until_stop(*sampler, cfg, run);

    row.status = to_string(report.status);
    row.n_stop = report.n_stop;
    row.wall_seconds = report.wall_seconds;
    row.degenerate = report.degenerate_count;
    row.quality_ratios = non_degenerate(report, &CoordinateReport::width_ratio);
    const auto ess = non_degenerate(report, &CoordinateReport::ess_ratio);
    row.median_ess = ess.empty() ? 0.0 : median(ess);

    if (opt.with_ubm && chain && chain->rows() >= 4) {
        // both estimators on the same stored path
        DoublingBatchMeans abm(chain->dim(), cfg.tau);
        for (std::size_t i = 0; i < chain->rows(); ++i) abm.push(chain->row(i));
        const auto a = abm.sigma2();
        const auto u = ubm_sigma2(*chain, cfg.tau);
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (u[i] > 0.0) row.ubm_sigma_ratios.push_back(std::sqrt(a[i] / u[i]));
        }
    }
    return row;
}

CompareRow run_geweke(const CompareOptions& opt, const Criterion& crit, std::size_t rep) {
    const auto started = std::chrono::steady_clock::now();
    CompareRow row;
    row.criterion = crit.token;
    row.replication = rep;
    row.seed = replication_seed(opt.seed, rep);

    auto sampler = make_sampler(opt.sampler, row.seed);
    const std::size_t p = sampler->dim();
    ChainMatrix chain(p);
    chain.reserve(crit.check_at);
    MomentAccumulator moments(p);
    DoublingBatchMeans abm(p, opt.base.tau);
    std::vector<double> x(p);
    for (std::uint64_t i = 0; i < crit.check_at; ++i) {
        sampler->next(x);
        chain.append(x);
        moments.push(x);
        abm.push(x);
    }
    const auto gd = geweke_converged(chain, crit.alpha);

    FwsrConfig cfg = opt.base;
    const auto sigma2 = abm.sigma2();
    auto report = build_report(RunStatus::kAnalyzed, moments, &sigma2, cfg, VarianceMethod::kDoubling,
                               nullptr);
    row.status = gd.converged ? "converged" : "not_converged";
    row.n_stop = crit.check_at;
    row.degenerate = report.degenerate_count;
    row.quality_ratios = non_degenerate(report, &CoordinateReport::width_ratio);
    const auto ess = non_degenerate(report, &CoordinateReport::ess_ratio);
    row.median_ess = ess.empty() ? 0.0 : median(ess);
    std::size_t determined = 0;
    std::size_t passed = 0;
    for (const auto& pass : gd.passed) {
        if (!pass) continue;
        ++determined;
        if (*pass) ++passed;
    }
    row.gd_pass_fraction = determined ? static_cast<double>(passed) / determined : 0.0;
    row.gd_converged = gd.converged;
    row.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return row;
}

}  // namespace

Criterion parse_criterion(std::string_view token) {
    Criterion c;
    c.token = std::string(token);
    const auto colon = token.find(':');
    if (colon == std::string_view::npos) {
        throw InvalidArgument("unknown criterion '" + c.token + "'");
    }
    const auto kind = token.substr(0, colon);
    const auto arg = token.substr(colon + 1);
    if (kind == "fwsr" || kind == "fwsr-ubm") {
        c.kind = kind == "fwsr" ? Criterion::Kind::kFwsr : Criterion::Kind::kFwsrUsual;
        c.epsilon = parse_number(arg, token);
        if (!(c.epsilon > 0.0 && c.epsilon < 1.0)) {
            throw InvalidArgument("criterion '" + c.token + "': epsilon must lie in (0, 1)");
        }
        return c;
    }
    if (kind == "gd") {
        c.kind = Criterion::Kind::kGeweke;
        const auto at = arg.find('@');
        if (at == std::string_view::npos) {
            throw InvalidArgument("criterion '" + c.token + "' needs ALPHA@ITERATIONS");
        }
        c.alpha = parse_number(arg.substr(0, at), token);
        c.check_at = parse_count(arg.substr(at + 1), token);
        if (!(c.alpha > 0.0 && c.alpha < 1.0)) {
            throw InvalidArgument("criterion '" + c.token + "': alpha must lie in (0, 1)");
        }
        if (c.check_at < 160) {
            throw InvalidArgument("criterion '" + c.token + "': need at least 160 iterations");
        }
        return c;
    }
    throw InvalidArgument("unknown criterion '" + c.token + "'");
}

std::uint64_t replication_seed(std::uint64_t base, std::size_t rep) {
    return SplitMix64(base ^ (0xA0761D6478BD642FULL * (rep + 1))).next();
}

std::vector<CompareRow> run_comparison(const CompareOptions& options) {
    if (options.criteria.empty()) throw InvalidArgument("no criteria given");
    if (options.reps == 0) throw InvalidArgument("need at least one replication");
    std::vector<CompareRow> rows(options.criteria.size() * options.reps);
    parallel_for(rows.size(), options.threads, [&](std::size_t k) {
        const auto& crit = options.criteria[k / options.reps];
        const std::size_t rep = k % options.reps;
        rows[k] = crit.kind == Criterion::Kind::kGeweke ? run_geweke(options, crit, rep)
                                                        : run_fwsr(options, crit, rep);
    });
    return rows;
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw InsufficientDataError("quantile of an empty set");
    std::sort(values.begin(), values.end());
    const double h = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

void write_comparison_csv(std::ostream& out, const std::vector<CompareRow>& rows) {
    out << "criterion,replication,seed,status,n_stop,median_ess,wall_seconds,degenerate,"
           "ratio_min,ratio_q05,ratio_median,ratio_q95,ratio_max,gd_pass_fraction,"
           "ubm_ratio_min,ubm_ratio_median,ubm_ratio_max\n";
    const auto old_precision = out.precision(10);
    for (const auto& r : rows) {
        out << r.criterion << ',' << r.replication << ',' << r.seed << ',' << r.status << ','
            << r.n_stop << ',' << r.median_ess << ',' << r.wall_seconds << ',' << r.degenerate;
        if (r.quality_ratios.empty()) {
            out << ",,,,,";
        } else {
            for (double q : {0.0, 0.05, 0.5, 0.95, 1.0}) out << ',' << quantile(r.quality_ratios, q);
        }
        out << ',';
        if (r.gd_pass_fraction) out << *r.gd_pass_fraction;
        if (r.ubm_sigma_ratios.empty()) {
            out << ",,,";
        } else {
            for (double q : {0.0, 0.5, 1.0}) out << ',' << quantile(r.ubm_sigma_ratios, q);
        }
        out << '\n';
    }
    out.precision(old_precision);
}

unsigned replication_threads() {
    if (const char* env = std::getenv("MCSENTINEL_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace mcsentinel
