#include "cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include "mcsentinel/chain_io.hpp"
#include "mcsentinel/compare.hpp"
#include "mcsentinel/diagnostics.hpp"
#include "mcsentinel/error.hpp"
#include "mcsentinel/report.hpp"
#include "mcsentinel/samplers.hpp"
#include "mcsentinel/stopping_rule.hpp"

namespace mcsentinel::cli {

namespace {

struct SamplerFlags {
    std::string name = "ar1";
    double rho = 0.5;
    double mu = 0.0;
    double s2 = 1.0;
    double p01 = 0.1;
    double p10 = 0.1;
    double r = 0.5;
    std::size_t dim = 1;

    SamplerSpec spec() const {
        if (name == "ar1") return Ar1Spec{rho, mu, s2, dim};
        if (name == "two-state") return TwoStateSpec{p01, p10, dim};
        return GibbsBvnSpec{r};
    }
};

struct RuleFlags {
    FwsrConfig cfg{.epsilon = 0.02};
    bool strict_degenerate = false;
    std::string variance = "abm";

    FwsrConfig config() const {
        FwsrConfig c = cfg;
        c.degenerate_policy = strict_degenerate ? DegeneratePolicy::kBlocking : DegeneratePolicy::kExclude;
        return c;
    }
};

void add_sampler_flags(CLI::App* app, SamplerFlags& f) {
    app->add_option("--sampler", f.name, "Built-in chain")
        ->check(CLI::IsMember({"ar1", "two-state", "gibbs-bvn"}))
        ->capture_default_str();
    app->add_option("--rho", f.rho, "AR(1) autocorrelation, |rho| < 1")->capture_default_str();
    app->add_option("--mu", f.mu, "AR(1) stationary mean")->capture_default_str();
    app->add_option("--s2", f.s2, "AR(1) stationary variance")->capture_default_str();
    app->add_option("--p01", f.p01, "two-state 0->1 flip probability")->capture_default_str();
    app->add_option("--p10", f.p10, "two-state 1->0 flip probability")->capture_default_str();
    app->add_option("--r", f.r, "Gibbs bivariate-normal correlation")->capture_default_str();
    app->add_option("--dim", f.dim, "Number of coordinates (ar1, two-state)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
}

void add_rule_flags(CLI::App* app, RuleFlags& f) {
    app->add_option("--epsilon", f.cfg.epsilon,
                    "Relative precision: stop once every interval width plus padding is at most "
                    "epsilon times the posterior sd. 0.02 is the recommended default; 0.05 is a "
                    "cheaper choice for very high-dimensional targets")
        ->capture_default_str();
    app->add_option("--delta", f.cfg.delta, "One minus the confidence level")->capture_default_str();
    app->add_option("--n-star", f.cfg.n_star, "Minimum simulation effort before stopping")
        ->capture_default_str();
    app->add_option("--gap-batches", f.cfg.check_gap_batches, "Batches between checks")
        ->capture_default_str();
    app->add_option("--tau", f.cfg.tau, "Batch-size exponent, in (1/3, 1)")->capture_default_str();
    app->add_option("--max-iter", f.cfg.max_iterations, "Hard cap on iterations")
        ->capture_default_str();
    app->add_flag("--strict-degenerate", f.strict_degenerate,
                  "Treat zero-variance coordinates as never satisfied");
    app->add_option("--variance", f.variance, "Asymptotic-variance estimator")
        ->check(CLI::IsMember({"abm", "ubm"}))
        ->capture_default_str();
}

std::ostream& open_output(const std::string& path, std::ofstream& file, std::ostream& fallback) {
    if (path.empty() || path == "-") return fallback;
    file.open(path, std::ios::trunc);
    if (!file) throw FormatError("cannot open " + path + " for writing");
    return file;
}

void emit_report(const TerminationReport& report, const std::string& format, const std::string& path,
                 std::ostream& out) {
    std::ofstream file;
    auto& os = open_output(path, file, out);
    if (format == "csv") {
        write_coordinates_csv(os, report);
    } else {
        nlohmann::json j = report;
        os << j.dump(2) << '\n';
    }
    if (!os) throw FormatError("failed writing report");
}

void warn_degenerate(const TerminationReport& report, std::ostream& err) {
    if (report.degenerate_count == 0) return;
    err << "warning: " << report.degenerate_count
        << " degenerate coordinate(s) with zero observed variance:";
    for (std::size_t i = 0; i < report.coordinates.size(); ++i) {
        if (report.coordinates[i].degenerate) err << ' ' << i;
    }
    err << '\n';
}

int run_command(const SamplerFlags& sf, const RuleFlags& rf, std::uint64_t seed,
                const std::string& input, const std::string& dump_chain, const std::string& out_path,
                const std::string& format, bool progress, std::ostream& out, std::ostream& err) {
    const auto cfg = rf.config();
    cfg.validate();
    std::unique_ptr<SampleSource> sampler;
    if (input.empty()) {
        sampler = make_sampler(sf.spec(), seed);
    } else {
        sampler = std::make_unique<ChainFileReader>(input);
    }

    RunOptions options;
    options.variance = rf.variance == "ubm" ? VarianceMethod::kUsual : VarianceMethod::kDoubling;
    std::optional<ChainMatrix> chain;
    if (!dump_chain.empty() || options.variance == VarianceMethod::kUsual) {
        chain.emplace(sampler->dim());
        options.retain = &*chain;
    }
    if (progress) {
        options.sinks.emplace_back([&err](const CheckResult& c) {
            std::size_t satisfied = 0;
            for (const auto& coord : c.coordinates) satisfied += coord.satisfied ? 1 : 0;
            err << "check n=" << c.n << " batch_size=" << c.batch_size
                << " batches=" << c.completed_batches << " satisfied=" << satisfied << '/'
                << c.coordinates.size() - c.degenerate_count << '\n';
        });
    }
    const auto report = run_until_stop(*sampler, cfg, options);
    if (!dump_chain.empty()) write_chain(dump_chain, *chain, encoding_for_path(dump_chain));
    emit_report(report, format, out_path, out);
    warn_degenerate(report, err);

    switch (report.status) {
        case RunStatus::kTerminated: return kOk;
        case RunStatus::kMaxIterations:
            err << "not converged: reached --max-iter " << cfg.max_iterations << '\n';
            return kMaxIterations;
        default:
            err << "input exhausted after " << report.n_stop << " samples\n";
            return kTruncated;
    }
}

int analyze_command(const std::string& path, const RuleFlags& rf, double alpha,
                    const std::string& out_path, const std::string& format, std::ostream& out,
                    std::ostream& err) {
    const auto cfg = rf.config();
    cfg.validate();
    ChainFileReader reader(path);
    const std::size_t p = reader.dim();
    MomentAccumulator moments(p);
    DoublingBatchMeans abm(p, cfg.tau);
    ChainMatrix chain(p);
    std::vector<double> x(p);
    while (reader.next(x)) {
        try {
            moments.push(x);
        } catch (const NonFiniteError& e) {
            throw FormatError(path + ": row " + std::to_string(reader.rows_read()) + ": " + e.what());
        }
        abm.push(x);
        chain.append(x);
    }
    const auto method = rf.variance == "ubm" ? VarianceMethod::kUsual : VarianceMethod::kDoubling;
    std::optional<std::vector<double>> sigma2;
    try {
        sigma2 = method == VarianceMethod::kUsual ? ubm_sigma2(chain, cfg.tau) : abm.sigma2();
    } catch (const InsufficientDataError& e) {
        err << "warning: " << e.what() << "; interval columns left empty\n";
    }
    auto report =
        build_report(RunStatus::kAnalyzed, moments, sigma2 ? &*sigma2 : nullptr, cfg, method, &chain);
    if (chain.rows() >= 160) {
        const auto gd = geweke_converged(chain, alpha);
        attach_geweke(report, gd);
        if (gd.undetermined > 0) {
            err << "warning: Geweke undetermined for " << gd.undetermined
                << " coordinate(s) with a zero-variance segment\n";
        }
    } else {
        err << "warning: chain too short for the Geweke diagnostic (need 160 rows)\n";
    }
    emit_report(report, format, out_path, out);
    warn_degenerate(report, err);
    return kOk;
}

int compare_command(const SamplerFlags& sf, const RuleFlags& rf, std::uint64_t seed,
                    std::size_t reps, const std::vector<std::string>& tokens, bool with_ubm,
                    const std::string& out_path, std::ostream& out) {
    CompareOptions opt;
    opt.sampler = sf.spec();
    opt.base = rf.config();
    opt.base.validate();
    opt.seed = seed;
    opt.reps = reps;
    opt.with_ubm = with_ubm;
    opt.threads = replication_threads();
    for (const auto& t : tokens) opt.criteria.push_back(parse_criterion(t));
    const auto rows = run_comparison(opt);
    std::ofstream file;
    auto& os = open_output(out_path, file, out);
    write_comparison_csv(os, rows);
    if (!os) throw FormatError("failed writing comparison");
    return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"mcsentinel: sequential stopping and output analysis for MCMC"};
    app.require_subcommand(1);

    SamplerFlags sf;
    RuleFlags rf;
    std::uint64_t seed = 1;
    std::string dump_chain;
    std::string out_path;
    std::string format = "json";
    bool progress = false;

    auto* run = app.add_subcommand("run", "Run a built-in sampler until the stopping rule fires");
    add_sampler_flags(run, sf);
    add_rule_flags(run, rf);
    run->add_option("--seed", seed, "RNG seed")->capture_default_str();
    std::string input;
    run->add_option("--input", input, "Stream draws from a chain file instead of a sampler");
    run->add_option("--dump-chain", dump_chain, "Write the draws here (.csv for text, else f64le)");
    run->add_option("--out", out_path, "Report destination (default stdout)");
    run->add_option("--format", format, "Report format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    run->add_flag("--progress", progress, "Log every check to stderr");

    std::string file;
    double alpha = 0.05;
    auto* analyze = app.add_subcommand("analyze", "Post-hoc analysis of a stored chain file");
    analyze->add_option("file", file, "Chain file (CSV or MCSTREAM f64le)")->required();
    add_rule_flags(analyze, rf);
    analyze->add_option("--alpha", alpha, "Geweke test level")->capture_default_str();
    analyze->add_option("--out", out_path, "Report destination (default stdout)");
    analyze->add_option("--format", format, "Report format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();

    std::size_t reps = 20;
    std::vector<std::string> criteria;
    bool with_ubm = false;
    auto* compare = app.add_subcommand(
        "compare", "Replicated comparison of stopping criteria, one CSV row per run");
    add_sampler_flags(compare, sf);
    add_rule_flags(compare, rf);
    compare->add_option("--seed", seed, "Base RNG seed")->capture_default_str();
    compare->add_option("--reps", reps, "Replications per criterion")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    compare->add_option("--criteria", criteria,
                        "Criteria such as fwsr:0.05, fwsr-ubm:0.05, gd:0.05@15000")
        ->delimiter(',')
        ->required();
    compare->add_flag("--with-ubm", with_ubm, "Add aBM/uBM sigma-ratio columns");
    compare->add_option("--out", out_path, "CSV destination (default stdout)");

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kOk : kUsage;
    }

    try {
        if (*run) return run_command(sf, rf, seed, input, dump_chain, out_path, format, progress, out, err);
        if (*analyze) return analyze_command(file, rf, alpha, out_path, format, out, err);
        return compare_command(sf, rf, seed, reps, criteria, with_ubm, out_path, out);
    } catch (const InvalidArgument& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kIoError;
    }
}

}  // namespace mcsentinel::cli
