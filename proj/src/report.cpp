#include "mcsentinel/report.hpp"

#include <cmath>
#include <ostream>

#include "mcsentinel/error.hpp"
#include "mcsentinel/normal.hpp"

namespace mcsentinel {

using nlohmann::json;

std::string to_string(RunStatus s) {
    switch (s) {
        case RunStatus::kTerminated: return "terminated";
        case RunStatus::kTruncated: return "truncated";
        case RunStatus::kMaxIterations: return "max_iter";
        case RunStatus::kAnalyzed: return "analyzed";
    }
    return "unknown";
}

RunStatus parse_run_status(const std::string& s) {
    if (s == "terminated") return RunStatus::kTerminated;
    if (s == "truncated") return RunStatus::kTruncated;
    if (s == "max_iter") return RunStatus::kMaxIterations;
    if (s == "analyzed") return RunStatus::kAnalyzed;
    throw FormatError("unknown status '" + s + "'");
}

std::string to_string(VarianceMethod m) {
    return m == VarianceMethod::kDoubling ? "abm" : "ubm";
}

std::string to_string(DegeneratePolicy p) {
    return p == DegeneratePolicy::kExclude ? "exclude" : "blocking";
}

TerminationReport build_report(RunStatus status, const MomentAccumulator& moments,
                               const std::vector<double>* sigma2, const FwsrConfig& cfg,
                               VarianceMethod method, const ChainMatrix* chain) {
    TerminationReport r;
    r.status = status;
    r.n_stop = moments.count();
    r.epsilon = cfg.epsilon;
    r.delta = cfg.delta;
    r.n_star = cfg.n_star;
    r.check_gap_batches = cfg.check_gap_batches;
    r.tau = cfg.tau;
    r.variance_method = to_string(method);
    r.degenerate_policy = to_string(cfg.degenerate_policy);
    r.z_critical = z_critical(cfg.delta);
    r.min_ess_bound = min_ess_bound(cfg.epsilon, cfg.delta);
    r.coordinates.resize(moments.dim());

    const std::uint64_t n = moments.count();
    if (n == 0) return r;
    const auto& mean = moments.mean();
    for (std::size_t i = 0; i < moments.dim(); ++i) r.coordinates[i].mean = mean[i];
    if (n < 2) return r;

    const auto lambda = moments.posterior_sd();
    for (std::size_t i = 0; i < moments.dim(); ++i) {
        auto& c = r.coordinates[i];
        c.lambda_hat = lambda[i];
        c.degenerate = lambda[i] == 0.0;
        if (c.degenerate) ++r.degenerate_count;
    }

    if (sigma2 != nullptr) {
        const auto result = check(*sigma2, moments, cfg);
        r.criterion_met = result.all_satisfied;
        const double dn = static_cast<double>(n);
        for (std::size_t i = 0; i < moments.dim(); ++i) {
            auto& c = r.coordinates[i];
            const double s2 = (*sigma2)[i];
            const double mcse = std::sqrt(s2 / dn);
            c.sigma_hat = std::sqrt(s2);
            c.mcse = mcse;
            c.ci_low = mean[i] - r.z_critical * mcse;
            c.ci_high = mean[i] + r.z_critical * mcse;
            c.width = result.coordinates[i].width;
            if (c.degenerate) continue;
            c.width_ratio = result.coordinates[i].width / lambda[i];
            const double raw = s2 > 0.0 ? dn * lambda[i] * lambda[i] / s2 : 2.0 * dn + 1.0;
            const auto capped = cap_ess(raw, n);
            c.ess_ratio = capped.value;
            c.ess_ratio_flagged = capped.flagged;
        }
    }

    if (chain != nullptr && chain->rows() >= 10) {
        for (std::size_t i = 0; i < moments.dim(); ++i) {
            auto& c = r.coordinates[i];
            if (c.degenerate) continue;
            try {
                c.ess_acf = cap_ess(ess_acf(chain->column(i)), n).value;
            } catch (const DegenerateError&) {
                // roundoff can leave a tiny lambda_hat on a constant trace
            }
        }
    }
    return r;
}

void attach_geweke(TerminationReport& report, const GewekeResult& geweke) {
    if (geweke.z.size() != report.coordinates.size()) {
        throw DimensionError("Geweke result does not match report dimension");
    }
    for (std::size_t i = 0; i < geweke.z.size(); ++i) {
        report.coordinates[i].geweke_z = geweke.z[i];
        report.coordinates[i].geweke_pass = geweke.passed[i];
    }
}

namespace {

template <typename T>
json opt(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> get_opt(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<T>();
}

}  // namespace

void to_json(json& j, const TerminationReport& r) {
    json coords = json::array();
    for (const auto& c : r.coordinates) {
        coords.push_back({
            {"mean", opt(c.mean)},
            {"lambda_hat", opt(c.lambda_hat)},
            {"sigma_hat", opt(c.sigma_hat)},
            {"mcse", opt(c.mcse)},
            {"ci_low", opt(c.ci_low)},
            {"ci_high", opt(c.ci_high)},
            {"width", opt(c.width)},
            {"width_ratio", opt(c.width_ratio)},
            {"ess_ratio", opt(c.ess_ratio)},
            {"ess_ratio_flagged", c.ess_ratio_flagged},
            {"ess_acf", opt(c.ess_acf)},
            {"degenerate", c.degenerate},
            {"geweke_z", opt(c.geweke_z)},
            {"geweke_pass", opt(c.geweke_pass)},
        });
    }
    j = json{
        {"format_version", 1},
        {"status", to_string(r.status)},
        {"n_stop", r.n_stop},
        {"config",
         {{"epsilon", r.epsilon},
          {"delta", r.delta},
          {"n_star", r.n_star},
          {"check_gap_batches", r.check_gap_batches},
          {"tau", r.tau},
          {"variance_method", r.variance_method},
          {"degenerate_policy", r.degenerate_policy}}},
        {"z_critical", r.z_critical},
        {"min_ess_bound", r.min_ess_bound},
        {"criterion_met", r.criterion_met},
        {"degenerate_count", r.degenerate_count},
        {"coordinates", std::move(coords)},
        {"timing", {{"wall_seconds", r.wall_seconds}, {"checks_performed", r.checks_performed}}},
    };
}

void from_json(const json& j, TerminationReport& r) {
    try {
        if (j.at("format_version").get<int>() != 1) throw FormatError("unsupported report version");
        r.status = parse_run_status(j.at("status").get<std::string>());
        r.n_stop = j.at("n_stop").get<std::uint64_t>();
        const auto& cfg = j.at("config");
        r.epsilon = cfg.at("epsilon").get<double>();
        r.delta = cfg.at("delta").get<double>();
        r.n_star = cfg.at("n_star").get<std::uint64_t>();
        r.check_gap_batches = cfg.at("check_gap_batches").get<std::uint64_t>();
        r.tau = cfg.at("tau").get<double>();
        r.variance_method = cfg.at("variance_method").get<std::string>();
        r.degenerate_policy = cfg.at("degenerate_policy").get<std::string>();
        r.z_critical = j.at("z_critical").get<double>();
        r.min_ess_bound = j.at("min_ess_bound").get<double>();
        r.criterion_met = j.at("criterion_met").get<bool>();
        r.degenerate_count = j.at("degenerate_count").get<std::size_t>();
        r.wall_seconds = j.at("timing").at("wall_seconds").get<double>();
        r.checks_performed = j.at("timing").at("checks_performed").get<std::uint64_t>();
        r.coordinates.clear();
        for (const auto& c : j.at("coordinates")) {
            CoordinateReport cr;
            cr.mean = get_opt<double>(c, "mean");
            cr.lambda_hat = get_opt<double>(c, "lambda_hat");
            cr.sigma_hat = get_opt<double>(c, "sigma_hat");
            cr.mcse = get_opt<double>(c, "mcse");
            cr.ci_low = get_opt<double>(c, "ci_low");
            cr.ci_high = get_opt<double>(c, "ci_high");
            cr.width = get_opt<double>(c, "width");
            cr.width_ratio = get_opt<double>(c, "width_ratio");
            cr.ess_ratio = get_opt<double>(c, "ess_ratio");
            cr.ess_ratio_flagged = c.at("ess_ratio_flagged").get<bool>();
            cr.ess_acf = get_opt<double>(c, "ess_acf");
            cr.degenerate = c.at("degenerate").get<bool>();
            cr.geweke_z = get_opt<double>(c, "geweke_z");
            cr.geweke_pass = get_opt<bool>(c, "geweke_pass");
            r.coordinates.push_back(cr);
        }
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed report: ") + e.what());
    }
}

namespace {

void put(std::ostream& out, const std::optional<double>& v) {
    if (v) out << *v;
}

void put(std::ostream& out, const std::optional<bool>& v) {
    if (v) out << (*v ? 1 : 0);
}

}  // namespace

void write_coordinates_csv(std::ostream& out, const TerminationReport& r) {
    out << "coordinate,mean,mcse,ci_low,ci_high,lambda_hat,sigma_hat,width,width_ratio,ess_ratio,"
           "ess_ratio_flagged,ess_acf,degenerate,geweke_z,geweke_pass\n";
    const auto old_precision = out.precision(17);
    for (std::size_t i = 0; i < r.coordinates.size(); ++i) {
        const auto& c = r.coordinates[i];
        out << i << ',';
        put(out, c.mean);
        out << ',';
        put(out, c.mcse);
        out << ',';
        put(out, c.ci_low);
        out << ',';
        put(out, c.ci_high);
        out << ',';
        put(out, c.lambda_hat);
        out << ',';
        put(out, c.sigma_hat);
        out << ',';
        put(out, c.width);
        out << ',';
        put(out, c.width_ratio);
        out << ',';
        put(out, c.ess_ratio);
        out << ',' << (c.ess_ratio_flagged ? 1 : 0) << ',';
        put(out, c.ess_acf);
        out << ',' << (c.degenerate ? 1 : 0) << ',';
        put(out, c.geweke_z);
        out << ',';
        put(out, c.geweke_pass);
        out << '\n';
    }
    out.precision(old_precision);
}

json checkpoint_json(const DoublingBatchMeans& s) {
    return json{
        {"abm_state_version", 1},
        {"dim", s.dim()},
        {"tau", s.tau()},
        {"n", s.count()},
        {"batch_size", s.batch_size()},
        {"batch_means", s.batch_means()},
        {"partial_sum", s.partial_sum()},
        {"partial_count", s.partial_count()},
    };
}

DoublingBatchMeans restore_checkpoint(const json& j) {
    try {
        if (j.at("abm_state_version").get<int>() != 1) {
            throw FormatError("unsupported checkpoint version");
        }
        return DoublingBatchMeans::restore(
            j.at("dim").get<std::size_t>(), j.at("tau").get<double>(),
            j.at("n").get<std::uint64_t>(), j.at("batch_size").get<std::uint64_t>(),
            j.at("batch_means").get<std::vector<double>>(),
            j.at("partial_sum").get<std::vector<double>>(),
            j.at("partial_count").get<std::uint64_t>());
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed checkpoint: ") + e.what());
    }
}

}  // namespace mcsentinel
