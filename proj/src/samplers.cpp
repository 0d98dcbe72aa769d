#include "mcsentinel/samplers.hpp"

#include <cmath>

#include "mcsentinel/error.hpp"

namespace mcsentinel {

namespace {

void validate(const Ar1Spec& s) {
    if (!(std::abs(s.rho) < 1.0)) throw InvalidArgument("AR(1) rho must satisfy |rho| < 1");
    if (!(s.s2 > 0.0) || !std::isfinite(s.s2)) throw InvalidArgument("AR(1) s2 must be positive");
    if (!std::isfinite(s.mu)) throw InvalidArgument("AR(1) mu must be finite");
    if (s.dim == 0) throw InvalidArgument("dimension must be at least 1");
}

void validate(const TwoStateSpec& s) {
    auto in_unit = [](double p) { return p > 0.0 && p < 1.0; };
    if (!in_unit(s.p01) || !in_unit(s.p10)) {
        throw InvalidArgument("two-state flip probabilities must lie in (0, 1)");
    }
    if (s.dim == 0) throw InvalidArgument("dimension must be at least 1");
}

void validate(const GibbsBvnSpec& s) {
    if (!(std::abs(s.r) < 1.0)) throw InvalidArgument("Gibbs correlation must satisfy |r| < 1");
}

std::vector<Xoshiro256> coordinate_streams(std::size_t dim, std::uint64_t seed) {
    std::vector<Xoshiro256> rngs;
    rngs.reserve(dim);
    for (std::size_t i = 0; i < dim; ++i) rngs.emplace_back(seed, i);
    return rngs;
}

}  // namespace

Ar1Sampler::Ar1Sampler(const Ar1Spec& spec, std::uint64_t seed)
    : spec_(spec),
      innovation_sd_(std::sqrt(spec.s2 * (1.0 - spec.rho * spec.rho))),
      rngs_(coordinate_streams(spec.dim, seed)),
      state_(spec.dim) {
    validate(spec);
    const double sd = std::sqrt(spec.s2);
    for (std::size_t i = 0; i < state_.size(); ++i) state_[i] = spec.mu + sd * rngs_[i].normal();
}

bool Ar1Sampler::next(std::span<double> out) {
    for (std::size_t i = 0; i < state_.size(); ++i) {
        out[i] = state_[i];
        state_[i] = spec_.mu + spec_.rho * (state_[i] - spec_.mu) + innovation_sd_ * rngs_[i].normal();
    }
    return true;
}

std::vector<AnalyticTruth> Ar1Sampler::truth() const {
    const double sigma2 = spec_.s2 * (1.0 + spec_.rho) / (1.0 - spec_.rho);
    return std::vector<AnalyticTruth>(spec_.dim, AnalyticTruth{spec_.mu, spec_.s2, sigma2});
}

TwoStateSampler::TwoStateSampler(const TwoStateSpec& spec, std::uint64_t seed)
    : spec_(spec), rngs_(coordinate_streams(spec.dim, seed)), state_(spec.dim) {
    validate(spec);
    const double p1 = spec.p01 / (spec.p01 + spec.p10);
    for (std::size_t i = 0; i < state_.size(); ++i) state_[i] = rngs_[i].uniform() <= p1 ? 1.0 : 0.0;
}

bool TwoStateSampler::next(std::span<double> out) {
    for (std::size_t i = 0; i < state_.size(); ++i) {
        out[i] = state_[i];
        const double flip = state_[i] == 0.0 ? spec_.p01 : spec_.p10;
        if (rngs_[i].uniform() <= flip) state_[i] = 1.0 - state_[i];
    }
    return true;
}

std::vector<AnalyticTruth> TwoStateSampler::truth() const {
    const double s = spec_.p01 + spec_.p10;
    const double p1 = spec_.p01 / s;
    const double lambda2 = p1 * (1.0 - p1);
    const double sigma2 = lambda2 * (2.0 - s) / s;
    return std::vector<AnalyticTruth>(spec_.dim, AnalyticTruth{p1, lambda2, sigma2});
}

GibbsBvnSampler::GibbsBvnSampler(const GibbsBvnSpec& spec, std::uint64_t seed)
    : spec_(spec), cond_sd_(std::sqrt(1.0 - spec.r * spec.r)), rng_(seed, 0) {
    validate(spec);
}

bool GibbsBvnSampler::next(std::span<double> out) {
    x1_ = spec_.r * x2_ + cond_sd_ * rng_.normal();
    x2_ = spec_.r * x1_ + cond_sd_ * rng_.normal();
    out[0] = x1_;
    out[1] = x2_;
    return true;
}

std::vector<AnalyticTruth> GibbsBvnSampler::truth() const {
    const double r2 = spec_.r * spec_.r;
    return std::vector<AnalyticTruth>(2, AnalyticTruth{0.0, 1.0, (1.0 + r2) / (1.0 - r2)});
}

std::unique_ptr<Sampler> make_sampler(const SamplerSpec& spec, std::uint64_t seed) {
    return std::visit(
        [seed](const auto& s) -> std::unique_ptr<Sampler> {
            using T = std::decay_t<decltype(s)>;
            validate(s);
            if constexpr (std::is_same_v<T, Ar1Spec>) {
                return std::make_unique<Ar1Sampler>(s, seed);
            } else if constexpr (std::is_same_v<T, TwoStateSpec>) {
                return std::make_unique<TwoStateSampler>(s, seed);
            } else {
                return std::make_unique<GibbsBvnSampler>(s, seed);
            }
        },
        spec);
}

std::string sampler_name(const SamplerSpec& spec) {
    switch (spec.index()) {
        case 0: return "ar1";
        case 1: return "two-state";
        default: return "gibbs-bvn";
    }
}

}  // namespace mcsentinel
