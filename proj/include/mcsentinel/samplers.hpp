#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "mcsentinel/rng.hpp"
#include "mcsentinel/source.hpp"

namespace mcsentinel {

/// Exact stationary quantities of one coordinate of a test chain.
struct AnalyticTruth {
    double mean;
    double lambda2;  ///< stationary (posterior) variance
    double sigma2;   ///< asymptotic variance in the chain CLT
    [[nodiscard]] double ess_rate() const { return lambda2 / sigma2; }
};

struct Ar1Spec {
    double rho = 0.5;
    double mu = 0.0;
    double s2 = 1.0;
    std::size_t dim = 1;
};

struct TwoStateSpec {
    double p01 = 0.1;
    double p10 = 0.1;
    std::size_t dim = 1;
};

struct GibbsBvnSpec {
    double r = 0.5;
};

using SamplerSpec = std::variant<Ar1Spec, TwoStateSpec, GibbsBvnSpec>;

/// An endless test chain with known stationary moments.
class Sampler : public SampleSource {
public:
    /// One entry per coordinate.
    [[nodiscard]] virtual std::vector<AnalyticTruth> truth() const = 0;
};

/// Independent AR(1) coordinates started from stationarity:
/// X' = mu + rho (X - mu) + sqrt(s2 (1 - rho^2)) N(0, 1).
class Ar1Sampler final : public Sampler {
public:
    Ar1Sampler(const Ar1Spec& spec, std::uint64_t seed);

    [[nodiscard]] std::size_t dim() const override { return state_.size(); }
    bool next(std::span<double> out) override;
    [[nodiscard]] std::vector<AnalyticTruth> truth() const override;

private:
    Ar1Spec spec_;
    double innovation_sd_;
    std::vector<Xoshiro256> rngs_;
    std::vector<double> state_;
};

/// Independent two-state {0, 1} chains started from stationarity; each
/// coordinate flips 0 -> 1 with probability p01 and 1 -> 0 with p10.
class TwoStateSampler final : public Sampler {
public:
    TwoStateSampler(const TwoStateSpec& spec, std::uint64_t seed);

    [[nodiscard]] std::size_t dim() const override { return state_.size(); }
    bool next(std::span<double> out) override;
    [[nodiscard]] std::vector<AnalyticTruth> truth() const override;

private:
    TwoStateSpec spec_;
    std::vector<Xoshiro256> rngs_;
    std::vector<double> state_;
};

/// Systematic-scan Gibbs sampler for a standard bivariate normal with
/// correlation r. Each coordinate is marginally AR(1) with coefficient r^2.
class GibbsBvnSampler final : public Sampler {
public:
    GibbsBvnSampler(const GibbsBvnSpec& spec, std::uint64_t seed);

    [[nodiscard]] std::size_t dim() const override { return 2; }
    bool next(std::span<double> out) override;
    [[nodiscard]] std::vector<AnalyticTruth> truth() const override;

private:
    GibbsBvnSpec spec_;
    double cond_sd_;
    Xoshiro256 rng_;
    double x1_ = 0.0;
    double x2_ = 0.0;
};

/// Validates the spec (throws InvalidArgument) and builds the sampler.
[[nodiscard]] std::unique_ptr<Sampler> make_sampler(const SamplerSpec& spec, std::uint64_t seed);

[[nodiscard]] std::string sampler_name(const SamplerSpec& spec);

/// Wraps a source and stops it after `limit` draws.
class TruncatedSource final : public SampleSource {
public:
    TruncatedSource(SampleSource& inner, std::uint64_t limit) : inner_(inner), left_(limit) {}
    [[nodiscard]] std::size_t dim() const override { return inner_.dim(); }
    bool next(std::span<double> out) override {
        if (left_ == 0) return false;
        --left_;
        return inner_.next(out);
    }

private:
    SampleSource& inner_;
    std::uint64_t left_;
};

}  // namespace mcsentinel
