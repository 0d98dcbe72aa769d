#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "catch_amalgamated.hpp"
#include "mcsentinel/error.hpp"
#include "mcsentinel/moments.hpp"
#include "mcsentinel/samplers.hpp"
#include "oracles.hpp"

using namespace mcsentinel;
using Catch::Approx;

namespace {

MomentAccumulator scalar_acc(const std::vector<double>& xs) {
    MomentAccumulator acc(1);
    for (double x : xs) acc.push(std::vector<double>{x});
    return acc;
}

std::vector<double> ar1_trace(std::size_t n, double rho, std::uint64_t seed) {
    Ar1Sampler s(Ar1Spec{rho, 0.0, 1.0, 1}, seed);
    std::vector<double> out(n);
    double x = 0.0;
    for (auto& v : out) {
        s.next(std::span<double>(&x, 1));
        v = x;
    }
    return out;
}

}  // namespace

TEST_CASE("push: textbook sample mean and variance") {
    const auto acc = scalar_acc({1, 2, 3});
    REQUIRE(acc.count() == 3);
    REQUIRE(acc.mean()[0] == Approx(2.0));
    REQUIRE(acc.posterior_variance()[0] == Approx(1.0));
}

TEST_CASE("push: constant stream has zero variance") {
    const auto acc = scalar_acc(std::vector<double>(1000, 3.7));
    REQUIRE(acc.mean()[0] == 3.7);
    REQUIRE(acc.posterior_variance()[0] == 0.0);
    REQUIRE(acc.posterior_sd()[0] == 0.0);
}

TEST_CASE("push: AR(1) stream matches two-pass and the stationary variance") {
    const auto xs = ar1_trace(100000, 0.5, 11);
    const auto acc = scalar_acc(xs);
    const double lambda2 = acc.posterior_variance()[0];
    REQUIRE(oracle::relative_error(lambda2, oracle::sample_variance(xs)) < 1e-9);
    REQUIRE(oracle::relative_error(acc.mean()[0], oracle::mean(xs)) < 1e-9);
    REQUIRE(std::abs(lambda2 - 1.0) < 0.05);
    REQUIRE(std::abs(acc.mean()[0]) < 0.03);
}

TEST_CASE("mean: single sample is returned unchanged") {
    MomentAccumulator acc(3);
    const std::vector<double> x{1.5, -2.0, 1e6};
    acc.push(x);
    REQUIRE(acc.mean() == x);
}

TEST_CASE("posterior_sd examples") {
    REQUIRE(scalar_acc({0, 2}).posterior_sd()[0] == Approx(std::sqrt(2.0)));

    TwoStateSampler s(TwoStateSpec{0.5, 0.5, 1}, 5);
    std::vector<double> xs(100000);
    double x = 0.0;
    for (auto& v : xs) {
        s.next(std::span<double>(&x, 1));
        v = x;
    }
    const auto acc = scalar_acc(xs);
    const double sd = acc.posterior_sd()[0];
    REQUIRE(oracle::relative_error(sd * sd, oracle::sample_variance(xs)) < 1e-9);
    REQUIRE(std::abs(sd / 0.5 - 1.0) < 0.05);
}

TEST_CASE("errors: empty, too few samples, wrong dimension, non-finite") {
    MomentAccumulator acc(2);
    REQUIRE_THROWS_AS(acc.mean(), InsufficientDataError);
    REQUIRE_THROWS_AS(acc.posterior_variance(), InsufficientDataError);
    acc.push(std::vector<double>{1.0, 2.0});
    REQUIRE_THROWS_AS(acc.posterior_sd(), InsufficientDataError);
    REQUIRE_THROWS_AS(acc.push(std::vector<double>{1.0}), DimensionError);
    REQUIRE_THROWS_AS(acc.push(std::vector<double>{1.0, std::numeric_limits<double>::quiet_NaN()}),
                      NonFiniteError);
    REQUIRE_THROWS_AS(acc.push(std::vector<double>{std::numeric_limits<double>::infinity(), 0.0}),
                      NonFiniteError);
    // rejected samples leave the accumulator untouched
    REQUIRE(acc.count() == 1);
    REQUIRE(acc.mean()[0] == 1.0);
    REQUIRE_THROWS_AS(MomentAccumulator(0), InvalidArgument);
}

TEST_CASE("merge examples") {
    auto a = scalar_acc({1, 2});
    a.merge(scalar_acc({3}));
    const auto whole = scalar_acc({1, 2, 3});
    REQUIRE(a.count() == 3);
    REQUIRE(a.mean()[0] == Approx(whole.mean()[0]));
    REQUIRE(a.posterior_variance()[0] == Approx(whole.posterior_variance()[0]));

    auto b = scalar_acc({4, 9});
    const auto before = b;
    b.merge(MomentAccumulator(1));
    REQUIRE(b.count() == before.count());
    REQUIRE(b.mean() == before.mean());
    REQUIRE(b.sq_dev_sum() == before.sq_dev_sum());

    MomentAccumulator empty(1);
    empty.merge(before);
    REQUIRE(empty.mean() == before.mean());

    REQUIRE_THROWS_AS(b.merge(MomentAccumulator(2)), DimensionError);
}

TEST_CASE("merge of two AR(1) halves equals the whole-stream accumulator") {
    const auto xs = ar1_trace(20000, 0.5, 3);
    const auto whole = scalar_acc(xs);
    auto left = scalar_acc({xs.begin(), xs.begin() + 10000});
    left.merge(scalar_acc({xs.begin() + 10000, xs.end()}));
    REQUIRE(left.count() == whole.count());
    REQUIRE(oracle::relative_error(left.mean()[0], whole.mean()[0]) < 1e-9);
    REQUIRE(oracle::relative_error(left.posterior_variance()[0], whole.posterior_variance()[0]) < 1e-9);
}

TEST_CASE("property: streaming moments agree with two-pass on random streams") {
    std::mt19937_64 gen(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + gen() % 5000;
        const double scale = std::pow(10.0, static_cast<double>(gen() % 7));
        const double offset = std::uniform_real_distribution<double>(-1e6, 1e6)(gen) / 10.0;
        std::normal_distribution<double> dist(offset, scale);
        std::vector<double> xs(n);
        for (auto& x : xs) x = std::clamp(dist(gen), -1e6, 1e6);

        const auto acc = scalar_acc(xs);
        REQUIRE(oracle::relative_error(acc.mean()[0], oracle::mean(xs)) < 1e-9);
        REQUIRE(oracle::relative_error(acc.posterior_variance()[0], oracle::sample_variance(xs)) < 1e-9);

        auto shuffled = xs;
        std::shuffle(shuffled.begin(), shuffled.end(), gen);
        const auto acc2 = scalar_acc(shuffled);
        REQUIRE(oracle::relative_error(acc2.mean()[0], acc.mean()[0]) < 1e-9);
        REQUIRE(oracle::relative_error(acc2.posterior_variance()[0], acc.posterior_variance()[0]) < 1e-9);
    }
}

TEST_CASE("property: merge is associative") {
    std::mt19937_64 gen(7);
    std::normal_distribution<double> dist(5.0, 2.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> a(1 + gen() % 300), b(1 + gen() % 300), c(1 + gen() % 300);
        for (auto* v : {&a, &b, &c})
            for (auto& x : *v) x = dist(gen);
        auto left = scalar_acc(a);
        left.merge(scalar_acc(b));
        left.merge(scalar_acc(c));
        auto bc = scalar_acc(b);
        bc.merge(scalar_acc(c));
        auto right = scalar_acc(a);
        right.merge(bc);
        REQUIRE(left.count() == right.count());
        REQUIRE(oracle::relative_error(left.mean()[0], right.mean()[0]) < 1e-9);
        REQUIRE(oracle::relative_error(left.posterior_variance()[0], right.posterior_variance()[0]) < 1e-9);
    }
}

TEST_CASE("strong consistency: lambda2 error shrinks with n on AR(1)") {
    const std::vector<std::size_t> sizes{1000, 10000, 100000, 1000000};
    std::vector<double> medians;
    for (std::size_t n : sizes) {
        std::vector<double> errors;
        for (std::uint64_t rep = 0; rep < 20; ++rep) {
            Ar1Sampler s(Ar1Spec{0.5, 0.0, 1.0, 1}, 1000 + rep);
            MomentAccumulator acc(1);
            double x = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                s.next(std::span<double>(&x, 1));
                acc.push(std::span<const double>(&x, 1));
            }
            errors.push_back(std::abs(acc.posterior_variance()[0] - 1.0));
        }
        std::nth_element(errors.begin(), errors.begin() + 10, errors.end());
        medians.push_back(errors[10]);
    }
    for (std::size_t i = 1; i < medians.size(); ++i) {
        INFO("n=" << sizes[i] << " median error " << medians[i] << " vs " << medians[i - 1]);
        REQUIRE(medians[i] < medians[i - 1]);
    }
}
