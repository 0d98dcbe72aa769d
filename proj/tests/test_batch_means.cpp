#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "catch_amalgamated.hpp"
#include "mcsentinel/batch_means.hpp"
#include "mcsentinel/error.hpp"
#include "mcsentinel/report.hpp"
#include "mcsentinel/samplers.hpp"
#include "oracles.hpp"

using namespace mcsentinel;

namespace {

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

DoublingBatchMeans scalar_abm(const std::vector<double>& xs, double tau = 0.5) {
    DoublingBatchMeans abm(1, tau);
    for (double x : xs) abm.push(std::span<const double>(&x, 1));
    return abm;
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return 0.5 * (v[(v.size() - 1) / 2] + v[v.size() / 2]);
}

}  // namespace

TEST_CASE("target_batch_size examples") {
    CHECK(target_batch_size(100, 0.5) == 8);
    CHECK(target_batch_size(16384, 0.5) == 128);
    CHECK(target_batch_size(16383, 0.5) == 64);
    CHECK(target_batch_size(4, 0.5) == 2);
    REQUIRE_THROWS_AS(target_batch_size(3, 0.5), InsufficientDataError);
    REQUIRE_THROWS_AS(target_batch_size(100, 1.0), InvalidArgument);
    REQUIRE_THROWS_AS(target_batch_size(100, 0.0), InvalidArgument);
}

TEST_CASE("target_batch_size: exhaustive scan doubles exactly at n = 4 * 4^k") {
    std::uint64_t prev = target_batch_size(4, 0.5);
    for (std::uint64_t n = 4; n <= 1000000; ++n) {
        const auto b = target_batch_size(n, 0.5);
        REQUIRE(b == std::max<std::uint64_t>(2, oracle::power_of_two_floor(n, 0.5)));
        const double root = std::sqrt(static_cast<double>(n));
        REQUIRE(static_cast<double>(b) <= root);
        REQUIRE(static_cast<double>(b) >= root / 2);
        if (b != prev) {
            REQUIRE(b == 2 * prev);
            REQUIRE(n == 4 * prev * prev);
        }
        prev = b;
    }
}

TEST_CASE("target_batch_size for other exponents matches brute force") {
    for (double tau : {0.4, 0.6, 0.75}) {
        for (std::uint64_t n = 4; n < 200000; n += 7) {
            REQUIRE(target_batch_size(n, tau) ==
                    std::max<std::uint64_t>(2, oracle::power_of_two_floor(n, tau)));
        }
    }
}

TEST_CASE("abm_push: first four samples form two batches of two") {
    const auto abm = scalar_abm({1.0, 4.0, -2.0, 0.5});
    REQUIRE(abm.batch_size() == 2);
    REQUIRE(abm.completed_batches() == 2);
    CHECK(abm.batch_mean(0)[0] == 2.5);
    CHECK(abm.batch_mean(1)[0] == -0.75);
    CHECK(abm.partial_count() == 0);
}

TEST_CASE("abm_push: doubling averages adjacent batch means") {
    // tau = 0.7 makes the target reach 4 at n = 8 (8^0.7 = 4.29)
    const auto abm = scalar_abm({1, 1, 3, 3, 5, 5, 7, 7}, 0.7);
    REQUIRE(abm.batch_size() == 4);
    REQUIRE(abm.completed_batches() == 2);
    CHECK(abm.batch_mean(0)[0] == 2.0);
    CHECK(abm.batch_mean(1)[0] == 6.0);
}

TEST_CASE("abm_push: bookkeeping and memory bound over 1e6 samples") {
    Ar1Sampler s(Ar1Spec{0.5, 0.0, 1.0, 1}, 99);
    DoublingBatchMeans abm(1, 0.5);
    double x = 0.0;
    for (std::uint64_t n = 1; n <= 1000000; ++n) {
        s.next(std::span<double>(&x, 1));
        abm.push(std::span<const double>(&x, 1));
        REQUIRE(abm.count() == n);
        REQUIRE(abm.count() == abm.batch_size() * abm.completed_batches() + abm.partial_count());
        REQUIRE(static_cast<double>(abm.completed_batches()) <=
                2.0 * std::sqrt(static_cast<double>(n)) + 1.0);
        if (n >= 4) REQUIRE(abm.batch_size() == target_batch_size(n, 0.5));
        if (n == 16384) {
            CHECK(abm.batch_size() == 128);
            CHECK(abm.completed_batches() == 128);
        }
    }
}

TEST_CASE("abm_push: non-default tau keeps bookkeeping consistent") {
    for (double tau : {0.4, 0.6, 0.9}) {
        const auto xs = ar1_trace(200000, 0.3, 17);
        DoublingBatchMeans abm(1, tau);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            abm.push(std::span<const double>(&xs[i], 1));
            const double n = static_cast<double>(i + 1);
            REQUIRE(abm.count() == abm.batch_size() * abm.completed_batches() + abm.partial_count());
            REQUIRE(static_cast<double>(abm.completed_batches()) <= 2.0 * std::pow(n, 1.0 - tau) + 1.0 + 2.0);
        }
        INFO("tau=" << tau);
        const double target = static_cast<double>(target_batch_size(abm.count(), tau));
        REQUIRE(static_cast<double>(abm.batch_size()) >= target / 2);
        REQUIRE(abm.batch_size() <= target_batch_size(abm.count(), tau));
    }
}

TEST_CASE("abm_push: rejects bad samples without changing state") {
    DoublingBatchMeans abm(2);
    abm.push(std::vector<double>{1.0, 2.0});
    REQUIRE_THROWS_AS(abm.push(std::vector<double>{1.0}), DimensionError);
    REQUIRE_THROWS_AS(abm.push(std::vector<double>{1.0, std::nan("")}), NonFiniteError);
    REQUIRE(abm.count() == 1);
    REQUIRE(abm.partial_sum()[1] == 2.0);
    REQUIRE_THROWS_AS(DoublingBatchMeans(1, 0.3), InvalidArgument);
    REQUIRE_THROWS_AS(DoublingBatchMeans(1, 1.0), InvalidArgument);
}

TEST_CASE("equivalence: aBM equals from-scratch batch means at n = 4 * 4^k") {
    const auto xs = ar1_trace(262144, 0.5, 5);
    DoublingBatchMeans abm(1);
    std::size_t next_check = 16;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        abm.push(std::span<const double>(&xs[i], 1));
        if (i + 1 == next_check) {
            const std::vector<double> prefix(xs.begin(), xs.begin() + static_cast<long>(i + 1));
            const auto b = static_cast<std::size_t>(std::sqrt(static_cast<double>(i + 1)));
            REQUIRE(abm.batch_size() == b);
            REQUIRE(oracle::relative_error(abm.sigma2()[0], oracle::batch_means(prefix, b)) < 1e-9);
            next_check *= 4;
        }
    }
    REQUIRE(next_check > xs.size());
}

TEST_CASE("doubling preserves the grand mean of batch means") {
    // integer data keeps every batch mean dyadic, so the comparison is exact
    std::vector<double> ints;
    std::mt19937 gen(1);
    for (int i = 0; i < 4096; ++i) ints.push_back(static_cast<double>(gen() % 100));
    DoublingBatchMeans abm(1);
    std::size_t doublings = 0;
    for (std::size_t i = 0; i < ints.size(); ++i) {
        const auto size_before = abm.batch_size();
        abm.push(std::span<const double>(&ints[i], 1));
        if (abm.batch_size() == size_before) continue;
        ++doublings;
        double grand = 0.0;
        for (std::size_t j = 0; j < abm.completed_batches(); ++j) grand += abm.batch_mean(j)[0];
        grand /= static_cast<double>(abm.completed_batches());
        const std::size_t used = abm.batch_size() * abm.completed_batches();
        REQUIRE(used == i + 1);
        double direct = 0.0;
        for (std::size_t k = 0; k < used; ++k) direct += ints[k];
        REQUIRE(grand == direct / static_cast<double>(used));
    }
    REQUIRE(doublings == 5);  // 2 -> 4 -> 8 -> 16 -> 32 -> 64
}

TEST_CASE("abm_sigma2: examples") {
    SECTION("constant batch means give zero") {
        const auto abm = scalar_abm(std::vector<double>(1000, 2.0));
        REQUIRE(abm.sigma2()[0] == 0.0);
    }
    SECTION("fewer than two batches is an error") {
        const auto abm = scalar_abm({1.0, 2.0, 3.0});
        REQUIRE_THROWS_AS(abm.sigma2(), InsufficientDataError);
    }
    SECTION("partial batch is excluded") {
        std::vector<double> xs{1, 2, 3, 4, 100};
        const auto abm = scalar_abm(xs);
        xs.pop_back();
        REQUIRE(abm.sigma2()[0] == oracle::batch_means(xs, 2));
    }
    SECTION("iid normal: median over 20 reps within 10% of 1") {
        std::vector<double> est;
        for (std::uint64_t rep = 0; rep < 20; ++rep) {
            est.push_back(scalar_abm(ar1_trace(100000, 0.0, 300 + rep)).sigma2()[0]);
        }
        REQUIRE(std::abs(median_of(est) - 1.0) < 0.10);
    }
    SECTION("AR(1) rho=0.5 at 1e6 within 10% of 3") {
        const auto abm = scalar_abm(ar1_trace(1000000, 0.5, 21));
        REQUIRE(std::abs(abm.sigma2()[0] / 3.0 - 1.0) < 0.10);
    }
}

TEST_CASE("ubm_sigma2: batch layout and estimates") {
    SECTION("n=100 uses 10 batches of 10") {
        const auto xs = ar1_trace(100, 0.5, 1);
        REQUIRE(ubm_batch_size(100) == 10);
        const ChainMatrix chain(1, xs);
        REQUIRE(ubm_sigma2(chain)[0] == Catch::Approx(oracle::batch_means(xs, 10)).epsilon(1e-12));
    }
    SECTION("trailing remainder is discarded") {
        auto xs = ar1_trace(109, 0.5, 2);
        const ChainMatrix chain(1, xs);
        xs.resize(100);
        REQUIRE(oracle::relative_error(ubm_sigma2(chain)[0], oracle::batch_means(xs, 10)) < 1e-12);
    }
    SECTION("too short is an error") {
        REQUIRE_THROWS_AS(ubm_sigma2(ChainMatrix(1, {1.0, 2.0, 3.0})), InsufficientDataError);
    }
    SECTION("AR(1) at 1e6: near 3 and close to aBM") {
        const auto xs = ar1_trace(1000000, 0.5, 77);
        const double u = ubm_sigma2(ChainMatrix(1, xs))[0];
        const double a = scalar_abm(xs).sigma2()[0];
        REQUIRE(std::abs(u / 3.0 - 1.0) < 0.10);
        REQUIRE(a / u >= 0.8);
        REQUIRE(a / u <= 1.2);
    }
}

TEST_CASE("strong consistency: aBM error shrinks with n") {
    const std::vector<std::size_t> sizes{10000, 100000, 1000000};
    std::vector<double> medians;
    for (std::size_t n : sizes) {
        std::vector<double> errors;
        for (std::uint64_t rep = 0; rep < 20; ++rep) {
            errors.push_back(std::abs(scalar_abm(ar1_trace(n, 0.5, 500 + rep)).sigma2()[0] / 3.0 - 1.0));
        }
        medians.push_back(median_of(errors));
    }
    INFO(medians[0] << " " << medians[1] << " " << medians[2]);
    REQUIRE(medians[1] < medians[0]);
    REQUIRE(medians[2] < medians[1]);
}

TEST_CASE("checkpoint round trip resumes identically") {
    const auto xs = ar1_trace(5000, 0.5, 8);
    DoublingBatchMeans live(1);
    for (std::size_t i = 0; i < 3001; ++i) live.push(std::span<const double>(&xs[i], 1));
    auto restored = restore_checkpoint(nlohmann::json::parse(checkpoint_json(live).dump()));
    for (std::size_t i = 3001; i < xs.size(); ++i) {
        live.push(std::span<const double>(&xs[i], 1));
        restored.push(std::span<const double>(&xs[i], 1));
    }
    REQUIRE(restored.count() == live.count());
    REQUIRE(restored.batch_size() == live.batch_size());
    REQUIRE(restored.batch_means() == live.batch_means());
    REQUIRE(restored.sigma2() == live.sigma2());

    auto bad = checkpoint_json(live);
    bad["n"] = live.count() + 1;
    REQUIRE_THROWS_AS(restore_checkpoint(bad), FormatError);
    bad = checkpoint_json(live);
    bad["abm_state_version"] = 2;
    REQUIRE_THROWS_AS(restore_checkpoint(bad), FormatError);
}
