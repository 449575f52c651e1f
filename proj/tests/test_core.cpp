#include "doctest.h"

#include <atomic>
#include <cmath>
#include <numeric>
#include <set>

#include "chpt/core.hpp"
#include "chpt/rng.hpp"

using namespace chpt;

TEST_CASE("Philox4x32-10 matches the Random123 known-answer vectors") {
    using C = Philox4x32::Counter;
    using K = Philox4x32::Key;
    CHECK(Philox4x32::encrypt(C{0, 0, 0, 0}, K{0, 0}) == C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(Philox4x32::encrypt(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, K{0xffffffff, 0xffffffff}) ==
          C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(Philox4x32::encrypt(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, K{0xa4093822, 0x299f31d0}) ==
          C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("gaussian_draws") {
    SUBCASE("zero count gives an empty vector") { CHECK(gaussian_draws(RngStream{3, 9}, 0).empty()); }

    SUBCASE("same seed and stream reproduce the draws") {
        const auto a = gaussian_draws(RngStream{7, 1}, 5);
        const auto b = gaussian_draws(RngStream{7, 1}, 5);
        CHECK(a == b);
        CHECK(a != gaussian_draws(RngStream{7, 2}, 5));
        CHECK(a != gaussian_draws(RngStream{8, 1}, 5));
    }

    SUBCASE("prefix property: a longer request extends a shorter one") {
        const auto a = gaussian_draws(RngStream{11, 4}, 7);
        const auto b = gaussian_draws(RngStream{11, 4}, 12);
        CHECK(std::equal(a.begin(), a.end(), b.begin()));
    }

    SUBCASE("first two moments of 1e6 draws at seed 42") {
        // 3 sigma: mean SE = 1e-3, variance SE = sqrt(2) * 1e-3.
        const auto x = gaussian_draws(RngStream{42, 0}, 1'000'000);
        const double mean = compensated_mean(x);
        CompensatedSum ss;
        for (double v : x) ss.add((v - mean) * (v - mean));
        const double var = ss.value() / (x.size() - 1);
        CHECK(mean >= -0.01);
        CHECK(mean <= 0.01);
        CHECK(var >= 0.99);
        CHECK(var <= 1.01);
    }

    SUBCASE("tail frequency matches the normal law") {
        const auto x = gaussian_draws(RngStream{5, 5}, 400'000);
        const auto beyond2 = std::count_if(x.begin(), x.end(), [](double v) { return std::abs(v) > 2.0; });
        const double p = 0.045500263896358;  // P(|Z| > 2)
        const double se = std::sqrt(p * (1 - p) / x.size());
        CHECK(std::abs(static_cast<double>(beyond2) / x.size() - p) < 5 * se);
    }

    SUBCASE("distinct streams are uncorrelated") {
        const std::size_t n = 200'000;
        const auto a = gaussian_draws(RngStream{1, 100}, n);
        const auto b = gaussian_draws(RngStream{1, 101}, n);
        double cross = 0.0;
        for (std::size_t i = 0; i < n; ++i) cross += a[i] * b[i];
        CHECK(std::abs(cross / n) < 5.0 / std::sqrt(static_cast<double>(n)));
    }
}

TEST_CASE("uniform conversion stays inside the open unit interval") {
    CHECK(NormalSampler::to_open_unit(0, 0) > 0.0);
    CHECK(NormalSampler::to_open_unit(0xffffffff, 0xffffffff) < 1.0);
}

TEST_CASE("ModelParams validation") {
    CHECK_NOTHROW(ModelParams{1.0, 3, 1.0, 5}.validate());
    CHECK_NOTHROW(ModelParams{1.0, 3, 0.0, 5}.validate());
    CHECK_THROWS_AS(ModelParams(1.0, 0, 1.0, 5).validate(), std::invalid_argument);
    CHECK_THROWS_AS(ModelParams(1.0, 6, 1.0, 5).validate(), std::invalid_argument);
    CHECK_THROWS_AS(ModelParams(1.0, 1, -1.0, 5).validate(), std::invalid_argument);
    CHECK_THROWS_AS(ModelParams(1.0, 1, 1.0, 1).validate(), std::invalid_argument);
    CHECK(ModelParams{1.5, 3, 0.5, 5}.snr() == doctest::Approx(3.0));
}

TEST_CASE("compensated summation") {
    const std::vector<double> v{1e16, 1.0, -1e16, 1.0};
    CHECK(compensated_sum(v) == 2.0);
    CHECK(std::isnan(compensated_mean(std::vector<double>{})));
}

TEST_CASE("batch means") {
    std::vector<double> v(10);
    std::iota(v.begin(), v.end(), 0.0);

    SUBCASE("contiguous batches") {
        const auto bm = batch_means(v, 5);
        CHECK(bm == std::vector<double>{0.5, 2.5, 4.5, 6.5, 8.5});
        const auto ms = mean_with_batch_se(v, 5);
        CHECK(ms.mean == doctest::Approx(4.5));
        // batch means spaced by 2: sd = 2 * sqrt(2.5), se = sd / sqrt(5)
        CHECK(ms.se == doctest::Approx(2.0 * std::sqrt(2.5) / std::sqrt(5.0)));
    }

    SUBCASE("fewer values than batches uses one value per batch") {
        CHECK(batch_means(v).size() == 10);
    }

    SUBCASE("a single value has no standard error") {
        const auto ms = mean_with_batch_se(std::vector<double>{3.0});
        CHECK(ms.mean == 3.0);
        CHECK(std::isnan(ms.se));
    }

    SUBCASE("ratio of proportional samples is exact with zero error") {
        std::vector<double> twice(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) twice[i] = 2.0 * (v[i] + 1.0);
        std::vector<double> base(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) base[i] = v[i] + 1.0;
        const auto r = ratio_with_batch_se(twice, base, 5);
        CHECK(r.mean == doctest::Approx(2.0));
        CHECK(r.se == doctest::Approx(0.0));
    }

    SUBCASE("ratio standard error matches the delta method") {
        // Independent draws, compare to the textbook delta-method formula.
        const auto a = gaussian_draws(RngStream{2, 0}, 20000);
        const auto b = gaussian_draws(RngStream{2, 1}, 20000);
        std::vector<double> num(a.size()), den(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            num[i] = 3.0 + a[i];
            den[i] = 5.0 + b[i];
        }
        const auto r = ratio_with_batch_se(num, den);
        const double expect = std::sqrt(1.0 / 25.0 + 9.0 / 625.0) / std::sqrt(20000.0);
        CHECK(r.mean == doctest::Approx(0.6).epsilon(0.01));
        CHECK(r.se == doctest::Approx(expect).epsilon(0.25));
    }
}

TEST_CASE("parallel_for visits every index exactly once") {
    for (unsigned workers : {1u, 2u, 3u, 8u}) {
        std::vector<std::atomic<int>> hits(1001);
        parallel_for(hits.size(), workers, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) hits[i].fetch_add(1);
        });
        CHECK(std::all_of(hits.begin(), hits.end(), [](const auto& h) { return h.load() == 1; }));
    }
    CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t lo, std::size_t) {
                        if (lo > 0) throw std::runtime_error("boom");
                    }),
                    std::runtime_error);
    parallel_for(0, 4, [](std::size_t, std::size_t) { FAIL("called on empty range"); });
}
