#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <vector>

#include "germgrain/core.hpp"

using namespace germgrain;

namespace {

struct Moments {
    double mean = 0.0, var = 0.0;
};

template <typename F>
Moments sample_moments(int n, F&& draw) {
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        double x = draw();
        s += x;
        s2 += x * x;
    }
    double m = s / n;
    return {m, s2 / n - m * m};
}

}  // namespace

TEST_CASE("streams are reproducible and order-insensitive", "[rng]") {
    auto a = RngStream::from_seed(42);
    auto b = RngStream::from_seed(42);
    for (int i = 0; i < 16; ++i) CHECK(a.next_u64() == b.next_u64());

    // a derived stream does not depend on how much the parent was consumed
    auto parent1 = RngStream::from_seed(9);
    auto parent2 = RngStream::from_seed(9);
    parent2.next_u64();
    parent2.next_u64();
    auto c1 = derive(parent1, "child");
    auto c2 = derive(parent2, "child");
    CHECK(c1.next_u64() == c2.next_u64());
}

TEST_CASE("derivation paths give distinct streams", "[rng]") {
    auto root = RngStream::from_seed(1);
    auto ab = derive(derive(root, "a"), "b");
    auto ab_flat = derive(root, "ab");
    auto ba = derive(derive(root, "b"), "a");
    CHECK(ab.next_u64() != ab_flat.next_u64());
    CHECK(ab.key != ba.key);
    auto i0 = derive(root, "rep", 0);
    auto i1 = derive(root, "rep", 1);
    CHECK(i0.key != i1.key);
    CHECK(i0.path.back() == "rep:0");
}

TEST_CASE("u01 range and uniformity", "[rng]") {
    auto g = RngStream::from_seed(5);
    int buckets[10] = {};
    for (int i = 0; i < 100000; ++i) {
        double u = g.u01();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        ++buckets[static_cast<int>(u * 10.0)];
    }
    for (int b : buckets) CHECK(std::abs(b - 10000) < 500);
    double v = g.u01_open();
    CHECK(v > 0.0);
    CHECK(v <= 1.0);
}

TEST_CASE("below is unbiased across small ranges", "[rng]") {
    auto g = RngStream::from_seed(17);
    int counts[7] = {};
    for (int i = 0; i < 70000; ++i) ++counts[g.below(7)];
    for (int c : counts) CHECK(std::abs(c - 10000) < 500);
}

TEST_CASE("poisson small and large regime match moments", "[rng]") {
    auto g = RngStream::from_seed(23);
    for (double mean : {0.5, 4.0, 30.0, 120.0}) {
        auto m = sample_moments(40000, [&] { return static_cast<double>(poisson(g, mean)); });
        CHECK(m.mean == Catch::Approx(mean).margin(4.0 * std::sqrt(mean / 40000.0)));
        CHECK(m.var == Catch::Approx(mean).epsilon(0.08));
    }
    CHECK(poisson(g, 0.0) == 0);
    CHECK_THROWS_AS(poisson(g, -1.0), std::invalid_argument);
}

TEST_CASE("poisson ptrd passes a chi-square check", "[rng]") {
    // large-mean sampler against exact pmf, binned tails
    auto g = RngStream::from_seed(29);
    const double mean = 50.0;
    const int n = 200000;
    const int lo = 30, hi = 72;
    std::vector<int> obs(static_cast<std::size_t>(hi - lo + 3), 0);
    for (int i = 0; i < n; ++i) {
        auto k = poisson(g, mean);
        if (k < lo) ++obs.front();
        else if (k > hi) ++obs.back();
        else ++obs[static_cast<std::size_t>(k - lo + 1)];
    }
    auto log_pmf = [&](int k) { return k * std::log(mean) - mean - std::lgamma(k + 1.0); };
    double p_lo = 0.0, p_hi = 0.0, chi2 = 0.0;
    for (int k = 0; k < lo; ++k) p_lo += std::exp(log_pmf(k));
    for (int k = hi + 1; k < 200; ++k) p_hi += std::exp(log_pmf(k));
    chi2 += sq(obs.front() - n * p_lo) / (n * p_lo);
    chi2 += sq(obs.back() - n * p_hi) / (n * p_hi);
    for (int k = lo; k <= hi; ++k) {
        double e = n * std::exp(log_pmf(k));
        chi2 += sq(obs[static_cast<std::size_t>(k - lo + 1)] - e) / e;
    }
    // 44 degrees of freedom; 99.9th percentile is about 78
    CHECK(chi2 < 78.0);
}

TEST_CASE("binomial and geometric match pmfs", "[rng]") {
    auto g = RngStream::from_seed(31);
    auto mb = sample_moments(50000, [&] { return static_cast<double>(binomial(g, 10, 0.3)); });
    CHECK(mb.mean == Catch::Approx(3.0).margin(0.05));
    CHECK(mb.var == Catch::Approx(2.1).epsilon(0.08));

    const double p = 0.35;
    std::map<std::int64_t, int> hist;
    const int n = 80000;
    for (int i = 0; i < n; ++i) ++hist[geometric(g, p)];
    for (std::int64_t k = 0; k <= 6; ++k) {
        double want = p * std::pow(1.0 - p, static_cast<double>(k));
        CHECK(hist[k] / static_cast<double>(n) == Catch::Approx(want).margin(0.006));
    }
    CHECK(geometric(g, 1.0) == 0);
}

TEST_CASE("gamma matches mean and variance across shapes", "[rng]") {
    auto g = RngStream::from_seed(37);
    for (double shape : {0.4, 1.0, 2.5, 9.0}) {
        const double scale = 1.7;
        auto m = sample_moments(60000, [&] { return gamma_dist(g, shape, scale); });
        CHECK(m.mean == Catch::Approx(shape * scale).epsilon(0.03));
        CHECK(m.var == Catch::Approx(shape * scale * scale).epsilon(0.08));
    }
}

TEST_CASE("negative binomial has the gamma-poisson law", "[rng]") {
    auto g = RngStream::from_seed(41);
    const double r = 3.0, p = 0.4;
    auto m = sample_moments(60000, [&] { return static_cast<double>(neg_binomial(g, r, p)); });
    double mean = r * p / (1.0 - p);
    CHECK(m.mean == Catch::Approx(mean).epsilon(0.03));
    CHECK(m.var == Catch::Approx(mean / (1.0 - p)).epsilon(0.08));
}

TEST_CASE("hypergeometric matches the exact pmf", "[rng]") {
    auto g = RngStream::from_seed(43);
    // urn of 10 with 4 marked, draw 5
    const int n = 60000;
    std::map<std::int64_t, int> hist;
    for (int i = 0; i < n; ++i) ++hist[hypergeometric(g, 10, 4, 5)];
    auto choose = [](double a, double b) { return std::exp(std::lgamma(a + 1) - std::lgamma(b + 1) - std::lgamma(a - b + 1)); };
    for (std::int64_t k = 0; k <= 4; ++k) {
        double want = choose(4, k) * choose(6, 5.0 - k) / choose(10, 5);
        CHECK(hist[k] / static_cast<double>(n) == Catch::Approx(want).margin(0.007));
    }
}

TEST_CASE("normal01 has standard moments", "[rng]") {
    auto g = RngStream::from_seed(47);
    auto m = sample_moments(80000, [&] { return normal01(g); });
    CHECK(m.mean == Catch::Approx(0.0).margin(0.02));
    CHECK(m.var == Catch::Approx(1.0).epsilon(0.03));
}
