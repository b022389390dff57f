#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "releap/rng.hpp"

using namespace releap;

TEST_CASE("splitmix64 matches published reference outputs") {
    // Reference sequence for state 0 from the standard splitmix64 recipe.
    std::uint64_t state = 0;
    CHECK(splitmix64(state) == 16294208416658607535ULL);
    CHECK(splitmix64(state) == 7960286522194355700ULL);
    CHECK(splitmix64(state) == 487617019471545679ULL);
    CHECK(splitmix64(state) == 17909611376780542444ULL);
}

TEST_CASE("derive_seed is deterministic and tag-sensitive") {
    CHECK(derive_seed(42, 1) == derive_seed(42, 1));
    CHECK(derive_seed(42, 1) != derive_seed(42, 2));
    CHECK(derive_seed(42, 1) != derive_seed(43, 1));
    CHECK(derive_seed(42, 1, 0) != derive_seed(42, 1, 1));
}

TEST_CASE("same seed reproduces the full stream") {
    Rng a(123), b(123);
    for (int i = 0; i < 1000; ++i) {
        REQUIRE(a.next_u64() == b.next_u64());
    }
    Rng c(123), d(124);
    int diff = 0;
    for (int i = 0; i < 100; ++i) diff += c.next_u64() != d.next_u64();
    CHECK(diff > 90);
}

TEST_CASE("child streams depend on seed and tag, not on consumption") {
    Rng a(7), b(7);
    for (int i = 0; i < 50; ++i) b.uniform();  // advance b only
    Rng ca = a.child(3), cb = b.child(3);
    for (int i = 0; i < 20; ++i) REQUIRE(ca.next_u64() == cb.next_u64());
    Rng c1 = a.child(1), c2 = a.child(2);
    CHECK(c1.next_u64() != c2.next_u64());
}

TEST_CASE("uniform lies in [0,1) with mean near one half") {
    Rng rng(99);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    CHECK(std::abs(sum / n - 0.5) < 0.005);
}

TEST_CASE("uniform_int covers the range without bias toward low values") {
    Rng rng(5);
    std::vector<int> counts(10, 0);
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const int k = static_cast<int>(rng.uniform_int(10));
        REQUIRE(k >= 0);
        REQUIRE(k < 10);
        ++counts[k];
    }
    for (int k = 0; k < 10; ++k) {
        CHECK(counts[k] > n / 10 - 800);
        CHECK(counts[k] < n / 10 + 800);
    }
}

TEST_CASE("normal moments match the standard normal") {
    Rng rng(2024);
    const int n = 200000;
    double sum = 0.0, sum2 = 0.0, sum3 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        sum += z;
        sum2 += z * z;
        sum3 += z * z * z;
    }
    CHECK(std::abs(sum / n) < 0.01);
    CHECK(std::abs(sum2 / n - 1.0) < 0.02);
    CHECK(std::abs(sum3 / n) < 0.05);
}

TEST_CASE("scaled normal applies mean and sd") {
    Rng rng(11);
    const int n = 100000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal(3.0, 2.0);
        sum += z;
        sum2 += z * z;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    CHECK(std::abs(mean - 3.0) < 0.03);
    CHECK(std::abs(var - 4.0) < 0.1);
}

TEST_CASE("exponential has the requested rate") {
    Rng rng(31);
    const int n = 200000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double t = rng.exponential(0.5);
        REQUIRE(t >= 0.0);
        sum += t;
    }
    CHECK(std::abs(sum / n - 2.0) < 0.03);
    CHECK_THROWS_AS(rng.exponential(0.0), PreconditionError);
}

TEST_CASE("gamma moments match shape parameter") {
    for (double shape : {0.5, 1.0, 2.5, 7.0}) {
        Rng rng(static_cast<std::uint64_t>(shape * 100) + 1);
        const int n = 200000;
        double sum = 0.0, sum2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const double g = rng.gamma(shape);
            REQUIRE(g > 0.0);
            sum += g;
            sum2 += g * g;
        }
        const double mean = sum / n;
        const double var = sum2 / n - mean * mean;
        CHECK(std::abs(mean - shape) < 0.05 * std::max(1.0, shape));
        CHECK(std::abs(var - shape) < 0.1 * std::max(1.0, shape));
    }
    Rng rng(1);
    CHECK_THROWS_AS(rng.gamma(0.0), PreconditionError);
}

TEST_CASE("bernoulli matches its probability") {
    Rng rng(77);
    const int n = 100000;
    int hits = 0;
    for (int i = 0; i < n; ++i) hits += rng.bernoulli(0.3) ? 1 : 0;
    CHECK(std::abs(hits / static_cast<double>(n) - 0.3) < 0.01);
    CHECK_FALSE(rng.bernoulli(0.0));
    CHECK(rng.bernoulli(1.0));
}

TEST_CASE("shuffle permutes and is seed-deterministic") {
    std::vector<int> v(50);
    std::iota(v.begin(), v.end(), 0);
    std::vector<int> w = v;
    Rng a(8), b(8);
    a.shuffle(v);
    b.shuffle(w);
    CHECK(v == w);
    std::set<int> seen(v.begin(), v.end());
    CHECK(seen.size() == 50);
    std::vector<int> sorted_v = v;
    std::sort(sorted_v.begin(), sorted_v.end());
    std::vector<int> expect(50);
    std::iota(expect.begin(), expect.end(), 0);
    CHECK(sorted_v == expect);
    Rng c(9);
    std::vector<int> u(50);
    std::iota(u.begin(), u.end(), 0);
    c.shuffle(u);
    CHECK(u != v);
}
