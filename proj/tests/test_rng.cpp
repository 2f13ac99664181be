#include <cmath>
#include <vector>

#include "doctest.h"
#include "tclab/rng.hpp"
#include "tclab/stats.hpp"

using namespace tclab;

// Known-answer blocks generated with an independent Philox4x64-10
// implementation (numpy.random.Philox raw output; numpy advances the
// counter before the first block, so its first block sits at counter 1).
TEST_CASE("philox4x64-10 known-answer blocks") {
    {
        const auto out = Philox4x64::block({1, 0, 0, 0}, {0, 0});
        CHECK(out[0] == 0x02f4ba6408e4d89bULL);
        CHECK(out[1] == 0x3dd62b0b9ca8c5b2ULL);
        CHECK(out[2] == 0x1c8667a55d902e79ULL);
        CHECK(out[3] == 0x907d7a052fd5b4dcULL);
    }
    {
        const auto out = Philox4x64::block({2, 0, 0, 0}, {0, 0});
        CHECK(out[0] == 0x809bf322883987c3ULL);
        CHECK(out[1] == 0x471128b9e807f7ddULL);
        CHECK(out[2] == 0xf250ba0dbec065b7ULL);
        CHECK(out[3] == 0xfc6ed66767a457bcULL);
    }
    {
        const auto out = Philox4x64::block({1, 0, 0, 0}, {0xdeadbeef12345678ULL, 0});
        CHECK(out[0] == 0x01e08b9944fc9ce9ULL);
        CHECK(out[1] == 0x4dd35999ef97e4c4ULL);
        CHECK(out[2] == 0xfb4385fe6262b926ULL);
        CHECK(out[3] == 0xe8ca5d2e2ace8c50ULL);
    }
    {
        const auto out = Philox4x64::block({2, 2, 3, 4}, {0x123456789abcdef0ULL, 0x0fedcba987654321ULL});
        CHECK(out[0] == 0x0dffdf2114654e9dULL);
        CHECK(out[1] == 0xa48adf13e3e71ba2ULL);
        CHECK(out[2] == 0xcd18be9ba4b17f43ULL);
        CHECK(out[3] == 0x1faabf42c99a4418ULL);
    }
    {
        const auto out = Philox4x64::block({1, 0, 0, 1000}, {42, 17});
        CHECK(out[0] == 0x6d6f7bca57703d0cULL);
        CHECK(out[1] == 0x85af6ea553cc5f0dULL);
        CHECK(out[2] == 0x5b3522ad3a5924c9ULL);
        CHECK(out[3] == 0xf3375d96207bda44ULL);
    }
}

TEST_CASE("streams are reproducible and distinct") {
    CounterRng a(123, 7), b(123, 7), c(123, 8);
    bool all_equal = true, any_equal_cross = false;
    for (int i = 0; i < 256; ++i) {
        const auto va = a.next_u64();
        const auto vb = b.next_u64();
        const auto vc = c.next_u64();
        all_equal = all_equal && (va == vb);
        any_equal_cross = any_equal_cross || (va == vc);
    }
    CHECK(all_equal);
    CHECK_FALSE(any_equal_cross);
}

TEST_CASE("uniform doubles live in [0,1) and open variant in (0,1]") {
    CounterRng rng(99);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.next_double();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.next_double_open();
        CHECK(u > 0.0);
        CHECK(u <= 1.0);
    }
}

TEST_CASE("gaussian and exponential moments") {
    CounterRng rng(2024);
    const int n = 200000;
    std::vector<double> gauss(n), expo(n);
    for (int i = 0; i < n; ++i) gauss[i] = rng.next_gaussian();
    for (int i = 0; i < n; ++i) expo[i] = rng.next_exponential(2.0);

    const auto gs = summary_stats(gauss);
    CHECK(std::fabs(gs.mean) < 4.0 / std::sqrt(double(n)));
    double var = 0.0;
    for (double g : gauss) var += g * g;
    var /= n;
    CHECK(var == doctest::Approx(1.0).epsilon(0.02));

    const auto es = summary_stats(expo);
    CHECK(es.mean == doctest::Approx(0.5).epsilon(0.02));
}
