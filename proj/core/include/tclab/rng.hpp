#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace tclab {

// Philox4x64-10 counter-based generator. Each (key, stream) pair is an
// independent stream: the 128-bit key holds (master seed, stream id), the
// 256-bit counter advances one block per four outputs. Streams keyed by
// path index make ensemble output independent of worker scheduling.
class Philox4x64 {
public:
    using u64 = std::uint64_t;

    Philox4x64(u64 seed, u64 stream) : key_{seed, stream}, counter_{0, 0, 0, 0} {}

    static std::array<u64, 4> block(std::array<u64, 4> ctr, std::array<u64, 2> key) {
        constexpr u64 kM0 = 0xD2E7470EE14C6C93ULL;
        constexpr u64 kM1 = 0xCA5A826395121157ULL;
        constexpr u64 kW0 = 0x9E3779B97F4A7C15ULL;
        constexpr u64 kW1 = 0xBB67AE8584CAA73BULL;
        for (int round = 0; round < 10; ++round) {
            u64 hi0, lo0, hi1, lo1;
            mulhilo(kM0, ctr[0], hi0, lo0);
            mulhilo(kM1, ctr[2], hi1, lo1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
            key[0] += kW0;
            key[1] += kW1;
        }
        return ctr;
    }

    u64 next_u64() {
        if (index_ == 4) {
            buffer_ = block(counter_, key_);
            advance_counter();
            index_ = 0;
        }
        return buffer_[index_++];
    }

private:
    static void mulhilo(u64 a, u64 b, u64& hi, u64& lo) {
        unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
        hi = static_cast<u64>(p >> 64);
        lo = static_cast<u64>(p);
    }

    void advance_counter() {
        for (auto& word : counter_) {
            if (++word != 0) break;
        }
    }

    std::array<u64, 2> key_;
    std::array<u64, 4> counter_;
    std::array<u64, 4> buffer_{};
    int index_ = 4;
};

// Distribution layer over Philox. All draws are explicit arithmetic on the
// raw stream (no std::<random> distributions) so sequences are identical
// across standard library implementations.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) : gen_(seed, stream) {}

    std::uint64_t next_u64() { return gen_.next_u64(); }

    // Uniform on [0, 1), 53-bit resolution.
    double next_double() {
        return static_cast<double>(gen_.next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform on (0, 1]; safe as a log argument.
    double next_double_open() { return 1.0 - next_double(); }

    double next_exponential(double rate) {
        return -std::log(next_double_open()) / rate;
    }

    // Box-Muller pair; the spare is cached.
    double next_gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = next_double_open();
        const double u2 = next_double();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * 3.14159265358979323846 * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    Philox4x64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace tclab
