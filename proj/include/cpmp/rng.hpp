#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace cpmp {

// Seeded random stream with portable draw helpers. mt19937_64 output is
// bit-specified by the standard, and the helpers below avoid the
// implementation-defined std distributions, so a given seed produces the
// same sequence on every platform.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t raw() { return engine_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) {
        return lo + uniform01() * (hi - lo);
    }

    // Uniform integer in [0, n), unbiased via rejection. Requires n > 0.
    int uniform_int(int n) {
        const auto un = static_cast<std::uint64_t>(n);
        const std::uint64_t bound = UINT64_MAX - UINT64_MAX % un;
        std::uint64_t v = engine_();
        while (v >= bound) {
            v = engine_();
        }
        return static_cast<int>(v % un);
    }

    // k distinct values from [0, n), in draw order (partial Fisher-Yates).
    std::vector<int> sample_distinct(int n, int k) {
        std::vector<int> idx(n);
        for (int i = 0; i < n; ++i) {
            idx[i] = i;
        }
        std::vector<int> out;
        out.reserve(k);
        for (int i = 0; i < k; ++i) {
            const int j = i + uniform_int(n - i);
            std::swap(idx[i], idx[j]);
            out.push_back(idx[i]);
        }
        return out;
    }

    // Random permutation of [0, n).
    std::vector<int> permutation(int n) { return sample_distinct(n, n); }

  private:
    std::mt19937_64 engine_;
};

}  // namespace cpmp
