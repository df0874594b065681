#pragma once

#include <cstdint>
#include <vector>

namespace tariffgrid {

// splitmix64; small, portable, and stable across platforms so seeded runs
// reproduce byte-identically everywhere.
class Rng {
  public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    int uniform_int(int lo, int hi) {  // inclusive bounds
        return lo + static_cast<int>(next_u64() % static_cast<uint64_t>(hi - lo + 1));
    }

    // first k of a seeded Fisher-Yates shuffle of 0..n-1
    std::vector<int> sample(int n, int k) {
        std::vector<int> idx(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) idx[static_cast<size_t>(i)] = i;
        for (int i = 0; i < k && i < n; ++i) {
            const int j = uniform_int(i, n - 1);
            std::swap(idx[static_cast<size_t>(i)], idx[static_cast<size_t>(j)]);
        }
        idx.resize(static_cast<size_t>(k < n ? k : n));
        return idx;
    }

    Rng fork(uint64_t stream) { return Rng(next_u64() ^ (0x632be59bd9b4e019ULL * (stream + 1))); }

  private:
    uint64_t state_;
};

} // namespace tariffgrid
