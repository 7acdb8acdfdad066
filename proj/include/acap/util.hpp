#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace acap {

// splitmix64 step. All randomness in the library flows through this mixer;
// std:: engines and distributions are avoided because their streams are
// implementation-defined and results must reproduce bit-exactly everywhere.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Child seed for (base, index). Child streams are independent, so requesting
// more indexes later never perturbs streams already handed out.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    std::uint64_t state = base ^ (0xd1b54a32d192ed03ULL * (index + 1));
    return splitmix64_next(state);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() { return splitmix64_next(state_); }

    // Uniform in [0, 1) with 53-bit resolution.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    bool coin() { return (next_u64() & 1ULL) != 0; }

    // Uniform in [0, n); rejection keeps it unbiased.
    std::size_t bounded(std::size_t n) {
        if (n <= 1) return 0;
        const std::uint64_t span = static_cast<std::uint64_t>(n);
        const std::uint64_t limit = ~0ULL - ~0ULL % span;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return static_cast<std::size_t>(x % span);
    }

private:
    std::uint64_t state_;
};

// Fisher-Yates with our own rng; std::shuffle is not reproducible across
// standard libraries.
template <typename T>
void deterministic_shuffle(std::vector<T>& items, Rng& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        std::size_t j = rng.bounded(i);
        std::swap(items[i - 1], items[j]);
    }
}

// Mean of a nonnegative integer sum, rounded half up, in exact arithmetic:
// floor(sum/count + 1/2) = (2*sum + count) / (2*count).
inline long long round_half_up_mean(long long sum, long long count) {
    return (2 * sum + count) / (2 * count);
}

} // namespace acap
