#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace qgt {

// One step of the splitmix64 generator. Used only to derive seeds.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Hash-derives an independent seed for (master, stream, index). Any trial
// is reproducible in isolation: its seed does not depend on how many
// trials ran before it or in what order.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                 std::uint64_t index) {
    std::uint64_t s = master;
    std::uint64_t a = splitmix64_next(s);
    s ^= stream * 0x9e3779b97f4a7c15ULL;
    std::uint64_t b = splitmix64_next(s);
    s ^= index * 0xd1b54a32d192ed03ULL;
    std::uint64_t c = splitmix64_next(s);
    return a ^ (b + 0x165667b19e3779f9ULL) ^ (c << 1);
}

// Seed streams used by the simulator. Values are arbitrary distinct tags.
inline constexpr std::uint64_t stream_graph = 0x6772617068ULL;
inline constexpr std::uint64_t stream_population = 0x706f70ULL;

// All randomness in the toolkit flows through this wrapper. mt19937_64
// and the helpers below are fully specified by the standard, so runs are
// reproducible across platforms and library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return uniform() < p; }

    // Uniform integer in [0, n) by rejection, avoiding modulo bias and the
    // implementation-defined std::uniform_int_distribution.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = gen_();
        } while (v >= limit);
        return v % n;
    }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 gen_;
};

} // namespace qgt
