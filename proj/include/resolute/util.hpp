#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace resolute {

// Fixed-size dynamic bitset used for states and atom masks.
// Kept deliberately small: equality, hashing and word access are the
// hot operations in search and diagnosis.
class Bitset {
public:
    Bitset() = default;
    explicit Bitset(std::size_t nbits)
        : nbits_(nbits), words_((nbits + 63) / 64, 0) {}

    std::size_t size() const { return nbits_; }

    bool test(std::size_t i) const {
        return (words_[i >> 6] >> (i & 63)) & 1u;
    }
    void set(std::size_t i, bool v) {
        uint64_t mask = uint64_t(1) << (i & 63);
        if (v) words_[i >> 6] |= mask;
        else words_[i >> 6] &= ~mask;
    }
    void reset() { std::fill(words_.begin(), words_.end(), 0); }

    bool operator==(const Bitset& o) const {
        return nbits_ == o.nbits_ && words_ == o.words_;
    }
    bool operator!=(const Bitset& o) const { return !(*this == o); }

    // 128-bit mix of the contents; collisions are negligible for the
    // visited-set sizes reached by the planner.
    std::pair<uint64_t, uint64_t> hash128() const {
        uint64_t h1 = 0x9e3779b97f4a7c15ull, h2 = 0xc2b2ae3d27d4eb4full;
        for (uint64_t w : words_) {
            h1 = mix(h1 ^ w);
            h2 = mix(h2 + w + 0x165667b19e3779f9ull);
        }
        return {h1, h2};
    }

    const std::vector<uint64_t>& words() const { return words_; }

private:
    static uint64_t mix(uint64_t x) {
        x ^= x >> 30; x *= 0xbf58476d1ce4e5b9ull;
        x ^= x >> 27; x *= 0x94d049bb133111ebull;
        x ^= x >> 31;
        return x;
    }
    std::size_t nbits_ = 0;
    std::vector<uint64_t> words_;
};

struct BitsetHash {
    std::size_t operator()(const Bitset& b) const {
        return b.hash128().first;
    }
};

inline uint64_t hash_combine(uint64_t seed, uint64_t v) {
    seed ^= v + 0x9e3779b97f4a7c15ull + (seed << 12) + (seed >> 4);
    return seed;
}

// Deterministic per-trial seed derivation.
inline uint64_t derive_seed(uint64_t master, uint64_t stream, uint64_t index) {
    uint64_t h = hash_combine(hash_combine(master, stream + 1), index + 1);
    h ^= h >> 33; h *= 0xff51afd7ed558ccdull; h ^= h >> 33;
    return h;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep);

} // namespace resolute
