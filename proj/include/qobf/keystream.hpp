#pragma once

#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

namespace qobf {

// splitmix64; tiny, portable, and reproducible across languages, which is
// what a keystream needs more than cryptographic strength.
struct SplitMix64 {
    std::uint64_t state = 0;

    explicit SplitMix64(std::uint64_t seed = 0) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1) with 53 random bits
    double next_unit() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // uniform in [0, bound) without modulo bias
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t limit = bound * (UINT64_MAX / bound);
        for (;;) {
            std::uint64_t v = next();
            if (v < limit) return v % bound;
        }
    }
};

enum class Quantization : std::uint8_t { eighth_turns, continuous };

inline const char* quantization_name(Quantization q) {
    return q == Quantization::eighth_turns ? "eighth_turns" : "continuous";
}

struct KeySpec {
    std::uint64_t seed = 0;
    Quantization quantization = Quantization::eighth_turns;
    int dummy_layer_count = 0;
    std::uint64_t dummy_position_seed = 0;
};

using KeyStream = std::vector<double>;

// Element k of the stream depends only on (seed, quantization, k):
// eighth_turns takes the low 3 bits of splitmix64 output k as a multiple of
// pi/4; continuous maps the output to [0, 2*pi).
inline KeyStream derive_keystream(const KeySpec& key, std::size_t count) {
    KeyStream out;
    out.reserve(count);
    SplitMix64 rng(key.seed);
    for (std::size_t k = 0; k < count; ++k) {
        std::uint64_t raw = rng.next();
        if (key.quantization == Quantization::eighth_turns)
            out.push_back(static_cast<double>(raw & 7) *
                          (std::numbers::pi / 4));
        else
            out.push_back(static_cast<double>(raw >> 11) * 0x1.0p-53 * 2 *
                          std::numbers::pi);
    }
    return out;
}

// FNV-1a over every KeySpec field except the seed. The record carries this
// so a mismatched configuration is caught up front while the seed itself
// stays unverifiable by design.
inline std::uint64_t key_fingerprint(const KeySpec& key) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xff;
            h *= 0x100000001b3ULL;
        }
    };
    mix(1);  // fingerprint format version
    mix(static_cast<std::uint64_t>(key.quantization));
    mix(static_cast<std::uint64_t>(key.dummy_layer_count));
    mix(key.dummy_position_seed);
    return h;
}

inline std::string to_hex(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[i] = digits[v & 0xf];
        v >>= 4;
    }
    return s;
}

inline bool parse_hex_u64(const std::string& s, std::uint64_t& out) {
    if (s.empty() || s.size() > 16) return false;
    out = 0;
    for (char c : s) {
        int d;
        if (c >= '0' && c <= '9') d = c - '0';
        else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
        else if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
        else return false;
        out = (out << 4) | static_cast<std::uint64_t>(d);
    }
    return true;
}

}  // namespace qobf
