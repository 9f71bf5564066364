// Copyright 2026 The relbc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RELBC_COMMON_HPP
#define RELBC_COMMON_HPP

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace relbc {

/// Raised when a message would travel faster than light.
class CausalityViolation : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Raised when an agent moves, measures or reads a qubit it does not hold.
/// Cloning attempts surface here: a label can only be in one place.
class CustodyViolation : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Raised for configuration text that does not parse or validate.
class ConfigError : public std::runtime_error {
   public:
    ConfigError(std::string key, int line, const std::string &what)
        : std::runtime_error(describe(key, line, what)), key_(std::move(key)), line_(line) {
    }

    const std::string &key() const noexcept {
        return key_;
    }
    int line() const noexcept {
        return line_;
    }

   private:
    static std::string describe(const std::string &key, int line, const std::string &what) {
        std::string out;
        if (line > 0) {
            out += "line " + std::to_string(line) + ": ";
        }
        if (!key.empty()) {
            out += key + ": ";
        }
        return out + what;
    }

    std::string key_;
    int line_;
};

/// Seeded pseudo-random stream.
///
/// Wraps std::mt19937_64, whose output sequence is fixed by the standard, and
/// derives doubles and bounded integers by explicit bit manipulation so that
/// results are identical across standard library implementations.
class Rng {
   public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) : engine_(seed) {
    }

    static constexpr result_type min() {
        return 0;
    }
    static constexpr result_type max() {
        return ~result_type{0};
    }
    result_type operator()() {
        ++draws_;
        return engine_();
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n). Unbiased (rejection of the short tail).
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) {
            throw std::invalid_argument("Rng::below: empty range");
        }
        const std::uint64_t threshold = (0 - n) % n;
        while (true) {
            const std::uint64_t x = (*this)();
            if (x >= threshold) {
                return x % n;
            }
        }
    }

    bool bit() {
        return ((*this)() >> 63) != 0;
    }

    bool bernoulli(double p) {
        return uniform() < p;
    }

    /// Number of raw 64-bit words consumed so far.
    std::uint64_t draws() const noexcept {
        return draws_;
    }

   private:
    std::mt19937_64 engine_;
    std::uint64_t draws_ = 0;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Counter-based stream splitting: the seed of sub-stream `counter` of `base`
/// is splitmix64(base + golden * (counter + 1)). Streams for different
/// counters are independent of the order in which they are consumed.
inline std::uint64_t stream_seed(std::uint64_t base, std::uint64_t counter) {
    return splitmix64(base + 0x9E3779B97F4A7C15ull * (counter + 1));
}

/// 64-bit FNV-1a, used for payload digests in transcripts.
inline std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

/// Round to 12 significant decimal digits. Report writers emit values through
/// this so that the shortest round-trip representation has at most 12 digits.
inline double round12(double v) {
    if (!std::isfinite(v) || v == 0.0) {
        return v;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::strtod(buf, nullptr);
}

inline std::string fmt12(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace relbc

#endif  // RELBC_COMMON_HPP
