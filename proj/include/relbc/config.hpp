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

#ifndef RELBC_CONFIG_HPP
#define RELBC_CONFIG_HPP

// Flat `key = value` configuration with dotted section keys.
//
//   # comment
//   protocol.variant = ETBC
//   protocol.N = 3
//   geometry.P = 0 0 0 0
//   sweep.N = 1 2 3
//
// Lists and events are whitespace separated. Complex amplitudes are "re" or
// "re im". serialize_config writes every key in a fixed order with shortest
// round-trip numbers, so serialize(parse(serialize(c))) == serialize(c).

#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "relbc/adversary.hpp"
#include "relbc/common.hpp"
#include "relbc/noise.hpp"
#include "relbc/protocol.hpp"

namespace relbc {

struct BoundsSpec {
    std::vector<int> n{1, 2, 3, 4};
    std::vector<double> delta{0};
    std::vector<int> tail_n{6, 8, 10, 12};

    bool operator==(const BoundsSpec &) const = default;
};

/// Grid axes; an empty axis keeps the base configuration's value.
struct SweepSpec {
    std::vector<int> n;
    std::vector<double> epsilon;
    std::vector<double> q;
    std::vector<double> l;
    std::vector<double> drift_rate;
    std::vector<double> alpha;

    bool empty() const {
        return n.empty() && epsilon.empty() && q.empty() && l.empty() && drift_rate.empty() && alpha.empty();
    }
    bool operator==(const SweepSpec &) const = default;
};

enum class UnveilMode : std::uint8_t { Bit0, Bit1, Both, Abstain };

inline const char *to_string(UnveilMode m) {
    switch (m) {
        case UnveilMode::Bit0:
            return "0";
        case UnveilMode::Bit1:
            return "1";
        case UnveilMode::Both:
            return "both";
        case UnveilMode::Abstain:
            return "abstain";
    }
    return "?";
}

/// Unveil target of repetition `rep`: "both" alternates 0, 1, 0, ...
inline int unveil_target(UnveilMode m, std::uint64_t rep) {
    switch (m) {
        case UnveilMode::Bit0:
            return 0;
        case UnveilMode::Bit1:
            return 1;
        case UnveilMode::Both:
            return static_cast<int>(rep % 2);
        case UnveilMode::Abstain:
            return -1;
    }
    return -1;
}

struct StrategySpec {
    StrategyKind kind = StrategyKind::Honest;
    int bit = 0;
    UnveilMode unveil = UnveilMode::Bit0;
    cplx alpha = 1;
    cplx beta = 0;
    std::vector<cplx> amplitudes;  // CUSTOM, over protocol_labels(N)

    bool operator==(const StrategySpec &) const = default;
};

struct RunConfig {
    ProtocolParams params;
    StrategySpec strategy;
    NoiseParams noise;
    int repetitions = 1;
    std::string output = "transcript.jsonl";
    BoundsSpec bounds;
    SweepSpec sweep;

    void validate() const {
        try {
            params.validate();
            noise.validate();
        } catch (const std::invalid_argument &e) {
            throw ConfigError("", 0, e.what());
        }
        if (repetitions < 1) {
            throw ConfigError("run.repetitions", 0, "must be at least 1");
        }
        if (strategy.kind == StrategyKind::Superposition &&
            std::abs(std::norm(strategy.alpha) + std::norm(strategy.beta) - 1) > kStateTolerance) {
            throw ConfigError("strategy.alpha", 0, "|alpha|^2 + |beta|^2 must equal 1");
        }
        if (strategy.kind == StrategyKind::Custom &&
            strategy.amplitudes.size() != (std::size_t{1} << (3 * params.n))) {
            throw ConfigError("strategy.amplitudes", 0, "CUSTOM needs 8^N complex amplitudes");
        }
    }
};

/// Strategy for one repetition's unveil target.
inline AliceStrategy make_strategy(const StrategySpec &spec, int n, int target) {
    switch (spec.kind) {
        case StrategyKind::Honest:
            return AliceStrategy::honest(spec.bit, target);
        case StrategyKind::Superposition:
            return AliceStrategy::superposition(n, spec.alpha, spec.beta, target);
        case StrategyKind::OptimalCheat:
            return AliceStrategy::optimal_cheat(n, target);
        case StrategyKind::Custom: {
            CVector amps(static_cast<Eigen::Index>(spec.amplitudes.size()));
            for (std::size_t i = 0; i < spec.amplitudes.size(); ++i) {
                amps[static_cast<Eigen::Index>(i)] = spec.amplitudes[i];
            }
            return AliceStrategy::custom(n, StateVector(protocol_labels(n), amps), target);
        }
    }
    throw std::invalid_argument("make_strategy: unknown kind");
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> words(std::string_view s) {
    std::vector<std::string> out;
    std::istringstream in{std::string(s)};
    std::string w;
    while (in >> w) {
        out.push_back(w);
    }
    return out;
}

inline std::string fmt_real(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

class ValueParser {
   public:
    ValueParser(std::string key, int line) : key_(std::move(key)), line_(line) {
    }

    [[noreturn]] void fail(const std::string &what) const {
        throw ConfigError(key_, line_, what);
    }

    double real(const std::string &w) const {
        double v = 0;
        const auto r = std::from_chars(w.data(), w.data() + w.size(), v);
        if (r.ec != std::errc() || r.ptr != w.data() + w.size() || !std::isfinite(v)) {
            fail("expected a real number, got '" + w + "'");
        }
        return v;
    }

    long long integer(const std::string &w) const {
        long long v = 0;
        const auto r = std::from_chars(w.data(), w.data() + w.size(), v);
        if (r.ec != std::errc() || r.ptr != w.data() + w.size()) {
            fail("expected an integer, got '" + w + "'");
        }
        return v;
    }

    std::string single(std::string_view value) const {
        const auto w = words(value);
        if (w.size() != 1) {
            fail("expected a single value");
        }
        return w[0];
    }

    double real_value(std::string_view value) const {
        return real(single(value));
    }

    int int_value(std::string_view value) const {
        const long long v = integer(single(value));
        if (v < INT32_MIN || v > INT32_MAX) {
            fail("integer out of range");
        }
        return static_cast<int>(v);
    }

    std::uint64_t u64_value(std::string_view value) const {
        const std::string w = single(value);
        std::uint64_t v = 0;
        const auto r = std::from_chars(w.data(), w.data() + w.size(), v);
        if (r.ec != std::errc() || r.ptr != w.data() + w.size()) {
            fail("expected an unsigned 64-bit integer, got '" + w + "'");
        }
        return v;
    }

    std::vector<double> reals(std::string_view value) const {
        std::vector<double> out;
        for (const auto &w : words(value)) {
            out.push_back(real(w));
        }
        return out;
    }

    std::vector<int> ints(std::string_view value) const {
        std::vector<int> out;
        for (const auto &w : words(value)) {
            out.push_back(static_cast<int>(integer(w)));
        }
        return out;
    }

    Event event(std::string_view value) const {
        const auto v = reals(value);
        if (v.size() != 4) {
            fail("expected four coordinates t x y z, got " + std::to_string(v.size()));
        }
        return {v[0], v[1], v[2], v[3]};
    }

    cplx complex(std::string_view value) const {
        const auto v = reals(value);
        if (v.empty() || v.size() > 2) {
            fail("expected 're' or 're im'");
        }
        return {v[0], v.size() == 2 ? v[1] : 0.0};
    }

    template <typename E, std::size_t K>
    E choice(std::string_view value, const std::array<E, K> &options) const {
        const std::string w = single(value);
        std::string allowed;
        for (E e : options) {
            if (w == to_string(e)) {
                return e;
            }
            allowed += (allowed.empty() ? "" : ", ") + std::string(to_string(e));
        }
        fail("unknown value '" + w + "' (expected one of " + allowed + ")");
    }

   private:
    std::string key_;
    int line_;
};

inline std::string list_text(const std::vector<double> &v) {
    std::string out;
    for (double x : v) {
        out += (out.empty() ? "" : " ") + fmt_real(x);
    }
    return out;
}

inline std::string list_text(const std::vector<int> &v) {
    std::string out;
    for (int x : v) {
        out += (out.empty() ? "" : " ") + std::to_string(x);
    }
    return out;
}

inline std::string event_text(const Event &e) {
    return list_text(std::vector<double>{e.t, e.x, e.y, e.z});
}

inline std::string complex_text(cplx c) {
    return c.imag() == 0 ? fmt_real(c.real()) : fmt_real(c.real()) + " " + fmt_real(c.imag());
}

}  // namespace detail

inline RunConfig parse_config(std::string_view text) {
    RunConfig cfg;
    std::set<std::string> seen;
    Event p = cfg.params.geometry.commit_point;
    Event q0 = cfg.params.geometry.unveil_point(0);
    Event q1 = cfg.params.geometry.unveil_point(1);
    bool sender_given = false;
    int line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = detail::trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("", line_no, "expected 'key = value'");
        }
        const std::string key(detail::trim(line.substr(0, eq)));
        const std::string_view value = detail::trim(line.substr(eq + 1));
        if (!seen.insert(key).second) {
            throw ConfigError(key, line_no, "duplicate key");
        }
        const detail::ValueParser v(key, line_no);
        if (key == "protocol.variant") {
            cfg.params.variant = v.choice(value, std::array{Variant::ETBC, Variant::ETRBC});
        } else if (key == "protocol.N") {
            cfg.params.n = v.int_value(value);
        } else if (key == "protocol.epsilon") {
            cfg.params.epsilon = v.real_value(value);
        } else if (key == "protocol.verify_policy") {
            cfg.params.verify_policy =
                v.choice(value, std::array{VerifyPolicy::AtP, VerifyPolicy::AtQb, VerifyPolicy::Midpoint});
        } else if (key == "protocol.seed") {
            cfg.params.seed = v.u64_value(value);
        } else if (key == "protocol.classical_sender") {
            cfg.params.classical_sender =
                v.choice(value, std::array{ClassicalSender::Ac, ClassicalSender::Ab, ClassicalSender::None});
            sender_given = true;
        } else if (key == "geometry.P") {
            p = v.event(value);
        } else if (key == "geometry.Q0") {
            q0 = v.event(value);
        } else if (key == "geometry.Q1") {
            q1 = v.event(value);
        } else if (key == "strategy.kind") {
            cfg.strategy.kind = v.choice(value, std::array{StrategyKind::Honest, StrategyKind::Superposition,
                                                           StrategyKind::OptimalCheat, StrategyKind::Custom});
        } else if (key == "strategy.bit") {
            cfg.strategy.bit = v.int_value(value);
            if (cfg.strategy.bit != 0 && cfg.strategy.bit != 1) {
                v.fail("must be 0 or 1");
            }
        } else if (key == "strategy.unveil") {
            cfg.strategy.unveil = v.choice(
                value, std::array{UnveilMode::Bit0, UnveilMode::Bit1, UnveilMode::Both, UnveilMode::Abstain});
        } else if (key == "strategy.alpha") {
            cfg.strategy.alpha = v.complex(value);
        } else if (key == "strategy.beta") {
            cfg.strategy.beta = v.complex(value);
        } else if (key == "strategy.amplitudes") {
            const auto r = v.reals(value);
            if (r.size() % 2 != 0) {
                v.fail("expected interleaved real and imaginary parts");
            }
            cfg.strategy.amplitudes.clear();
            for (std::size_t i = 0; i < r.size(); i += 2) {
                cfg.strategy.amplitudes.emplace_back(r[i], r[i + 1]);
            }
        } else if (key == "noise.q") {
            cfg.noise.depolarizing_q = v.real_value(value);
        } else if (key == "noise.l") {
            cfg.noise.loss_l = v.real_value(value);
        } else if (key == "noise.loss_policy") {
            cfg.noise.loss_policy = v.choice(value, std::array{LossPolicy::CountAsFail});
        } else if (key == "drift.rate") {
            cfg.params.drift.rate = v.real_value(value);
        } else if (key == "drift.labeling") {
            cfg.params.drift.labeling = v.choice(
                value, std::array{Labeling::Sequential, Labeling::OddEvenInterleave, Labeling::RandomBatchSwap});
        } else if (key == "run.repetitions") {
            cfg.repetitions = v.int_value(value);
        } else if (key == "run.output") {
            cfg.output = v.single(value);
        } else if (key == "bounds.N") {
            cfg.bounds.n = v.ints(value);
        } else if (key == "bounds.delta") {
            cfg.bounds.delta = v.reals(value);
        } else if (key == "bounds.tail_N") {
            cfg.bounds.tail_n = v.ints(value);
        } else if (key == "sweep.N") {
            cfg.sweep.n = v.ints(value);
        } else if (key == "sweep.epsilon") {
            cfg.sweep.epsilon = v.reals(value);
        } else if (key == "sweep.q") {
            cfg.sweep.q = v.reals(value);
        } else if (key == "sweep.l") {
            cfg.sweep.l = v.reals(value);
        } else if (key == "sweep.drift_rate") {
            cfg.sweep.drift_rate = v.reals(value);
        } else if (key == "sweep.alpha") {
            cfg.sweep.alpha = v.reals(value);
        } else {
            throw ConfigError(key, line_no, "unknown key");
        }
    }
    cfg.params.geometry = CommitmentGeometry(p, {q0, q1});
    if (!sender_given && cfg.params.variant == Variant::ETRBC) {
        cfg.params.classical_sender = ClassicalSender::None;
    }
    if (!cfg.params.geometry.valid()) {
        throw ConfigError("geometry", 0, "points are classified INVALID");
    }
    cfg.validate();
    return cfg;
}

inline std::string serialize_config(const RunConfig &cfg) {
    using detail::fmt_real;
    std::ostringstream o;
    const auto &p = cfg.params;
    o << "protocol.variant = " << to_string(p.variant) << "\n";
    o << "protocol.N = " << p.n << "\n";
    o << "protocol.epsilon = " << fmt_real(p.epsilon) << "\n";
    o << "protocol.verify_policy = " << to_string(p.verify_policy) << "\n";
    o << "protocol.seed = " << p.seed << "\n";
    o << "protocol.classical_sender = " << to_string(p.classical_sender) << "\n";
    o << "geometry.P = " << detail::event_text(p.geometry.commit_point) << "\n";
    o << "geometry.Q0 = " << detail::event_text(p.geometry.unveil_point(0)) << "\n";
    o << "geometry.Q1 = " << detail::event_text(p.geometry.unveil_point(1)) << "\n";
    o << "strategy.kind = " << to_string(cfg.strategy.kind) << "\n";
    o << "strategy.bit = " << cfg.strategy.bit << "\n";
    o << "strategy.unveil = " << to_string(cfg.strategy.unveil) << "\n";
    o << "strategy.alpha = " << detail::complex_text(cfg.strategy.alpha) << "\n";
    o << "strategy.beta = " << detail::complex_text(cfg.strategy.beta) << "\n";
    if (!cfg.strategy.amplitudes.empty()) {
        std::vector<double> flat;
        for (cplx c : cfg.strategy.amplitudes) {
            flat.push_back(c.real());
            flat.push_back(c.imag());
        }
        o << "strategy.amplitudes = " << detail::list_text(flat) << "\n";
    }
    o << "noise.q = " << fmt_real(cfg.noise.depolarizing_q) << "\n";
    o << "noise.l = " << fmt_real(cfg.noise.loss_l) << "\n";
    o << "noise.loss_policy = " << to_string(cfg.noise.loss_policy) << "\n";
    o << "drift.rate = " << fmt_real(p.drift.rate) << "\n";
    o << "drift.labeling = " << to_string(p.drift.labeling) << "\n";
    o << "run.repetitions = " << cfg.repetitions << "\n";
    o << "run.output = " << cfg.output << "\n";
    o << "bounds.N = " << detail::list_text(cfg.bounds.n) << "\n";
    o << "bounds.delta = " << detail::list_text(cfg.bounds.delta) << "\n";
    o << "bounds.tail_N = " << detail::list_text(cfg.bounds.tail_n) << "\n";
    const auto axis = [&](const char *key, const std::string &text) {
        if (!text.empty()) {
            o << key << " = " << text << "\n";
        }
    };
    axis("sweep.N", detail::list_text(cfg.sweep.n));
    axis("sweep.epsilon", detail::list_text(cfg.sweep.epsilon));
    axis("sweep.q", detail::list_text(cfg.sweep.q));
    axis("sweep.l", detail::list_text(cfg.sweep.l));
    axis("sweep.drift_rate", detail::list_text(cfg.sweep.drift_rate));
    axis("sweep.alpha", detail::list_text(cfg.sweep.alpha));
    return o.str();
}

}  // namespace relbc

#endif  // RELBC_CONFIG_HPP
