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

#ifndef RELBC_NOISE_HPP
#define RELBC_NOISE_HPP

// Independent per-singlet depolarizing noise and Bernoulli loss, and the exact
// acceptance probability of thresholded verification.

#include <array>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "relbc/exact.hpp"
#include "relbc/netsim.hpp"
#include "relbc/quantum.hpp"

namespace relbc {

enum class LossPolicy : std::uint8_t { CountAsFail };

inline const char *to_string(LossPolicy) {
    return "COUNT_AS_FAIL";
}

struct NoiseParams {
    double depolarizing_q = 0;
    double loss_l = 0;
    LossPolicy loss_policy = LossPolicy::CountAsFail;

    void validate() const {
        if (!(depolarizing_q >= 0 && depolarizing_q <= 1)) {
            throw std::invalid_argument("noise.q must lie in [0, 1]");
        }
        if (!(loss_l >= 0 && loss_l <= 1)) {
            throw std::invalid_argument("noise.l must lie in [0, 1]");
        }
    }
};

/// Trajectory sample of the depolarizing channel on the second qubit of `pair`:
/// with probability q a uniformly random Pauli (I, X, Y or Z) is applied.
/// Returns the Pauli index, 0 when nothing was applied. No draws are made when q = 0.
template <typename State>
int depolarize(State &state, const std::pair<QubitLabel, QubitLabel> &pair, double q, Rng &rng) {
    if (!(q >= 0 && q <= 1)) {
        throw std::invalid_argument("depolarize: q must lie in [0, 1]");
    }
    if (q == 0 || !rng.bernoulli(q)) {
        return 0;
    }
    const int k = static_cast<int>(rng.below(4));
    if (k != 0) {
        const std::array<QubitLabel, 1> target{pair.second};
        state.apply(target, pauli(k));
    }
    return k;
}

inline StateVector apply_depolarizing(StateVector state, const std::pair<QubitLabel, QubitLabel> &pair, double q,
                                      Rng &rng) {
    depolarize(state, pair, q, rng);
    return state;
}

/// Probability that a singlet passes the Ψ− test after the channel: 1 − 3q/4.
inline double singlet_pass_probability(double q) {
    return 1 - 0.75 * q;
}

enum class LossOutcome : std::uint8_t { Held, Lost };

/// Bernoulli loss of a stored or transported qubit. No draw is made when l = 0.
inline LossOutcome apply_loss(const CustodyRecord &, double l, Rng &rng) {
    if (!(l >= 0 && l <= 1)) {
        throw std::invalid_argument("apply_loss: l must lie in [0, 1]");
    }
    if (l == 0) {
        return LossOutcome::Held;
    }
    return rng.bernoulli(l) ? LossOutcome::Lost : LossOutcome::Held;
}

/// Pass probability of one honest test: the pair survives and reads Ψ−.
inline double per_test_pass_probability(const NoiseParams &noise) {
    return (1 - noise.loss_l) * singlet_pass_probability(noise.depolarizing_q);
}

/// Pass probability of one test on halves of two different singlets.
inline double mismatched_pass_probability(const NoiseParams &noise) {
    return (1 - noise.loss_l) * 0.25;
}

/// Smallest number of Ψ− outcomes accepted among `tested` pairs: ⌈(1−ε)·tested⌉.
/// The 1e-9 guard keeps products such as 0.95·100 from rounding up to 96.
inline int acceptance_threshold(int tested, double epsilon) {
    if (!(epsilon >= 0 && epsilon < 1)) {
        throw std::invalid_argument("acceptance_threshold: epsilon must lie in [0, 1)");
    }
    return static_cast<int>(std::ceil((1 - epsilon) * tested - 1e-9));
}

inline Rational honest_acceptance_prob_exact(int n, double per_test_pass, double epsilon) {
    return binomial_upper_tail(n, per_test_pass, acceptance_threshold(n, epsilon));
}

/// Σ_{k ≥ ⌈(1−ε)N⌉} C(N,k) p^k (1−p)^(N−k), summed exactly.
inline double honest_acceptance_prob(int n, double per_test_pass, double epsilon) {
    return to_double(honest_acceptance_prob_exact(n, per_test_pass, epsilon));
}

}  // namespace relbc

#endif  // RELBC_NOISE_HPP
