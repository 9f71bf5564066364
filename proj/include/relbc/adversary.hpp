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

#ifndef RELBC_ADVERSARY_HPP
#define RELBC_ADVERSARY_HPP

// Alice's commitment strategies and Bob's pre-unveiling information.

#include <array>
#include <cmath>
#include <memory>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "relbc/projectors.hpp"
#include "relbc/quantum.hpp"
#include "relbc/spectral.hpp"

namespace relbc {

// ─── Cheating states ─────────────────────────────────────────────────────────

struct CheatState {
    StateVector state;
    double value = 0;      // λ_max(P_0 + P_1)
    int multiplicity = 0;  // dimension of the top eigenspace
    bool degenerate() const {
        return multiplicity > 1;
    }
};

/// Top eigenvector of P_0 + P_1 over protocol_labels(n). When the top eigenspace
/// is degenerate an arbitrary member is returned and `multiplicity` says so.
inline CheatState optimal_cheat_state(int n) {
    if (n < 1 || n > 4) {
        throw std::out_of_range("optimal_cheat_state: N must lie in [1, 4]");
    }
    const Labels labels = protocol_labels(n);
    const HermitianOperator sum = (build_test_projector(0, n) + build_test_projector(1, n)).embedded(labels);
    TopEigenpair top = top_eigenpair(sum.matrix());
    top.vector /= top.vector.norm();
    return {StateVector(labels, top.vector), top.value, top.multiplicity};
}

/// α|0⟩ + β|1⟩ copied into CONTROL:0 and CONTROL:1, 2N singlets, then for every j
/// a swap of W0P:j and W1P:j controlled on CONTROL:0. Handing over the W0P slot
/// commits coherently: the |0⟩ branch hands W_0P, the |1⟩ branch W_1P. Uses
/// 4N + 2 qubits, so N ≤ 3.
inline StateVector superposition_commit_state(int n, cplx alpha, cplx beta) {
    if (std::abs(std::norm(alpha) + std::norm(beta) - 1) > kStateTolerance) {
        throw std::invalid_argument("superposition_commit_state: |alpha|^2 + |beta|^2 must equal 1");
    }
    if (n < 1 || 4 * n + 2 > kMaxQubits) {
        throw std::out_of_range("superposition_commit_state: N must lie in [1, 3]");
    }
    std::vector<std::pair<QubitLabel, QubitLabel>> pairs;
    for (int j = 1; j <= n; ++j) {
        pairs.push_back({{Register::W0P, j}, {Register::W0Q, j}});
        pairs.push_back({{Register::W1P, j}, {Register::W1Q, j}});
    }
    CVector control = CVector::Zero(4);
    control[0] = alpha;
    control[3] = beta;
    StateVector state = StateVector({{Register::CONTROL, 0}, {Register::CONTROL, 1}}, control)
                            .tensor(prepare_singlets(pairs));
    CMatrix cswap = CMatrix::Identity(8, 8);
    cswap(5, 5) = cswap(6, 6) = 0;
    cswap(5, 6) = cswap(6, 5) = 1;
    for (int j = 1; j <= n; ++j) {
        const std::array<QubitLabel, 3> targets{QubitLabel{Register::CONTROL, 0}, QubitLabel{Register::W0P, j},
                                                QubitLabel{Register::W1P, j}};
        state.apply(targets, cswap);
    }
    return state;
}

/// ⟨P_0⟩ and ⟨P_1⟩ on a state holding H1 = W1Q, H2 = W0P and H0 = W0Q for j = 1..n.
inline std::array<double, 2> test_expectations(const StateVector &state, int n) {
    return {expectation(state, build_test_projector(0, n)), expectation(state, build_test_projector(1, n))};
}

// ─── Strategies ──────────────────────────────────────────────────────────────

enum class StrategyKind : std::uint8_t { Honest, Superposition, OptimalCheat, Custom };

inline const char *to_string(StrategyKind k) {
    switch (k) {
        case StrategyKind::Honest:
            return "HONEST";
        case StrategyKind::Superposition:
            return "SUPERPOSITION";
        case StrategyKind::OptimalCheat:
            return "OPTIMAL_CHEAT";
        case StrategyKind::Custom:
            return "CUSTOM";
    }
    return "?";
}

/// How Alice commits, and which bit (if any) her agents unveil.
///
/// Non-honest kinds carry their joint state, prepared once and shared between runs.
/// For OPTIMAL_CHEAT and CUSTOM the state must contain protocol_labels(N); A_c
/// hands over the W0P slot and keeps any other label as an ancilla.
struct AliceStrategy {
    StrategyKind kind = StrategyKind::Honest;
    int bit = 0;    // HONEST
    cplx alpha = 1;  // SUPERPOSITION
    cplx beta = 0;
    int unveil = 0;  // 0, 1, or -1 for ABSTAIN
    std::shared_ptr<const StateVector> state;

    static AliceStrategy honest(int bit, int unveil) {
        AliceStrategy s;
        s.bit = bit;
        s.unveil = unveil;
        s.check_unveil();
        if (bit != 0 && bit != 1) {
            throw std::invalid_argument("strategy.bit must be 0 or 1");
        }
        return s;
    }

    static AliceStrategy superposition(int n, cplx alpha, cplx beta, int unveil) {
        AliceStrategy s;
        s.kind = StrategyKind::Superposition;
        s.alpha = alpha;
        s.beta = beta;
        s.unveil = unveil;
        s.check_unveil();
        s.state = std::make_shared<const StateVector>(superposition_commit_state(n, alpha, beta));
        return s;
    }

    static AliceStrategy optimal_cheat(int n, int unveil) {
        AliceStrategy s;
        s.kind = StrategyKind::OptimalCheat;
        s.unveil = unveil;
        s.check_unveil();
        s.state = std::make_shared<const StateVector>(optimal_cheat_state(n).state);
        return s;
    }

    static AliceStrategy custom(int n, StateVector state, int unveil) {
        for (const QubitLabel &l : protocol_labels(n)) {
            if (!state.contains(l)) {
                throw std::invalid_argument("CUSTOM state lacks protocol qubit " + l.str());
            }
        }
        AliceStrategy s;
        s.kind = StrategyKind::Custom;
        s.unveil = unveil;
        s.check_unveil();
        s.state = std::make_shared<const StateVector>(std::move(state));
        return s;
    }

    AliceStrategy with_unveil(int target) const {
        AliceStrategy s = *this;
        s.unveil = target;
        s.check_unveil();
        return s;
    }

    std::string describe() const {
        switch (kind) {
            case StrategyKind::Honest:
                return "HONEST(" + std::to_string(bit) + ")";
            case StrategyKind::Superposition:
                return "SUPERPOSITION(" + fmt12(alpha.real()) + (alpha.imag() ? "+" + fmt12(alpha.imag()) + "i" : "") +
                       "," + fmt12(beta.real()) + (beta.imag() ? "+" + fmt12(beta.imag()) + "i" : "") + ")";
            default:
                return to_string(kind);
        }
    }

   private:
    void check_unveil() const {
        if (unveil < -1 || unveil > 1) {
            throw std::invalid_argument("unveil target must be 0, 1 or -1 (abstain)");
        }
    }
};

// ─── Preparation drift ───────────────────────────────────────────────────────

enum class Labeling : std::uint8_t { Sequential, OddEvenInterleave, RandomBatchSwap };

inline const char *to_string(Labeling l) {
    switch (l) {
        case Labeling::Sequential:
            return "SEQUENTIAL";
        case Labeling::OddEvenInterleave:
            return "ODD_EVEN_INTERLEAVE";
        case Labeling::RandomBatchSwap:
            return "RANDOM_BATCH_SWAP";
    }
    return "?";
}

/// Predictable preparation error. The singlet prepared in slot k (k = 1..2N) is
/// cos(π/4 + θ/2)|01⟩ − sin(π/4 + θ/2)|10⟩ with θ = rate·k, so its first half has
/// Bloch z-component sin θ. RANDOM_BATCH_SWAP uses sequential batches and exchanges
/// them when the secret bit is 1; `swap_bit` fixes that bit, −1 draws it.
struct DriftModel {
    double rate = 0;
    Labeling labeling = Labeling::Sequential;
    int swap_bit = -1;

    void validate() const {
        if (!(rate >= 0) || !std::isfinite(rate)) {
            throw std::invalid_argument("drift.rate must be finite and nonnegative");
        }
    }
};

/// Preparation slot (1..2N) of each singlet (W_rP:j, W_rQ:j).
struct BatchAssignment {
    int n = 0;
    int swap_bit = 0;
    std::array<std::vector<int>, 2> slot;  // slot[r][j - 1]

    int slot_of(int reg, int j) const {
        return slot[static_cast<std::size_t>(reg)][static_cast<std::size_t>(j - 1)];
    }
};

/// RANDOM_BATCH_SWAP without a fixed bit draws exactly one random bit; other modes draw nothing.
inline BatchAssignment label_batches(const DriftModel &drift, int n, Rng *rng = nullptr) {
    if (n < 1) {
        throw std::invalid_argument("label_batches: N must be at least 1");
    }
    BatchAssignment a;
    a.n = n;
    for (int j = 1; j <= n; ++j) {
        if (drift.labeling == Labeling::OddEvenInterleave) {
            a.slot[0].push_back(2 * j - 1);
            a.slot[1].push_back(2 * j);
        } else {
            a.slot[0].push_back(j);
            a.slot[1].push_back(n + j);
        }
    }
    if (drift.labeling == Labeling::RandomBatchSwap) {
        if (drift.swap_bit >= 0) {
            a.swap_bit = drift.swap_bit;
        } else if (rng) {
            a.swap_bit = rng->bit() ? 1 : 0;
        } else {
            throw std::invalid_argument("label_batches: RANDOM_BATCH_SWAP needs a bit or an rng");
        }
        if (a.swap_bit) {
            std::swap(a.slot[0], a.slot[1]);
        }
    }
    return a;
}

inline CVector drifted_singlet_amplitudes(double theta) {
    if (theta == 0) {
        return singlet_amplitudes();
    }
    const double phi = std::numbers::pi / 4 + theta / 2;
    CVector v = CVector::Zero(4);
    v[1] = std::cos(phi);
    v[2] = -std::sin(phi);
    return v;
}

inline double drift_angle(const DriftModel &drift, int slot) {
    return drift.rate * slot;
}

/// B_c's state (over W_bP:1..N) after an honest commitment to `bit` under a fixed labeling.
inline DensityMatrix bc_reduced_state(int n, int bit, const DriftModel &drift, int swap_bit = 0) {
    DriftModel fixed = drift;
    fixed.swap_bit = swap_bit;
    const BatchAssignment a = label_batches(fixed, n);
    std::optional<DensityMatrix> out;
    for (int j = 1; j <= n; ++j) {
        const QubitLabel p{register_p(bit), j};
        const QubitLabel q{register_q(bit), j};
        const StateVector pair({p, q}, drifted_singlet_amplitudes(drift_angle(drift, a.slot_of(bit, j))));
        DensityMatrix part = reduced_density(pair, {p});
        out = out ? out->tensor(part) : std::move(part);
    }
    return *out;
}

/// Helstrom advantage (probability of a correct guess minus 1/2) for telling ρ_0 from ρ_1.
inline double helstrom_advantage(const DensityMatrix &rho0, const DensityMatrix &rho1) {
    return trace_distance(rho0, rho1) / 2;
}

/// Best advantage B_c has in guessing the committed bit before unveiling. The
/// two hypotheses are compared by index j, so each ρ_b is expressed on neutral
/// labels first. Under RANDOM_BATCH_SWAP Bob does not know the secret bit, so
/// each ρ_b is the even mixture over it.
inline double bob_early_guess_advantage(int n, const DriftModel &drift) {
    drift.validate();
    if (n < 1 || n > kMaxQubits) {
        throw std::out_of_range("bob_early_guess_advantage: N out of range");
    }
    Labels neutral;
    for (int j = 1; j <= n; ++j) {
        neutral.push_back({Register::W0P, j});
    }
    auto state_for = [&](int bit) {
        auto relabel = [&](const DensityMatrix &d) { return DensityMatrix(neutral, d.matrix()); };
        if (drift.labeling != Labeling::RandomBatchSwap) {
            return relabel(bc_reduced_state(n, bit, drift));
        }
        return relabel(bc_reduced_state(n, bit, drift, 0)).mixed_with(relabel(bc_reduced_state(n, bit, drift, 1)), 0.5);
    };
    return helstrom_advantage(state_for(0), state_for(1));
}

}  // namespace relbc

#endif  // RELBC_ADVERSARY_HPP
