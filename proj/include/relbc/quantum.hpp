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

#ifndef RELBC_QUANTUM_HPP
#define RELBC_QUANTUM_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "relbc/common.hpp"

namespace relbc {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using SparseOp = Eigen::SparseMatrix<cplx>;

/// Hard cap on the number of qubits in any dense object.
inline constexpr int kMaxQubits = 14;

/// Tolerance used for normalization, Hermiticity and idempotence checks.
inline constexpr double kStateTolerance = 1e-10;

// ─── Labels ──────────────────────────────────────────────────────────────────

/// W_{iP}, W_{iQ}: the two halves of Alice's i-th batch of singlets. CONTROL holds
/// the coherent bit (and its copies) of a superposition commitment.
enum class Register : std::uint8_t { W0P, W0Q, W1P, W1Q, CONTROL };

inline const char *to_string(Register r) {
    switch (r) {
        case Register::W0P:
            return "W0P";
        case Register::W0Q:
            return "W0Q";
        case Register::W1P:
            return "W1P";
        case Register::W1Q:
            return "W1Q";
        case Register::CONTROL:
            return "CONTROL";
    }
    return "?";
}

inline Register register_p(int bit) {
    return bit == 0 ? Register::W0P : Register::W1P;
}
inline Register register_q(int bit) {
    return bit == 0 ? Register::W0Q : Register::W1Q;
}

struct QubitLabel {
    Register reg = Register::W0P;
    int index = 1;

    auto operator<=>(const QubitLabel &) const = default;

    std::string str() const {
        return std::string(to_string(reg)) + ":" + std::to_string(index);
    }

    static QubitLabel parse(std::string_view text) {
        const auto colon = text.find(':');
        if (colon == std::string_view::npos) {
            throw std::invalid_argument("QubitLabel::parse: missing ':' in '" + std::string(text) + "'");
        }
        const std::string_view name = text.substr(0, colon);
        QubitLabel out;
        bool found = false;
        for (Register r : {Register::W0P, Register::W0Q, Register::W1P, Register::W1Q, Register::CONTROL}) {
            if (name == to_string(r)) {
                out.reg = r;
                found = true;
            }
        }
        if (!found) {
            throw std::invalid_argument("QubitLabel::parse: unknown register '" + std::string(name) + "'");
        }
        out.index = std::stoi(std::string(text.substr(colon + 1)));
        return out;
    }
};

using Labels = std::vector<QubitLabel>;

/// Position of each label in `labels`; throws if any is missing.
inline std::vector<int> positions_of(const Labels &labels, std::span<const QubitLabel> wanted) {
    std::vector<int> out;
    out.reserve(wanted.size());
    for (const QubitLabel &w : wanted) {
        auto it = std::find(labels.begin(), labels.end(), w);
        if (it == labels.end()) {
            throw std::invalid_argument("label " + w.str() + " not present");
        }
        out.push_back(static_cast<int>(it - labels.begin()));
    }
    return out;
}

inline void check_unique(const Labels &labels) {
    Labels sorted = labels;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw std::invalid_argument("duplicate qubit label");
    }
}

// Basis index convention: labels[0] is the most significant bit of the index.
inline std::uint64_t bit_of(int position, int count) {
    return std::uint64_t{1} << (count - 1 - position);
}

namespace detail {

// For each value v over `sub` (|sub| bits, sub[0] most significant), the index
// in a `count`-qubit space with those bits placed at the given positions.
inline std::vector<std::uint64_t> scatter_table(const std::vector<int> &sub, int count) {
    const std::size_t k = sub.size();
    std::vector<std::uint64_t> table(std::size_t{1} << k, 0);
    for (std::size_t v = 0; v < table.size(); ++v) {
        std::uint64_t idx = 0;
        for (std::size_t b = 0; b < k; ++b) {
            if ((v >> (k - 1 - b)) & 1u) {
                idx |= bit_of(sub[b], count);
            }
        }
        table[v] = idx;
    }
    return table;
}

inline std::vector<int> complement_positions(const std::vector<int> &taken, int count) {
    std::vector<int> rest;
    for (int p = 0; p < count; ++p) {
        if (std::find(taken.begin(), taken.end(), p) == taken.end()) {
            rest.push_back(p);
        }
    }
    return rest;
}

}  // namespace detail

// ─── State vectors ───────────────────────────────────────────────────────────

/// Pure state over an ordered list of labelled qubits.
class StateVector {
   public:
    StateVector() = default;

    StateVector(Labels labels, CVector amplitudes)
        : labels_(std::move(labels)), amplitudes_(std::move(amplitudes)) {
        if (static_cast<int>(labels_.size()) > kMaxQubits) {
            throw std::length_error("StateVector: " + std::to_string(labels_.size()) +
                                    " qubits exceeds the cap of " + std::to_string(kMaxQubits));
        }
        check_unique(labels_);
        if (amplitudes_.size() != (Eigen::Index{1} << labels_.size())) {
            throw std::invalid_argument("StateVector: amplitude count does not match labels");
        }
        if (std::abs(amplitudes_.squaredNorm() - 1.0) > kStateTolerance) {
            throw std::invalid_argument("StateVector: not normalized");
        }
    }

    const Labels &labels() const {
        return labels_;
    }
    const CVector &amplitudes() const {
        return amplitudes_;
    }
    int qubits() const {
        return static_cast<int>(labels_.size());
    }
    Eigen::Index dim() const {
        return amplitudes_.size();
    }
    bool contains(const QubitLabel &l) const {
        return std::find(labels_.begin(), labels_.end(), l) != labels_.end();
    }

    /// Tensor product; `*this` occupies the most significant qubits.
    StateVector tensor(const StateVector &other) const {
        Labels labels = labels_;
        labels.insert(labels.end(), other.labels_.begin(), other.labels_.end());
        CVector amps(amplitudes_.size() * other.amplitudes_.size());
        for (Eigen::Index i = 0; i < amplitudes_.size(); ++i) {
            amps.segment(i * other.amplitudes_.size(), other.amplitudes_.size()) =
                amplitudes_[i] * other.amplitudes_;
        }
        return StateVector(std::move(labels), std::move(amps));
    }

    /// Apply a 2^k × 2^k matrix to the listed qubits (first listed = most significant).
    void apply(std::span<const QubitLabel> targets, const CMatrix &u) {
        const std::vector<int> pos = positions_of(labels_, targets);
        const int n = qubits();
        const auto inner = detail::scatter_table(pos, n);
        const auto outer = detail::scatter_table(detail::complement_positions(pos, n), n);
        CVector local(static_cast<Eigen::Index>(inner.size()));
        for (std::uint64_t base : outer) {
            for (std::size_t v = 0; v < inner.size(); ++v) {
                local[static_cast<Eigen::Index>(v)] = amplitudes_[static_cast<Eigen::Index>(base | inner[v])];
            }
            const CVector mapped = u * local;
            for (std::size_t v = 0; v < inner.size(); ++v) {
                amplitudes_[static_cast<Eigen::Index>(base | inner[v])] = mapped[static_cast<Eigen::Index>(v)];
            }
        }
    }

    /// Multiply by an arbitrary matrix on `targets` and renormalize. Returns the
    /// squared norm before renormalization (the outcome probability for a projector).
    double project(std::span<const QubitLabel> targets, const CMatrix &projector) {
        apply(targets, projector);
        const double p = amplitudes_.squaredNorm();
        if (p <= 0) {
            throw std::domain_error("StateVector::project: zero-probability outcome");
        }
        amplitudes_ /= std::sqrt(p);
        return p;
    }

   private:
    Labels labels_;
    CVector amplitudes_;
};

/// |01⟩ − |10⟩ over √2 on (a, b) with a the more significant qubit.
inline CVector singlet_amplitudes() {
    CVector v = CVector::Zero(4);
    v[1] = 1 / std::sqrt(2.0);
    v[2] = -1 / std::sqrt(2.0);
    return v;
}

/// Tensor product of singlets on the given label pairs, pairs in order.
inline StateVector prepare_singlets(const std::vector<std::pair<QubitLabel, QubitLabel>> &pairs) {
    if (pairs.empty()) {
        throw std::invalid_argument("prepare_singlets: need at least one pair");
    }
    if (2 * static_cast<int>(pairs.size()) > kMaxQubits) {
        throw std::length_error("prepare_singlets: " + std::to_string(pairs.size()) +
                                " pairs exceed the qubit cap");
    }
    StateVector out({pairs[0].first, pairs[0].second}, singlet_amplitudes());
    for (std::size_t k = 1; k < pairs.size(); ++k) {
        out = out.tensor(StateVector({pairs[k].first, pairs[k].second}, singlet_amplitudes()));
    }
    return out;
}

/// `count` singlets with canonical labels (W0P:k, W0Q:k), k = 1..count.
inline StateVector prepare_singlets(int count) {
    if (count < 1) {
        throw std::invalid_argument("prepare_singlets: count must be at least 1");
    }
    std::vector<std::pair<QubitLabel, QubitLabel>> pairs;
    for (int k = 1; k <= count; ++k) {
        pairs.push_back({{Register::W0P, k}, {Register::W0Q, k}});
    }
    return prepare_singlets(pairs);
}

// ─── Bell basis ──────────────────────────────────────────────────────────────

enum class BellOutcome : std::uint8_t { PhiPlus, PhiMinus, PsiPlus, PsiMinus };

inline const char *to_string(BellOutcome b) {
    switch (b) {
        case BellOutcome::PhiPlus:
            return "PHI_PLUS";
        case BellOutcome::PhiMinus:
            return "PHI_MINUS";
        case BellOutcome::PsiPlus:
            return "PSI_PLUS";
        case BellOutcome::PsiMinus:
            return "PSI_MINUS";
    }
    return "?";
}

inline constexpr std::array<BellOutcome, 4> kBellOutcomes = {BellOutcome::PhiPlus, BellOutcome::PhiMinus,
                                                             BellOutcome::PsiPlus, BellOutcome::PsiMinus};

/// Bell basis ket in the computational basis |00⟩,|01⟩,|10⟩,|11⟩.
inline CVector bell_ket(BellOutcome b) {
    const double r = 1 / std::sqrt(2.0);
    CVector v = CVector::Zero(4);
    switch (b) {
        case BellOutcome::PhiPlus:
            v[0] = r, v[3] = r;
            break;
        case BellOutcome::PhiMinus:
            v[0] = r, v[3] = -r;
            break;
        case BellOutcome::PsiPlus:
            v[1] = r, v[2] = r;
            break;
        case BellOutcome::PsiMinus:
            v[1] = r, v[2] = -r;
            break;
    }
    return v;
}

/// Born probabilities of the four Bell outcomes on (a, b), in kBellOutcomes order.
inline std::array<double, 4> bell_probabilities(const StateVector &state, const QubitLabel &a,
                                                const QubitLabel &b) {
    if (a == b) {
        throw std::invalid_argument("bell_probabilities: a and b must differ");
    }
    const std::array<QubitLabel, 2> targets{a, b};
    const std::vector<int> pos = positions_of(state.labels(), targets);
    const int n = state.qubits();
    const std::uint64_t ma = bit_of(pos[0], n);
    const std::uint64_t mb = bit_of(pos[1], n);
    const auto &psi = state.amplitudes();
    std::array<double, 4> p{};
    for (std::uint64_t base = 0; base < static_cast<std::uint64_t>(psi.size()); ++base) {
        if (base & (ma | mb)) {
            continue;
        }
        const cplx x00 = psi[static_cast<Eigen::Index>(base)];
        const cplx x01 = psi[static_cast<Eigen::Index>(base | mb)];
        const cplx x10 = psi[static_cast<Eigen::Index>(base | ma)];
        const cplx x11 = psi[static_cast<Eigen::Index>(base | ma | mb)];
        p[0] += std::norm(x00 + x11) / 2;
        p[1] += std::norm(x00 - x11) / 2;
        p[2] += std::norm(x01 + x10) / 2;
        p[3] += std::norm(x01 - x10) / 2;
    }
    return p;
}

/// Projective Bell measurement on (a, b). Samples by inverse CDF over kBellOutcomes
/// order using one uniform draw, then projects and renormalizes.
inline std::pair<BellOutcome, StateVector> bell_measurement(StateVector state, const QubitLabel &a,
                                                            const QubitLabel &b, Rng &rng) {
    const auto p = bell_probabilities(state, a, b);
    const double u = rng.uniform() * (p[0] + p[1] + p[2] + p[3]);
    std::size_t k = 0;
    double acc = p[0];
    while (k < 3 && (u >= acc || p[k] <= 0)) {
        ++k;
        acc += p[k];
    }
    const CVector ket = bell_ket(kBellOutcomes[k]);
    const std::array<QubitLabel, 2> targets{a, b};
    state.project(targets, ket * ket.adjoint());
    return {kBellOutcomes[k], std::move(state)};
}

// ─── Density matrices ────────────────────────────────────────────────────────

class DensityMatrix {
   public:
    DensityMatrix() = default;
    DensityMatrix(Labels labels, CMatrix matrix) : labels_(std::move(labels)), matrix_(std::move(matrix)) {
        check_unique(labels_);
        if (matrix_.rows() != (Eigen::Index{1} << labels_.size()) || matrix_.cols() != matrix_.rows()) {
            throw std::invalid_argument("DensityMatrix: dimension does not match labels");
        }
        if ((matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() > kStateTolerance) {
            throw std::invalid_argument("DensityMatrix: not Hermitian");
        }
        if (std::abs(matrix_.trace() - cplx(1.0)) > kStateTolerance) {
            throw std::invalid_argument("DensityMatrix: trace is not 1");
        }
    }

    const Labels &labels() const {
        return labels_;
    }
    const CMatrix &matrix() const {
        return matrix_;
    }

    static DensityMatrix maximally_mixed(Labels labels) {
        const Eigen::Index d = Eigen::Index{1} << labels.size();
        return DensityMatrix(std::move(labels), CMatrix::Identity(d, d) / static_cast<double>(d));
    }

    DensityMatrix tensor(const DensityMatrix &other) const {
        Labels labels = labels_;
        labels.insert(labels.end(), other.labels_.begin(), other.labels_.end());
        const Eigen::Index d = other.matrix_.rows();
        CMatrix m(matrix_.rows() * d, matrix_.cols() * d);
        for (Eigen::Index i = 0; i < matrix_.rows(); ++i) {
            for (Eigen::Index j = 0; j < matrix_.cols(); ++j) {
                m.block(i * d, j * d, d, d) = matrix_(i, j) * other.matrix_;
            }
        }
        return DensityMatrix(std::move(labels), std::move(m));
    }

    /// Same state with qubits listed in `order` (a permutation of labels()).
    DensityMatrix reordered(const Labels &order) const {
        if (order.size() != labels_.size()) {
            throw std::invalid_argument("DensityMatrix::reordered: not a permutation");
        }
        const int n = static_cast<int>(order.size());
        const std::vector<int> pos = positions_of(labels_, order);
        const auto table = detail::scatter_table(pos, n);
        CMatrix m(matrix_.rows(), matrix_.cols());
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            for (Eigen::Index j = 0; j < m.cols(); ++j) {
                m(i, j) = matrix_(static_cast<Eigen::Index>(table[static_cast<std::size_t>(i)]),
                                  static_cast<Eigen::Index>(table[static_cast<std::size_t>(j)]));
            }
        }
        return DensityMatrix(order, std::move(m));
    }

    /// Convex combination w·this + (1−w)·other over the same labels.
    DensityMatrix mixed_with(const DensityMatrix &other, double w) const {
        const DensityMatrix o = other.reordered(labels_);
        return DensityMatrix(labels_, w * matrix_ + (1 - w) * o.matrix_);
    }

   private:
    Labels labels_;
    CMatrix matrix_;
};

/// Partial trace over every label not in `keep`; result ordered as `keep`.
inline DensityMatrix reduced_density(const StateVector &state, const Labels &keep) {
    if (keep.empty()) {
        throw std::invalid_argument("reduced_density: empty keep set");
    }
    check_unique(keep);
    const int n = state.qubits();
    const std::vector<int> pos = positions_of(state.labels(), keep);
    const auto inner = detail::scatter_table(pos, n);
    const auto outer = detail::scatter_table(detail::complement_positions(pos, n), n);
    CMatrix a(static_cast<Eigen::Index>(inner.size()), static_cast<Eigen::Index>(outer.size()));
    for (std::size_t r = 0; r < outer.size(); ++r) {
        for (std::size_t k = 0; k < inner.size(); ++k) {
            a(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(r)) =
                state.amplitudes()[static_cast<Eigen::Index>(outer[r] | inner[k])];
        }
    }
    CMatrix rho = a * a.adjoint();
    rho = (rho + rho.adjoint()) / 2.0;
    return DensityMatrix(keep, std::move(rho));
}

/// Half the trace norm of r − s.
inline double trace_distance(const DensityMatrix &r, const DensityMatrix &s) {
    if (r.matrix().rows() != s.matrix().rows()) {
        throw std::invalid_argument("trace_distance: dimension mismatch");
    }
    const DensityMatrix aligned = s.reordered(r.labels());
    const CMatrix diff = r.matrix() - aligned.matrix();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(diff, Eigen::EigenvaluesOnly);
    return std::min(1.0, es.eigenvalues().cwiseAbs().sum() / 2);
}

// ─── Operators ───────────────────────────────────────────────────────────────

/// Operator acting on `labels` and as the identity on every other qubit.
/// Stored sparse; the protocol projectors have very few nonzeros.
class HermitianOperator {
   public:
    HermitianOperator() = default;
    HermitianOperator(Labels labels, SparseOp matrix) : labels_(std::move(labels)), matrix_(std::move(matrix)) {
        check_unique(labels_);
        if (labels_.size() > 2 * kMaxQubits) {
            throw std::length_error("HermitianOperator: too many qubits");
        }
        if (matrix_.rows() != (Eigen::Index{1} << labels_.size()) || matrix_.cols() != matrix_.rows()) {
            throw std::invalid_argument("HermitianOperator: dimension does not match labels");
        }
        matrix_.makeCompressed();
    }

    const Labels &labels() const {
        return labels_;
    }
    const SparseOp &matrix() const {
        return matrix_;
    }
    Eigen::Index dim() const {
        return matrix_.rows();
    }

    static HermitianOperator identity(Labels labels) {
        const Eigen::Index d = Eigen::Index{1} << labels.size();
        SparseOp m(d, d);
        m.setIdentity();
        return HermitianOperator(std::move(labels), std::move(m));
    }

    /// |v⟩⟨v| for a unit vector v over `labels`.
    static HermitianOperator projector_onto(Labels labels, const CVector &v) {
        SparseOp m(v.size(), v.size());
        std::vector<Eigen::Triplet<cplx>> trips;
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            for (Eigen::Index j = 0; j < v.size(); ++j) {
                const cplx x = v[i] * std::conj(v[j]);
                if (x != cplx(0)) {
                    trips.emplace_back(static_cast<int>(i), static_cast<int>(j), x);
                }
            }
        }
        m.setFromTriplets(trips.begin(), trips.end());
        return HermitianOperator(std::move(labels), std::move(m));
    }

    static HermitianOperator from_dense(Labels labels, const CMatrix &m) {
        return HermitianOperator(std::move(labels), m.sparseView(0.0, 0.0));
    }

    /// Same operator expressed on `target`, a superset of labels(), with identity on the extras.
    HermitianOperator embedded(const Labels &target) const {
        const int n = static_cast<int>(target.size());
        const std::vector<int> pos = positions_of(target, labels_);
        const auto inner = detail::scatter_table(pos, n);
        const auto outer = detail::scatter_table(detail::complement_positions(pos, n), n);
        std::vector<Eigen::Triplet<cplx>> trips;
        trips.reserve(static_cast<std::size_t>(matrix_.nonZeros()) * outer.size());
        for (Eigen::Index c = 0; c < matrix_.outerSize(); ++c) {
            for (SparseOp::InnerIterator it(matrix_, c); it; ++it) {
                const auto r_in = inner[static_cast<std::size_t>(it.row())];
                const auto c_in = inner[static_cast<std::size_t>(it.col())];
                for (std::uint64_t o : outer) {
                    trips.emplace_back(static_cast<int>(r_in | o), static_cast<int>(c_in | o), it.value());
                }
            }
        }
        const Eigen::Index d = Eigen::Index{1} << n;
        SparseOp m(d, d);
        m.setFromTriplets(trips.begin(), trips.end());
        return HermitianOperator(target, std::move(m));
    }

    /// Tensor product with an operator on disjoint labels.
    HermitianOperator tensor(const HermitianOperator &other) const {
        Labels labels = labels_;
        labels.insert(labels.end(), other.labels_.begin(), other.labels_.end());
        SparseOp m = Eigen::kroneckerProduct(matrix_, other.matrix_);
        return HermitianOperator(std::move(labels), std::move(m));
    }

    HermitianOperator operator+(const HermitianOperator &other) const {
        const Labels u = union_labels(other);
        return HermitianOperator(u, SparseOp(embedded(u).matrix_ + other.embedded(u).matrix_));
    }

    HermitianOperator operator-(const HermitianOperator &other) const {
        const Labels u = union_labels(other);
        return HermitianOperator(u, SparseOp(embedded(u).matrix_ - other.embedded(u).matrix_));
    }

    /// Labels of this followed by those of `other` not already present.
    Labels union_labels(const HermitianOperator &other) const {
        Labels u = labels_;
        for (const QubitLabel &l : other.labels_) {
            if (std::find(u.begin(), u.end(), l) == u.end()) {
                u.push_back(l);
            }
        }
        return u;
    }

    bool is_hermitian(double tol = kStateTolerance) const {
        const SparseOp diff = matrix_ - SparseOp(matrix_.adjoint());
        return max_abs(diff) <= tol;
    }

    bool is_projector(double tol = kStateTolerance) const {
        const SparseOp sq = matrix_ * matrix_;
        return is_hermitian(tol) && max_abs(SparseOp(sq - matrix_)) <= tol;
    }

    CMatrix dense() const {
        return CMatrix(matrix_);
    }

    static double max_abs(const SparseOp &m) {
        double out = 0;
        for (Eigen::Index c = 0; c < m.outerSize(); ++c) {
            for (SparseOp::InnerIterator it(m, c); it; ++it) {
                out = std::max(out, std::abs(it.value()));
            }
        }
        return out;
    }

   private:
    Labels labels_;
    SparseOp matrix_;
};

/// Sparse product A·B on the union of their labels (A's labels first). Entries at
/// or below 1e-14 in magnitude are dropped.
inline SparseOp product_matrix(const HermitianOperator &a, const HermitianOperator &b, Labels *out_labels = nullptr) {
    const Labels u = a.union_labels(b);
    SparseOp m = a.embedded(u).matrix() * b.embedded(u).matrix();
    m.prune(cplx(0), 1e-14);
    if (out_labels) {
        *out_labels = u;
    }
    return m;
}

/// ⟨ψ|O|ψ⟩ computed as tr(O ρ) with ρ the reduction of ψ to O's labels.
inline double expectation(const StateVector &state, const HermitianOperator &op) {
    const DensityMatrix rho = reduced_density(state, op.labels());
    cplx acc = 0;
    const SparseOp &m = op.matrix();
    for (Eigen::Index c = 0; c < m.outerSize(); ++c) {
        for (SparseOp::InnerIterator it(m, c); it; ++it) {
            acc += it.value() * rho.matrix()(it.col(), it.row());
        }
    }
    return acc.real();
}

/// |Ψ−⟩⟨Ψ−| on (a, b).
inline HermitianOperator singlet_projector(const QubitLabel &a, const QubitLabel &b) {
    return HermitianOperator::projector_onto({a, b}, singlet_amplitudes());
}

// ─── Product-of-blocks register ──────────────────────────────────────────────

/// A pure state kept as a tensor product of independent dense blocks. Blocks are
/// merged only when an operation spans more than one of them, so long runs of
/// independent singlets stay cheap. Each block obeys the kMaxQubits cap.
class QuantumRegister {
   public:
    void add(StateVector block) {
        for (const QubitLabel &l : block.labels()) {
            if (where_.count(l)) {
                throw std::invalid_argument("QuantumRegister: label " + l.str() + " already present");
            }
        }
        const std::size_t id = blocks_.size();
        for (const QubitLabel &l : block.labels()) {
            where_[l] = id;
        }
        blocks_.push_back(std::move(block));
    }

    bool contains(const QubitLabel &l) const {
        return where_.count(l) != 0;
    }

    std::size_t qubits() const {
        return where_.size();
    }

    /// Merge the blocks holding `labels` into one and return a reference to it.
    StateVector &gather(std::span<const QubitLabel> labels) {
        std::vector<std::size_t> ids;
        for (const QubitLabel &l : labels) {
            const std::size_t id = block_id(l);
            if (std::find(ids.begin(), ids.end(), id) == ids.end()) {
                ids.push_back(id);
            }
        }
        std::sort(ids.begin(), ids.end());
        const std::size_t target = ids.front();
        for (std::size_t k = 1; k < ids.size(); ++k) {
            blocks_[target] = blocks_[target].tensor(blocks_[ids[k]]);
            for (const QubitLabel &l : blocks_[ids[k]].labels()) {
                where_[l] = target;
            }
            blocks_[ids[k]] = StateVector();
        }
        return blocks_[target];
    }

    const StateVector &block_of(const QubitLabel &l) const {
        return blocks_[block_id(l)];
    }

    BellOutcome measure_bell(const QubitLabel &a, const QubitLabel &b, Rng &rng) {
        const std::array<QubitLabel, 2> targets{a, b};
        StateVector &block = gather(targets);
        auto [outcome, post] = bell_measurement(std::move(block), a, b, rng);
        block = std::move(post);
        return outcome;
    }

    /// Computational-basis measurement of a single qubit.
    int measure_z(const QubitLabel &l, Rng &rng) {
        StateVector &block = blocks_[block_id(l)];
        const std::array<QubitLabel, 1> target{l};
        const DensityMatrix rho = reduced_density(block, {l});
        const double p1 = rho.matrix()(1, 1).real();
        const int outcome = rng.uniform() < p1 ? 1 : 0;
        CMatrix proj = CMatrix::Zero(2, 2);
        proj(outcome, outcome) = 1;
        block.project(target, proj);
        return outcome;
    }

    void apply(std::span<const QubitLabel> targets, const CMatrix &u) {
        gather(targets).apply(targets, u);
    }

    /// Reduced state of `keep`, assembled from the blocks that hold them.
    DensityMatrix reduced(const Labels &keep) const {
        if (keep.empty()) {
            throw std::invalid_argument("QuantumRegister::reduced: empty keep set");
        }
        std::map<std::size_t, Labels> per_block;
        std::vector<std::size_t> order;
        for (const QubitLabel &l : keep) {
            const std::size_t id = block_id(l);
            if (!per_block.count(id)) {
                order.push_back(id);
            }
            per_block[id].push_back(l);
        }
        std::optional<DensityMatrix> acc;
        for (std::size_t id : order) {
            DensityMatrix part = reduced_density(blocks_[id], per_block[id]);
            acc = acc ? acc->tensor(part) : std::move(part);
        }
        return acc->reordered(keep);
    }

    double expectation(const HermitianOperator &op) const {
        const DensityMatrix rho = reduced(op.labels());
        cplx acc = 0;
        const SparseOp &m = op.matrix();
        for (Eigen::Index c = 0; c < m.outerSize(); ++c) {
            for (SparseOp::InnerIterator it(m, c); it; ++it) {
                acc += it.value() * rho.matrix()(it.col(), it.row());
            }
        }
        return acc.real();
    }

   private:
    std::size_t block_id(const QubitLabel &l) const {
        auto it = where_.find(l);
        if (it == where_.end()) {
            throw std::invalid_argument("QuantumRegister: unknown label " + l.str());
        }
        return it->second;
    }

    std::vector<StateVector> blocks_;
    std::map<QubitLabel, std::size_t> where_;
};

// Single-qubit Paulis.
inline CMatrix pauli(int k) {
    CMatrix m = CMatrix::Zero(2, 2);
    switch (k) {
        case 0:
            m(0, 0) = 1, m(1, 1) = 1;
            break;
        case 1:
            m(0, 1) = 1, m(1, 0) = 1;
            break;
        case 2:
            m(0, 1) = cplx(0, -1), m(1, 0) = cplx(0, 1);
            break;
        case 3:
            m(0, 0) = 1, m(1, 1) = -1;
            break;
        default:
            throw std::invalid_argument("pauli: index must be 0..3");
    }
    return m;
}

}  // namespace relbc

#endif  // RELBC_QUANTUM_HPP
