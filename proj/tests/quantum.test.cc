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


#include "relbc/quantum.hpp"

#include <cmath>

#include "gtest/gtest.h"
#include "oracles.hpp"
#include "relbc/projectors.hpp"
#include "relbc/spectral.hpp"

using namespace relbc;

namespace {

const QubitLabel A{Register::W0P, 1};
const QubitLabel B{Register::W0Q, 1};

CVector basis(int dim, int k) {
    CVector v = CVector::Zero(dim);
    v[k] = 1;
    return v;
}

StateVector random_state(const Labels &labels, Rng &rng) {
    const Eigen::Index d = Eigen::Index{1} << labels.size();
    CVector v(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        // Box-Muller gives Gaussian amplitudes, so the state is Haar-like.
        const double r = std::sqrt(-2 * std::log(1 - rng.uniform()));
        const double th = 2 * std::acos(-1.0) * rng.uniform();
        v[i] = cplx(r * std::cos(th), r * std::sin(th));
    }
    return StateVector(labels, v / v.norm());
}

oracle::Dense embedded_dense(const HermitianOperator &op, int n) {
    return op.embedded(protocol_labels(n)).dense().real();
}

double binomial_sigma(double p, int trials) {
    return std::sqrt(p * (1 - p) / trials);
}

}  // namespace

TEST(quantum, singlet_amplitudes) {
    const StateVector s = prepare_singlets(1);
    ASSERT_EQ(s.labels(), (Labels{A, B}));
    ASSERT_NEAR(std::abs(s.amplitudes()[0]), 0, 1e-15);
    ASSERT_NEAR(s.amplitudes()[1].real(), 1 / std::sqrt(2.0), 1e-15);
    ASSERT_NEAR(s.amplitudes()[2].real(), -1 / std::sqrt(2.0), 1e-15);
    ASSERT_NEAR(std::abs(s.amplitudes()[3]), 0, 1e-15);
}

TEST(quantum, singlets_are_normalized_and_locally_mixed) {
    for (int count = 1; count <= 7; ++count) {
        const StateVector s = prepare_singlets(count);
        ASSERT_EQ(s.qubits(), 2 * count);
        ASSERT_NEAR(s.amplitudes().squaredNorm(), 1, 1e-10);
        for (const QubitLabel &l : s.labels()) {
            const DensityMatrix rho = reduced_density(s, {l});
            ASSERT_LT((rho.matrix() - CMatrix::Identity(2, 2) / 2.0).cwiseAbs().maxCoeff(), 1e-12);
        }
    }
}

TEST(quantum, prepare_singlets_rejects_bad_counts) {
    ASSERT_THROW(prepare_singlets(0), std::invalid_argument);
    ASSERT_THROW(prepare_singlets(8), std::length_error);
}

TEST(quantum, state_vector_validates) {
    ASSERT_THROW(StateVector({A}, CVector::Ones(2)), std::invalid_argument);
    ASSERT_THROW(StateVector({A, A}, basis(4, 0)), std::invalid_argument);
    ASSERT_THROW(StateVector({A, B}, basis(2, 0)), std::invalid_argument);
}

TEST(quantum, bell_measurement_on_singlet_is_certain) {
    Rng rng(5);
    for (int k = 0; k < 100; ++k) {
        const auto [outcome, post] = bell_measurement(prepare_singlets(1), A, B, rng);
        ASSERT_EQ(outcome, BellOutcome::PsiMinus);
        ASSERT_NEAR(post.amplitudes().squaredNorm(), 1, 1e-10);
    }
}

TEST(quantum, bell_measurement_rejects_same_qubit) {
    Rng rng(1);
    ASSERT_THROW(bell_measurement(prepare_singlets(1), A, A, rng), std::invalid_argument);
}

TEST(quantum, bell_probabilities_match_oracle) {
    // Halves of two independent singlets: every outcome 1/4.
    const StateVector two = prepare_singlets(2);
    const QubitLabel a{Register::W0P, 1}, b{Register::W0Q, 2};
    for (double p : bell_probabilities(two, a, b)) {
        ASSERT_NEAR(p, 0.25, 1e-12);
    }
    // |00⟩ splits evenly between Φ+ and Φ−.
    const auto p00 = bell_probabilities(StateVector({A, B}, basis(4, 0)), A, B);
    ASSERT_NEAR(p00[0], 0.5, 1e-12);
    ASSERT_NEAR(p00[1], 0.5, 1e-12);
    ASSERT_NEAR(p00[2], 0, 1e-12);
    ASSERT_NEAR(p00[3], 0, 1e-12);
    // Random states against the dense projector expectation.
    Rng rng(7);
    const Labels labels{A, B, {Register::W1P, 1}};
    for (int t = 0; t < 50; ++t) {
        const StateVector s = random_state(labels, rng);
        const auto p = bell_probabilities(s, labels[2], labels[0]);
        for (int k = 0; k < 4; ++k) {
            const oracle::Dense proj = oracle::bell_pair_projector(3, 2, 0, k);
            const cplx e = s.amplitudes().dot(proj.cast<cplx>() * s.amplitudes());
            ASSERT_NEAR(p[static_cast<std::size_t>(k)], e.real(), 1e-12);
        }
    }
}

TEST(quantum, bell_measurement_frequencies_follow_born_rule) {
    Rng prep(9);
    const Labels labels{A, B, {Register::W1P, 1}};
    const StateVector s = random_state(labels, prep);
    const auto p = bell_probabilities(s, labels[0], labels[2]);
    Rng rng(10);
    constexpr int trials = 20000;
    std::array<int, 4> counts{};
    for (int t = 0; t < trials; ++t) {
        const auto [outcome, post] = bell_measurement(s, labels[0], labels[2], rng);
        ++counts[static_cast<std::size_t>(outcome)];
    }
    for (std::size_t k = 0; k < 4; ++k) {
        const double f = static_cast<double>(counts[k]) / trials;
        ASSERT_LE(std::abs(f - p[k]), 4 * binomial_sigma(p[k], trials) + 1e-12) << "outcome " << k;
    }
}

TEST(quantum, bell_measurement_collapses) {
    Rng rng(12);
    Rng prep(13);
    const Labels labels{A, B, {Register::W1P, 1}};
    for (int t = 0; t < 50; ++t) {
        const auto [outcome, post] = bell_measurement(random_state(labels, prep), A, B, rng);
        const auto again = bell_probabilities(post, A, B);
        ASSERT_NEAR(again[static_cast<std::size_t>(outcome)], 1, 1e-10);
    }
}

TEST(quantum, reduced_density_examples) {
    const DensityMatrix half = reduced_density(prepare_singlets(1), {A});
    ASSERT_LT((half.matrix() - CMatrix::Identity(2, 2) / 2.0).cwiseAbs().maxCoeff(), 1e-12);
    ASSERT_THROW(reduced_density(prepare_singlets(1), {}), std::invalid_argument);
}

TEST(quantum, reduced_density_matches_partial_trace_oracle) {
    Rng rng(14);
    const Labels labels{A, B, {Register::W1P, 1}, {Register::W1Q, 1}, {Register::W0P, 2}};
    for (int t = 0; t < 20; ++t) {
        const StateVector s = random_state(labels, rng);
        const DensityMatrix rho = reduced_density(s, {labels[3], labels[1]});
        const auto expected = oracle::partial_trace(s.amplitudes(), 5, {3, 1});
        ASSERT_LT((rho.matrix() - expected).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(quantum, reduced_density_of_everything_is_the_pure_state) {
    Rng rng(15);
    const Labels labels{A, B, {Register::W1P, 1}};
    const StateVector s = random_state(labels, rng);
    const DensityMatrix rho = reduced_density(s, labels);
    const CMatrix outer = s.amplitudes() * s.amplitudes().adjoint();
    ASSERT_LT((rho.matrix() - outer).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(quantum, density_matrix_invariants) {
    Rng rng(16);
    const Labels labels{A, B, {Register::W1P, 1}, {Register::W1Q, 1}};
    for (int t = 0; t < 20; ++t) {
        const DensityMatrix rho = reduced_density(random_state(labels, rng), {labels[0], labels[2]});
        ASSERT_LT((rho.matrix() - rho.matrix().adjoint()).cwiseAbs().maxCoeff(), 1e-10);
        ASSERT_NEAR(rho.matrix().trace().real(), 1, 1e-10);
        Eigen::SelfAdjointEigenSolver<CMatrix> es(rho.matrix());
        ASSERT_GE(es.eigenvalues().minCoeff(), -1e-10);
    }
}

TEST(quantum, trace_distance_examples) {
    const DensityMatrix zero({A}, basis(2, 0) * basis(2, 0).adjoint());
    const DensityMatrix one({A}, basis(2, 1) * basis(2, 1).adjoint());
    const DensityMatrix mixed = DensityMatrix::maximally_mixed({A});
    ASSERT_NEAR(trace_distance(zero, zero), 0, 1e-15);
    ASSERT_NEAR(trace_distance(zero, one), 1, 1e-12);
    ASSERT_NEAR(trace_distance(mixed, zero), 0.5, 1e-12);
    ASSERT_THROW(trace_distance(zero, DensityMatrix::maximally_mixed({A, B})), std::invalid_argument);
}

TEST(quantum, trace_distance_matches_oracle) {
    Rng rng(17);
    const Labels labels{A, B, {Register::W1P, 1}, {Register::W1Q, 1}};
    for (int t = 0; t < 20; ++t) {
        const DensityMatrix r = reduced_density(random_state(labels, rng), {labels[0], labels[1]});
        const DensityMatrix s = reduced_density(random_state(labels, rng), {labels[0], labels[1]});
        ASSERT_NEAR(trace_distance(r, s), oracle::trace_distance(r.matrix(), s.matrix()), 1e-12);
    }
}

TEST(quantum, operator_norm_examples) {
    ASSERT_NEAR(operator_norm(HermitianOperator::identity({A, B, {Register::W1P, 1}})), 1, 1e-12);
    ASSERT_NEAR(operator_norm(build_test_projector(0, 1), build_test_projector(1, 1)), 0.5, 1e-9);
    ASSERT_NEAR(operator_norm(build_test_projector(0, 3), build_test_projector(1, 3)), 0.125, 1e-9);
}

TEST(quantum, test_projector_layout) {
    // Triple order (H1, H2, H0) per j, ascending j.
    ASSERT_EQ(protocol_labels(2),
              (Labels{{Register::W1Q, 1}, {Register::W0P, 1}, {Register::W0Q, 1}, {Register::W1Q, 2},
                      {Register::W0P, 2}, {Register::W0Q, 2}}));
    ASSERT_EQ(tested_pair(0, 1), std::make_pair(h2(1), h0(1)));
    ASSERT_EQ(tested_pair(1, 1), std::make_pair(h1(1), h2(1)));
}

TEST(quantum, test_projector_rank_and_idempotence) {
    const HermitianOperator p = build_test_projector(0, 1, {1});
    const oracle::Dense dense = embedded_dense(p, 1);
    ASSERT_EQ(dense.rows(), 8);
    ASSERT_EQ(count_unit_singular_values(p.embedded(protocol_labels(1)).matrix()), 2);
    ASSERT_EQ(oracle::rank(dense), 2);
    for (int n = 1; n <= 4; ++n) {
        for (int bit = 0; bit < 2; ++bit) {
            ASSERT_TRUE(build_test_projector(bit, n).is_projector());
            ASSERT_TRUE(build_test_projector(bit, n, {1}).is_projector());
        }
    }
}

TEST(quantum, test_projector_matches_dense_oracle) {
    for (int n = 1; n <= 3; ++n) {
        for (int bit = 0; bit < 2; ++bit) {
            for (unsigned mask = 1; mask < (1u << n); ++mask) {
                std::set<int> subset;
                for (int j = 1; j <= n; ++j) {
                    if (mask & (1u << (j - 1))) {
                        subset.insert(j);
                    }
                }
                const oracle::Dense lib = embedded_dense(build_test_projector(bit, n, subset), n);
                const oracle::Dense ref = oracle::test_projector(bit, n, subset);
                ASSERT_LT((lib - ref).cwiseAbs().maxCoeff(), 1e-12) << "n=" << n << " bit=" << bit;
            }
        }
    }
}

TEST(quantum, test_projector_rejects_bad_input) {
    ASSERT_THROW(build_test_projector(0, 2, {}), std::invalid_argument);
    ASSERT_THROW(build_test_projector(0, 2, {3}), std::invalid_argument);
    ASSERT_THROW(build_test_projector(2, 2, {1}), std::invalid_argument);
}

TEST(quantum, product_norm_is_two_to_minus_n) {
    for (int n = 1; n <= 4; ++n) {
        ASSERT_NEAR(operator_norm(build_test_projector(0, n), build_test_projector(1, n)), std::ldexp(1.0, -n), 1e-9);
    }
    for (int n = 1; n <= 3; ++n) {
        const oracle::Dense q = oracle::test_projector(0, n, oracle::full(n)) * oracle::test_projector(1, n, oracle::full(n));
        ASSERT_NEAR(oracle::norm(q), std::ldexp(1.0, -n), 1e-9);
    }
}

TEST(quantum, threshold_projector_delta_zero_is_test_projector) {
    for (int n = 1; n <= 3; ++n) {
        for (int bit = 0; bit < 2; ++bit) {
            const oracle::Dense a = embedded_dense(build_threshold_projector(bit, n, 0), n);
            const oracle::Dense b = embedded_dense(build_test_projector(bit, n), n);
            ASSERT_LT((a - b).cwiseAbs().maxCoeff(), 1e-12);
        }
    }
}

TEST(quantum, threshold_projector_rank_28) {
    const HermitianOperator p = build_threshold_projector(0, 2, 0.5);
    ASSERT_TRUE(p.is_projector());
    const oracle::Dense dense = embedded_dense(p, 2);
    ASSERT_EQ(oracle::rank(dense), 28);
    ASSERT_NEAR(dense.trace(), 28, 1e-9);
}

TEST(quantum, threshold_projector_matches_dense_oracle) {
    for (int n = 1; n <= 3; ++n) {
        for (int fails = 0; fails < n; ++fails) {
            const double delta = static_cast<double>(fails) / n;
            for (int bit = 0; bit < 2; ++bit) {
                const HermitianOperator p = build_threshold_projector(bit, n, delta);
                ASSERT_TRUE(p.is_projector());
                const oracle::Dense ref = oracle::threshold_projector(bit, n, n - fails);
                ASSERT_LT((embedded_dense(p, n) - ref).cwiseAbs().maxCoeff(), 1e-12);
            }
        }
    }
}

TEST(quantum, threshold_projector_rejects_fractional_slack) {
    ASSERT_THROW(build_threshold_projector(0, 3, 0.25), std::invalid_argument);
    ASSERT_THROW(build_threshold_projector(0, 3, 1.0), std::invalid_argument);
    ASSERT_THROW(build_threshold_projector(0, 3, -0.1), std::invalid_argument);
}

TEST(quantum, projector_norms_are_one) {
    for (int n = 1; n <= 3; ++n) {
        ASSERT_NEAR(operator_norm(build_test_projector(0, n)), 1, 1e-9);
        ASSERT_NEAR(operator_norm(build_test_projector(1, n, {1})), 1, 1e-9);
        ASSERT_NEAR(operator_norm(build_threshold_projector(1, n, (n - 1.0) / n)), 1, 1e-9);
    }
}

TEST(quantum, operator_norm_submultiplicative) {
    for (int n = 1; n <= 3; ++n) {
        const HermitianOperator a = build_threshold_projector(0, n, (n - 1.0) / n);
        const HermitianOperator b = build_test_projector(1, n, {1});
        ASSERT_LE(operator_norm(a, b), operator_norm(a) * operator_norm(b) + 1e-12);
        const HermitianOperator sum = build_test_projector(0, n) + build_test_projector(1, n);
        ASSERT_LE(operator_norm(sum.matrix() * sum.matrix()), operator_norm(sum) * operator_norm(sum) + 1e-9);
    }
}

TEST(quantum, disjoint_projectors_commute) {
    const std::vector<std::pair<std::set<int>, std::set<int>>> cases{
        {{1}, {2}}, {{1, 2}, {3}}, {{2}, {1, 3}}, {{1, 3}, {2, 4}}};
    for (const auto &[s0, s1] : cases) {
        const int n = std::max(*s0.rbegin(), *s1.rbegin());
        const HermitianOperator p0 = build_test_projector(0, n, s0);
        const HermitianOperator p1 = build_test_projector(1, n, s1);
        Labels u;
        const SparseOp ab = product_matrix(p0, p1, &u);
        const SparseOp ba = product_matrix(p1.embedded(u), p0.embedded(u));
        ASSERT_LT(HermitianOperator::max_abs(SparseOp(ab - ba)), 1e-10);
    }
}

TEST(quantum, singular_values_match_dense_svd) {
    for (int n = 1; n <= 3; ++n) {
        const HermitianOperator p0 = build_test_projector(0, n);
        const HermitianOperator p1 = build_test_projector(1, n);
        const Labels labels = protocol_labels(n);
        const SparseOp q = p0.embedded(labels).matrix() * p1.embedded(labels).matrix();
        auto lib = singular_values(q);
        std::sort(lib.begin(), lib.end(), std::greater<>());
        lib.resize(static_cast<std::size_t>(q.rows()), 0.0);
        const oracle::Dense ref = oracle::test_projector(0, n, oracle::full(n)) * oracle::test_projector(1, n, oracle::full(n));
        const auto dense = oracle::singular_values(ref);
        for (std::size_t i = 0; i < dense.size(); ++i) {
            ASSERT_NEAR(lib[i], dense[i], 1e-9) << "index " << i;
        }
    }
}

TEST(quantum, register_blocks_behave_like_one_state) {
    QuantumRegister reg;
    reg.add(prepare_singlets(2));
    reg.add(prepare_singlets({{{Register::W1P, 1}, {Register::W1Q, 1}}}));
    ASSERT_EQ(reg.qubits(), 6u);
    const DensityMatrix rho = reg.reduced({{Register::W0Q, 1}, {Register::W1Q, 1}});
    ASSERT_LT((rho.matrix() - CMatrix::Identity(4, 4) / 4.0).cwiseAbs().maxCoeff(), 1e-12);
    ASSERT_NEAR(reg.expectation(singlet_projector({Register::W0P, 2}, {Register::W0Q, 2})), 1, 1e-12);
    ASSERT_NEAR(reg.expectation(singlet_projector({Register::W0P, 1}, {Register::W1Q, 1})), 0.25, 1e-12);
    ASSERT_THROW(reg.add(prepare_singlets(1)), std::invalid_argument);
}

TEST(quantum, random_states_stay_normalized_under_measurement) {
    Rng rng(21);
    QuantumRegister reg;
    reg.add(prepare_singlets(3));
    for (int j = 1; j <= 3; ++j) {
        reg.measure_bell({Register::W0P, j}, {Register::W0Q, 4 - j}, rng);
    }
    const StateVector &s = reg.block_of({Register::W0P, 1});
    ASSERT_NEAR(s.amplitudes().squaredNorm(), 1, 1e-10);
}
