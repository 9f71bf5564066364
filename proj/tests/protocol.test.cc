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


#include "relbc/protocol.hpp"

#include <cmath>
#include <map>

#include "gtest/gtest.h"

using namespace relbc;

namespace {

ProtocolParams params(int n, Variant v = Variant::ETBC, std::uint64_t seed = 0) {
    ProtocolParams p;
    p.n = n;
    p.variant = v;
    p.seed = seed;
    if (v == Variant::ETRBC) {
        p.classical_sender = ClassicalSender::None;
    }
    return p;
}

double accept_rate(ProtocolParams p, const AliceStrategy &s, int bit, int runs, const NoiseParams &noise = {}) {
    int hits = 0;
    for (int r = 0; r < runs; ++r) {
        p.seed = stream_seed(77, static_cast<std::uint64_t>(r));
        hits += run_protocol(p, s, noise).verdict.accepted(bit) ? 1 : 0;
    }
    return static_cast<double>(hits) / runs;
}

double sigma(double p, int runs) {
    return std::sqrt(p * (1 - p) / runs);
}

}  // namespace

TEST(protocol, honest_etbc_accepts) {
    for (int n = 1; n <= 4; ++n) {
        for (int b = 0; b < 2; ++b) {
            for (std::uint64_t seed = 0; seed < 20; ++seed) {
                const RunResult r = run_protocol(params(n, Variant::ETBC, seed), AliceStrategy::honest(b, b));
                ASSERT_EQ(r.verdict, Verdict::accept(b)) << n << " " << b << " " << seed;
                ASSERT_EQ(r.passes, n);
                ASSERT_EQ(r.tested, n);
                ASSERT_EQ(r.claimed_bit, b);
            }
        }
    }
}

TEST(protocol, honest_etrbc_accepts) {
    for (int n : {2, 4, 6}) {
        for (int b = 0; b < 2; ++b) {
            for (std::uint64_t seed = 0; seed < 20; ++seed) {
                const RunResult r = run_protocol(params(n, Variant::ETRBC, seed), AliceStrategy::honest(b, b));
                ASSERT_EQ(r.verdict, Verdict::accept(b)) << n << " " << b << " " << seed;
                ASSERT_EQ(r.tested, n / 2);
                ASSERT_TRUE(r.partition.has_value());
            }
        }
    }
}

TEST(protocol, cross_unveil_etbc) {
    constexpr int runs = 10000;
    const double expected = std::pow(4.0, -3);
    const double rate = accept_rate(params(3), AliceStrategy::honest(0, 1), 1, runs);
    ASSERT_LE(std::abs(rate - expected), 4 * sigma(expected, runs));
}

TEST(protocol, cross_unveil_etrbc_tests_half) {
    constexpr int runs = 10000;
    const double expected = 0.25;
    const double rate = accept_rate(params(2, Variant::ETRBC), AliceStrategy::honest(1, 0), 0, runs);
    ASSERT_LE(std::abs(rate - expected), 4 * sigma(expected, runs));
}

TEST(protocol, abstain_gives_no_unveil) {
    for (Variant v : {Variant::ETBC, Variant::ETRBC}) {
        const RunResult r = run_protocol(params(2, v, 5), AliceStrategy::honest(0, -1));
        ASSERT_EQ(r.verdict, Verdict::no_unveil());
        ASSERT_FALSE(r.verification_event.has_value());
        ASSERT_TRUE(audit(r.transcript).ok());
    }
}

TEST(protocol, params_validation) {
    ASSERT_THROW(params(3, Variant::ETRBC).validate(), std::invalid_argument);
    ASSERT_THROW(run_protocol(params(3, Variant::ETRBC), AliceStrategy::honest(0, 0)), std::invalid_argument);
    ProtocolParams p = params(2);
    p.epsilon = 1;
    ASSERT_THROW(p.validate(), std::invalid_argument);
    p = params(2);
    p.classical_sender = ClassicalSender::None;
    ASSERT_THROW(p.validate(), std::invalid_argument);
    p = params(0);
    ASSERT_THROW(p.validate(), std::invalid_argument);
    p = params(2);
    p.drift.rate = 0.1;
    ASSERT_NO_THROW(run_protocol(p, AliceStrategy::honest(0, 0)));
    ASSERT_THROW(run_protocol(p, AliceStrategy::optimal_cheat(2, 0)), std::invalid_argument);
}

TEST(protocol, distribute_subsets_uniform_small) {
    constexpr int draws = 10000;
    Rng rng(11);
    int first = 0;
    for (int t = 0; t < draws; ++t) {
        const SubsetPartition p = distribute_subsets(params(2, Variant::ETRBC), rng);
        ASSERT_EQ(p.j0.size(), 1u);
        ASSERT_EQ(p.j1.size(), 1u);
        first += p.j0.count(1) ? 1 : 0;
    }
    ASSERT_LE(std::abs(first - draws / 2), 4 * std::sqrt(draws / 4.0));
}

TEST(protocol, distribute_subsets_uniform_six) {
    constexpr int draws = 100000;
    Rng rng(12);
    std::map<std::set<int>, int> counts;
    for (int t = 0; t < draws; ++t) {
        const SubsetPartition p = distribute_subsets(params(6, Variant::ETRBC), rng);
        for (int j = 1; j <= 6; ++j) {
            ASSERT_NE(p.j0.count(j), p.j1.count(j));
        }
        ++counts[p.j0];
    }
    ASSERT_EQ(counts.size(), 20u);
    const double expected = draws / 20.0;
    double chi2 = 0;
    for (const auto &[subset, c] : counts) {
        ASSERT_LE(std::abs(c - expected), 4 * std::sqrt(expected * (1 - 1 / 20.0))) << c;
        chi2 += (c - expected) * (c - expected) / expected;
    }
    // 19 degrees of freedom: mean 19, standard deviation √38.
    ASSERT_LT(chi2, 19 + 4 * std::sqrt(38.0));
}

TEST(protocol, distribute_subsets_deterministic) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Rng a(seed), b(seed);
        ASSERT_EQ(distribute_subsets(params(8, Variant::ETRBC), a).j0,
                  distribute_subsets(params(8, Variant::ETRBC), b).j0);
    }
    Rng rng(0);
    ASSERT_THROW(distribute_subsets(params(4), rng), std::invalid_argument);
}

TEST(protocol, verify_commitment_examples) {
    Rng rng(3);
    std::vector<std::pair<QubitLabel, QubitLabel>> pairs;
    QuantumRegister reg;
    for (int j = 1; j <= 3; ++j) {
        pairs.push_back({{Register::W0P, j}, {Register::W0Q, j}});
        reg.add(prepare_singlets({pairs.back()}));
    }
    const VerifyResult r = verify_commitment(reg, pairs, 0, 0, rng);
    ASSERT_TRUE(r.accepted);
    ASSERT_EQ(r.passes, 3);
    ASSERT_EQ(r.outcomes.size(), 3u);

    QuantumRegister other;
    other.add(prepare_singlets({{{Register::W0P, 1}, {Register::W0Q, 1}}}));
    ASSERT_THROW(verify_commitment(other, {{{Register::W0P, 1}, {Register::W1Q, 2}}}, 0, 0, rng),
                 std::invalid_argument);
    ASSERT_THROW(verify_commitment(other, {}, 2, 0, rng), std::invalid_argument);
}

TEST(protocol, verify_commitment_product_states_fail) {
    // Halves of two different singlets are uncorrelated: Ψ− with probability 1/4.
    constexpr int trials = 8000;
    int passes = 0;
    for (int t = 0; t < trials; ++t) {
        Rng rng(static_cast<std::uint64_t>(t));
        QuantumRegister reg;
        reg.add(prepare_singlets({{{Register::W0P, 1}, {Register::W0Q, 1}}}));
        reg.add(prepare_singlets({{{Register::W1P, 1}, {Register::W1Q, 1}}}));
        passes += verify_commitment(reg, {{{Register::W0P, 1}, {Register::W1Q, 1}}}, 1, 0, rng).passes;
    }
    ASSERT_LE(std::abs(passes / double(trials) - 0.25), 4 * sigma(0.25, trials));
}

TEST(protocol, coordinate_unveiling_plans) {
    const UnveilPlan etbc = coordinate_unveiling(Directive::Unveil, Variant::ETBC, 1);
    ASSERT_TRUE(etbc.hand_over[0] && etbc.hand_over[1]);
    ASSERT_TRUE(etbc.classical_message);
    const UnveilPlan etrbc = coordinate_unveiling(Directive::Unveil, Variant::ETRBC, 1);
    ASSERT_FALSE(etrbc.hand_over[0]);
    ASSERT_TRUE(etrbc.hand_over[1]);
    ASSERT_FALSE(etrbc.classical_message);
    ASSERT_TRUE(coordinate_unveiling(Directive::Unveil, Variant::ETRBC, 0, true).classical_message);
    const UnveilPlan none = coordinate_unveiling(Directive::Abstain, Variant::ETBC, 0);
    ASSERT_FALSE(none.hand_over[0] || none.hand_over[1] || none.classical_message);
    ASSERT_THROW(coordinate_unveiling(Directive::Unveil, Variant::ETBC, 2), std::invalid_argument);
}

TEST(protocol, etbc_verifier_by_policy) {
    ASSERT_EQ(etbc_verifier(1, VerifyPolicy::AtP), Agent::Bc);
    ASSERT_EQ(etbc_verifier(1, VerifyPolicy::AtQb), bob_agent(1));
    ASSERT_EQ(etbc_verifier(0, VerifyPolicy::Midpoint), bob_midpoint_agent(0));
}

TEST(protocol, verification_never_precedes_light_cone_limit) {
    for (VerifyPolicy policy : {VerifyPolicy::AtP, VerifyPolicy::AtQb, VerifyPolicy::Midpoint}) {
        for (int b = 0; b < 2; ++b) {
            ProtocolParams p = params(2, Variant::ETBC, 9);
            p.verify_policy = policy;
            const RunResult r = run_protocol(p, AliceStrategy::honest(b, b));
            ASSERT_TRUE(r.verification_event.has_value());
            const Event earliest =
                earliest_verification_event(p.geometry, b, p.geometry.unveil_point(b).t, policy);
            ASSERT_GE(r.verification_event->t, earliest.t - 1e-12) << to_string(policy);
            const Event where = verification_location(p.geometry, b, policy);
            ASSERT_EQ(r.verification_event->x, where.x);
        }
    }
    for (int b = 0; b < 2; ++b) {
        const ProtocolParams p = params(4, Variant::ETRBC, 9);
        const RunResult r = run_protocol(p, AliceStrategy::honest(b, b));
        const Event expected = etrbc_verification_event(p.geometry, b, p.geometry.unveil_point(b).t);
        ASSERT_NEAR(r.verification_event->t, expected.t, 1e-12);
        ASSERT_EQ(r.verification_event->x, expected.x);
    }
}

TEST(protocol, transcripts_audit_clean) {
    const double h = 1 / std::sqrt(2.0);
    std::vector<std::pair<ProtocolParams, AliceStrategy>> cases;
    for (VerifyPolicy policy : {VerifyPolicy::AtP, VerifyPolicy::AtQb, VerifyPolicy::Midpoint}) {
        for (ClassicalSender cs : {ClassicalSender::Ac, ClassicalSender::Ab}) {
            ProtocolParams p = params(2);
            p.verify_policy = policy;
            p.classical_sender = cs;
            cases.push_back({p, AliceStrategy::honest(1, 1)});
            cases.push_back({p, AliceStrategy::optimal_cheat(2, 0)});
            cases.push_back({p, AliceStrategy::superposition(2, h, h, 1)});
            cases.push_back({p, AliceStrategy::honest(0, -1)});
        }
    }
    ProtocolParams drift = params(3);
    drift.drift = {0.05, Labeling::RandomBatchSwap};
    cases.push_back({drift, AliceStrategy::honest(0, 0)});
    cases.push_back({params(4, Variant::ETRBC), AliceStrategy::honest(1, 0)});
    cases.push_back({params(2, Variant::ETRBC), AliceStrategy::superposition(2, h, h, 0)});
    for (std::size_t i = 0; i < cases.size(); ++i) {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            ProtocolParams p = cases[i].first;
            p.seed = seed;
            const RunResult r = run_protocol(p, cases[i].second, {0.05, 0.05});
            const AuditReport report = audit(r.transcript);
            ASSERT_TRUE(report.ok()) << i << ": " << report.violations.front().what;
            ASSERT_EQ(r.transcript.records().back().kind, RecordKind::Verdict);
        }
    }
}

TEST(protocol, same_seed_same_transcript) {
    ProtocolParams p = params(3, Variant::ETBC, 123);
    const NoiseParams noise{0.1, 0.1};
    const RunResult a = run_protocol(p, AliceStrategy::honest(0, 0), noise);
    const RunResult b = run_protocol(p, AliceStrategy::honest(0, 0), noise);
    ASSERT_EQ(a.transcript.to_jsonl(), b.transcript.to_jsonl());
    p.seed = 124;
    const RunResult c = run_protocol(p, AliceStrategy::honest(0, 0), noise);
    ASSERT_NE(a.transcript.to_jsonl(), c.transcript.to_jsonl());
}

TEST(protocol, noisy_honest_rate_matches_binomial) {
    constexpr int runs = 4000;
    const NoiseParams noise{0.2, 0.05};
    ProtocolParams p = params(4);
    p.epsilon = 0.3;
    const double expected = honest_acceptance_prob(4, per_test_pass_probability(noise), 0.3);
    const double rate = accept_rate(p, AliceStrategy::honest(1, 1), 1, runs, noise);
    ASSERT_LE(std::abs(rate - expected), 4 * sigma(expected, runs));
}
