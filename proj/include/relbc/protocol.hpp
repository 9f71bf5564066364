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

#ifndef RELBC_PROTOCOL_HPP
#define RELBC_PROTOCOL_HPP

// ETBC and ETRBC as a deterministic event loop over the causal network.
//
// Agents sit at fixed spatial points: A_c and B_c at P, A_i and B_i at Q_i, and
// the optional midpoint verifiers B_m0, B_m1. Preparation is placed at a single
// instant before the commitment: custody of every qubit and the unveiling
// instructions are handed out there, standing in for the secure transport of
// Alice's laboratories.
//
// ETBC: A_c hands B_c the N qubits Q_a^j at P. At t(Q_i) each A_i hands B_i its
// W_iQ qubits, and A_c tells B_c the bit b. B_i forwards what it received to the
// verifier for bit i (B_c, B_i or B_mi by policy); B_c forwards Q_a once it
// knows b. The verifier for b tests (Q_a^j, W_bQ^j) for every j.
//
// ETRBC: B_c splits the Q_a^j into J_0 and J_1 as soon as he receives them and
// sends each half to B_0 and B_1. Only A_b unveils, and B_b tests the pairs in J_b.

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "relbc/adversary.hpp"
#include "relbc/bounds.hpp"
#include "relbc/netsim.hpp"
#include "relbc/noise.hpp"
#include "relbc/quantum.hpp"
#include "relbc/spacetime.hpp"

namespace relbc {

enum class ClassicalSender : std::uint8_t { Ac, Ab, None };

inline const char *to_string(ClassicalSender s) {
    switch (s) {
        case ClassicalSender::Ac:
            return "A_c";
        case ClassicalSender::Ab:
            return "A_b";
        case ClassicalSender::None:
            return "none";
    }
    return "?";
}

/// P = origin, Q_0 = (1, 3, 0, 0), Q_1 = (1, −3, 0, 0): a symmetric FFPD layout.
inline CommitmentGeometry default_geometry() {
    return CommitmentGeometry({0, 0, 0, 0}, {{1, 3, 0, 0}, {1, -3, 0, 0}});
}

struct ProtocolParams {
    int n = 3;
    Variant variant = Variant::ETBC;
    double epsilon = 0;
    CommitmentGeometry geometry = default_geometry();
    VerifyPolicy verify_policy = VerifyPolicy::AtP;
    std::uint64_t seed = 0;
    ClassicalSender classical_sender = ClassicalSender::Ac;
    DriftModel drift;

    void validate() const {
        if (n < 1) {
            throw std::invalid_argument("protocol.N must be at least 1");
        }
        if (variant == Variant::ETRBC && n % 2 != 0) {
            throw std::invalid_argument("protocol.N must be even for ETRBC");
        }
        if (!(epsilon >= 0 && epsilon < 1)) {
            throw std::invalid_argument("protocol.epsilon must lie in [0, 1)");
        }
        if (geometry.unveil_points.size() != 2) {
            throw std::invalid_argument("geometry needs exactly two unveiling points");
        }
        if (!geometry.valid()) {
            throw std::invalid_argument("geometry is classified INVALID");
        }
        if (variant == Variant::ETBC && classical_sender == ClassicalSender::None) {
            throw std::invalid_argument("protocol.classical_sender: ETBC needs the classical bit message");
        }
        drift.validate();
    }
};

struct Verdict {
    enum class Kind : std::uint8_t { Accept, Reject, NoUnveil } kind = Kind::NoUnveil;
    int bit = -1;

    static Verdict accept(int b) {
        return {Kind::Accept, b};
    }
    static Verdict reject() {
        return {Kind::Reject, -1};
    }
    static Verdict no_unveil() {
        return {Kind::NoUnveil, -1};
    }

    bool accepted(int b) const {
        return kind == Kind::Accept && bit == b;
    }

    std::string str() const {
        switch (kind) {
            case Kind::Accept:
                return "ACCEPT(" + std::to_string(bit) + ")";
            case Kind::Reject:
                return "REJECT";
            case Kind::NoUnveil:
                return "NO_UNVEIL";
        }
        return "?";
    }

    bool operator==(const Verdict &) const = default;
};

/// Uniform N/2-subset J_0 by a partial Fisher–Yates shuffle; J_1 is the rest.
inline SubsetPartition distribute_subsets(const ProtocolParams &params, Rng &rng) {
    if (params.variant != Variant::ETRBC) {
        throw std::invalid_argument("distribute_subsets: only ETRBC distributes subsets");
    }
    if (params.n % 2 != 0) {
        throw std::invalid_argument("distribute_subsets: N must be even");
    }
    std::vector<int> idx = full_range(params.n);
    const int h = params.n / 2;
    for (int i = 0; i < h; ++i) {
        const auto k = static_cast<std::size_t>(i) + rng.below(static_cast<std::uint64_t>(params.n - i));
        std::swap(idx[static_cast<std::size_t>(i)], idx[k]);
    }
    return SubsetPartition::from_j0(params.n, std::set<int>(idx.begin(), idx.begin() + h));
}

struct PairOutcome {
    std::pair<QubitLabel, QubitLabel> pair;
    bool lost = false;
    BellOutcome outcome = BellOutcome::PhiPlus;

    bool passed() const {
        return !lost && outcome == BellOutcome::PsiMinus;
    }
};

/// One Bell test with noise: loss of the second qubit, then depolarizing, then measurement.
inline PairOutcome test_pair(QuantumRegister &reg, const std::pair<QubitLabel, QubitLabel> &pair,
                             const NoiseParams &noise, Rng &rng) {
    if (pair.first.index != pair.second.index) {
        throw std::invalid_argument("verify: unmatched labels " + pair.first.str() + " and " + pair.second.str());
    }
    PairOutcome out{pair};
    if (apply_loss(CustodyRecord{pair.second}, noise.loss_l, rng) == LossOutcome::Lost) {
        out.lost = true;
        return out;
    }
    depolarize(reg, pair, noise.depolarizing_q, rng);
    out.outcome = reg.measure_bell(pair.first, pair.second, rng);
    return out;
}

struct VerifyResult {
    bool accepted = false;
    int passes = 0;
    int tested = 0;
    std::vector<PairOutcome> outcomes;
};

/// Bell-test every pair and accept iff at least ⌈(1−ε)·pairs⌉ read Ψ−.
/// Lost qubits count as failed tests.
inline VerifyResult verify_commitment(QuantumRegister &reg,
                                      const std::vector<std::pair<QubitLabel, QubitLabel>> &pairs,
                                      int claimed_bit, double epsilon, Rng &rng, const NoiseParams &noise = {}) {
    if (claimed_bit != 0 && claimed_bit != 1) {
        throw std::invalid_argument("verify_commitment: claimed bit must be 0 or 1");
    }
    VerifyResult r;
    r.tested = static_cast<int>(pairs.size());
    for (const auto &pair : pairs) {
        r.outcomes.push_back(test_pair(reg, pair, noise, rng));
        r.passes += r.outcomes.back().passed() ? 1 : 0;
    }
    r.accepted = r.passes >= acceptance_threshold(r.tested, epsilon);
    return r;
}

/// Who acts at unveiling. All agents follow one directive fixed in advance.
struct UnveilPlan {
    Directive directive = Directive::Unveil;
    int target = 0;
    std::array<bool, 2> hand_over{false, false};
    bool classical_message = false;
};

/// ETBC: both A_i hand over and the bit is announced. ETRBC: only A_b hands over;
/// the announcement is optional.
inline UnveilPlan coordinate_unveiling(Directive directive, Variant variant, int target,
                                       bool announce_in_etrbc = false) {
    UnveilPlan plan;
    plan.directive = directive;
    plan.target = target;
    if (directive == Directive::Abstain) {
        return plan;
    }
    if (target != 0 && target != 1) {
        throw std::invalid_argument("coordinate_unveiling: target must be 0 or 1");
    }
    if (variant == Variant::ETBC) {
        plan.hand_over = {true, true};
        plan.classical_message = true;
    } else {
        plan.hand_over[static_cast<std::size_t>(target)] = true;
        plan.classical_message = announce_in_etrbc;
    }
    return plan;
}

inline Agent etbc_verifier(int bit, VerifyPolicy policy) {
    switch (policy) {
        case VerifyPolicy::AtP:
            return Agent::Bc;
        case VerifyPolicy::AtQb:
            return bob_agent(bit);
        case VerifyPolicy::Midpoint:
            return bob_midpoint_agent(bit);
    }
    throw std::invalid_argument("etbc_verifier: unknown policy");
}

struct RunResult {
    Transcript transcript;
    Verdict verdict;
    int claimed_bit = -1;
    int passes = 0;
    int tested = 0;
    std::optional<Event> verification_event;
    std::optional<SubsetPartition> partition;
};

namespace detail {

inline std::string run_header(const ProtocolParams &p, const AliceStrategy &s, const NoiseParams &noise) {
    return std::string("variant=") + to_string(p.variant) + " N=" + std::to_string(p.n) + " epsilon=" +
           fmt12(p.epsilon) + " policy=" + to_string(p.verify_policy) + " classical_sender=" +
           to_string(p.classical_sender) + " strategy=" + s.describe() + " unveil=" +
           (s.unveil < 0 ? std::string("abstain") : std::to_string(s.unveil)) + " q=" + fmt12(noise.depolarizing_q) +
           " l=" + fmt12(noise.loss_l) + " drift=" + fmt12(p.drift.rate) + "/" + to_string(p.drift.labeling) +
           " seed=" + std::to_string(p.seed);
}

class ProtocolRun {
   public:
    ProtocolRun(const ProtocolParams &p, const AliceStrategy &s, const NoiseParams &noise)
        : p_(p), s_(s), noise_(noise), rng_(p.seed), prep_time_(std::min(p.geometry.commit_point.t, 0.0)),
          net_(prep_time_), now_(prep_time_) {
        p_.validate();
        noise_.validate();
        const Directive d = s.unveil < 0 ? Directive::Abstain : Directive::Unveil;
        plan_ = coordinate_unveiling(d, p.variant, std::max(s.unveil, 0), p.classical_sender != ClassicalSender::None);
    }

    RunResult run() {
        Record header;
        header.sim_time = prep_time_;
        header.kind = RecordKind::Run;
        header.payload = run_header(p_, s_, noise_);
        result_.transcript.add(header);

        prepare();
        for (int i = 0; i < 2; ++i) {
            Message m;
            m.kind = MessageKind::Instruction;
            m.sender = Agent::Ac;
            m.receiver = alice_agent(i);
            m.directive = plan_.directive;
            // Given in A_c's laboratory before A_i leaves; placement is instantaneous.
            m.send_event = m.receive_event = agent_location(m.receiver, p_.geometry).at_time(prep_time_);
            net_.schedule(m);
        }
        Message commit;
        commit.kind = MessageKind::QubitTransfer;
        commit.sender = Agent::Ac;
        commit.receiver = Agent::Bc;
        commit.qubits = handed_;
        commit.send_event = commit.receive_event = p_.geometry.commit_point;
        net_.schedule(commit);

        const int t = plan_.target;
        for (int i = 0; i < 2; ++i) {
            if (plan_.hand_over[static_cast<std::size_t>(i)]) {
                at(p_.geometry.unveil_point(i).t, [this, i] { unveil(i); });
            }
        }
        if (plan_.classical_message && p_.classical_sender == ClassicalSender::Ac &&
            s_.kind != StrategyKind::Superposition) {
            at(p_.geometry.unveil_point(t).t, [this, t] {
                send_local(MessageKind::ClassicalBit, Agent::Ac, Agent::Bc, t);
            });
        }
        loop();

        if (!verified_) {
            result_.verdict = (plan_.directive == Directive::Abstain || gated_out_) ? Verdict::no_unveil()
                                                                                    : Verdict::reject();
        }
        Record v;
        v.sim_time = now_;
        v.kind = RecordKind::Verdict;
        v.payload = result_.verdict.str();
        result_.transcript.add(v);
        return std::move(result_);
    }

   private:
    void prepare() {
        std::map<Agent, Labels> holders;
        if (s_.kind == StrategyKind::Honest) {
            const BatchAssignment batches = label_batches(p_.drift, p_.n, &rng_);
            for (int r = 0; r < 2; ++r) {
                for (int j = 1; j <= p_.n; ++j) {
                    const QubitLabel wp{register_p(r), j};
                    const QubitLabel wq{register_q(r), j};
                    reg_.add(StateVector({wp, wq},
                                         drifted_singlet_amplitudes(drift_angle(p_.drift, batches.slot_of(r, j)))));
                    holders[Agent::Ac].push_back(wp);
                    holders[alice_agent(r)].push_back(wq);
                }
            }
            for (int j = 1; j <= p_.n; ++j) {
                handed_.push_back({register_p(s_.bit), j});
            }
        } else {
            if (p_.drift.rate != 0) {
                throw std::invalid_argument("drift applies to honest preparation only");
            }
            if (!s_.state) {
                throw std::invalid_argument("strategy has no prepared state");
            }
            for (const QubitLabel &l : protocol_labels(p_.n)) {
                if (!s_.state->contains(l)) {
                    throw std::invalid_argument("strategy state lacks " + l.str() + " for N = " +
                                                std::to_string(p_.n));
                }
            }
            if (s_.state->contains({Register::W0P, p_.n + 1})) {
                throw std::invalid_argument("strategy state was prepared for a larger N");
            }
            reg_.add(*s_.state);
            for (const QubitLabel &l : s_.state->labels()) {
                Agent h = Agent::Ac;
                if (l.reg == Register::W0Q || (l.reg == Register::CONTROL && l.index == 0)) {
                    h = Agent::A0;
                } else if (l.reg == Register::W1Q || (l.reg == Register::CONTROL && l.index == 1)) {
                    h = Agent::A1;
                }
                holders[h].push_back(l);
            }
            for (int j = 1; j <= p_.n; ++j) {
                handed_.push_back({Register::W0P, j});
            }
        }
        for (auto &[agent, labels] : holders) {
            std::sort(labels.begin(), labels.end());
            for (const QubitLabel &l : labels) {
                net_.place(l, agent, prep_time_);
            }
            Record r;
            r.sim_time = prep_time_;
            r.kind = RecordKind::Prepare;
            r.sender = to_string(Agent::Ac);
            r.receiver = to_string(agent);
            r.payload = join_labels(labels);
            result_.transcript.add(r);
        }
    }

    void at(double time, std::function<void()> action) {
        wakeups_.emplace(time, std::move(action));
    }

    void loop() {
        while (true) {
            const auto next = net_.next_time();
            if (!wakeups_.empty() && (!next || wakeups_.begin()->first <= *next)) {
                auto it = wakeups_.begin();
                now_ = std::max(now_, it->first);
                auto action = std::move(it->second);
                wakeups_.erase(it);
                action();
                continue;
            }
            auto m = net_.step();
            if (!m) {
                break;
            }
            now_ = std::max(now_, m->receive_event.t);
            result_.transcript.add(Record::from_message(*m));
            deliver(*m);
        }
    }

    void send_local(MessageKind kind, Agent from, Agent to, int bit) {
        Message m = light_speed_message(kind, from, to, now_, p_.geometry);
        m.bit = bit;
        net_.schedule(m);
    }

    void send_qubits(Agent from, Agent to, Labels labels) {
        Message m = light_speed_message(MessageKind::QubitTransfer, from, to, now_, p_.geometry);
        m.qubits = std::move(labels);
        net_.schedule(m);
    }

    Labels unveil_labels(int i) const {
        Labels out;
        for (int j = 1; j <= p_.n; ++j) {
            out.push_back({register_q(i), j});
        }
        return out;
    }

    void unveil(int i) {
        const Agent a = alice_agent(i);
        if (s_.kind == StrategyKind::Superposition) {
            const QubitLabel control{Register::CONTROL, i};
            net_.require_held(a, {control}, now_);
            const int r = reg_.measure_z(control, rng_);
            Record rec;
            rec.sim_time = now_;
            rec.kind = RecordKind::Measurement;
            rec.sender = rec.receiver = to_string(a);
            rec.payload = control.str() + "=" + std::to_string(r);
            result_.transcript.add(rec);
            if (r != plan_.target) {
                gated_out_ = true;
                return;
            }
        }
        send_qubits(a, bob_agent(i), unveil_labels(i));
        const bool own_announcement =
            p_.classical_sender == ClassicalSender::Ab || s_.kind == StrategyKind::Superposition;
        if (i == plan_.target && plan_.classical_message && own_announcement) {
            send_local(MessageKind::ClassicalBit, a, bob_agent(i), i);
        }
    }

    bool holds(Agent a, const Labels &labels) const {
        for (const QubitLabel &l : labels) {
            if (net_.holder(l) != a) {
                return false;
            }
        }
        return true;
    }

    void deliver(const Message &m) {
        switch (m.kind) {
            case MessageKind::Instruction:
                return;
            case MessageKind::ClassicalBit:
                learn(m.receiver, m.bit);
                return;
            case MessageKind::QubitTransfer:
                break;
        }
        if (m.sender == Agent::Ac && m.receiver == Agent::Bc) {
            if (p_.variant == Variant::ETRBC) {
                distribute();
            } else {
                forward_handed();
            }
        } else if (p_.variant == Variant::ETBC && (m.sender == Agent::A0 || m.sender == Agent::A1)) {
            const int i = m.sender == Agent::A0 ? 0 : 1;
            const Agent v = etbc_verifier(i, p_.verify_policy);
            if (v != m.receiver) {
                send_qubits(m.receiver, v, m.qubits);
            }
        }
        try_verify(m.receiver);
    }

    void learn(Agent who, int bit) {
        if (known_.count(who)) {
            return;
        }
        known_[who] = bit;
        if (p_.variant == Variant::ETRBC) {
            return;
        }
        if (who != Agent::Bc && !known_.count(Agent::Bc)) {
            send_local(MessageKind::ClassicalBit, who, Agent::Bc, bit);
        }
        if (who == Agent::Bc) {
            forward_handed();
        }
        try_verify(who);
    }

    void forward_handed() {
        auto it = known_.find(Agent::Bc);
        if (forwarded_ || it == known_.end() || !holds(Agent::Bc, handed_)) {
            return;
        }
        forwarded_ = true;
        const Agent v = etbc_verifier(it->second, p_.verify_policy);
        if (v != Agent::Bc) {
            send_qubits(Agent::Bc, v, handed_);
            send_local(MessageKind::ClassicalBit, Agent::Bc, v, it->second);
        }
    }

    void distribute() {
        const SubsetPartition part = distribute_subsets(p_, rng_);
        auto text = [](const std::set<int> &s) {
            std::string out;
            for (int j : s) {
                out += (out.empty() ? "" : ",") + std::to_string(j);
            }
            return out;
        };
        Record rec;
        rec.sim_time = now_;
        rec.kind = RecordKind::Partition;
        rec.sender = rec.receiver = to_string(Agent::Bc);
        rec.payload = "J0=" + text(part.j0) + ";J1=" + text(part.j1);
        result_.transcript.add(rec);
        for (int i = 0; i < 2; ++i) {
            Labels labels;
            for (int j : i == 0 ? part.j0 : part.j1) {
                labels.push_back(handed_[static_cast<std::size_t>(j - 1)]);
            }
            send_qubits(Agent::Bc, bob_agent(i), labels);
        }
        result_.partition = part;
    }

    void try_verify(Agent who) {
        if (verified_) {
            return;
        }
        int bit = -1;
        std::vector<int> js;
        if (p_.variant == Variant::ETBC) {
            auto it = known_.find(who);
            if (it == known_.end() || etbc_verifier(it->second, p_.verify_policy) != who) {
                return;
            }
            bit = it->second;
            js = full_range(p_.n);
        } else {
            if (who != Agent::B0 && who != Agent::B1) {
                return;
            }
            bit = who == Agent::B0 ? 0 : 1;
            if (!result_.partition) {
                return;
            }
            const auto &subset = bit == 0 ? result_.partition->j0 : result_.partition->j1;
            js.assign(subset.begin(), subset.end());
        }
        std::vector<std::pair<QubitLabel, QubitLabel>> pairs;
        Labels needed;
        for (int j : js) {
            pairs.push_back({handed_[static_cast<std::size_t>(j - 1)], {register_q(bit), j}});
            needed.push_back(pairs.back().first);
            needed.push_back(pairs.back().second);
        }
        if (!holds(who, needed)) {
            return;
        }
        verified_ = true;
        int passes = 0;
        for (const auto &pair : pairs) {
            const PairOutcome o = test_pair(reg_, pair, noise_, rng_);
            Record rec;
            rec.sim_time = now_;
            rec.sender = rec.receiver = to_string(who);
            if (o.lost) {
                net_.lose(pair.second, who, now_);
                rec.kind = RecordKind::Loss;
                rec.payload = pair.second.str();
            } else {
                rec.kind = RecordKind::Measurement;
                rec.payload = pair.first.str() + "," + pair.second.str() + "=" + to_string(o.outcome);
            }
            result_.transcript.add(rec);
            passes += o.passed() ? 1 : 0;
        }
        const int tested = static_cast<int>(pairs.size());
        result_.claimed_bit = bit;
        result_.passes = passes;
        result_.tested = tested;
        result_.verification_event = agent_location(who, p_.geometry).at_time(now_);
        result_.verdict = passes >= acceptance_threshold(tested, p_.epsilon) ? Verdict::accept(bit) : Verdict::reject();
    }

    ProtocolParams p_;
    const AliceStrategy &s_;
    NoiseParams noise_;
    Rng rng_;
    double prep_time_;
    Network net_;
    double now_;
    QuantumRegister reg_;
    UnveilPlan plan_;
    Labels handed_;
    std::multimap<double, std::function<void()>> wakeups_;
    std::map<Agent, int> known_;
    bool forwarded_ = false;
    bool verified_ = false;
    bool gated_out_ = false;
    RunResult result_;
};

}  // namespace detail

/// Execute one run. Deterministic in (params, strategy, noise): the only
/// randomness is the stream seeded with params.seed.
inline RunResult run_protocol(const ProtocolParams &params, const AliceStrategy &strategy,
                              const NoiseParams &noise = {}) {
    return detail::ProtocolRun(params, strategy, noise).run();
}

}  // namespace relbc

#endif  // RELBC_PROTOCOL_HPP
