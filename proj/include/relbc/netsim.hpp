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

#ifndef RELBC_NETSIM_HPP
#define RELBC_NETSIM_HPP

// Causal message transport between pointlike agents.
//
// Every message carries a send and a receive event and is refused unless the
// receive event lies in the causal future of the send event. Qubits are
// move-only: each label has exactly one holder (an agent or the channel it is
// travelling on), and sending a label you do not hold is a custody violation.
// Classical payloads are copied freely.

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "relbc/common.hpp"
#include "relbc/quantum.hpp"
#include "relbc/spacetime.hpp"

namespace relbc {

enum class Agent : std::uint8_t { Ac, A0, A1, Bc, B0, B1, Bm0, Bm1 };

inline constexpr std::array<Agent, 8> kAgents = {Agent::Ac, Agent::A0, Agent::A1,  Agent::Bc,
                                                 Agent::B0, Agent::B1, Agent::Bm0, Agent::Bm1};

inline const char *to_string(Agent a) {
    switch (a) {
        case Agent::Ac:
            return "A_c";
        case Agent::A0:
            return "A_0";
        case Agent::A1:
            return "A_1";
        case Agent::Bc:
            return "B_c";
        case Agent::B0:
            return "B_0";
        case Agent::B1:
            return "B_1";
        case Agent::Bm0:
            return "B_m0";
        case Agent::Bm1:
            return "B_m1";
    }
    return "?";
}

inline Agent parse_agent(std::string_view text) {
    for (Agent a : kAgents) {
        if (text == to_string(a)) {
            return a;
        }
    }
    throw std::invalid_argument("unknown agent '" + std::string(text) + "'");
}

inline Agent alice_agent(int bit) {
    return bit == 0 ? Agent::A0 : Agent::A1;
}
inline Agent bob_agent(int bit) {
    return bit == 0 ? Agent::B0 : Agent::B1;
}
inline Agent bob_midpoint_agent(int bit) {
    return bit == 0 ? Agent::Bm0 : Agent::Bm1;
}

/// Spatial position of an agent (time component t(P)). Agents are stationary.
inline Event agent_location(Agent a, const CommitmentGeometry &geom) {
    switch (a) {
        case Agent::Ac:
        case Agent::Bc:
            return geom.commit_point;
        case Agent::A0:
        case Agent::B0:
            return geom.unveil_point(0).at_time(geom.commit_point.t);
        case Agent::A1:
        case Agent::B1:
            return geom.unveil_point(1).at_time(geom.commit_point.t);
        case Agent::Bm0:
            return geom.midpoint(0);
        case Agent::Bm1:
            return geom.midpoint(1);
    }
    throw std::invalid_argument("agent_location: unknown agent");
}

enum class MessageKind : std::uint8_t { QubitTransfer, ClassicalBit, Instruction };

inline const char *to_string(MessageKind k) {
    switch (k) {
        case MessageKind::QubitTransfer:
            return "QUBIT_TRANSFER";
        case MessageKind::ClassicalBit:
            return "CLASSICAL_BIT";
        case MessageKind::Instruction:
            return "INSTRUCTION";
    }
    return "?";
}

enum class Directive : std::uint8_t { Unveil, Abstain };

inline const char *to_string(Directive d) {
    return d == Directive::Unveil ? "UNVEIL" : "ABSTAIN";
}

inline std::string join_labels(const Labels &labels) {
    std::string out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        out += (i ? "," : "") + labels[i].str();
    }
    return out;
}

inline Labels split_labels(std::string_view text) {
    Labels out;
    while (!text.empty()) {
        const auto comma = text.find(',');
        out.push_back(QubitLabel::parse(text.substr(0, comma)));
        if (comma == std::string_view::npos) {
            break;
        }
        text.remove_prefix(comma + 1);
    }
    return out;
}

struct Message {
    MessageKind kind = MessageKind::ClassicalBit;
    Agent sender = Agent::Ac;
    Agent receiver = Agent::Bc;
    Labels qubits;  // QUBIT_TRANSFER
    int bit = 0;    // CLASSICAL_BIT
    Directive directive = Directive::Unveil;  // INSTRUCTION
    Event send_event;
    Event receive_event;
    std::uint64_t seq = 0;  // assigned by Network::schedule

    std::string payload() const {
        switch (kind) {
            case MessageKind::QubitTransfer:
                return join_labels(qubits);
            case MessageKind::ClassicalBit:
                return std::to_string(bit);
            case MessageKind::Instruction:
                return to_string(directive);
        }
        return "";
    }
};

/// A message leaving `from` at `send_time` and arriving at `to`'s location at light speed.
inline Message light_speed_message(MessageKind kind, Agent from, Agent to, double send_time,
                                   const CommitmentGeometry &geom) {
    Message m;
    m.kind = kind;
    m.sender = from;
    m.receiver = to;
    m.send_event = agent_location(from, geom).at_time(send_time);
    m.receive_event = light_arrival(m.send_event, agent_location(to, geom));
    return m;
}

/// Who holds a label from `since` on. An empty holder means the label is on a channel.
struct CustodyRecord {
    QubitLabel label;
    std::optional<Agent> holder;
    double since = 0;
    bool lost = false;
};

struct ScheduledMessage {
    Message message;
    enum class Status { Pending, Delivered } status = Status::Pending;
};

class Network {
   public:
    explicit Network(double start_time = 0) : clock_(start_time) {
    }

    double clock() const {
        return clock_;
    }

    /// Initial placement of a qubit with `holder`.
    void place(const QubitLabel &label, Agent holder, double time) {
        if (custody_.count(label)) {
            throw CustodyViolation("label " + label.str() + " placed twice");
        }
        record({label, holder, time, false});
    }

    /// Allow `reader` to inspect payloads on the channel sender → receiver.
    /// The receiver may always read its own incoming messages.
    void authorize(Agent sender, Agent receiver, Agent reader) {
        readers_.insert({sender, receiver, reader});
    }

    bool may_read(Agent sender, Agent receiver, Agent reader) const {
        return reader == receiver || readers_.count({sender, receiver, reader}) != 0;
    }

    /// Payload of a pending message, as seen by `reader`.
    const Message &read_in_transit(std::uint64_t seq, Agent reader) const {
        for (const ScheduledMessage &s : log_) {
            if (s.message.seq == seq && s.status == ScheduledMessage::Status::Pending) {
                if (!may_read(s.message.sender, s.message.receiver, reader)) {
                    throw CustodyViolation(std::string(to_string(reader)) + " may not read the channel " +
                                           to_string(s.message.sender) + " -> " + to_string(s.message.receiver));
                }
                return s.message;
            }
        }
        throw std::out_of_range("read_in_transit: no pending message with that sequence number");
    }

    std::optional<Agent> holder(const QubitLabel &label) const {
        auto it = custody_.find(label);
        if (it == custody_.end()) {
            return std::nullopt;
        }
        return it->second.holder;
    }

    bool in_transit(const QubitLabel &label) const {
        auto it = custody_.find(label);
        return it != custody_.end() && !it->second.holder && !it->second.lost;
    }

    /// Throws unless `agent` holds every label at `time`.
    void require_held(Agent agent, const Labels &labels, double time) const {
        for (const QubitLabel &l : labels) {
            auto it = custody_.find(l);
            if (it == custody_.end()) {
                throw CustodyViolation("label " + l.str() + " does not exist");
            }
            const CustodyRecord &c = it->second;
            if (c.lost) {
                throw CustodyViolation("label " + l.str() + " was lost");
            }
            if (!c.holder) {
                throw CustodyViolation("label " + l.str() + " is already in transit");
            }
            if (*c.holder != agent) {
                throw CustodyViolation(std::string(to_string(agent)) + " does not hold " + l.str() + " (held by " +
                                       to_string(*c.holder) + ")");
            }
            if (c.since > time) {
                throw CustodyViolation(std::string(to_string(agent)) + " does not hold " + l.str() + " until t = " +
                                       fmt12(c.since));
            }
        }
    }

    /// Remove a lost qubit from circulation.
    void lose(const QubitLabel &label, Agent holder, double time) {
        require_held(holder, {label}, time);
        record({label, std::nullopt, time, true});
    }

    std::uint64_t schedule(Message m) {
        if (!m.send_event.finite() || !m.receive_event.finite()) {
            throw std::invalid_argument("schedule: non-finite event");
        }
        if (m.send_event.t < clock_) {
            throw CausalityViolation("send at t = " + fmt12(m.send_event.t) + " precedes the clock t = " +
                                     fmt12(clock_));
        }
        if (!causal_ok(m.send_event, m.receive_event)) {
            throw CausalityViolation(std::string(to_string(m.sender)) + " -> " + to_string(m.receiver) +
                                     " would travel faster than light");
        }
        if (m.kind == MessageKind::QubitTransfer) {
            if (m.qubits.empty()) {
                throw std::invalid_argument("schedule: empty qubit transfer");
            }
            std::set<QubitLabel> seen;
            for (const QubitLabel &l : m.qubits) {
                if (!seen.insert(l).second) {
                    throw CustodyViolation("label " + l.str() + " listed twice in one transfer");
                }
            }
            require_held(m.sender, m.qubits, m.send_event.t);
            for (const QubitLabel &l : m.qubits) {
                record({l, std::nullopt, m.send_event.t, false});
            }
        }
        m.seq = next_seq_++;
        queue_.push(Key{m.receive_event.t, m.sender, m.seq});
        log_.push_back({m, ScheduledMessage::Status::Pending});
        index_[m.seq] = log_.size() - 1;
        return m.seq;
    }

    std::size_t pending() const {
        return queue_.size();
    }

    std::optional<double> next_time() const {
        if (queue_.empty()) {
            return std::nullopt;
        }
        return queue_.top().time;
    }

    /// Deliver the earliest pending message, or nothing if the queue is empty.
    std::optional<Message> step() {
        if (queue_.empty()) {
            return std::nullopt;
        }
        const Key k = queue_.top();
        queue_.pop();
        ScheduledMessage &s = log_[index_.at(k.seq)];
        s.status = ScheduledMessage::Status::Delivered;
        clock_ = k.time;
        if (s.message.kind == MessageKind::QubitTransfer) {
            for (const QubitLabel &l : s.message.qubits) {
                record({l, s.message.receiver, clock_, false});
            }
        }
        return s.message;
    }

    const std::vector<ScheduledMessage> &messages() const {
        return log_;
    }

    /// Every custody change in the order it happened.
    const std::vector<CustodyRecord> &custody_log() const {
        return history_;
    }

   private:
    struct Key {
        double time;
        Agent sender;
        std::uint64_t seq;
        bool operator>(const Key &o) const {
            return std::tie(time, sender, seq) > std::tie(o.time, o.sender, o.seq);
        }
    };

    void record(const CustodyRecord &c) {
        custody_[c.label] = c;
        history_.push_back(c);
    }

    double clock_;
    std::uint64_t next_seq_ = 0;
    std::priority_queue<Key, std::vector<Key>, std::greater<>> queue_;
    std::vector<ScheduledMessage> log_;
    std::map<std::uint64_t, std::size_t> index_;
    std::map<QubitLabel, CustodyRecord> custody_;
    std::vector<CustodyRecord> history_;
    std::set<std::tuple<Agent, Agent, Agent>> readers_;
};

// ─── Transcripts ─────────────────────────────────────────────────────────────

enum class RecordKind : std::uint8_t {
    Run,
    Prepare,
    QubitTransfer,
    ClassicalBit,
    Instruction,
    Measurement,
    Loss,
    Partition,
    Verdict
};

inline const char *to_string(RecordKind k) {
    switch (k) {
        case RecordKind::Run:
            return "RUN";
        case RecordKind::Prepare:
            return "PREPARE";
        case RecordKind::QubitTransfer:
            return "QUBIT_TRANSFER";
        case RecordKind::ClassicalBit:
            return "CLASSICAL_BIT";
        case RecordKind::Instruction:
            return "INSTRUCTION";
        case RecordKind::Measurement:
            return "MEASUREMENT";
        case RecordKind::Loss:
            return "LOSS";
        case RecordKind::Partition:
            return "PARTITION";
        case RecordKind::Verdict:
            return "VERDICT";
    }
    return "?";
}

inline RecordKind parse_record_kind(std::string_view text) {
    for (int k = 0; k <= static_cast<int>(RecordKind::Verdict); ++k) {
        if (text == to_string(static_cast<RecordKind>(k))) {
            return static_cast<RecordKind>(k);
        }
    }
    throw std::invalid_argument("unknown record kind '" + std::string(text) + "'");
}

inline bool is_message(RecordKind k) {
    return k == RecordKind::QubitTransfer || k == RecordKind::ClassicalBit || k == RecordKind::Instruction;
}

/// One transcript line.
///
/// Payload formats: label lists "W0P:1,W0P:2" (PREPARE, QUBIT_TRANSFER, LOSS),
/// "0"/"1" (CLASSICAL_BIT), "UNVEIL"/"ABSTAIN" (INSTRUCTION), "W0P:1,W0Q:1=PSI_MINUS"
/// or "CONTROL:0=1" (MEASUREMENT), "J0=1,3;J1=2,4" (PARTITION), "ACCEPT(0)",
/// "REJECT" or "NO_UNVEIL" (VERDICT), free text (RUN).
struct Record {
    double sim_time = 0;
    RecordKind kind = RecordKind::Run;
    std::string sender;
    std::string receiver;
    std::string payload;
    std::optional<Event> send_event;
    std::optional<Event> receive_event;

    std::string digest() const {
        return hex64(fnv1a64(payload));
    }

    static Record from_message(const Message &m) {
        Record r;
        r.sim_time = m.receive_event.t;
        r.kind = m.kind == MessageKind::QubitTransfer  ? RecordKind::QubitTransfer
                 : m.kind == MessageKind::ClassicalBit ? RecordKind::ClassicalBit
                                                       : RecordKind::Instruction;
        r.sender = to_string(m.sender);
        r.receiver = to_string(m.receiver);
        r.payload = m.payload();
        r.send_event = m.send_event;
        r.receive_event = m.receive_event;
        return r;
    }

    bool operator==(const Record &) const = default;
};

namespace detail {

inline nlohmann::ordered_json event_json(const std::optional<Event> &e) {
    if (!e) {
        return nullptr;
    }
    return nlohmann::ordered_json::array({e->t, e->x, e->y, e->z});
}

inline std::optional<Event> event_from_json(const nlohmann::ordered_json &j) {
    if (j.is_null()) {
        return std::nullopt;
    }
    if (!j.is_array() || j.size() != 4) {
        throw std::invalid_argument("event must be an array of four numbers");
    }
    return Event{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

}  // namespace detail

/// Ordered record of one protocol run. Event coordinates are written with
/// round-trip precision so that a replayed transcript audits identically.
class Transcript {
   public:
    void add(Record r) {
        records_.push_back(std::move(r));
    }

    const std::vector<Record> &records() const {
        return records_;
    }

    bool completed() const {
        return !records_.empty() && records_.back().kind == RecordKind::Verdict;
    }

    std::string to_jsonl() const {
        std::string out;
        for (const Record &r : records_) {
            nlohmann::ordered_json j;
            j["sim_time"] = r.sim_time;
            j["kind"] = to_string(r.kind);
            j["sender"] = r.sender;
            j["receiver"] = r.receiver;
            j["payload"] = r.payload;
            j["digest"] = r.digest();
            j["send_event"] = detail::event_json(r.send_event);
            j["receive_event"] = detail::event_json(r.receive_event);
            out += j.dump();
            out += '\n';
        }
        return out;
    }

    /// Parse concatenated transcripts; each RUN record starts a new one.
    static std::vector<Transcript> parse_jsonl(const std::string &text) {
        std::vector<Transcript> out;
        std::istringstream in(text);
        std::string line;
        int number = 0;
        while (std::getline(in, line)) {
            ++number;
            if (line.empty()) {
                continue;
            }
            Record r;
            try {
                const auto j = nlohmann::ordered_json::parse(line);
                r.sim_time = j.at("sim_time").get<double>();
                r.kind = parse_record_kind(j.at("kind").get<std::string>());
                r.sender = j.at("sender").get<std::string>();
                r.receiver = j.at("receiver").get<std::string>();
                r.payload = j.at("payload").get<std::string>();
                r.send_event = detail::event_from_json(j.at("send_event"));
                r.receive_event = detail::event_from_json(j.at("receive_event"));
                if (j.at("digest").get<std::string>() != r.digest()) {
                    throw std::invalid_argument("payload digest mismatch");
                }
            } catch (const std::exception &e) {
                throw std::runtime_error("transcript line " + std::to_string(number) + ": " + e.what());
            }
            if (r.kind == RecordKind::Run || out.empty()) {
                out.emplace_back();
            }
            out.back().add(std::move(r));
        }
        return out;
    }

   private:
    std::vector<Record> records_;
};

struct Violation {
    std::size_t index = 0;  // record position within the transcript
    std::string what;
};

struct AuditReport {
    std::vector<Violation> violations;
    bool ok() const {
        return violations.empty();
    }
};

/// Re-validate a transcript: clock monotonicity, causality of every message,
/// and the custody chain of every qubit label. Violations are collected, not thrown.
inline AuditReport audit(const Transcript &transcript) {
    AuditReport report;
    const auto &recs = transcript.records();
    auto flag = [&](std::size_t i, std::string what) { report.violations.push_back({i, std::move(what)}); };
    struct Held {
        std::string holder;
        double since;
    };
    std::map<QubitLabel, Held> custody;
    auto check_held = [&](std::size_t i, const std::string &agent, const QubitLabel &l, double time) {
        auto it = custody.find(l);
        if (it == custody.end()) {
            flag(i, agent + " uses " + l.str() + ", which nobody holds");
            return false;
        }
        if (it->second.holder != agent) {
            flag(i, agent + " uses " + l.str() + ", held by " + it->second.holder);
            return false;
        }
        if (it->second.since > time) {
            flag(i, agent + " uses " + l.str() + " before receiving it");
            return false;
        }
        return true;
    };
    bool verdict_seen = false;
    for (std::size_t i = 0; i < recs.size(); ++i) {
        const Record &r = recs[i];
        if (i > 0 && r.sim_time < recs[i - 1].sim_time) {
            flag(i, "sim_time decreases");
        }
        if (verdict_seen) {
            flag(i, "record after the verdict");
        }
        try {
            if (is_message(r.kind)) {
                if (!r.send_event || !r.receive_event) {
                    flag(i, "message without send/receive events");
                    continue;
                }
                if (!causal_ok(*r.send_event, *r.receive_event)) {
                    flag(i, "superluminal message " + r.sender + " -> " + r.receiver);
                }
                if (r.sim_time != r.receive_event->t) {
                    flag(i, "sim_time differs from the receive time");
                }
            }
            switch (r.kind) {
                case RecordKind::Prepare:
                    for (const QubitLabel &l : split_labels(r.payload)) {
                        if (custody.count(l)) {
                            flag(i, "duplicate custody of " + l.str());
                        } else {
                            custody[l] = {r.receiver, r.sim_time};
                        }
                    }
                    break;
                case RecordKind::QubitTransfer:
                    for (const QubitLabel &l : split_labels(r.payload)) {
                        if (r.send_event && check_held(i, r.sender, l, r.send_event->t)) {
                            custody[l] = {r.receiver, r.sim_time};
                        }
                    }
                    break;
                case RecordKind::Measurement: {
                    const auto eq = r.payload.find('=');
                    for (const QubitLabel &l : split_labels(std::string_view(r.payload).substr(0, eq))) {
                        check_held(i, r.sender, l, r.sim_time);
                    }
                    break;
                }
                case RecordKind::Loss:
                    for (const QubitLabel &l : split_labels(r.payload)) {
                        if (check_held(i, r.sender, l, r.sim_time)) {
                            custody.erase(l);
                        }
                    }
                    break;
                case RecordKind::Verdict:
                    verdict_seen = true;
                    break;
                default:
                    break;
            }
        } catch (const std::invalid_argument &e) {
            flag(i, std::string("malformed payload: ") + e.what());
        }
    }
    if (!verdict_seen) {
        flag(recs.size(), "no verdict record");
    }
    return report;
}

}  // namespace relbc

#endif  // RELBC_NETSIM_HPP
