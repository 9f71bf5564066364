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

#ifndef RELBC_CLI_HPP
#define RELBC_CLI_HPP

// Subcommand implementations. Each returns the process exit status:
// 0 when every executed check holds, 1 when one fails, 2 for bad input.

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "relbc/adversary.hpp"
#include "relbc/bounds.hpp"
#include "relbc/config.hpp"
#include "relbc/netsim.hpp"
#include "relbc/noise.hpp"
#include "relbc/protocol.hpp"

namespace relbc {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

struct Interval {
    double low = 0;
    double high = 0;
};

/// 95% Wilson score interval for `successes` out of `trials`.
inline Interval wilson_interval(std::uint64_t successes, std::uint64_t trials) {
    if (trials == 0) {
        return {0, 1};
    }
    constexpr double z = 1.959963984540054;
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double denom = 1 + z * z / n;
    const double center = (p + z * z / (2 * n)) / denom;
    const double half = z / denom * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n));
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

/// Tallies over the repetitions of one configuration.
struct BatchStats {
    std::uint64_t runs = 0;
    std::uint64_t accepted = 0;  // ACCEPT of the repetition's unveil target
    std::uint64_t rejected = 0;
    std::uint64_t no_unveil = 0;
    std::array<std::uint64_t, 2> runs_for{0, 0};
    std::array<std::uint64_t, 2> accepted_for{0, 0};
    std::uint64_t audit_failures = 0;
    std::string transcripts;  // concatenated JSONL, when kept

    double accept_rate() const {
        return runs ? static_cast<double>(accepted) / static_cast<double>(runs) : 0.0;
    }
    std::optional<double> p(int bit) const {
        const auto b = static_cast<std::size_t>(bit);
        if (runs_for[b] == 0) {
            return std::nullopt;
        }
        return static_cast<double>(accepted_for[b]) / static_cast<double>(runs_for[b]);
    }
};

/// Repetition r runs with seed stream_seed(base, r).
inline BatchStats run_batch(const RunConfig &cfg, std::uint64_t base_seed, bool keep_transcripts) {
    BatchStats stats;
    std::array<std::optional<AliceStrategy>, 3> strategies;  // targets −1, 0, 1
    for (std::uint64_t r = 0; r < static_cast<std::uint64_t>(cfg.repetitions); ++r) {
        const int target = unveil_target(cfg.strategy.unveil, r);
        auto &slot = strategies[static_cast<std::size_t>(target + 1)];
        if (!slot) {
            slot = make_strategy(cfg.strategy, cfg.params.n, target);
        }
        ProtocolParams params = cfg.params;
        params.seed = stream_seed(base_seed, r);
        const RunResult res = run_protocol(params, *slot, cfg.noise);
        ++stats.runs;
        if (target >= 0) {
            ++stats.runs_for[static_cast<std::size_t>(target)];
        }
        switch (res.verdict.kind) {
            case Verdict::Kind::Accept:
                if (res.verdict.bit == target) {
                    ++stats.accepted;
                    ++stats.accepted_for[static_cast<std::size_t>(target)];
                }
                break;
            case Verdict::Kind::Reject:
                ++stats.rejected;
                break;
            case Verdict::Kind::NoUnveil:
                ++stats.no_unveil;
                break;
        }
        if (!audit(res.transcript).ok()) {
            ++stats.audit_failures;
        }
        if (keep_transcripts) {
            stats.transcripts += res.transcript.to_jsonl();
        }
    }
    return stats;
}

inline nlohmann::ordered_json summary_json(const RunConfig &cfg, const BatchStats &s) {
    nlohmann::ordered_json j;
    j["variant"] = to_string(cfg.params.variant);
    j["N"] = cfg.params.n;
    j["epsilon"] = round12(cfg.params.epsilon);
    j["verify_policy"] = to_string(cfg.params.verify_policy);
    j["strategy"] = to_string(cfg.strategy.kind);
    j["unveil"] = to_string(cfg.strategy.unveil);
    j["q"] = round12(cfg.noise.depolarizing_q);
    j["l"] = round12(cfg.noise.loss_l);
    j["drift_rate"] = round12(cfg.params.drift.rate);
    j["drift_labeling"] = to_string(cfg.params.drift.labeling);
    j["seed"] = cfg.params.seed;
    j["repetitions"] = s.runs;
    j["accepted"] = s.accepted;
    j["rejected"] = s.rejected;
    j["no_unveil"] = s.no_unveil;
    j["accept_rate"] = round12(s.accept_rate());
    const Interval ci = wilson_interval(s.accepted, s.runs);
    j["ci_low"] = round12(ci.low);
    j["ci_high"] = round12(ci.high);
    if (cfg.strategy.unveil == UnveilMode::Both) {
        const double p0 = s.p(0).value_or(0);
        const double p1 = s.p(1).value_or(0);
        const double var0 = s.runs_for[0] ? p0 * (1 - p0) / static_cast<double>(s.runs_for[0]) : 0;
        const double var1 = s.runs_for[1] ? p1 * (1 - p1) / static_cast<double>(s.runs_for[1]) : 0;
        j["p0"] = round12(p0);
        j["p1"] = round12(p1);
        j["p_sum"] = round12(p0 + p1);
        j["p_sum_sigma"] = round12(std::sqrt(var0 + var1));
    }
    j["audit_failures"] = s.audit_failures;
    j["transcript_digest"] = hex64(fnv1a64(s.transcripts));
    return j;
}

/// Writes the transcripts to cfg.output and the summary to cfg.output + ".summary.json"
/// (and to `out`). Fails the check if any transcript does not audit cleanly.
inline int cmd_run(const RunConfig &cfg, std::ostream &out, std::ostream &err) {
    BatchStats stats;
    try {
        stats = run_batch(cfg, cfg.params.seed, true);
    } catch (const std::exception &e) {
        err << "run: " << e.what() << "\n";
        return kExitUsage;
    }
    const std::string summary = summary_json(cfg, stats).dump(2) + "\n";
    std::ofstream t(cfg.output, std::ios::binary);
    std::ofstream s(cfg.output + ".summary.json", std::ios::binary);
    if (!t || !s) {
        err << "run: cannot write " << cfg.output << "\n";
        return kExitUsage;
    }
    t << stats.transcripts;
    s << summary;
    out << summary;
    return stats.audit_failures == 0 ? kExitOk : kExitCheckFailed;
}

// ─── bounds ──────────────────────────────────────────────────────────────────

inline std::string bounds_csv_header() {
    return "quantity,variant,N,delta,computed_norm,norm_bound,cheat_value,paper_bound,satisfied\n";
}

inline std::string csv_number(double v) {
    return std::isnan(v) ? "" : fmt12(v);
}

inline std::string bounds_csv_row(const BoundReport &r) {
    return r.quantity + "," + to_string(r.variant) + "," + std::to_string(r.n) + "," + fmt12(r.delta) + "," +
           csv_number(r.computed_norm) + "," + csv_number(r.norm_bound) + "," + csv_number(r.cheat_value) + "," +
           csv_number(r.paper_bound) + "," + (r.satisfied ? "true" : "false") + "\n";
}

/// The bound battery. Rows whose δN is not an integer are skipped.
inline std::vector<BoundReport> bound_battery(const BoundsSpec &spec) {
    std::vector<BoundReport> rows;
    for (int n : spec.n) {
        for (double delta : spec.delta) {
            if (!(delta >= 0 && delta < 1)) {
                throw std::invalid_argument("bounds.delta must lie in [0, 1)");
            }
            if (std::abs(delta * n - std::round(delta * n)) > 1e-9) {
                continue;
            }
            rows.push_back(etbc_bound_report(n, delta));
        }
        if (n % 2 == 0) {
            rows.push_back(etrbc_norm_report(n));
        }
    }
    for (int n : spec.tail_n) {
        rows.push_back(etrbc_tail_report(n));
    }
    std::sort(rows.begin(), rows.end(), [](const BoundReport &a, const BoundReport &b) {
        return std::tie(a.quantity, a.n, a.delta) < std::tie(b.quantity, b.n, b.delta);
    });
    return rows;
}

inline int cmd_bounds(const BoundsSpec &spec, std::ostream &out, std::ostream &err) {
    std::vector<BoundReport> rows;
    try {
        rows = bound_battery(spec);
    } catch (const std::exception &e) {
        err << "bounds: " << e.what() << "\n";
        return kExitUsage;
    }
    out << bounds_csv_header();
    bool ok = true;
    for (const BoundReport &r : rows) {
        out << bounds_csv_row(r);
        ok = ok && r.satisfied;
    }
    return ok ? kExitOk : kExitCheckFailed;
}

// ─── sweep ───────────────────────────────────────────────────────────────────

/// Exact p_0 + p_1 for the configuration, when a closed form or eigenvalue exists.
inline std::optional<double> exact_sum(const RunConfig &cfg) {
    const int n = cfg.params.n;
    const int tested = cfg.params.variant == Variant::ETBC ? n : n / 2;
    const double eps = cfg.params.epsilon;
    const bool noiseless = cfg.noise.depolarizing_q == 0 && cfg.noise.loss_l == 0 && eps == 0;
    switch (cfg.strategy.kind) {
        case StrategyKind::Honest:
            if (cfg.params.drift.rate != 0) {
                return std::nullopt;
            }
            return honest_acceptance_prob(tested, per_test_pass_probability(cfg.noise), eps) +
                   honest_acceptance_prob(tested, mismatched_pass_probability(cfg.noise), eps);
        case StrategyKind::Superposition:
            return honest_acceptance_prob(tested, per_test_pass_probability(cfg.noise), eps);
        case StrategyKind::OptimalCheat:
            if (cfg.params.variant == Variant::ETBC && noiseless && n <= kMaxSpectralN) {
                return exact_cheat_value(n);
            }
            return std::nullopt;
        case StrategyKind::Custom:
            if (cfg.params.variant == Variant::ETBC && noiseless) {
                const AliceStrategy s = make_strategy(cfg.strategy, n, 0);
                const auto p = test_expectations(*s.state, n);
                return p[0] + p[1];
            }
            return std::nullopt;
    }
    return std::nullopt;
}

inline std::string sweep_csv_header() {
    return "N,epsilon,q,l,drift_rate,alpha,repetitions,accept_rate,ci_low,ci_high,p0,p1,sum,exact_sum,advantage,"
           "sum_bound,bound_margin\n";
}

/// Largest N for which the drift advantage column is filled.
inline constexpr int kMaxAdvantageN = 8;

inline std::string sweep_row(const RunConfig &cfg, const BatchStats &s, bool alpha_axis) {
    auto opt = [](std::optional<double> v) { return v ? fmt12(*v) : std::string(); };
    const Interval ci = wilson_interval(s.accepted, s.runs);
    std::optional<double> sum;
    if (cfg.strategy.unveil == UnveilMode::Both && s.p(0) && s.p(1)) {
        sum = *s.p(0) + *s.p(1);
    }
    const std::optional<double> exact = exact_sum(cfg);
    std::optional<double> advantage;
    if (cfg.params.n <= kMaxAdvantageN) {
        advantage = bob_early_guess_advantage(cfg.params.n, cfg.params.drift);
    }
    const double bound =
        cfg.params.variant == Variant::ETBC ? etbc_paper_bound(cfg.params.n) : etrbc_sum_bound(cfg.params.n);
    std::optional<double> margin;
    if (sum) {
        margin = bound - *sum;
    } else if (exact) {
        margin = bound - *exact;
    }
    std::string row = std::to_string(cfg.params.n) + "," + fmt12(cfg.params.epsilon) + "," +
                      fmt12(cfg.noise.depolarizing_q) + "," + fmt12(cfg.noise.loss_l) + "," +
                      fmt12(cfg.params.drift.rate) + "," +
                      (alpha_axis || cfg.strategy.kind == StrategyKind::Superposition
                           ? fmt12(cfg.strategy.alpha.real())
                           : std::string()) +
                      "," + std::to_string(s.runs) + "," + fmt12(s.accept_rate()) + "," + fmt12(ci.low) + "," +
                      fmt12(ci.high) + "," + opt(s.p(0)) + "," + opt(s.p(1)) + "," + opt(sum) + "," + opt(exact) +
                      "," + opt(advantage) + "," + fmt12(bound) + "," + opt(margin) + "\n";
    return row;
}

/// One CSV row per grid point, in ascending lexicographic order of
/// (N, ε, q, l, drift rate, α). Grid point g uses base seed stream_seed(seed, g).
inline int cmd_sweep(const RunConfig &base, std::ostream &out, std::ostream &err) {
    if (base.sweep.empty()) {
        err << "sweep: empty grid (set at least one sweep.* key)\n";
        return kExitUsage;
    }
    auto axis = [](std::vector<double> v, double fallback) {
        if (v.empty()) {
            v.push_back(fallback);
        }
        std::sort(v.begin(), v.end());
        return v;
    };
    std::vector<int> ns = base.sweep.n.empty() ? std::vector<int>{base.params.n} : base.sweep.n;
    std::sort(ns.begin(), ns.end());
    const auto eps = axis(base.sweep.epsilon, base.params.epsilon);
    const auto qs = axis(base.sweep.q, base.noise.depolarizing_q);
    const auto ls = axis(base.sweep.l, base.noise.loss_l);
    const auto rates = axis(base.sweep.drift_rate, base.params.drift.rate);
    const auto alphas = axis(base.sweep.alpha, base.strategy.alpha.real());
    const bool alpha_axis = !base.sweep.alpha.empty();
    std::ostringstream body;
    std::uint64_t g = 0;
    try {
        for (int n : ns) {
            for (double e : eps) {
                for (double q : qs) {
                    for (double l : ls) {
                        for (double rate : rates) {
                            for (double a : alphas) {
                                RunConfig cfg = base;
                                cfg.params.n = n;
                                cfg.params.epsilon = e;
                                cfg.noise.depolarizing_q = q;
                                cfg.noise.loss_l = l;
                                cfg.params.drift.rate = rate;
                                if (alpha_axis) {
                                    if (!(a >= -1 && a <= 1)) {
                                        throw std::invalid_argument("sweep.alpha values must lie in [-1, 1]");
                                    }
                                    cfg.strategy.alpha = a;
                                    cfg.strategy.beta = std::sqrt(1 - a * a);
                                }
                                cfg.validate();
                                const BatchStats s = run_batch(cfg, stream_seed(base.params.seed, g++), false);
                                body << sweep_row(cfg, s, alpha_axis);
                            }
                        }
                    }
                }
            }
        }
    } catch (const std::exception &e) {
        err << "sweep: " << e.what() << "\n";
        return kExitUsage;
    }
    out << sweep_csv_header() << body.str();
    return kExitOk;
}

// ─── audit ───────────────────────────────────────────────────────────────────

inline int cmd_audit(const std::string &path, std::ostream &out, std::ostream &err) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        err << "audit: cannot read " << path << "\n";
        return kExitUsage;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    std::vector<Transcript> transcripts;
    try {
        transcripts = Transcript::parse_jsonl(buf.str());
    } catch (const std::exception &e) {
        err << "audit: " << e.what() << "\n";
        return kExitUsage;
    }
    std::size_t bad = 0;
    for (std::size_t t = 0; t < transcripts.size(); ++t) {
        const AuditReport r = audit(transcripts[t]);
        for (const Violation &v : r.violations) {
            out << "transcript " << t << " record " << v.index << ": " << v.what << "\n";
        }
        bad += r.ok() ? 0 : 1;
    }
    out << (bad ? "FAIL " : "OK ") << transcripts.size() << " transcript(s), " << bad << " with violations\n";
    return bad ? kExitCheckFailed : kExitOk;
}

// ─── geometry ────────────────────────────────────────────────────────────────

inline nlohmann::ordered_json event_array(const Event &e) {
    return nlohmann::ordered_json::array({round12(e.t), round12(e.x), round12(e.y), round12(e.z)});
}

/// Classification and, per bit, the verification events of every policy when
/// A_b unveils at t(Q_b) and B_c learns b at that time.
inline int cmd_geometry(const RunConfig &cfg, std::ostream &out) {
    const CommitmentGeometry &g = cfg.params.geometry;
    nlohmann::ordered_json j;
    j["classification"] = to_string(g.classification);
    j["P"] = event_array(g.commit_point);
    for (int b = 0; b < 2; ++b) {
        const Event &q = g.unveil_point(b);
        nlohmann::ordered_json row;
        row["Q"] = event_array(q);
        row["interval_from_P"] = to_string(interval_class(g.commit_point, q));
        if (g.valid()) {
            for (VerifyPolicy policy : {VerifyPolicy::AtP, VerifyPolicy::AtQb, VerifyPolicy::Midpoint}) {
                nlohmann::ordered_json e;
                e["earliest"] = event_array(earliest_verification_event(g, b, q.t, policy));
                e["informed"] = event_array(informed_verification_event(g, b, q.t, q.t, policy));
                row[to_string(policy)] = e;
            }
            row["ETRBC"] = event_array(etrbc_verification_event(g, b, q.t));
        }
        j[b == 0 ? "bit0" : "bit1"] = row;
    }
    out << j.dump(2) << "\n";
    return g.valid() ? kExitOk : kExitCheckFailed;
}

}  // namespace relbc

#endif  // RELBC_CLI_HPP
