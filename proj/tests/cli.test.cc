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


#include "relbc/cli.hpp"

#include <cstdio>
#include <filesystem>

#include "gtest/gtest.h"

using namespace relbc;

namespace {

std::vector<std::vector<std::string>> csv(const std::string &text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::size_t start = 0;
        while (true) {
            const auto comma = line.find(',', start);
            cells.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) {
                break;
            }
            start = comma + 1;
        }
        rows.push_back(cells);
    }
    return rows;
}

std::size_t column(const std::vector<std::string> &header, const std::string &name) {
    const auto it = std::find(header.begin(), header.end(), name);
    EXPECT_NE(it, header.end()) << name;
    return static_cast<std::size_t>(it - header.begin());
}

bool is_number(const std::string &s) {
    char *end = nullptr;
    std::strtod(s.c_str(), &end);
    return !s.empty() && end == s.c_str() + s.size();
}

// A value printed with at most 12 significant digits reads back to the same text.
bool twelve_digits(const std::string &s) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", std::strtod(s.c_str(), nullptr));
    return s == buf;
}

std::filesystem::path temp_path(const std::string &name) {
    return std::filesystem::temp_directory_path() / ("relbc_cli_test_" + name);
}

}  // namespace

TEST(cli, wilson_interval_solves_score_equation) {
    const double z = 1.959963984540054;
    for (auto [k, n] : {std::pair{0, 10}, {3, 10}, {10, 10}, {500, 1000}, {1, 10000}}) {
        const Interval ci = wilson_interval(k, n);
        const double p = static_cast<double>(k) / n;
        for (double bound : {ci.low, ci.high}) {
            // Endpoints are the roots of (p − π)² = z² π(1 − π)/n.
            ASSERT_NEAR((p - bound) * (p - bound), z * z * bound * (1 - bound) / n, 1e-12) << k << "/" << n;
        }
        ASSERT_LE(ci.low, p + 1e-12);
        ASSERT_GE(ci.high, p - 1e-12);
    }
    ASSERT_EQ(wilson_interval(0, 0).high, 1);
}

TEST(cli, bounds_default_battery_passes) {
    std::ostringstream out, err;
    ASSERT_EQ(cmd_bounds(BoundsSpec{}, out, err), kExitOk) << err.str();
    const auto rows = csv(out.str());
    const auto &h = rows.front();
    const std::size_t q = column(h, "quantity"), n = column(h, "N"), norm = column(h, "computed_norm"),
                      ok = column(h, "satisfied");
    int central = 0;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        ASSERT_EQ(rows[r][ok], "true") << out.str();
        if (rows[r][q] == "etbc_norm" && std::stod(rows[r][column(h, "delta")]) == 0) {
            const int nn = std::stoi(rows[r][n]);
            ASSERT_NEAR(std::stod(rows[r][norm]), std::exp2(-nn), 1e-11);
            ++central;
        }
    }
    ASSERT_EQ(central, 4) << out.str();
}

TEST(cli, bounds_rows_sorted_and_twelve_digits) {
    BoundsSpec spec;
    spec.n = {2, 3};
    spec.delta = {0, 0.5, 1.0 / 3};
    std::ostringstream out, err;
    ASSERT_EQ(cmd_bounds(spec, out, err), kExitOk);
    const auto rows = csv(out.str());
    for (std::size_t r = 1; r < rows.size(); ++r) {
        for (const std::string &cell : rows[r]) {
            if (is_number(cell)) {
                ASSERT_TRUE(twelve_digits(cell)) << cell;
            }
        }
        if (r > 1 && rows[r][0] == rows[r - 1][0]) {
            ASSERT_LE(std::stoi(rows[r - 1][2]), std::stoi(rows[r][2]));
        }
    }
}

TEST(cli, bounds_bad_delta_is_usage_error) {
    BoundsSpec spec;
    spec.delta = {1.5};
    std::ostringstream out, err;
    ASSERT_EQ(cmd_bounds(spec, out, err), kExitUsage);
    ASSERT_FALSE(err.str().empty());
}

TEST(cli, sweep_optimal_cheat_sums) {
    RunConfig cfg;
    cfg.strategy.kind = StrategyKind::OptimalCheat;
    cfg.strategy.unveil = UnveilMode::Both;
    cfg.repetitions = 200;
    cfg.sweep.n = {3, 1, 2};
    std::ostringstream out, err;
    ASSERT_EQ(cmd_sweep(cfg, out, err), kExitOk) << err.str();
    const auto rows = csv(out.str());
    ASSERT_EQ(rows.size(), 4u);
    const std::size_t exact = column(rows[0], "exact_sum");
    const double expected[] = {1.5, 1.25, 1.125};
    for (int n = 1; n <= 3; ++n) {
        ASSERT_EQ(rows[static_cast<std::size_t>(n)][0], std::to_string(n));
        ASSERT_NEAR(std::stod(rows[static_cast<std::size_t>(n)][exact]), expected[n - 1], 1e-9);
        ASSERT_GT(std::stod(rows[static_cast<std::size_t>(n)][column(rows[0], "bound_margin")]), -0.5);
    }
}

TEST(cli, sweep_drift_advantage_vanishes_with_batch_swap) {
    RunConfig cfg;
    cfg.params.n = 2;
    cfg.repetitions = 10;
    cfg.sweep.drift_rate = {0, 0.1, 0.3};
    std::ostringstream seq_out, swap_out, err;
    ASSERT_EQ(cmd_sweep(cfg, seq_out, err), kExitOk) << err.str();
    cfg.params.drift.labeling = Labeling::RandomBatchSwap;
    ASSERT_EQ(cmd_sweep(cfg, swap_out, err), kExitOk) << err.str();
    const auto seq = csv(seq_out.str());
    const auto swap = csv(swap_out.str());
    const std::size_t adv = column(seq[0], "advantage");
    for (std::size_t r = 1; r < seq.size(); ++r) {
        ASSERT_LT(std::abs(std::stod(swap[r][adv])), 1e-12);
        if (r > 1) {
            ASSERT_GT(std::stod(seq[r][adv]), 0);
        }
    }
}

TEST(cli, sweep_slack_below_error_rate_kills_acceptance) {
    RunConfig cfg;
    cfg.repetitions = 20;
    cfg.noise.depolarizing_q = 0.2;
    cfg.params.epsilon = 0.05;
    cfg.sweep.n = {10, 40, 160};
    std::ostringstream out, err;
    ASSERT_EQ(cmd_sweep(cfg, out, err), kExitOk) << err.str();
    const auto rows = csv(out.str());
    const std::size_t exact = column(rows[0], "exact_sum");
    double prev = 3;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const double v = std::stod(rows[r][exact]);
        ASSERT_LT(v, prev);
        prev = v;
    }
    ASSERT_LT(prev, 1e-3);
}

TEST(cli, sweep_empty_grid_is_usage_error) {
    std::ostringstream out, err;
    ASSERT_EQ(cmd_sweep(RunConfig{}, out, err), kExitUsage);
    ASSERT_TRUE(out.str().empty());
}

TEST(cli, sweep_is_deterministic) {
    RunConfig cfg;
    cfg.repetitions = 50;
    cfg.noise.depolarizing_q = 0.3;
    cfg.sweep.epsilon = {0, 0.4};
    cfg.sweep.l = {0, 0.1};
    std::ostringstream a, b, err;
    ASSERT_EQ(cmd_sweep(cfg, a, err), kExitOk);
    ASSERT_EQ(cmd_sweep(cfg, b, err), kExitOk);
    ASSERT_EQ(a.str(), b.str());
    ASSERT_EQ(csv(a.str()).size(), 5u);
}

TEST(cli, run_writes_transcript_and_summary) {
    RunConfig cfg;
    cfg.repetitions = 1000;
    cfg.output = temp_path("honest.jsonl").string();
    std::ostringstream out, err;
    ASSERT_EQ(cmd_run(cfg, out, err), kExitOk) << err.str();
    const auto summary = nlohmann::json::parse(out.str());
    ASSERT_EQ(summary["accept_rate"].get<double>(), 1.0);
    ASSERT_EQ(summary["accepted"].get<int>(), 1000);
    ASSERT_EQ(summary["audit_failures"].get<int>(), 0);
    ASSERT_TRUE(std::filesystem::exists(cfg.output + ".summary.json"));

    std::ostringstream audit_out;
    ASSERT_EQ(cmd_audit(cfg.output, audit_out, err), kExitOk);
    ASSERT_NE(audit_out.str().find("OK 1000 transcript(s)"), std::string::npos);
}

TEST(cli, run_cross_unveil_rate) {
    RunConfig cfg;
    cfg.repetitions = 10000;
    cfg.strategy.unveil = UnveilMode::Bit1;
    cfg.output = temp_path("cross.jsonl").string();
    std::ostringstream out, err;
    ASSERT_EQ(cmd_run(cfg, out, err), kExitOk);
    const auto summary = nlohmann::json::parse(out.str());
    const double p = 1.0 / 64;
    ASSERT_LE(std::abs(summary["accept_rate"].get<double>() - p), 4 * std::sqrt(p * (1 - p) / 10000));
    ASSERT_LE(summary["ci_low"].get<double>(), p);
    ASSERT_GE(summary["ci_high"].get<double>(), p);
}

TEST(cli, run_summary_field_order) {
    RunConfig cfg;
    cfg.repetitions = 4;
    cfg.strategy.unveil = UnveilMode::Both;
    cfg.output = temp_path("order.jsonl").string();
    std::ostringstream out, err;
    ASSERT_EQ(cmd_run(cfg, out, err), kExitOk);
    const auto summary = nlohmann::ordered_json::parse(out.str());
    std::vector<std::string> keys;
    for (const auto &[k, v] : summary.items()) {
        keys.push_back(k);
    }
    const std::vector<std::string> expected{
        "variant",  "N",        "epsilon",  "verify_policy", "strategy", "unveil",      "q",
        "l",        "drift_rate", "drift_labeling", "seed", "repetitions", "accepted", "rejected",
        "no_unveil", "accept_rate", "ci_low", "ci_high",    "p0",       "p1",          "p_sum",
        "p_sum_sigma", "audit_failures", "transcript_digest"};
    ASSERT_EQ(keys, expected);
    ASSERT_EQ(summary["p0"].get<double>(), 1.0);
    ASSERT_EQ(summary["p1"].get<double>(), 0.0);
}

TEST(cli, run_is_byte_identical_per_seed) {
    RunConfig cfg;
    cfg.repetitions = 30;
    cfg.noise = {0.1, 0.1};
    cfg.params.seed = 99;
    std::string transcripts[2], summaries[2];
    for (int k = 0; k < 2; ++k) {
        cfg.output = temp_path("det" + std::to_string(k) + ".jsonl").string();
        std::ostringstream out, err;
        ASSERT_EQ(cmd_run(cfg, out, err), kExitOk);
        std::ifstream t(cfg.output, std::ios::binary);
        std::ifstream s(cfg.output + ".summary.json", std::ios::binary);
        transcripts[k] = std::string(std::istreambuf_iterator<char>(t), {});
        summaries[k] = std::string(std::istreambuf_iterator<char>(s), {});
    }
    ASSERT_FALSE(transcripts[0].empty());
    ASSERT_EQ(transcripts[0], transcripts[1]);
    ASSERT_EQ(summaries[0], summaries[1]);
}

TEST(cli, audit_flags_tampered_file) {
    RunConfig cfg;
    cfg.repetitions = 2;
    cfg.output = temp_path("tamper.jsonl").string();
    std::ostringstream out, err;
    ASSERT_EQ(cmd_run(cfg, out, err), kExitOk);
    std::ifstream in(cfg.output, std::ios::binary);
    std::string text(std::istreambuf_iterator<char>(in), {});
    // Move one delivery back in time.
    const auto pos = text.find("\"sim_time\":1");
    ASSERT_NE(pos, std::string::npos);
    text.replace(pos, 12, "\"sim_time\":0");
    const std::string bad = temp_path("tampered.jsonl").string();
    std::ofstream(bad, std::ios::binary) << text;
    std::ostringstream audit_out;
    ASSERT_EQ(cmd_audit(bad, audit_out, err), kExitCheckFailed);
    ASSERT_NE(audit_out.str().find("FAIL"), std::string::npos);
    ASSERT_EQ(cmd_audit(temp_path("missing.jsonl").string(), audit_out, err), kExitUsage);
}

TEST(cli, geometry_reports_classification) {
    std::ostringstream out;
    ASSERT_EQ(cmd_geometry(RunConfig{}, out), kExitOk);
    const auto j = nlohmann::json::parse(out.str());
    ASSERT_EQ(j["classification"], "FFPD");
    ASSERT_EQ(j["bit1"]["Q"][1].get<double>(), -3);
    ASSERT_TRUE(j["bit0"].contains("ETRBC"));
}
