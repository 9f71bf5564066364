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


#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "relbc/relbc.hpp"

namespace {

std::optional<relbc::RunConfig> load_config(const std::string &path, std::optional<std::uint64_t> seed,
                                           std::optional<int> reps, const std::string &out_path) {
    relbc::RunConfig cfg;
    try {
        if (!path.empty()) {
            std::ifstream in(path, std::ios::binary);
            if (!in) {
                std::cerr << "cannot read config " << path << "\n";
                return std::nullopt;
            }
            std::stringstream buf;
            buf << in.rdbuf();
            cfg = relbc::parse_config(buf.str());
        }
        if (seed) {
            cfg.params.seed = *seed;
        }
        if (reps) {
            cfg.repetitions = *reps;
        }
        if (!out_path.empty()) {
            cfg.output = out_path;
        }
        cfg.validate();
    } catch (const relbc::ConfigError &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return std::nullopt;
    } catch (const std::exception &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return std::nullopt;
    }
    return cfg;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Relativistic quantum bit commitment simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> reps;
    std::string out_path;
    std::string audit_path;

    auto add_common = [&](CLI::App *sub, bool with_out, bool with_reps) {
        sub->add_option("--config", config_path, "Configuration file (key = value)");
        sub->add_option("--seed", seed, "Override the base seed");
        if (with_reps) {
            sub->add_option("--reps", reps, "Override the repetition count");
        }
        if (with_out) {
            sub->add_option("--out", out_path, "Override the transcript output path");
        }
    };

    CLI::App *run = app.add_subcommand("run", "Run the protocol and write transcripts plus a summary");
    add_common(run, true, true);
    CLI::App *bounds = app.add_subcommand("bounds", "Check the operator-norm and cheating bounds");
    add_common(bounds, false, false);
    CLI::App *sweep = app.add_subcommand("sweep", "Monte Carlo sweep over a parameter grid");
    add_common(sweep, false, true);
    CLI::App *audit = app.add_subcommand("audit", "Audit a JSONL transcript file");
    audit->add_option("path", audit_path, "Transcript file")->required();
    CLI::App *geometry = app.add_subcommand("geometry", "Classify the geometry and list verification events");
    add_common(geometry, false, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return relbc::kExitUsage;
    }

    if (audit->parsed()) {
        return relbc::cmd_audit(audit_path, std::cout, std::cerr);
    }
    const auto cfg = load_config(config_path, seed, reps, out_path);
    if (!cfg) {
        return relbc::kExitUsage;
    }
    if (run->parsed()) {
        return relbc::cmd_run(*cfg, std::cout, std::cerr);
    }
    if (bounds->parsed()) {
        return relbc::cmd_bounds(cfg->bounds, std::cout, std::cerr);
    }
    if (sweep->parsed()) {
        return relbc::cmd_sweep(*cfg, std::cout, std::cerr);
    }
    return relbc::cmd_geometry(*cfg, std::cout);
}
