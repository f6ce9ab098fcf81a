// Copyright 2026 The TerraSeg Authors
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

// terraseg: command-line front end of the segmentation pipeline.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "terraseg/metrics/confusion.hpp"
#include "terraseg/pipeline/commands.hpp"
#include "terraseg/pipeline/config.hpp"

namespace {

namespace tp = terraseg::pipeline;

// TERRASEG_LOG=quiet silences progress lines; anything else keeps them.
tp::LogFn make_logger() {
  const char* env = std::getenv("TERRASEG_LOG");
  if (env != nullptr && std::string(env) == "quiet") return {};
  return [](const std::string& line) { std::cerr << "terraseg: " << line << '\n'; };
}

int run(const std::string& command, const tp::PipelineConfig& config) {
  const tp::LogFn log = make_logger();
  if (command == "ingest") {
    std::cout << tp::cmd_ingest(config, log).dump(2) << '\n';
  } else if (command == "split") {
    std::cout << tp::cmd_split(config, log).dump(2) << '\n';
  } else if (command == "train") {
    std::cout << tp::history_to_text(tp::cmd_train(config, log));
  } else if (command == "evaluate") {
    std::cout << terraseg::metrics::report_to_text(tp::cmd_evaluate(config, log));
  } else if (command == "predict") {
    const auto mask = tp::cmd_predict(config, log);
    std::cout << (config.workspace / "prediction.pgm").string() << ' ' << mask.width() << 'x'
              << mask.height() << '\n';
  } else {
    std::cout << tp::cmd_query(config, log) << '\n';
  }
  return tp::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Land-cover segmentation pipeline over Sentinel-2 tiles", "terraseg"};
  app.require_subcommand(1);

  std::string config_file;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  for (const char* name : {"ingest", "split", "train", "evaluate", "predict", "query"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_file, "pipeline YAML file")->required();
    sub->add_option("--seed", seed, "overrides the config seed");
    sub->add_option("--out", out, "overrides the workspace directory");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return tp::kExitConfig;
  }

  try {
    const tp::PipelineConfig config = tp::load_config(
        config_file, seed,
        out ? std::optional<std::filesystem::path>(*out) : std::nullopt);
    return run(app.get_subcommands().front()->get_name(), config);
  } catch (const terraseg::Error& e) {
    std::cerr << "terraseg: error[" << terraseg::category_name(e.category()) << "]: " << e.what()
              << '\n';
    return tp::exit_code_for(e.category());
  } catch (const std::exception& e) {
    std::cerr << "terraseg: error[runtime]: " << e.what() << '\n';
    return tp::kExitRuntime;
  }
}
