// Copyright 2026 The Argforge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// argforge <stage> --config <path> [--seed N] [--out DIR]
// argforge serve --config <path> [--host H] [--port P] [--static DIR]
//
// Exit status: 0 ok, 1 validation failure, 2 missing input, 3 port in use.

#include <csignal>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <thread>

#include <CLI11.hpp>

#include "argforge/annotation_server.hpp"
#include "argforge/config.hpp"
#include "argforge/io.hpp"
#include "argforge/pipeline.hpp"
#include "argforge/subprocess.hpp"

namespace {

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
};

void add_common(CLI::App* cmd, CommonOptions* opts) {
  cmd->add_option("--config,-c", opts->config,
                  "Pipeline config file (default: $ARGFORGE_CONFIG)");
  cmd->add_option("--seed", opts->seed, "Override the global seed");
  cmd->add_option("--out", opts->out, "Override the output directory");
}

argforge::config::PipelineConfig resolve_config(const CommonOptions& opts) {
  std::string path = opts.config;
  if (path.empty()) {
    if (const char* env = std::getenv("ARGFORGE_CONFIG")) path = env;
  }
  if (path.empty()) {
    throw argforge::ValidationError("no config given; pass --config or set ARGFORGE_CONFIG");
  }
  auto config = argforge::config::load_config(path);
  if (opts.seed) config.seed = *opts.seed;
  if (!opts.out.empty()) config.out_dir = std::filesystem::absolute(opts.out);
  return config;
}

argforge::annotation::AnnotationServer* g_server = nullptr;

void handle_signal(int) {
  if (g_server) g_server->stop();
}

int serve(const CommonOptions& opts, const std::string& host, int port,
          const std::string& static_dir) {
  using namespace argforge;
  const auto config = resolve_config(opts);
  const auto tasks_path = config.out_dir / pipeline::paths::kTasks;
  auto tasks = annotation::load_tasks(tasks_path);
  const auto labels_path =
      config.labels ? *config.labels : config.out_dir / "annotation" / "labels.tsv";
  annotation::LabelStore store(labels_path);
  annotation::AnnotationServer server(std::move(tasks), store, static_dir);
  if (!server.bind(host, port)) {
    std::cerr << "error: cannot bind " << host << ":" << port << " (port in use?)\n";
    return 3;
  }
  g_server = &server;
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);
  std::cerr << "serving annotation API on http://" << host << ":" << server.port()
            << ", labels in " << labels_path.string() << "\n";
  server.run();
  g_server = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"argforge: premise mining and generation pipeline"};
  app.require_subcommand(1);

  CommonOptions opts;
  std::string stage;
  for (const auto& name : argforge::pipeline::stage_names()) {
    auto* cmd = app.add_subcommand(name, "Run the " + name + " stage");
    add_common(cmd, &opts);
    cmd->callback([&stage, name] { stage = name; });
  }
  auto* all = app.add_subcommand("run-all", "Run every stage in order");
  add_common(all, &opts);
  all->callback([&stage] { stage = "run-all"; });

  std::string host = "127.0.0.1";
  int port = 8080;
  std::string static_dir;
  auto* srv = app.add_subcommand("serve", "Serve the annotation HTTP API");
  add_common(srv, &opts);
  srv->add_option("--host", host, "Bind address");
  srv->add_option("--port", port, "Port (0 picks a free one)");
  srv->add_option("--static", static_dir, "Directory of static UI assets to mount at /");
  srv->callback([&stage] { stage = "serve"; });

  CLI11_PARSE(app, argc, argv);

  try {
    if (stage == "serve") return serve(opts, host, port, static_dir);
    const auto config = resolve_config(opts);
    if (stage == "run-all") {
      argforge::pipeline::run_all(config, std::cout);
    } else {
      argforge::pipeline::run_stage(stage, config, std::cout);
    }
    return 0;
  } catch (const argforge::MissingInputError& e) {
    std::cerr << "error: missing input: " << e.path().string() << "\n";
    return 2;
  } catch (const argforge::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
