#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <thread>

#include "radialscope/cli.hpp"

namespace {

unsigned thread_count() {
  if (const char* env = std::getenv("RADIALSCOPE_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return static_cast<unsigned>(n);
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  namespace rs = radialscope;
  CLI::App app{"Radial-point analysis of pseudodifferential operators"};
  app.require_subcommand(1);
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  const std::pair<const char*, const char*> commands[] = {
      {"analyze", "radial detection, classification and thresholds"},
      {"flow", "rescaled flow ensemble and linearization rates"},
      {"commutant", "commutant symbols and their verification"},
      {"probe", "Sobolev regularity probe against predicted thresholds"},
      {"full", "everything above plus a verdict report"}};
  std::vector<CLI::App*> subs;
  std::vector<CLI::Option*> out_opts, seed_opts;
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "run configuration (TOML)")->required();
    out_opts.push_back(sub->add_option("--out", out, "output directory"));
    seed_opts.push_back(sub->add_option("--seed", seed, "seed for randomized checks"));
    subs.push_back(sub);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  rs::RunRequest req;
  req.config_path = config;
  req.threads = thread_count();
  for (int i = 0; i < argc; ++i) req.command_line += (i ? " " : "") + std::string(argv[i]);
  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (!subs[i]->parsed()) continue;
    req.analysis = *rs::analysis_from_string(commands[i].first);
    if (out_opts[i]->count()) req.out_dir = out;
    if (seed_opts[i]->count()) req.seed = seed;
  }
  const auto result = rs::execute(req, std::cerr);
  for (const auto& f : result.failures) std::cerr << "  " << f << "\n";
  return result.exit_code;
}
