#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cacm/cli.hpp"

namespace {

std::vector<uint64_t> parse_seeds(const std::string& spec) {
  std::vector<uint64_t> seeds;
  const size_t range = spec.find("..");
  if (range != std::string::npos) {
    const uint64_t lo = std::stoull(spec.substr(0, range));
    const uint64_t hi = std::stoull(spec.substr(range + 2));
    if (hi < lo) throw cacm::ConfigError("seed range is reversed: " + spec);
    for (uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    return seeds;
  }
  size_t pos = 0;
  while (pos < spec.size()) {
    size_t comma = spec.find(',', pos);
    if (comma == std::string::npos) comma = spec.size();
    seeds.push_back(std::stoull(spec.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  if (seeds.empty()) throw cacm::ConfigError("empty seed list: " + spec);
  return seeds;
}

cacm::Budgets parse_budgets(const std::string& spec) {
  std::vector<int> values;
  size_t pos = 0;
  while (pos < spec.size()) {
    size_t comma = spec.find(',', pos);
    if (comma == std::string::npos) comma = spec.size();
    values.push_back(std::stoi(spec.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  if (values.size() != 6) {
    throw cacm::ConfigError("budgets must be Kd,Wd,Kc,Bs,Bd,Bc: " + spec);
  }
  return cacm::Budgets{values[0], values[1], values[2], values[3], values[4], values[5]};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cacm: protocol-audited closed-loop candidate search on synthetic targets"};
  app.require_subcommand(1);

  std::string seed_spec = "1";
  std::string seeds_spec;
  std::vector<std::string> mode_tokens;
  std::string difficulty_token;
  std::string budgets_spec;
  std::string out_dir;
  std::string config_path;
  int jobs = 0;

  auto add_common = [&](CLI::App* cmd, bool sweep) {
    if (sweep) {
      cmd->add_option("--seeds", seeds_spec, "Seed list, e.g. 1..30 or 1,2,5");
      cmd->add_option("--jobs", jobs, "Max episodes run concurrently");
      cmd->add_option("--config", config_path, "JSON config file; flags override its values");
    } else {
      cmd->add_option("--seed", seed_spec, "Target seed");
    }
    cmd->add_option("--mode", mode_tokens,
                    "Mode: cacm, raw, repair-only, no-corr-select, no-dyn-compress");
    cmd->add_option("--difficulty", difficulty_token, "Target difficulty: easy, medium, hard");
    cmd->add_option("--budgets", budgets_spec, "Kd,Wd,Kc,Bs,Bd,Bc");
    cmd->add_option("--out", out_dir, "Output directory (default: out)");
  };

  CLI::App* run = app.add_subcommand("run", "Run one episode and write its trajectory log");
  add_common(run, false);
  CLI::App* bench = app.add_subcommand("bench", "Seeds x modes sweep with statistics tables");
  add_common(bench, true);
  CLI::App* sensitivity =
      app.add_subcommand("sensitivity", "CACM sweep under the five budget settings");
  add_common(sensitivity, true);
  CLI::App* memcurve =
      app.add_subcommand("memcurve", "Per-iteration planner-input length, cacm vs raw");
  add_common(memcurve, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cacm::kExitUsage;
  }

  try {
    cacm::CliConfig config =
        config_path.empty() ? cacm::default_cli_config() : cacm::load_cli_config(config_path);
    if (!seeds_spec.empty()) config.seeds = parse_seeds(seeds_spec);
    if (!mode_tokens.empty()) {
      config.modes.clear();
      for (const std::string& token : mode_tokens) {
        config.modes.push_back(cacm::mode_from_token(token));
      }
    }
    if (!difficulty_token.empty()) {
      config.difficulty = cacm::difficulty_from_token(difficulty_token);
    }
    if (!budgets_spec.empty()) config.budgets = parse_budgets(budgets_spec);
    if (!out_dir.empty()) config.out_dir = out_dir;
    if (jobs > 0) config.jobs = jobs;

    if (run->parsed()) {
      const cacm::Mode mode = config.modes.size() == 1 ? config.modes.front() : cacm::Mode::Cacm;
      return cacm::cmd_run(std::stoull(seed_spec), mode, config.difficulty, config.budgets,
                           config.out_dir);
    }
    if (bench->parsed()) return cacm::cmd_bench(config);
    if (sensitivity->parsed()) return cacm::cmd_sensitivity(config);
    if (memcurve->parsed()) return cacm::cmd_memcurve(config);
    return cacm::kExitUsage;
  } catch (const cacm::ConfigError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return cacm::kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return cacm::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cacm::kExitExecutionError;
  }
}
