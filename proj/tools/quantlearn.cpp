// SPDX-License-Identifier: Apache-2.0
#include <cstdlib>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "quantlearn/commands.hpp"
#include "quantlearn/datagen.hpp"

using namespace quantlearn;

namespace {

struct ConfigFlags {
  std::string config_file;
  std::string profile;
  std::vector<std::string> sets;
};

void add_config_flags(CLI::App* sub, ConfigFlags& flags) {
  sub->add_option("--config", flags.config_file, "JSON file with flat dotted keys")->check(CLI::ExistingFile);
  sub->add_option("--profile", flags.profile, "preset applied before the config file")
      ->check(CLI::IsMember({"paper", "desk"}));
  sub->add_option("--set", flags.sets, "override one key, e.g. --set train.total_steps=501")
      ->allow_extra_args(false);
}

// Precedence: defaults < profile < config file < QUANTLEARN_SEED < --set.
RunConfig resolve(const ConfigFlags& flags) {
  RunConfig cfg;
  if (!flags.profile.empty()) apply_profile(cfg, flags.profile);
  if (!flags.config_file.empty()) apply_config_file(cfg, flags.config_file);
  apply_seed_env(cfg);
  for (const auto& s : flags.sets) apply_assignment(cfg, s);
  cfg.validate();
  return cfg;
}

Quantifier quantifier_arg(const std::string& name) {
  const auto q = parse_quantifier(name);
  if (!q) throw ConfigError("unknown quantifier '" + name + "'");
  return *q;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learnability experiments for conservative and non-conservative quantifiers"};
  app.require_subcommand(1);

  int max_total = static_cast<int>(kSceneSize);
  std::string corrupt;
  auto* verify = app.add_subcommand("verify", "check conservativity, duality and symmetry of every quantifier");
  verify->add_option("--max-total", max_total, "scene size the zone counts sum to")->check(CLI::Range(0, 20));
  verify->add_option("--corrupt-relation", corrupt)->group("");

  ConfigFlags gen_flags;
  auto* gen = app.add_subcommand("gen", "write the datasets of run 0, trial 0 for each condition");
  add_config_flags(gen, gen_flags);

  ConfigFlags exp_flags;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  auto* experiment = app.add_subcommand("experiment", "train every (condition, run, trial) and write records.csv");
  add_config_flags(experiment, exp_flags);
  experiment->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

  AnalyzeOptions analyze_opts;
  std::string pair = "all_ab:only_ab";
  std::string analyze_split = "test";
  long m = 0;
  std::string analyze_out = ".";
  auto* analyze = app.add_subcommand("analyze", "paired t-tests per evaluation step with Bonferroni correction");
  analyze->add_option("--records", analyze_opts.records)->required()->check(CLI::ExistingFile);
  analyze->add_option("--pair", pair, "qa:qb");
  auto* m_opt = analyze->add_option("--m", m, "number of hypotheses (default: conditions x steps)")
                    ->check(CLI::PositiveNumber);
  analyze->add_option("--alpha0", analyze_opts.alpha0)->check(CLI::Range(0.0, 1.0));
  analyze->add_option("--split", analyze_split)->check(CLI::IsMember({"train", "test"}));
  analyze->add_option("--out", analyze_out, "output directory");

  PlotOptions plot_opts;
  std::string plot_out = ".";
  auto* plot = app.add_subcommand("plot", "median accuracy curves of one run as SVG and CSV");
  plot->add_option("--records", plot_opts.records)->required()->check(CLI::ExistingFile);
  plot->add_option("--condition", plot_opts.condition)->check(CLI::IsMember({'a', 'b', 'c', 'd', 'e'}));
  plot->add_option("--run", plot_opts.run)->check(CLI::NonNegativeNumber);
  plot->add_option("--out", plot_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*verify) {
      std::optional<Quantifier> victim;
      if (!corrupt.empty()) victim = quantifier_arg(corrupt);
      return cmd_verify(max_total, std::cout, victim);
    }
    if (*gen) return cmd_gen(resolve(gen_flags), std::cout);
    if (*experiment) return cmd_experiment(resolve(exp_flags), jobs, std::cerr);
    if (*analyze) {
      const auto colon = pair.find(':');
      if (colon == std::string::npos) throw ConfigError("--pair expects qa:qb");
      analyze_opts.qa = quantifier_arg(pair.substr(0, colon));
      analyze_opts.qb = quantifier_arg(pair.substr(colon + 1));
      if (m_opt->count()) analyze_opts.m = m;
      analyze_opts.split = analyze_split == "train" ? Split::Train : Split::Test;
      analyze_opts.out_dir = analyze_out;
      return cmd_analyze(analyze_opts, std::cout);
    }
    if (*plot) {
      plot_opts.out_dir = plot_out;
      return cmd_plot(plot_opts, std::cout);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
