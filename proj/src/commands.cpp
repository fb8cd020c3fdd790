// SPDX-License-Identifier: Apache-2.0
#include "quantlearn/commands.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "json.hpp"
#include "quantlearn/datagen.hpp"
#include "quantlearn/experiment.hpp"
#include "quantlearn/stats.hpp"
#include "quantlearn/svg_plot.hpp"

namespace quantlearn {
namespace fs = std::filesystem;
namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open " + p.string() + " for writing");
  out << text;
  if (!out) throw DataError("write failed for " + p.string());
}

void prepare_out_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create " + dir.string() + ": " + ec.message());
}

/// Writes the resolved config, or checks it against an existing echo.
void echo_config(const RunConfig& cfg) {
  const fs::path path = cfg.out_dir / "config.json";
  const std::string text = to_json_text(cfg);
  if (fs::exists(path) && read_file(path) != text) {
    throw ConfigError(path.string() + " holds a different configuration; use a fresh out.dir");
  }
  write_file(path, text);
}

std::string witness_text(const PropertyCheck& c) { return c.witness ? to_string(*c.witness) : "-"; }

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9e", v);
  return buf;
}

/// Three significant digits, the way thresholds are usually quoted.
std::string short_alpha(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string shard_name(const TrialPlan& p) {
  return std::string(1, p.condition) + "_run" + std::to_string(p.run) + "_trial" + std::to_string(p.trial) +
         ".csv";
}

}  // namespace

int cmd_verify(int max_total, std::ostream& out, std::optional<Quantifier> corrupt) {
  if (max_total < 0 || max_total > static_cast<int>(kSceneSize)) {
    throw ConfigError("max_total must lie in 0..20");
  }
  std::array<QuantifierSpec, kQuantifierCount> table;
  std::copy(quantifier_table().begin(), quantifier_table().end(), table.begin());
  if (corrupt) {
    auto& victim = table[index_of(*corrupt)];
    victim.relation = spec_of(victim.dual).relation;
  }

  const auto start = std::chrono::steady_clock::now();
  const VerificationReport report = verify_quantifiers(table, max_total);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const std::size_t tuples = enumerate_counts(max_total).size();

  out << "zone-count tuples checked per property: " << tuples << " (total " << max_total << ")\n";
  out << std::left << std::setw(17) << "quantifier" << std::setw(8) << "class" << std::setw(15) << "conservative"
      << std::setw(16) << "witness" << std::setw(10) << "duality" << std::setw(11) << "symmetric"
      << "witness\n";
  int n_conservative = 0, n_dual = 0;
  for (const auto& row : report.rows) {
    n_conservative += row.conservative.holds() ? 1 : 0;
    n_dual += row.duality.holds() ? 1 : 0;
    out << std::setw(17) << row.spec->name << std::setw(8) << (row.spec->conservative ? "C" : "NC")
        << std::setw(15) << (row.conservative.holds() ? "CONSERVATIVE" : "no") << std::setw(16)
        << witness_text(row.conservative) << std::setw(10) << (row.duality.holds() ? "HOLDS" : "FAILS")
        << std::setw(11) << (row.symmetric.holds() ? "SYMMETRIC" : "no") << witness_text(row.symmetric) << '\n';
  }
  const bool ok = report.consistent();
  out << n_conservative << " conservative, " << (report.rows.size() - static_cast<std::size_t>(n_conservative))
      << " with witnesses, " << n_dual << "/" << report.rows.size() << " dualities hold; "
      << (ok ? "verdicts match the table classification" : "MISMATCH with the table classification")
      << " (" << fixed(seconds, 3) << " s)\n";
  return ok ? kExitOk : kExitVerifyFailed;
}

int cmd_gen(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  prepare_out_dir(cfg.out_dir);
  echo_config(cfg);
  nlohmann::ordered_json manifest;
  manifest["base_seed"] = cfg.base_seed;
  manifest["note"] = "datasets are those consumed by run 0, trial 0 of each condition";
  auto& conds = manifest["conditions"] = nlohmann::ordered_json::object();
  for (char c : cfg.conditions) {
    TrialPlan plan = cfg.base_plan();
    plan.condition = c;
    const DatasetSpec spec = dataset_spec(condition_spec(c), cfg.data, trial_seeds(plan).data);
    const Dataset ds = generate_dataset(spec);
    const fs::path train_path = cfg.out_dir / (std::string(1, c) + "_train.jsonl");
    const fs::path test_path = cfg.out_dir / (std::string(1, c) + "_test.jsonl");
    write_dataset(train_path, ds.train);
    write_dataset(test_path, ds.test);
    auto& entry = conds[std::string(1, c)];
    entry["seed"] = spec.seed;
    entry["train"] = ds.train.size();
    entry["test"] = ds.test.size();
    auto& per_q = entry["per_quantifier"] = nlohmann::ordered_json::object();
    for (Quantifier q : condition_spec(c).quantifiers()) {
      per_q[std::string(name_of(q))] = {{"train", spec.train[index_of(q)]}, {"test", spec.test[index_of(q)]}};
    }
    log << "condition " << c << ": " << ds.train.size() << " train, " << ds.test.size() << " test -> "
        << train_path.string() << ", " << test_path.string() << '\n';
  }
  write_file(cfg.out_dir / "manifest.json", manifest.dump(2) + "\n");
  return kExitOk;
}

int cmd_experiment(const RunConfig& cfg, unsigned jobs, std::ostream& log) {
  cfg.validate();
  prepare_out_dir(cfg.out_dir);
  echo_config(cfg);
  const fs::path shards = cfg.out_dir / "shards";
  prepare_out_dir(shards);

  std::vector<TrialPlan> plans;
  for (char c : cfg.conditions) {
    const auto ps = experiment_plans(c, cfg.runs, cfg.trials, cfg.base_plan());
    plans.insert(plans.end(), ps.begin(), ps.end());
  }
  std::size_t done = 0;
  const std::size_t total = plans.size();
  const auto runner = [&](const TrialPlan& p) -> std::vector<AccuracyRecord> {
    const fs::path shard = shards / shard_name(p);
    if (fs::exists(shard)) return read_records(shard);
    auto records = run_trial(p);
    const fs::path tmp = fs::path(shard).concat(".tmp");
    write_records(tmp, records);
    fs::rename(tmp, shard);
    return records;
  };
  const auto on_done = [&](const TrialPlan& p, const std::vector<AccuracyRecord>& recs) {
    ++done;
    log << "[" << done << "/" << total << "] condition " << p.condition << " run " << p.run << " trial "
        << p.trial;
    if (!recs.empty()) {
      const int last = std::max_element(recs.begin(), recs.end(), [](const auto& a, const auto& b) {
                         return a.step < b.step;
                       })->step;
      for (const auto& r : recs) {
        if (r.step == last && r.split == Split::Test &&
            (r.quantifier == Quantifier::AllAB || r.quantifier == Quantifier::OnlyAB)) {
          log << ' ' << name_of(r.quantifier) << '=' << fixed(r.accuracy, 3);
        }
      }
      log << " @" << last;
    }
    log << std::endl;
  };
  const auto records = run_plans(plans, jobs, on_done, runner);
  write_records(cfg.out_dir / "records.csv", records);
  log << "wrote " << records.size() << " records to " << (cfg.out_dir / "records.csv").string() << '\n';
  return kExitOk;
}

int cmd_analyze(const AnalyzeOptions& opts, std::ostream& out) {
  const auto records = read_records(opts.records);
  std::set<char> with_a, with_b;
  std::set<int> steps;
  for (const auto& r : records) {
    if (r.split != opts.split) continue;
    if (r.quantifier == opts.qa) with_a.insert(r.condition);
    if (r.quantifier == opts.qb) with_b.insert(r.condition);
    steps.insert(r.step);
  }
  for (auto [q, seen] : {std::pair{opts.qa, &with_a}, std::pair{opts.qb, &with_b}}) {
    if (seen->empty()) {
      throw DataError("quantifier " + std::string(name_of(q)) + " does not occur in " + opts.records.string());
    }
  }
  std::vector<char> shared;
  std::set_intersection(with_a.begin(), with_a.end(), with_b.begin(), with_b.end(), std::back_inserter(shared));
  if (shared.empty()) {
    throw DataError("no condition records both " + std::string(name_of(opts.qa)) + " and " +
                    std::string(name_of(opts.qb)));
  }
  const long m = opts.m.value_or(hypothesis_count(static_cast<long>(shared.size()), static_cast<long>(steps.size())));
  const CorrectionPlan plan = bonferroni(opts.alpha0, m);
  prepare_out_dir(opts.out_dir);

  const std::string stem = "significance_" + std::string(name_of(opts.qa)) + "_" + std::string(name_of(opts.qb));
  out << "pair " << name_of(opts.qa) << ":" << name_of(opts.qb) << "  m=" << plan.m << "  alpha0=" << plan.alpha0
      << "  alpha=" << short_alpha(plan.alpha) << " (" << sci(plan.alpha) << ")\n";

  auto summarize = [&](const std::string& label, const std::vector<StepComparison>& rows, const fs::path& path) {
    write_significance(path, rows, plan);
    const auto sig = std::count_if(rows.begin(), rows.end(), [](const auto& r) { return r.significant; });
    const auto deg = std::count_if(rows.begin(), rows.end(), [](const auto& r) { return r.degenerate(); });
    out << label << ": " << sig << "/" << rows.size() << " steps significant";
    if (deg) out << ", " << deg << " degenerate";
    out << " (n=" << rows.front().n << ") -> " << path.string() << '\n';
  };

  summarize("pooled", compare_pair(records, opts.qa, opts.qb, plan, opts.split), opts.out_dir / (stem + ".csv"));
  if (shared.size() > 1) {
    for (char c : shared) {
      std::vector<AccuracyRecord> subset;
      std::copy_if(records.begin(), records.end(), std::back_inserter(subset),
                   [c](const auto& r) { return r.condition == c; });
      const std::string label = std::string("condition ") + c;
      try {
        summarize(label, compare_pair(subset, opts.qa, opts.qb, plan, opts.split),
                  opts.out_dir / (stem + "_" + std::string(1, c) + ".csv"));
      } catch (const std::invalid_argument& e) {
        out << label << ": skipped (" << e.what() << ")\n";
      }
    }
  }
  return kExitOk;
}

int cmd_plot(const PlotOptions& opts, std::ostream& out) {
  const auto records = read_records(opts.records);
  const MedianCurves curves = median_curves(records, opts.condition, opts.run);
  if (curves.empty()) {
    throw DataError(std::string("no test records for condition ") + opts.condition + " run " +
                    std::to_string(opts.run) + " in " + opts.records.string());
  }
  prepare_out_dir(opts.out_dir);
  const std::string stem = std::string("medians_") + opts.condition + "_run" + std::to_string(opts.run);

  std::ostringstream csv;
  csv << "quantifier,step,median\n";
  for (const auto& [q, curve] : curves) {
    for (const auto& [step, med] : curve) csv << name_of(q) << ',' << step << ',' << fixed(med, 6) << '\n';
  }
  write_file(opts.out_dir / (stem + ".csv"), csv.str());

  LineChart chart;
  chart.title = std::string("Condition ") + opts.condition + ", run " + std::to_string(opts.run) +
                ": median test accuracy across trials";
  auto add = [&](Quantifier q, const std::string& color, double width) {
    const auto it = curves.find(q);
    if (it == curves.end()) return;
    LineSeries s{std::string(name_of(q)), color, {}, width};
    for (const auto& [step, med] : it->second) s.points.emplace_back(step, med);
    chart.series.push_back(std::move(s));
  };
  for (const auto& [q, curve] : curves) {
    if (q != Quantifier::AllAB && q != Quantifier::OnlyAB) add(q, "#a0a0a0", 1.2);
  }
  add(Quantifier::AllAB, "#1f5fbf", 2.0);
  add(Quantifier::OnlyAB, "#d62728", 2.0);
  write_file(opts.out_dir / (stem + ".svg"), render_svg(chart));
  out << "wrote " << (opts.out_dir / (stem + ".svg")).string() << " and " << (opts.out_dir / (stem + ".csv")).string()
      << " (" << curves.size() << " quantifiers)\n";
  return kExitOk;
}

}  // namespace quantlearn
