// Copyright 2026 The fedgnn Authors
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

#include "cli.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "fedgnn/checkpoint.h"
#include "fedgnn/csv.h"
#include "fedgnn/graph_io.h"
#include "fedgnn/privacy.h"
#include "fedgnn/rng.h"
#include "fedgnn/sampling.h"
#include "json.hpp"

namespace fedgnn::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::ofstream OpenOut(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

void WriteErrorLine(std::ostream& err, const char* kind, const std::string& message,
                    int code) {
  json line = {{"error", kind}, {"message", message}, {"exit_code", code}};
  err << line.dump() << '\n';
}

std::vector<std::string> SplitValues(const std::string& s) {
  const char sep = s.find(';') != std::string::npos ? ';' : ',';
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

std::pair<std::string, std::string> SplitAssignment(const std::string& s,
                                                    const char* flag) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError(std::string(flag) + " expects key=value, got '" + s + "'");
  }
  return {s.substr(0, eq), s.substr(eq + 1)};
}

double Mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double StdDev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = Mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

// ---------------------------------------------------------------- gen

struct GenArgs {
  GenSpec spec;
  std::string generator = "planted_cycles";
  std::string out = ".";
};

void AddGen(CLI::App& app, GenArgs& a) {
  app.add_option("--generator", a.generator, "planted_cycles or sbm_nodes")
      ->capture_default_str();
  app.add_option("--nodes", a.spec.nodes)->capture_default_str();
  app.add_option("--clients", a.spec.clients)->capture_default_str();
  app.add_option("--feature-dim", a.spec.feature_dim)->capture_default_str();
  app.add_option("--seed", a.spec.seed)->capture_default_str();
  app.add_option("--imbalance", a.spec.imbalance,
                 "largest / smallest per-client edge count")
      ->capture_default_str();
  app.add_option("--edge-density", a.spec.edge_density)->capture_default_str();
  app.add_option("--pattern-count", a.spec.pattern_count, "-1 derives it from --illicit-ratio")
      ->capture_default_str();
  app.add_option("--pattern-length", a.spec.pattern_length)->capture_default_str();
  app.add_option("--illicit-ratio", a.spec.illicit_ratio)->capture_default_str();
  app.add_option("--cycle-signal", a.spec.cycle_signal)->capture_default_str();
  app.add_option("--blocks", a.spec.blocks)->capture_default_str();
  app.add_option("--p-in", a.spec.p_in)->capture_default_str();
  app.add_option("--p-out", a.spec.p_out)->capture_default_str();
  app.add_option("--feature-noise", a.spec.feature_noise)->capture_default_str();
  app.add_option("--out", a.out, "output directory")->capture_default_str();
}

int RunGen(GenArgs& a, std::ostream& out) {
  a.spec.generator = ParseGenerator(a.generator);
  GenInfo info;
  const PartitionedGraph g = Generate(a.spec, &info);
  const fs::path dir = a.out;
  fs::create_directories(dir);
  SaveGraphCsv(g, dir / "nodes.csv", dir / "edges.csv");
  json meta = {{"generator", std::string(ToString(a.spec.generator))},
               {"seed", a.spec.seed},
               {"nodes", g.num_nodes()},
               {"edges", g.num_edges()},
               {"clients", g.num_clients()},
               {"partition_ratio", info.partition_ratio},
               {"partition_within_tolerance", info.partition_within_tolerance},
               {"cycles", info.cycles}};
  OpenOut(dir / "gen_info.json") << meta.dump(2) << '\n';
  if (!info.partition_within_tolerance) {
    out << "warning: partition ratio " << FormatDouble(info.partition_ratio)
        << " is outside 15% of the requested imbalance\n";
  }
  out << "seed " << a.spec.seed << '\n'
      << "wrote " << g.num_nodes() << " nodes, " << g.num_edges() << " edges, "
      << info.cycles.size() << " cycles to " << dir.string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::string config;
  std::vector<std::string> set;
  std::vector<std::string> sweep;
  std::string out;
  int repeats = 0;
};

void AddTrain(CLI::App& app, TrainArgs& a) {
  app.add_option("config", a.config, "key=value experiment config")->required();
  app.add_option("--set", a.set, "override one key (key=value); repeatable");
  app.add_option("--sweep", a.sweep,
                 "key=v1,v2,... (';' separates list values); repeatable, "
                 "runs the cartesian product");
  app.add_option("--out", a.out, "output directory (overrides output_dir)");
  app.add_option("--repeats", a.repeats, "seeds per variant (overrides repeats)");
}

void WriteSummaryRow(std::ostream& os, const std::string& variant, const std::string& seed,
                     const std::string& rounds, double f1, double grad, double up,
                     double down, double emb) {
  os << variant << ',' << seed << ',' << rounds << ',' << FormatDouble(f1) << ','
     << FormatDouble(grad) << ',' << FormatDouble(up) << ',' << FormatDouble(down)
     << ',' << FormatDouble(emb) << '\n';
}

int RunTrain(const TrainArgs& a, std::ostream& out) {
  ExperimentConfig base = LoadConfig(a.config);
  for (const std::string& s : a.set) {
    const auto [k, v] = SplitAssignment(s, "--set");
    SetKey(base, k, v, "--set");
  }
  if (!a.out.empty()) base.output_dir = a.out;
  if (a.repeats != 0) base.repeats = a.repeats;

  // Cartesian product of sweep assignments.
  std::vector<std::pair<std::string, ExperimentConfig>> variants = {{"", base}};
  for (const std::string& s : a.sweep) {
    const auto [k, list] = SplitAssignment(s, "--sweep");
    const auto values = SplitValues(list);
    if (values.empty()) throw ConfigError("--sweep " + k + " has no values");
    std::vector<std::pair<std::string, ExperimentConfig>> next;
    for (const auto& [name, cfg] : variants) {
      for (const std::string& v : values) {
        ExperimentConfig c = cfg;
        SetKey(c, k, v, "--sweep");
        next.emplace_back(name.empty() ? k + "=" + v : name + "+" + k + "=" + v, c);
      }
    }
    variants = std::move(next);
  }
  for (const auto& [name, cfg] : variants) ValidateConfig(cfg);

  const fs::path root = base.output_dir;
  fs::create_directories(root);
  std::ofstream summary = OpenOut(root / "summary.csv");
  summary << "variant,seed,rounds,final_macro_f1,final_grad_norm_sq,bytes_up,"
             "bytes_down,emb_released\n";
  for (const auto& [name, cfg] : variants) {
    const fs::path vdir = name.empty() ? root : root / name;
    std::vector<RunSummary> runs;
    for (int r = 0; r < cfg.repeats; ++r) {
      const std::uint64_t seed = cfg.hyper.seed + static_cast<std::uint64_t>(r);
      const fs::path dir = cfg.repeats == 1 ? vdir : vdir / ("seed=" + std::to_string(seed));
      out << "run " << (name.empty() ? "base" : name) << " seed " << seed << '\n';
      RunSummary s = TrainOnce(cfg, seed, dir);
      s.variant = name.empty() ? "base" : name;
      runs.push_back(s);
      WriteSummaryRow(summary, s.variant, std::to_string(seed), std::to_string(s.rounds),
                      s.final_macro_f1, s.final_grad_norm_sq,
                      static_cast<double>(s.bytes_up), static_cast<double>(s.bytes_down),
                      static_cast<double>(s.emb_released));
    }
    std::vector<double> f1, grad, up, down, emb;
    for (const RunSummary& s : runs) {
      f1.push_back(s.final_macro_f1);
      grad.push_back(s.final_grad_norm_sq);
      up.push_back(static_cast<double>(s.bytes_up));
      down.push_back(static_cast<double>(s.bytes_down));
      emb.push_back(static_cast<double>(s.emb_released));
    }
    const std::string v = runs.front().variant;
    const std::string rounds = std::to_string(runs.front().rounds);
    WriteSummaryRow(summary, v, "mean", rounds, Mean(f1), Mean(grad), Mean(up),
                    Mean(down), Mean(emb));
    WriteSummaryRow(summary, v, "std", rounds, StdDev(f1), StdDev(grad), StdDev(up),
                    StdDev(down), StdDev(emb));
    out << v << ": final macro-F1 " << FormatDouble(Mean(f1)) << " +- "
        << FormatDouble(StdDev(f1)) << " over " << runs.size() << " seed(s)\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------- accountant

struct AccountantArgs {
  std::vector<double> rho;
  std::string embeddings;
  int k = kDefaultNeighbors;
  std::vector<double> percentiles = {std::begin(kDefaultPercentiles),
                                     std::end(kDefaultPercentiles)};
  std::vector<double> sigma0;
  double delta = 1e-5;
  double rounds_shared = 1.0;
  std::string out;
};

void AddAccountant(CLI::App& app, AccountantArgs& a) {
  auto* rho = app.add_option("--rho", a.rho, "distances to quote the guarantee at")
                  ->delimiter(',');
  auto* emb = app.add_option("--embeddings", a.embeddings,
                             "CSV with one released embedding per row");
  rho->excludes(emb);
  app.add_option("--k", a.k, "neighbor rank for rho")->capture_default_str();
  app.add_option("--percentiles", a.percentiles)->delimiter(',')->capture_default_str();
  app.add_option("--sigma0", a.sigma0, "one or more noise levels")
      ->delimiter(',')
      ->required();
  app.add_option("--delta", a.delta)->capture_default_str();
  app.add_option("--rounds-shared", a.rounds_shared, "R', releases per node")
      ->capture_default_str();
  app.add_option("--out", a.out, "output CSV (default: stdout)");
}

Matrix ReadEmbeddings(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty() || line == "\r") continue;
    const auto fields = SplitCsvLine(line);
    std::vector<double> row;
    try {
      for (std::string_view f : fields) row.push_back(ParseDouble(f, "value"));
    } catch (const ValidationError&) {
      if (rows.empty() && number == 1) continue;  // header row
      throw ValidationError(path.filename().string() + ": line " +
                            std::to_string(number) + " is not numeric");
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ValidationError(path.filename().string() + ": line " +
                            std::to_string(number) + " has " + std::to_string(row.size()) +
                            " fields, expected " + std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ValidationError(path.string() + " has no embeddings");
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

int RunAccountant(const AccountantArgs& a, std::ostream& out) {
  if (a.rho.empty() && a.embeddings.empty()) {
    throw ConfigError("give --rho or --embeddings");
  }
  std::vector<std::pair<std::string, double>> rhos;
  if (!a.rho.empty()) {
    for (double rho : a.rho) rhos.emplace_back("", rho);
  } else {
    const Matrix x = ReadEmbeddings(a.embeddings);
    const RhoResult r = RhoPercentiles(x, a.k, a.percentiles);
    for (std::size_t i = 0; i < r.rho.size(); ++i) {
      rhos.emplace_back(FormatDouble(a.percentiles[i]), r.rho[i]);
    }
  }
  std::ostringstream csv;
  csv << "percentile,rho";
  for (double s : a.sigma0) csv << ",sigma0=" << FormatDouble(s);
  csv << '\n';
  for (const auto& [q, rho] : rhos) {
    csv << q << ',' << FormatDouble(rho);
    for (double s : a.sigma0) {
      csv << ',' << FormatDouble(MdpEpsilon(rho, s, a.rounds_shared, a.delta));
    }
    csv << '\n';
  }
  if (a.out.empty()) {
    out << csv.str();
  } else {
    OpenOut(a.out) << csv.str();
  }
  return kExitOk;
}

// ---------------------------------------------------------------- attack

struct AttackArgs {
  std::string config;
  std::vector<std::string> set;
  std::string checkpoint;
  AttackOptions options;
  int seeds = 3;
  std::string out = "attack_report.csv";
};

void AddAttack(CLI::App& app, AttackArgs& a) {
  app.add_option("config", a.config, "experiment config naming the graph and model")
      ->required();
  app.add_option("--set", a.set, "override one config key (key=value)");
  app.add_option("--checkpoint", a.checkpoint,
                 "model parameters (default: seeded initialization)");
  app.add_option("--targets", a.options.targets, "targets per seed")->capture_default_str();
  app.add_option("--fanouts", a.options.fanouts, "neighborhood fanouts to compare")
      ->delimiter(',')
      ->capture_default_str();
  app.add_option("--seeds", a.seeds, "consecutive seeds starting at the config seed")
      ->capture_default_str();
  app.add_option("--iterations", a.options.attack.iterations)->capture_default_str();
  app.add_option("--step", a.options.attack.step)->capture_default_str();
  app.add_option("--out", a.out, "output CSV")->capture_default_str();
}

int RunAttack(const AttackArgs& a, std::ostream& out) {
  ExperimentConfig config = LoadConfig(a.config);
  for (const std::string& s : a.set) {
    const auto [k, v] = SplitAssignment(s, "--set");
    SetKey(config, k, v, "--set");
  }
  ValidateConfig(config);
  if (a.seeds < 1) throw ConfigError("--seeds must be >= 1");
  std::optional<ModelParams> loaded;
  if (!a.checkpoint.empty()) loaded = LoadCheckpoint(a.checkpoint);

  std::ofstream csv = OpenOut(a.out);
  csv << "seed,target,fanout,mse,objective,best_iteration,converged\n";
  std::map<int, std::vector<double>> by_fanout;
  for (int s = 0; s < a.seeds; ++s) {
    const std::uint64_t seed = config.hyper.seed + static_cast<std::uint64_t>(s);
    out << "seed " << seed << '\n';
    const PartitionedGraph graph = LoadGraph(config, seed);
    const ModelParams params =
        loaded ? *loaded : InitParams(ModelFor(config, graph), seed);
    for (const AttackRow& row : RunAttacks(graph, params, a.options, seed)) {
      csv << row.seed << ',' << graph.external_node_id(row.target) << ',' << row.fanout
          << ',' << FormatDouble(row.result.mse) << ','
          << FormatDouble(row.result.objective) << ',' << row.result.best_iteration
          << ',' << (row.result.converged ? "true" : "false") << '\n';
      by_fanout[row.fanout].push_back(row.result.mse);
    }
  }
  for (const auto& [fanout, mses] : by_fanout) {
    out << "fanout " << fanout << ": median mse " << FormatDouble(Median(mses)) << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------- report

struct ReportArgs {
  std::vector<std::string> paths;
  std::string out;
  bool per_run = false;
};

void AddReport(CLI::App& app, ReportArgs& a) {
  app.add_option("paths", a.paths, "metrics.csv files or directories to scan")
      ->required();
  app.add_option("--out", a.out, "output CSV (default: stdout)");
  app.add_flag("--per-run", a.per_run, "one row per metrics file instead of per group");
}

struct MetricsFile {
  fs::path path;
  std::string group;
  int rounds = 0;
  double final_f1 = 0.0;
  double best_f1 = 0.0;
  double final_grad = 0.0;
  double bytes_up = 0.0;
  double bytes_down = 0.0;
  double emb = 0.0;
};

MetricsFile ReadMetrics(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("round,mean_macro_f1", 0) != 0) {
    throw ValidationError(path.string() + ": not a metrics file");
  }
  MetricsFile m;
  m.path = path;
  fs::path group = path.parent_path();
  if (group.filename().string().rfind("seed=", 0) == 0) group = group.parent_path();
  m.group = group.string();
  int number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    const auto f = SplitCsvLine(line);
    if (f.size() != 7) {
      throw ValidationError(path.string() + ": line " + std::to_string(number) +
                            " has " + std::to_string(f.size()) + " fields, expected 7");
    }
    m.rounds = static_cast<int>(ParseInt(f[0], "round"));
    m.final_f1 = ParseDouble(f[1], "mean_macro_f1");
    m.best_f1 = std::max(m.best_f1, m.final_f1);
    m.final_grad = ParseDouble(f[2], "grad_norm_sq");
    m.bytes_up += ParseDouble(f[3], "bytes_up");
    m.bytes_down += ParseDouble(f[4], "bytes_down");
    m.emb += ParseDouble(f[5], "emb_released");
  }
  return m;
}

int RunReport(const ReportArgs& a, std::ostream& out) {
  std::vector<fs::path> files;
  for (const std::string& p : a.paths) {
    if (fs::is_directory(p)) {
      for (const auto& entry : fs::recursive_directory_iterator(p)) {
        if (entry.is_regular_file() && entry.path().filename() == "metrics.csv") {
          files.push_back(entry.path());
        }
      }
    } else if (fs::exists(p)) {
      files.emplace_back(p);
    } else {
      throw ValidationError("no such file or directory: " + p);
    }
  }
  if (files.empty()) throw ValidationError("no metrics.csv found");
  std::sort(files.begin(), files.end());
  std::vector<MetricsFile> metrics;
  for (const fs::path& f : files) metrics.push_back(ReadMetrics(f));

  std::ostringstream csv;
  if (a.per_run) {
    csv << "run,rounds,final_macro_f1,best_macro_f1,final_grad_norm_sq,"
           "total_bytes_up,total_bytes_down,emb_released\n";
    for (const MetricsFile& m : metrics) {
      csv << m.path.string() << ',' << m.rounds << ',' << FormatDouble(m.final_f1)
          << ',' << FormatDouble(m.best_f1) << ',' << FormatDouble(m.final_grad) << ','
          << FormatDouble(m.bytes_up) << ',' << FormatDouble(m.bytes_down) << ','
          << FormatDouble(m.emb) << '\n';
    }
  } else {
    csv << "group,runs,final_macro_f1_mean,final_macro_f1_std,best_macro_f1_mean,"
           "total_bytes_mean,emb_released_mean\n";
    std::map<std::string, std::vector<const MetricsFile*>> groups;
    for (const MetricsFile& m : metrics) groups[m.group].push_back(&m);
    for (const auto& [group, ms] : groups) {
      std::vector<double> f1, best, bytes, emb;
      for (const MetricsFile* m : ms) {
        f1.push_back(m->final_f1);
        best.push_back(m->best_f1);
        bytes.push_back(m->bytes_up + m->bytes_down);
        emb.push_back(m->emb);
      }
      csv << group << ',' << ms.size() << ',' << FormatDouble(Mean(f1)) << ','
          << FormatDouble(StdDev(f1)) << ',' << FormatDouble(Mean(best)) << ','
          << FormatDouble(Mean(bytes)) << ',' << FormatDouble(Mean(emb)) << '\n';
    }
  }
  if (a.out.empty()) {
    out << csv.str();
  } else {
    OpenOut(a.out) << csv.str();
  }
  return kExitOk;
}

}  // namespace

PartitionedGraph LoadGraph(const ExperimentConfig& config, std::uint64_t run_seed) {
  if (config.uses_csv()) {
    return LoadGraphCsv(config.nodes_csv, config.edges_csv, config.clients);
  }
  GenSpec spec = config.gen;
  if (!config.gen_seed_set) spec.seed = run_seed;
  return Generate(spec);
}

ModelConfig ModelFor(const ExperimentConfig& config, const PartitionedGraph& graph) {
  const TaskKind task = config.task.value_or(InferTask(graph));
  ModelConfig m =
      MakeModelConfig(graph, task, config.hidden, config.architecture, config.activation);
  m.gin_epsilon = config.gin_epsilon;
  ValidateConfig(m);
  return m;
}

RunSummary TrainOnce(const ExperimentConfig& config, std::uint64_t seed,
                     const fs::path& dir) {
  ExperimentConfig c = config;
  c.hyper.seed = seed;
  const PartitionedGraph graph = LoadGraph(c, seed);
  const ModelConfig model = ModelFor(c, graph);
  const ExperimentResult result = RunExperiment(graph, model, c.hyper);

  fs::create_directories(dir);
  {
    std::ofstream os = OpenOut(dir / "metrics.csv");
    WriteMetricsCsv(os, result.metrics);
  }
  {
    std::ofstream os = OpenOut(dir / "comm.csv");
    WriteCommCsv(os, result.ledger);
  }
  {
    std::ofstream os = OpenOut(dir / "config.txt");
    WriteConfig(os, c);
  }
  if (c.checkpoint) {
    if (result.client_params.empty()) {
      SaveCheckpoint(dir / "checkpoint.ckpt", result.final_params);
    } else {
      for (std::size_t i = 0; i < result.client_params.size(); ++i) {
        SaveCheckpoint(dir / ("checkpoint_client" + std::to_string(i) + ".ckpt"),
                       result.client_params[i]);
      }
    }
  }
  {
    std::ofstream os = OpenOut(dir / "privacy_report.csv");
    os << "percentile,rho,epsilon,k,delta,sigma0,rounds_shared,released_nodes\n";
    const auto& entries = result.buffer.entries();
    if (!entries.empty()) {
      Matrix released(entries.size(), model.embedding_dim());
      std::vector<int> counts;
      Eigen::Index r = 0;
      for (const auto& [v, e] : entries) {
        released.row(r++) = e.value.transpose();
        counts.push_back(e.releases);
      }
      const auto report =
          MakePrivacyReport(released, counts, c.hyper.noise, c.privacy_k, c.percentiles);
      if (report) {
        for (const PrivacyRow& row : report->rows) {
          os << FormatDouble(row.percentile) << ',' << FormatDouble(row.rho) << ','
             << FormatDouble(row.epsilon) << ',' << report->k << ','
             << FormatDouble(report->delta) << ',' << FormatDouble(report->sigma0) << ','
             << report->rounds_shared << ',' << report->released_nodes << '\n';
        }
      }
    }
  }

  RunSummary s;
  s.seed = seed;
  s.rounds = static_cast<int>(result.metrics.size());
  s.final_macro_f1 = result.metrics.back().mean_macro_f1;
  s.final_grad_norm_sq = result.metrics.back().grad_norm_sq;
  const RoundComm total = result.ledger.Total();
  s.bytes_up = total.bytes_up();
  s.bytes_down = total.bytes_down();
  s.emb_released = total.embeddings_up;
  return s;
}

std::vector<AttackRow> RunAttacks(const PartitionedGraph& graph, const ModelParams& params,
                                  const AttackOptions& options, std::uint64_t seed) {
  if (options.targets < 1) throw ConfigError("targets must be >= 1");
  if (options.fanouts.empty()) throw ConfigError("fanouts must not be empty");
  for (int f : options.fanouts) {
    if (f < 1) throw ConfigError("fanouts must be >= 1");
  }
  if (static_cast<std::size_t>(params.config.dims.front()) != graph.feature_dim()) {
    throw ConfigError("model input width does not match the graph features");
  }
  const int widest = *std::max_element(options.fanouts.begin(), options.fanouts.end());
  std::vector<NodeId> eligible;
  for (NodeId v = 0; v < graph.num_nodes(); ++v) {
    if (graph.neighbors(v).size() >= static_cast<std::size_t>(widest)) eligible.push_back(v);
  }
  if (eligible.size() < static_cast<std::size_t>(options.targets)) {
    throw ValidationError("only " + std::to_string(eligible.size()) +
                          " nodes have degree >= " + std::to_string(widest) +
                          ", need " + std::to_string(options.targets) +
                          "; use a denser graph or smaller fanouts");
  }
  Rng rng = MakeStream(seed, StreamPurpose::kAttack);
  std::vector<NodeId> targets;
  std::sample(eligible.begin(), eligible.end(), std::back_inserter(targets),
              options.targets, rng);

  const GraphView view = GraphView::Full(graph);
  const int layers = params.config.num_layers();
  const Matrix& x = graph.features();
  std::vector<AttackRow> rows;
  for (NodeId t : targets) {
    const Vector init = (x.colwise().sum() - x.row(t)).transpose() /
                        static_cast<double>(std::max<Eigen::Index>(x.rows() - 1, 1));
    for (int f : options.fanouts) {
      Rng plan_rng = MakeStream(seed, StreamPurpose::kAttack, t + 1,
                                static_cast<std::uint64_t>(f));
      const std::vector<int> fanouts = {f};
      const ComputationPlan plan = BuildPlan(view, {t}, layers, fanouts, {}, &plan_rng);
      const Vector observed = ObserveEmbedding(params, view, plan, t);
      AttackRow row;
      row.seed = seed;
      row.target = t;
      row.fanout = f;
      row.result = AiaAttack(params, view, plan, t, observed, init, options.attack);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

double Median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Federated GNN simulator"};
  app.name("fedgnn");
  app.require_subcommand(1);
  GenArgs gen;
  TrainArgs train;
  AccountantArgs accountant;
  AttackArgs attack;
  ReportArgs report;
  AddGen(*app.add_subcommand("gen", "generate a synthetic partitioned graph"), gen);
  AddTrain(*app.add_subcommand("train", "run federated training experiments"), train);
  AddAccountant(*app.add_subcommand("accountant", "metric-DP epsilon for released embeddings"),
                accountant);
  AddAttack(*app.add_subcommand("attack", "attribute-inference attack on embeddings"),
            attack);
  AddReport(*app.add_subcommand("report", "aggregate metrics.csv files"), report);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    WriteErrorLine(err, "usage", e.what(), kExitValidation);
    return kExitValidation;
  }

  try {
    if (app.got_subcommand("gen")) return RunGen(gen, out);
    if (app.got_subcommand("train")) return RunTrain(train, out);
    if (app.got_subcommand("accountant")) return RunAccountant(accountant, out);
    if (app.got_subcommand("attack")) return RunAttack(attack, out);
    if (app.got_subcommand("report")) return RunReport(report, out);
  } catch (const ValidationError& e) {
    WriteErrorLine(err, "validation", e.what(), kExitValidation);
    return kExitValidation;
  } catch (const ConfigError& e) {
    WriteErrorLine(err, "config", e.what(), kExitValidation);
    return kExitValidation;
  } catch (const NumericError& e) {
    WriteErrorLine(err, "numeric", e.what(), kExitRuntime);
    return kExitRuntime;
  } catch (const ProtocolError& e) {
    WriteErrorLine(err, "protocol", e.what(), kExitRuntime);
    return kExitRuntime;
  } catch (const std::exception& e) {
    WriteErrorLine(err, "runtime", e.what(), kExitRuntime);
    return kExitRuntime;
  }
  return kExitValidation;
}

}  // namespace fedgnn::cli
