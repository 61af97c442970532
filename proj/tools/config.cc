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

#include "config.h"

#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>

#include "fedgnn/csv.h"

namespace fedgnn::cli {
namespace {

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void Bad(const std::string& where, const std::string& key,
                      const std::string& why) {
  throw ConfigError(where + ": key '" + key + "': " + why);
}

double ToDouble(const std::string& v, const std::string& where,
                const std::string& key) {
  try {
    return ParseDouble(v, key);
  } catch (const ValidationError&) {
    Bad(where, key, "expected a number, got '" + v + "'");
  }
}

int ToInt(const std::string& v, const std::string& where,
          const std::string& key) {
  try {
    return static_cast<int>(ParseInt(v, key));
  } catch (const ValidationError&) {
    Bad(where, key, "expected an integer, got '" + v + "'");
  }
}

bool ToBool(const std::string& v, const std::string& where,
            const std::string& key) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  Bad(where, key, "expected true or false, got '" + v + "'");
}

template <typename T, typename F>
std::vector<T> ToList(const std::string& v, F parse) {
  std::vector<T> out;
  for (std::string_view f : SplitCsvLine(v)) out.push_back(parse(Trim(std::string(f))));
  return out;
}

template <typename T>
std::string JoinList(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out += ',';
    if constexpr (std::is_floating_point_v<T>) {
      out += FormatDouble(v[i]);
    } else {
      out += std::to_string(v[i]);
    }
  }
  return out;
}

std::string_view SplitName(Split s) {
  switch (s) {
    case Split::kTrain:
      return "train";
    case Split::kValidation:
      return "validation";
    case Split::kTest:
      return "test";
  }
  return "test";
}

struct Key {
  std::string name;
  std::function<void(ExperimentConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

#define FEDGNN_DOUBLE_KEY(name, field)                                        \
  Key {                                                                       \
    name,                                                                     \
        [](ExperimentConfig& c, const std::string& v, const std::string& w) { \
          c.field = ToDouble(v, w, name);                                     \
        },                                                                    \
        [](const ExperimentConfig& c) { return FormatDouble(c.field); }       \
  }

#define FEDGNN_INT_KEY(name, field)                                           \
  Key {                                                                       \
    name,                                                                     \
        [](ExperimentConfig& c, const std::string& v, const std::string& w) { \
          c.field = ToInt(v, w, name);                                        \
        },                                                                    \
        [](const ExperimentConfig& c) { return std::to_string(c.field); }     \
  }

#define FEDGNN_BOOL_KEY(name, field)                                          \
  Key {                                                                       \
    name,                                                                     \
        [](ExperimentConfig& c, const std::string& v, const std::string& w) { \
          c.field = ToBool(v, w, name);                                       \
        },                                                                    \
        [](const ExperimentConfig& c) {                                       \
          return std::string(c.field ? "true" : "false");                     \
        }                                                                     \
  }

template <typename Parse>
auto Named(Parse parse, const std::string& v, const std::string& w,
           const std::string& key) {
  try {
    return parse(v);
  } catch (const ValidationError& e) {
    Bad(w, key, e.what());
  }
}

const std::vector<Key>& Keys() {
  static const std::vector<Key> keys = {
      {"nodes",
       [](ExperimentConfig& c, const std::string& v, const std::string&) {
         c.nodes_csv = v;
       },
       [](const ExperimentConfig& c) { return c.nodes_csv.string(); }},
      {"edges",
       [](ExperimentConfig& c, const std::string& v, const std::string&) {
         c.edges_csv = v;
       },
       [](const ExperimentConfig& c) { return c.edges_csv.string(); }},
      {"clients",
       [](ExperimentConfig& c, const std::string& v, const std::string& w) {
         const int n = ToInt(v, w, "clients");
         if (n < 0) Bad(w, "clients", "must be >= 0");
         c.clients = static_cast<ClientId>(n);
       },
       [](const ExperimentConfig& c) { return std::to_string(c.clients); }},
      {"gen.generator",
       [](ExperimentConfig& c, const std::string& v, const std::string& w) {
         c.gen.generator = Named(ParseGenerator, v, w, "gen.generator");
       },
       [](const ExperimentConfig& c) {
         return std::string(ToString(c.gen.generator));
       }},
      FEDGNN_INT_KEY("gen.nodes", gen.nodes),
      FEDGNN_INT_KEY("gen.clients", gen.clients),
      FEDGNN_INT_KEY("gen.feature_dim", gen.feature_dim),
      {"gen.seed",
       [](ExperimentConfig& c, const std::string& v, const std::string& w) {
         c.gen.seed = static_cast<std::uint64_t>(ToInt(v, w, "gen.seed"));
         c.gen_seed_set = true;
       },
       [](const ExperimentConfig& c) {
         return c.gen_seed_set ? std::to_string(c.gen.seed) : std::string();
       }},
      FEDGNN_DOUBLE_KEY("gen.imbalance", gen.imbalance),
      FEDGNN_DOUBLE_KEY("gen.edge_density", gen.edge_density),
      FEDGNN_INT_KEY("gen.pattern_count", gen.pattern_count),
      FEDGNN_INT_KEY("gen.pattern_length", gen.pattern_length),
      FEDGNN_DOUBLE_KEY("gen.illicit_ratio", gen.illicit_ratio),
      FEDGNN_DOUBLE_KEY("gen.cycle_signal", gen.cycle_signal),
      FEDGNN_INT_KEY("gen.blocks", gen.blocks),
      FEDGNN_DOUBLE_KEY("gen.p_in", gen.p_in),
      FEDGNN_DOUBLE_KEY("gen.p_out", gen.p_out),
      FEDGNN_DOUBLE_KEY("gen.feature_noise", gen.feature_noise),
      {"algorithm",
       [](ExperimentConfig& c, const std::string& v, const std::string& w) {
         c.hyper.algorithm = Named(ParseAlgorithm, v, w, "algorithm");
       },
       [](const ExperimentConfig& c) {
         return std::string(ToString(c.hyper.algorithm));
       }},
      FEDGNN_INT_KEY("rounds", hyper.rounds),
      FEDGNN_INT_KEY("k_local", hyper.local_steps),
      FEDGNN_DOUBLE_KEY("lr", hyper.lr),
      FEDGNN_DOUBLE_KEY("gamma", hyper.gamma),
      FEDGNN_DOUBLE_KEY("beta", hyper.beta),
      FEDGNN_INT_KEY("batch_size", hyper.batch_size),
      {"fanouts",
       [](ExperimentConfig& c, const std::string& v, const std::string& w) {
         c.hyper.fanouts =
             ToList<int>(v, [&](const std::string& f) { return ToInt(f, w, "fanouts"); });
       },
       [](const ExperimentConfig& c) { return JoinList(c.hyper.fanouts); }},
      {"remote_mode",
       [](ExperimentConfig& c, const std::string& v, const std::string& w) {
         if (v == "exclude") {
           c.hyper.remote_mode = RemoteMode::kExclude;
         } else if (v == "buffered") {
           c.hyper.remote_mode = RemoteMode::kBuffered;
         } else {
           Bad(w, "remote_mode", "expected exclude or buffered, got '" + v + "'");
         }
       },
       [](const ExperimentConfig& c) {
         return std::string(c.hyper.remote_mode == RemoteMode::kBuffered ? "buffered"
                                                                         : "exclude");
       }},
      FEDGNN_BOOL_KEY("class_weighting", hyper.class_weighting),
      FEDGNN_DOUBLE_KEY("sigma0", hyper.noise.sigma0),
      FEDGNN_DOUBLE_KEY("sigma1", hyper.noise.sigma1),
      FEDGNN_DOUBLE_KEY("sigma2", hyper.noise.sigma2),
      FEDGNN_DOUBLE_KEY("clip_embed", hyper.noise.clip_embed),
      FEDGNN_DOUBLE_KEY("clip_model", hyper.noise.clip_model),
      FEDGNN_DOUBLE_KEY("delta", hyper.noise.delta),
      {"seed",
       [](ExperimentConfig& c, const std::string& v, const std::string& w) {
         const int s = ToInt(v, w, "seed");
         if (s < 0) Bad(w, "seed", "must be >= 0");
         c.hyper.seed = static_cast<std::uint64_t>(s);
       },
       [](const ExperimentConfig& c) { return std::to_string(c.hyper.seed); }},
      {"eval_split",
       [](ExperimentConfig& c, const std::string& v, const std::string& w) {
         if (v == "train") {
           c.hyper.eval_split = Split::kTrain;
         } else if (v == "validation") {
           c.hyper.eval_split = Split::kValidation;
         } else if (v == "test") {
           c.hyper.eval_split = Split::kTest;
         } else {
           Bad(w, "eval_split", "expected train, validation or test, got '" + v + "'");
         }
       },
       [](const ExperimentConfig& c) { return std::string(SplitName(c.hyper.eval_split)); }},
      FEDGNN_BOOL_KEY("track_grad_norm", hyper.track_grad_norm),
      FEDGNN_BOOL_KEY("timing", hyper.timing),
      FEDGNN_INT_KEY("threads", hyper.threads),
      {"architecture",
       [](ExperimentConfig& c, const std::string& v, const std::string& w) {
         c.architecture = Named(ParseArchitecture, v, w, "architecture");
       },
       [](const ExperimentConfig& c) { return std::string(ToString(c.architecture)); }},
      {"activation",
       [](ExperimentConfig& c, const std::string& v, const std::string& w) {
         c.activation = Named(ParseActivation, v, w, "activation");
       },
       [](const ExperimentConfig& c) { return std::string(ToString(c.activation)); }},
      {"task",
       [](ExperimentConfig& c, const std::string& v, const std::string& w) {
         if (v == "auto") {
           c.task.reset();
         } else {
           c.task = Named(ParseTaskKind, v, w, "task");
         }
       },
       [](const ExperimentConfig& c) {
         return c.task ? std::string(ToString(*c.task)) : std::string("auto");
       }},
      {"hidden",
       [](ExperimentConfig& c, const std::string& v, const std::string& w) {
         c.hidden = ToList<int>(v, [&](const std::string& f) { return ToInt(f, w, "hidden"); });
       },
       [](const ExperimentConfig& c) { return JoinList(c.hidden); }},
      FEDGNN_DOUBLE_KEY("gin_epsilon", gin_epsilon),
      {"output_dir",
       [](ExperimentConfig& c, const std::string& v, const std::string&) {
         c.output_dir = v;
       },
       [](const ExperimentConfig& c) { return c.output_dir.string(); }},
      FEDGNN_INT_KEY("repeats", repeats),
      FEDGNN_INT_KEY("privacy_k", privacy_k),
      {"percentiles",
       [](ExperimentConfig& c, const std::string& v, const std::string& w) {
         c.percentiles = ToList<double>(
             v, [&](const std::string& f) { return ToDouble(f, w, "percentiles"); });
       },
       [](const ExperimentConfig& c) { return JoinList(c.percentiles); }},
      FEDGNN_BOOL_KEY("checkpoint", checkpoint),
  };
  return keys;
}

#undef FEDGNN_DOUBLE_KEY
#undef FEDGNN_INT_KEY
#undef FEDGNN_BOOL_KEY

}  // namespace

void SetKey(ExperimentConfig& config, const std::string& key,
            const std::string& value, const std::string& where) {
  for (const Key& k : Keys()) {
    if (k.name == key) {
      k.set(config, value, where);
      return;
    }
  }
  throw ConfigError(where + ": unknown key '" + key + "'");
}

ExperimentConfig ParseConfig(std::istream& is, const std::string& source,
                             const std::filesystem::path& base_dir) {
  ExperimentConfig config;
  std::string line;
  int number = 0;
  while (std::getline(is, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = Trim(line);
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(number);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(where + ": expected key=value, got '" + line + "'");
    }
    SetKey(config, Trim(line.substr(0, eq)), Trim(line.substr(eq + 1)), where);
  }
  if (!base_dir.empty()) {
    if (!config.nodes_csv.empty() && config.nodes_csv.is_relative()) {
      config.nodes_csv = base_dir / config.nodes_csv;
    }
    if (!config.edges_csv.empty() && config.edges_csv.is_relative()) {
      config.edges_csv = base_dir / config.edges_csv;
    }
  }
  return config;
}

ExperimentConfig LoadConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  return ParseConfig(in, path.filename().string(), path.parent_path());
}

void ValidateConfig(const ExperimentConfig& config) {
  if (config.uses_csv()) {
    if (config.nodes_csv.empty() || config.edges_csv.empty()) {
      throw ConfigError("both nodes and edges must be given");
    }
    for (const auto& path : {config.nodes_csv, config.edges_csv}) {
      if (!std::filesystem::is_regular_file(path)) {
        throw ConfigError("no such graph file: " + path.string());
      }
    }
  } else {
    ValidateGenSpec(config.gen);
  }
  if (config.repeats < 1) throw ConfigError("repeats must be >= 1");
  if (config.privacy_k < 1) throw ConfigError("privacy_k must be >= 1");
  if (config.hidden.empty()) throw ConfigError("hidden must list at least one layer");
  for (int h : config.hidden) {
    if (h < 1) throw ConfigError("hidden widths must be >= 1");
  }
  for (double q : config.percentiles) {
    if (!(q > 0.0 && q <= 100.0)) throw ConfigError("percentiles must be in (0, 100]");
  }
  ValidateHyperparams(config.hyper);
}

void WriteConfig(std::ostream& os, const ExperimentConfig& config) {
  for (const Key& k : Keys()) {
    const std::string value = k.get(config);
    if (!value.empty()) os << k.name << '=' << value << '\n';
  }
}

std::vector<std::string> KnownKeys() {
  std::vector<std::string> out;
  for (const Key& k : Keys()) out.push_back(k.name);
  return out;
}

}  // namespace fedgnn::cli
