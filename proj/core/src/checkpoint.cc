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

#include "fedgnn/checkpoint.h"

#include <fstream>
#include <istream>
#include <ostream>

#include "fedgnn/csv.h"
#include "json.hpp"

namespace fedgnn {
namespace {

using nlohmann::json;

json ParseHeader(std::istream& is, const char* what) {
  std::string line;
  if (!std::getline(is, line)) {
    throw ValidationError(std::string("checkpoint truncated before ") + what);
  }
  try {
    return json::parse(line);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad ") + what + " header: " + e.what());
  }
}

}  // namespace

void WriteMatrix(std::ostream& os, const std::string& name, const Matrix& m) {
  json header = {{"name", name}, {"rows", m.rows()}, {"cols", m.cols()}};
  os << header.dump() << '\n';
  std::string line;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    line.clear();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c > 0) line += ',';
      line += FormatDouble(m(r, c));
    }
    os << line << '\n';
  }
}

Matrix ReadMatrix(std::istream& is, std::string* name) {
  const json header = ParseHeader(is, "tensor");
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  try {
    if (name != nullptr) *name = header.at("name").get<std::string>();
    rows = header.at("rows").get<Eigen::Index>();
    cols = header.at("cols").get<Eigen::Index>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad tensor header: ") + e.what());
  }
  if (rows < 0 || cols < 0) throw ValidationError("negative tensor shape");
  Matrix m(rows, cols);
  std::string line;
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (!std::getline(is, line)) throw ValidationError("tensor rows truncated");
    const auto fields = SplitCsvLine(line);
    if (static_cast<Eigen::Index>(fields.size()) != cols &&
        !(cols == 0 && fields.size() == 1 && fields[0].empty())) {
      throw ValidationError("tensor row has " + std::to_string(fields.size()) +
                            " values, expected " + std::to_string(cols));
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = ParseDouble(fields[c], "tensor value");
    }
  }
  return m;
}

void WriteCheckpoint(std::ostream& os, const ModelParams& params) {
  const auto& c = params.config;
  json header = {{"format", "fedgnn-checkpoint"},
                 {"version", 1},
                 {"architecture", std::string(ToString(c.architecture))},
                 {"activation", std::string(ToString(c.activation))},
                 {"task", std::string(ToString(c.task))},
                 {"gin_epsilon", c.gin_epsilon},
                 {"dims", c.dims},
                 {"num_classes", c.num_classes},
                 {"tensors", params.weights.num_tensors()}};
  os << header.dump() << '\n';
  for (std::size_t i = 0; i < params.weights.num_tensors(); ++i) {
    WriteMatrix(os, params.weights.tensor_name(i), params.weights.tensor(i));
  }
}

ModelParams ReadCheckpoint(std::istream& is) {
  const json header = ParseHeader(is, "checkpoint");
  ModelParams p;
  std::size_t tensors = 0;
  try {
    if (header.at("format").get<std::string>() != "fedgnn-checkpoint") {
      throw ValidationError("not a fedgnn checkpoint");
    }
    if (header.at("version").get<int>() != 1) {
      throw ValidationError("unsupported checkpoint version");
    }
    p.config.architecture =
        ParseArchitecture(header.at("architecture").get<std::string>());
    p.config.activation = ParseActivation(header.at("activation").get<std::string>());
    p.config.task = ParseTaskKind(header.at("task").get<std::string>());
    p.config.gin_epsilon = header.at("gin_epsilon").get<double>();
    p.config.dims = header.at("dims").get<std::vector<int>>();
    p.config.num_classes = header.at("num_classes").get<int>();
    tensors = header.at("tensors").get<std::size_t>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad checkpoint header: ") + e.what());
  }
  ValidateConfig(p.config);
  p.weights = InitParams(p.config, 0).weights;
  if (tensors != p.weights.num_tensors()) {
    throw ValidationError("checkpoint tensor count does not match dims");
  }
  for (std::size_t i = 0; i < tensors; ++i) {
    std::string name;
    Matrix m = ReadMatrix(is, &name);
    if (name != p.weights.tensor_name(i)) {
      throw ValidationError("expected tensor " + p.weights.tensor_name(i) +
                            ", found " + name);
    }
    if (m.rows() != p.weights.tensor(i).rows() ||
        m.cols() != p.weights.tensor(i).cols()) {
      throw ValidationError("tensor " + name + " has the wrong shape");
    }
    p.weights.tensor(i) = std::move(m);
  }
  return p;
}

void SaveCheckpoint(const std::filesystem::path& path, const ModelParams& params) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ValidationError("cannot write " + path.string());
  WriteCheckpoint(os, params);
}

ModelParams LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ValidationError("cannot read " + path.string());
  return ReadCheckpoint(is);
}

}  // namespace fedgnn
