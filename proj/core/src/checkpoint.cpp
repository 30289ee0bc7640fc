/*
 * Copyright 2026 The asyrec Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "asyrec/checkpoint.hpp"

#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "asyrec/io.hpp"

namespace asyrec {

namespace {

void write_tensor(std::ostream& out, const std::string& name, const Tensor& t) {
  out << "tensor " << name << ' ' << t.rank();
  for (std::size_t e : t.shape()) out << ' ' << e;
  out << '\n';
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (k > 0) out << ' ';
    out << io::format_hex(t[k]);
  }
  out << '\n';
}

void write_vector(std::ostream& out, const std::string& name, const std::vector<double>& v) {
  write_tensor(out, name, Tensor::vector(v));
}

std::string next_line(std::istream& in, const char* what) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(std::string("checkpoint truncated before ") + what);
  return line;
}

std::string keyed(std::istream& in, const std::string& key) {
  const std::string line = next_line(in, key.c_str());
  if (line.rfind(key + " ", 0) != 0) throw std::runtime_error("checkpoint: expected '" + key + "', got '" + line + "'");
  return line.substr(key.size() + 1);
}

}  // namespace

void write_checkpoint(std::ostream& out, const AsyrecParams& params) {
  out << "#asyrec-checkpoint v1\n";
  out << "schema " << params.schema.name << '\n';
  out << "dim " << params.dim << '\n';
  out << "leaky_slope " << io::format_hex(params.graph.leaky_slope) << '\n';
  out << "epsilon " << io::format_hex(params.temporal.epsilon) << '\n';
  write_vector(out, "standardizer.mean", params.standardizer.mean);
  write_vector(out, "standardizer.scale", params.standardizer.scale);
  for (const auto& [name, t] : params.named_parameters()) write_tensor(out, name, *t);
}

AsyrecParams read_checkpoint(std::istream& in) {
  if (next_line(in, "header") != "#asyrec-checkpoint v1") throw std::runtime_error("not an asyrec checkpoint (v1)");
  const LabelSchema schema = schema_by_name(keyed(in, "schema"));
  const std::size_t dim = io::parse_size(keyed(in, "dim"));
  AsyrecParams params = AsyrecParams::init(dim, schema, 0);
  params.graph.leaky_slope = io::parse_double(keyed(in, "leaky_slope"));
  params.temporal.epsilon = io::parse_double(keyed(in, "epsilon"));

  std::map<std::string, Tensor> tensors;
  std::string header;
  while (std::getline(in, header)) {
    if (header.empty()) continue;
    std::istringstream hs(header);
    std::string tag, name;
    std::size_t rank = 0;
    hs >> tag >> name >> rank;
    if (tag != "tensor" || !hs) throw std::runtime_error("checkpoint: malformed tensor header '" + header + "'");
    Shape shape(rank);
    for (std::size_t& e : shape) hs >> e;
    if (!hs) throw std::runtime_error("checkpoint: malformed extents for '" + name + "'");
    const std::string body = next_line(in, name.c_str());
    std::vector<double> values;
    for (std::string_view part : io::split(body, ' ')) values.push_back(io::parse_double(part));
    tensors[name] = Tensor(shape, std::move(values));
  }

  auto take = [&](const std::string& name, const Shape& expected) {
    auto it = tensors.find(name);
    if (it == tensors.end()) throw std::runtime_error("checkpoint: missing tensor '" + name + "'");
    if (it->second.shape() != expected) {
      throw std::runtime_error("checkpoint: tensor '" + name + "' has shape " + shape_to_string(it->second.shape()) +
                               ", expected " + shape_to_string(expected));
    }
    Tensor t = std::move(it->second);
    tensors.erase(it);
    return t;
  };
  params.standardizer.mean = take("standardizer.mean", {kModalityCount * dim}).values();
  params.standardizer.scale = take("standardizer.scale", {kModalityCount * dim}).values();
  for (auto& [name, t] : params.named_parameters()) *t = take(name, t->shape());
  if (!tensors.empty()) throw std::runtime_error("checkpoint: unexpected tensor '" + tensors.begin()->first + "'");
  return params;
}

void save_checkpoint(const std::filesystem::path& path, const AsyrecParams& params) {
  std::ostringstream out;
  write_checkpoint(out, params);
  io::write_file_atomic(path, out.str());
}

AsyrecParams load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint '" + path.string() + "'");
  return read_checkpoint(in);
}

}  // namespace asyrec
