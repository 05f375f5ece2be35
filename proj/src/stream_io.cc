// Copyright 2026 The growingdp Authors
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

#include <fstream>
#include <stdexcept>

#include "growingdp/core.h"
#include "json.hpp"

namespace growingdp {

DatabaseStream LoadStream(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("stream file: cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("stream file: missing header line");
  nlohmann::json header = nlohmann::json::parse(line);
  const int universe = header.at("N").get<int>();
  const int64_t n = header.at("n").get<int64_t>();
  std::vector<int64_t> initial =
      header.at("initial").get<std::vector<int64_t>>();
  int64_t total = 0;
  for (int64_t c : initial) total += c;
  if (total != n)
    throw std::runtime_error("stream file: initial counts do not sum to n");
  std::vector<int> arrivals;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json row = nlohmann::json::parse(line);
    arrivals.push_back(row.at("arrival").get<int>());
  }
  return DatabaseStream(universe, std::move(initial), std::move(arrivals));
}

void SaveStream(const DatabaseStream& stream, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("stream file: cannot open " + path);
  nlohmann::ordered_json header;
  header["n"] = stream.start_size();
  header["N"] = stream.universe();
  header["initial"] = stream.initial_counts();
  out << header.dump() << "\n";
  for (int a : stream.arrivals()) {
    nlohmann::ordered_json row;
    row["arrival"] = a;
    out << row.dump() << "\n";
  }
}

}  // namespace growingdp
