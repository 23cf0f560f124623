// Copyright 2026 The latticeloss Authors. All Rights Reserved.
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

#include <bit>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "latticeloss/lattice.h"

namespace latticeloss {
namespace {

using nlohmann::json;

constexpr char kMagic[4] = {'L', 'T', 'C', '1'};

static_assert(std::endian::native == std::endian::little,
              "binary lattice I/O assumes a little-endian host");

std::vector<double> ReadGrid(const json& doc, const char* key,
                             std::size_t expected) {
  if (!doc.contains(key)) {
    throw std::runtime_error(std::string("lattice document missing \"") + key +
                             "\"");
  }
  const json& array = doc.at(key);
  if (!array.is_array() || array.size() != expected) {
    throw std::runtime_error(std::string("\"") + key +
                             "\" must be an array of " +
                             std::to_string(expected) + " numbers");
  }
  std::vector<double> values;
  values.reserve(expected);
  for (const json& entry : array) {
    if (!entry.is_number()) {
      throw std::runtime_error(std::string("non-numeric entry in \"") + key +
                               "\"");
    }
    const double v = entry.get<double>();
    if (!std::isfinite(v)) {
      throw std::runtime_error(std::string("non-finite entry in \"") + key +
                               "\"");
    }
    values.push_back(v);
  }
  return values;
}

int ReadDim(const json& doc, const char* key) {
  if (!doc.contains(key) || !doc.at(key).is_number_integer()) {
    throw std::runtime_error(std::string("lattice document needs integer \"") +
                             key + "\"");
  }
  const auto v = doc.at(key).get<std::int64_t>();
  if (v < 0 || v > (1 << 24)) {
    throw std::runtime_error(std::string("\"") + key + "\" out of range");
  }
  return static_cast<int>(v);
}

template <typename T>
void Append(std::string& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T Extract(std::string_view bytes, std::size_t& offset) {
  if (offset + sizeof(T) > bytes.size()) {
    throw std::runtime_error("binary lattice truncated");
  }
  T value;
  std::memcpy(&value, bytes.data() + offset, sizeof(T));
  offset += sizeof(T);
  return value;
}

}  // namespace

std::string WriteLatticeJson(const Lattice& lattice) {
  json doc;
  doc["T"] = lattice.num_frames();
  doc["U"] = lattice.num_tokens();
  const auto y = lattice.y_grid().values();
  const auto blank = lattice.blank_grid().values();
  doc["y"] = std::vector<double>(y.begin(), y.end());
  doc["blank"] = std::vector<double>(blank.begin(), blank.end());
  doc["normalized"] = lattice.normalized();
  return doc.dump();
}

Lattice ReadLatticeJson(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("malformed lattice JSON: ") + e.what());
  }
  if (!doc.is_object()) throw std::runtime_error("lattice JSON must be an object");
  const int T = ReadDim(doc, "T");
  const int U = ReadDim(doc, "U");
  if (T < 1) throw std::runtime_error("lattice needs T >= 1");
  auto y = ReadGrid(doc, "y", static_cast<std::size_t>(T) * U);
  auto blank = ReadGrid(doc, "blank", static_cast<std::size_t>(T) * (U + 1));
  bool normalized = false;
  if (doc.contains("normalized")) {
    if (!doc.at("normalized").is_boolean()) {
      throw std::runtime_error("\"normalized\" must be a boolean");
    }
    normalized = doc.at("normalized").get<bool>();
  }
  return Lattice(T, U, std::move(y), std::move(blank), normalized);
}

std::string WriteLatticeBinary(const Lattice& lattice) {
  std::string out(kMagic, sizeof(kMagic));
  Append(out, static_cast<std::uint32_t>(lattice.num_frames()));
  Append(out, static_cast<std::uint32_t>(lattice.num_tokens()));
  for (double v : lattice.y_grid().values()) Append(out, v);
  for (double v : lattice.blank_grid().values()) Append(out, v);
  return out;
}

Lattice ReadLatticeBinary(std::string_view bytes) {
  if (bytes.size() < sizeof(kMagic) ||
      std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("binary lattice has bad magic");
  }
  std::size_t offset = sizeof(kMagic);
  const auto T = Extract<std::uint32_t>(bytes, offset);
  const auto U = Extract<std::uint32_t>(bytes, offset);
  if (T < 1 || T > (1u << 24) || U > (1u << 24)) {
    throw std::runtime_error("binary lattice dimensions out of range");
  }
  const std::size_t ny = static_cast<std::size_t>(T) * U;
  const std::size_t nb = static_cast<std::size_t>(T) * (U + 1);
  if (bytes.size() != offset + (ny + nb) * sizeof(double)) {
    throw std::runtime_error("binary lattice size does not match T and U");
  }
  std::vector<double> y(ny), blank(nb);
  for (auto& v : y) v = Extract<double>(bytes, offset);
  for (auto& v : blank) v = Extract<double>(bytes, offset);
  for (double v : y) {
    if (!std::isfinite(v)) throw std::runtime_error("non-finite entry in y");
  }
  for (double v : blank) {
    if (!std::isfinite(v)) throw std::runtime_error("non-finite entry in blank");
  }
  return Lattice(static_cast<int>(T), static_cast<int>(U), std::move(y),
                 std::move(blank));
}

}  // namespace latticeloss
