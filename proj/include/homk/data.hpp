// Copyright 2026 The homkernel Authors
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

// Labelled two-feature datasets: the four-blob generator and CSV I/O.

#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "homk/encoding.hpp"
#include "homk/errors.hpp"
#include "homk/mmd.hpp"

namespace homk {

struct DataRow {
  FeatureVector features;
  Label label;

  friend bool operator==(const DataRow& a, const DataRow& b) {
    return a.label == b.label && a.features.size() == b.features.size() &&
           a.features == b.features;
  }
};

struct Dataset {
  std::vector<DataRow> rows;

  std::size_t size() const { return rows.size(); }
  bool empty() const { return rows.empty(); }

  std::size_t count(Label l) const {
    return static_cast<std::size_t>(
        std::count_if(rows.begin(), rows.end(), [l](const DataRow& r) { return r.label == l; }));
  }

  /// Feature vectors of one class, in row order.
  std::vector<FeatureVector> features_of(Label l) const {
    std::vector<FeatureVector> out;
    for (const DataRow& r : rows) {
      if (r.label == l) out.push_back(r.features);
    }
    return out;
  }

  friend bool operator==(const Dataset& a, const Dataset& b) { return a.rows == b.rows; }
};

/// Four isotropic Gaussian blobs, two per class.
///
/// The default layout is a skewed XOR: (8, 1) and (-8, -1) are P, (8, -1) and
/// (-8, 1) are Q. Classes differ only in the sign of F1*F2, so no line
/// separates them, and the F1^2 coordinate dominates both classes' images so
/// their untrained mean embeddings nearly coincide.
struct BlobSpec {
  std::array<std::array<double, 2>, 4> centers{{{8.0, 1.0}, {-8.0, -1.0}, {8.0, -1.0}, {-8.0, 1.0}}};
  double sigma = 0.3;
  int points_per_blob = 250;
  std::array<Label, 4> grouping{Label::P, Label::P, Label::Q, Label::Q};
  std::uint64_t seed = 1;

  void validate() const {
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw DomainError("BlobSpec: sigma must be >= 0");
    if (points_per_blob < 1) throw DomainError("BlobSpec: points_per_blob must be positive");
    const auto n_p = std::count(grouping.begin(), grouping.end(), Label::P);
    if (n_p != 2) throw DomainError("BlobSpec: grouping must assign two blobs per class");
    for (const auto& c : centers) {
      if (!std::isfinite(c[0]) || !std::isfinite(c[1])) throw DomainError("BlobSpec: bad center");
    }
  }
};

inline Dataset generate_blobs(const BlobSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Dataset d;
  d.rows.reserve(4 * static_cast<std::size_t>(spec.points_per_blob));
  for (int b = 0; b < 4; ++b) {
    for (int i = 0; i < spec.points_per_blob; ++i) {
      FeatureVector x(2);
      for (int k = 0; k < 2; ++k) {
        const double z = normal(rng);
        x[k] = spec.sigma == 0.0 ? spec.centers[b][k] : spec.centers[b][k] + spec.sigma * z;
      }
      d.rows.push_back({std::move(x), spec.grouping[b]});
    }
  }
  std::shuffle(d.rows.begin(), d.rows.end(), rng);
  return d;
}

/// Same distribution and size as the training set, fresh seed.
inline Dataset generate_test_set(const BlobSpec& spec, std::uint64_t test_seed) {
  if (test_seed == spec.seed) {
    throw DomainError("generate_test_set: test seed must differ from the training seed");
  }
  BlobSpec test = spec;
  test.seed = test_seed;
  return generate_blobs(test);
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_double(std::string_view s, std::size_t line, const char* what) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ParseError(std::string("bad ") + what + " '" + std::string(s) + "'", line);
  }
  return v;
}

inline Label parse_label(std::string_view s, std::size_t line) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  if (s == "P") return Label::P;
  if (s == "Q") return Label::Q;
  throw ParseError("unknown label '" + std::string(s) + "'", line);
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

inline constexpr std::string_view kDatasetHeader = "F1,F2,label";

/// Header `F1,F2,label`, 17 significant digits so reading back is exact.
inline void write_dataset(std::ostream& os, const Dataset& d) {
  os << kDatasetHeader << '\n';
  for (const DataRow& r : d.rows) {
    if (r.features.size() != 2) throw DomainError("write_dataset: rows must have two features");
    os << format_double(r.features[0]) << ',' << format_double(r.features[1]) << ','
       << label_name(r.label) << '\n';
  }
}

inline Dataset read_dataset(std::istream& is) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(is, line)) throw ParseError("missing header", line_no);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kDatasetHeader) throw ParseError("expected header 'F1,F2,label'", line_no);
  Dataset d;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_commas(line);
    if (fields.size() != 3) throw ParseError("expected 3 fields", line_no);
    FeatureVector x(2);
    x << parse_double(fields[0], line_no, "F1"), parse_double(fields[1], line_no, "F2");
    d.rows.push_back({std::move(x), parse_label(fields[2], line_no)});
  }
  return d;
}

inline void write_dataset(const std::string& path, const Dataset& d) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_dataset(os, d);
  if (!os) throw std::runtime_error("write failed: " + path);
}

inline Dataset read_dataset(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ParseError("cannot open " + path);
  return read_dataset(is);
}

}  // namespace homk
