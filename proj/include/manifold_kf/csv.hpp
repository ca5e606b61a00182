// Copyright 2026 manifold_kf contributors
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

#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "manifold_kf/errors.hpp"
#include "manifold_kf/simkit.hpp"
#include "manifold_kf/tracking.hpp"

namespace manifold_kf {

/// CSV schemas (UTF-8, LF line endings, comma separated, '.' decimal):
///   measurements:  t,z,valid            z empty iff valid = 0
///   truth:         t,theta,omega,alpha
///   records:       t,z,gated,theta,omega,alpha,p00,p11,p22,
///                  truth_theta,truth_omega,truth_alpha
/// Values are written with 17 significant digits so finite doubles
/// roundtrip losslessly. NaN or infinity is rejected on both sides.

inline constexpr std::string_view kMeasurementsHeader = "t,z,valid";
inline constexpr std::string_view kTruthHeader = "t,theta,omega,alpha";
inline constexpr std::string_view kRecordsHeader =
    "t,z,gated,theta,omega,alpha,p00,p11,p22,truth_theta,truth_omega,truth_alpha";

namespace csv_detail {

inline std::string format_double(double v) {
  if (!std::isfinite(v)) {
    throw std::invalid_argument("csv: refusing to write a non-finite value");
  }
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

inline double parse_double(std::string_view field, int line_no, const char* column) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw ParseError("line " + std::to_string(line_no) + ": cannot parse '" +
                     std::string(field) + "' as a number in column " + column);
  }
  if (!std::isfinite(value)) {
    throw ParseError("line " + std::to_string(line_no) + ": non-finite value in column " +
                     column);
  }
  return value;
}

inline bool parse_flag(std::string_view field, int line_no, const char* column) {
  if (field == "0") return false;
  if (field == "1") return true;
  throw ParseError("line " + std::to_string(line_no) + ": column " + column +
                   " must be 0 or 1, got '" + std::string(field) + "'");
}

inline void require_fields(const std::vector<std::string_view>& fields, std::size_t expected,
                           int line_no) {
  if (fields.size() != expected) {
    throw ParseError("line " + std::to_string(line_no) + ": expected " +
                     std::to_string(expected) + " fields, got " +
                     std::to_string(fields.size()));
  }
}

inline std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

// Reads all lines, validates the header, strips trailing CR. Returns data
// lines paired with 1-based line numbers.
inline std::vector<std::pair<int, std::string>> read_data_lines(const std::string& path,
                                                                std::string_view header) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::vector<std::pair<int, std::string>> lines;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1) {
      if (line != header) {
        throw ParseError("line 1: expected header '" + std::string(header) + "', got '" +
                         line + "'");
      }
      continue;
    }
    if (line.empty()) continue;
    lines.emplace_back(line_no, line);
  }
  if (line_no == 0) throw ParseError("line 1: missing header");
  return lines;
}

}  // namespace csv_detail

inline void write_measurements(const std::string& path, const std::vector<Measurement>& zs) {
  auto out = csv_detail::open_for_write(path);
  out << kMeasurementsHeader << "\n";
  for (const Measurement& m : zs) {
    out << csv_detail::format_double(m.t) << ",";
    if (m.z) out << csv_detail::format_double(*m.z);
    out << "," << (m.z ? 1 : 0) << "\n";
  }
  if (!out) throw IoError("failed writing '" + path + "'");
}

inline std::vector<Measurement> read_measurements(const std::string& path) {
  std::vector<Measurement> result;
  for (const auto& [line_no, line] :
       csv_detail::read_data_lines(path, kMeasurementsHeader)) {
    const auto fields = csv_detail::split_fields(line);
    csv_detail::require_fields(fields, 3, line_no);
    Measurement m;
    m.t = csv_detail::parse_double(fields[0], line_no, "t");
    const bool valid = csv_detail::parse_flag(fields[2], line_no, "valid");
    if (valid) {
      m.z = csv_detail::parse_double(fields[1], line_no, "z");
    } else if (!fields[1].empty()) {
      throw ParseError("line " + std::to_string(line_no) +
                       ": z must be empty when valid = 0");
    }
    result.push_back(m);
  }
  return result;
}

inline void write_truth(const std::string& path, const std::vector<TruthSample>& truth) {
  auto out = csv_detail::open_for_write(path);
  out << kTruthHeader << "\n";
  for (const TruthSample& s : truth) {
    out << csv_detail::format_double(s.t) << "," << csv_detail::format_double(s.theta) << ","
        << csv_detail::format_double(s.omega) << "," << csv_detail::format_double(s.alpha)
        << "\n";
  }
  if (!out) throw IoError("failed writing '" + path + "'");
}

inline std::vector<TruthSample> read_truth(const std::string& path) {
  std::vector<TruthSample> result;
  for (const auto& [line_no, line] : csv_detail::read_data_lines(path, kTruthHeader)) {
    const auto fields = csv_detail::split_fields(line);
    csv_detail::require_fields(fields, 4, line_no);
    TruthSample s;
    s.t = csv_detail::parse_double(fields[0], line_no, "t");
    s.theta = csv_detail::parse_double(fields[1], line_no, "theta");
    s.omega = csv_detail::parse_double(fields[2], line_no, "omega");
    s.alpha = csv_detail::parse_double(fields[3], line_no, "alpha");
    result.push_back(s);
  }
  return result;
}

inline void write_track_records(const std::string& path,
                                const std::vector<TrackRecord>& records) {
  auto out = csv_detail::open_for_write(path);
  out << kRecordsHeader << "\n";
  for (const TrackRecord& r : records) {
    out << csv_detail::format_double(r.t) << ",";
    if (r.z) out << csv_detail::format_double(*r.z);
    out << "," << (r.gated ? 1 : 0);
    for (int i = 0; i < 3; ++i) {
      out << ",";
      if (i < r.mean.size()) out << csv_detail::format_double(r.mean[i]);
    }
    for (int i = 0; i < 3; ++i) {
      out << ",";
      if (i < r.cov_diag.size()) out << csv_detail::format_double(r.cov_diag[i]);
    }
    for (int i = 0; i < 3; ++i) {
      out << ",";
      if (r.truth) out << csv_detail::format_double((*r.truth)[i]);
    }
    out << "\n";
  }
  if (!out) throw IoError("failed writing '" + path + "'");
}

inline std::vector<TrackRecord> read_track_records(const std::string& path) {
  std::vector<TrackRecord> result;
  for (const auto& [line_no, line] : csv_detail::read_data_lines(path, kRecordsHeader)) {
    const auto fields = csv_detail::split_fields(line);
    csv_detail::require_fields(fields, 12, line_no);
    TrackRecord r;
    r.t = csv_detail::parse_double(fields[0], line_no, "t");
    if (!fields[1].empty()) r.z = csv_detail::parse_double(fields[1], line_no, "z");
    r.gated = csv_detail::parse_flag(fields[2], line_no, "gated");

    int dim = 0;
    for (int i = 0; i < 3; ++i) {
      if (!fields[3 + static_cast<std::size_t>(i)].empty()) dim = i + 1;
    }
    r.mean.resize(dim);
    r.cov_diag.resize(dim);
    const char* mean_cols[] = {"theta", "omega", "alpha"};
    const char* cov_cols[] = {"p00", "p11", "p22"};
    for (int i = 0; i < dim; ++i) {
      r.mean[i] = csv_detail::parse_double(fields[3 + static_cast<std::size_t>(i)], line_no,
                                           mean_cols[i]);
      r.cov_diag[i] = csv_detail::parse_double(fields[6 + static_cast<std::size_t>(i)],
                                               line_no, cov_cols[i]);
    }
    for (int i = dim; i < 3; ++i) {
      if (!fields[6 + static_cast<std::size_t>(i)].empty()) {
        throw ParseError("line " + std::to_string(line_no) +
                         ": covariance entry without a matching state slot");
      }
    }

    const bool has_truth = !fields[9].empty();
    if (has_truth) {
      Eigen::Vector3d truth;
      const char* truth_cols[] = {"truth_theta", "truth_omega", "truth_alpha"};
      for (int i = 0; i < 3; ++i) {
        truth[i] = csv_detail::parse_double(fields[9 + static_cast<std::size_t>(i)], line_no,
                                            truth_cols[i]);
      }
      r.truth = truth;
    } else if (!fields[10].empty() || !fields[11].empty()) {
      throw ParseError("line " + std::to_string(line_no) +
                       ": truth columns must be all present or all empty");
    }
    result.push_back(r);
  }
  return result;
}

}  // namespace manifold_kf
