/*
 * Copyright 2026 The resilient-cacc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "cacc/errors.hpp"
#include "cacc/sim_harness.hpp"

namespace cacc {

const char* const kTraceHeader =
    "t,leader_x,leader_v,follower_x,follower_v,y,x_lo,x_hi,x_hat,v_lo,v_hi,gap,e,r,u_leader,u_bar,u_follower,f,"
    "f_hat,f_tilde,eps_pos,contained";

namespace {

constexpr std::size_t kColumns = 22;

std::array<double*, kColumns - 1> numeric_fields(TraceRow& r) {
  return {&r.t,        &r.leader_x, &r.leader_v, &r.follower_x, &r.follower_v, &r.y,          &r.x_lo,
          &r.x_hi,     &r.x_hat,    &r.v_lo,     &r.v_hi,       &r.gap,        &r.e,          &r.r,
          &r.u_leader, &r.u_bar,    &r.u_follower, &r.f,        &r.f_hat,      &r.f_tilde,    &r.eps_pos};
}

}  // namespace

void MetricsAccumulator::add(const TraceRow& row) {
  if (rows_ == 0 || row.gap < min_gap_) min_gap_ = row.gap;
  ++rows_;
  if (row.contained) ++contained_;
  sq_pos_ += (row.x_hat - row.leader_x) * (row.x_hat - row.leader_x);
  sq_dist_ += (row.gap - s_.x_d) * (row.gap - s_.x_d);
  width_sum_ += row.eps_pos;
  er_norms_.push_back(std::hypot(row.e, row.r));
  if (s_.attack_time && row.t >= *s_.attack_time) {
    if (std::abs(row.f_tilde) > s_.settle_threshold) {
      exceeded_ = true;
      settled_since_.reset();
    } else if (!settled_since_) {
      settled_since_ = row.t;
    }
  }
}

RunMetrics MetricsAccumulator::finish() const {
  RunMetrics m;
  m.rows = rows_;
  if (rows_ == 0) return m;
  const double n = static_cast<double>(rows_);
  m.position_rmse = std::sqrt(sq_pos_ / n);
  m.distance_rmse = std::sqrt(sq_dist_ / n);
  m.min_gap = min_gap_;
  m.collision = min_gap_ <= 0.0;
  m.containment_rate = static_cast<double>(contained_) / n;
  m.mean_position_width = width_sum_ / n;
  const std::size_t tail_start = rows_ - std::max<std::size_t>(1, rows_ / 4);
  m.tail_er_norm = *std::max_element(er_norms_.begin() + static_cast<long>(tail_start), er_norms_.end());
  m.bounded = m.tail_er_norm <= s_.er_bound;
  if (s_.attack_time && settled_since_) m.settling_time = exceeded_ ? *settled_since_ - *s_.attack_time : 0.0;
  return m;
}

RunMetrics compute_metrics(const Trace& trace, const MetricsSettings& s) {
  MetricsAccumulator acc(s);
  for (const TraceRow& r : trace) acc.add(r);
  return acc.finish();
}

double compute_rmse(std::span<const double> series, std::span<const double> reference) {
  if (series.empty()) throw DimensionError("compute_rmse: empty series");
  if (series.size() != reference.size()) throw DimensionError("compute_rmse: length mismatch");
  double sq = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) sq += (series[i] - reference[i]) * (series[i] - reference[i]);
  return std::sqrt(sq / static_cast<double>(series.size()));
}

void write_trace(const Trace& trace, std::ostream& os) {
  os << kTraceHeader << '\n';
  char buf[32];
  for (const TraceRow& row : trace) {
    TraceRow r = row;
    for (double* f : numeric_fields(r)) {
      std::snprintf(buf, sizeof buf, "%.9g", *f);
      os << buf << ',';
    }
    os << (r.contained ? 1 : 0) << '\n';
  }
}

void emit_trace(const Trace& trace, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open trace file '" + path + "' for writing");
  write_trace(trace, os);
  os.flush();
  if (!os) throw IoError("write failed for trace file '" + path + "'");
}

Trace parse_trace(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw IoError("trace: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTraceHeader) throw IoError("trace: unexpected header '" + line + "'");
  Trace out;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (line.back() == ',') cells.emplace_back();
    if (cells.size() != kColumns)
      throw IoError("trace line " + std::to_string(lineno) + ": expected 22 columns, got " +
                    std::to_string(cells.size()));
    TraceRow r;
    auto fields = numeric_fields(r);
    for (std::size_t col = 0; col + 1 < kColumns; ++col) {
      char* end = nullptr;
      *fields[col] = std::strtod(cells[col].c_str(), &end);
      if (cells[col].empty() || *end != '\0')
        throw IoError("trace line " + std::to_string(lineno) + ": bad number '" + cells[col] + "'");
    }
    if (cells.back() != "0" && cells.back() != "1")
      throw IoError("trace line " + std::to_string(lineno) + ": bad contained flag '" + cells.back() + "'");
    r.contained = cells.back() == "1";
    out.push_back(r);
  }
  return out;
}

Trace read_trace(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open trace file '" + path + "'");
  try {
    return parse_trace(is);
  } catch (const IoError& e) {
    throw IoError(path + ": " + e.what());
  }
}

std::string format_metrics(const RunMetrics& m) {
  char buf[512];
  char settle[32] = "n/a";
  if (m.settling_time) std::snprintf(settle, sizeof settle, "%.3f s", *m.settling_time);
  std::snprintf(buf, sizeof buf,
                "rows                  %zu\n"
                "position RMSE         %.4f m\n"
                "distance RMSE         %.4f m\n"
                "minimum gap           %.4f m\n"
                "containment rate      %.6f\n"
                "mean position width   %.4f m\n"
                "f_tilde settling      %s\n"
                "tail ||(e, r)||       %.4f (%s)\n"
                "collision             %s\n",
                m.rows, m.position_rmse, m.distance_rmse, m.min_gap, m.containment_rate, m.mean_position_width,
                settle, m.tail_er_norm, m.bounded ? "bounded" : "above bound", m.collision ? "yes" : "no");
  return buf;
}

namespace {

struct Series {
  std::vector<double> y;
  const char* colour;
  const char* label;
};

void panel(std::ostringstream& os, const std::vector<double>& t, const std::vector<Series>& series, double top,
           const char* title) {
  constexpr double kLeft = 70.0, kWidth = 820.0, kHeight = 220.0;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const Series& s : series)
    for (double v : s.y) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  if (!(hi > lo)) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double t0 = t.front(), t1 = t.back() > t.front() ? t.back() : t.front() + 1.0;
  auto px = [&](double x) { return kLeft + (x - t0) / (t1 - t0) * kWidth; };
  auto py = [&](double v) { return top + kHeight - (v - lo) / (hi - lo) * kHeight; };
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"none\" stroke=\"#888\"/>\n"
                "<text x=\"%g\" y=\"%g\" font-size=\"13\">%s</text>\n"
                "<text x=\"5\" y=\"%g\" font-size=\"10\">%.4g</text>\n"
                "<text x=\"5\" y=\"%g\" font-size=\"10\">%.4g</text>\n",
                kLeft, top, kWidth, kHeight, kLeft, top - 6.0, title, top + 10.0, hi, top + kHeight, lo);
  os << buf;
  double legend_x = kLeft + kWidth - 10.0;
  for (const Series& s : series) {
    os << "<polyline fill=\"none\" stroke-width=\"1.2\" stroke=\"" << s.colour << "\" points=\"";
    for (std::size_t i = 0; i < t.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(t[i]), py(s.y[i]));
      os << buf;
    }
    os << "\"/>\n";
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%g\" y=\"%g\" font-size=\"11\" text-anchor=\"end\" fill=\"%s\">%s</text>\n", legend_x,
                  top + 14.0, s.colour, s.label);
    os << buf;
    legend_x -= 90.0;
  }
}

}  // namespace

std::string render_svg(const Trace& trace) {
  if (trace.empty()) throw DimensionError("render_svg: empty trace");
  const std::size_t stride = std::max<std::size_t>(1, trace.size() / 2000);
  std::vector<double> t;
  Series gap{{}, "#1f77b4", "gap"}, xlo{{}, "#2ca02c", "x_lo"}, xhi{{}, "#d62728", "x_hi"},
      xl{{}, "#000000", "leader x"}, f{{}, "#000000", "f"}, fhat{{}, "#ff7f0e", "f_hat"};
  for (std::size_t i = 0; i < trace.size(); i += stride) {
    const TraceRow& r = trace[i];
    t.push_back(r.t);
    gap.y.push_back(r.gap);
    xlo.y.push_back(r.x_lo - r.leader_x);
    xhi.y.push_back(r.x_hi - r.leader_x);
    xl.y.push_back(0.0);
    f.y.push_back(r.f);
    fhat.y.push_back(r.f_hat);
  }
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"920\" height=\"820\" font-family=\"sans-serif\">\n"
        "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  panel(os, t, {gap}, 30.0, "inter-vehicle gap [m]");
  panel(os, t, {xlo, xhi, xl}, 300.0, "position framers relative to leader x [m]");
  panel(os, t, {f, fhat}, 570.0, "attack f and estimate f_hat");
  os << "<text x=\"460\" y=\"810\" font-size=\"12\" text-anchor=\"middle\">t [s]</text>\n</svg>\n";
  return os.str();
}

}  // namespace cacc
