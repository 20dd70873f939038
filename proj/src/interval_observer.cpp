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

#include "cacc/interval_observer.hpp"

#include <cstdio>
#include <string>

#include "cacc/errors.hpp"

namespace cacc {
namespace {

void check_len(std::size_t got, std::size_t want, const char* what) {
  if (got != want)
    throw DimensionError(std::string(what) + ": length " + std::to_string(got) + ", expected " +
                         std::to_string(want));
}

// pos * a - neg * b, accumulated into out.
void add_split_product(const Matrix& pos, const Matrix& neg, std::span<const double> a,
                       std::span<const double> b, std::span<double> out) {
  for (std::size_t i = 0; i < pos.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < pos.cols(); ++j) s += pos(i, j) * a[j] - neg(i, j) * b[j];
    out[i] += s;
  }
}

}  // namespace

ObserverBounds ObserverBounds::scalar(double d_lo, double d_hi, double th_lo, double th_hi) {
  return {{d_lo}, {d_hi}, {th_lo}, {th_hi}};
}

ObserverModel::ObserverModel(ObserverGains gains, const PlantMatrices& plant, ObserverBounds bounds)
    : gains_(std::move(gains)),
      derived_(derive_observer_matrices(gains_, plant)),
      bounds_(std::move(bounds)),
      mu_pos_(pos_part(derived_.Mu)),
      mu_neg_(neg_part(derived_.Mu)) {
  const std::size_t n = derived_.Mx.rows();
  check_len(bounds_.d_lower.size(), derived_.Mw.cols(), "ObserverBounds d_lower");
  check_len(bounds_.d_upper.size(), derived_.Mw.cols(), "ObserverBounds d_upper");
  check_len(bounds_.theta_lower.size(), plant.V.cols(), "ObserverBounds theta_lower");
  check_len(bounds_.theta_upper.size(), plant.V.cols(), "ObserverBounds theta_upper");
  for (std::size_t k = 0; k < bounds_.d_lower.size(); ++k)
    if (!(bounds_.d_lower[k] <= bounds_.d_upper[k])) throw ConfigError("disturbance bounds are inverted");
  for (std::size_t k = 0; k < bounds_.theta_lower.size(); ++k)
    if (!(bounds_.theta_lower[k] <= bounds_.theta_upper[k])) throw ConfigError("noise bounds are inverted");

  const Matrix mw_pos = pos_part(derived_.Mw), mw_neg = neg_part(derived_.Mw);
  const Matrix mvv = derived_.Mv * plant.V;
  const Matrix mvv_pos = pos_part(mvv), mvv_neg = neg_part(mvv);
  const Matrix nv_pos = pos_part(derived_.NV), nv_neg = neg_part(derived_.NV);
  const auto& b = bounds_;

  // Z rows: + Mw d - Mv V theta; the noise enters with a minus sign.
  lower_offset_.assign(n, 0.0);
  upper_offset_.assign(n, 0.0);
  add_split_product(mw_pos, mw_neg, b.d_lower, b.d_upper, lower_offset_);
  add_split_product(mw_pos, mw_neg, b.d_upper, b.d_lower, upper_offset_);
  add_split_product(mvv_neg, mvv_pos, b.theta_lower, b.theta_upper, lower_offset_);
  add_split_product(mvv_neg, mvv_pos, b.theta_upper, b.theta_lower, upper_offset_);

  // Recovery X = Z + N y - N V theta.
  recover_lower_.assign(n, 0.0);
  recover_upper_.assign(n, 0.0);
  add_split_product(nv_neg, nv_pos, b.theta_lower, b.theta_upper, recover_lower_);
  add_split_product(nv_neg, nv_pos, b.theta_upper, b.theta_lower, recover_upper_);
}

FramerState init_framers(const IntervalVector& x0, std::span<const double> y0, const ObserverModel& model) {
  const std::size_t n = model.state_dim();
  check_len(x0.size(), n, "init_framers interval");
  check_len(y0.size(), model.output_dim(), "init_framers measurement");
  if (!x0.valid()) throw ConfigError("init_framers: initial interval has lower > upper");

  const Vector ny = model.gains().N * y0;
  FramerState fs{Vector(n), Vector(n), Vector(y0.begin(), y0.end())};
  // z0 = X0 - N y0 + N V theta0: the N V theta0 enclosure is the recovery
  // offset with its sign flipped, so the bounds swap roles.
  for (std::size_t i = 0; i < n; ++i) {
    fs.z_lower[i] = x0.lower[i] - ny[i] - model.recover_upper()[i];
    fs.z_upper[i] = x0.upper[i] - ny[i] - model.recover_lower()[i];
  }
  return fs;
}

void framer_derivative_into(std::span<const double> z_lower, std::span<const double> z_upper,
                            std::span<const double> y, std::span<const double> u_lower,
                            std::span<const double> u_upper, const ObserverModel& model,
                            std::span<double> dz_lower, std::span<double> dz_upper) {
  const auto& d = model.derived();
  const std::size_t n = d.Mx.rows();
  for (std::size_t i = 0; i < n; ++i) {
    double lo = model.lower_offset()[i];
    double hi = model.upper_offset()[i];
    for (std::size_t j = 0; j < n; ++j) {
      lo += d.Mx_up(i, j) * z_lower[j] - d.Mx_down(i, j) * z_upper[j];
      hi += d.Mx_up(i, j) * z_upper[j] - d.Mx_down(i, j) * z_lower[j];
    }
    for (std::size_t j = 0; j < d.Mu.cols(); ++j) {
      lo += model.Mu_pos()(i, j) * u_lower[j] - model.Mu_neg()(i, j) * u_upper[j];
      hi += model.Mu_pos()(i, j) * u_upper[j] - model.Mu_neg()(i, j) * u_lower[j];
    }
    double out = 0.0;
    for (std::size_t j = 0; j < d.Mv.cols(); ++j) out += d.Mv(i, j) * y[j];
    dz_lower[i] = lo + out;
    dz_upper[i] = hi + out;
  }
}

FramerDerivative framer_derivative(const FramerState& fs, std::span<const double> y,
                                   const InputInterval& u, const ObserverModel& model) {
  const std::size_t n = model.state_dim();
  check_len(fs.z_lower.size(), n, "framer_derivative z_lower");
  check_len(fs.z_upper.size(), n, "framer_derivative z_upper");
  check_len(y.size(), model.output_dim(), "framer_derivative y");
  check_len(u.lower.size(), model.input_dim(), "framer_derivative u_lower");
  check_len(u.upper.size(), model.input_dim(), "framer_derivative u_upper");
  FramerDerivative out{Vector(n), Vector(n)};
  framer_derivative_into(fs.z_lower, fs.z_upper, y, u.lower, u.upper, model, out.dz_lower, out.dz_upper);
  return out;
}

FramerOutput recover_interval(const FramerState& fs, std::span<const double> y, const ObserverModel& model) {
  const std::size_t n = model.state_dim();
  check_len(y.size(), model.output_dim(), "recover_interval y");
  const Vector ny = model.gains().N * y;
  Vector lo(n), hi(n);
  for (std::size_t i = 0; i < n; ++i) {
    lo[i] = fs.z_lower[i] + ny[i] + model.recover_lower()[i];
    hi[i] = fs.z_upper[i] + ny[i] + model.recover_upper()[i];
    if (lo[i] > hi[i]) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "framer violation on component %zu: lower %.9g > upper %.9g", i, lo[i], hi[i]);
      throw FramerViolation(buf);
    }
  }
  IntervalVector iv(std::move(lo), std::move(hi));
  const double mid = 0.5 * (iv.lower[0] + iv.upper[0]);
  Vector w = width(iv);
  return {std::move(iv), mid, std::move(w)};
}

}  // namespace cacc
