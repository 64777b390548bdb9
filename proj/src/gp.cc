// Copyright 2026 The ActiveAudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "activeaudit/gp.h"

#include <algorithm>
#include <cmath>

#include "activeaudit/errors.h"

namespace activeaudit {

double kernel_value(const KernelParams& params, std::span<const double> a, std::span<const double> b) {
  // Sum in index order so swapping arguments cannot change rounding.
  double sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sq += d * d;
  }
  const double l = params.lengthscale;
  if (params.kind == KernelKind::kRbf) return params.signal_variance * std::exp(-0.5 * sq / (l * l));
  const double r = std::sqrt(5.0 * sq) / l;
  return params.signal_variance * (1.0 + r + r * r / 3.0) * std::exp(-r);
}

double median_heuristic(const std::vector<std::vector<double>>& x) {
  std::vector<double> d;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      double sq = 0.0;
      for (std::size_t c = 0; c < x[i].size(); ++c) sq += (x[i][c] - x[j][c]) * (x[i][c] - x[j][c]);
      d.push_back(std::sqrt(sq));
    }
  }
  if (d.empty()) return 1.0;
  const auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
  std::nth_element(d.begin(), mid, d.end());
  double m = *mid;
  if (d.size() % 2 == 0) m = 0.5 * (m + *std::max_element(d.begin(), mid));
  return m > 0.0 && std::isfinite(m) ? m : 1.0;
}

GpModel fit_gp(std::vector<std::vector<double>> x, std::vector<double> y, const KernelParams& kernel, double noise) {
  if (x.empty()) fail(ErrorCode::kPrecondition, "GP needs at least one training point");
  if (x.size() != y.size()) fail(ErrorCode::kDimensionMismatch, "inputs vs targets");
  if (!(kernel.lengthscale > 0.0) || !(kernel.signal_variance > 0.0) || noise < 0.0) {
    fail(ErrorCode::kInvalidRange, "kernel parameters");
  }
  const std::size_t n = x.size();
  const std::size_t d = x[0].size();
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i].size() != d) fail(ErrorCode::kDimensionMismatch, "training input " + std::to_string(i));
    for (double v : x[i]) {
      if (!std::isfinite(v)) fail(ErrorCode::kPrecondition, "non-finite training input");
    }
    if (!std::isfinite(y[i])) fail(ErrorCode::kPrecondition, "non-finite training target");
  }
  Eigen::MatrixXd k(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      k(i, j) = k(j, i) = kernel_value(kernel, x[i], x[j]);
    }
  }
  GpModel model;
  for (double jitter = 1e-8; jitter <= 1e-2 * (1 + 1e-9); jitter *= 10.0) {
    Eigen::MatrixXd a = k;
    a.diagonal().array() += noise + jitter;
    model.llt_.compute(a);
    if (model.llt_.info() == Eigen::Success) {
      model.jitter_ = jitter;
      model.x_ = std::move(x);
      model.y_ = std::move(y);
      model.kernel_ = kernel;
      model.noise_ = noise;
      model.alpha_ = model.llt_.solve(Eigen::Map<const Eigen::VectorXd>(model.y_.data(), static_cast<Eigen::Index>(n)));
      return model;
    }
  }
  fail(ErrorCode::kSingularKernel, "Cholesky failed with jitter 1e-2");
}

GpPrediction gp_predict(const GpModel& model, const std::vector<std::vector<double>>& x) {
  if (model.x_.empty()) fail(ErrorCode::kUnfittedGp, "model has no training data");
  const std::size_t n = model.x_.size();
  GpPrediction out;
  out.mean.resize(x.size());
  out.variance.resize(x.size());
  Eigen::VectorXd ks(static_cast<Eigen::Index>(n));
  for (std::size_t q = 0; q < x.size(); ++q) {
    if (x[q].size() != model.dimension()) fail(ErrorCode::kDimensionMismatch, "query point " + std::to_string(q));
    for (std::size_t i = 0; i < n; ++i) ks(static_cast<Eigen::Index>(i)) = kernel_value(model.kernel_, model.x_[i], x[q]);
    out.mean[q] = ks.dot(model.alpha_);
    const Eigen::VectorXd v = model.llt_.matrixL().solve(ks);
    out.variance[q] = std::max(0.0, kernel_value(model.kernel_, x[q], x[q]) - v.squaredNorm());
  }
  return out;
}

}  // namespace activeaudit
