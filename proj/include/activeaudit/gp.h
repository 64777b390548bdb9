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

#ifndef ACTIVEAUDIT_GP_H_
#define ACTIVEAUDIT_GP_H_

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace activeaudit {

enum class KernelKind { kRbf, kMatern52 };

struct KernelParams {
  KernelKind kind = KernelKind::kMatern52;
  double lengthscale = 1.0;
  double signal_variance = 1.0;  // sigma_f^2
};

// k(a, b); symmetric in its arguments bit for bit.
double kernel_value(const KernelParams& params, std::span<const double> a, std::span<const double> b);

// Median pairwise Euclidean distance (1.0 when undefined or zero).
double median_heuristic(const std::vector<std::vector<double>>& x);

struct GpPrediction {
  std::vector<double> mean;
  std::vector<double> variance;
};

// Zero-mean exact GP. Immutable once fitted.
class GpModel {
 public:
  const std::vector<std::vector<double>>& train_inputs() const { return x_; }
  const std::vector<double>& train_targets() const { return y_; }
  const KernelParams& kernel() const { return kernel_; }
  double noise() const { return noise_; }
  double jitter() const { return jitter_; }
  std::size_t dimension() const { return x_.empty() ? 0 : x_[0].size(); }
  std::size_t size() const { return x_.size(); }

 private:
  friend GpModel fit_gp(std::vector<std::vector<double>>, std::vector<double>, const KernelParams&, double);
  friend GpPrediction gp_predict(const GpModel&, const std::vector<std::vector<double>>&);

  std::vector<std::vector<double>> x_;
  std::vector<double> y_;
  KernelParams kernel_;
  double noise_ = 0.0;
  double jitter_ = 0.0;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::VectorXd alpha_;
};

// Factorises K + (noise + jitter) I with jitter escalating x10 from 1e-8
// until the Cholesky succeeds; kSingularKernel past 1e-2.
GpModel fit_gp(std::vector<std::vector<double>> x, std::vector<double> y, const KernelParams& kernel, double noise);

// Posterior mean and variance (clamped at 0).
GpPrediction gp_predict(const GpModel& model, const std::vector<std::vector<double>>& x);

}  // namespace activeaudit

#endif  // ACTIVEAUDIT_GP_H_
