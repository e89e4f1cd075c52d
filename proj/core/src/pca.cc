// Copyright 2026 The DIPS Eval Authors
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

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/SVD>

#include "dips/error.h"
#include "dips/pseudo.h"

namespace dips {

PcaModel fit_pca(const Eigen::MatrixXd& x, const PcaConfig& cfg) {
  if (x.rows() < 2) throw Error(ErrorCode::kTooFewSamples, "PCA needs n >= 2");
  if (cfg.max_components < 1) {
    throw Error(ErrorCode::kInvalidArgument, "max_components must be positive");
  }
  const Eigen::Index keep = std::min<Eigen::Index>(
      {x.cols(), x.rows() - 1, static_cast<Eigen::Index>(cfg.max_components)});

  PcaModel model;
  model.mean = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - model.mean;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) {
    throw Error(ErrorCode::kEigenFailure, "SVD failed during PCA");
  }
  model.components = svd.matrixV().leftCols(keep);
  for (Eigen::Index c = 0; c < keep; ++c) {
    Eigen::Index arg = 0;
    model.components.col(c).cwiseAbs().maxCoeff(&arg);
    if (model.components(arg, c) < 0.0) model.components.col(c) *= -1.0;
  }
  model.scale = Eigen::VectorXd::Ones(keep);
  if (cfg.whiten) {
    const double dof = static_cast<double>(x.rows() - 1);
    for (Eigen::Index c = 0; c < keep; ++c) {
      const double sd = svd.singularValues()(c) / std::sqrt(dof);
      // Zero-variance directions stay unscaled.
      if (sd > 0.0) model.scale(c) = sd;
    }
  }
  return model;
}

Eigen::MatrixXd PcaModel::transform(const Eigen::MatrixXd& x) const {
  if (x.cols() != mean.size()) {
    throw Error(ErrorCode::kDimMismatch,
                "PCA fitted on d=" + std::to_string(mean.size()) + ", input has d=" +
                    std::to_string(x.cols()));
  }
  Eigen::MatrixXd projected = (x.rowwise() - mean) * components;
  return projected.array().rowwise() / scale.transpose().array();
}

}  // namespace dips
