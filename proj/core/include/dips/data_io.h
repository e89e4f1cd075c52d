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
//
// On-disk artifacts consumed and produced by the toolkit.
//
//   Features     <name>.f32 (little-endian float32, row-major) plus a
//                <name>.json sidecar {"n": .., "d": .., "ids": [..]},
//                or a CSV with header "id,f0,...,f{d-1}".
//   Predictions  CSV with header "id,p0,...,p{K-1}".
//   Labels       CSV with header "id,label".
//   Manifest     JSON {class_count, target_feature_path,
//                      reference_feature_path?, checkpoints: [
//                        {iteration, prediction_path, feature_path?}]}.
//
// Samples are always joined across files by id, never by row position.

#ifndef DIPS_DATA_IO_H_
#define DIPS_DATA_IO_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

namespace dips {

// Tolerance on |row sum - 1| accepted by PredictionSet.
inline constexpr double kRowSumTolerance = 1e-6;

// Maps id -> row index; throws DuplicateId on repeats.
std::unordered_map<std::string, std::size_t> index_ids(
    const std::vector<std::string>& ids);

// n x d matrix of finite features with one unique id per row.
//
// Values are held in double precision. The binary format stores float32, so
// a binary round trip is exact only for float-representable values (which is
// everything that was itself loaded from a binary file).
class FeatureMatrix {
 public:
  FeatureMatrix(std::vector<std::string> ids, Eigen::MatrixXd values);

  std::size_t rows() const { return ids_.size(); }
  std::size_t cols() const { return static_cast<std::size_t>(values_.cols()); }
  const std::vector<std::string>& ids() const { return ids_; }
  const Eigen::MatrixXd& values() const { return values_; }

  friend bool operator==(const FeatureMatrix& a, const FeatureMatrix& b);

 private:
  std::vector<std::string> ids_;
  Eigen::MatrixXd values_;
};

// Per-sample class probabilities (n x K, K >= 2).
//
// Rows deviating from 1 by more than kRowSumTolerance are rejected. Rows
// deviating by more than roundoff (1e-12) but within tolerance are divided by
// their sum; smaller deviations are kept as-is so writers and loaders agree
// bit for bit.
class PredictionSet {
 public:
  PredictionSet(std::vector<std::string> ids, Eigen::MatrixXd probs);

  std::size_t rows() const { return ids_.size(); }
  int class_count() const { return static_cast<int>(probs_.cols()); }
  const std::vector<std::string>& ids() const { return ids_; }
  const Eigen::MatrixXd& probs() const { return probs_; }

  // argmax of each row; ties go to the lowest class index.
  std::vector<int> hard_labels() const;

  friend bool operator==(const PredictionSet& a, const PredictionSet& b);

 private:
  std::vector<std::string> ids_;
  Eigen::MatrixXd probs_;
};

struct LabelFile {
  std::vector<std::string> ids;
  std::vector<int> labels;

  friend bool operator==(const LabelFile&, const LabelFile&) = default;
};

struct CheckpointRecord {
  std::int64_t iteration = 0;
  std::filesystem::path prediction_path;
  std::optional<std::filesystem::path> feature_path;

  friend bool operator==(const CheckpointRecord&,
                         const CheckpointRecord&) = default;
};

struct CheckpointManifest {
  int class_count = 2;
  std::filesystem::path target_feature_path;
  // Features of the domain the translations aim at, used as the "real" side
  // of FID/KID/MMD. Falls back to target_feature_path when absent.
  std::optional<std::filesystem::path> reference_feature_path;
  std::vector<CheckpointRecord> checkpoints;

  friend bool operator==(const CheckpointManifest&,
                         const CheckpointManifest&) = default;
};

// Checks class_count >= 2, non-empty checkpoints, strictly increasing
// positive iterations. Does not touch the filesystem.
void validate_manifest(const CheckpointManifest& manifest);

// Loads either format. "x.csv" is read as CSV; "x.f32", "x.json" or a bare
// prefix "x" select the binary pair x.f32 + x.json.
FeatureMatrix load_features(const std::filesystem::path& path);
void save_features_binary(const FeatureMatrix& features,
                          const std::filesystem::path& prefix);
void save_features_csv(const FeatureMatrix& features,
                       const std::filesystem::path& path);

PredictionSet load_predictions(const std::filesystem::path& path);
void save_predictions(const PredictionSet& predictions,
                      const std::filesystem::path& path);

// When class_count is given, labels must lie in [0, class_count).
LabelFile load_labels(const std::filesystem::path& path,
                      std::optional<int> class_count = std::nullopt);
void save_labels(const LabelFile& labels, const std::filesystem::path& path,
                 const std::string& label_column = "label");

// Relative paths are resolved against the manifest's directory and must
// exist.
CheckpointManifest load_manifest(const std::filesystem::path& path);
// Canonical JSON form used by save_manifest. Paths are written as given.
std::string manifest_to_json(const CheckpointManifest& manifest);
void save_manifest(const CheckpointManifest& manifest,
                   const std::filesystem::path& path);

}  // namespace dips

#endif  // DIPS_DATA_IO_H_
