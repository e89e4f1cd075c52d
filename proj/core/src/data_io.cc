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

#include "dips/data_io.h"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string_view>
#include <utility>

#include "dips/error.h"
#include "json.hpp"

namespace dips {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::kIoFailure, "read failed: " + path.string());
  return ss.str();
}

void write_file(const fs::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIoFailure, "write failed: " + path.string());
}

std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

// Splits into non-empty lines, tolerating CRLF and a UTF-8 BOM.
std::vector<std::string_view> split_lines(std::string_view text) {
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) lines.push_back(line);
    start = nl + 1;
  }
  return lines;
}

double parse_double(std::string_view field, const fs::path& path,
                    std::size_t line_no) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = field.data() + field.size();
  while (begin < end && *begin == ' ') ++begin;
  while (end > begin && *(end - 1) == ' ') --end;
  if (begin < end && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::kMalformedHeader,
                path.string() + ":" + std::to_string(line_no) +
                    ": cannot parse number '" + std::string(field) + "'");
  }
  return value;
}

long long parse_integer(std::string_view field, const fs::path& path,
                        std::size_t line_no) {
  long long value = 0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw Error(ErrorCode::kMalformedHeader,
                path.string() + ":" + std::to_string(line_no) +
                    ": cannot parse integer '" + std::string(field) + "'");
  }
  return value;
}

void append_double(std::string& out, double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  (void)ec;
  out.append(buf.data(), ptr);
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::string> ids;
  std::vector<std::vector<std::string_view>> fields;  // excluding the id
  std::vector<std::size_t> line_numbers;
};

// Parses a CSV whose first column is "id". Field views point into `text`.
CsvTable parse_id_csv(std::string_view text, const fs::path& path) {
  const auto lines = split_lines(text);
  if (lines.empty()) {
    throw Error(ErrorCode::kMalformedHeader, path.string() + ": missing header row");
  }
  CsvTable table;
  for (auto h : split_csv_line(lines[0])) table.header.emplace_back(h);
  if (table.header.size() < 2 || table.header[0] != "id") {
    throw Error(ErrorCode::kMalformedHeader,
                path.string() + ": header must start with 'id' and name at least one column");
  }
  const std::size_t width = table.header.size();
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto fields = split_csv_line(lines[i]);
    if (fields.size() != width) {
      throw Error(ErrorCode::kMalformedHeader,
                  path.string() + ":" + std::to_string(i + 1) + ": expected " +
                      std::to_string(width) + " fields, found " +
                      std::to_string(fields.size()));
    }
    table.ids.emplace_back(fields[0]);
    fields.erase(fields.begin());
    table.fields.push_back(std::move(fields));
    table.line_numbers.push_back(i + 1);
  }
  return table;
}

fs::path sibling_with_extension(fs::path path, const char* ext) {
  return path.replace_extension(ext);
}

FeatureMatrix load_features_csv(const fs::path& path) {
  const std::string text = read_file(path);
  const CsvTable table = parse_id_csv(text, path);
  const std::size_t n = table.ids.size();
  const std::size_t d = table.header.size() - 1;
  Eigen::MatrixXd values(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          parse_double(table.fields[i][j], path, table.line_numbers[i]);
    }
  }
  return FeatureMatrix(table.ids, std::move(values));
}

FeatureMatrix load_features_binary(const fs::path& prefix) {
  const fs::path payload_path = sibling_with_extension(prefix, ".f32");
  const fs::path header_path = sibling_with_extension(prefix, ".json");

  json header;
  try {
    header = json::parse(read_file(header_path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kMalformedHeader, header_path.string() + ": " + e.what());
  }
  if (!header.is_object() || !header.contains("n") || !header.contains("d") ||
      !header.contains("ids") || !header["n"].is_number_unsigned() ||
      !header["d"].is_number_unsigned() || !header["ids"].is_array()) {
    throw Error(ErrorCode::kMalformedHeader,
                header_path.string() + ": sidecar must hold unsigned n, d and an ids array");
  }
  const auto n = header["n"].get<std::size_t>();
  const auto d = header["d"].get<std::size_t>();
  std::vector<std::string> ids;
  ids.reserve(header["ids"].size());
  for (const auto& id : header["ids"]) {
    if (!id.is_string()) {
      throw Error(ErrorCode::kMalformedHeader, header_path.string() + ": ids must be strings");
    }
    ids.push_back(id.get<std::string>());
  }
  if (ids.size() != n) {
    throw Error(ErrorCode::kMalformedHeader,
                header_path.string() + ": n=" + std::to_string(n) + " but " +
                    std::to_string(ids.size()) + " ids");
  }

  const std::string bytes = read_file(payload_path);
  if (bytes.size() != n * d * sizeof(float)) {
    throw Error(ErrorCode::kMalformedHeader,
                payload_path.string() + ": header claims " + std::to_string(n) + "x" +
                    std::to_string(d) + " floats, payload holds " +
                    std::to_string(bytes.size()) + " bytes");
  }
  Eigen::MatrixXd values(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  const auto* raw = reinterpret_cast<const unsigned char*>(bytes.data());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const unsigned char* p = raw + 4 * (i * d + j);
      const std::uint32_t word = static_cast<std::uint32_t>(p[0]) |
                                 (static_cast<std::uint32_t>(p[1]) << 8) |
                                 (static_cast<std::uint32_t>(p[2]) << 16) |
                                 (static_cast<std::uint32_t>(p[3]) << 24);
      values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          static_cast<double>(std::bit_cast<float>(word));
    }
  }
  return FeatureMatrix(std::move(ids), std::move(values));
}

}  // namespace

std::unordered_map<std::string, std::size_t> index_ids(
    const std::vector<std::string>& ids) {
  std::unordered_map<std::string, std::size_t> index;
  index.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!index.emplace(ids[i], i).second) {
      throw Error(ErrorCode::kDuplicateId, "duplicate id '" + ids[i] + "'");
    }
  }
  return index;
}

FeatureMatrix::FeatureMatrix(std::vector<std::string> ids, Eigen::MatrixXd values)
    : ids_(std::move(ids)), values_(std::move(values)) {
  if (static_cast<Eigen::Index>(ids_.size()) != values_.rows()) {
    throw Error(ErrorCode::kMalformedHeader,
                std::to_string(ids_.size()) + " ids for " +
                    std::to_string(values_.rows()) + " rows");
  }
  if (ids_.size() < 2 || values_.cols() < 1) {
    throw Error(ErrorCode::kMalformedHeader,
                "feature matrix needs n >= 2 and d >= 1, got " +
                    std::to_string(ids_.size()) + "x" + std::to_string(values_.cols()));
  }
  index_ids(ids_);
  for (Eigen::Index i = 0; i < values_.rows(); ++i) {
    for (Eigen::Index j = 0; j < values_.cols(); ++j) {
      if (!std::isfinite(values_(i, j))) {
        throw Error(ErrorCode::kNonFiniteValue,
                    "row " + std::to_string(i) + " (id '" + ids_[i] + "'), column " +
                        std::to_string(j));
      }
    }
  }
}

bool operator==(const FeatureMatrix& a, const FeatureMatrix& b) {
  return a.ids_ == b.ids_ && a.values_.rows() == b.values_.rows() &&
         a.values_.cols() == b.values_.cols() &&
         (a.values_.array() == b.values_.array()).all();
}

PredictionSet::PredictionSet(std::vector<std::string> ids, Eigen::MatrixXd probs)
    : ids_(std::move(ids)), probs_(std::move(probs)) {
  if (static_cast<Eigen::Index>(ids_.size()) != probs_.rows()) {
    throw Error(ErrorCode::kMalformedHeader,
                std::to_string(ids_.size()) + " ids for " +
                    std::to_string(probs_.rows()) + " rows");
  }
  if (probs_.cols() < 2) {
    throw Error(ErrorCode::kMalformedHeader, "prediction sets need at least 2 classes");
  }
  index_ids(ids_);
  for (Eigen::Index i = 0; i < probs_.rows(); ++i) {
    double sum = 0.0;
    for (Eigen::Index k = 0; k < probs_.cols(); ++k) {
      const double p = probs_(i, k);
      if (!std::isfinite(p)) {
        throw Error(ErrorCode::kNonFiniteValue,
                    "row " + std::to_string(i) + " (id '" + ids_[i] + "'), column " +
                        std::to_string(k));
      }
      if (p < 0.0) {
        throw Error(ErrorCode::kNegativeProbability,
                    "row " + std::to_string(i) + " (id '" + ids_[i] + "'), column " +
                        std::to_string(k));
      }
      sum += p;
    }
    const double deviation = std::abs(sum - 1.0);
    if (deviation > kRowSumTolerance) {
      throw Error(ErrorCode::kRowSumViolation,
                  "row " + std::to_string(i) + " (id '" + ids_[i] + "') sums to " +
                      std::to_string(sum));
    }
    if (deviation > 1e-12) probs_.row(i) /= sum;
  }
}

std::vector<int> PredictionSet::hard_labels() const {
  std::vector<int> labels(rows());
  for (Eigen::Index i = 0; i < probs_.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < probs_.cols(); ++k) {
      if (probs_(i, k) > probs_(i, best)) best = k;
    }
    labels[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return labels;
}

bool operator==(const PredictionSet& a, const PredictionSet& b) {
  return a.ids_ == b.ids_ && a.probs_.rows() == b.probs_.rows() &&
         a.probs_.cols() == b.probs_.cols() &&
         (a.probs_.array() == b.probs_.array()).all();
}

void validate_manifest(const CheckpointManifest& manifest) {
  if (manifest.class_count < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "class_count must be >= 2, got " + std::to_string(manifest.class_count));
  }
  if (manifest.checkpoints.empty()) {
    throw Error(ErrorCode::kEmptyInput, "manifest lists no checkpoints");
  }
  std::int64_t previous = 0;
  for (const auto& record : manifest.checkpoints) {
    if (record.iteration <= 0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "iteration must be positive, got " + std::to_string(record.iteration));
    }
    if (record.iteration <= previous) {
      throw Error(ErrorCode::kUnsortedIterations,
                  "iteration " + std::to_string(record.iteration) + " follows " +
                      std::to_string(previous));
    }
    previous = record.iteration;
  }
}

FeatureMatrix load_features(const fs::path& path) {
  if (path.extension() == ".csv") return load_features_csv(path);
  return load_features_binary(path);
}

void save_features_binary(const FeatureMatrix& features, const fs::path& prefix) {
  const std::size_t n = features.rows();
  const std::size_t d = features.cols();
  std::string bytes(n * d * sizeof(float), '\0');
  auto* raw = reinterpret_cast<unsigned char*>(bytes.data());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const auto word = std::bit_cast<std::uint32_t>(static_cast<float>(
          features.values()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))));
      unsigned char* p = raw + 4 * (i * d + j);
      p[0] = static_cast<unsigned char>(word & 0xFFu);
      p[1] = static_cast<unsigned char>((word >> 8) & 0xFFu);
      p[2] = static_cast<unsigned char>((word >> 16) & 0xFFu);
      p[3] = static_cast<unsigned char>((word >> 24) & 0xFFu);
    }
  }
  json header = {{"n", n}, {"d", d}, {"ids", features.ids()}};
  write_file(sibling_with_extension(prefix, ".f32"), bytes);
  write_file(sibling_with_extension(prefix, ".json"), header.dump() + "\n");
}

void save_features_csv(const FeatureMatrix& features, const fs::path& path) {
  std::string out = "id";
  for (std::size_t j = 0; j < features.cols(); ++j) out += ",f" + std::to_string(j);
  out += '\n';
  for (std::size_t i = 0; i < features.rows(); ++i) {
    out += features.ids()[i];
    for (std::size_t j = 0; j < features.cols(); ++j) {
      out += ',';
      append_double(out, features.values()(static_cast<Eigen::Index>(i),
                                           static_cast<Eigen::Index>(j)));
    }
    out += '\n';
  }
  write_file(path, out);
}

PredictionSet load_predictions(const fs::path& path) {
  const std::string text = read_file(path);
  const CsvTable table = parse_id_csv(text, path);
  const std::size_t k = table.header.size() - 1;
  for (std::size_t c = 0; c < k; ++c) {
    if (table.header[c + 1] != "p" + std::to_string(c)) {
      throw Error(ErrorCode::kMalformedHeader,
                  path.string() + ": expected column 'p" + std::to_string(c) +
                      "', found '" + table.header[c + 1] + "'");
    }
  }
  Eigen::MatrixXd probs(static_cast<Eigen::Index>(table.ids.size()),
                        static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < table.ids.size(); ++i) {
    for (std::size_t c = 0; c < k; ++c) {
      probs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
          parse_double(table.fields[i][c], path, table.line_numbers[i]);
    }
  }
  try {
    return PredictionSet(table.ids, std::move(probs));
  } catch (const Error& e) {
    rethrow_with_context(e, path.string());
  }
}

void save_predictions(const PredictionSet& predictions, const fs::path& path) {
  std::string out = "id";
  for (int c = 0; c < predictions.class_count(); ++c) out += ",p" + std::to_string(c);
  out += '\n';
  for (std::size_t i = 0; i < predictions.rows(); ++i) {
    out += predictions.ids()[i];
    for (int c = 0; c < predictions.class_count(); ++c) {
      out += ',';
      append_double(out, predictions.probs()(static_cast<Eigen::Index>(i), c));
    }
    out += '\n';
  }
  write_file(path, out);
}

LabelFile load_labels(const fs::path& path, std::optional<int> class_count) {
  const std::string text = read_file(path);
  const CsvTable table = parse_id_csv(text, path);
  if (table.header.size() != 2) {
    throw Error(ErrorCode::kMalformedHeader,
                path.string() + ": label files have exactly two columns");
  }
  LabelFile labels;
  labels.ids = table.ids;
  index_ids(labels.ids);
  labels.labels.reserve(table.ids.size());
  for (std::size_t i = 0; i < table.ids.size(); ++i) {
    const long long value = parse_integer(table.fields[i][0], path, table.line_numbers[i]);
    if (value < 0 || (class_count && value >= *class_count)) {
      throw Error(ErrorCode::kLabelOutOfRange,
                  path.string() + ":" + std::to_string(table.line_numbers[i]) +
                      ": label " + std::to_string(value));
    }
    labels.labels.push_back(static_cast<int>(value));
  }
  return labels;
}

void save_labels(const LabelFile& labels, const fs::path& path,
                 const std::string& label_column) {
  if (labels.ids.size() != labels.labels.size()) {
    throw Error(ErrorCode::kLengthMismatch, "ids and labels differ in length");
  }
  std::string out = "id," + label_column + "\n";
  for (std::size_t i = 0; i < labels.ids.size(); ++i) {
    out += labels.ids[i] + "," + std::to_string(labels.labels[i]) + "\n";
  }
  write_file(path, out);
}

CheckpointManifest load_manifest(const fs::path& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kMalformedHeader, path.string() + ": " + e.what());
  }
  const fs::path base = path.parent_path();
  auto resolve = [&](const json& value, const char* what) {
    if (!value.is_string()) {
      throw Error(ErrorCode::kMalformedHeader,
                  path.string() + ": " + what + " must be a string");
    }
    fs::path p = value.get<std::string>();
    if (p.is_relative()) p = base / p;
    return p;
  };
  auto require_exists = [&](const fs::path& p, bool features) {
    const bool ok = features && p.extension() != ".csv"
                        ? fs::exists(sibling_with_extension(p, ".f32")) &&
                              fs::exists(sibling_with_extension(p, ".json"))
                        : fs::exists(p);
    if (!ok) {
      throw Error(ErrorCode::kIoFailure,
                  path.string() + ": referenced file not found: " + p.string());
    }
  };

  CheckpointManifest manifest;
  try {
    if (!doc.is_object()) throw Error(ErrorCode::kMalformedHeader, "manifest must be an object");
    if (!doc.contains("class_count") || !doc["class_count"].is_number_integer()) {
      throw Error(ErrorCode::kMalformedHeader, "class_count must be an integer");
    }
    manifest.class_count = doc["class_count"].get<int>();
    if (!doc.contains("target_feature_path")) {
      throw Error(ErrorCode::kMalformedHeader, "target_feature_path is required");
    }
    manifest.target_feature_path = resolve(doc["target_feature_path"], "target_feature_path");
    require_exists(manifest.target_feature_path, true);
    if (doc.contains("reference_feature_path") && !doc["reference_feature_path"].is_null()) {
      manifest.reference_feature_path =
          resolve(doc["reference_feature_path"], "reference_feature_path");
      require_exists(*manifest.reference_feature_path, true);
    }
    if (!doc.contains("checkpoints") || !doc["checkpoints"].is_array()) {
      throw Error(ErrorCode::kMalformedHeader, "checkpoints must be an array");
    }
    for (const auto& entry : doc["checkpoints"]) {
      if (!entry.is_object() || !entry.contains("iteration") ||
          !entry["iteration"].is_number_integer() || !entry.contains("prediction_path")) {
        throw Error(ErrorCode::kMalformedHeader,
                    "each checkpoint needs an integer iteration and a prediction_path");
      }
      CheckpointRecord record;
      record.iteration = entry["iteration"].get<std::int64_t>();
      record.prediction_path = resolve(entry["prediction_path"], "prediction_path");
      require_exists(record.prediction_path, false);
      if (entry.contains("feature_path") && !entry["feature_path"].is_null()) {
        record.feature_path = resolve(entry["feature_path"], "feature_path");
        require_exists(*record.feature_path, true);
      }
      manifest.checkpoints.push_back(std::move(record));
    }
    validate_manifest(manifest);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kIoFailure) throw;
    rethrow_with_context(e, path.string());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedHeader, path.string() + ": " + e.what());
  }
  return manifest;
}

std::string manifest_to_json(const CheckpointManifest& manifest) {
  validate_manifest(manifest);
  json doc;
  doc["class_count"] = manifest.class_count;
  doc["target_feature_path"] = manifest.target_feature_path.string();
  if (manifest.reference_feature_path) {
    doc["reference_feature_path"] = manifest.reference_feature_path->string();
  }
  doc["checkpoints"] = json::array();
  for (const auto& record : manifest.checkpoints) {
    json entry = {{"iteration", record.iteration},
                  {"prediction_path", record.prediction_path.string()}};
    if (record.feature_path) entry["feature_path"] = record.feature_path->string();
    doc["checkpoints"].push_back(std::move(entry));
  }
  return doc.dump(2) + "\n";
}

void save_manifest(const CheckpointManifest& manifest, const fs::path& path) {
  write_file(path, manifest_to_json(manifest));
}

}  // namespace dips
