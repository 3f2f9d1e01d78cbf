#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bddlearn::data {

/// A CSV table as read from disk, before binarization.
struct RawTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::string label_column;

  [[nodiscard]] std::size_t column_index(std::string_view name) const;
  [[nodiscard]] std::size_t label_index() const {
    return column_index(label_column);
  }
};

/// Binary feature matrix with binary labels.
///
/// Example q has feature bits `row(q)` and label `label(q)`. Rows are stored
/// contiguously so a row can be handed out as a span.
class Dataset {
public:
  Dataset() = default;
  Dataset(std::size_t num_features, std::vector<std::string> feature_names);

  /// Build from explicit rows; every row must have the same width.
  static Dataset from_rows(const std::vector<std::vector<std::uint8_t>> &rows,
                           const std::vector<std::uint8_t> &labels,
                           std::vector<std::string> feature_names = {});

  void add_example(std::span<const std::uint8_t> bits, std::uint8_t label);

  [[nodiscard]] std::size_t size() const noexcept { return labels_.size(); }
  [[nodiscard]] bool empty() const noexcept { return labels_.empty(); }
  [[nodiscard]] std::size_t num_features() const noexcept { return width_; }

  [[nodiscard]] std::uint8_t feature(std::size_t example,
                                     std::size_t feature) const {
    return bits_[example * width_ + feature];
  }
  [[nodiscard]] std::span<const std::uint8_t> row(std::size_t example) const {
    return {bits_.data() + example * width_, width_};
  }
  [[nodiscard]] std::uint8_t label(std::size_t example) const {
    return labels_[example];
  }
  [[nodiscard]] const std::vector<std::uint8_t> &labels() const noexcept {
    return labels_;
  }
  [[nodiscard]] const std::vector<std::string> &feature_names() const noexcept {
    return names_;
  }

  /// Raw label strings mapped to 0 and 1 (empty when built from bits).
  [[nodiscard]] const std::vector<std::string> &label_values() const noexcept {
    return label_values_;
  }
  void set_label_values(std::vector<std::string> values) {
    label_values_ = std::move(values);
  }

  [[nodiscard]] std::size_t count_positive() const;

  /// Examples at the given indices, in that order.
  [[nodiscard]] Dataset subset(std::span<const std::size_t> examples) const;
  /// Keep only the listed feature columns, in that order.
  [[nodiscard]] Dataset
  select_features(std::span<const std::size_t> features) const;

  friend bool operator==(const Dataset &, const Dataset &) = default;

private:
  std::size_t width_ = 0;
  std::vector<std::uint8_t> bits_;
  std::vector<std::uint8_t> labels_;
  std::vector<std::string> names_;
  std::vector<std::string> label_values_;
};

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  std::uint64_t seed = 0;

  friend bool operator==(const Split &, const Split &) = default;
};

RawTable parse_csv(std::istream &in, std::string_view label_column);
RawTable load_csv(const std::filesystem::path &path,
                  std::string_view label_column);

/// One-hot binarization. Columns whose values are all in {0,1} pass through
/// under their own name; other two-valued (or constant) columns become one
/// feature "col=<larger value>"; columns with v > 2 values become v
/// indicators "col=value" in lexicographic value order.
Dataset one_hot_binarize(const RawTable &raw);

/// Re-binarize a table against a known feature schema (used to evaluate a
/// trained model on fresh data whose value sets may differ from training).
Dataset binarize_with_schema(const RawTable &raw,
                             const std::vector<std::string> &feature_names,
                             const std::vector<std::string> &label_values);

/// Write a Dataset as a 0/1 CSV with the feature names as header.
void write_csv(std::ostream &out, const Dataset &d,
               std::string_view label_column);

Split split_holdout(const Dataset &d, double ratio, std::uint64_t seed);
std::vector<Split> kfold(const Dataset &d, std::size_t k, std::uint64_t seed);

/// Groups of examples sharing a feature vector but carrying both labels.
/// Indices are 0-based and sorted; groups are ordered by first member.
std::vector<std::vector<std::size_t>> check_consistency(const Dataset &d);

} // namespace bddlearn::data
