#include "bddlearn/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

#include "bddlearn/errors.hpp"

namespace bddlearn::data {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos)
    return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

// Splits one CSV record. Double-quoted fields may contain commas; "" inside a
// quoted field is a literal quote.
std::vector<std::string> split_record(std::string_view line) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      cells.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  cells.push_back(trim(cur));
  return cells;
}

bool is_blank(std::string_view line) {
  return line.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

std::vector<std::string> distinct_sorted(const RawTable &raw, std::size_t col) {
  std::set<std::string> values;
  for (const auto &row : raw.rows)
    values.insert(row[col]);
  return {values.begin(), values.end()};
}

bool all_binary_digits(const std::vector<std::string> &values) {
  return std::all_of(values.begin(), values.end(),
                     [](const std::string &v) { return v == "0" || v == "1"; });
}

std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  return idx;
}

} // namespace

std::size_t RawTable::column_index(std::string_view name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end())
    throw DataError("missing column '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

Dataset::Dataset(std::size_t num_features, std::vector<std::string> feature_names)
    : width_(num_features), names_(std::move(feature_names)) {
  if (names_.empty()) {
    for (std::size_t r = 0; r < width_; ++r)
      names_.push_back("f" + std::to_string(r + 1));
  }
  if (names_.size() != width_)
    throw std::invalid_argument("feature name count does not match width");
}

Dataset Dataset::from_rows(const std::vector<std::vector<std::uint8_t>> &rows,
                           const std::vector<std::uint8_t> &labels,
                           std::vector<std::string> feature_names) {
  if (rows.size() != labels.size())
    throw std::invalid_argument("row count does not match label count");
  std::size_t width = rows.empty() ? feature_names.size() : rows.front().size();
  Dataset d(width, std::move(feature_names));
  for (std::size_t q = 0; q < rows.size(); ++q)
    d.add_example(rows[q], labels[q]);
  return d;
}

void Dataset::add_example(std::span<const std::uint8_t> bits,
                          std::uint8_t label) {
  if (bits.size() != width_)
    throw std::invalid_argument("example width does not match dataset");
  for (auto b : bits)
    if (b > 1)
      throw std::invalid_argument("feature value must be 0 or 1");
  if (label > 1)
    throw std::invalid_argument("label must be 0 or 1");
  bits_.insert(bits_.end(), bits.begin(), bits.end());
  labels_.push_back(label);
}

std::size_t Dataset::count_positive() const {
  return static_cast<std::size_t>(
      std::count(labels_.begin(), labels_.end(), std::uint8_t{1}));
}

Dataset Dataset::subset(std::span<const std::size_t> examples) const {
  Dataset out(width_, names_);
  out.label_values_ = label_values_;
  out.bits_.reserve(examples.size() * width_);
  for (auto q : examples) {
    if (q >= size())
      throw std::out_of_range("example index out of range");
    const auto r = row(q);
    out.bits_.insert(out.bits_.end(), r.begin(), r.end());
    out.labels_.push_back(labels_[q]);
  }
  return out;
}

Dataset Dataset::select_features(std::span<const std::size_t> features) const {
  std::vector<std::string> names;
  for (auto r : features) {
    if (r >= width_)
      throw std::out_of_range("feature index out of range");
    names.push_back(names_[r]);
  }
  Dataset out(features.size(), std::move(names));
  out.label_values_ = label_values_;
  out.labels_ = labels_;
  out.bits_.reserve(size() * features.size());
  for (std::size_t q = 0; q < size(); ++q)
    for (auto r : features)
      out.bits_.push_back(feature(q, r));
  return out;
}

RawTable parse_csv(std::istream &in, std::string_view label_column) {
  RawTable raw;
  raw.label_column = std::string(label_column);
  std::string line;
  bool have_header = false;
  std::size_t row_number = 0;
  while (std::getline(in, line)) {
    if (is_blank(line))
      continue;
    auto cells = split_record(line);
    if (!have_header) {
      raw.columns = std::move(cells);
      have_header = true;
      continue;
    }
    ++row_number;
    if (cells.size() != raw.columns.size())
      throw DataError("ragged row " + std::to_string(row_number));
    raw.rows.push_back(std::move(cells));
  }
  if (!have_header)
    throw DataError("empty dataset");
  if (std::find(raw.columns.begin(), raw.columns.end(), label_column) ==
      raw.columns.end())
    throw DataError("missing label column '" + std::string(label_column) + "'");
  if (raw.rows.empty())
    throw DataError("empty dataset");
  return raw;
}

RawTable load_csv(const std::filesystem::path &path,
                  std::string_view label_column) {
  std::ifstream in(path);
  if (!in)
    throw DataError("cannot open " + path.string());
  return parse_csv(in, label_column);
}

Dataset one_hot_binarize(const RawTable &raw) {
  const std::size_t label_col = raw.label_index();
  const auto label_values = distinct_sorted(raw, label_col);
  if (label_values.size() != 2)
    throw DataError("label column '" + raw.label_column +
                    "' is not binary (" + std::to_string(label_values.size()) +
                    " distinct values)");

  // (column, value that maps to 1)
  std::vector<std::pair<std::size_t, std::string>> indicators;
  std::vector<std::string> names;
  for (std::size_t col = 0; col < raw.columns.size(); ++col) {
    if (col == label_col)
      continue;
    const auto values = distinct_sorted(raw, col);
    if (all_binary_digits(values)) {
      indicators.emplace_back(col, "1");
      names.push_back(raw.columns[col]);
    } else if (values.size() <= 2) {
      indicators.emplace_back(col, values.back());
      names.push_back(raw.columns[col] + "=" + values.back());
    } else {
      for (const auto &v : values) {
        indicators.emplace_back(col, v);
        names.push_back(raw.columns[col] + "=" + v);
      }
    }
  }

  Dataset d(indicators.size(), std::move(names));
  d.set_label_values(label_values);
  std::vector<std::uint8_t> bits(indicators.size());
  for (const auto &row : raw.rows) {
    for (std::size_t r = 0; r < indicators.size(); ++r)
      bits[r] = row[indicators[r].first] == indicators[r].second ? 1 : 0;
    d.add_example(bits, row[label_col] == label_values[1] ? 1 : 0);
  }
  return d;
}

Dataset binarize_with_schema(const RawTable &raw,
                             const std::vector<std::string> &feature_names,
                             const std::vector<std::string> &label_values) {
  if (label_values.size() != 2)
    throw DataError("schema needs exactly two label values");
  const std::size_t label_col = raw.label_index();

  std::vector<std::pair<std::size_t, std::string>> indicators;
  for (const auto &name : feature_names) {
    const auto it = std::find(raw.columns.begin(), raw.columns.end(), name);
    if (it != raw.columns.end()) {
      indicators.emplace_back(static_cast<std::size_t>(it - raw.columns.begin()),
                              "1");
      continue;
    }
    const auto eq = name.find('=');
    if (eq == std::string::npos)
      throw DataError("feature '" + name + "' not found in data");
    indicators.emplace_back(raw.column_index(name.substr(0, eq)),
                            name.substr(eq + 1));
  }

  Dataset d(feature_names.size(), feature_names);
  d.set_label_values(label_values);
  std::vector<std::uint8_t> bits(indicators.size());
  for (const auto &row : raw.rows) {
    for (std::size_t r = 0; r < indicators.size(); ++r)
      bits[r] = row[indicators[r].first] == indicators[r].second ? 1 : 0;
    const auto &lv = row[label_col];
    if (lv != label_values[0] && lv != label_values[1])
      throw DataError("unknown label value '" + lv + "'");
    d.add_example(bits, lv == label_values[1] ? 1 : 0);
  }
  return d;
}

void write_csv(std::ostream &out, const Dataset &d,
               std::string_view label_column) {
  for (const auto &name : d.feature_names())
    out << name << ',';
  out << label_column << '\n';
  for (std::size_t q = 0; q < d.size(); ++q) {
    for (auto b : d.row(q))
      out << static_cast<int>(b) << ',';
    out << static_cast<int>(d.label(q)) << '\n';
  }
}

Split split_holdout(const Dataset &d, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0))
    throw DataError("hold-out ratio must lie in (0,1)");
  const auto m = d.size();
  const auto n_train = static_cast<std::size_t>(std::llround(ratio * m));
  if (n_train < 1 || n_train >= m)
    throw DataError("hold-out ratio leaves an empty train or test set");

  const auto idx = shuffled_indices(m, seed);
  Split s;
  s.seed = seed;
  s.train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.test.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

std::vector<Split> kfold(const Dataset &d, std::size_t k, std::uint64_t seed) {
  const auto m = d.size();
  if (k < 2 || k > m)
    throw DataError("fold count must satisfy 2 <= k <= M");

  const auto idx = shuffled_indices(m, seed);
  std::vector<Split> folds(k);
  std::size_t start = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t len = m / k + (f < m % k ? 1 : 0);
    auto &s = folds[f];
    s.seed = seed;
    s.test.assign(idx.begin() + static_cast<std::ptrdiff_t>(start),
                  idx.begin() + static_cast<std::ptrdiff_t>(start + len));
    s.train.insert(s.train.end(), idx.begin(),
                   idx.begin() + static_cast<std::ptrdiff_t>(start));
    s.train.insert(s.train.end(),
                   idx.begin() + static_cast<std::ptrdiff_t>(start + len),
                   idx.end());
    std::sort(s.test.begin(), s.test.end());
    std::sort(s.train.begin(), s.train.end());
    start += len;
  }
  return folds;
}

std::vector<std::vector<std::size_t>> check_consistency(const Dataset &d) {
  std::map<std::vector<std::uint8_t>, std::vector<std::size_t>> by_row;
  for (std::size_t q = 0; q < d.size(); ++q) {
    const auto r = d.row(q);
    by_row[{r.begin(), r.end()}].push_back(q);
  }
  std::vector<std::vector<std::size_t>> groups;
  for (auto &[bits, members] : by_row) {
    const bool has_pos = std::any_of(members.begin(), members.end(),
                                     [&](auto q) { return d.label(q) == 1; });
    const bool has_neg = std::any_of(members.begin(), members.end(),
                                     [&](auto q) { return d.label(q) == 0; });
    if (has_pos && has_neg)
      groups.push_back(members);
  }
  std::sort(groups.begin(), groups.end());
  return groups;
}

} // namespace bddlearn::data
