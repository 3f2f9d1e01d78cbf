#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "bddlearn/bdd.hpp"
#include "bddlearn/encode.hpp"
#include "bddlearn/search.hpp"

namespace bddlearn::io {

using json = nlohmann::ordered_json;

inline constexpr std::string_view model_format = "bddlearn-model/1";
inline constexpr std::string_view context_format = "bddlearn-context/1";

json to_json(const bdd::Bdd &b);
json to_json(const encode::EncodingContext &ctx);
encode::EncodingContext context_from_json(const json &j);

/// Model document. Wall-clock time is left out so identical runs give
/// identical bytes.
json to_json(const search::LearnedModel &m);
/// Rebuilds the diagram from ordering and table; accuracy, stats and
/// literal count are restored as recorded.
search::LearnedModel model_from_json(const json &j);

json to_json(const search::CvReport &r);
/// Per-run rows: Seed, Fold, Train, Test, Size, E_Size, Time, Opt, Error.
void write_cv_csv(std::ostream &out, const search::CvReport &r);

std::string_view to_string(encode::Variant v) noexcept;
encode::Variant parse_variant(std::string_view s);
std::string_view to_string(search::Mode m) noexcept;
search::Mode parse_mode(std::string_view s);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;
/// "fnv1a64:<16 hex digits>" of the file contents.
std::string fingerprint_file(const std::filesystem::path &path);

/// Writes `contents` to a sibling temporary file and renames it over `path`.
void write_atomic(const std::filesystem::path &path, std::string_view contents);

std::string read_file(const std::filesystem::path &path);

} // namespace bddlearn::io
