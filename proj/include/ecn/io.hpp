#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <json.hpp>

#include "ecn/core.hpp"
#include "ecn/eval.hpp"

namespace ecn::io {

// Binary layouts, all integers little-endian, payload IEEE-754 f32 row-major:
//
//   features:  "ECNF" | u16 version=1 | u64 n_items | u64 dim  | f32[n_items*dim]
//   distances: "ECND" | u16 version=1 | u64 rows    | u64 cols | f32[rows*cols]

inline constexpr std::uint16_t kFormatVersion = 1;
inline constexpr std::size_t kHeaderBytes = 4 + 2 + 8 + 8;

std::vector<std::uint8_t> encode_features(const FeatureMatrix& m);
FeatureMatrix decode_features(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_distance(const DistanceMatrix& d);
DistanceMatrix decode_distance(std::span<const std::uint8_t> bytes);

/// Reads ECNF, or headerless comma-separated rows when the extension is .csv.
FeatureMatrix read_features(const std::filesystem::path& path);
void write_features(const FeatureMatrix& m, const std::filesystem::path& path);

/// Distances are stored as f32; values are rounded on write.
DistanceMatrix read_distance(const std::filesystem::path& path);
void write_distance(const DistanceMatrix& d, const std::filesystem::path& path);

/// CSV with header `index,person_id,camera_id,role`, role in {query, gallery}.
/// Indexes must cover 0..N-1 exactly once. Records come back sorted by index.
EvalRecords read_metadata(const std::filesystem::path& path);
EvalRecords parse_metadata(const std::string& text);
void write_metadata(const EvalRecords& records, const std::filesystem::path& path);

nlohmann::json report_to_json(const EvalReport& report, const nlohmann::json& params);
void write_report(const EvalReport& report, const nlohmann::json& params,
                  const std::filesystem::path& path);

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);
void write_bytes(std::span<const std::uint8_t> bytes, const std::filesystem::path& path);

}  // namespace ecn::io
