#include "ecn/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

namespace ecn::io {
namespace {

constexpr char kFeatureMagic[4] = {'E', 'C', 'N', 'F'};
constexpr char kDistanceMagic[4] = {'E', 'C', 'N', 'D'};

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  for (std::size_t b = 0; b < sizeof(T); ++b) {
    out.push_back(static_cast<std::uint8_t>((static_cast<std::uint64_t>(value) >> (8 * b)) & 0xFF));
  }
}

template <typename T>
T get_le(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (std::size_t b = 0; b < sizeof(T); ++b) v |= static_cast<std::uint64_t>(p[b]) << (8 * b);
  return static_cast<T>(v);
}

struct Header {
  std::uint64_t rows;
  std::uint64_t cols;
};

std::vector<std::uint8_t> encode(const char (&magic)[4], std::uint64_t rows, std::uint64_t cols,
                                 std::size_t count, auto&& value_at) {
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + 4 * count);
  out.insert(out.end(), magic, magic + 4);
  put_le<std::uint16_t>(out, kFormatVersion);
  put_le<std::uint64_t>(out, rows);
  put_le<std::uint64_t>(out, cols);
  for (std::size_t i = 0; i < count; ++i) {
    put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(static_cast<float>(value_at(i))));
  }
  return out;
}

Header decode_header(std::span<const std::uint8_t> bytes, const char (&magic)[4]) {
  if (bytes.size() < kHeaderBytes) {
    throw Error(ErrorCode::TruncatedFile, "expected at least " + std::to_string(kHeaderBytes) +
                                              " header bytes, got " + std::to_string(bytes.size()));
  }
  if (std::memcmp(bytes.data(), magic, 4) != 0) {
    throw Error(ErrorCode::BadMagic, "expected magic '" + std::string(magic, 4) + "', got '" +
                                         std::string(reinterpret_cast<const char*>(bytes.data()), 4) +
                                         "'");
  }
  const auto version = get_le<std::uint16_t>(bytes.data() + 4);
  if (version != kFormatVersion) {
    throw Error(ErrorCode::UnsupportedVersion, "format version " + std::to_string(version));
  }
  const Header h{get_le<std::uint64_t>(bytes.data() + 6), get_le<std::uint64_t>(bytes.data() + 14)};
  if (h.rows == 0 || h.cols == 0) {
    throw Error(ErrorCode::EmptyMatrix, "header declares a " + std::to_string(h.rows) + "x" +
                                            std::to_string(h.cols) + " matrix");
  }
  const std::uint64_t limit = (std::uint64_t{1} << 62) / 4;
  if (h.rows > limit / h.cols) throw Error(ErrorCode::ShapeMismatch, "declared shape overflows");
  const std::uint64_t expected = kHeaderBytes + 4 * h.rows * h.cols;
  if (bytes.size() < expected) {
    throw Error(ErrorCode::TruncatedFile, "expected " + std::to_string(expected) + " bytes, got " +
                                              std::to_string(bytes.size()));
  }
  if (bytes.size() > expected) {
    throw Error(ErrorCode::ShapeMismatch, "expected " + std::to_string(expected) + " bytes, got " +
                                              std::to_string(bytes.size()) + " (trailing data)");
  }
  return h;
}

float payload_at(std::span<const std::uint8_t> bytes, std::size_t i) {
  return std::bit_cast<float>(get_le<std::uint32_t>(bytes.data() + kHeaderBytes + 4 * i));
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto at = line.find(sep, start);
    out.push_back(trim(line.substr(start, at == std::string_view::npos ? at : at - start)));
    if (at == std::string_view::npos) break;
    start = at + 1;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view field, std::size_t line_no) {
  T value{};
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc{} || ptr != end || field.empty()) {
    throw Error(ErrorCode::ParseError,
                "line " + std::to_string(line_no) + ": cannot parse '" + std::string(field) + "'");
  }
  return value;
}

std::vector<std::string_view> lines_of(const std::string& text) {
  std::vector<std::string_view> out;
  for (auto l : split(text, '\n')) out.push_back(l);
  return out;
}

FeatureMatrix read_features_csv(const std::filesystem::path& path) {
  const auto bytes = read_bytes(path);
  const std::string text(bytes.begin(), bytes.end());
  FeatureMatrix m;
  std::size_t line_no = 0;
  for (const auto line : lines_of(text)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (m.n_items == 0) {
      m.dim = fields.size();
    } else if (fields.size() != m.dim) {
      throw Error(ErrorCode::ShapeMismatch, "line " + std::to_string(line_no) + " has " +
                                                std::to_string(fields.size()) + " values, expected " +
                                                std::to_string(m.dim));
    }
    for (const auto f : fields) m.data.push_back(parse_number<float>(f, line_no));
    ++m.n_items;
  }
  validate_feature_matrix(m);
  return m;
}

}  // namespace

std::vector<std::uint8_t> encode_features(const FeatureMatrix& m) {
  validate_feature_matrix(m);
  return encode(kFeatureMagic, m.n_items, m.dim, m.data.size(), [&](std::size_t i) { return m.data[i]; });
}

FeatureMatrix decode_features(std::span<const std::uint8_t> bytes) {
  const Header h = decode_header(bytes, kFeatureMagic);
  FeatureMatrix m;
  m.n_items = h.rows;
  m.dim = h.cols;
  m.data.resize(h.rows * h.cols);
  for (std::size_t i = 0; i < m.data.size(); ++i) m.data[i] = payload_at(bytes, i);
  validate_feature_matrix(m);
  return m;
}

std::vector<std::uint8_t> encode_distance(const DistanceMatrix& d) {
  if (d.data.size() != d.rows * d.cols || d.data.empty()) {
    throw Error(ErrorCode::ShapeMismatch, "distance matrix payload does not match its shape");
  }
  return encode(kDistanceMagic, d.rows, d.cols, d.data.size(), [&](std::size_t i) { return d.data[i]; });
}

DistanceMatrix decode_distance(std::span<const std::uint8_t> bytes) {
  const Header h = decode_header(bytes, kDistanceMagic);
  DistanceMatrix d(h.rows, h.cols);
  for (std::size_t i = 0; i < d.data.size(); ++i) {
    const float v = payload_at(bytes, i);
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::NonFinite, "non-finite distance at flat index " + std::to_string(i));
    }
    d.data[i] = v;
  }
  return d;
}

FeatureMatrix read_features(const std::filesystem::path& path) {
  if (path.extension() == ".csv") return read_features_csv(path);
  return decode_features(read_bytes(path));
}

void write_features(const FeatureMatrix& m, const std::filesystem::path& path) {
  write_bytes(encode_features(m), path);
}

DistanceMatrix read_distance(const std::filesystem::path& path) {
  return decode_distance(read_bytes(path));
}

void write_distance(const DistanceMatrix& d, const std::filesystem::path& path) {
  write_bytes(encode_distance(d), path);
}

EvalRecords parse_metadata(const std::string& text) {
  const auto lines = lines_of(text);
  std::size_t line_no = 0;
  bool seen_header = false;
  EvalRecords records;
  for (const auto line : lines) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (!seen_header) {
      if (fields != std::vector<std::string_view>{"index", "person_id", "camera_id", "role"}) {
        throw Error(ErrorCode::ParseError,
                    "expected header 'index,person_id,camera_id,role', got '" + std::string(line) + "'");
      }
      seen_header = true;
      continue;
    }
    if (fields.size() != 4) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + " has " +
                                             std::to_string(fields.size()) + " fields, expected 4");
    }
    EvalRecord r;
    r.item_index = parse_number<index_t>(fields[0], line_no);
    r.person_id = parse_number<std::int64_t>(fields[1], line_no);
    r.camera_id = parse_number<std::int64_t>(fields[2], line_no);
    if (fields[3] == "query") {
      r.role = Role::Query;
    } else if (fields[3] == "gallery") {
      r.role = Role::Gallery;
    } else {
      throw Error(ErrorCode::UnknownRole,
                  "line " + std::to_string(line_no) + ": role '" + std::string(fields[3]) + "'");
    }
    records.push_back(r);
  }
  if (!seen_header) throw Error(ErrorCode::ParseError, "metadata file is empty");

  std::sort(records.begin(), records.end(),
            [](const EvalRecord& a, const EvalRecord& b) { return a.item_index < b.item_index; });
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].item_index == records[i - 1].item_index) {
      throw Error(ErrorCode::DuplicateIndex, "index " + std::to_string(records[i].item_index) +
                                                 " appears more than once");
    }
  }
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].item_index != static_cast<index_t>(i)) {
      throw Error(ErrorCode::IndexGap, "index " + std::to_string(i) + " is missing (found " +
                                           std::to_string(records[i].item_index) + ")");
    }
  }
  return records;
}

EvalRecords read_metadata(const std::filesystem::path& path) {
  const auto bytes = read_bytes(path);
  return parse_metadata(std::string(bytes.begin(), bytes.end()));
}

void write_metadata(const EvalRecords& records, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "index,person_id,camera_id,role\n";
  for (const auto& r : records) {
    out << r.item_index << ',' << r.person_id << ',' << r.camera_id << ','
        << (r.role == Role::Query ? "query" : "gallery") << '\n';
  }
  const std::string text = out.str();
  write_bytes({reinterpret_cast<const std::uint8_t*>(text.data()), text.size()}, path);
}

nlohmann::json report_to_json(const EvalReport& report, const nlohmann::json& params) {
  nlohmann::json cmc = nlohmann::json::object();
  for (const auto& [k, v] : report.cmc) cmc[std::to_string(k)] = v;
  return {
      {"map", report.map},
      {"cmc", cmc},
      {"num_queries", report.num_queries},
      {"skipped_queries", report.skipped_queries},
      {"params", params.is_null() ? nlohmann::json::object() : params},
  };
}

void write_report(const EvalReport& report, const nlohmann::json& params,
                  const std::filesystem::path& path) {
  const std::string text = report_to_json(report, params).dump(2) + "\n";
  write_bytes({reinterpret_cast<const std::uint8_t*>(text.data()), text.size()}, path);
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return bytes;
}

void write_bytes(std::span<const std::uint8_t> bytes, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoError, "failed writing '" + path.string() + "'");
}

}  // namespace ecn::io
