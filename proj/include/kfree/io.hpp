#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace kfree {

// Provenance record stamped into every output file. The id hashes the
// command, parameters, inputs, and tool version; timestamp and wall time
// stay out of it so reruns of the same experiment share an id.
struct RunManifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> params;  // key, value
  std::vector<std::pair<std::string, std::string>> input_hashes;  // path, hash
  std::string version;
  std::string timestamp;  // ISO 8601 UTC, informational only
  int threads = 1;
  double wall_seconds = 0;

  std::string id() const;  // 16 hex digits
};

// FNV-1a, 64 bit.
std::uint64_t fnv1a(std::string_view bytes);
std::string fnv1a_hex(std::string_view bytes);

// Shortest-roundtrip decimal for doubles (printf %.17g).
std::string format_g17(double x);

std::string iso8601_utc_now();

// Plain table with a header row; cells are pre-formatted strings.
struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Serialized form: "# manifest=<id>" comment, header, then rows. Cells
// containing commas, quotes, or newlines are quoted.
std::string render_csv(const Csv& table, const RunManifest& manifest);

// Inverse of render_csv; "#" lines are skipped.
Csv parse_csv(const std::string& text);

// Write-to-temp-then-rename so readers never observe a partial file.
void write_text_atomic(const std::string& path, const std::string& content);

std::string read_text(const std::string& path);

}  // namespace kfree
