#include "kfree/io.hpp"

#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace kfree {

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string fnv1a_hex(std::string_view bytes) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                (unsigned long long)fnv1a(bytes));
  return buf;
}

std::string RunManifest::id() const {
  std::string blob = "cmd=" + command + '\n';
  for (const auto& [k, v] : params) blob += k + '=' + v + '\n';
  for (const auto& [p, h] : input_hashes) blob += "input:" + p + '=' + h + '\n';
  blob += "version=" + version + '\n';
  return fnv1a_hex(blob);
}

std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string iso8601_utc_now() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace {

bool needs_quoting(const std::string& cell) {
  return cell.find_first_of(",\"\n") != std::string::npos;
}

std::string quote_cell(const std::string& cell) {
  if (!needs_quoting(cell)) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void append_row(std::string& out, const std::vector<std::string>& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out += ',';
    out += quote_cell(row[i]);
  }
  out += '\n';
}

}  // namespace

std::string render_csv(const Csv& table, const RunManifest& manifest) {
  std::string out = "# manifest=" + manifest.id() + '\n';
  append_row(out, table.header);
  for (const auto& row : table.rows) append_row(out, row);
  return out;
}

Csv parse_csv(const std::string& text) {
  Csv table;
  std::size_t pos = 0;
  bool have_header = false;
  while (pos < text.size()) {
    // split one physical record, honoring quoted cells
    std::vector<std::string> row;
    std::string cell;
    bool quoted = false;
    bool comment = text[pos] == '#';
    for (; pos < text.size(); ++pos) {
      char c = text[pos];
      if (quoted) {
        if (c == '"') {
          if (pos + 1 < text.size() && text[pos + 1] == '"') {
            cell += '"';
            ++pos;
          } else {
            quoted = false;
          }
        } else {
          cell += c;
        }
        continue;
      }
      if (c == '"') {
        quoted = true;
      } else if (c == ',') {
        row.push_back(std::move(cell));
        cell.clear();
      } else if (c == '\n') {
        ++pos;
        break;
      } else if (c != '\r') {
        cell += c;
      }
    }
    row.push_back(std::move(cell));
    if (comment || (row.size() == 1 && row[0].empty())) continue;
    if (!have_header) {
      table.header = std::move(row);
      have_header = true;
    } else {
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

void write_text_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
  }
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for write: " + tmp.string());
    out.write(content.data(), std::streamsize(content.size()));
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec)
    throw std::runtime_error("rename failed for " + path + ": " + ec.message());
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for read: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace kfree
