#include "becload/csv.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace becload {

namespace {

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

bool is_timestamp_line(const std::string& line) { return line.rfind("# generated:", 0) == 0; }

std::vector<std::string> split_lines(const std::string& s) {
  std::vector<std::string> lines;
  std::istringstream in(s);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

}  // namespace

std::string csv_header(const RunConfig& cfg, const std::string& columns) {
  std::ostringstream out;
  out << kCsvVersionLine << "\n";
  out << kCsvUnitsLine << "\n";
  out << "# generated: " << timestamp_utc() << "\n";
  out << "# cfg-begin\n";
  std::istringstream cfg_lines(cfg.canonical_text());
  std::string line;
  while (std::getline(cfg_lines, line)) out << "# cfg: " << line << "\n";
  out << "# cfg-end\n";
  out << columns << "\n";
  return out.str();
}

std::string extract_config_echo(const std::string& csv_content) {
  const auto lines = split_lines(csv_content);
  if (lines.empty() || lines[0] != kCsvVersionLine)
    throw std::runtime_error("csv: missing or unknown version line");
  std::ostringstream cfg;
  bool in_cfg = false, seen = false;
  for (const auto& l : lines) {
    if (l == "# cfg-begin") {
      in_cfg = true;
      seen = true;
      continue;
    }
    if (l == "# cfg-end") {
      in_cfg = false;
      continue;
    }
    if (in_cfg) {
      constexpr const char* prefix = "# cfg: ";
      if (l.rfind(prefix, 0) == 0)
        cfg << l.substr(7) << "\n";
      else if (l == "# cfg:")
        cfg << "\n";
      else
        throw std::runtime_error("csv: malformed config echo line: " + l);
    }
  }
  if (!seen) throw std::runtime_error("csv: no embedded config echo");
  return cfg.str();
}

bool csv_equal_ignoring_timestamp(const std::string& a, const std::string& b) {
  const auto la = split_lines(a);
  const auto lb = split_lines(b);
  if (la.size() != lb.size()) return false;
  for (std::size_t i = 0; i < la.size(); ++i) {
    if (la[i] == lb[i]) continue;
    if (is_timestamp_line(la[i]) && is_timestamp_line(lb[i])) continue;
    return false;
  }
  return true;
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open file for writing: " + path);
  f << content;
  if (!f) throw std::runtime_error("write failed: " + path);
}

std::vector<std::string> csv_data_rows(const std::string& csv_content) {
  std::vector<std::string> rows;
  bool header_seen = false;
  for (const auto& l : split_lines(csv_content)) {
    if (l.empty() || l[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;  // column header
      continue;
    }
    rows.push_back(l);
  }
  return rows;
}

}  // namespace becload
