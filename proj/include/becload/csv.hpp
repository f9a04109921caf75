#pragma once

#include <string>
#include <vector>

#include "becload/config.hpp"

namespace becload {

inline constexpr const char* kCsvVersionLine = "# becload-csv v1";
inline constexpr const char* kCsvUnitsLine =
    "# units: hbar=1, energies in omega, temperatures as k_B*T/omega, times in 1/omega";

// Header block: version, units, timestamp, config echo. The echo reparses to
// the exact configuration that produced the file.
std::string csv_header(const RunConfig& cfg, const std::string& columns);

// Recover the embedded configuration text from a CSV produced by csv_header.
// Rejects files whose version line is missing or unknown.
std::string extract_config_echo(const std::string& csv_content);

// Byte comparison that ignores the single "# generated:" timestamp line.
bool csv_equal_ignoring_timestamp(const std::string& a, const std::string& b);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Data rows of a CSV (everything after the header line that does not start
// with '#', excluding the column header itself).
std::vector<std::string> csv_data_rows(const std::string& csv_content);

}  // namespace becload
