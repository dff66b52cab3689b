#pragma once

#include "renorm/spectral.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace renorm {

inline constexpr const char* kArtifactVersion = "1.0.0";

/// Written into every output file.
struct ArtifactStamp {
  std::string config_hash;
  std::string version = kArtifactVersion;
};

/// Scientific notation with 17 significant digits; round-trips every double.
std::string format_double(double v);

/// {"resonances": [{"re", "im", "alpha", "err"}], "traces": [...], "method": ...}
nlohmann::json spectral_json(const SpectralResult& r);
SpectralResult spectral_from_json(const nlohmann::json& j);

/**
 * @brief Numeric table written as CSV.
 *
 * The first line is a '#' comment carrying the stamp, then the header row.
 */
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::string str(const ArtifactStamp& stamp) const;
  /// Throws MissingArtifacts if the file is absent, a row has the wrong width, or a cell is not a number.
  static CsvTable read(const std::string& path, ArtifactStamp* stamp = nullptr);
  std::size_t column(const std::string& name) const;
};

/// (n, T_n) rows.
CsvTable traces_table(const std::vector<double>& traces);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace renorm
