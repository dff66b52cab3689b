#include "renorm/io.hpp"

#include "renorm/errors.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace renorm {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

nlohmann::json spectral_json(const SpectralResult& r) {
  nlohmann::json res = nlohmann::json::array();
  for (const auto& z : r.resonances)
    res.push_back({{"re", z.rho.real()}, {"im", z.rho.imag()}, {"alpha", z.alpha}, {"err", z.err}});
  return {{"resonances", res}, {"traces", r.traces}, {"method", r.method}};
}

SpectralResult spectral_from_json(const nlohmann::json& j) {
  SpectralResult r;
  try {
    r.method = j.at("method").get<std::string>();
    r.traces = j.at("traces").get<std::vector<double>>();
    for (const auto& z : j.at("resonances"))
      r.resonances.push_back({cplx(z.at("re").get<double>(), z.at("im").get<double>()),
                              z.at("alpha").get<double>(), z.at("err").get<double>()});
  } catch (const nlohmann::json::exception& e) {
    throw MissingArtifacts(std::string("malformed spectral record: ") + e.what());
  }
  return r;
}

std::string CsvTable::str(const ArtifactStamp& stamp) const {
  std::ostringstream os;
  os << "# version=" << stamp.version << " config_sha256=" << stamp.config_hash << '\n';
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_double(row[i]);
    os << '\n';
  }
  return os.str();
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

CsvTable CsvTable::read(const std::string& path, ArtifactStamp* stamp) {
  std::ifstream in(path);
  if (!in) throw MissingArtifacts("cannot open " + path);
  CsvTable t;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) throw MissingArtifacts(path + ": missing stamp line");
  if (stamp) {
    std::istringstream is(line.substr(2));
    std::string kv;
    while (is >> kv) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) continue;
      const std::string k = kv.substr(0, eq), v = kv.substr(eq + 1);
      if (k == "version") stamp->version = v;
      if (k == "config_sha256") stamp->config_hash = v;
    }
  }
  if (!std::getline(in, line) || line.empty()) throw MissingArtifacts(path + ": missing header");
  t.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != t.header.size()) throw MissingArtifacts(path + ": row width mismatch");
    std::vector<double> row;
    for (const auto& c : cells) {
      double v = 0.0;
      const auto [p, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
      if (ec != std::errc() || p != c.data() + c.size()) throw MissingArtifacts(path + ": bad cell '" + c + "'");
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw MissingArtifacts("no column '" + name + "'");
}

CsvTable traces_table(const std::vector<double>& traces) {
  CsvTable t{{"n", "T_n"}, {}};
  for (std::size_t i = 0; i < traces.size(); ++i) t.rows.push_back({double(i + 1), traces[i]});
  return t;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidSpec("cannot write " + path);
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingArtifacts("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace renorm
