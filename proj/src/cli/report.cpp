#include "renorm/cli.hpp"

#include "renorm/errors.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace renorm::cli {

using nlohmann::json;

namespace {

json read_json(const std::string& path) {
  const json j = json::parse(read_file(path), nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw MissingArtifacts(path + " is not a JSON object");
  return j;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string pad(std::string s, std::size_t w) {
  if (s.size() < w) s.append(w - s.size(), ' ');
  return s;
}

// Every artifact must carry the stamp of the run's summary.
CsvTable read_stamped_csv(const std::string& path, const std::string& hash) {
  ArtifactStamp st;
  CsvTable t = CsvTable::read(path, &st);
  if (st.config_hash != hash) throw MissingArtifacts(path + " belongs to a different run");
  if (t.rows.empty()) throw MissingArtifacts(path + " has no rows");
  return t;
}

json read_stamped_json(const std::string& path, const std::string& hash) {
  json j = read_json(path);
  if (j.value("config_sha256", "") != hash) throw MissingArtifacts(path + " belongs to a different run");
  return j;
}

void resonance_rows(std::ostringstream& os, const SpectralResult& r) {
  os << "  " << r.method << "\n    rho                          alpha        err\n";
  for (const auto& z : r.resonances) {
    os << "    " << fmt("%-12.9f", z.rho.real()) << (z.rho.imag() < 0 ? " - " : " + ")
       << fmt("%-10.3e", std::abs(z.rho.imag())) << "i  " << fmt("%-11.6f", z.alpha) << "  "
       << fmt("%.2e", z.err) << "\n";
  }
}

}  // namespace

std::string report(const std::string& dir) {
  const json s = read_json(dir + "/summary.json");
  const std::string hash = s.value("config_sha256", "");
  const std::string exp = s.value("experiment", "");
  if (hash.empty() || exp.empty()) throw MissingArtifacts(dir + "/summary.json lacks the run stamp");
  read_stamped_json(dir + "/config.json", hash);

  std::ostringstream os;
  os << "experiment " << exp << "  (version " << s.value("version", "?") << ", config " << hash.substr(0, 12)
     << ")\n";
  try {
    if (exp == "identities") {
      read_stamped_csv(dir + "/identities.csv", hash);
      os << "  identity            max residual   tolerance   status\n";
      for (const auto& r : s.at("identities"))
        os << "  " << pad(r.at("name").get<std::string>(), 20)
           << fmt("%.3e", r.at("max_residual").get<double>()) << "      " << fmt("%.0e", r.at("tolerance").get<double>())
           << "       " << (r.at("pass").get<bool>() ? "ok" : "FAIL") << "\n";
    } else if (exp == "spectrum") {
      const CsvTable tr = read_stamped_csv(dir + "/traces.csv", hash);
      for (const char* f : {"spectrum_determinant.json", "spectrum_galerkin.json"})
        resonance_rows(os, spectral_from_json(read_stamped_json(dir + "/" + f, hash)));
      os << "  traces: " << tr.rows.size() << ", obstructions: " << s.at("obstructions").get<int>()
         << ", pipeline gap " << fmt("%.2e", s.at("pipeline_rel_gap").get<double>()) << "\n";
    } else if (exp == "growth") {
      read_stamped_csv(dir + "/growth.csv", hash);
      os << "  observable          mean        slope\n";
      for (const auto& r : s.at("observables"))
        os << "  " << pad(r.at("name").get<std::string>(), 16) << fmt("%10.4f", r.at("mean").get<double>()) << "  "
           << fmt("%10.4f", r.at("slope").get<double>()) << "\n";
    } else if (exp == "coboundary") {
      for (const auto& r : s.at("observables")) {
        const std::string name = r.at("name").get<std::string>();
        read_stamped_csv(dir + "/coboundary_" + name + ".csv", hash);
        os << "  " << name << ": bounded " << (r.at("bounded").get<bool>() ? "yes" : "no") << ", sup |H| "
           << fmt("%.6f", r.at("sup_values").back().get<double>()) << ", gradient trend "
           << fmt("%.4f", r.at("gradient_trend_slope").get<double>());
        if (!r.at("affine_residual").is_null())
          os << ", affine residual " << fmt("%.2e", r.at("affine_residual").get<double>());
        os << "\n";
      }
    } else if (exp == "sweep-alpha") {
      const CsvTable t = read_stamped_csv(dir + "/sweep.csv", hash);
      const std::size_t a = t.column("alpha"), m = t.column("method"), ab = t.column("abs"), e = t.column("err");
      os << "  alpha   method       |rho|          err\n";
      for (const auto& row : t.rows)
        os << "  " << fmt("%.3f", row[a]) << "   " << (row[m] == 0.0 ? "determinant" : "galerkin   ") << "  "
           << fmt("%.10f", row[ab]) << "  " << fmt("%.2e", row[e]) << "\n";
      os << "  continuity violations: determinant " << s.at("violations_determinant").size() << ", galerkin "
         << s.at("violations_galerkin").size() << "\n";
    } else {
      throw MissingArtifacts("unknown experiment '" + exp + "' in summary");
    }
  } catch (const json::exception& e) {
    throw MissingArtifacts(std::string("summary.json is incomplete: ") + e.what());
  }
  os << "  status: " << (s.value("pass", false) ? "pass" : "FAIL") << "\n";
  return os.str();
}

}  // namespace renorm::cli
