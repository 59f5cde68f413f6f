#include "hapex/materials.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace hapex {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct PendingRecord {
  std::size_t index = 0;  // 1-based
  std::size_t line = 0;
  std::optional<std::string> name;
  std::optional<double> mu_E, sigma_E, mu_C, sigma_C;
};

[[noreturn]] void record_error(const PendingRecord& r, const std::string& what) {
  std::ostringstream os;
  os << "material record " << r.index << " (line " << r.line << "): " << what;
  throw ConfigError(os.str());
}

MaterialParams finish(const PendingRecord& r) {
  const auto need = [&](const std::optional<double>& v, const char* key) {
    if (!v) record_error(r, std::string("missing field '") + key + "'");
    return *v;
  };
  if (!r.name) record_error(r, "missing field 'name'");
  MaterialParams p{*r.name, need(r.mu_E, "mu_E"), need(r.sigma_E, "sigma_E"),
                   need(r.mu_C, "mu_C"), need(r.sigma_C, "sigma_C")};
  if (!(p.sigma_E > 0.0)) record_error(r, "sigma_E must be positive");
  if (!(p.sigma_C > 0.0)) record_error(r, "sigma_C must be positive");
  return p;
}

double parse_number(const PendingRecord& r, std::string_view key, std::string_view text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end || !std::isfinite(v)) {
    record_error(r, "field '" + std::string(key) + "' is not a finite number: '" +
                        std::string(text) + "'");
  }
  return v;
}

}  // namespace

MaterialLibrary::MaterialLibrary(std::vector<MaterialParams> materials)
    : materials_(std::move(materials)) {
  if (materials_.size() < 2) throw ConfigError("material library needs at least 2 materials");
  std::unordered_set<std::string> names;
  for (std::size_t i = 0; i < materials_.size(); ++i) {
    const auto& m = materials_[i];
    const auto where = "material " + std::to_string(i + 1) + " '" + m.name + "': ";
    if (m.name.empty()) throw ConfigError(where + "empty name");
    if (!names.insert(m.name).second) throw ConfigError(where + "duplicate name");
    for (double v : {m.mu_E, m.mu_C, m.sigma_E, m.sigma_C}) {
      if (!std::isfinite(v)) throw ConfigError(where + "non-finite parameter");
    }
    if (m.sigma_E < 0.0 || m.sigma_C < 0.0) throw ConfigError(where + "negative sigma");
  }
}

const MaterialParams& MaterialLibrary::at(std::size_t i) const {
  if (i >= materials_.size()) {
    throw std::invalid_argument("material index " + std::to_string(i) + " out of range");
  }
  return materials_[i];
}

std::size_t MaterialLibrary::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < materials_.size(); ++i) {
    if (materials_[i].name == name) return i;
  }
  throw ConfigError("unknown material '" + std::string(name) + "'");
}

bool MaterialLibrary::contains(std::string_view name) const {
  for (const auto& m : materials_) {
    if (m.name == name) return true;
  }
  return false;
}

MaterialLibrary parse_library(std::istream& in) {
  std::vector<MaterialParams> out;
  std::unordered_set<std::string> names;
  std::optional<PendingRecord> cur;
  std::size_t records = 0;

  const auto flush = [&] {
    if (!cur) return;
    auto p = finish(*cur);
    if (!names.insert(p.name).second) record_error(*cur, "duplicate name '" + p.name + "'");
    out.push_back(std::move(p));
    cur.reset();
  };

  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line == "[material]") {
      flush();
      cur = PendingRecord{++records, lineno, {}, {}, {}, {}, {}};
      continue;
    }
    if (!cur) {
      throw ConfigError("line " + std::to_string(lineno) +
                        ": expected '[material]' before fields");
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) record_error(*cur, "malformed line '" + std::string(line) + "'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const auto set = [&](auto& slot, auto v) {
      if (slot) record_error(*cur, "field '" + std::string(key) + "' given twice");
      slot = std::move(v);
    };
    if (key == "name") {
      if (value.empty()) record_error(*cur, "empty name");
      set(cur->name, std::string(value));
    } else if (key == "mu_E") {
      set(cur->mu_E, parse_number(*cur, key, value));
    } else if (key == "sigma_E") {
      set(cur->sigma_E, parse_number(*cur, key, value));
    } else if (key == "mu_C") {
      set(cur->mu_C, parse_number(*cur, key, value));
    } else if (key == "sigma_C") {
      set(cur->sigma_C, parse_number(*cur, key, value));
    } else {
      record_error(*cur, "unknown field '" + std::string(key) + "'");
    }
  }
  flush();
  return MaterialLibrary(std::move(out));
}

MaterialLibrary load_library(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open material file '" + path.string() + "'");
  try {
    return parse_library(in);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

HapticSample synthesize_sample(const MaterialLibrary& lib, std::size_t material_index,
                               const NoiseSpec& noise, Rng& rng) {
  const auto& m = lib.at(material_index);
  if (!(noise.scale_E >= 0.0) || !(noise.scale_C >= 0.0)) {
    throw std::invalid_argument("noise scales must be non-negative");
  }
  // Standard normals scaled by hand so zero deviations stay legal and the
  // stream consumption is independent of the parameters.
  std::normal_distribution<double> z(0.0, 1.0);
  const double e = m.mu_E + m.sigma_E * z(rng);
  const double c = m.mu_C + m.sigma_C * z(rng);
  const double q_e = noise.scale_E * std::abs(m.mu_E) / 2.0 * z(rng);
  const double q_c = noise.scale_C * std::abs(m.mu_C) / 2.0 * z(rng);
  return {e + q_e, c + q_c};
}

}  // namespace hapex
