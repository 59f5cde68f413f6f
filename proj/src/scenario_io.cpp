#include <algorithm>
#include <cctype>
#include <fstream>
#include <charconv>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "hapex/simulator.hpp"

namespace hapex {
namespace {

constexpr int kFormatVersion = 1;

/// Shortest text that parses back to the same double.
std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  /// Next non-empty line with comments stripped; nullopt at end of input.
  std::optional<std::string> next() {
    std::string raw;
    while (std::getline(in_, raw)) {
      ++line_;
      if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
      const auto b = raw.find_first_not_of(" \t\r");
      if (b == std::string::npos) continue;
      const auto e = raw.find_last_not_of(" \t\r");
      return raw.substr(b, e - b + 1);
    }
    return std::nullopt;
  }

  std::string expect(const char* what) {
    auto l = next();
    if (!l) fail(std::string("unexpected end of file, expected ") + what);
    return *l;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("scenario line " + std::to_string(line_) + ": " + what);
  }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
};

/// Splits "keyword rest" and checks the keyword.
std::istringstream keyword_line(LineReader& r, const std::string& line, const char* key) {
  std::istringstream is(line);
  std::string word;
  is >> word;
  if (word != key) r.fail(std::string("expected '") + key + "', found '" + word + "'");
  return is;
}

template <typename... T>
void read_fields(LineReader& r, std::istringstream& is, const char* key, T&... out) {
  (is >> ... >> out);
  std::string extra;
  if (is.fail() || (is >> extra)) r.fail(std::string("malformed '") + key + "' line");
}

std::string rest_of(std::istringstream& is) {
  std::string s;
  std::getline(is, s);
  const auto b = s.find_first_not_of(" \t");
  return b == std::string::npos ? std::string() : s.substr(b);
}

}  // namespace

Scenario parse_scenario(std::istream& in, const MaterialLibrary& lib) {
  LineReader r(in);
  {
    auto is = keyword_line(r, r.expect("header"), "scenario-format");
    int version = 0;
    read_fields(r, is, "scenario-format", version);
    if (version != kFormatVersion) r.fail("unsupported scenario format version");
  }
  std::string name;
  {
    auto is = keyword_line(r, r.expect("name"), "name");
    name = rest_of(is);
    if (name.empty()) r.fail("empty scenario name");
  }
  WorkspaceBounds bounds;
  {
    auto is = keyword_line(r, r.expect("bounds"), "bounds");
    read_fields(r, is, "bounds", bounds.x_lo, bounds.x_hi, bounds.y_lo, bounds.y_hi, bounds.z_lo,
                bounds.z_hi);
  }
  {
    auto is = keyword_line(r, r.expect("epsilon"), "epsilon");
    read_fields(r, is, "epsilon", bounds.epsilon);
  }
  std::optional<WorkspaceGrid> grid;
  try {
    grid.emplace(bounds);
  } catch (const ConfigError& e) {
    r.fail(e.what());
  }

  std::map<char, std::size_t> symbols;
  std::string line = r.expect("material");
  while (line.rfind("material ", 0) == 0) {
    std::istringstream is(line.substr(9));
    std::string sym;
    is >> sym;
    const std::string mat = rest_of(is);
    if (sym.size() != 1 || mat.empty()) r.fail("material line needs a one-character symbol and a name");
    if (!lib.contains(mat)) r.fail("unknown material '" + mat + "'");
    if (!symbols.emplace(sym[0], lib.index_of(mat)).second) r.fail("duplicate symbol '" + sym + "'");
    line = r.expect("task");
  }
  if (symbols.empty()) r.fail("no material symbols declared");

  TaskSpec task;
  {
    // Names may contain spaces, so the pair is split on the library's names.
    auto is = keyword_line(r, line, "task");
    const std::string both = rest_of(is);
    bool found = false;
    for (std::size_t a = 0; a < lib.size() && !found; ++a) {
      const auto& na = lib[a].name;
      if (both.size() > na.size() + 1 && both.compare(0, na.size(), na) == 0 &&
          both[na.size()] == ' ') {
        const std::string nb = both.substr(na.size() + 1);
        if (lib.contains(nb)) {
          task = {a, lib.index_of(nb)};
          found = true;
        }
      }
    }
    if (!found) r.fail("task must name two library materials");
    if (task.material_a == task.material_b) r.fail("task materials must differ");
  }
  VoxelIndex start;
  {
    auto is = keyword_line(r, r.expect("start"), "start");
    read_fields(r, is, "start", start.ix, start.iy, start.iz);
    if (!grid->contains(start)) r.fail("start " + to_string(start) + " outside grid");
  }

  keyword_line(r, r.expect("raster"), "raster");
  Eigen::VectorXi gt(static_cast<Eigen::Index>(grid->theta()));
  for (int iz = 0; iz < grid->nz(); ++iz) {
    for (int iy = 0; iy < grid->ny(); ++iy) {
      const std::string row = r.expect("raster row");
      if (row.size() != static_cast<std::size_t>(grid->nx())) {
        r.fail("raster row has " + std::to_string(row.size()) + " symbols, grid is " +
               std::to_string(grid->nx()) + " wide");
      }
      for (int ix = 0; ix < grid->nx(); ++ix) {
        const auto it = symbols.find(row[static_cast<std::size_t>(ix)]);
        if (it == symbols.end()) r.fail(std::string("unknown raster symbol '") + row[ix] + "'");
        gt[static_cast<Eigen::Index>(grid->linear({ix, iy, iz}))] = static_cast<int>(it->second);
      }
    }
  }

  std::vector<VoxelIndex> path;
  {
    std::string l = r.expect("path");
    if (l.rfind("path", 0) != 0) r.fail("raster has more rows than the grid (expected 'path')");
    auto is = keyword_line(r, l, "path");
    long n = 0;
    read_fields(r, is, "path", n);
    if (n < 1) r.fail("benchmark path must be non-empty");
    for (long i = 0; i < n; ++i) {
      auto vs = std::istringstream(r.expect("path voxel"));
      VoxelIndex v;
      read_fields(r, vs, "path voxel", v.ix, v.iy, v.iz);
      if (!grid->contains(v)) r.fail("path voxel " + to_string(v) + " outside grid");
      path.push_back(v);
    }
  }
  if (r.next()) r.fail("trailing content after benchmark path");

  Scenario s{name, *grid, std::move(gt), std::move(path), start, task};
  s.validate(lib);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path, const MaterialLibrary& lib) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file '" + path.string() + "'");
  try {
    return parse_scenario(in, lib);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void write_scenario(std::ostream& out, const Scenario& s, const MaterialLibrary& lib) {
  s.validate(lib);
  // One printable symbol per material in use, preferring the name's initial.
  std::map<int, char> symbol_of;
  std::string used;
  const std::string pool = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";
  for (Eigen::Index i = 0; i < s.ground_truth.size(); ++i) {
    const int m = s.ground_truth[i];
    if (symbol_of.count(m)) continue;
    char c = static_cast<char>(std::toupper(static_cast<unsigned char>(lib[static_cast<std::size_t>(m)].name[0])));
    if (used.find(c) != std::string::npos || pool.find(c) == std::string::npos) {
      c = *std::find_if(pool.begin(), pool.end(), [&](char p) { return used.find(p) == std::string::npos; });
    }
    used.push_back(c);
    symbol_of[m] = c;
  }

  const auto& b = s.grid.bounds();
  out << "scenario-format " << kFormatVersion << '\n';
  out << "name " << s.name << '\n';
  out << "bounds " << shortest(b.x_lo) << ' ' << shortest(b.x_hi) << ' ' << shortest(b.y_lo) << ' '
      << shortest(b.y_hi) << ' ' << shortest(b.z_lo) << ' ' << shortest(b.z_hi) << '\n';
  out << "epsilon " << shortest(b.epsilon) << '\n';
  for (const auto& [m, c] : symbol_of) out << "material " << c << ' ' << lib[static_cast<std::size_t>(m)].name << '\n';
  out << "task " << lib[s.task.material_a].name << ' ' << lib[s.task.material_b].name << '\n';
  out << "start " << s.start.ix << ' ' << s.start.iy << ' ' << s.start.iz << '\n';
  out << "raster\n";
  for (int iz = 0; iz < s.grid.nz(); ++iz) {
    for (int iy = 0; iy < s.grid.ny(); ++iy) {
      for (int ix = 0; ix < s.grid.nx(); ++ix) {
        out << symbol_of[s.ground_truth[static_cast<Eigen::Index>(s.grid.linear({ix, iy, iz}))]];
      }
      out << '\n';
    }
  }
  out << "path " << s.benchmark.size() << '\n';
  for (const auto& v : s.benchmark) out << v.ix << ' ' << v.iy << ' ' << v.iz << '\n';
}

void save_scenario(const std::filesystem::path& path, const Scenario& s,
                   const MaterialLibrary& lib) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write scenario file '" + path.string() + "'");
  write_scenario(out, s, lib);
  if (!out) throw std::runtime_error("error writing scenario file '" + path.string() + "'");
}

}  // namespace hapex
