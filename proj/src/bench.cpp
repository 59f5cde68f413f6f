#include "hapex/bench.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace hapex {

using nlohmann::json;

double ConfusionMatrix::rate(std::size_t i) const {
  const auto r = static_cast<Eigen::Index>(i);
  return trials_per_material > 0 ? static_cast<double>(counts(r, r)) / trials_per_material : 0.0;
}

Eigen::VectorXd ConfusionMatrix::rates() const {
  return counts.diagonal().cast<double>() / static_cast<double>(trials_per_material);
}

double ConfusionMatrix::mean_rate() const { return rates().mean(); }

ConfusionMatrix run_classification_experiment(const MaterialLibrary& lib, int trials_per_material,
                                              int k_samples, const NoiseSpec& noise,
                                              std::uint64_t seed) {
  if (trials_per_material < 1) throw std::invalid_argument("trials must be >= 1");
  if (k_samples < 1) throw std::invalid_argument("samples per trial must be >= 1");
  const auto n = static_cast<Eigen::Index>(lib.size());
  ConfusionMatrix cm{Eigen::MatrixXi::Zero(n, n), trials_per_material, k_samples};
  for (std::size_t m = 0; m < lib.size(); ++m) {
    Rng rng(seed + m);
    for (int t = 0; t < trials_per_material; ++t) {
      auto post = MaterialPosterior::uniform(lib.size());
      for (int k = 0; k < k_samples; ++k) {
        post = update_posterior(lib, post, synthesize_sample(lib, m, noise, rng));
      }
      ++cm.counts(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(map_category(post)));
    }
  }
  return cm;
}

NoiseSweep run_noise_sweep(const MaterialLibrary& lib, const std::vector<double>& scales,
                           int trials_per_material, const std::vector<int>& k_list,
                           std::uint64_t seed) {
  if (scales.empty() || k_list.empty()) throw std::invalid_argument("empty sweep");
  NoiseSweep out{scales, k_list,
                 Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(scales.size()),
                                       static_cast<Eigen::Index>(k_list.size())),
                 {}};
  std::uint64_t cell = 0;
  for (std::size_t s = 0; s < scales.size(); ++s) {
    for (std::size_t k = 0; k < k_list.size(); ++k, ++cell) {
      auto cm = run_classification_experiment(lib, trials_per_material, k_list[k],
                                              NoiseSpec::uniform(scales[s]),
                                              seed + cell * lib.size());
      out.accuracy(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(k)) = cm.mean_rate();
      out.cells.push_back(std::move(cm));
    }
  }
  return out;
}

Summary summarize(const std::vector<double>& values) {
  if (values.empty()) return {};
  const Eigen::Map<const Eigen::ArrayXd> v(values.data(), static_cast<Eigen::Index>(values.size()));
  const double mean = v.mean();
  const double std = v.size() > 1 ? std::sqrt((v - mean).square().sum() / double(v.size() - 1)) : 0.0;
  return {mean, std};
}

std::vector<std::uint64_t> ExperimentReport::seeds() const {
  std::vector<std::uint64_t> out;
  for (const auto& t : trials) out.push_back(t.seed);
  return out;
}

void ExperimentReport::aggregate() {
  std::vector<double> ls, gs, gls;
  loop_closures = 0;
  for (const auto& t : trials) {
    ls.push_back(static_cast<double>(t.l));
    gs.push_back(t.gamma);
    gls.push_back(t.gamma_per_l);
    if (t.stop_reason == StopReason::kLoopClosure) ++loop_closures;
  }
  l = summarize(ls);
  gamma = summarize(gs);
  gamma_per_l = summarize(gls);
}

ExperimentReport run_exploration_benchmark(const Scenario& scenario, const MaterialLibrary& lib,
                                           int n_trials, const TrialConfig& config) {
  if (n_trials < 1) throw std::invalid_argument("n_trials must be >= 1");
  ExperimentReport rep{scenario.name, config, {}, {}, {}, {}, 0};
  for (int i = 0; i < n_trials; ++i) {
    TrialConfig c = config;
    c.seed = config.seed + static_cast<std::uint64_t>(i);
    rep.trials.push_back(run_trial(scenario, lib, c));
  }
  rep.aggregate();
  return rep;
}

TrialRecord playback(const Scenario& scenario, const std::vector<VoxelIndex>& visited) {
  TrialRecord rec;
  rec.visited = visited;
  rec.l = visited.size();
  rec.gamma = gamma_metric(scenario.grid, visited, scenario.benchmark);
  rec.gamma_per_l = rec.l > 0 ? rec.gamma / static_cast<double>(rec.l) : 0.0;
  return rec;
}

// ---------------------------------------------------------------------------

void write_field(std::ostream& out, const WorkspaceGrid& grid, const FieldXd& field) {
  if (field.size() != static_cast<Eigen::Index>(grid.theta())) {
    throw std::invalid_argument("field size does not match grid");
  }
  char buf[32];
  for (int iz = 0; iz < grid.nz(); ++iz) {
    if (iz > 0) out << '\n';
    for (int iy = 0; iy < grid.ny(); ++iy) {
      for (int ix = 0; ix < grid.nx(); ++ix) {
        std::snprintf(buf, sizeof buf, "%.9g", field[static_cast<Eigen::Index>(grid.linear({ix, iy, iz}))]);
        if (ix > 0) out << ' ';
        out << buf;
      }
      out << '\n';
    }
  }
}

FieldXd read_field(std::istream& in, const WorkspaceGrid& grid) {
  FieldXd f(static_cast<Eigen::Index>(grid.theta()));
  for (std::size_t i = 0; i < grid.theta(); ++i) {
    // Files are row-major in the linear index order.
    if (!(in >> f[static_cast<Eigen::Index>(i)])) throw std::runtime_error("field dump too short");
  }
  double extra = 0.0;
  if (in >> extra) throw std::runtime_error("field dump too long");
  return f;
}

FieldXd read_field(const std::filesystem::path& path, const WorkspaceGrid& grid) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open field dump '" + path.string() + "'");
  return read_field(in, grid);
}

std::vector<std::filesystem::path> dump_fields(const WorkspaceGrid& grid,
                                               const AttentionState& state, int iteration,
                                               const std::filesystem::path& dir) {
  const FieldXd* fields[] = {&state.inhibition, &state.uncertainty, &state.saliency, &state.omega,
                             &state.target_posterior};
  char suffix[32];
  std::snprintf(suffix, sizeof suffix, "_k%04d.txt", iteration);
  std::vector<std::filesystem::path> out;
  for (std::size_t i = 0; i < std::size(fields); ++i) {
    auto path = dir / (std::string(kDumpFieldNames[i]) + suffix);
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write field dump '" + path.string() + "'");
    write_field(f, grid, *fields[i]);
    if (!f) throw std::runtime_error("error writing field dump '" + path.string() + "'");
    out.push_back(std::move(path));
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

json noise_json(const NoiseSpec& n) { return {{"scale_E", n.scale_E}, {"scale_C", n.scale_C}}; }

json names_json(const MaterialLibrary& lib) {
  json names = json::array();
  for (const auto& m : lib.materials()) names.push_back(m.name);
  return names;
}

json counts_json(const ConfusionMatrix& cm) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < cm.counts.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < cm.counts.cols(); ++c) row.push_back(cm.counts(r, c));
    rows.push_back(row);
  }
  return rows;
}

json voxel_json(const VoxelIndex& v) { return json::array({v.ix, v.iy, v.iz}); }

}  // namespace

void write_confusion_csv(std::ostream& out, const ConfusionMatrix& cm, const MaterialLibrary& lib) {
  out << "truth";
  for (const auto& m : lib.materials()) out << ',' << csv_quote(m.name);
  out << ",rate\n";
  for (Eigen::Index r = 0; r < cm.counts.rows(); ++r) {
    out << csv_quote(lib[static_cast<std::size_t>(r)].name);
    for (Eigen::Index c = 0; c < cm.counts.cols(); ++c) out << ',' << cm.counts(r, c);
    out << ',' << json(cm.rate(static_cast<std::size_t>(r))).dump() << '\n';
  }
}

void write_confusion_json(std::ostream& out, const ConfusionMatrix& cm, const MaterialLibrary& lib,
                          const NoiseSpec& noise, std::uint64_t seed) {
  const Eigen::VectorXd rates = cm.rates();
  json j = {{"materials", names_json(lib)},
            {"trials_per_material", cm.trials_per_material},
            {"k_samples", cm.k_samples},
            {"noise", noise_json(noise)},
            {"seed", seed},
            {"counts", counts_json(cm)},
            {"rates", std::vector<double>(rates.begin(), rates.end())},
            {"mean_rate", cm.mean_rate()}};
  out << j.dump(2) << '\n';
}

void write_sweep_csv(std::ostream& out, const NoiseSweep& sweep) {
  out << "scale,k,accuracy\n";
  for (std::size_t s = 0; s < sweep.scales.size(); ++s) {
    for (std::size_t k = 0; k < sweep.k_list.size(); ++k) {
      out << json(sweep.scales[s]).dump() << ',' << sweep.k_list[k] << ','
          << json(sweep.accuracy(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(k))).dump()
          << '\n';
    }
  }
}

void write_sweep_json(std::ostream& out, const NoiseSweep& sweep, const MaterialLibrary& lib,
                      std::uint64_t seed) {
  json cells = json::array();
  std::size_t c = 0;
  for (std::size_t s = 0; s < sweep.scales.size(); ++s) {
    for (std::size_t k = 0; k < sweep.k_list.size(); ++k, ++c) {
      const auto& cm = sweep.cells[c];
      cells.push_back({{"scale", sweep.scales[s]},
                       {"k", sweep.k_list[k]},
                       {"accuracy", cm.mean_rate()},
                       {"counts", counts_json(cm)}});
    }
  }
  json j = {{"materials", names_json(lib)},
            {"trials_per_material", sweep.cells.empty() ? 0 : sweep.cells.front().trials_per_material},
            {"scales", sweep.scales},
            {"k", sweep.k_list},
            {"seed", seed},
            {"cells", cells}};
  out << j.dump(2) << '\n';
}

void write_trials_csv(std::ostream& out, const ExperimentReport& report) {
  out << "trial,seed,l,gamma_m,gamma_per_l_m,stop_reason,revisits,degenerate\n";
  for (std::size_t i = 0; i < report.trials.size(); ++i) {
    const auto& t = report.trials[i];
    out << i << ',' << t.seed << ',' << t.l << ',' << json(t.gamma).dump() << ','
        << json(t.gamma_per_l).dump() << ',' << to_string(t.stop_reason) << ',' << t.revisits
        << ',' << t.degenerate_count << '\n';
  }
}

void write_report_json(std::ostream& out, const ExperimentReport& r) {
  const auto& c = r.config;
  json trials = json::array();
  for (const auto& t : r.trials) {
    json visited = json::array();
    for (const auto& v : t.visited) visited.push_back(voxel_json(v));
    trials.push_back({{"seed", t.seed},
                      {"l", t.l},
                      {"gamma_m", t.gamma},
                      {"gamma_per_l_m", t.gamma_per_l},
                      {"stop_reason", to_string(t.stop_reason)},
                      {"revisits", t.revisits},
                      {"degenerate", t.degenerate_count},
                      {"visited", visited}});
  }
  const auto summary = [](const Summary& s) { return json{{"mean", s.mean}, {"std", s.std}}; };
  const auto& f = c.attention.factors;
  json j = {
      {"scenario", r.scenario},
      {"config",
       {{"max_iterations", c.max_iterations},
        {"noise", noise_json(c.noise)},
        {"seed", c.seed},
        {"inhibition", {{"alpha", c.attention.inhibition.alpha}, {"beta", c.attention.inhibition.beta}}},
        {"factors",
         {{"inhibition", {f.inhibition.alpha, f.inhibition.beta}},
          {"uncertainty", {f.uncertainty.alpha, f.uncertainty.beta}},
          {"saliency", {f.saliency.alpha, f.saliency.beta}}}},
        {"boundary", c.attention.boundary == BoundaryPolicy::kObservedMean ? "observed_mean" : "neutral"},
        {"closure",
         {{"enabled", c.closure.enabled},
          {"local_step", c.closure.local_step},
          {"min_run", c.closure.min_run},
          {"min_age", c.closure.min_age}}}}},
      {"seeds", r.seeds()},
      {"summary",
       {{"l", summary(r.l)},
        {"gamma_m", summary(r.gamma)},
        {"gamma_per_l_m", summary(r.gamma_per_l)},
        {"loop_closures", r.loop_closures}}},
      {"trials", trials}};
  out << j.dump(2) << '\n';
}

}  // namespace hapex
