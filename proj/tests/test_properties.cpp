// Property checks over randomly generated inputs. Each generator is seeded so
// failures reproduce.

#include "doctest.h"

#include <cmath>
#include <cstring>
#include <random>

#include "hapex/bench.hpp"

using namespace hapex;

namespace {

struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

  MaterialLibrary library() {
    std::vector<MaterialParams> ms;
    const int n = integer(2, 8);
    for (int i = 0; i < n; ++i) {
      ms.push_back({"m" + std::to_string(i), uniform(-5, 20), uniform(0.05, 3), uniform(-5, 40),
                    uniform(0.05, 4)});
    }
    return MaterialLibrary(std::move(ms));
  }

  HapticSample sample(const MaterialLibrary& lib) {
    const auto& m = lib[static_cast<std::size_t>(integer(0, static_cast<int>(lib.size()) - 1))];
    return {m.mu_E + uniform(-4, 4) * m.sigma_E, m.mu_C + uniform(-4, 4) * m.sigma_C};
  }

  WorkspaceGrid grid() {
    const double e = 0.01;
    return make_grid({0, integer(1, 7) * e, 0, integer(1, 7) * e, 0, integer(1, 3) * e, e});
  }

  Field<bool> mask(std::size_t n, double p) {
    Field<bool> m(static_cast<Eigen::Index>(n));
    for (auto& b : m) b = coin(p);
    return m;
  }

  FieldXd field(std::size_t n) {
    FieldXd f(static_cast<Eigen::Index>(n));
    for (auto& x : f) x = uniform(0, 1);
    return f;
  }
};

FieldXd mirror(const WorkspaceGrid& g, const FieldXd& f, int axis) {
  FieldXd out(f.size());
  for (std::size_t i = 0; i < g.theta(); ++i) {
    auto v = g.voxel(i);
    if (axis == 0) v.ix = g.nx() - 1 - v.ix;
    if (axis == 1) v.iy = g.ny() - 1 - v.iy;
    if (axis == 2) v.iz = g.nz() - 1 - v.iz;
    out[static_cast<Eigen::Index>(g.linear(v))] = f[static_cast<Eigen::Index>(i)];
  }
  return out;
}

}  // namespace

TEST_CASE("posteriors stay normalised after every update") {
  Gen gen(1);
  for (int trial = 0; trial < 200; ++trial) {
    const auto lib = gen.library();
    auto post = MaterialPosterior::uniform(lib.size());
    for (int k = 0; k < 10; ++k) {
      post = update_posterior(lib, post, gen.sample(lib));
      CHECK(std::abs(post.probs.sum() - 1.0) <= 1e-9);
      CHECK((post.probs.array() >= 0.0).all());
    }
  }
}

TEST_CASE("sample order does not change the posterior") {
  Gen gen(2);
  for (int trial = 0; trial < 300; ++trial) {
    const auto lib = gen.library();
    const auto s1 = gen.sample(lib), s2 = gen.sample(lib);
    const auto prior = MaterialPosterior::uniform(lib.size());
    const auto ab = update_posterior(lib, update_posterior(lib, prior, s1), s2);
    const auto ba = update_posterior(lib, update_posterior(lib, prior, s2), s1);
    CHECK((ab.probs - ba.probs).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("mass on the true material grows with the number of samples") {
  const auto lib = load_library(HAPEX_DATA_DIR "/materials.txt");
  const int trials = 400;
  for (std::size_t j = 0; j < lib.size(); ++j) {
    Eigen::VectorXd mass = Eigen::VectorXd::Zero(5);
    Rng rng(77 + j);
    for (int t = 0; t < trials; ++t) {
      auto post = MaterialPosterior::uniform(lib.size());
      for (int k = 0; k < 5; ++k) {
        post = update_posterior(lib, post, synthesize_sample(lib, j, NoiseSpec::uniform(1.0), rng));
        mass[k] += post.probs[static_cast<Eigen::Index>(j)] / trials;
      }
    }
    for (int k = 1; k < 5; ++k) CHECK_MESSAGE(mass[k] >= mass[k - 1], lib[j].name << " k=" << k);
  }
}

TEST_CASE("attention fields stay in the unit interval") {
  Gen gen(3);
  for (int trial = 0; trial < 60; ++trial) {
    const auto lib = gen.library();
    const auto g = gen.grid();
    PerceptionMap map(lib.size(), g.theta());
    const int updates = gen.integer(0, 3 * static_cast<int>(g.theta()));
    for (int u = 0; u < updates; ++u) {
      map.integrate(lib, static_cast<std::size_t>(gen.integer(0, static_cast<int>(g.theta()) - 1)), gen.sample(lib));
    }
    const TaskSpec task{0, 1};
    const auto current = g.voxel(static_cast<std::size_t>(gen.integer(0, static_cast<int>(g.theta()) - 1)));
    for (auto policy : {BoundaryPolicy::kObservedMean, BoundaryPolicy::kNeutral}) {
      AttentionConfig cfg;
      cfg.boundary = policy;
      const auto st = compute_attention(g, map, task, current, cfg);
      for (const FieldXd* f : {&st.inhibition, &st.uncertainty, &st.omega, &st.saliency, &st.target_posterior}) {
        CHECK((*f >= 0.0).all());
        CHECK((*f <= 1.0).all());
      }
      CHECK(std::abs(st.target_posterior.sum() - 1.0) <= 1e-9);
    }
  }
}

TEST_CASE("constant omega gives exactly zero saliency") {
  Gen gen(4);
  for (int trial = 0; trial < 200; ++trial) {
    const auto g = gen.grid();
    const double c = trial % 10 == 0 ? 0.5 : gen.uniform(0, 1);
    const FieldXd om = FieldXd::Constant(static_cast<Eigen::Index>(g.theta()), c);
    CHECK((saliency_field(g, om) == 0.0).all());
    CHECK((saliency_field(g, om, gen.mask(g.theta(), 0.4)) == 0.0).all());
  }
  const auto g = make_grid({0, 0.05, 0, 0.05, 0, 0.01, 0.01});
  CHECK((saliency_field(g, FieldXd::Constant(25, 0.5), BoundaryPolicy::kNeutral) == 0.0).all());
}

TEST_CASE("mirroring omega mirrors saliency") {
  Gen gen(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = gen.grid();
    const FieldXd om = gen.field(g.theta());
    const Field<bool> all = Field<bool>::Constant(om.size(), true);
    for (int axis = 0; axis < 3; ++axis) {
      for (auto policy : {BoundaryPolicy::kObservedMean, BoundaryPolicy::kNeutral}) {
        const FieldXd a = mirror(g, saliency_field(g, om, all, policy), axis);
        const FieldXd b = saliency_field(g, mirror(g, om, axis), all, policy);
        CHECK((a - b).abs().maxCoeff() <= 1e-12);
      }
    }
  }
}

TEST_CASE("scaling the scores does not move the argmax") {
  Gen gen(6);
  for (int trial = 0; trial < 300; ++trial) {
    const auto g = gen.grid();
    const auto n = g.theta();
    const FieldXd scores = target_scores(gen.field(n), gen.field(n), gen.field(n));
    const VoxelIndex base = select_target(g, scores);
    CHECK(select_target(g, normalize_scores(scores).probs) == base);
    for (double c : {1e-12, 0.37, 3.0, 1e9}) CHECK(select_target(g, (scores * c).eval()) == base);
  }
}

TEST_CASE("fixed seeds reproduce every experiment bit for bit") {
  const auto lib = load_library(HAPEX_DATA_DIR "/materials.txt");
  const auto a = run_noise_sweep(lib, {1.0, 2.0}, 50, {1, 5}, 12);
  const auto b = run_noise_sweep(lib, {1.0, 2.0}, 50, {1, 5}, 12);
  for (std::size_t i = 0; i < a.cells.size(); ++i) CHECK(a.cells[i].counts == b.cells[i].counts);
  const auto scenario = generate_builtin_scenarios(lib)[2];
  TrialConfig cfg;
  cfg.seed = 5;
  cfg.noise = NoiseSpec::uniform(0.5);
  const auto r1 = run_trial(scenario, lib, cfg);
  const auto r2 = run_trial(scenario, lib, cfg);
  CHECK(r1.visited == r2.visited);
  CHECK(std::memcmp(&r1.gamma, &r2.gamma, sizeof(double)) == 0);
}
