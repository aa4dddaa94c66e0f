// One PASS/FAIL line per acceptance criterion. Exit status is nonzero when
// any criterion fails.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "refmargin/boosting.hpp"
#include "refmargin/bounds.hpp"
#include "refmargin/ensemble.hpp"
#include "refmargin/lowerbound.hpp"
#include "refmargin/staging.hpp"
#include "refmargin/synthetic.hpp"
#include "support.hpp"

using namespace refmargin;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---------------------------------------------------------------------------

Outcome sparse_vote() {
  double worst_margin = 0.0;
  double worst_sq = 0.0;
  double worst_moment = 0.0;
  bool n_exact = true;
  for (double theta : {0.01, 0.05, 0.1, 0.25}) {
    const auto sv = synthetic_sparse_vote(theta, 1000);
    const double target = theta * (1 - theta);
    for (double mg : margins(sv.classifier, sv.data)) worst_margin = std::max(worst_margin, std::abs(mg - theta));
    const auto sq = per_point_second_moments(sv.classifier, sv.data);
    for (double v : sq) worst_sq = std::max(worst_sq, std::abs(v - target));
    for (double r : {2.0, 3.0, std::log2(1000.0), bound_exponent(1000), 40.0, 200.0}) {
      const double mom = moment_statistic(sq, r);
      worst_moment = std::max(worst_moment, std::abs(mom - target));
      n_exact = n_exact && capital_N(mom, theta) == 1.0 / theta;
    }
  }
  return {worst_margin <= 1e-12 && worst_sq <= 1e-12 && worst_moment <= 1e-12 && n_exact,
          fmt("max |margin-theta| %.2e, max |E[D^2]-theta(1-theta)| %.2e, max moment err %.2e, N == 1/theta: %s",
              worst_margin, worst_sq, worst_moment, n_exact ? "yes" : "no")};
}

struct RandomCase {
  VotingClassifier f;
  Dataset data;
};

std::vector<RandomCase> random_cases() {
  Rng rng(20240917);
  std::vector<RandomCase> cases;
  cases.reserve(1000);
  for (int i = 0; i < 1000; ++i) {
    const auto dim = 1 + rng.uniform_index(5);
    auto raw = testing::random_raw_ensemble(rng, dim, 1 + rng.uniform_index(40));
    auto data = testing::random_dataset(rng, 5 + rng.uniform_index(60), dim);
    cases.push_back({normalize(raw), std::move(data)});
  }
  return cases;
}

Outcome variance_identity(const std::vector<RandomCase>& cases) {
  double worst = 0.0;
  std::size_t points = 0;
  for (const auto& c : cases) {
    for (std::size_t i = 0; i < c.data.m(); ++i) {
      const auto x = c.data.features(i);
      const auto outs = c.f.hypothesis_outputs(x);
      double eh = 0.0;
      double eh2 = 0.0;
      for (std::size_t h = 0; h < outs.size(); ++h) {
        eh += c.f.weights()[h] * outs[h];
        eh2 += c.f.weights()[h] * outs[h] * outs[h];
      }
      worst = std::max(worst, std::abs(delta_second_moment(c.f, x) - (eh2 - eh * eh)));
      ++points;
    }
  }
  return {worst <= 1e-10, fmt("%zu ensembles, %zu points, max deviation %.2e", cases.size(), points, worst)};
}

Outcome never_worse(const std::vector<RandomCase>& cases) {
  std::size_t checks = 0;
  std::size_t violations = 0;
  double max_moment = 0.0;
  const auto grid = uniform_grid(100);
  for (const auto& c : cases) {
    const double mom = moment_statistic(per_point_second_moments(c.f, c.data), bound_exponent(c.data.m()));
    max_moment = std::max(max_moment, mom);
    if (!(mom <= 4.0)) ++violations;
    for (double p : grid) {
      const double theta = p;  // theta over (0,1]
      const double n = capital_N(mom, theta);
      ++checks;
      if (!(n <= 4.0 / (theta * theta)) || !(n >= 1.0 / theta)) ++violations;
    }
  }
  // Envelope endpoints: moment at its extremes 0 and 4.
  for (double mom : {0.0, 4.0}) {
    for (double theta : grid) {
      const double n = capital_N(mom, theta);
      ++checks;
      if (!(n <= 4.0 / (theta * theta)) || !(n >= 1.0 / theta)) ++violations;
    }
  }
  return {violations == 0, fmt("%zu (ensemble, theta) checks, %zu violations, max moment %.4f", checks, violations,
                               max_moment)};
}

// ---------------------------------------------------------------------------

BoostConfig diabetes_config(Algo algo, int leaves, std::uint64_t seed) {
  BoostConfig cfg;
  cfg.rounds = 200;
  cfg.learning_rate = 0.1;
  cfg.growth.max_leaves = leaves;
  cfg.growth.min_leaf = 20;
  cfg.growth.mode = algo == Algo::AdaBoost ? GrowthMode::WeightedClassification : GrowthMode::GradientNewton;
  cfg.seed = seed;
  return cfg;
}

Outcome plus_minus_identity() {
  double worst = 0.0;
  bool bound_ok = true;
  int runs = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    for (int leaves : {2, 5}) {
      const auto [train, test] = split_train_test(synthetic_two_class(768, 8, 1.5, seed), {seed, 0.5});
      const auto f = normalize(train_adaboost(train, diabetes_config(Algo::AdaBoost, leaves, seed)));
      const auto sq = per_point_second_moments(f, train);
      double max_margin_sq = 0.0;
      for (std::size_t i = 0; i < train.m(); ++i) {
        const double fx = score(f, train.features(i));
        worst = std::max(worst, std::abs(sq[i] - (1.0 - fx * fx)));
        max_margin_sq = std::max(max_margin_sq, fx * fx);
      }
      const double mom = moment_statistic(sq, std::log2(static_cast<double>(train.m())));
      bound_ok = bound_ok && mom >= 1.0 - max_margin_sq;
      ++runs;
    }
  }
  return {worst <= 1e-10 && bound_ok,
          fmt("%d AdaBoost runs, max |E[D^2]-(1-f^2)| %.2e, moment >= 1 - max margin^2: %s", runs, worst,
              bound_ok ? "yes" : "no")};
}

Outcome diabetes_scale() {
  constexpr int kSeeds = 20;
  std::string detail;
  bool pass = true;
  for (int leaves : {5, 2}) {
    double ada_test = 0.0;
    double gbm_test = 0.0;
    double ada_moment = 0.0;
    double gbm_moment = 0.0;
    double ada_moment16 = 0.0;
    double gbm_moment16 = 0.0;
    double ada_train = 0.0;
    int ada_zero = 0;
    for (int s = 1; s <= kSeeds; ++s) {
      const auto seed = static_cast<std::uint64_t>(s);
      const auto [train, test] = split_train_test(synthetic_two_class(768, 8, 1.5, seed), {seed, 0.5});
      const auto ada = table_report(normalize(train_adaboost(train, diabetes_config(Algo::AdaBoost, leaves, seed))),
                                    train, test);
      const auto gbm = table_report(
          normalize(train_gradient_booster(train, diabetes_config(Algo::GradientBoost, leaves, seed))), train, test);
      ada_test += ada.test_error / kSeeds;
      gbm_test += gbm.test_error / kSeeds;
      ada_moment += ada.moment_lg_m / kSeeds;
      gbm_moment += gbm.moment_lg_m / kSeeds;
      ada_moment16 += ada.moment_lg_16m / kSeeds;
      gbm_moment16 += gbm.moment_lg_16m / kSeeds;
      ada_train += ada.train_error / kSeeds;
      if (ada.train_error == 0.0) ++ada_zero;
    }
    const bool zero_ok = leaves != 5 || ada_zero >= kSeeds - 3;
    const bool ok = zero_ok && ada_moment >= 0.9 && ada_moment16 >= 0.9 && gbm_moment <= 0.5 && gbm_moment16 <= 0.5 &&
                    std::abs(gbm_test - ada_test) <= 0.05;
    pass = pass && ok;
    detail += fmt("[%s: ada train %.3f (zero in %d/%d), ada test %.3f, gbm test %.3f, moment lg m ada %.3f gbm %.3f, "
                  "lg 16m ada %.3f gbm %.3f] ",
                  leaves == 2 ? "stumps" : "5 leaves", ada_train, ada_zero, kSeeds, ada_test, gbm_test, ada_moment,
                  gbm_moment, ada_moment16, gbm_moment16);
  }
  return {pass, detail};
}

// ---------------------------------------------------------------------------

Outcome moment_monotone() {
  Rng rng(6);
  std::size_t checks = 0;
  std::size_t violations = 0;
  std::size_t strict_drops = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<double> v(1 + rng.uniform_index(200));
    const double hi = testing::uniform(rng, 0.0, 4.0);
    for (auto& x : v) x = rng.uniform_index(4) == 0 ? hi : testing::uniform(rng, 0.0, hi);
    std::vector<double> rs{2.0};
    while (rs.back() < 200.0) rs.push_back(rs.back() + testing::uniform(rng, 0.01, 10.0));
    double prev = moment_statistic(v, rs[0]);
    for (std::size_t k = 1; k < rs.size(); ++k) {
      const double cur = moment_statistic(v, rs[k]);
      ++checks;
      if (cur < prev) ++strict_drops;
      // A drop larger than a few ulps would be a real violation.
      if (cur < prev * (1.0 - 1e-13)) ++violations;
      prev = cur;
    }
  }
  return {violations == 0,
          fmt("%zu (sequence, r) steps, %zu violations, %zu sub-1e-13 rounding dips", checks, violations, strict_drops)};
}

std::uint64_t brute_smallest(const std::vector<std::uint32_t>& counts, std::size_t d) {
  std::uint64_t best = UINT64_MAX;
  for (std::uint32_t mask = 0; mask < (1u << counts.size()); ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) != d) continue;
    std::uint64_t s = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      if (mask & (1u << i)) s += counts[i];
    }
    best = std::min(best, s);
  }
  return best;
}

Outcome lower_bound_kernels() {
  // (a) reverse Chernoff on the full valid grid
  std::size_t grid_points = 0;
  bool chernoff = true;
  for (std::size_t ratio : {12, 20, 50, 100}) {
    for (std::size_t u : {50, 100}) {
      const auto m = ratio * u;
      const double lo = std::sqrt(3.0 * static_cast<double>(u) / static_cast<double>(m));
      for (int s = 0; s < 5; ++s) {
        chernoff = chernoff && reverse_chernoff_check(m, u, lo + (0.5 - lo) * s / 4.0).pass;
        ++grid_points;
      }
    }
  }
  // (b) order-statistic frequency
  LBParams params;
  params.threads = 0;
  const auto order = verify_order_stat_bound(params);
  // (c) Paley-Zygmund
  const auto pz = paley_zygmund_check(params, order.delta);
  // (d) brute-force subset enumeration
  Rng rng(31);
  std::size_t mismatches = 0;
  for (int trial = 0; trial < 5000; ++trial) {
    const auto u = 1 + rng.uniform_index(8);
    const auto d = 1 + rng.uniform_index(u);
    std::vector<std::uint32_t> counts(u);
    for (auto& c : counts) c = static_cast<std::uint32_t>(rng.uniform_index(12));
    if (smallest_sum(counts, d) != brute_smallest(counts, d)) ++mismatches;
  }
  const bool pass = chernoff && order.pass && pz.pass && mismatches == 0;
  return {pass, fmt("(a) Chernoff grid %zu/%zu %s; (b) freq %.4f >= 0.02 (se %.4f); (c) Pr[B>=E[B]/2] %.4f vs "
                    "rhs %.4f, E[B] %.2f, Pr[B>=d] %.4f, 1/8 checked: %s; (d) %zu mismatches in 5000",
                    grid_points, grid_points, chernoff ? "pass" : "FAIL", order.empirical_frequency,
                    order.standard_error, pz.lhs, pz.rhs_bound, pz.mean_b, pz.prob_b_at_least_d,
                    pz.one_eighth_checked ? "yes" : "no", mismatches)};
}

Outcome net_bound() {
  struct Row {
    std::size_t m;
    double lg_h, delta;
    std::size_t n;
    double loss, gen, approx;
  };
  // Arbitrary-precision closed-form values.
  static constexpr Row rows[] = {
      {100, 1.0, 0.5, 1, 0.0, 0.27725887222397812377, 0.33271064666877374852},
      {100, 4.0, 0.05, 10, 0.0, 3.0810513852082028317, 3.1365031596529984564},
      {100, 12.5, 0.01, 37, 0.1, 29.260066396724604429, 26.996650063054374684},
      {100, 30.0, 1e-06, 250, 0.37, 435.96900271384825019, 418.43024207318398397},
      {100, 64.0, 0.001, 5000, 0.9, 17925.951405157816389, 17747.275504668548407},
      {1000, 1.0, 0.5, 1, 0.0, 0.027725887222397812377, 0.033271064666877374852},
      {1000, 4.0, 0.05, 10, 0.0, 0.30810513852082028317, 0.31365031596529984564},
      {1000, 12.5, 0.01, 37, 0.1, 3.4274103103778637959, 2.6996650063054374684},
      {1000, 30.0, 1e-06, 250, 0.37, 47.401257516729572283, 41.843024207318398397},
      {1000, 64.0, 0.001, 5000, 0.9, 1831.2418215329327622, 1774.7275504668548407},
      {50000, 1.0, 0.5, 1, 0.0, 0.00055451774444795624753, 0.00066542129333754749704},
      {50000, 4.0, 0.05, 10, 0.0, 0.0061621027704164056634, 0.0062730063193059969129},
      {50000, 12.5, 0.01, 37, 0.1, 0.1575853309892497271, 0.053993300126108749369},
      {50000, 30.0, 1e-06, 250, 0.37, 1.6235866800125705816, 0.83686048414636796794},
      {50000, 64.0, 0.001, 5000, 0.9, 43.487549173230661014, 35.494551009337096814},
      {10000000, 1.0, 0.5, 1, 0.0, 2.7725887222397812377e-6, 3.3271064666877374852e-6},
      {10000000, 4.0, 0.05, 10, 0.0, 0.000030810513852082028317, 0.000031365031596529984564},
      {10000000, 12.5, 0.01, 37, 0.1, 0.0076023167980551546896, 0.00026996650063054374684},
      {10000000, 30.0, 1e-06, 250, 0.37, 0.059821532771543926365, 0.0041843024207318398397},
      {10000000, 64.0, 0.001, 5000, 0.9, 0.74267036296416504731, 0.17747275504668548407},
  };
  double worst = 0.0;
  for (const auto& r : rows) {
    const auto nb = net_bound_explicit({r.m, r.lg_h, r.delta, r.n, r.loss});
    worst = std::max({worst, std::abs(nb.generalization_term - r.gen) / r.gen,
                      std::abs(nb.approx_term - r.approx) / r.approx});
  }
  return {worst <= 1e-9, fmt("20 grid points, max relative error %.2e", worst)};
}

Outcome staged_dilution() {
  std::vector<Sample> rows{{{0.0}, 1}};
  const Dataset point(rows, {"x"});
  std::size_t exact = 0;
  double worst_other = 0.0;
  for (double alpha : {1.0, 0.37}) {
    RawEnsemble raw;
    raw.trees.push_back(Tree::leaf(1.0, 1));
    raw.coefficients.push_back(alpha);
    for (int t = 1; t < 50; ++t) {
      raw.trees.push_back(Tree::leaf(0.0, 1));
      raw.coefficients.push_back(alpha);
    }
    std::vector<std::size_t> stages(50);
    for (std::size_t t = 0; t < 50; ++t) stages[t] = t + 1;
    const auto snaps = staged_snapshots(raw, point, stages);
    for (std::size_t t = 1; t <= 50; ++t) {
      const double mg = snaps[t - 1].sorted_margins()[0];
      const double want = 1.0 / static_cast<double>(t);
      if (alpha == 1.0) {
        if (mg == want) ++exact;
      } else {
        worst_other = std::max(worst_other, std::abs(mg - want));
      }
    }
  }
  return {exact == 50 && worst_other <= 1e-15,
          fmt("alpha = 1: %zu/50 stages exactly 1/t; alpha = 0.37: max error %.1e", exact, worst_other)};
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  const auto root = fs::temp_directory_path() / "refmargin_acceptance";
  fs::remove_all(root);
  fs::create_directories(root);
  cli::SynthOptions synth;
  synth.out = root / "diabetes_like.csv";
  cli::run_synth(synth);

  auto train_opts = [&](const char* dir) {
    cli::TrainOptions t;
    t.data.path = synth.out;
    t.seed = 7;
    t.split_seed = 7;
    t.out = root / dir;
    return t;
  };
  cli::run_train(train_opts("run1"));
  cli::run_train(train_opts("run2"));
  std::size_t same = 0;
  std::size_t compared = 0;
  for (const char* f : {"ada/margins.csv", "ada/penalty.csv", "gbm/margins.csv", "gbm/penalty.csv"}) {
    ++compared;
    const auto a = slurp(root / "run1" / f);
    if (!a.empty() && a == slurp(root / "run2" / f)) ++same;
  }
  cli::LbsimOptions lb;
  lb.params.trials = 2000;
  lb.params.seed = 11;
  lb.params.threads = 1;
  lb.out = root / "lb1";
  cli::run_lbsim(lb);
  lb.params.threads = 4;
  lb.out = root / "lb4";
  cli::run_lbsim(lb);
  const bool lb_same = slurp(root / "lb1" / "lb_report.json") == slurp(root / "lb4" / "lb_report.json");
  return {same == compared && lb_same,
          fmt("%zu/%zu margins/penalty files byte-identical across runs; lb_report threads 1 vs 4 identical: %s", same,
              compared, lb_same ? "yes" : "no")};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<Outcome()> run;
  };
  std::vector<RandomCase> cases;
  const std::vector<Criterion> criteria{
      {1, "sparse-vote construction", 1.0, sparse_vote},
      {2, "variance identity",
       10.0,
       [&] {
         cases = random_cases();
         return variance_identity(cases);
       }},
      {3, "never-worse envelope", 10.0, [&] { return never_worse(cases); }},
      {4, "+-1 learner identity", 60.0, plus_minus_identity},
      {5, "diabetes-scale reproduction", 120.0, diabetes_scale},
      {6, "moment monotone in r", 30.0, moment_monotone},
      {7, "lower-bound kernels", 60.0, lower_bound_kernels},
      {8, "net bound vs arbitrary precision", 1.0, net_bound},
      {9, "staged dilution 1/t", 1.0, staged_dilution},
      {10, "determinism", 120.0, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.budget_seconds;
    const bool pass = out.pass && in_time;
    if (!pass) ++failures;
    std::printf("%s criterion %d (%s): %s; %.2fs of %.0fs budget%s\n", pass ? "PASS" : "FAIL", c.id, c.name,
                out.detail.c_str(), secs, c.budget_seconds, in_time ? "" : " EXCEEDED");
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
