#include "commands.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "refmargin/boosting.hpp"
#include "refmargin/error.hpp"
#include "refmargin/serialize.hpp"
#include "refmargin/staging.hpp"
#include "refmargin/synthetic.hpp"

namespace refmargin::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::string num(const std::optional<double>& v) { return v ? num(*v) : std::string("nan"); }

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  return out;
}

void write_json(const fs::path& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

Dataset load(const DataOptions& d) { return load_csv(d.path, d.label_column, d.positive_label); }

void check_features(const VotingClassifier& f, const Dataset& data, const std::string& what) {
  if (f.n_features() != data.n_features()) {
    throw Error(ErrorCode::FeatureMismatch, what + " has " + std::to_string(f.n_features()) +
                                                " features but the data has " + std::to_string(data.n_features()));
  }
}

void write_margins(const fs::path& path, const MarginProfile& profile) {
  auto out = open_out(path);
  out << "margin\n";
  for (double v : profile.sorted_margins()) out << num(v) << '\n';
}

void write_penalty(const fs::path& path, const PenaltyCurve& theta2, const PenaltyCurve& capital_n) {
  auto out = open_out(path);
  out << "p,theta,theta2_penalty,capital_N\n";
  for (std::size_t i = 0; i < theta2.points.size(); ++i) {
    const auto& a = theta2.points[i];
    out << num(a.p) << ',' << num(a.theta) << ',' << num(a.penalty) << ',' << num(capital_n.points[i].penalty)
        << '\n';
  }
}

void write_histogram(const fs::path& path, const Histogram& h) {
  auto out = open_out(path);
  out << "bin_left,bin_right,count\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    out << num(h.edges[i]) << ',' << num(h.edges[i + 1]) << ',' << h.counts[i] << '\n';
  }
}

json report_json(const Model& model, const Dataset& train, const Dataset& test, const Histogram& hist) {
  const auto& f = model.classifier;
  const auto r = table_report(f, train, test);
  const auto profile = margin_profile(f, train);
  json lemma2 = json::array();
  for (double p : {0.1, 0.25, 0.5}) {
    const double theta = theta_at_quantile(profile, p);
    if (!(theta > 0.0)) continue;
    const auto n = capital_N_full(f, train, theta);
    lemma2.push_back({{"p", p},
                      {"theta", theta},
                      {"value", n.value},
                      {"exponent", n.exponent_r},
                      {"delta_norm", n.delta_norm},
                      {"norm_term", n.norm_term},
                      {"floor_term", n.floor_term},
                      {"moment_term", n.moment_term}});
  }
  return {{"algo", to_string(model.raw.algo)},
          {"rounds_trained", model.raw.size()},
          {"weak_learner_stall", model.raw.weak_learner_stall},
          {"train_size", r.train_m},
          {"test_size", r.test_m},
          {"train_error", r.train_error},
          {"test_error", r.test_error},
          {"mean_margin", r.mean_margin},
          {"min_margin", profile.sorted_margins().front()},
          {"max_depth", r.max_depth},
          {"mean_depth", r.mean_depth},
          {"moment",
           {{"lg_m", {{"exponent", r.exponent_lg_m}, {"value", r.moment_lg_m}}},
            {"lg_16m", {{"exponent", r.exponent_lg_16m}, {"value", r.moment_lg_16m}}}}},
          {"histogram", {{"total", hist.total}, {"large_fraction", hist.large_fraction}}},
          {"lemma2_N", std::move(lemma2)}};
}

// margins.csv, penalty.csv, histogram.csv, report.json
std::vector<std::string> write_analysis(const fs::path& dir, const Model& model, const Dataset& train,
                                        const Dataset& test, std::size_t grid_size, std::size_t bins) {
  const auto& f = model.classifier;
  const auto profile = margin_profile(f, train);
  const auto grid = uniform_grid(grid_size);
  const double moment = moment_statistic(per_point_second_moments(f, train), bound_exponent(train.m()));
  const auto hist = prediction_histogram(f, train, uniform_edges(bins));

  write_margins(dir / "margins.csv", profile);
  write_penalty(dir / "penalty.csv", penalty_curve_theta2(profile, grid), penalty_curve_capital_n(profile, moment, grid));
  write_histogram(dir / "histogram.csv", hist);
  write_json(dir / "report.json", report_json(model, train, test, hist));
  return {"margins.csv", "penalty.csv", "histogram.csv", "report.json"};
}

void write_trace(const fs::path& path, const RawEnsemble& raw, const Dataset& train, const Dataset& test) {
  auto running_errors = [&raw](const Dataset& data) {
    std::vector<double> scores(data.m(), 0.0);
    std::vector<double> errors;
    for (std::size_t t = 0; t < raw.size(); ++t) {
      std::size_t wrong = 0;
      for (std::size_t i = 0; i < data.m(); ++i) {
        scores[i] += raw.coefficients[t] * raw.trees[t].predict(data.features(i));
        if (static_cast<double>(data.label(i)) * scores[i] <= 0.0) ++wrong;
      }
      errors.push_back(static_cast<double>(wrong) / static_cast<double>(data.m()));
    }
    return errors;
  };
  const auto train_err = running_errors(train);
  const auto test_err = running_errors(test);
  auto out = open_out(path);
  out << "round,train_error,test_error,loss\n";
  for (std::size_t t = 0; t < raw.size(); ++t) {
    out << t + 1 << ',' << num(train_err[t]) << ',' << num(test_err[t]) << ','
        << num(t < raw.loss_trace.size() ? raw.loss_trace[t] : std::nan("")) << '\n';
  }
}

void write_staged(const fs::path& path, const RawEnsemble& raw, const Dataset& train) {
  std::vector<std::size_t> stages;
  for (std::size_t t : {10, 20, 50}) {
    if (t < raw.size()) stages.push_back(t);
  }
  stages.push_back(raw.size());
  const auto profiles = staged_snapshots(raw, train, stages);
  auto out = open_out(path);
  out << "stage,margin\n";
  for (std::size_t s = 0; s < stages.size(); ++s) {
    for (double v : profiles[s].sorted_margins()) out << stages[s] << ',' << num(v) << '\n';
  }
}

json manifest_files(const fs::path& root, const std::vector<std::string>& files) {
  json j = json::object();
  for (const auto& f : files) j[f] = sha256_file(root / f);
  return j;
}

}  // namespace

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  std::array<char, 1 << 14> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest.data(), &len);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int{digest[i]};
  return hex.str();
}

std::vector<std::string> run_train(const TrainOptions& opts) {
  std::vector<Algo> algos;
  if (opts.algo == "both") {
    algos = {Algo::AdaBoost, Algo::GradientBoost};
  } else {
    algos = {algo_from_string(opts.algo)};
  }
  BoostConfig base;
  base.rounds = opts.rounds;
  base.learning_rate = opts.learning_rate;
  base.growth.max_leaves = opts.tree_size;
  base.growth.min_leaf = opts.min_leaf;
  base.seed = opts.seed;
  base.validate();
  if (opts.grid < 1) throw Error(ErrorCode::InvalidConfig, "grid must have at least one point");

  const auto data = load(opts.data);
  const auto [train, test] = split_train_test(data, {opts.split_seed, 0.5});

  fs::create_directories(opts.out);
  std::vector<std::string> files;
  write_csv(train, opts.out / "train.csv", opts.data.label_column);
  write_csv(test, opts.out / "test.csv", opts.data.label_column);
  files.insert(files.end(), {"train.csv", "test.csv"});

  for (auto algo : algos) {
    BoostConfig config = base;
    config.growth.mode = algo == Algo::AdaBoost ? GrowthMode::WeightedClassification : GrowthMode::GradientNewton;
    const std::string tag(to_string(algo));
    const fs::path dir = opts.out / tag;
    fs::create_directories(dir);

    auto model = make_model(train_model(algo, train, config), train.feature_names());
    save_model(model, dir / "model.json");
    files.push_back(tag + "/model.json");
    for (const auto& f : write_analysis(dir, model, train, test, opts.grid, opts.bins)) files.push_back(tag + "/" + f);
    write_trace(dir / "trace.csv", model.raw, train, test);
    write_staged(dir / "staged_margins.csv", model.raw, train);
    files.insert(files.end(), {tag + "/trace.csv", tag + "/staged_margins.csv"});
  }

  json manifest = {{"command", "train"},
                   {"config",
                    {{"data", opts.data.path.string()},
                     {"label_col", opts.data.label_column},
                     {"positive_label", opts.data.positive_label},
                     {"algo", opts.algo},
                     {"rounds", opts.rounds},
                     {"tree_size", opts.tree_size},
                     {"learning_rate", opts.learning_rate},
                     {"min_leaf", opts.min_leaf},
                     {"seed", opts.seed},
                     {"split_seed", opts.split_seed},
                     {"split_fraction", 0.5},
                     {"grid", opts.grid},
                     {"bins", opts.bins}}},
                   {"label_encoding", {{"column", opts.data.label_column}, {"positive", "1"}, {"negative", "-1"}}},
                   {"files", manifest_files(opts.out, files)}};
  write_json(opts.out / "manifest.json", manifest);
  files.push_back("manifest.json");
  return files;
}

std::vector<std::string> run_analyze(const AnalyzeOptions& opts) {
  const auto model = load_model(opts.model);
  const auto train = load(opts.train);
  const auto test = opts.test.path.empty() ? train : load(opts.test);
  check_features(model.classifier, train, "model");
  check_features(model.classifier, test, "model");
  fs::create_directories(opts.out);
  auto files = write_analysis(opts.out, model, train, test, opts.grid, opts.bins);
  json manifest = {{"command", "analyze"},
                   {"config",
                    {{"model", opts.model.string()},
                     {"data", opts.train.path.string()},
                     {"test_data", opts.test.path.string()},
                     {"grid", opts.grid},
                     {"bins", opts.bins}}},
                   {"files", manifest_files(opts.out, files)}};
  write_json(opts.out / "manifest.json", manifest);
  files.push_back("manifest.json");
  return files;
}

Comparison compare_classifiers(const VotingClassifier& a, const VotingClassifier& b, const Dataset& train,
                               std::span<const double> grid) {
  if (a.n_features() != b.n_features()) {
    throw Error(ErrorCode::FeatureMismatch, "models have " + std::to_string(a.n_features()) + " and " +
                                                std::to_string(b.n_features()) + " features");
  }
  check_features(a, train, "model a");
  Comparison c;
  const double r = bound_exponent(train.m());
  const auto profile_a = margin_profile(a, train);
  const auto profile_b = margin_profile(b, train);
  c.moment_a = moment_statistic(per_point_second_moments(a, train), r);
  c.moment_b = moment_statistic(per_point_second_moments(b, train), r);
  c.theta2_a = penalty_curve_theta2(profile_a, grid);
  c.theta2_b = penalty_curve_theta2(profile_b, grid);
  c.capital_n_a = penalty_curve_capital_n(profile_a, c.moment_a, grid);
  c.capital_n_b = penalty_curve_capital_n(profile_b, c.moment_b, grid);

  const auto summarize = [](const PenaltyCurve& x, const PenaltyCurve& y) {
    CurveComparison s;
    std::size_t a_lower = 0;
    std::size_t b_lower = 0;
    for (std::size_t i = 0; i < x.points.size(); ++i) {
      const auto& pa = x.points[i].penalty;
      const auto& pb = y.points[i].penalty;
      if (!pa || !pb) continue;
      ++s.defined;
      if (*pa < *pb) ++a_lower;
      if (*pb < *pa) ++b_lower;
    }
    if (s.defined > 0) {
      s.a_lower_fraction = static_cast<double>(a_lower) / static_cast<double>(s.defined);
      s.b_lower_fraction = static_cast<double>(b_lower) / static_cast<double>(s.defined);
    }
    return s;
  };
  c.theta2 = summarize(c.theta2_a, c.theta2_b);
  c.capital_n = summarize(c.capital_n_a, c.capital_n_b);
  return c;
}

std::vector<std::string> run_compare(const CompareOptions& opts) {
  const auto a = load_model(opts.model_a);
  const auto b = load_model(opts.model_b);
  const auto train = load(opts.train);
  if (opts.grid < 1) throw Error(ErrorCode::InvalidConfig, "grid must have at least one point");
  const auto grid = uniform_grid(opts.grid);
  const auto c = compare_classifiers(a.classifier, b.classifier, train, grid);

  fs::create_directories(opts.out);
  {
    auto out = open_out(opts.out / "penalty.csv");
    out << "model,p,theta,theta2_penalty,capital_N\n";
    const auto rows = [&out](const char* tag, const PenaltyCurve& t2, const PenaltyCurve& n) {
      for (std::size_t i = 0; i < t2.points.size(); ++i) {
        out << tag << ',' << num(t2.points[i].p) << ',' << num(t2.points[i].theta) << ',' << num(t2.points[i].penalty)
            << ',' << num(n.points[i].penalty) << '\n';
      }
    };
    rows("a", c.theta2_a, c.capital_n_a);
    rows("b", c.theta2_b, c.capital_n_b);
  }
  const auto curve_json = [](const CurveComparison& s) {
    return json{{"defined_points", s.defined},
                {"a_lower_fraction", s.a_lower_fraction},
                {"b_lower_fraction", s.b_lower_fraction}};
  };
  json comparison = {{"model_a", opts.model_a.string()},
                     {"model_b", opts.model_b.string()},
                     {"train_size", train.m()},
                     {"grid", opts.grid},
                     {"moment_exponent", bound_exponent(train.m())},
                     {"moment_a", c.moment_a},
                     {"moment_b", c.moment_b},
                     {"theta2", curve_json(c.theta2)},
                     {"capital_N", curve_json(c.capital_n)}};
  write_json(opts.out / "comparison.json", comparison);
  std::vector<std::string> files{"penalty.csv", "comparison.json"};
  json manifest = {{"command", "compare"},
                   {"config", {{"model_a", opts.model_a.string()}, {"model_b", opts.model_b.string()},
                               {"data", opts.train.path.string()}, {"grid", opts.grid}}},
                   {"files", manifest_files(opts.out, files)}};
  write_json(opts.out / "manifest.json", manifest);
  files.push_back("manifest.json");
  return files;
}

json lb_report(const LBParams& params) {
  const auto order = verify_order_stat_bound(params);  // throws ParamsOutOfRegime
  const auto pz = paley_zygmund_check(params, order.delta);
  const double per_bin = static_cast<double>(params.m) / static_cast<double>(params.u);
  const auto level = static_cast<std::size_t>(std::floor((1.0 - order.delta) * per_bin + 1e-9));
  const double exact_mean_b =
      static_cast<double>(params.u) * std::exp(log_binomial_cdf(params.m, 1.0 / static_cast<double>(params.u), level));

  json chernoff;
  const double lower = std::sqrt(3.0 / per_bin);
  if (order.delta >= lower) {
    const auto c = reverse_chernoff_check(params.m, params.u, order.delta);
    chernoff = {{"applicable", true}, {"delta", order.delta}, {"k", c.k},     {"lhs", c.lhs},
                {"log_lhs", c.log_lhs}, {"rhs", c.rhs},       {"log_rhs", c.log_rhs}, {"pass", c.pass}};
  } else {
    chernoff = {{"applicable", false},
                {"reason", "delta = " + num(order.delta) + " is below sqrt(3u/m) = " + num(lower) +
                               "; the reverse Chernoff bound does not cover this point"}};
  }

  json grid = json::array();
  bool grid_pass = true;
  for (double ratio : {12.0, 20.0, 50.0, 100.0}) {
    for (std::size_t u : {50, 100}) {
      const auto m = static_cast<std::size_t>(ratio) * u;
      const double lo = std::sqrt(3.0 / ratio);
      for (int s = 0; s < 5; ++s) {
        const double delta = lo + (0.5 - lo) * s / 4.0;
        const auto c = reverse_chernoff_check(m, u, delta);
        grid_pass = grid_pass && c.pass;
        grid.push_back({{"m", m}, {"u", u}, {"delta", delta}, {"log_lhs", c.log_lhs}, {"log_rhs", c.log_rhs},
                        {"pass", c.pass}});
      }
    }
  }

  return {{"params",
           {{"u", params.u}, {"d", params.d}, {"m", params.m}, {"trials", params.trials}, {"seed", params.seed}}},
          {"note",
           "The simulator takes (u, d, m) directly. The asymptotic parameter choices of the lower-bound "
           "construction (with their e^28 factor) are not instantiated; each probabilistic inequality the "
           "argument chains together is checked on its own."},
          {"delta", order.delta},
          {"threshold", order.threshold},
          {"low_bin_direction", "b_i <= (1 - delta) m / u"},
          {"order_statistic",
           {{"event", "smallest_d_sum <= (d m / u)(1 - delta)"},
            {"empirical_frequency", order.empirical_frequency},
            {"standard_error", order.standard_error},
            {"required_frequency", order.required_frequency},
            {"pass", order.pass}}},
          {"paley_zygmund",
           {{"mean_B", pz.mean_b},
            {"exact_mean_B", exact_mean_b},
            {"mean_B2", pz.mean_b2},
            {"lhs", pz.lhs},
            {"rhs_bound", pz.rhs_bound},
            {"standard_error", pz.standard_error},
            {"prob_B_at_least_d", pz.prob_b_at_least_d},
            {"second_moment_ok", pz.second_moment_ok},
            {"one_eighth_checked", pz.one_eighth_checked},
            {"pass", pz.pass}}},
          {"reverse_chernoff", chernoff},
          {"reverse_chernoff_grid", {{"pass", grid_pass}, {"points", grid}}}};
}

std::vector<std::string> run_lbsim(const LbsimOptions& opts) {
  const auto report = lb_report(opts.params);
  fs::create_directories(opts.out);
  write_json(opts.out / "lb_report.json", report);
  std::vector<std::string> files{"lb_report.json"};
  json manifest = {{"command", "lbsim"}, {"config", report["params"]}, {"files", manifest_files(opts.out, files)}};
  write_json(opts.out / "manifest.json", manifest);
  files.push_back("manifest.json");
  return files;
}

void run_synth(const SynthOptions& opts) {
  const auto data = synthetic_two_class(opts.n, opts.dim, opts.separation, opts.seed);
  if (opts.out.has_parent_path()) fs::create_directories(opts.out.parent_path());
  write_csv(data, opts.out, "label");
}

}  // namespace refmargin::cli
