#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "refmargin/error.hpp"

namespace {

void add_data_flags(CLI::App* cmd, refmargin::cli::DataOptions& d, const std::string& flag = "--data") {
  cmd->add_option(flag, d.path, "CSV file with a header row")->required()->check(CLI::ExistingFile);
  cmd->add_option("--label-col", d.label_column, "Name of the label column")->capture_default_str();
  cmd->add_option("--positive-label", d.positive_label, "Label value mapped to +1")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  using namespace refmargin::cli;
  CLI::App app{"Boosting margin diagnostics: train AdaBoost and gradient boosters, compute margin and moment "
               "penalties, and run the lower-bound kernel simulator."};
  app.require_subcommand(1);

  TrainOptions train;
  auto* train_cmd = app.add_subcommand("train", "Train ensembles on a 50/50 split and write all artifacts");
  add_data_flags(train_cmd, train.data);
  train_cmd->add_option("--algo", train.algo, "ada, gbm or both")
      ->check(CLI::IsMember({"ada", "gbm", "both"}))
      ->capture_default_str();
  train_cmd->add_option("--rounds", train.rounds, "Boosting rounds")->capture_default_str();
  train_cmd->add_option("--tree-size", train.tree_size, "Maximum leaves per tree (2 = stumps)")->capture_default_str();
  train_cmd->add_option("--learning-rate", train.learning_rate, "Gradient booster learning rate")->capture_default_str();
  train_cmd->add_option("--min-leaf", train.min_leaf, "Minimum training rows per leaf")->capture_default_str();
  train_cmd->add_option("--seed", train.seed, "Training seed")->capture_default_str();
  train_cmd->add_option("--split-seed", train.split_seed, "Train/test split seed")->capture_default_str();
  train_cmd->add_option("--grid", train.grid, "Number of quantile grid points")->capture_default_str();
  train_cmd->add_option("--bins", train.bins, "Prediction histogram bins")->capture_default_str();
  train_cmd->add_option("--out", train.out, "Output directory")->required();

  AnalyzeOptions analyze;
  auto* analyze_cmd = app.add_subcommand("analyze", "Margin, penalty and histogram artifacts for a saved model");
  analyze_cmd->add_option("--model", analyze.model, "model.json")->required()->check(CLI::ExistingFile);
  add_data_flags(analyze_cmd, analyze.train);
  analyze_cmd->add_option("--test-data", analyze.test.path, "Held-out CSV (defaults to --data)")
      ->check(CLI::ExistingFile);
  analyze_cmd->add_option("--grid", analyze.grid, "Number of quantile grid points")->capture_default_str();
  analyze_cmd->add_option("--bins", analyze.bins, "Prediction histogram bins")->capture_default_str();
  analyze_cmd->add_option("--out", analyze.out, "Output directory")->required();

  CompareOptions compare;
  auto* compare_cmd = app.add_subcommand("compare", "Penalty curves of two models on a shared quantile grid");
  compare_cmd->add_option("--model-a", compare.model_a, "First model.json")->required()->check(CLI::ExistingFile);
  compare_cmd->add_option("--model-b", compare.model_b, "Second model.json")->required()->check(CLI::ExistingFile);
  add_data_flags(compare_cmd, compare.train);
  compare_cmd->add_option("--grid", compare.grid, "Number of quantile grid points")->capture_default_str();
  compare_cmd->add_option("--out", compare.out, "Output directory")->required();

  LbsimOptions lbsim;
  auto* lbsim_cmd = app.add_subcommand("lbsim", "Monte-Carlo and exact checks of the lower-bound kernels");
  lbsim_cmd->add_option("--u", lbsim.params.u, "Number of bins")->capture_default_str();
  lbsim_cmd->add_option("--d", lbsim.params.d, "Subset size")->capture_default_str();
  lbsim_cmd->add_option("--m", lbsim.params.m, "Samples per trial")->capture_default_str();
  lbsim_cmd->add_option("--trials", lbsim.params.trials, "Monte-Carlo trials")->capture_default_str();
  lbsim_cmd->add_option("--seed", lbsim.params.seed, "Seed")->capture_default_str();
  lbsim_cmd->add_option("--threads", lbsim.params.threads, "Worker threads (0 = all cores)")->capture_default_str();
  lbsim_cmd->add_option("--out", lbsim.out, "Output directory")->required();

  SynthOptions synth;
  auto* synth_cmd = app.add_subcommand("synth", "Write a two-Gaussian synthetic data set as CSV");
  synth_cmd->add_option("--n", synth.n, "Rows")->capture_default_str();
  synth_cmd->add_option("--dim", synth.dim, "Features")->capture_default_str();
  synth_cmd->add_option("--separation", synth.separation, "Distance between class means")->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed, "Seed")->capture_default_str();
  synth_cmd->add_option("--out", synth.out, "Output CSV path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    std::vector<std::string> files;
    std::filesystem::path out;
    if (*train_cmd) {
      files = run_train(train);
      out = train.out;
    } else if (*analyze_cmd) {
      files = run_analyze(analyze);
      out = analyze.out;
    } else if (*compare_cmd) {
      files = run_compare(compare);
      out = compare.out;
    } else if (*lbsim_cmd) {
      files = run_lbsim(lbsim);
      out = lbsim.out;
    } else if (*synth_cmd) {
      run_synth(synth);
      std::cout << "wrote " << synth.out.string() << '\n';
      return 0;
    }
    for (const auto& f : files) std::cout << "wrote " << (out / f).string() << '\n';
  } catch (const refmargin::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
