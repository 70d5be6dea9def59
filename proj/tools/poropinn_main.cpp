#include <iostream>

#include <CLI11.hpp>

#include "poropinn/commands.hpp"

namespace cli = poropinn::cli;

namespace {

void add_common(CLI::App* sub, cli::CommonOptions& common) {
  sub->add_option("--config", common.config_path, "Config file (dotted key = value)");
  sub->add_option("--out", common.out_dir, "Output directory (overrides output.dir and POROPINN_OUT)");
  sub->add_option("--seed", common.seed, "Run seed (overrides the config's seed)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"poropinn: physics-informed network for 2D poroelasticity"};
  app.require_subcommand(1);

  cli::TrainOptions train;
  auto* train_cmd = app.add_subcommand("train", "Train a network and write log, checkpoint and echoed config");
  add_common(train_cmd, train.common);
  train_cmd->add_option("--mode", train.mode, "standard or curriculum")
      ->check(CLI::IsMember({"standard", "curriculum"}));
  train_cmd->add_flag("--gradcheck", train.gradcheck, "Finite-difference check of the first 3 Adam gradients");

  cli::EvalOptions eval;
  auto* eval_cmd = app.add_subcommand("eval", "Write slice, profile and error-norm files for a checkpoint");
  add_common(eval_cmd, eval.common);
  eval_cmd->add_option("--checkpoint", eval.checkpoint, "Checkpoint file")->required();
  eval_cmd->add_option("--slice-t", eval.slice_t, "Time of the spatial slice");
  eval_cmd->add_option("--profile-x", eval.profile_x, "x position of the depth profile");

  cli::GradcheckOptions grad;
  auto* grad_cmd = app.add_subcommand("gradcheck", "Finite-difference and manufactured-identity conformance");
  add_common(grad_cmd, grad.common);
  grad_cmd->add_option("--samples", grad.n_samples, "Number of derivative sample points");

  cli::DataOptions data;
  auto* data_cmd = app.add_subcommand("data", "Export training data and collocation points as CSV");
  add_common(data_cmd, data.common);
  data_cmd->add_option("--mode", data.mode, "standard or curriculum")
      ->check(CLI::IsMember({"standard", "curriculum"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? cli::kExitOk : cli::kExitUsage;
  }

  if (*train_cmd) return cli::cmd_train(train, std::cout, std::cerr);
  if (*eval_cmd) return cli::cmd_eval(eval, std::cout, std::cerr);
  if (*grad_cmd) return cli::cmd_gradcheck(grad, std::cout, std::cerr);
  return cli::cmd_data(data, std::cout, std::cerr);
}
