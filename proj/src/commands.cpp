#include "poropinn/commands.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "poropinn/config.hpp"
#include "poropinn/errors.hpp"
#include "poropinn/eval_report.hpp"
#include "poropinn/random.hpp"
#include "poropinn/sampling.hpp"
#include "poropinn/training.hpp"

namespace poropinn::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kDefaultOutDir = "poropinn_out";

bool parse_mode(const std::string& mode) {
  if (mode == "standard") return false;
  if (mode == "curriculum") return true;
  throw UsageError("--mode must be standard or curriculum, got '" + mode + "'");
}

RunConfig resolve_config(const CommonOptions& opts) {
  RunConfig cfg = opts.config_path ? load_config(*opts.config_path) : RunConfig{};
  if (opts.seed) cfg.train.seed = *opts.seed;
  // --out > output.dir > $POROPINN_OUT > built-in default
  if (opts.out_dir) {
    cfg.output_dir = *opts.out_dir;
  } else if (cfg.output_dir.empty()) {
    const char* env = std::getenv(kOutputEnvVar);
    cfg.output_dir = (env && *env) ? env : kDefaultOutDir;
  }
  return cfg;
}

fs::path prepare_out_dir(const RunConfig& cfg) {
  const fs::path dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError(fmt::format("cannot create output directory '{}': {}", dir.string(), ec.message()));
  return dir;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write '" + path.string() + "'");
  return os;
}

// Maps the library's exception hierarchy onto the exit-code contract.
template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const CheckFailure& e) {
    fmt::print(err, "check failed: {}\n", e.what());
    return kExitCheckFailed;
  } catch (const NumericError& e) {
    fmt::print(err, "numeric failure: {}\n", e.what());
    return kExitNumeric;
  } catch (const Error& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitUsage;
  }
}

}  // namespace

int cmd_train(const TrainOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const bool curriculum = parse_mode(opts.mode);
    const RunConfig cfg = resolve_config(opts.common);
    validate(cfg, curriculum);
    TrainConfig tc = train_config_for(cfg, curriculum);
    if (opts.gradcheck) tc.gradcheck_steps = 3;

    const fs::path dir = prepare_out_dir(cfg);
    {
      auto echo = open_output(dir / kEchoFile);
      fmt::print(echo, "# mode={}\n", opts.mode);
      echo << echo_config(cfg);
    }

    auto log = open_output(dir / kLogFile);
    log << kLogCsvHeader << '\n' << std::flush;
    const LogObserver observer = [&log](const TrainingLogRecord& r) { log << format_log_row(r) << '\n' << std::flush; };

    const TrainResult result = curriculum ? train_curriculum(tc, observer) : train_standard(tc, observer);
    save_checkpoint(result.params, &result.adam, (dir / kCheckpointFile).string());

    const auto& last = result.log.empty() ? TrainingLogRecord{} : result.log.back();
    fmt::print(out, "trained {} epochs ({} mode, seed {}); final total loss {:.6g}\n", result.log.size(), opts.mode,
               tc.seed, last.losses.total);
    fmt::print(out, "outputs in {}\n", dir.string());
    return kExitOk;
  });
}

int cmd_eval(const EvalOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    RunConfig cfg = resolve_config(opts.common);
    if (opts.slice_t) cfg.slice_t = *opts.slice_t;
    if (opts.profile_x) cfg.profile_x = *opts.profile_x;
    validate(cfg, false);
    if (opts.checkpoint.empty()) throw UsageError("eval needs --checkpoint");

    const Checkpoint ckpt = load_checkpoint(opts.checkpoint);
    if (!(ckpt.params.spec() == cfg.train.net)) {
      const auto& a = ckpt.params.spec();
      const auto& b = cfg.train.net;
      throw ValidationError(fmt::format("checkpoint network ({} hidden layers x {} units) does not match config "
                                        "({} x {})",
                                        a.hidden_layers, a.hidden_units, b.hidden_layers, b.hidden_units));
    }

    const fs::path dir = prepare_out_dir(cfg);
    const auto& sp = cfg.train.solution;
    const FieldSlice slice = field_slice(ckpt.params, cfg.slice_t, cfg.slice_nx, cfg.slice_nz, sp);
    {
      auto os = open_output(dir / kSliceFile);
      write_slice_csv(os, slice);
    }
    const auto times = default_profile_times();
    {
      auto os = open_output(dir / kProfileFile);
      write_profile_csv(os, profile(ckpt.params, cfg.profile_x, times, cfg.profile_nz, sp));
    }
    const NormsEntry norms[] = {{"grid", error_norms(ckpt.params, cfg.train.grid, sp)},
                                {"t=" + format_coordinate(cfg.slice_t), slice_errors(slice)}};
    {
      auto os = open_output(dir / kNormsFile);
      write_norms(os, norms);
    }
    write_norms(out, norms);
    return kExitOk;
  });
}

int cmd_gradcheck(const GradcheckOptions& opts, std::ostream& out, std::ostream& err, const DerivEvaluator& eval) {
  return guarded(err, [&] {
    const RunConfig cfg = resolve_config(opts.common);
    validate(cfg, false);
    if (opts.n_samples == 0) throw UsageError("--samples must be positive");

    GradcheckPlan plan;
    plan.net = cfg.train.net;
    plan.solution = cfg.train.solution;
    plan.derivative_samples = opts.n_samples;
    plan.seed = cfg.train.seed;
    const GradcheckReport report = run_gradcheck(plan, eval);
    const GradcheckTolerances tol;

    struct Row {
      const char* name;
      const ErrorProbe& probe;
      double tol;
    };
    const Row rows[] = {{"jacobian", report.jacobian, tol.jacobian},
                        {"hessian", report.hessian, tol.hessian},
                        {"gradient", report.gradient, tol.gradient},
                        {"residual", report.residual, tol.residual}};
    bool ok = true;
    for (const auto& r : rows) {
      const bool pass = r.probe.worst <= r.tol;
      ok = ok && pass;
      fmt::print(out, "{:<9} worst {:.3e}  tol {:.0e}  compared {}  {}\n", r.name, r.probe.worst, r.tol,
                 r.probe.compared, pass ? "ok" : "FAIL");
      if (!pass) fmt::print(err, "{} tolerance exceeded at {}\n", r.name, r.probe.where);
    }
    return ok ? kExitOk : kExitCheckFailed;
  });
}

int cmd_data(const DataOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const bool curriculum = parse_mode(opts.mode);
    const RunConfig cfg = resolve_config(opts.common);
    validate(cfg, curriculum);
    const TrainConfig tc = train_config_for(cfg, curriculum);
    const fs::path dir = prepare_out_dir(cfg);

    auto dump_labeled = [&](const fs::path& path, const LabeledSet& set) {
      auto os = open_output(path);
      write_csv(os, set);
      fmt::print(out, "{}: {} points\n", path.string(), set.size());
    };
    auto dump_colloc = [&](const fs::path& path, const CollocationSet& set) {
      auto os = open_output(path);
      write_csv(os, set);
      fmt::print(out, "{}: {} points\n", path.string(), set.size());
    };

    if (!curriculum) {
      dump_labeled(dir / "ic.csv", extract_ic(tc.grid, tc.solution));
      dump_labeled(dir / "bc.csv", extract_bc(tc.grid, tc.solution));
      dump_colloc(dir / "collocation.csv",
                  lhs_sample(tc.colloc_total, Box::unit(), tc.seed + seed_offset::kCollocation, tc.lhs_jitter));
      return kExitOk;
    }
    const auto& cur = *tc.curriculum;
    const auto schedule =
        build_schedule(tc.grid, tc.solution, cur.n_intervals,
                       tc.colloc_total / static_cast<std::size_t>(cur.n_intervals), cur.mode,
                       tc.seed + seed_offset::kCollocation, {cur.ic_subsample, tc.lhs_jitter});
    for (int i = 0; i < cur.n_intervals; ++i) {
      dump_labeled(dir / fmt::format("stage{:02d}_data.csv", i), schedule.stage_data(i));
      dump_colloc(dir / fmt::format("stage{:02d}_collocation.csv", i), schedule.stage_colloc(i));
    }
    return kExitOk;
  });
}

}  // namespace poropinn::cli
