#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pse/fixtures.hpp"
#include "pse/runner.hpp"

namespace {

struct CommonFlags {
  std::string config_file;
  std::string preset;
  std::string frame;
  bool frame_set = false;
  bool preset_set = false;
};

void add_eval_flags(CLI::App* cmd, pse::RunConfig& config, CommonFlags& flags) {
  cmd->add_option("--gt", config.gt_manifest, "ground-truth manifest (JSON)")
      ->required();
  cmd->add_option("--pred", config.pred_manifest, "predictions manifest (JSON)")
      ->required();
  cmd->add_option("--out", config.out_dir, "output directory")->required();
  cmd->add_option("--config", flags.config_file, "key=value config file");
  cmd->add_option("--preset", flags.preset, "threshold preset (real275-suite)");
  cmd->add_option("--frame", flags.frame, "metric frame: world or object");
  cmd->add_option("--samples", config.n_samples, "surface samples per shape");
  cmd->add_option("--seed", config.seed, "base RNG seed");
  cmd->add_option("--delta", config.fscore_delta_m, "F-score distance threshold (m)");
  cmd->add_option("--azimuth-steps", config.azimuth_steps,
                  "grid size for the symmetric IoU search");
}

void resolve_eval_flags(const CLI::App* cmd, pse::RunConfig& config,
                        const CommonFlags& flags) {
  // Config file first, explicit flags win.
  if (cmd->count("--config")) {
    pse::RunConfig from_file;
    pse::apply_config_file(flags.config_file, from_file);
    const pse::RunConfig defaults;
    if (from_file.seed != defaults.seed && !cmd->count("--seed"))
      config.seed = from_file.seed;
    if (from_file.n_samples != defaults.n_samples && !cmd->count("--samples"))
      config.n_samples = from_file.n_samples;
    if (from_file.frame != defaults.frame && !cmd->count("--frame"))
      config.frame = from_file.frame;
    if (from_file.fscore_delta_m != defaults.fscore_delta_m && !cmd->count("--delta"))
      config.fscore_delta_m = from_file.fscore_delta_m;
    if (from_file.azimuth_steps != defaults.azimuth_steps &&
        !cmd->count("--azimuth-steps"))
      config.azimuth_steps = from_file.azimuth_steps;
    if (!from_file.thresholds.empty() && !cmd->count("--preset"))
      config.thresholds = from_file.thresholds;
  }
  if (cmd->count("--frame")) config.frame = pse::parse_frame(flags.frame);
  if (cmd->count("--preset")) {
    if (flags.preset != "real275-suite") {
      throw std::invalid_argument("unknown preset '" + flags.preset + "'");
    }
    config.thresholds = pse::real275_suite();
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pose and shape estimation evaluation toolkit"};
  app.require_subcommand(1);

  pse::RunConfig eval_config;
  CommonFlags eval_flags;
  CLI::App* cmd_evaluate =
      app.add_subcommand("evaluate", "score predictions and write precision reports");
  add_eval_flags(cmd_evaluate, eval_config, eval_flags);

  pse::RunConfig sweep_config;
  CommonFlags sweep_flags;
  std::string sweep_axis = "rotation";
  double sweep_min = -1.0, sweep_max = -1.0;
  int sweep_steps = 0;
  CLI::App* cmd_sweep =
      app.add_subcommand("sweep", "precision as a function of one threshold");
  add_eval_flags(cmd_sweep, sweep_config, sweep_flags);
  cmd_sweep->add_option("--axis", sweep_axis, "rotation, translation, or fscore")
      ->required();
  cmd_sweep->add_option("--min", sweep_min, "lowest threshold");
  cmd_sweep->add_option("--max", sweep_max, "highest threshold");
  cmd_sweep->add_option("--steps", sweep_steps, "number of grid points");

  std::string conv_gt, conv_pred, conv_out = "convergence.csv";
  std::vector<std::int64_t> conv_counts = {100, 500, 1000, 5000, 10000, 100000};
  double conv_delta = 0.01;
  std::uint64_t conv_seed = 0;
  CLI::App* cmd_convergence = app.add_subcommand(
      "convergence", "chamfer/F-score versus surface sample count");
  cmd_convergence->add_option("--gt-mesh", conv_gt, "reference mesh (OBJ)")->required();
  cmd_convergence->add_option("--pred-mesh", conv_pred,
                              "compared mesh (OBJ, default: the reference)");
  cmd_convergence->add_option("--counts", conv_counts, "sample counts")
      ->delimiter(',');
  cmd_convergence->add_option("--delta", conv_delta, "F-score threshold (m)");
  cmd_convergence->add_option("--seed", conv_seed, "base RNG seed");
  cmd_convergence->add_option("--out", conv_out, "output CSV path");

  std::string ann_sequence, ann_out = "annotation_out";
  pse::AnnotateParams ann_params;
  CLI::App* cmd_annotate =
      app.add_subcommand("annotate", "seed-box refinement, carving, and meshing");
  cmd_annotate->add_option("--sequence", ann_sequence, "sequence manifest (JSON)")
      ->required();
  cmd_annotate->add_option("--out", ann_out, "output directory");
  cmd_annotate->add_option("--resolution", ann_params.resolution_m, "voxel size (m)");
  cmd_annotate->add_option("--margin", ann_params.margin_m, "carving margin (m)");
  cmd_annotate->add_option("--replicas", ann_params.sym_replicas,
                           "symmetry replicas to append");
  cmd_annotate->add_option("--smooth-iters", ann_params.smoothing_iterations,
                           "Laplacian smoothing iterations");
  cmd_annotate->add_option("--lambda", ann_params.smoothing_lambda,
                           "Laplacian smoothing weight");
  cmd_annotate->add_option("--icp-iters", ann_params.icp.max_iterations,
                           "ICP iteration cap");
  cmd_annotate->add_option("--icp-reject", ann_params.icp.reject_distance_m,
                           "ICP correspondence rejection distance (m)");
  cmd_annotate->add_option("--icp-tol", ann_params.icp.convergence_tol,
                           "ICP convergence tolerance (m)");

  std::string fix_out = "fixtures";
  std::string fix_which = "all";
  std::uint64_t fix_seed = 7;
  CLI::App* cmd_fixtures =
      app.add_subcommand("fixtures", "write the bundled synthetic test data");
  cmd_fixtures->add_option("--out", fix_out, "output directory");
  cmd_fixtures->add_option("--which", fix_which,
                           "all, eval, hypotheses, sequence, or meshes");
  cmd_fixtures->add_option("--seed", fix_seed, "generation seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (cmd_evaluate->parsed()) {
      resolve_eval_flags(cmd_evaluate, eval_config, eval_flags);
      const pse::EvaluationOutputs out = pse::run_evaluate(eval_config);
      std::cerr << "evaluated " << out.records.size() << " samples; reports in "
                << eval_config.out_dir.string() << "\n";
    } else if (cmd_sweep->parsed()) {
      resolve_eval_flags(cmd_sweep, sweep_config, sweep_flags);
      const pse::SweepAxis axis = pse::parse_sweep_axis(sweep_axis);
      if (sweep_min < 0.0 || sweep_max < 0.0 || sweep_steps < 1) {
        switch (axis) {
          case pse::SweepAxis::rotation:
            sweep_min = 0.0; sweep_max = 45.0; sweep_steps = 46;
            break;
          case pse::SweepAxis::translation:
            sweep_min = 0.0; sweep_max = 0.1; sweep_steps = 41;
            break;
          case pse::SweepAxis::fscore:
            sweep_min = 0.0; sweep_max = 1.0; sweep_steps = 21;
            break;
        }
      }
      std::vector<double> grid;
      for (int i = 0; i < sweep_steps; ++i) {
        grid.push_back(sweep_steps == 1 ? sweep_min
                                        : sweep_min + (sweep_max - sweep_min) * i /
                                              (sweep_steps - 1));
      }
      pse::run_sweep(sweep_config, axis, grid);
      std::cerr << "swept " << grid.size() << " thresholds; curve in "
                << sweep_config.out_dir.string() << "\n";
    } else if (cmd_convergence->parsed()) {
      if (conv_pred.empty()) conv_pred = conv_gt;
      pse::run_convergence(conv_gt, conv_pred, conv_counts, conv_delta, conv_seed,
                           conv_out);
      std::cerr << "convergence study written to " << conv_out << "\n";
    } else if (cmd_annotate->parsed()) {
      const pse::AnnotationResult result =
          pse::run_annotate(ann_sequence, ann_params, ann_out);
      std::cerr << "annotation written to " << ann_out << " ("
                << result.mesh.vertices.size() << " vertices, "
                << result.voxels_occupied << "/" << result.voxels_total
                << " voxels occupied)\n";
    } else if (cmd_fixtures->parsed()) {
      const std::filesystem::path out(fix_out);
      const bool all = fix_which == "all";
      if (!all && fix_which != "eval" && fix_which != "hypotheses" &&
          fix_which != "sequence" && fix_which != "meshes") {
        throw std::invalid_argument(
            "unknown fixture set '" + fix_which +
            "' (valid: all, eval, hypotheses, sequence, meshes)");
      }
      if (all || fix_which == "eval") {
        pse::fixtures::write_eval_fixture(out / "eval", fix_seed);
      }
      if (all || fix_which == "hypotheses") {
        pse::fixtures::write_hypotheses_fixture(out / "hypotheses", fix_seed);
      }
      if (all || fix_which == "sequence") {
        pse::fixtures::write_sequence_fixture(out / "sequence", fix_seed);
      }
      if (all || fix_which == "meshes") {
        pse::fixtures::write_mesh_fixtures(out / "meshes");
      }
      std::cerr << "fixtures written to " << out.string() << "\n";
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
