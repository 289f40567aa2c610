#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "mhp/kernels.hpp"
#include "mhp/mwis.hpp"
#include "mhp/pipeline.hpp"
#include "mhp/rng.hpp"
#include "mhp/synth.hpp"

namespace {

int cmd_synth(const std::string& config_path, const std::string& out_path,
              double conf_threshold, double nms_iou) {
  const mhp::SynthConfig cfg = mhp::load_synth_config(config_path);
  const mhp::ScenarioStream scenario = mhp::synth_scenario(cfg, conf_threshold, nms_iou);
  mhp::save_scenario(scenario, out_path);
  std::size_t proposals = 0;
  for (const auto& f : scenario.frames) proposals += f.proposals.size();
  std::cout << "wrote " << out_path << ": " << scenario.num_frames() << " frames, "
            << scenario.num_objects() << " objects, " << proposals << " proposals\n";
  return 0;
}

int cmd_run(const std::string& scenario_path, const std::string& out_dir,
            const mhp::Params& params, const mhp::GeneratorOptions& generator,
            std::uint64_t seed, const std::string& backend) {
  if (backend == "serial")
    mhp::kernels::set_backend(mhp::kernels::Backend::Serial);
  else if (backend == "parallel")
    mhp::kernels::set_backend(mhp::kernels::Backend::Parallel);
  else
    mhp::kernels::set_backend(mhp::kernels::Backend::Auto);

  mhp::validate_params(params);
  const mhp::ScenarioStream scenario = mhp::load_scenario(scenario_path);
  const mhp::RunResult result = mhp::run_pipeline(scenario, params, generator, seed);
  mhp::write_run_outputs(out_dir, result, scenario);

  std::cout << "processed " << scenario.num_frames() << " frames in " << result.total_ms
            << " ms (" << result.total_ms / scenario.num_frames() << " ms/frame)\n";
  bool has_truth = scenario.num_frames() > 1;
  for (int t = 1; t < scenario.num_frames() && has_truth; ++t)
    has_truth = !scenario.frames[t].gt_masks.empty();
  if (has_truth) {
    const mhp::EvalResult eval = mhp::evaluate_labels(result.labels, scenario);
    std::cout << "mean J " << eval.mean_j << ", mean F " << eval.mean_f << ", mean G "
              << eval.mean_g << "\n";
  }
  std::cout << "outputs in " << out_dir << "\n";
  return 0;
}

int cmd_eval(const std::string& pred_dir, const std::string& scenario_path,
             const std::string& out_csv, bool include_first) {
  const mhp::ScenarioStream scenario = mhp::load_scenario(scenario_path);
  const auto labels = mhp::read_label_grids(pred_dir, scenario.num_frames());
  const mhp::EvalResult eval = mhp::evaluate_labels(labels, scenario, include_first);
  mhp::write_metrics_csv(out_csv, eval);
  std::cout << "mean J " << eval.mean_j << ", mean F " << eval.mean_f << ", mean G "
            << eval.mean_g << " -> " << out_csv << "\n";
  return 0;
}

// random conflict graphs, local search against the exact optimum
int cmd_mwis_check(int nodes, int trials, std::uint64_t seed) {
  if (nodes < 1 || nodes > 24) {
    std::cerr << "mwis-check: --nodes must lie in 1..24\n";
    return 2;
  }
  const double densities[] = {0.1, 0.3, 0.6};
  int failures = 0;
  for (int trial = 0; trial < trials; ++trial) {
    const double density = densities[trial % 3];
    mhp::rng::Stream stream(mhp::rng::derive(seed, static_cast<std::uint64_t>(trial)));
    mhp::ConflictGraph graph;
    graph.weights.resize(nodes);
    graph.adjacency.resize(nodes);
    for (int v = 0; v < nodes; ++v) graph.weights[v] = stream.next_range(0.01, 1.0);
    for (int a = 0; a < nodes; ++a)
      for (int b = a + 1; b < nodes; ++b)
        if (stream.next_unit() < density) {
          graph.adjacency[a].push_back(b);
          graph.adjacency[b].push_back(a);
        }
    const auto exact = mhp::solve_exact(graph);
    const auto local = mhp::solve_pls(graph, mhp::rng::derive(seed, 0x915ull, trial),
                                      10000);
    const double we = mhp::set_weight(graph, exact);
    const double wl = mhp::set_weight(graph, local);
    if (wl != we) {
      ++failures;
      std::cout << "trial " << trial << " (density " << density << "): MISMATCH local "
                << wl << " vs exact " << we << "\n";
    }
  }
  if (failures == 0) {
    std::cout << trials << " trials on " << nodes
              << "-node graphs: local search matched the exact optimum every time\n";
    return 0;
  }
  std::cout << failures << " of " << trials << " trials diverged\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-hypothesis mask tracking"};
  app.require_subcommand(1);

  // --- synth ---
  std::string synth_config, synth_out;
  double synth_thp = 0.05, synth_thn = 0.6;
  auto* synth = app.add_subcommand("synth", "render a synthetic scenario file");
  synth->add_option("--config", synth_config, "synth config (json)")->required();
  synth->add_option("--out", synth_out, "scenario file to write")->required();
  synth->add_option("--thp", synth_thp, "detector confidence floor");
  synth->add_option("--thn", synth_thn, "detector overlap suppression threshold");

  // --- run ---
  std::string run_scenario, run_out, run_generator = "oracle", run_backend = "auto";
  mhp::Params params;
  mhp::GeneratorOptions genopts;
  std::uint64_t run_seed = 0;
  auto* run = app.add_subcommand("run", "track and segment a scenario");
  run->add_option("--scenario", run_scenario, "scenario file")->required();
  run->add_option("--out", run_out, "output directory")->required();
  double run_wm = params.motion_weight;
  run->add_option("--wm", run_wm, "motion weight (mask weight becomes 1-wm)");
  run->add_option("--wn", params.competition_weight, "rival overlap weight (<= 0)");
  run->add_option("--N", params.scan_depth, "decision delay in frames");
  run->add_option("--thb", params.branch_cap, "branch budget per tree");
  run->add_option("--thg", params.gate_iou, "gate overlap threshold");
  run->add_option("--thm", params.mask_threshold, "mask probability threshold");
  run->add_option("--lambda", params.merge_margin, "merge dominance factor");
  run->add_option("--pd", params.detection_prob, "assumed detector reliability");
  run->add_option("--nhist", params.history_window, "motion history window");
  run->add_option("--generator", run_generator, "mask source: oracle or flowprop");
  run->add_option("--noise", genopts.oracle_noise, "oracle boundary flip probability");
  run->add_option("--radius", genopts.flowprop_radius, "flowprop feather radius");
  run->add_option("--seed", run_seed, "run seed");
  run->add_option("--backend", run_backend, "kernels: auto, serial or parallel")
      ->check(CLI::IsMember({"auto", "serial", "parallel"}));

  // --- eval ---
  std::string eval_pred, eval_scenario, eval_out;
  bool eval_first = false;
  auto* eval = app.add_subcommand("eval", "score saved label grids against truth");
  eval->add_option("--pred", eval_pred, "directory with frame_%04d.pgm")->required();
  eval->add_option("--scenario", eval_scenario, "scenario file with truth")->required();
  eval->add_option("--out", eval_out, "metrics csv to write")->required();
  eval->add_flag("--include-first", eval_first, "also score the annotated frame 0");

  // --- mwis-check ---
  int check_nodes = 16, check_trials = 100;
  std::uint64_t check_seed = 0;
  auto* check = app.add_subcommand("mwis-check",
                                   "compare local search with the exact solver");
  check->add_option("--nodes", check_nodes, "vertices per random graph (max 24)");
  check->add_option("--trials", check_trials, "number of random graphs");
  check->add_option("--seed", check_seed, "base seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) return cmd_synth(synth_config, synth_out, synth_thp, synth_thn);
    if (*run) {
      params.motion_weight = run_wm;
      params.propagation_weight = 1.0 - run_wm;
      genopts.name = run_generator;
      return cmd_run(run_scenario, run_out, params, genopts, run_seed, run_backend);
    }
    if (*eval) return cmd_eval(eval_pred, eval_scenario, eval_out, eval_first);
    if (*check) return cmd_mwis_check(check_nodes, check_trials, check_seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
