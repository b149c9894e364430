#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "mixedfem/mesh.hpp"
#include "mixedfem/scene.hpp"
#include "mixedfem/solver.hpp"
#include "mixedfem/stats.hpp"
#include "validation/registry.hpp"

namespace fs = std::filesystem;
using namespace mixedfem;

namespace {

void apply_threads(int threads) {
  if (threads <= 0) {
    if (const char* env = std::getenv("MIXEDFEM_THREADS")) threads = std::atoi(env);
  }
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

Simulation make_simulation(const std::string& scene_path) {
  SceneConfig cfg = load_scene(scene_path);
  if (cfg.mesh_path.empty())
    throw std::invalid_argument("scene field mesh.path: missing");
  fs::path mesh_path(cfg.mesh_path);
  if (mesh_path.is_relative())
    mesh_path = fs::path(scene_path).parent_path() / mesh_path;
  SimMesh mesh = load_mesh(mesh_path.string(), cfg.kind, cfg.thickness,
                           cfg.cross_section);
  return Simulation(std::move(mesh), std::move(cfg));
}

std::string frame_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%05d.obj", index);
  return buf;
}

int cmd_run(const std::string& scene_path, const std::string& out_dir,
            int frames, int stride) {
  Simulation sim = make_simulation(scene_path);
  fs::create_directories(out_dir);

  int frame_index = 0;
  save_frame_obj((fs::path(out_dir) / frame_name(frame_index++)).string(),
                 sim.mesh(), sim.state().q);
  for (int step = 1; step <= frames * stride; ++step) {
    sim.step();
    if (step % stride == 0)
      save_frame_obj((fs::path(out_dir) / frame_name(frame_index++)).string(),
                     sim.mesh(), sim.state().q);
  }
  write_stats_csv((fs::path(out_dir) / "stats.csv").string(), sim.stats());
  std::cout << "wrote " << frame_index << " frames and stats.csv to "
            << out_dir << "\n";
  return 0;
}

int cmd_bench(const std::string& scene_path, int frames) {
  Simulation sim = make_simulation(scene_path);
  const auto t0 = std::chrono::steady_clock::now();
  for (int step = 0; step < frames; ++step) sim.step();
  const double total_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                t0)
          .count();

  double assembly = 0, solve = 0, rot = 0;
  long iters = 0;
  for (const SubstepStats& row : sim.stats()) {
    assembly += row.assembly_ms;
    solve += row.kkt_solve_ms;
    rot += row.rotation_ms;
    iters += row.cg_iters;
  }
  const size_t n = std::max<size_t>(1, sim.stats().size());
  std::cout << "steps:            " << frames << "\n"
            << "total:            " << total_ms << " ms ("
            << total_ms / std::max(1, frames) << " ms/step)\n"
            << "assembly:         " << assembly << " ms\n"
            << "saddle solves:    " << solve << " ms\n"
            << "rotation updates: " << rot << " ms\n"
            << "mean cg iters:    " << static_cast<double>(iters) / n << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mixed stretch/rotation implicit FEM for volumes, shells and rods"};
  app.require_subcommand(1);

  std::string scene_path, out_dir = "out", filter;
  int frames = 100, stride = 1, threads = 0;
  unsigned seed = 0;
  bool mutate_rhs = false;

  CLI::App* run = app.add_subcommand("run", "simulate a scene and write OBJ frames");
  run->add_option("--scene", scene_path, "scene description file")->required();
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--frames", frames, "number of frames to write");
  run->add_option("--stride", stride, "simulation steps per written frame")
      ->check(CLI::PositiveNumber);
  run->add_option("--threads", threads, "worker threads (0 = MIXEDFEM_THREADS or all)");
  run->add_option("--seed", seed, "rng seed (reserved; the solver is deterministic)");

  CLI::App* validate = app.add_subcommand("validate", "run the self-check suite");
  validate->add_option("--filter", filter, "only run checks whose name contains this");
  validate->add_option("--threads", threads, "worker threads");
  validate->add_option("--seed", seed, "offset applied to the check rng seeds");
  validate
      ->add_flag("--mutate-rhs-sign", mutate_rhs,
                 "build the saddle rhs with the wrong sign (the dense "
                 "cross-checks must then fail)")
      ->group("");  // hidden: mutation testing only

  CLI::App* bench = app.add_subcommand("bench", "time a scene without writing frames");
  bench->add_option("--scene", scene_path, "scene description file")->required();
  bench->add_option("--frames", frames, "number of steps to time");
  bench->add_option("--threads", threads, "worker threads");

  CLI11_PARSE(app, argc, argv);
  apply_threads(threads);

  try {
    if (run->parsed()) return cmd_run(scene_path, out_dir, frames, stride);
    if (validate->parsed()) {
      validation::set_seed_offset(seed);
      validation::set_mutate_rhs_sign(mutate_rhs);
      const int failures = validation::run_checks(filter, std::cout);
      return failures == 0 ? 0 : 1;
    }
    if (bench->parsed()) return cmd_bench(scene_path, frames);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
