// Command-line front end. Links the C API only; all numerics live behind
// the shared library boundary.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "subsample.h"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read " << path << "\n";
    std::exit(2);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int write_outputs(const ss_job* job, const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  for (int i = 0; i < ss_job_output_count(job); ++i) {
    const std::filesystem::path path =
        std::filesystem::path(out_dir) / ss_job_output_name(job, i);
    std::ofstream out(path, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write " << path << "\n";
      return 2;
    }
    out << ss_job_output_data(job, i);
    std::cout << "wrote " << path.string() << "\n";
  }
  return 0;
}

int finish(ss_job* job, ss_status status, const std::string& out_dir) {
  // Certification failures still carry their outputs (pass=false reports).
  if (status == SS_OK || status == SS_ERROR_CERTIFICATION) {
    const int rc = write_outputs(job, out_dir);
    if (rc != 0) {
      ss_job_free(job);
      return rc;
    }
  }
  if (status != SS_OK) {
    std::cerr << "error: " << ss_job_error(job) << "\n";
  }
  ss_job_free(job);
  return static_cast<int>(status);
}

int env_threads() {
  const char* env = std::getenv("SUBSAMPLE_THREADS");
  if (env == nullptr) return 1;
  const int t = std::atoi(env);
  return t >= 1 ? t : 1;
}

ss_job* make_job(const std::string& config_path, bool seed_set,
                 std::uint64_t seed) {
  ss_status status = SS_OK;
  ss_job* job = ss_job_create(read_file(config_path).c_str(), &status);
  if (job == nullptr) {
    std::cerr << "error: " << ss_last_error() << "\n";
    std::exit(static_cast<int>(status));
  }
  if (seed_set) ss_job_override_seed(job, seed);
  ss_job_set_threads(job, env_threads());
  return job;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified dual-barrier subsampling and least-squares recovery"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".", target_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int resolution = 256;
  int iteration = -1;

  auto add_common = [&](CLI::App* cmd, bool needs_config) {
    if (needs_config) {
      cmd->add_option("--config", config_path, "JSON run configuration")
          ->required();
    }
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--seed", seed, "seed override")
        ->each([&](const std::string&) { seed_set = true; });
  };

  CLI::App* sparsify =
      app.add_subcommand("sparsify", "select points and certify frame bounds");
  add_common(sparsify, true);

  CLI::App* grid = app.add_subcommand(
      "grid", "export the accepted/blocked region on a regular grid");
  add_common(grid, true);
  grid->add_option("--resolution", resolution, "cells per axis");
  grid->add_option("--iteration", iteration,
                   "snapshot iteration (-1 = final, 0 = fresh barriers)");

  CLI::App* recover =
      app.add_subcommand("recover", "run the recovery pipeline on a target");
  add_common(recover, true);
  recover->add_option("--target", target_path, "JSON target spec")->required();

  CLI::App* verify =
      app.add_subcommand("verify", "run the brute-force oracle battery");
  add_common(verify, false);

  CLI11_PARSE(app, argc, argv);

  if (sparsify->parsed()) {
    ss_job* job = make_job(config_path, seed_set, seed);
    return finish(job, ss_job_sparsify(job), out_dir);
  }
  if (grid->parsed()) {
    ss_job* job = make_job(config_path, seed_set, seed);
    return finish(job, ss_job_grid(job, resolution, iteration), out_dir);
  }
  if (recover->parsed()) {
    ss_job* job = make_job(config_path, seed_set, seed);
    const std::string target = read_file(target_path);
    return finish(job, ss_job_recover(job, target.c_str()), out_dir);
  }
  if (verify->parsed()) {
    ss_job* job = ss_job_create_empty();
    return finish(job, ss_job_verify(job, seed), out_dir);
  }
  return 2;
}
