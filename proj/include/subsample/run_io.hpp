#pragma once

#include <memory>
#include <string>
#include <vector>

#include "subsample/recovery.hpp"
#include "subsample/sparsifier.hpp"

namespace subsample {

// Parsed CLI/job configuration. The JSON schema is strict: unknown keys are
// rejected so typos cannot silently change a run.
struct RunConfig {
  BasisFamily family = BasisFamily::fourier;
  int dimension = 1;
  OrderingKind ordering = OrderingKind::univariate;

  enum class Mode { frame, constructive };
  Mode mode = Mode::frame;
  // frame mode
  int frame_m = 0;
  long frame_upper = 0;         // explicit upper-family size, or derived
  double threshold_r = 0.0;     // sigma <= R for the lower family
  double threshold_r_prime = 0.0;
  bool adjoin_constant = true;
  // constructive mode
  double theta = 0.0;  // 0 -> family default
  double alpha0 = 0.0;
  int constructive_m = 0;
  int n_rule_multiple = 2;  // n = multiple * m

  SelectionConfig selection;
  bool n_explicit = false;

  std::vector<std::string> outputs;  // subset of the known output names
  std::uint64_t seed = 0;
};

RunConfig parse_run_config(const std::string& json_text);

// Recovery target: explicit coefficients or a power-law rule, plus the
// declared decay class.
struct TargetSpec {
  CoefficientTarget target;
  double noise_sup = 0.0;
};
TargetSpec parse_target_spec(const std::string& json_text);

struct NamedOutput {
  std::string name;
  std::string data;
};

struct JobResult {
  std::vector<NamedOutput> outputs;
  bool certified = true;
};

// Builds the system described by the config; exposed for tests.
std::unique_ptr<TensorBasisSystem> build_system(const RunConfig& cfg);

// points CSV + report JSON + trace CSV (+ snapshots JSON if requested).
JobResult cmd_sparsify(const RunConfig& cfg);

// indicator of L(a(x)) >= U(b(x)) on a regular grid at a snapshot iteration
// (-1 = final).
JobResult cmd_grid(const RunConfig& cfg, int resolution, int iteration);

// end-to-end recovery report JSON.
JobResult cmd_recover(const RunConfig& cfg, const TargetSpec& target);

// oracle battery report JSON.
JobResult cmd_verify(std::uint64_t seed);

// 17-significant-digit, locale-independent float formatting used by every
// CSV writer (round-trip exact for binary64).
std::string format_double(double v);

nlohmann::ordered_json run_report_json(const SelectionRun& run,
                                       const RunConfig& cfg, double c_eta);
std::string points_csv(const SelectionRun& run, int dimension);
std::string trace_csv(const SelectionRun& run);

}  // namespace subsample
