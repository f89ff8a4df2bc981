#include "subsample/run_io.hpp"

#include <charconv>
#include <cmath>
#include <set>

#include "subsample/oracles.hpp"

namespace subsample {

namespace {

using json = nlohmann::json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                         const std::string& where) {
  for (const auto& item : obj.items()) {
    if (!known.count(item.key())) {
      fail(ErrorCode::config,
           "unknown key \"" + item.key() + "\" in " + where);
    }
  }
}

BasisFamily parse_family(const std::string& s) {
  if (s == "fourier") return BasisFamily::fourier;
  if (s == "legendre") return BasisFamily::legendre;
  if (s == "chebyshev") return BasisFamily::chebyshev;
  fail(ErrorCode::config, "unknown basis family \"" + s + "\"");
}

OrderingKind parse_ordering(const std::string& s) {
  if (s == "univariate") return OrderingKind::univariate;
  if (s == "isotropic") return OrderingKind::isotropic;
  if (s == "mixed") return OrderingKind::mixed;
  fail(ErrorCode::config, "unknown ordering \"" + s + "\"");
}

const std::set<std::string> kKnownOutputs = {
    "points_csv", "report_json", "trace_csv", "grid_csv", "snapshots_json"};

}  // namespace

std::string format_double(double v) {
  char buf[48];
  const auto res =
      std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

RunConfig parse_run_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    fail(ErrorCode::config, std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail(ErrorCode::config, "config must be a JSON object");
  reject_unknown_keys(doc,
                      {"schema_version", "basis", "ordering", "mode",
                       "selection", "outputs", "seed"},
                      "config");
  RunConfig cfg;
  try {
    if (doc.contains("schema_version") && doc["schema_version"].get<int>() != 1) {
      fail(ErrorCode::config, "unsupported schema_version");
    }
    if (!doc.contains("basis")) fail(ErrorCode::config, "config needs \"basis\"");
    const json& basis = doc["basis"];
    reject_unknown_keys(basis, {"family", "dimension"}, "basis");
    cfg.family = parse_family(basis.at("family").get<std::string>());
    cfg.dimension = basis.value("dimension", 1);
    if (cfg.dimension != 1 && cfg.dimension != 2) {
      fail(ErrorCode::config, "dimension must be 1 or 2");
    }
    cfg.ordering = doc.contains("ordering")
                       ? parse_ordering(doc["ordering"].get<std::string>())
                       : (cfg.dimension == 1 ? OrderingKind::univariate
                                             : OrderingKind::isotropic);

    if (!doc.contains("mode")) fail(ErrorCode::config, "config needs \"mode\"");
    const json& mode = doc["mode"];
    const std::string kind = mode.at("kind").get<std::string>();
    if (kind == "frame") {
      reject_unknown_keys(mode,
                          {"kind", "m", "upper", "R", "R_prime",
                           "adjoin_constant"},
                          "mode");
      cfg.mode = RunConfig::Mode::frame;
      cfg.frame_m = mode.value("m", 0);
      cfg.frame_upper = mode.value("upper", 0L);
      cfg.threshold_r = mode.value("R", 0.0);
      cfg.threshold_r_prime = mode.value("R_prime", 0.0);
      cfg.adjoin_constant = mode.value("adjoin_constant", true);
      if (cfg.frame_m <= 0 && cfg.threshold_r <= 0.0) {
        fail(ErrorCode::config, "frame mode needs m or the threshold R");
      }
    } else if (kind == "constructive") {
      reject_unknown_keys(mode, {"kind", "theta", "alpha0", "m", "n_rule"},
                          "mode");
      cfg.mode = RunConfig::Mode::constructive;
      cfg.theta = mode.value("theta", 0.0);
      cfg.alpha0 = mode.at("alpha0").get<double>();
      cfg.constructive_m = mode.at("m").get<int>();
      const std::string rule = mode.value("n_rule", std::string("n=2m"));
      if (rule == "n=2m") {
        cfg.n_rule_multiple = 2;
      } else if (rule == "n=m") {
        cfg.n_rule_multiple = 1;
      } else {
        fail(ErrorCode::config, "n_rule must be \"n=m\" or \"n=2m\"");
      }
    } else {
      fail(ErrorCode::config, "mode.kind must be \"frame\" or \"constructive\"");
    }

    if (doc.contains("selection")) {
      const json& sel = doc["selection"];
      reject_unknown_keys(sel,
                          {"n", "epsilon_mode", "epsilon", "weight_rule",
                           "retest_previous", "oracle", "scan_grid",
                           "max_proposals", "dense_threshold",
                           "snapshot_every"},
                          "selection");
      if (sel.contains("n")) {
        cfg.selection.n = sel["n"].get<int>();
        cfg.n_explicit = true;
      }
      const std::string em = sel.value("epsilon_mode", std::string("exact"));
      if (em == "exact") {
        cfg.selection.epsilon_mode = EpsilonMode::exact;
      } else if (em == "relaxed") {
        cfg.selection.epsilon_mode = EpsilonMode::relaxed;
      } else if (em == "custom") {
        cfg.selection.epsilon_mode = EpsilonMode::custom;
        cfg.selection.epsilon_custom = sel.at("epsilon").get<double>();
      } else {
        fail(ErrorCode::config, "epsilon_mode must be exact|relaxed|custom");
      }
      const std::string wr = sel.value("weight_rule", std::string("minimal"));
      if (wr == "minimal") {
        cfg.selection.weight_rule = WeightRule::minimal;
      } else if (wr == "maximal") {
        cfg.selection.weight_rule = WeightRule::maximal;
      } else if (wr == "midpoint") {
        cfg.selection.weight_rule = WeightRule::midpoint;
      } else {
        fail(ErrorCode::config, "weight_rule must be minimal|maximal|midpoint");
      }
      cfg.selection.retest_previous = sel.value("retest_previous", false);
      const std::string orc = sel.value("oracle", std::string("christoffel"));
      if (orc == "finite_scan") {
        cfg.selection.oracle = OracleKind::finite_scan;
      } else if (orc == "iid_measure") {
        cfg.selection.oracle = OracleKind::iid_measure;
      } else if (orc == "christoffel") {
        cfg.selection.oracle = OracleKind::christoffel;
      } else {
        fail(ErrorCode::config,
             "oracle must be finite_scan|iid_measure|christoffel");
      }
      cfg.selection.scan_grid = sel.value("scan_grid", 0);
      cfg.selection.max_proposals = sel.value("max_proposals", 0L);
      cfg.selection.dense_threshold = sel.value("dense_threshold", 256);
      cfg.selection.snapshot_every = sel.value("snapshot_every", 0);
    } else {
      cfg.selection.oracle = OracleKind::christoffel;
    }

    if (doc.contains("outputs")) {
      for (const auto& o : doc["outputs"]) {
        const std::string name = o.get<std::string>();
        if (!kKnownOutputs.count(name)) {
          fail(ErrorCode::config, "unknown output \"" + name + "\"");
        }
        cfg.outputs.push_back(name);
      }
    } else {
      cfg.outputs = {"points_csv", "report_json", "trace_csv"};
    }
    cfg.seed = doc.value("seed", std::uint64_t{0});
    cfg.selection.rng_seed = cfg.seed;
  } catch (const json::exception& e) {
    fail(ErrorCode::config, std::string("malformed config: ") + e.what());
  }
  return cfg;
}

TargetSpec parse_target_spec(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    fail(ErrorCode::config, std::string("target is not valid JSON: ") + e.what());
  }
  reject_unknown_keys(doc,
                      {"coefficients", "power_rule", "alpha", "beta", "c_f",
                       "noise_sup"},
                      "target");
  TargetSpec spec;
  try {
    if (doc.contains("coefficients")) {
      for (const auto& c : doc["coefficients"]) {
        if (c.is_number()) {
          spec.target.coeffs.emplace_back(c.get<double>(), 0.0);
        } else {
          spec.target.coeffs.emplace_back(c.at(0).get<double>(),
                                          c.at(1).get<double>());
        }
      }
    } else if (doc.contains("power_rule")) {
      const json& pr = doc["power_rule"];
      reject_unknown_keys(pr, {"exponent", "count"}, "power_rule");
      const double expnt = pr.at("exponent").get<double>();
      const long count = pr.at("count").get<long>();
      for (long k = 1; k <= count; ++k) {
        spec.target.coeffs.emplace_back(std::pow(double(k), -expnt), 0.0);
      }
    } else {
      fail(ErrorCode::config, "target needs coefficients or a power_rule");
    }
    spec.target.alpha = doc.at("alpha").get<double>();
    spec.target.beta = doc.value("beta", 0.0);
    spec.target.c_f = doc.value("c_f", 0.0);
    spec.noise_sup = doc.value("noise_sup", 0.0);
  } catch (const json::exception& e) {
    fail(ErrorCode::config, std::string("malformed target: ") + e.what());
  }
  return spec;
}

std::unique_ptr<TensorBasisSystem> build_system(const RunConfig& cfg) {
  UnivariateBasis basis = make_basis(cfg.family);
  IndexOrdering ordering{cfg.ordering, cfg.dimension,
                         basis.signed_frequencies()};
  if (cfg.mode == RunConfig::Mode::constructive) {
    const double theta = cfg.theta > 0.0 ? cfg.theta : basis.theta;
    const TruncationPlan plan =
        TruncationPlan::make(theta, cfg.alpha0, cfg.constructive_m, basis.c_eta);
    return std::make_unique<TensorBasisSystem>(
        build_constructive_system(basis, ordering, plan, true));
  }
  int m = cfg.frame_m;
  long upper = cfg.frame_upper;
  if (cfg.threshold_r > 0.0) {
    // sigma <= R for the lower family, R < sigma <= R' for the upper one.
    long lo = 0, hi = 0;
    long probe = 1;
    while (true) {
      const auto idx = ordering.first(probe);
      if (ordering.sigma(idx.back()) > std::max(cfg.threshold_r,
                                                cfg.threshold_r_prime)) {
        break;
      }
      probe *= 2;
      if (probe > 2000000) {
        fail(ErrorCode::config, "thresholds R/R' enumerate too many indices");
      }
    }
    const auto idx = ordering.first(probe);
    for (const auto& ix : idx) {
      const double s = ordering.sigma(ix);
      if (s <= cfg.threshold_r) ++lo;
      if (cfg.threshold_r < s && s <= cfg.threshold_r_prime) ++hi;
    }
    m = static_cast<int>(lo);
    upper = hi;
  }
  if (m < 1) fail(ErrorCode::config, "frame mode resolved to an empty lower family");
  return std::make_unique<TensorBasisSystem>(
      build_frame_system(basis, ordering, m, upper, cfg.adjoin_constant));
}

std::string points_csv(const SelectionRun& run, int dimension) {
  std::string out = dimension == 1 ? "x1,weight\n" : "x1,x2,weight\n";
  for (std::size_t i = 0; i < run.points.size(); ++i) {
    out += format_double(run.points[i][0]);
    if (dimension == 2) {
      out += ',';
      out += format_double(run.points[i][1]);
    }
    out += ',';
    out += format_double(run.weights[i]);
    out += '\n';
  }
  return out;
}

std::string trace_csv(const SelectionRun& run) {
  std::string out = "iteration,phi,psi\n";
  for (std::size_t i = 0; i < run.phi_trace.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += format_double(run.phi_trace[i]);
    out += ',';
    out += format_double(run.psi_trace[i]);
    out += '\n';
  }
  return out;
}

nlohmann::ordered_json run_report_json(const SelectionRun& run,
                                       const RunConfig& cfg, double c_eta) {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["m"] = run.m;
  j["n"] = run.n;
  j["upper_dim"] = run.upper_dim;
  j["effective_dim"] = run.effective_dim;
  j["r"] = run.r;
  j["s"] = run.s;
  j["delta"] = run.delta;
  j["delta_eff"] = run.delta_eff;
  j["zeta"] = run.zeta;
  j["epsilon"] = run.epsilon;
  j["lower_edge_mode"] = run.lower_edge;
  j["upper_edge_mode"] = run.upper_edge;
  j["representation"] =
      run.upper_edge ? "none" : (run.woodbury ? "woodbury" : "dense");
  j["c_eta"] = c_eta;
  j["seed"] = cfg.seed;
  j["targets"] = {{"lower", run.target_lower},
                  {"lower_whitened", run.target_lower_whitened},
                  {"upper", run.target_upper}};
  j["certified"] = {{"lower", run.lower_bound_certified},
                    {"lower_whitened", run.lower_bound_certified_whitened},
                    {"upper", run.upper_bound_certified},
                    {"lower_slack",
                     run.lower_bound_certified - run.target_lower},
                    {"upper_slack",
                     run.target_upper - run.upper_bound_certified},
                    {"pass", run.certified}};
  j["lambda_min_gram_lower"] = run.lambda_min_gram;
  j["lambda_max_j"] = run.lambda_max_j;
  j["weights"] = {{"count", run.points.size()},
                  {"sum", run.weight_sum}};
  j["proposals_total"] = run.proposals_total;
  j["christoffel_rejections"] = run.christoffel_rejections;
  j["phi_trace"] = run.phi_trace;
  j["psi_trace"] = run.psi_trace;
  j["master_lhs"] = run.master_lhs;
  j["master_rhs"] = run.master_rhs;
  nlohmann::ordered_json iters = nlohmann::ordered_json::array();
  for (const auto& rec : run.iterations) {
    iters.push_back({{"L", rec.lower_value},
                     {"U", rec.upper_value},
                     {"inv_w", rec.inv_weight},
                     {"proposals", rec.proposals},
                     {"point", rec.point},
                     {"retest", rec.retest}});
  }
  j["iterations"] = iters;
  return j;
}

namespace {

nlohmann::ordered_json snapshots_json(const SelectionRun& run) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < run.snapshot_iterations.size(); ++i) {
    nlohmann::ordered_json snap;
    snap["iteration"] = run.snapshot_iterations[i];
    snap["lower"] = run.snapshot_lower[i].to_json();
    snap["upper"] = run.snapshot_upper[i].to_json();
    arr.push_back(snap);
  }
  nlohmann::ordered_json out;
  out["schema_version"] = 1;
  out["snapshots"] = arr;
  return out;
}

}  // namespace

JobResult cmd_sparsify(const RunConfig& cfg) {
  auto system = build_system(cfg);
  RunConfig effective = cfg;
  if (!effective.n_explicit) {
    effective.selection.n =
        cfg.mode == RunConfig::Mode::constructive
            ? cfg.n_rule_multiple * cfg.constructive_m
            : 2 * system->lower_dim();
  }
  const SelectionRun run = select(effective.selection, *system);

  JobResult result;
  result.certified = run.certified;
  for (const std::string& name : effective.outputs) {
    if (name == "points_csv") {
      result.outputs.push_back(
          {"points.csv", points_csv(run, system->domain_dim())});
    } else if (name == "report_json") {
      result.outputs.push_back(
          {"report.json",
           run_report_json(run, effective, system->basis().c_eta).dump(2) +
               "\n"});
    } else if (name == "trace_csv") {
      result.outputs.push_back({"trace.csv", trace_csv(run)});
    } else if (name == "snapshots_json") {
      result.outputs.push_back(
          {"snapshots.json", snapshots_json(run).dump(2) + "\n"});
    }
  }
  return result;
}

JobResult cmd_grid(const RunConfig& cfg, int resolution, int iteration) {
  if (resolution < 1) fail(ErrorCode::config, "grid resolution must be >= 1");
  auto system = build_system(cfg);
  RunConfig effective = cfg;
  if (!effective.n_explicit) {
    effective.selection.n =
        cfg.mode == RunConfig::Mode::constructive
            ? cfg.n_rule_multiple * cfg.constructive_m
            : 2 * system->lower_dim();
  }
  const SelectionRun run = select(effective.selection, *system);
  const int snap_it = iteration < 0 ? effective.selection.n : iteration;
  const LowerBarrier& lb = run.snapshot_lower_at(snap_it);
  const UpperBarrier& ub = run.snapshot_upper_at(snap_it);

  const int d = system->domain_dim();
  std::string csv = d == 1 ? "x1,accepted\n" : "x1,x2,accepted\n";
  Vector a, b;
  for (int i = 0; i < resolution; ++i) {
    const double x1 = (i + 0.5) / resolution;
    const int jmax = d == 1 ? 1 : resolution;
    for (int j = 0; j < jmax; ++j) {
      Point x{x1, d == 1 ? 0.0 : (j + 0.5) / resolution};
      system->eval_lower(x, a);
      system->eval_upper(x, b);
      const bool ok = lb.verifier(a) >= ub.verifier(b);
      csv += format_double(x[0]);
      if (d == 2) {
        csv += ',';
        csv += format_double(x[1]);
      }
      csv += ',';
      csv += ok ? '1' : '0';
      csv += '\n';
    }
  }
  JobResult result;
  result.certified = run.certified;
  result.outputs.push_back({"grid.csv", std::move(csv)});
  return result;
}

JobResult cmd_recover(const RunConfig& cfg, const TargetSpec& target) {
  if (cfg.mode != RunConfig::Mode::constructive) {
    fail(ErrorCode::config, "recover requires a constructive-mode config");
  }
  const UnivariateBasis basis = make_basis(cfg.family);
  IndexOrdering ordering{cfg.ordering, cfg.dimension,
                         basis.signed_frequencies()};
  const double theta = cfg.theta > 0.0 ? cfg.theta : basis.theta;
  const TruncationPlan plan =
      TruncationPlan::make(theta, cfg.alpha0, cfg.constructive_m, basis.c_eta);
  const RecoveryReport report =
      end_to_end_recover(basis, ordering, plan, target.target,
                         target.noise_sup, cfg.seed, cfg.selection.threads);

  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["m"] = plan.m;
  j["n"] = report.run.n;
  j["N"] = plan.n_trunc;
  j["theta"] = plan.theta;
  j["alpha0"] = plan.alpha0;
  j["t"] = plan.t;
  j["alpha"] = target.target.alpha;
  j["beta"] = target.target.beta;
  j["c_f"] = report.c_f_used;
  j["h_norm"] = report.h_norm;
  j["measured_error"] = report.measured_error;
  j["certificate_theorem"] = report.certificate_thm;
  j["certificate_corollary"] = report.certificate_cor_exact;
  j["pass_theorem"] = report.pass_thm;
  j["pass_corollary"] = report.pass_cor;
  j["noise_sup"] = report.noise_sup;
  if (report.noise_sup > 0.0) {
    j["measured_error_noisy"] = report.measured_error_noisy;
    j["certificate_noisy"] = report.certificate_cor_noisy;
    j["pass_noisy"] = report.pass_noisy;
  }
  j["selection"] = {{"proposals_total", report.run.proposals_total},
                    {"certified_lower", report.run.lower_bound_certified},
                    {"certified_upper", report.run.upper_bound_certified},
                    {"target_lower", report.run.target_lower},
                    {"target_upper", report.run.target_upper}};

  JobResult result;
  result.certified = report.pass_thm && report.pass_cor && report.pass_noisy &&
                     report.run.certified;
  result.outputs.push_back({"recovery.json", j.dump(2) + "\n"});
  return result;
}

JobResult cmd_verify(std::uint64_t seed) {
  const auto reports = oracles::run_oracle_battery(seed);
  const auto j = oracles::battery_to_json(reports);
  JobResult result;
  result.certified = j["pass"].get<bool>();
  result.outputs.push_back({"verify.json", j.dump(2) + "\n"});
  return result;
}

}  // namespace subsample
