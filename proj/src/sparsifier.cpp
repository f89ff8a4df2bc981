#include "subsample/sparsifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

namespace subsample {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<Point> scan_grid_points(const FunctionSystem& system, int res) {
  if (res < 1) fail(ErrorCode::config, "scan grid resolution must be >= 1");
  std::vector<Point> pts;
  if (system.domain_dim() == 1) {
    pts.reserve(res);
    for (int i = 0; i < res; ++i) {
      pts.push_back(Point{(i + 0.5) / res, 0.0});
    }
  } else {
    pts.reserve(std::size_t(res) * res);
    for (int i = 0; i < res; ++i) {
      for (int j = 0; j < res; ++j) {
        pts.push_back(Point{(i + 0.5) / res, (j + 0.5) / res});
      }
    }
  }
  return pts;
}

struct Candidate {
  Point x{0.0, 0.0};
  Vector a;
  Vector b;
  double lower = 0.0;
  double upper = 0.0;
  bool admissible = false;
};

void evaluate_candidate(const FunctionSystem& system, const LowerBarrier& lb,
                        const UpperBarrier& ub, Candidate& c) {
  system.eval_lower(c.x, c.a);
  system.eval_upper(c.x, c.b);
  c.lower = lb.verifier(c.a);
  c.upper = ub.verifier(c.b);
  // L > 0 keeps the weight finite; a null candidate cannot fund an update.
  c.admissible = (c.lower >= c.upper) && (c.lower > 0.0);
}

}  // namespace

const LowerBarrier& SelectionRun::snapshot_lower_at(int iteration) const {
  for (std::size_t i = 0; i < snapshot_iterations.size(); ++i) {
    if (snapshot_iterations[i] == iteration) return snapshot_lower[i];
  }
  fail(ErrorCode::config,
       "no snapshot recorded at iteration " + std::to_string(iteration));
}

const UpperBarrier& SelectionRun::snapshot_upper_at(int iteration) const {
  for (std::size_t i = 0; i < snapshot_iterations.size(); ++i) {
    if (snapshot_iterations[i] == iteration) return snapshot_upper[i];
  }
  fail(ErrorCode::config,
       "no snapshot recorded at iteration " + std::to_string(iteration));
}

double epsilon_for(const SelectionConfig& cfg, int m, int n) {
  if (m <= 1) return 0.0;  // the scalar lower verifier takes no relaxation
  const double r = std::sqrt(double(m - 1) / double(n));
  switch (cfg.epsilon_mode) {
    case EpsilonMode::exact:
      return 0.0;
    case EpsilonMode::relaxed:
      return 0.5 * (1.0 - r) * (1.0 - r);
    case EpsilonMode::custom:
      if (cfg.epsilon_custom < 0.0 ||
          cfg.epsilon_custom >= (1.0 - r) * (1.0 - r)) {
        fail(ErrorCode::config,
             "custom epsilon must lie in [0, (1-r)^2) for r = sqrt((m-1)/n)");
      }
      return cfg.epsilon_custom;
  }
  fail(ErrorCode::internal, "unknown epsilon mode");
}

std::pair<LowerBarrier, UpperBarrier> initialize_barriers(
    const SelectionConfig& cfg, const FunctionSystem& system) {
  const int m = system.lower_dim();
  const int n = cfg.n;
  if (m < 1) fail(ErrorCode::config, "the lower family must be nonempty");
  if (n < m) fail(ErrorCode::config, "need n >= m points");
  if (!system.is_whitened()) {
    fail(ErrorCode::config,
         "the system must be whitened (lower Gram = identity) before selection");
  }
  const double eps = epsilon_for(cfg, m, n);
  LowerBarrier lb = (m == 1) ? LowerBarrier::edge(n)
                             : LowerBarrier::standard(m, n, eps);
  const bool upper_edge =
      system.upper_dim() == 0 ||
      system.effective_dim() < 1.0 + 1.0 / double(n);
  UpperBarrier ub =
      upper_edge
          ? UpperBarrier::edge(system.j_diag(), n)
          : UpperBarrier::standard(
                system.j_diag(), n,
                system.upper_dim() <= cfg.dense_threshold
                    ? UpperBarrier::Representation::dense
                    : UpperBarrier::Representation::woodbury);
  return {std::move(lb), std::move(ub)};
}

SelectionRun select(const SelectionConfig& cfg, const FunctionSystem& system) {
  const int m = system.lower_dim();
  const int n = cfg.n;
  auto [lower, upper] = initialize_barriers(cfg, system);

  SelectionRun run;
  run.m = m;
  run.n = n;
  run.upper_dim = system.upper_dim();
  run.effective_dim = system.effective_dim();
  run.lower_edge = lower.edge_mode();
  run.upper_edge = upper.edge_mode();
  run.woodbury = !run.upper_edge && upper.representation() ==
                                        UpperBarrier::Representation::woodbury;
  run.r = m > 1 ? std::sqrt(double(m - 1) / double(n)) : 0.0;
  run.s = std::sqrt(std::max(run.effective_dim - 1.0, 0.0) / double(n));
  run.epsilon = epsilon_for(cfg, m, n);
  run.delta = (1.0 - run.r) / n;
  run.delta_eff = (1.0 - run.r - run.epsilon) / n;
  run.zeta = (1.0 + run.s) / n;

  const long cap = cfg.max_proposals > 0 ? cfg.max_proposals
                                         : 200L * long(n) * long(m);
  Rng rng(cfg.rng_seed);

  // Candidate source.
  const std::vector<Point>* scan = nullptr;
  std::vector<Point> grid_storage;
  std::vector<std::size_t> scan_order;
  if (cfg.oracle == OracleKind::finite_scan) {
    scan = system.scan_points();
    if (scan == nullptr) {
      if (cfg.scan_grid <= 0) {
        fail(ErrorCode::config,
             "finite_scan on an analytic system needs a scan grid resolution");
      }
      grid_storage = scan_grid_points(system, cfg.scan_grid);
      scan = &grid_storage;
    }
    scan_order.resize(scan->size());
  }

  const int threads = std::max(1, cfg.threads);
  std::vector<Candidate> batch(static_cast<std::size_t>(threads));

  // Accepted evaluations are cached so retests and certification do not
  // re-derive them.
  std::vector<Vector> a_cols, a_raw_cols, b_cols;

  const auto record_traces = [&]() {
    run.phi_trace.push_back(lower.edge_mode() ? kNaN : lower.potential());
    run.psi_trace.push_back(upper.edge_mode() ? kNaN : upper.potential());
    if (!lower.edge_mode() && !upper.edge_mode()) {
      run.master_lhs.push_back(1.0 / run.delta - lower.potential());
      run.master_rhs.push_back(1.0 / run.zeta + upper.potential());
    }
  };
  const auto snapshot = [&](int iteration) {
    run.snapshot_iterations.push_back(iteration);
    run.snapshot_lower.push_back(lower);
    run.snapshot_upper.push_back(upper);
  };

  record_traces();
  snapshot(0);

  const auto choose_inv_weight = [&](double lval, double uval) {
    // The scalar upper verifier pins the weight (w = 1/U gives the
    // equal-weight discretization); otherwise the configured rule picks a
    // point of [U, L].
    double inv_w;
    if (upper.edge_mode()) {
      inv_w = uval;
    } else {
      switch (cfg.weight_rule) {
        case WeightRule::minimal: inv_w = lval; break;
        case WeightRule::maximal: inv_w = uval; break;
        case WeightRule::midpoint: inv_w = 0.5 * (lval + uval); break;
        default: inv_w = lval; break;
      }
    }
    if (!(inv_w > 0.0)) inv_w = lval;  // U = 0 would make the weight infinite
    return inv_w;
  };

  for (int it = 0; it < n; ++it) {
    Candidate accepted;
    long spent = 0;
    bool via_retest = false;
    int retest_index = -1;

    if (cfg.retest_previous) {
      // Previous points are tested again first; a hit only grows its weight.
      for (std::size_t p = 0; p < run.points.size(); ++p) {
        Candidate c;
        c.x = run.points[p];
        c.a = a_cols[p];
        c.b = b_cols[p];
        c.lower = lower.verifier(c.a);
        c.upper = upper.verifier(c.b);
        c.admissible = (c.lower >= c.upper) && (c.lower > 0.0);
        if (c.admissible) {
          accepted = std::move(c);
          via_retest = true;
          retest_index = static_cast<int>(p);
          break;
        }
      }
    }

    if (!via_retest) {
      if (scan != nullptr) {
        // One seeded random pass over the candidate set per iteration.
        for (std::size_t i = 0; i < scan_order.size(); ++i) scan_order[i] = i;
        rng.shuffle(scan_order);
        bool found = false;
        for (std::size_t pos = 0; pos < scan_order.size(); ++pos) {
          if (run.proposals_total + spent >= cap) {
            fail(ErrorCode::selection,
                 "proposal cap exhausted after " +
                     std::to_string(run.proposals_total + spent) +
                     " proposals; oracle and measure are mismatched");
          }
          Candidate c;
          c.x = (*scan)[scan_order[pos]];
          ++spent;
          evaluate_candidate(system, lower, upper, c);
          if (c.admissible) {
            accepted = std::move(c);
            found = true;
            break;
          }
        }
        if (!found) {
          fail(ErrorCode::selection,
               "no admissible point in the candidate set at iteration " +
                   std::to_string(it) +
                   "; the acceptance region has positive measure, so this "
                   "indicates numerical breakdown or a degenerate grid");
        }
      } else {
        bool found = false;
        while (!found) {
          if (run.proposals_total + spent >= cap) {
            fail(ErrorCode::selection,
                 "proposal cap exhausted after " +
                     std::to_string(run.proposals_total + spent) +
                     " proposals; oracle and measure are mismatched");
          }
          const int live = threads;
          for (int t = 0; t < live; ++t) {
            batch[t].x = cfg.oracle == OracleKind::christoffel
                             ? system.christoffel_sample(
                                   rng, run.christoffel_rejections)
                             : system.sample_mu(rng);
          }
          spent += live;
          if (live == 1) {
            evaluate_candidate(system, lower, upper, batch[0]);
          } else {
            // Verifier evaluation is pure against the frozen barrier state,
            // so a candidate batch can be scored concurrently.
            std::vector<std::thread> pool;
            pool.reserve(live);
            for (int t = 0; t < live; ++t) {
              pool.emplace_back([&, t]() {
                evaluate_candidate(system, lower, upper, batch[t]);
              });
            }
            for (auto& th : pool) th.join();
          }
          for (int t = 0; t < live; ++t) {
            if (batch[t].admissible) {
              accepted = batch[t];
              found = true;
              break;
            }
          }
        }
      }
    }

    const double inv_w = choose_inv_weight(accepted.lower, accepted.upper);
    const double w = 1.0 / inv_w;
    lower.update(accepted.a, w);
    upper.update(accepted.b, w);

    int point_idx;
    if (via_retest) {
      point_idx = retest_index;
      run.weights[static_cast<std::size_t>(point_idx)] += w;
    } else {
      point_idx = static_cast<int>(run.points.size());
      run.points.push_back(accepted.x);
      run.weights.push_back(w);
      a_cols.push_back(accepted.a);
      Vector araw;
      system.eval_lower_raw(accepted.x, araw);
      a_raw_cols.push_back(std::move(araw));
      b_cols.push_back(accepted.b);
    }

    IterationRecord rec;
    rec.lower_value = accepted.lower;
    rec.upper_value = accepted.upper;
    rec.inv_weight = inv_w;
    rec.proposals = spent;
    rec.point = point_idx;
    rec.retest = via_retest;
    run.iterations.push_back(rec);
    run.proposals_total += spent;

    record_traces();
    const int done = it + 1;
    if ((cfg.snapshot_every > 0 && done % cfg.snapshot_every == 0 &&
         done != n) ||
        done == n) {
      snapshot(done);
    }
  }

  certify(run, system);
  return run;
}

void certify(SelectionRun& run, const FunctionSystem& system) {
  const int m = system.lower_dim();
  const std::size_t count = run.points.size();

  Matrix gram_white = Matrix::Zero(m, m);
  Matrix gram_raw = Matrix::Zero(m, m);
  Vector a, araw;
  std::vector<Vector> b_cols(count);
  for (std::size_t i = 0; i < count; ++i) {
    system.eval_lower(run.points[i], a);
    system.eval_lower_raw(run.points[i], araw);
    gram_white += run.weights[i] * a * a.adjoint();
    gram_raw += run.weights[i] * araw * araw.adjoint();
    system.eval_upper(run.points[i], b_cols[i]);
  }

  Eigen::SelfAdjointEigenSolver<Matrix> es_white(gram_white);
  Eigen::SelfAdjointEigenSolver<Matrix> es_raw(gram_raw);
  run.lower_bound_certified_whitened = es_white.eigenvalues().minCoeff();
  run.lower_bound_certified = es_raw.eigenvalues().minCoeff();

  // Largest eigenvalue of sum_i w_i b(x_i) b(x_i)^* taken in the span of the
  // selected columns: same nonzero spectrum, no N x N work.
  if (system.upper_dim() == 0 || count == 0) {
    run.upper_bound_certified = 0.0;
  } else {
    Matrix span = Matrix::Zero(static_cast<Eigen::Index>(count),
                               static_cast<Eigen::Index>(count));
    for (std::size_t i = 0; i < count; ++i) {
      for (std::size_t j = 0; j < count; ++j) {
        span(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            std::sqrt(run.weights[i] * run.weights[j]) *
            b_cols[i].dot(b_cols[j]);
      }
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es_span(span);
    run.upper_bound_certified = es_span.eigenvalues().maxCoeff();
  }

  run.lambda_min_gram = system.lambda_min_gram();
  run.lambda_max_j = system.lambda_max_j();
  run.weight_sum = 0.0;
  for (double w : run.weights) run.weight_sum += w;

  const double base = run.lower_edge
                          ? 1.0
                          : (1.0 - run.r) * (1.0 - run.r) - run.epsilon;
  run.target_lower_whitened = base;
  run.target_lower = base * run.lambda_min_gram;
  run.target_upper = (1.0 + run.s) * (1.0 + run.s) * run.lambda_max_j;

  run.certified =
      run.lower_bound_certified >= run.target_lower - tol::certification &&
      run.lower_bound_certified_whitened >=
          run.target_lower_whitened - tol::certification &&
      run.upper_bound_certified <= run.target_upper + tol::certification;
}

}  // namespace subsample
