#pragma once

// Fixed-step gradient descent on the factored Huber objective, in standard
// mode or on a leave-one-out auxiliary loss.

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "robust_mc/errors.hpp"
#include "robust_mc/matcore.hpp"
#include "robust_mc/metrics.hpp"
#include "robust_mc/model.hpp"

namespace robust_mc {

struct StandardMode {};

using GdMode = std::variant<StandardMode, LooIndex>;

/// Record every iteration for small problems, every tenth above n = 500.
inline std::size_t default_record_every(std::size_t n) { return n <= 500 ? 1 : 10; }

struct GdConfig {
  double eta = 0.05;
  std::size_t max_iters = 2000;
  double rel_change_tol = 1e-10;
  std::size_t record_every = 1;
  double tau = std::numeric_limits<double>::infinity();
  GdMode mode = StandardMode{};

  void validate() const {
    if (!(eta > 0.0) || !std::isfinite(eta)) throw DomainError("GdConfig: eta must be finite and > 0");
    if (max_iters < 1) throw DomainError("GdConfig: max_iters must be >= 1");
    if (!(rel_change_tol >= 0.0)) throw DomainError("GdConfig: rel_change_tol must be >= 0");
    if (record_every < 1) throw DomainError("GdConfig: record_every must be >= 1");
    detail::require_tau(tau, "GdConfig");
  }
};

struct IterateRecord {
  std::size_t iter = 0;
  std::optional<double> rel_error;   // present when a truth matrix was supplied
  double objective = 0.0;
  double imbalance = 0.0;
  std::optional<double> rel_change;  // ||P_t - P_{t-1}||_F / ||P_{t-1}||_F; absent at iter 0
};

enum class StopReason { max_iters, tolerance };

inline const char* to_string(StopReason r) { return r == StopReason::max_iters ? "max_iters" : "tolerance"; }

struct GdTrace {
  std::vector<IterateRecord> iterates_recorded;
  FactorPair final;
  std::size_t iters_run = 0;
  StopReason stop_reason = StopReason::max_iters;
};

/// Objective exceeding this multiple of its initial value is treated as divergence.
inline constexpr double kDivergenceFactor = 1e6;

namespace detail {

inline GdTrace gd_run_impl(const FactorPair& init, const ObservationSet& obs, const GdConfig& cfg,
                           const DenseMatrix* truth) {
  cfg.validate();
  check_shapes(init, obs.n1(), obs.n2());
  if (truth && (static_cast<std::size_t>(truth->rows()) != obs.n1() ||
                static_cast<std::size_t>(truth->cols()) != obs.n2())) {
    throw ShapeError("gd_run: truth is " + shape_str(*truth));
  }

  const LossTerms terms = [&] {
    if (const auto* l = std::get_if<LooIndex>(&cfg.mode)) {
      if (!truth) throw DomainError("gd_run: leave-one-out mode requires the truth matrix");
      return LossTerms::leave_one_out(obs, *truth, *l);
    }
    return LossTerms::standard(obs);
  }();
  const double truth_norm = truth ? truth->norm() : 0.0;
  if (truth && !(truth_norm > 0.0)) throw DomainError("gd_run: truth has zero norm");

  GdTrace trace;
  FactorPair f = init;
  DenseMatrix product = f.product();
  auto evaluate = [&](const DenseMatrix& p) { return data_term(f, terms, cfg.tau, &p) + regularizer(f); };
  auto record = [&](std::size_t iter, double obj, std::optional<double> change) {
    IterateRecord rec;
    rec.iter = iter;
    if (truth) rec.rel_error = (product - *truth).norm() / truth_norm;
    rec.objective = obj;
    rec.imbalance = gram_gap(f).norm();
    rec.rel_change = change;
    trace.iterates_recorded.push_back(rec);
  };

  const double initial_objective = evaluate(product);
  if (!std::isfinite(initial_objective)) throw DivergenceError("gd_run: non-finite objective", 0);
  record(0, initial_objective, std::nullopt);

  for (std::size_t t = 0; t < cfg.max_iters; ++t) {
    const std::size_t iter = t + 1;
    const FactorPair g = gradient_impl(f, terms, cfg.tau, &product);
    f.x -= cfg.eta * g.x;
    f.y -= cfg.eta * g.y;
    DenseMatrix next = f.product();
    if (!f.x.allFinite() || !f.y.allFinite()) throw DivergenceError("gd_run: non-finite iterate", iter);

    const double obj = evaluate(next);
    if (!std::isfinite(obj)) throw DivergenceError("gd_run: non-finite objective", iter);
    if (initial_objective > 0.0 && obj > kDivergenceFactor * initial_objective) {
      throw DivergenceError("gd_run: objective " + std::to_string(obj) + " exceeds " +
                                std::to_string(kDivergenceFactor) + "x its initial value",
                            iter);
    }

    const double step = (next - product).norm();
    const double base = product.norm();
    const double change = step == 0.0 ? 0.0 : (base > 0.0 ? step / base : std::numeric_limits<double>::infinity());
    product = std::move(next);
    trace.iters_run = iter;

    const bool converged = change <= cfg.rel_change_tol;
    const bool last = converged || iter == cfg.max_iters;
    if (iter % cfg.record_every == 0 || last) record(iter, obj, change);
    if (converged) {
      trace.stop_reason = StopReason::tolerance;
      break;
    }
  }
  trace.final = std::move(f);
  return trace;
}

}  // namespace detail

/// Runs X <- X - eta grad_X f, Y <- Y - eta grad_Y f until max_iters or until the
/// relative Frobenius change of XY^T in one step is <= rel_change_tol.
inline GdTrace gd_run(const FactorPair& init, const ObservationSet& obs, const GdConfig& cfg) {
  return detail::gd_run_impl(init, obs, cfg, nullptr);
}

/// As above, additionally recording ||XY^T - truth||_F / ||truth||_F. Required for
/// leave-one-out mode, where `truth` supplies the clean row/column.
inline GdTrace gd_run(const FactorPair& init, const ObservationSet& obs, const GdConfig& cfg,
                      const DenseMatrix& truth) {
  return detail::gd_run_impl(init, obs, cfg, &truth);
}

/// Leave-one-out auxiliary objective; `l` in [1, 2n] (rows first, then columns).
inline double loo_loss_objective(const FactorPair& f, const ObservationSet& obs, const DenseMatrix& truth,
                                 std::size_t l, double tau) {
  return objective(f, LossTerms::leave_one_out(obs, truth, LooIndex::from_combined(l, obs.n1())), HuberParams{tau});
}

inline FactorPair loo_loss_gradient(const FactorPair& f, const ObservationSet& obs, const DenseMatrix& truth,
                                    std::size_t l, double tau) {
  return gradient(f, LossTerms::leave_one_out(obs, truth, LooIndex::from_combined(l, obs.n1())), HuberParams{tau});
}

}  // namespace robust_mc
