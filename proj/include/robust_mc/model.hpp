#pragma once

// Huber loss, its truncation derivative, and the factored objective
//
//   f(X, Y) = sum_k w_k * rho_tau((X Y^T)_{i_k j_k} - target_k) + 1/8 ||X^T X - Y^T Y||_F^2
//
// The standard estimator uses one term per observed entry with w = 1/(2p);
// the leave-one-out variants reuse the same machinery with a different term
// list (see LossTerms).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "robust_mc/errors.hpp"
#include "robust_mc/matcore.hpp"

namespace robust_mc {

// ---------------------------------------------------------------------------
// Scalar loss

namespace detail {
inline void require_tau(double tau, const char* op) {
  if (!(tau > 0.0)) throw DomainError(std::string(op) + ": tau must be > 0, got " + std::to_string(tau));
}
}  // namespace detail

/// Huber loss: x^2/2 on [-tau, tau], tau|x| - tau^2/2 outside. tau may be +inf.
inline double huber_rho(double x, double tau) {
  detail::require_tau(tau, "huber_rho");
  const double ax = std::abs(x);
  return ax <= tau ? 0.5 * x * x : tau * ax - 0.5 * tau * tau;
}

/// Derivative of huber_rho: clip(x, -tau, tau).
inline double psi_tau(double x, double tau) {
  detail::require_tau(tau, "psi_tau");
  return std::clamp(x, -tau, tau);
}

struct HuberParams {
  double tau = std::numeric_limits<double>::infinity();

  static HuberParams least_squares() { return {std::numeric_limits<double>::infinity()}; }

  /// Adaptive rule tau = c_tau * (||M*||_inf + sigma * sqrt(n p)).
  static HuberParams adaptive(double c_tau, double truth_inf_norm, double sigma, std::size_t n, double p) {
    HuberParams h{c_tau * (truth_inf_norm + sigma * std::sqrt(static_cast<double>(n) * p))};
    detail::require_tau(h.tau, "HuberParams::adaptive");
    return h;
  }

  bool is_least_squares() const { return std::isinf(tau); }
};

// ---------------------------------------------------------------------------
// Factors and observations

/// Candidate M = X Y^T with X, Y both n x r.
struct FactorPair {
  DenseMatrix x;
  DenseMatrix y;

  FactorPair() = default;
  FactorPair(DenseMatrix x_, DenseMatrix y_) : x(std::move(x_)), y(std::move(y_)) { validate(); }

  void validate() const {
    if (x.rows() != y.rows() || x.cols() != y.cols() || x.cols() < 1) {
      throw ShapeError("FactorPair: X is " + shape_str(x) + ", Y is " + shape_str(y) +
                       "; need equal n x r with r >= 1");
    }
  }

  Eigen::Index n() const { return x.rows(); }
  Eigen::Index rank() const { return x.cols(); }

  DenseMatrix product() const { return x * y.transpose(); }

  /// [X; Y], 2n x r.
  DenseMatrix stacked() const {
    DenseMatrix f(x.rows() + y.rows(), x.cols());
    f.topRows(x.rows()) = x;
    f.bottomRows(y.rows()) = y;
    return f;
  }

  FactorPair rotated(const DenseMatrix& q) const { return {x * q, y * q}; }
};

struct Sample {
  std::uint32_t i;
  std::uint32_t j;
  double value;
};

/// Observed entries of an n1 x n2 matrix, sorted by (i, j) without duplicates.
/// rate_p is the nominal Bernoulli sampling rate used for the 1/p rescaling.
class ObservationSet {
 public:
  ObservationSet(std::size_t n1, std::size_t n2, double rate_p, std::vector<Sample> samples)
      : n1_(n1), n2_(n2), rate_p_(rate_p), samples_(std::move(samples)) {
    if (!(rate_p_ > 0.0 && rate_p_ <= 1.0)) {
      throw DomainError("ObservationSet: rate_p must lie in (0, 1], got " + std::to_string(rate_p_));
    }
    for (std::size_t k = 0; k < samples_.size(); ++k) {
      const Sample& s = samples_[k];
      if (s.i >= n1_ || s.j >= n2_) {
        throw ShapeError("ObservationSet: sample (" + std::to_string(s.i) + "," + std::to_string(s.j) +
                         ") outside " + std::to_string(n1_) + "x" + std::to_string(n2_));
      }
      if (!std::isfinite(s.value)) throw DomainError("ObservationSet: non-finite observed value");
      if (k > 0) {
        const Sample& prev = samples_[k - 1];
        if (std::pair(prev.i, prev.j) >= std::pair(s.i, s.j)) {
          throw DomainError("ObservationSet: samples must be strictly increasing in (i, j)");
        }
      }
    }
  }

  /// Builds the set from a dense value matrix and a 0/1 mask of the same shape.
  static ObservationSet from_dense(const DenseMatrix& values, const DenseMatrix& mask, double rate_p) {
    if (values.rows() != mask.rows() || values.cols() != mask.cols()) {
      throw ShapeError("ObservationSet::from_dense: values " + shape_str(values) + " vs mask " + shape_str(mask));
    }
    std::vector<Sample> s;
    for (Eigen::Index i = 0; i < values.rows(); ++i)
      for (Eigen::Index j = 0; j < values.cols(); ++j)
        if (mask(i, j) != 0.0)
          s.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), values(i, j)});
    return {static_cast<std::size_t>(values.rows()), static_cast<std::size_t>(values.cols()), rate_p, std::move(s)};
  }

  std::size_t n1() const noexcept { return n1_; }
  std::size_t n2() const noexcept { return n2_; }
  double rate_p() const noexcept { return rate_p_; }
  const std::vector<Sample>& samples() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }

  /// FNV-1a over indices and value bits; identifies a realization.
  std::uint64_t fingerprint() const {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    auto feed = [&h](std::uint64_t v) {
      for (int b = 0; b < 8; ++b) {
        h ^= (v >> (8 * b)) & 0xFF;
        h *= 0x100000001B3ULL;
      }
    };
    feed(n1_);
    feed(n2_);
    for (const Sample& s : samples_) {
      feed((static_cast<std::uint64_t>(s.i) << 32) | s.j);
      std::uint64_t bits;
      static_assert(sizeof(bits) == sizeof(s.value));
      std::memcpy(&bits, &s.value, sizeof bits);
      feed(bits);
    }
    return h;
  }

 private:
  std::size_t n1_;
  std::size_t n2_;
  double rate_p_;
  std::vector<Sample> samples_;
};

// ---------------------------------------------------------------------------
// Leave-one-out indexing

/// Selects the row or column whose noisy observations are replaced by ground
/// truth. `index` is 0-based.
struct LooIndex {
  enum class Axis { row, col };
  Axis axis = Axis::row;
  std::size_t index = 0;

  static LooIndex row(std::size_t i) { return {Axis::row, i}; }
  static LooIndex col(std::size_t j) { return {Axis::col, j}; }

  /// Combined 1-based numbering: l in [1, n] is row l-1, l in [n+1, 2n] is column l-n-1.
  static LooIndex from_combined(std::size_t l, std::size_t n) {
    if (l < 1 || l > 2 * n) {
      throw DomainError("leave-one-out index l=" + std::to_string(l) + " outside [1, " + std::to_string(2 * n) + "]");
    }
    return l <= n ? row(l - 1) : col(l - n - 1);
  }

  bool selects(std::size_t i, std::size_t j) const { return axis == Axis::row ? i == index : j == index; }
};

// ---------------------------------------------------------------------------
// Weighted residual terms

struct LossTerm {
  std::uint32_t i;
  std::uint32_t j;
  double target;
  double weight;
};

/// The data part of an objective as a flat list of weighted residual terms.
class LossTerms {
 public:
  LossTerms(std::size_t n1, std::size_t n2, std::vector<LossTerm> terms)
      : n1_(n1), n2_(n2), terms_(std::move(terms)) {}

  /// (1/2p) * sum over observed entries.
  static LossTerms standard(const ObservationSet& obs) {
    const double w = 0.5 / obs.rate_p();
    std::vector<LossTerm> t;
    t.reserve(obs.size());
    for (const Sample& s : obs.samples()) t.push_back({s.i, s.j, s.value, w});
    return {obs.n1(), obs.n2(), std::move(t)};
  }

  /// Observed entries outside the selected row/column keep weight 1/(2p); the
  /// selected row/column contributes every entry of `truth` with weight 1/2.
  static LossTerms leave_one_out(const ObservationSet& obs, const DenseMatrix& truth, LooIndex l) {
    if (static_cast<std::size_t>(truth.rows()) != obs.n1() || static_cast<std::size_t>(truth.cols()) != obs.n2()) {
      throw ShapeError("leave_one_out: truth is " + shape_str(truth) + " but observations are " +
                       std::to_string(obs.n1()) + "x" + std::to_string(obs.n2()));
    }
    const std::size_t extent = l.axis == LooIndex::Axis::row ? obs.n1() : obs.n2();
    if (l.index >= extent) throw DomainError("leave_one_out: index out of range");
    const double w = 0.5 / obs.rate_p();
    std::vector<LossTerm> t;
    t.reserve(obs.size() + std::max(obs.n1(), obs.n2()));
    for (const Sample& s : obs.samples())
      if (!l.selects(s.i, s.j)) t.push_back({s.i, s.j, s.value, w});
    if (l.axis == LooIndex::Axis::row) {
      const auto i = static_cast<std::uint32_t>(l.index);
      for (std::uint32_t j = 0; j < obs.n2(); ++j) t.push_back({i, j, truth(i, j), 0.5});
    } else {
      const auto j = static_cast<std::uint32_t>(l.index);
      for (std::uint32_t i = 0; i < obs.n1(); ++i) t.push_back({i, j, truth(i, j), 0.5});
    }
    return {obs.n1(), obs.n2(), std::move(t)};
  }

  std::size_t n1() const noexcept { return n1_; }
  std::size_t n2() const noexcept { return n2_; }
  const std::vector<LossTerm>& terms() const noexcept { return terms_; }

 private:
  std::size_t n1_;
  std::size_t n2_;
  std::vector<LossTerm> terms_;
};

namespace detail {

inline void check_shapes(const FactorPair& f, std::size_t n1, std::size_t n2) {
  f.validate();
  if (static_cast<std::size_t>(f.x.rows()) != n1 || static_cast<std::size_t>(f.y.rows()) != n2) {
    throw ShapeError("factors are " + shape_str(f.x) + "/" + shape_str(f.y) + " but data is " +
                     std::to_string(n1) + "x" + std::to_string(n2));
  }
}

/// X^T X - Y^T Y.
inline DenseMatrix gram_gap(const FactorPair& f) {
  return f.x.transpose() * f.x - f.y.transpose() * f.y;
}

inline double regularizer(const FactorPair& f) { return 0.125 * gram_gap(f).squaredNorm(); }

inline double residual(const FactorPair& f, const LossTerm& t) {
  return f.x.row(t.i).dot(f.y.row(t.j)) - t.target;
}

// `product`, when non-null, is a precomputed XY^T.
inline double data_term(const FactorPair& f, const LossTerms& terms, double tau, const DenseMatrix* product) {
  double acc = 0.0;
  for (const LossTerm& t : terms.terms()) {
    const double res = product ? (*product)(t.i, t.j) - t.target : residual(f, t);
    acc += t.weight * huber_rho(res, tau);
  }
  return acc;
}

inline FactorPair gradient_impl(const FactorPair& f, const LossTerms& terms, double tau, const DenseMatrix* product) {
  const DenseMatrix gap = gram_gap(f);
  FactorPair g;
  g.x = 0.5 * f.x * gap;
  g.y = -0.5 * f.y * gap;
  for (const LossTerm& t : terms.terms()) {
    const double res = product ? (*product)(t.i, t.j) - t.target : residual(f, t);
    const double s = t.weight * psi_tau(res, tau);
    if (s == 0.0) continue;
    g.x.row(t.i) += s * f.y.row(t.j);
    g.y.row(t.j) += s * f.x.row(t.i);
  }
  return g;
}

}  // namespace detail

inline double objective(const FactorPair& f, const LossTerms& terms, HuberParams params) {
  detail::require_tau(params.tau, "objective");
  detail::check_shapes(f, terms.n1(), terms.n2());
  return detail::data_term(f, terms, params.tau, nullptr) + detail::regularizer(f);
}

inline FactorPair gradient(const FactorPair& f, const LossTerms& terms, HuberParams params) {
  detail::require_tau(params.tau, "gradient");
  detail::check_shapes(f, terms.n1(), terms.n2());
  return detail::gradient_impl(f, terms, params.tau, nullptr);
}

/// (1/2p) sum_{Omega} rho_tau((XY^T)_ij - M_ij) + (1/8)||X^T X - Y^T Y||_F^2.
/// tau = +inf gives the regularized least-squares objective.
inline double objective(const FactorPair& f, const ObservationSet& obs, HuberParams params) {
  return objective(f, LossTerms::standard(obs), params);
}

/// Exact gradient of objective():
///   grad_X = (1/2p) P_Omega(psi_tau(XY^T - M)) Y + (1/2) X (X^T X - Y^T Y)
///   grad_Y = (1/2p) P_Omega(psi_tau(XY^T - M))^T X + (1/2) Y (Y^T Y - X^T X)
inline FactorPair gradient(const FactorPair& f, const ObservationSet& obs, HuberParams params) {
  return gradient(f, LossTerms::standard(obs), params);
}

}  // namespace robust_mc
