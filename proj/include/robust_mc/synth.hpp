#pragma once

// Synthetic instances: a random rank-r ground truth with an equidistant
// spectrum, Bernoulli(p) sampling, and the additive noise laws used by the
// experiment presets.

#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "robust_mc/errors.hpp"
#include "robust_mc/matcore.hpp"
#include "robust_mc/metrics.hpp"
#include "robust_mc/model.hpp"
#include "robust_mc/rng.hpp"

namespace robust_mc {

struct GroundTruth {
  DenseMatrix u_star;
  DenseMatrix v_star;
  std::vector<double> sigma_star;
  DenseMatrix m_star;
  double mu = 0.0;
  double kappa = 1.0;
  FactorPair factors_star;
};

namespace noise {

struct None {};

struct Gaussian {
  double sigma = 0.0;
};

/// sigma * t_nu; sigma is a scale, so the variance is sigma^2 nu / (nu - 2).
struct StudentT {
  double nu = 3.0;
  double sigma = 0.0;
};

/// +-sigma/sqrt(delta) with probability delta/2 each, 0 otherwise.
struct Trinomial {
  double delta = 0.01;
  double sigma = 0.0;
};

/// +sigma sqrt((1-delta)/delta) w.p. delta, -sigma sqrt(delta/(1-delta)) w.p. 1-delta.
struct AsymTwoPoint {
  double delta = 1e-4;
  double sigma = 0.0;
};

}  // namespace noise

using NoiseModel = std::variant<noise::None, noise::Gaussian, noise::StudentT, noise::Trinomial, noise::AsymTwoPoint>;

inline void validate(const NoiseModel& model) {
  std::visit(
      [](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (!std::is_same_v<T, noise::None>) {
          if (!(m.sigma >= 0.0) || !std::isfinite(m.sigma)) throw DomainError("noise: sigma must be finite and >= 0");
        }
        if constexpr (std::is_same_v<T, noise::StudentT>) {
          if (!(m.nu > 2.0) || !std::isfinite(m.nu)) throw DomainError("noise: Student t requires nu > 2");
        }
        if constexpr (std::is_same_v<T, noise::Trinomial> || std::is_same_v<T, noise::AsymTwoPoint>) {
          if (!(m.delta > 0.0 && m.delta < 1.0)) throw DomainError("noise: delta must lie in (0, 1)");
        }
      },
      model);
}

inline double noise_sigma(const NoiseModel& model) {
  return std::visit(
      [](const auto& m) -> double {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, noise::None>)
          return 0.0;
        else
          return m.sigma;
      },
      model);
}

/// Same law with a different sigma; None stays None.
inline NoiseModel with_sigma(NoiseModel model, double sigma) {
  std::visit(
      [sigma](auto& m) {
        if constexpr (!std::is_same_v<std::decay_t<decltype(m)>, noise::None>) m.sigma = sigma;
      },
      model);
  return model;
}

/// Family name with shape parameter, e.g. "student_t(2.1)". Never contains commas.
inline std::string noise_name(const NoiseModel& model) {
  std::ostringstream os;
  os.precision(6);
  std::visit(
      [&os](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, noise::None>) os << "none";
        if constexpr (std::is_same_v<T, noise::Gaussian>) os << "gaussian";
        if constexpr (std::is_same_v<T, noise::StudentT>) os << "student_t(" << m.nu << ")";
        if constexpr (std::is_same_v<T, noise::Trinomial>) os << "trinomial(" << m.delta << ")";
        if constexpr (std::is_same_v<T, noise::AsymTwoPoint>) os << "asym_two_point(" << m.delta << ")";
      },
      model);
  return os.str();
}

/// Support points and probabilities of the discrete laws; nullopt otherwise.
inline std::optional<std::vector<std::pair<double, double>>> discrete_support(const NoiseModel& model) {
  using Support = std::vector<std::pair<double, double>>;
  if (std::holds_alternative<noise::None>(model)) return Support{{0.0, 1.0}};
  if (const auto* t = std::get_if<noise::Trinomial>(&model)) {
    const double a = t->sigma / std::sqrt(t->delta);
    return Support{{a, 0.5 * t->delta}, {0.0, 1.0 - t->delta}, {-a, 0.5 * t->delta}};
  }
  if (const auto* a = std::get_if<noise::AsymTwoPoint>(&model)) {
    const double d = a->delta;
    return Support{{a->sigma * std::sqrt((1.0 - d) / d), d}, {-a->sigma * std::sqrt(d / (1.0 - d)), 1.0 - d}};
  }
  return std::nullopt;
}

/// One draw from the law.
inline double draw_noise(const NoiseModel& model, RngStream& rng) {
  validate(model);
  return std::visit(
      [&rng](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, noise::None>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, noise::Gaussian>) {
          return m.sigma * rng.normal();
        } else if constexpr (std::is_same_v<T, noise::StudentT>) {
          return m.sigma * rng.student_t(m.nu);
        } else if constexpr (std::is_same_v<T, noise::Trinomial>) {
          const double u = rng.uniform();
          const double a = m.sigma / std::sqrt(m.delta);
          if (u < 0.5 * m.delta) return a;
          if (u < m.delta) return -a;
          return 0.0;
        } else {
          const double u = rng.uniform();
          if (u < m.delta) return m.sigma * std::sqrt((1.0 - m.delta) / m.delta);
          return -m.sigma * std::sqrt(m.delta / (1.0 - m.delta));
        }
      },
      model);
}

/// U*, V* orthonormalized Gaussian n x r draws; spectrum equidistant from r down to 1.
inline GroundTruth make_ground_truth(std::size_t n, std::size_t r, RngStream& rng) {
  if (r < 1 || r > n) {
    throw ShapeError("make_ground_truth: need 1 <= r <= n, got r=" + std::to_string(r) + ", n=" + std::to_string(n));
  }
  const auto nn = static_cast<Eigen::Index>(n);
  const auto rr = static_cast<Eigen::Index>(r);
  auto orthonormal_draw = [&] {
    Eigen::MatrixXd g(nn, rr);
    for (Eigen::Index i = 0; i < nn; ++i)
      for (Eigen::Index k = 0; k < rr; ++k) g(i, k) = rng.normal();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(nn, rr);
    return DenseMatrix(q);
  };

  GroundTruth gt;
  gt.u_star = orthonormal_draw();
  gt.v_star = orthonormal_draw();
  gt.sigma_star.resize(r);
  for (std::size_t k = 0; k < r; ++k) {
    gt.sigma_star[k] = r == 1 ? 1.0 : static_cast<double>(r - k);
  }
  Vector s(rr), root(rr);
  for (Eigen::Index k = 0; k < rr; ++k) {
    s(k) = gt.sigma_star[k];
    root(k) = std::sqrt(gt.sigma_star[k]);
  }
  gt.m_star = gt.u_star * s.asDiagonal() * gt.v_star.transpose();
  gt.kappa = gt.sigma_star.front() / gt.sigma_star.back();
  gt.mu = std::max(incoherence_mu(gt.u_star), incoherence_mu(gt.v_star));
  gt.factors_star = FactorPair(gt.u_star * root.asDiagonal(), gt.v_star * root.asDiagonal());
  return gt;
}

/// Each entry observed independently with probability p; observed value is
/// M*_ij plus one noise draw. Draw order: row-major over (i, j), one uniform
/// for inclusion followed by the noise draw when included.
inline ObservationSet sample_observations(const GroundTruth& truth, double p, const NoiseModel& noise, RngStream& rng) {
  if (!(p > 0.0 && p <= 1.0)) throw DomainError("sample_observations: p must lie in (0, 1]");
  validate(noise);
  const auto n1 = static_cast<std::uint32_t>(truth.m_star.rows());
  const auto n2 = static_cast<std::uint32_t>(truth.m_star.cols());
  std::vector<Sample> samples;
  samples.reserve(static_cast<std::size_t>(p * n1 * n2 * 1.1) + 16);
  for (std::uint32_t i = 0; i < n1; ++i) {
    for (std::uint32_t j = 0; j < n2; ++j) {
      if (!rng.bernoulli(p)) continue;
      samples.push_back({i, j, truth.m_star(i, j) + draw_noise(noise, rng)});
    }
  }
  return {n1, n2, p, std::move(samples)};
}

}  // namespace robust_mc
