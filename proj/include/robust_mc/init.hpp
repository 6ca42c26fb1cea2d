#pragma once

// Robust spectral initialization: top-r SVD of the rescaled, Winsorized
// observation matrix M0 = (1/p) P_Omega(psi_tau(M)), split into balanced
// factors X0 = U0 S0^{1/2}, Y0 = V0 S0^{1/2}.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "robust_mc/errors.hpp"
#include "robust_mc/matcore.hpp"
#include "robust_mc/model.hpp"

namespace robust_mc {

struct SvdResult {
  DenseMatrix u;          // rows x r, orthonormal columns
  std::vector<double> s;  // nonincreasing, >= 0
  DenseMatrix v;          // cols x r, orthonormal columns
};

struct SpectralInit {
  DenseMatrix u0;
  std::vector<double> sigma0;
  DenseMatrix v0;
  FactorPair factors;
};

/// Dense n1 x n2 matrix with psi_tau(M_ij)/p at observed (i, j), zero elsewhere.
/// tau = +inf disables truncation.
inline DenseMatrix truncated_data_matrix(const ObservationSet& obs, double tau) {
  detail::require_tau(tau, "truncated_data_matrix");
  DenseMatrix m = DenseMatrix::Zero(obs.n1(), obs.n2());
  const double inv_p = 1.0 / obs.rate_p();
  for (const Sample& s : obs.samples()) m(s.i, s.j) = inv_p * psi_tau(s.value, tau);
  return m;
}

/// truncated_data_matrix with the selected row (or column) overwritten by the
/// corresponding row (or column) of `truth`.
inline DenseMatrix loo_data_matrix(const ObservationSet& obs, const DenseMatrix& truth, LooIndex l, double tau) {
  if (static_cast<std::size_t>(truth.rows()) != obs.n1() || static_cast<std::size_t>(truth.cols()) != obs.n2()) {
    throw ShapeError("loo_data_matrix: truth is " + shape_str(truth));
  }
  const std::size_t extent = l.axis == LooIndex::Axis::row ? obs.n1() : obs.n2();
  if (l.index >= extent) throw DomainError("loo_data_matrix: index out of range");
  DenseMatrix m = truncated_data_matrix(obs, tau);
  const auto k = static_cast<Eigen::Index>(l.index);
  if (l.axis == LooIndex::Axis::row)
    m.row(k) = truth.row(k);
  else
    m.col(k) = truth.col(k);
  return m;
}

/// Leading r singular triplets. Columns are sign-normalized so that the entry of
/// largest magnitude in each u_i is positive.
inline SvdResult top_r_svd(const DenseMatrix& m, std::size_t r) {
  const auto min_dim = static_cast<std::size_t>(std::min(m.rows(), m.cols()));
  if (r < 1 || r > min_dim) {
    throw ShapeError("top_r_svd: rank " + std::to_string(r) + " not in [1, " + std::to_string(min_dim) + "] for " +
                     shape_str(m));
  }
  if (!m.allFinite()) throw DomainError("top_r_svd: non-finite input");

  Eigen::BDCSVD<DenseMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw NumericError("top_r_svd: SVD did not converge", 0);

  const auto rr = static_cast<Eigen::Index>(r);
  SvdResult out;
  out.u = svd.matrixU().leftCols(rr);
  out.v = svd.matrixV().leftCols(rr);
  out.s.resize(r);
  for (Eigen::Index k = 0; k < rr; ++k) {
    out.s[k] = svd.singularValues()(k);
    Eigen::Index arg = 0;
    out.u.col(k).cwiseAbs().maxCoeff(&arg);
    if (out.u(arg, k) < 0.0) {
      out.u.col(k) *= -1.0;
      out.v.col(k) *= -1.0;
    }
  }

  const double scale = (out.s.empty() ? 0.0 : svd.singularValues()(0)) + 1e-30;
  for (Eigen::Index k = 0; k < rr; ++k) {
    const double res = (m * out.v.col(k) - out.s[k] * out.u.col(k)).norm();
    if (!(res <= 1e-8 * scale)) {
      throw NumericError("top_r_svd: singular pair " + std::to_string(k) + " residual " + std::to_string(res) +
                             " exceeds tolerance",
                         0);
    }
  }
  return out;
}

/// X = U S^{1/2}, Y = V S^{1/2}; exactly balanced.
inline SpectralInit balanced_split(SvdResult svd) {
  Vector root(svd.s.size());
  for (std::size_t k = 0; k < svd.s.size(); ++k) root(k) = std::sqrt(svd.s[k]);
  DenseMatrix x = svd.u * root.asDiagonal();
  DenseMatrix y = svd.v * root.asDiagonal();
  return {std::move(svd.u), std::move(svd.s), std::move(svd.v), FactorPair(std::move(x), std::move(y))};
}

inline SpectralInit spectral_initialize(const ObservationSet& obs, double tau, std::size_t r) {
  if (obs.n1() != obs.n2()) throw ShapeError("spectral_initialize: square observations required");
  return balanced_split(top_r_svd(truncated_data_matrix(obs, tau), r));
}

inline SpectralInit loo_initialize(const ObservationSet& obs, const DenseMatrix& truth, LooIndex l, double tau,
                                   std::size_t r) {
  if (obs.n1() != obs.n2()) throw ShapeError("loo_initialize: square observations required");
  return balanced_split(top_r_svd(loo_data_matrix(obs, truth, l, tau), r));
}

/// `l` uses the combined 1-based numbering of LooIndex::from_combined.
inline SpectralInit loo_initialize(const ObservationSet& obs, const DenseMatrix& truth, std::size_t l, double tau,
                                   std::size_t r) {
  return loo_initialize(obs, truth, LooIndex::from_combined(l, obs.n1()), tau, r);
}

}  // namespace robust_mc
