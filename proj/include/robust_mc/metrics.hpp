#pragma once

#include <cmath>
#include <string>

#include "robust_mc/errors.hpp"
#include "robust_mc/matcore.hpp"
#include "robust_mc/model.hpp"

namespace robust_mc {

struct AlignedError {
  DenseMatrix rotation;  // r x r orthonormal
  double frob_err = 0.0;
  double spectral_err = 0.0;
  double two_inf_err = 0.0;
};

/// Orthogonal polar factor U V^T of a square matrix. Rank-deficient inputs
/// still yield an orthonormal result (the SVD completes the bases).
inline DenseMatrix sgn_polar(const DenseMatrix& r_mat) {
  if (r_mat.rows() != r_mat.cols() || r_mat.rows() == 0) {
    throw ShapeError("sgn_polar: square nonempty input required, got " + shape_str(r_mat));
  }
  Eigen::JacobiSVD<DenseMatrix> svd(r_mat, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

/// Rotation H = argmin_R ||F R - F*||_F over orthonormal R, where F = [X; Y].
inline AlignedError align(const FactorPair& f, const FactorPair& truth_f) {
  f.validate();
  truth_f.validate();
  if (f.x.rows() != truth_f.x.rows() || f.x.cols() != truth_f.x.cols()) {
    throw ShapeError("align: factors " + shape_str(f.x) + " vs truth " + shape_str(truth_f.x));
  }
  const DenseMatrix fs = f.stacked();
  const DenseMatrix ts = truth_f.stacked();
  AlignedError out;
  out.rotation = sgn_polar(fs.transpose() * ts);
  const DenseMatrix diff = fs * out.rotation - ts;
  out.frob_err = diff.norm();
  out.spectral_err = spectral_norm(diff);
  out.two_inf_err = two_inf_norm(diff);
  return out;
}

/// n ||U||_{2,inf}^2 / r: the smallest mu for which U is mu-incoherent.
inline double incoherence_mu(const DenseMatrix& u) {
  if (u.size() == 0) throw DomainError("incoherence_mu: empty matrix");
  const DenseMatrix gram = u.transpose() * u;
  const double dev = (gram - DenseMatrix::Identity(u.cols(), u.cols())).cwiseAbs().maxCoeff();
  if (dev > 1e-6) throw DomainError("incoherence_mu: columns not orthonormal (deviation " + std::to_string(dev) + ")");
  const double row_max = u.rowwise().squaredNorm().maxCoeff();
  return static_cast<double>(u.rows()) * row_max / static_cast<double>(u.cols());
}

/// ||X^T X - Y^T Y||_F.
inline double imbalance(const FactorPair& f) { return detail::gram_gap(f).norm(); }

/// ||estimate - truth||_F / ||truth||_F.
inline double relative_error(const DenseMatrix& estimate, const DenseMatrix& truth) {
  if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols()) {
    throw ShapeError("relative_error: " + shape_str(estimate) + " vs " + shape_str(truth));
  }
  const double denom = truth.norm();
  if (!(denom > 0.0)) throw DomainError("relative_error: truth has zero norm");
  return (estimate - truth).norm() / denom;
}

inline double relative_error(const FactorPair& f, const DenseMatrix& truth) {
  return relative_error(f.product(), truth);
}

}  // namespace robust_mc
