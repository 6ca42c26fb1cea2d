#pragma once

// Dense linear-algebra kernels shared by every other module. Storage and
// arithmetic are delegated to Eigen; this header fixes the layout (row-major,
// double precision) and adds the shape/domain checks the rest of the library
// relies on.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "robust_mc/errors.hpp"

namespace robust_mc {

using DenseMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

inline std::string shape_str(const DenseMatrix& a) {
  return std::to_string(a.rows()) + "x" + std::to_string(a.cols());
}

inline bool all_finite(const DenseMatrix& a) { return a.allFinite(); }

inline DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: cannot multiply " + shape_str(a) + " by " + shape_str(b));
  }
  DenseMatrix out = a * b;
  return out;
}

namespace detail {
inline void require_nonempty(const DenseMatrix& a, const char* op) {
  if (a.size() == 0) throw DomainError(std::string(op) + ": empty matrix");
}
}  // namespace detail

inline double frob_norm(const DenseMatrix& a) {
  detail::require_nonempty(a, "frob_norm");
  return a.norm();
}

/// Largest row l2 norm.
inline double two_inf_norm(const DenseMatrix& a) {
  detail::require_nonempty(a, "two_inf_norm");
  return a.rowwise().norm().maxCoeff();
}

/// Largest absolute entry.
inline double inf_norm(const DenseMatrix& a) {
  detail::require_nonempty(a, "inf_norm");
  return a.cwiseAbs().maxCoeff();
}

inline double spectral_norm(const DenseMatrix& a) {
  detail::require_nonempty(a, "spectral_norm");
  if (a.rows() == 1 || a.cols() == 1) return a.norm();
  Eigen::BDCSVD<DenseMatrix> svd(a);
  return svd.singularValues()(0);
}

// ---------------------------------------------------------------------------
// Text format: "rows cols" header, then one whitespace-separated row per line.
// 17 significant digits make the round trip exact for doubles.

inline void write_matrix(std::ostream& out, const DenseMatrix& m) {
  out << m.rows() << ' ' << m.cols() << '\n';
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ' ';
      out << m(i, j);
    }
    out << '\n';
  }
}

inline DenseMatrix read_matrix(std::istream& in) {
  long long rows = -1, cols = -1;
  if (!(in >> rows >> cols) || rows < 0 || cols < 0) {
    throw IoError("read_matrix: malformed 'rows cols' header");
  }
  DenseMatrix m(rows, cols);
  std::string tok;
  for (long long i = 0; i < rows; ++i) {
    for (long long j = 0; j < cols; ++j) {
      if (!(in >> tok)) {
        throw IoError("read_matrix: expected " + std::to_string(rows * cols) +
                      " entries, ran out at row " + std::to_string(i));
      }
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size() || !std::isfinite(v)) {
        throw IoError("read_matrix: bad entry '" + tok + "' at (" + std::to_string(i) + "," +
                      std::to_string(j) + ")");
      }
      m(i, j) = v;
    }
  }
  return m;
}

inline void save_matrix(const std::string& path, const DenseMatrix& m) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_matrix(out, m);
  if (!out) throw IoError("write failed for '" + path + "'");
}

inline DenseMatrix load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  try {
    return read_matrix(in);
  } catch (const IoError& e) {
    throw IoError(path + ": " + e.what());
  }
}

}  // namespace robust_mc
