#ifndef MIXSEM_SCALAR_HPP
#define MIXSEM_SCALAR_HPP

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/eigen.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace mixsem {

// Exact rationals. Expression templates are off so the type composes with Eigen.
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                              boost::multiprecision::et_off>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixQ = Matrix<Rational>;
using VectorQ = Vector<Rational>;

template <typename Scalar>
inline constexpr bool is_exact_v = std::is_same_v<Scalar, Rational>;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed user input (graph files, CSV, class tables).
class DataError : public Error {
 public:
  using Error::Error;
};

/// A library invariant failed; always indicates a bug or a measure-zero draw.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

/// I - Lambda is singular.
class NonInvertible : public Error {
 public:
  using Error::Error;
};

// Small-matrix kernels shared by the double and exact paths.

/// Rank by Gaussian elimination. Exact for Rational; for double a pivot is
/// treated as zero below `tol` times the largest entry.
template <typename Scalar>
int matrix_rank(Matrix<Scalar> m, double tol = 1e-10) {
  const Eigen::Index rows = m.rows();
  const Eigen::Index cols = m.cols();
  double scale = 0.0;
  if constexpr (!is_exact_v<Scalar>) {
    scale = m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
  }
  int rank = 0;
  for (Eigen::Index c = 0; c < cols && rank < rows; ++c) {
    Eigen::Index pivot = -1;
    if constexpr (is_exact_v<Scalar>) {
      for (Eigen::Index r = rank; r < rows; ++r) {
        if (m(r, c) != 0) {
          pivot = r;
          break;
        }
      }
    } else {
      double best = tol * (scale > 0 ? scale : 1.0);
      for (Eigen::Index r = rank; r < rows; ++r) {
        if (std::abs(m(r, c)) > best) {
          best = std::abs(m(r, c));
          pivot = r;
        }
      }
    }
    if (pivot < 0) continue;
    m.row(pivot).swap(m.row(rank));
    for (Eigen::Index r = rank + 1; r < rows; ++r) {
      if (m(r, c) == 0) continue;
      const Scalar f = m(r, c) / m(rank, c);
      m.row(r) -= f * m.row(rank);
    }
    ++rank;
  }
  return rank;
}

/// Solves A x = b. Returns false when A is singular (exactly, or numerically
/// for double with relative pivot threshold `tol`).
template <typename Scalar>
bool solve_square(Matrix<Scalar> a, Vector<Scalar> b, Vector<Scalar>& x, double tol = 1e-12) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n || b.size() != n) throw std::invalid_argument("solve_square: shape mismatch");
  double scale = 0.0;
  if constexpr (!is_exact_v<Scalar>) {
    scale = n == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
  }
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::Index pivot = -1;
    if constexpr (is_exact_v<Scalar>) {
      for (Eigen::Index r = c; r < n; ++r) {
        if (a(r, c) != 0) {
          pivot = r;
          break;
        }
      }
    } else {
      double best = tol * (scale > 0 ? scale : 1.0);
      for (Eigen::Index r = c; r < n; ++r) {
        if (std::abs(a(r, c)) > best) {
          best = std::abs(a(r, c));
          pivot = r;
        }
      }
    }
    if (pivot < 0) return false;
    if (pivot != c) {
      a.row(pivot).swap(a.row(c));
      std::swap(b(pivot), b(c));
    }
    for (Eigen::Index r = c + 1; r < n; ++r) {
      if (a(r, c) == 0) continue;
      const Scalar f = a(r, c) / a(c, c);
      a.row(r) -= f * a.row(c);
      b(r) -= f * b(c);
    }
  }
  x.resize(n);
  for (Eigen::Index r = n - 1; r >= 0; --r) {
    Scalar s = b(r);
    for (Eigen::Index c = r + 1; c < n; ++c) s -= a(r, c) * x(c);
    x(r) = s / a(r, r);
  }
  return true;
}

/// Inverse via Gauss-Jordan; throws NonInvertible on a singular input.
template <typename Scalar>
Matrix<Scalar> inverse(const Matrix<Scalar>& a, double tol = 1e-12) {
  const Eigen::Index n = a.rows();
  Matrix<Scalar> inv(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    Vector<Scalar> e = Vector<Scalar>::Zero(n);
    e(j) = Scalar(1);
    Vector<Scalar> x;
    if (!solve_square<Scalar>(a, e, x, tol)) throw NonInvertible("matrix is singular");
    inv.col(j) = x;
  }
  return inv;
}

template <typename Scalar>
double to_double(const Scalar& s) {
  if constexpr (is_exact_v<Scalar>) {
    return s.template convert_to<double>();
  } else {
    return static_cast<double>(s);
  }
}

inline std::string to_string(const Rational& q) { return q.str(); }

}  // namespace mixsem

#endif  // MIXSEM_SCALAR_HPP
