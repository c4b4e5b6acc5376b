#pragma once

// Small dense linear algebra for the p x p problems that OLS inference needs.
// Everything here is a pure function of its arguments; p is expected to be
// small (tens), so robustness is preferred over asymptotic speed.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace leanreg {

class Vec {
 public:
  Vec() = default;
  explicit Vec(std::size_t n, double fill = 0.0) : v_(n, fill) {}
  explicit Vec(std::vector<double> values) : v_(std::move(values)) {}
  Vec(std::initializer_list<double> values) : v_(values) {}

  std::size_t size() const noexcept { return v_.size(); }
  bool empty() const noexcept { return v_.empty(); }

  double& operator[](std::size_t i) { return v_[i]; }
  double operator[](std::size_t i) const { return v_[i]; }

  std::span<double> span() noexcept { return v_; }
  std::span<const double> span() const noexcept { return v_; }
  const std::vector<double>& values() const noexcept { return v_; }

  auto begin() noexcept { return v_.begin(); }
  auto end() noexcept { return v_.end(); }
  auto begin() const noexcept { return v_.begin(); }
  auto end() const noexcept { return v_.end(); }

  bool all_finite() const noexcept;

  friend bool operator==(const Vec&, const Vec&) = default;

 private:
  std::vector<double> v_;
};

/// Row-major dense matrix.
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), a_(rows * cols, fill) {}
  Mat(std::initializer_list<std::initializer_list<double>> rows);

  static Mat identity(std::size_t n);
  static Mat diagonal(const Vec& d);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return a_.empty(); }
  bool is_square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {a_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const {
    return {a_.data() + i * cols_, cols_};
  }
  Vec row_vec(std::size_t i) const;
  Vec col_vec(std::size_t j) const;
  Vec diag() const;

  std::span<const double> data() const noexcept { return a_; }

  bool all_finite() const noexcept;

  friend bool operator==(const Mat&, const Mat&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> a_;
};

// Elementwise and algebraic helpers. Dimension errors throw
// Error{dimension_mismatch}.
Vec operator+(const Vec& a, const Vec& b);
Vec operator-(const Vec& a, const Vec& b);
Vec operator*(double s, const Vec& a);
Mat operator+(const Mat& a, const Mat& b);
Mat operator-(const Mat& a, const Mat& b);
Mat operator*(double s, const Mat& a);
Mat operator*(const Mat& a, const Mat& b);
Vec operator*(const Mat& a, const Vec& x);

Mat transpose(const Mat& a);
double dot(std::span<const double> a, std::span<const double> b);
double norm2(const Vec& a);
double max_abs(const Mat& a);
double max_abs(const Vec& a);
/// x' a x
double quad_form(const Mat& a, const Vec& x);
/// (a + a') / 2; used only on products that are symmetric in exact arithmetic.
Mat symmetric_part(const Mat& a);

/// Relative symmetry gate: |a(i,j) - a(j,i)| <= 1e-10 * max|a|.
inline constexpr double kSymmetryTol = 1e-10;
bool is_symmetric(const Mat& a, double rel_tol = kSymmetryTol);

/// Lower-triangular Cholesky factor. Throws not_symmetric, or
/// not_positive_definite when a pivot falls to p * eps * max-diagonal or below.
Mat cholesky(const Mat& a);

Vec solve_spd(const Mat& a, const Vec& b);
/// Solves a X = B column by column with a single factorization.
Mat solve_spd(const Mat& a, const Mat& b);
Mat inverse_spd(const Mat& a);

struct SymmetricEigen {
  Vec values;   // ascending
  Mat vectors;  // column k is the unit eigenvector for values[k]
};

/// Cyclic Jacobi eigendecomposition. Throws not_symmetric or no_convergence.
SymmetricEigen eig_sym(const Mat& a);

struct EigenExtremes {
  double lambda_min;
  double lambda_max;
};
EigenExtremes eig_sym_extremes(const Mat& a);

/// Spectral norm. Symmetric input uses max |eigenvalue| directly; otherwise
/// sqrt(lambda_max(a'a)).
double op_norm(const Mat& a);

/// a <= b in the Loewner order, i.e. lambda_min(b - a) >= -tol.
bool psd_leq(const Mat& a, const Mat& b, double tol);

/// Symmetric m with m a m = I.
Mat inv_sqrt_spd(const Mat& a);

}  // namespace leanreg
