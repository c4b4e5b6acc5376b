#include "leanreg/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "leanreg/error.hpp"

namespace leanreg {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxJacobiSweeps = 100;

void require(bool ok, ErrorCode code, const char* what) {
  if (!ok) throw Error(code, what);
}

void require_same_shape(const Mat& a, const Mat& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::dimension_mismatch,
                std::string(op) + ": shapes " + std::to_string(a.rows()) + "x" +
                    std::to_string(a.cols()) + " and " + std::to_string(b.rows()) +
                    "x" + std::to_string(b.cols()));
  }
}

void require_symmetric(const Mat& a, const char* op) {
  require(a.is_square(), ErrorCode::dimension_mismatch, op);
  if (!is_symmetric(a)) {
    throw Error(ErrorCode::not_symmetric, std::string(op) + ": matrix is not symmetric");
  }
}

}  // namespace

bool Vec::all_finite() const noexcept {
  return std::all_of(v_.begin(), v_.end(), [](double x) { return std::isfinite(x); });
}

Mat::Mat(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() == 0 ? 0 : rows.begin()->size()) {
  a_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) {
      throw Error(ErrorCode::dimension_mismatch, "Mat: ragged initializer");
    }
    a_.insert(a_.end(), r.begin(), r.end());
  }
}

Mat Mat::identity(std::size_t n) {
  Mat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Mat Mat::diagonal(const Vec& d) {
  Mat m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Vec Mat::row_vec(std::size_t i) const {
  auto r = row(i);
  return Vec(std::vector<double>(r.begin(), r.end()));
}

Vec Mat::col_vec(std::size_t j) const {
  Vec c(rows_);
  for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
  return c;
}

Vec Mat::diag() const {
  const std::size_t k = std::min(rows_, cols_);
  Vec d(k);
  for (std::size_t i = 0; i < k; ++i) d[i] = (*this)(i, i);
  return d;
}

bool Mat::all_finite() const noexcept {
  return std::all_of(a_.begin(), a_.end(), [](double x) { return std::isfinite(x); });
}

Vec operator+(const Vec& a, const Vec& b) {
  require(a.size() == b.size(), ErrorCode::dimension_mismatch, "Vec +: length mismatch");
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

Vec operator-(const Vec& a, const Vec& b) {
  require(a.size() == b.size(), ErrorCode::dimension_mismatch, "Vec -: length mismatch");
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

Vec operator*(double s, const Vec& a) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
  return r;
}

Mat operator+(const Mat& a, const Mat& b) {
  require_same_shape(a, b, "Mat +");
  Mat r(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = a(i, j) + b(i, j);
  return r;
}

Mat operator-(const Mat& a, const Mat& b) {
  require_same_shape(a, b, "Mat -");
  Mat r(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = a(i, j) - b(i, j);
  return r;
}

Mat operator*(double s, const Mat& a) {
  Mat r(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = s * a(i, j);
  return r;
}

Mat operator*(const Mat& a, const Mat& b) {
  require(a.cols() == b.rows(), ErrorCode::dimension_mismatch, "Mat *: inner dimension");
  Mat r(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) r(i, j) += aik * b(k, j);
    }
  }
  return r;
}

Vec operator*(const Mat& a, const Vec& x) {
  require(a.cols() == x.size(), ErrorCode::dimension_mismatch, "Mat * Vec: inner dimension");
  Vec r(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) r[i] = dot(a.row(i), x.span());
  return r;
}

Mat transpose(const Mat& a) {
  Mat t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

double dot(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), ErrorCode::dimension_mismatch, "dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const Vec& a) {
  // Scaled to avoid overflow for large entries.
  const double scale = max_abs(a);
  if (scale == 0.0) return 0.0;
  double s = 0.0;
  for (double v : a) {
    const double r = v / scale;
    s += r * r;
  }
  return scale * std::sqrt(s);
}

double max_abs(const Mat& a) {
  double m = 0.0;
  for (double v : a.data()) m = std::max(m, std::abs(v));
  return m;
}

double max_abs(const Vec& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

double quad_form(const Mat& a, const Vec& x) { return dot(x.span(), (a * x).span()); }

Mat symmetric_part(const Mat& a) {
  require(a.is_square(), ErrorCode::dimension_mismatch, "symmetric_part: not square");
  Mat s(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) s(i, j) = 0.5 * (a(i, j) + a(j, i));
  return s;
}

bool is_symmetric(const Mat& a, double rel_tol) {
  if (!a.is_square()) return false;
  const double tol = rel_tol * max_abs(a);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j)
      if (std::abs(a(i, j) - a(j, i)) > tol) return false;
  return true;
}

Mat cholesky(const Mat& a) {
  require_symmetric(a, "cholesky");
  const std::size_t p = a.rows();
  double max_diag = 0.0;
  for (std::size_t i = 0; i < p; ++i) max_diag = std::max(max_diag, a(i, i));
  if (!(max_diag > 0.0)) {
    throw Error(ErrorCode::not_positive_definite, "cholesky: non-positive diagonal");
  }
  const double pivot_floor = static_cast<double>(p) * kEps * max_diag;

  Mat l(p, p);
  for (std::size_t j = 0; j < p; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > pivot_floor)) {
      throw Error(ErrorCode::not_positive_definite,
                  "cholesky: pivot " + std::to_string(j) + " below threshold");
    }
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < p; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  return l;
}

namespace {

// Forward then back substitution with a Cholesky factor, in place.
void cholesky_solve_in_place(const Mat& l, std::span<double> x) {
  const std::size_t p = l.rows();
  for (std::size_t i = 0; i < p; ++i) {
    double s = x[i];
    for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * x[k];
    x[i] = s / l(i, i);
  }
  for (std::size_t i = p; i-- > 0;) {
    double s = x[i];
    for (std::size_t k = i + 1; k < p; ++k) s -= l(k, i) * x[k];
    x[i] = s / l(i, i);
  }
}

}  // namespace

Vec solve_spd(const Mat& a, const Vec& b) {
  require(a.rows() == b.size(), ErrorCode::dimension_mismatch, "solve_spd: rhs length");
  const Mat l = cholesky(a);
  Vec x = b;
  cholesky_solve_in_place(l, x.span());
  return x;
}

Mat solve_spd(const Mat& a, const Mat& b) {
  require(a.rows() == b.rows(), ErrorCode::dimension_mismatch, "solve_spd: rhs rows");
  const Mat l = cholesky(a);
  Mat x(b.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    Vec c = b.col_vec(j);
    cholesky_solve_in_place(l, c.span());
    for (std::size_t i = 0; i < b.rows(); ++i) x(i, j) = c[i];
  }
  return x;
}

Mat inverse_spd(const Mat& a) {
  return symmetric_part(solve_spd(a, Mat::identity(a.rows())));
}

SymmetricEigen eig_sym(const Mat& a) {
  require_symmetric(a, "eig_sym");
  const std::size_t n = a.rows();
  Mat m = symmetric_part(a);
  Mat v = Mat::identity(n);

  auto off_diagonal = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += m(i, j) * m(i, j);
    return s;
  };
  double frob = 0.0;
  for (double x : m.data()) frob += x * x;
  const double tol = 10.0 * static_cast<double>(n) * kEps;
  const double target = tol * tol * frob;

  bool converged = false;
  for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
    if (off_diagonal() <= target) {
      converged = true;
      break;
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = m(p, q);
        if (apq == 0.0) continue;
        const double theta = (m(q, q) - m(p, p)) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double mkp = m(k, p);
          const double mkq = m(k, q);
          m(k, p) = c * mkp - s * mkq;
          m(k, q) = s * mkp + c * mkq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double mpk = m(p, k);
          const double mqk = m(q, k);
          m(p, k) = c * mpk - s * mqk;
          m(q, k) = s * mpk + c * mqk;
        }
        m(p, q) = 0.0;
        m(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  if (!converged && off_diagonal() > target) {
    throw Error(ErrorCode::no_convergence, "eig_sym: Jacobi sweep limit reached");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return m(i, i) < m(j, j); });
  SymmetricEigen out{Vec(n), Mat(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = m(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

EigenExtremes eig_sym_extremes(const Mat& a) {
  if (a.rows() == 0) throw Error(ErrorCode::dimension_mismatch, "eig_sym_extremes: empty");
  const auto e = eig_sym(a);
  return {e.values[0], e.values[e.values.size() - 1]};
}

double op_norm(const Mat& a) {
  if (a.empty()) return 0.0;
  if (a.is_square() && is_symmetric(a)) {
    const auto [lo, hi] = eig_sym_extremes(a);
    return std::max(std::abs(lo), std::abs(hi));
  }
  const Mat ata = symmetric_part(transpose(a) * a);
  return std::sqrt(std::max(0.0, eig_sym_extremes(ata).lambda_max));
}

bool psd_leq(const Mat& a, const Mat& b, double tol) {
  require_same_shape(a, b, "psd_leq");
  require_symmetric(a, "psd_leq");
  require_symmetric(b, "psd_leq");
  return eig_sym_extremes(symmetric_part(b - a)).lambda_min >= -tol;
}

Mat inv_sqrt_spd(const Mat& a) {
  const auto e = eig_sym(a);
  const std::size_t n = a.rows();
  const double hi = e.values[n - 1];
  if (!(hi > 0.0) || !(e.values[0] > static_cast<double>(n) * kEps * hi)) {
    throw Error(ErrorCode::not_positive_definite, "inv_sqrt_spd: matrix is not positive definite");
  }
  Mat m(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double w = 1.0 / std::sqrt(e.values[k]);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m(i, j) += w * e.vectors(i, k) * e.vectors(j, k);
  }
  return symmetric_part(m);
}

}  // namespace leanreg
