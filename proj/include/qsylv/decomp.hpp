#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qsylv/qmatrix.hpp"

namespace qsylv {

/// Raised when the Jacobi iteration does not converge within its sweep cap.
class NumericFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kMaxJacobiSweeps = 100;

struct ComplexSvd {
  ComplexMatrix U;            // m x k, orthonormal columns
  std::vector<double> sigma;  // k = min(m, n), non-increasing
  ComplexMatrix V;            // n x k, orthonormal columns
};

namespace detail {

using CVec = std::vector<Complex>;

inline Complex cdot(const CVec& a, const CVec& b) {
  Complex s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

inline double cnorm2(const CVec& a) {
  double s = 0.0;
  for (const auto& v : a) s += std::norm(v);
  return s;
}

/// Extend the given orthonormal columns (entries flagged valid) to an orthonormal set by
/// Gram-Schmidt, each time taking the standard basis vector with the largest residual.
inline void complete_orthonormal(std::vector<CVec>& cols, const std::vector<bool>& valid, std::size_t dim) {
  std::vector<const CVec*> basis;
  for (std::size_t c = 0; c < cols.size(); ++c)
    if (valid[c]) basis.push_back(&cols[c]);
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (valid[c]) continue;
    CVec best;
    double best_norm = 0.0;
    for (std::size_t e = 0; e < dim; ++e) {
      CVec v(dim);
      v[e] = 1.0;
      for (int pass = 0; pass < 2; ++pass)
        for (const CVec* b : basis) {
          const Complex p = cdot(*b, v);
          for (std::size_t i = 0; i < dim; ++i) v[i] -= (*b)[i] * p;
        }
      const double nv = std::sqrt(cnorm2(v));
      if (nv > best_norm) {
        best_norm = nv;
        best = std::move(v);
      }
    }
    if (best_norm < 1e-3) throw NumericFailure("complex SVD: could not complete an orthonormal basis");
    for (auto& x : best) x /= best_norm;
    cols[c] = std::move(best);
    basis.push_back(&cols[c]);
  }
}

/// Real-arithmetic kernels for the Jacobi sweeps; std::complex products go through the
/// IEEE-checked library routine, which dominates the sweep cost otherwise.
/// (std::complex<double> is layout-compatible with double[2].)
inline double* re_im(CVec& v) { return reinterpret_cast<double*>(v.data()); }
inline const double* re_im(const CVec& v) { return reinterpret_cast<const double*>(v.data()); }

/// ||a||^2, ||b||^2 and sum conj(a_i) b_i in one pass.
struct PairGram {
  double alpha, beta;
  Complex gamma;
};
inline PairGram pair_gram(const CVec& a, const CVec& b) {
  const double* x = re_im(a);
  const double* y = re_im(b);
  double na = 0.0, nb = 0.0, sr = 0.0, si = 0.0;
  for (std::size_t i = 0; i < 2 * a.size(); i += 2) {
    na += x[i] * x[i] + x[i + 1] * x[i + 1];
    nb += y[i] * y[i] + y[i + 1] * y[i + 1];
    sr += x[i] * y[i] + x[i + 1] * y[i + 1];
    si += x[i] * y[i + 1] - x[i + 1] * y[i];
  }
  return {na, nb, {sr, si}};
}

/// (a_p, a_q) <- (c a_p - s e a_q, s a_p + c e a_q) with e = (er, ei).
inline void rotate(CVec& ap, CVec& aq, double c, double s, double er, double ei) {
  double* x = re_im(ap);
  double* y = re_im(aq);
  for (std::size_t i = 0; i < 2 * ap.size(); i += 2) {
    const double qr = y[i] * er - y[i + 1] * ei;
    const double qi = y[i] * ei + y[i + 1] * er;
    const double pr = x[i], pi = x[i + 1];
    x[i] = c * pr - s * qr;
    x[i + 1] = c * pi - s * qi;
    y[i] = s * pr + c * qr;
    y[i + 1] = s * pi + c * qi;
  }
}

/// One-sided Hestenes Jacobi for a tall (m >= n) matrix given as columns. On return the columns
/// of `a` are U * Sigma (unsorted); V is accumulated only when requested.
inline void jacobi_sweeps(std::vector<CVec>& a, std::vector<CVec>* v) {
  const std::size_t n = a.size();
  const double eps = std::numeric_limits<double>::epsilon();
  double total = 0.0;
  for (const auto& col : a) total += cnorm2(col);
  // Columns this far below the matrix norm are flushed to zero; rotating them only produces
  // denormals that never settle.
  const double floor2 = total * eps * eps * 1e-6;

  bool converged = n < 2;
  for (int sweep = 0; sweep < kMaxJacobiSweeps && !converged; ++sweep) {
    converged = true;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const PairGram pg = pair_gram(a[p], a[q]);
        const double alpha = pg.alpha, beta = pg.beta;
        if (alpha <= floor2 || beta <= floor2) {
          if (alpha != 0.0 && alpha <= floor2) std::fill(a[p].begin(), a[p].end(), Complex{});
          if (beta != 0.0 && beta <= floor2) std::fill(a[q].begin(), a[q].end(), Complex{});
          continue;
        }
        const double g = std::abs(pg.gamma);
        if (g <= eps * std::sqrt(alpha * beta)) continue;
        converged = false;
        const double er = pg.gamma.real() / g, ei = -pg.gamma.imag() / g;  // e^{-i phi}
        const double zeta = (beta - alpha) / (2.0 * g);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        rotate(a[p], a[q], c, s, er, ei);
        if (v) rotate((*v)[p], (*v)[q], c, s, er, ei);
      }
    }
  }
  if (!converged)
    throw NumericFailure("complex SVD: Jacobi iteration did not converge in " +
                         std::to_string(kMaxJacobiSweeps) + " sweeps");
}

inline ComplexSvd jacobi_svd_tall(std::vector<CVec> a, std::size_t m) {
  const std::size_t n = a.size();
  const double eps = std::numeric_limits<double>::epsilon();
  std::vector<CVec> v(n, CVec(n));
  for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;
  jacobi_sweeps(a, &v);

  std::vector<double> norms(n);
  for (std::size_t j = 0; j < n; ++j) norms[j] = std::sqrt(cnorm2(a[j]));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return norms[x] > norms[y]; });

  ComplexSvd out;
  out.sigma.resize(n);
  std::vector<CVec> ucols(n);
  std::vector<bool> valid(n, false);
  // Columns at rounding level carry no reliable direction; their left vectors are rebuilt instead.
  const double negligible = (n == 0 ? 0.0 : norms[order[0]]) * eps * static_cast<double>(m);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t j = order[r];
    out.sigma[r] = norms[j];
    if (norms[j] > negligible) {
      ucols[r] = a[j];
      for (auto& x : ucols[r]) x /= norms[j];
      valid[r] = true;
    }
  }
  complete_orthonormal(ucols, valid, m);
  out.U = ComplexMatrix(m, n);
  out.V = ComplexMatrix(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t i = 0; i < m; ++i) out.U(i, r) = ucols[r][i];
    for (std::size_t i = 0; i < n; ++i) out.V(i, r) = v[order[r]][i];
  }
  return out;
}

}  // namespace detail

/// Thin complex SVD M = U diag(sigma) V^H by one-sided Jacobi.
inline ComplexSvd complex_svd(const ComplexMatrix& M) {
  const std::size_t m = M.rows(), n = M.cols();
  const bool tall = m >= n;
  const std::size_t rows = tall ? m : n, cols = tall ? n : m;
  std::vector<detail::CVec> a(cols, detail::CVec(rows));
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      if (tall) a[c][r] = M(r, c);
      else a[r][c] = std::conj(M(r, c));
    }
  ComplexSvd s = detail::jacobi_svd_tall(std::move(a), rows);
  if (!tall) std::swap(s.U, s.V);
  return s;
}

namespace detail {

/// Quaternion column stored as 4 doubles per entry (w, x, y, z).
using QCol = std::vector<double>;

/// conj(a) * b for quaternions a, b given as 4-double arrays, accumulated into acc.
inline void qconj_mul_add(const double* a, const double* b, double* acc) {
  acc[0] += a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
  acc[1] += a[0] * b[1] - a[1] * b[0] - a[2] * b[3] + a[3] * b[2];
  acc[2] += a[0] * b[2] + a[1] * b[3] - a[2] * b[0] - a[3] * b[1];
  acc[3] += a[0] * b[3] - a[1] * b[2] + a[2] * b[1] - a[3] * b[0];
}

/// out = a * u (Hamilton product).
inline void qmul(const double* a, const double* u, double* out) {
  out[0] = a[0] * u[0] - a[1] * u[1] - a[2] * u[2] - a[3] * u[3];
  out[1] = a[0] * u[1] + a[1] * u[0] + a[2] * u[3] - a[3] * u[2];
  out[2] = a[0] * u[2] - a[1] * u[3] + a[2] * u[0] + a[3] * u[1];
  out[3] = a[0] * u[3] + a[1] * u[2] - a[2] * u[1] + a[3] * u[0];
}

/// Column-pivoted Householder QR run directly over the quaternions (v^* x is real for the usual
/// reflector choice, so the complex construction carries over). Returns the rows of R,
/// conjugated, as columns of length n, stopping once the trailing block is at rounding level
/// (at most eps * ||A||_F is discarded). Columns of `a` are destroyed.
inline std::vector<QCol> quaternion_r_adjoint(std::vector<QCol>& a, std::size_t m) {
  const std::size_t n = a.size();
  const double eps = std::numeric_limits<double>::epsilon();
  double total = 0.0;
  for (const auto& col : a)
    for (double x : col) total += x * x;
  const double drop2 = total * eps * eps;
  std::vector<QCol> rows;
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  QCol v(4 * m);
  for (std::size_t k = 0; k < std::min(m, n); ++k) {
    std::size_t best = k;
    double best_norm = -1.0, rest = 0.0;
    for (std::size_t j = k; j < n; ++j) {
      const double* x = a[perm[j]].data();
      double s2 = 0.0;
      for (std::size_t i = 4 * k; i < 4 * m; ++i) s2 += x[i] * x[i];
      rest += s2;
      if (s2 > best_norm) {
        best_norm = s2;
        best = j;
      }
    }
    if (rest <= drop2) break;
    std::swap(perm[k], perm[best]);
    const double* x = a[perm[k]].data();
    const double xn = std::sqrt(best_norm);
    const double* x0 = x + 4 * k;
    const double a0 = std::sqrt(x0[0] * x0[0] + x0[1] * x0[1] + x0[2] * x0[2] + x0[3] * x0[3]);
    double alpha[4] = {-xn, 0.0, 0.0, 0.0};
    if (a0 > 0.0)
      for (int c = 0; c < 4; ++c) alpha[c] = -xn * x0[c] / a0;
    for (std::size_t i = 4 * k; i < 4 * m; ++i) v[i] = x[i];
    for (int c = 0; c < 4; ++c) v[4 * k + c] -= alpha[c];
    double vv = 0.0;
    for (std::size_t i = 4 * k; i < 4 * m; ++i) vv += v[i] * v[i];
    QCol row(4 * n, 0.0);
    // Entries are keyed by original column so that later swaps leave earlier rows consistent.
    row[4 * perm[k]] = alpha[0];
    for (int c = 1; c < 4; ++c) row[4 * perm[k] + c] = -alpha[c];
    for (std::size_t j = k + 1; j < n; ++j) {
      double* y = a[perm[j]].data();
      if (vv > 0.0) {
        double f[4] = {0.0, 0.0, 0.0, 0.0};  // v^* y
        for (std::size_t i = 4 * k; i < 4 * m; i += 4) qconj_mul_add(&v[i], y + i, f);
        for (double& c : f) c *= 2.0 / vv;
        double t[4];
        for (std::size_t i = 4 * k; i < 4 * m; i += 4) {
          qmul(&v[i], f, t);
          for (int c = 0; c < 4; ++c) y[i + c] -= t[c];
        }
      }
      row[4 * perm[j]] = y[4 * k];
      for (int c = 1; c < 4; ++c) row[4 * perm[j] + c] = -y[4 * k + c];
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

/// One-sided Jacobi over the quaternions: each pair is first aligned by a unit quaternion on the
/// right so that the cross term is real, then rotated by a real Givens rotation. Leaves the
/// columns mutually orthogonal; their norms are the singular values.
inline void quaternion_jacobi(std::vector<QCol>& a) {
  const std::size_t n = a.size();
  if (n < 2) return;
  const std::size_t len = a[0].size();
  const double eps = std::numeric_limits<double>::epsilon();
  double total = 0.0;
  for (const auto& col : a)
    for (double x : col) total += x * x;
  const double floor2 = total * eps * eps * 1e-6;
  bool converged = false;
  for (int sweep = 0; sweep < kMaxJacobiSweeps && !converged; ++sweep) {
    converged = true;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double* x = a[p].data();
        double* y = a[q].data();
        double alpha = 0.0, beta = 0.0, gam[4] = {0.0, 0.0, 0.0, 0.0};
        for (std::size_t i = 0; i < len; i += 4) {
          alpha += x[i] * x[i] + x[i + 1] * x[i + 1] + x[i + 2] * x[i + 2] + x[i + 3] * x[i + 3];
          beta += y[i] * y[i] + y[i + 1] * y[i + 1] + y[i + 2] * y[i + 2] + y[i + 3] * y[i + 3];
          qconj_mul_add(x + i, y + i, gam);
        }
        if (alpha <= floor2 || beta <= floor2) {
          if (alpha != 0.0 && alpha <= floor2) std::fill(a[p].begin(), a[p].end(), 0.0);
          if (beta != 0.0 && beta <= floor2) std::fill(a[q].begin(), a[q].end(), 0.0);
          continue;
        }
        const double g = std::sqrt(gam[0] * gam[0] + gam[1] * gam[1] + gam[2] * gam[2] + gam[3] * gam[3]);
        if (g <= eps * std::sqrt(alpha * beta)) continue;
        converged = false;
        const double u[4] = {gam[0] / g, -gam[1] / g, -gam[2] / g, -gam[3] / g};  // conj(gamma) / |gamma|
        const double zeta = (beta - alpha) / (2.0 * g);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        double yu[4];
        for (std::size_t i = 0; i < len; i += 4) {
          qmul(y + i, u, yu);
          for (int k = 0; k < 4; ++k) {
            const double xp = x[i + k];
            x[i + k] = c * xp - s * yu[k];
            y[i + k] = s * xp + c * yu[k];
          }
        }
      }
    }
  }
  if (!converged)
    throw NumericFailure("quaternion SVD: Jacobi iteration did not converge in " +
                         std::to_string(kMaxJacobiSweeps) + " sweeps");
}

}  // namespace detail

/// Singular values of a quaternion matrix, descending. Computed natively: pivoted quaternion QR,
/// then one-sided Jacobi on the triangular factor, which is no larger than the numerical rank.
/// They agree with the pair-averaged singular values of the complex adjoint.
inline std::vector<double> singular_values(const QMatrix& A) {
  if (A.empty()) return {};
  const std::size_t m = A.rows(), n = A.cols();
  const bool tall = m >= n;
  const std::size_t rows = tall ? m : n, cols = tall ? n : m;
  std::vector<detail::QCol> a(cols, detail::QCol(4 * rows));
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      const Quaternion& q = A(r, c);
      double* dst = tall ? &a[c][4 * r] : &a[r][4 * c];
      dst[0] = q.w;
      dst[1] = tall ? q.x : -q.x;
      dst[2] = tall ? q.y : -q.y;
      dst[3] = tall ? q.z : -q.z;
    }
  std::vector<detail::QCol> rh = detail::quaternion_r_adjoint(a, rows);
  detail::quaternion_jacobi(rh);
  std::vector<double> sigma(cols, 0.0);
  for (std::size_t j = 0; j < rh.size(); ++j) {
    double s2 = 0.0;
    for (double x : rh[j]) s2 += x * x;
    sigma[j] = std::sqrt(s2);
  }
  std::sort(sigma.begin(), sigma.end(), std::greater<>());
  return sigma;
}


/// Default rank threshold max(m,n) * sigma_max * 2^-52.
inline double default_rank_tolerance(std::size_t rows, std::size_t cols, double sigma_max) {
  return static_cast<double>(std::max(rows, cols)) * sigma_max * std::numeric_limits<double>::epsilon();
}

/// Number of singular values above tol, or above max(default threshold, floor) when tol is absent.
inline std::size_t rank(const QMatrix& A, std::optional<double> tol = std::nullopt, double floor = 0.0) {
  const std::vector<double> sigma = singular_values(A);
  if (sigma.empty()) return 0;
  const double tau = tol ? *tol : std::max(floor, default_rank_tolerance(A.rows(), A.cols(), sigma.front()));
  return static_cast<std::size_t>(std::count_if(sigma.begin(), sigma.end(), [&](double s) { return s > tau; }));
}

struct QuaternionSvd {
  QMatrix U;                  // m x k
  std::vector<double> sigma;  // k = min(m, n)
  QMatrix V;                  // n x k
};

namespace detail {

using QVec = std::vector<Quaternion>;

inline Quaternion qdot(const QVec& a, const QVec& b) {
  Quaternion s;
  for (std::size_t i = 0; i < a.size(); ++i) s += conj(a[i]) * b[i];
  return s;
}

inline double qnorm2(const QVec& a) {
  double s = 0.0;
  for (const auto& q : a) s += norm2(q);
  return s;
}

/// Remove the components along an orthonormal quaternion basis (right-scalar projections), twice.
inline void qorthogonalize(QVec& v, const std::vector<QVec>& basis) {
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& b : basis) {
      const Quaternion p = qdot(b, v);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= b[i] * p;
    }
}

/// Quaternion vector whose embedded image has the given complex vector as first column.
inline QVec lift_column(const ComplexMatrix& V, std::size_t col, std::size_t n) {
  QVec q(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Complex v1 = V(i, col), v2 = V(n + i, col);
    q[i] = Quaternion(v1.real(), v1.imag(), -v2.real(), v2.imag());
  }
  return q;
}

inline void complete_quaternion_basis(std::vector<QVec>& basis, std::size_t dim, std::size_t target) {
  while (basis.size() < target) {
    QVec best;
    double best_norm = 0.0;
    for (std::size_t e = 0; e < dim; ++e) {
      QVec v(dim);
      v[e] = 1.0;
      qorthogonalize(v, basis);
      const double nv = std::sqrt(qnorm2(v));
      if (nv > best_norm) {
        best_norm = nv;
        best = std::move(v);
      }
    }
    if (best_norm < 1e-3) throw NumericFailure("quaternion SVD: could not complete an orthonormal basis");
    for (auto& x : best) x *= 1.0 / best_norm;
    basis.push_back(std::move(best));
  }
}

}  // namespace detail

/// Thin quaternion SVD A = U diag(sigma) V*. Right singular vectors are lifted from the complex
/// SVD of the embedding by quaternion Gram-Schmidt, picking within each cluster of equal singular
/// values the candidate that adds the most new direction; U follows as A v / sigma.
inline QuaternionSvd svd(const QMatrix& A) {
  const std::size_t m = A.rows(), n = A.cols(), k = std::min(m, n);
  QuaternionSvd out;
  out.U = QMatrix(m, k);
  out.V = QMatrix(n, k);
  if (k == 0) return out;

  const ComplexSvd cs = complex_svd(embed(A));
  const std::size_t nc = cs.sigma.size();  // 2k
  const double smax = cs.sigma.front();
  const double cluster_tol = 1e-8 * smax + std::numeric_limits<double>::min();

  std::vector<detail::QVec> vbasis;
  std::vector<double> sig;
  std::vector<bool> used(nc, false);
  std::size_t cursor = 0;
  while (vbasis.size() < k && cursor < nc) {
    while (cursor < nc && used[cursor]) ++cursor;
    if (cursor >= nc) break;
    const double lead = cs.sigma[cursor];
    std::size_t best = nc;
    double best_norm = -1.0;
    detail::QVec best_vec;
    for (std::size_t c = cursor; c < nc && lead - cs.sigma[c] <= cluster_tol; ++c) {
      if (used[c]) continue;
      detail::QVec q = detail::lift_column(cs.V, c, n);
      detail::qorthogonalize(q, vbasis);
      const double nq = std::sqrt(detail::qnorm2(q));
      if (nq > best_norm) {
        best_norm = nq;
        best = c;
        best_vec = std::move(q);
      }
    }
    used[best] = true;
    if (best_norm < 0.5) continue;  // already spanned by earlier quaternion directions
    for (auto& x : best_vec) x *= 1.0 / best_norm;
    vbasis.push_back(std::move(best_vec));
    sig.push_back(lead);
  }
  detail::complete_quaternion_basis(vbasis, n, k);
  sig.resize(k, 0.0);

  // Average each embedded pair for the reported values.
  for (std::size_t i = 0; i < k; ++i) out.sigma.push_back(0.5 * (cs.sigma[2 * i] + cs.sigma[2 * i + 1]));

  const double tau = default_rank_tolerance(m, n, smax);
  std::vector<detail::QVec> ubasis;
  std::vector<std::size_t> missing;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t r = 0; r < n; ++r) out.V(r, i) = vbasis[i][r];
    detail::QVec u(m);
    if (out.sigma[i] > tau) {
      for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c < n; ++c) u[r] += A(r, c) * vbasis[i][c];
      detail::qorthogonalize(u, ubasis);
      const double nu = std::sqrt(detail::qnorm2(u));
      for (auto& x : u) x *= 1.0 / nu;
      ubasis.push_back(u);
    } else {
      missing.push_back(i);
    }
  }
  const std::size_t have = ubasis.size();
  detail::complete_quaternion_basis(ubasis, m, k);
  std::size_t next = have;
  std::size_t ui = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const detail::QVec& u = (out.sigma[i] > tau) ? ubasis[ui++] : ubasis[next++];
    for (std::size_t r = 0; r < m; ++r) out.U(r, i) = u[r];
  }
  return out;
}

/// Moore-Penrose inverse together with its projectors and the numerical rank used.
struct PinvBundle {
  QMatrix pinv;        // A^dagger
  QMatrix proj_left;   // L_A = I - A^dagger A
  QMatrix proj_right;  // R_A = I - A A^dagger
  std::size_t rank = 0;
  double tol_used = 0.0;
};

/// A^dagger from the complex SVD of the embedding, truncated at tol (or at max(default, floor)).
/// The projectors are exactly zero (or identity) when A has full column/row rank (or rank zero).
inline PinvBundle pinv(const QMatrix& A, std::optional<double> tol = std::nullopt, double floor = 0.0) {
  const std::size_t m = A.rows(), n = A.cols();
  PinvBundle b;
  if (A.empty()) {
    b.pinv = QMatrix(n, m);
    b.proj_left = QMatrix::identity(n);
    b.proj_right = QMatrix::identity(m);
    return b;
  }
  const ComplexSvd cs = complex_svd(embed(A));
  const std::size_t k = cs.sigma.size() / 2;
  std::vector<double> sigma(k);
  for (std::size_t i = 0; i < k; ++i) sigma[i] = 0.5 * (cs.sigma[2 * i] + cs.sigma[2 * i + 1]);
  const double tau = tol ? *tol : std::max(floor, default_rank_tolerance(m, n, sigma.front()));
  b.tol_used = tau;
  b.rank = static_cast<std::size_t>(std::count_if(sigma.begin(), sigma.end(), [&](double s) { return s > tau; }));

  // Complex pseudo-inverse over the retained pairs, then projected back onto the adjoint structure.
  const std::size_t keep = 2 * b.rank;
  ComplexMatrix P(2 * n, 2 * m);
  for (std::size_t r = 0; r < keep; ++r) {
    const double inv = 1.0 / cs.sigma[r];
    for (std::size_t i = 0; i < 2 * n; ++i) {
      const Complex vi = cs.V(i, r) * inv;
      if (vi == Complex{}) continue;
      for (std::size_t j = 0; j < 2 * m; ++j) P(i, j) += vi * std::conj(cs.U(j, r));
    }
  }
  b.pinv = unembed_projected(P);

  if (b.rank == n) b.proj_left = QMatrix(n, n);
  else if (b.rank == 0) b.proj_left = QMatrix::identity(n);
  else b.proj_left = QMatrix::identity(n) - b.pinv * A;

  if (b.rank == m) b.proj_right = QMatrix(m, m);
  else if (b.rank == 0) b.proj_right = QMatrix::identity(m);
  else b.proj_right = QMatrix::identity(m) - A * b.pinv;
  return b;
}

struct RankPair {
  std::size_t lhs = 0;
  std::size_t rhs = 0;
  bool equal() const { return lhs == rhs; }
};

/// Both sides of the rank identity
///   r([A, B L_D; R_E C, 0]) = r([A, B, 0; C, 0, E; 0, D, 0]) - r(D) - r(E).
/// Meant as a cross-check oracle; solver paths do not call it.
inline RankPair rank_block_oracle(const QMatrix& A, const QMatrix& B, const QMatrix& C, const QMatrix& D,
                                  const QMatrix& E, std::optional<double> tol = std::nullopt) {
  if (B.rows() != A.rows() || C.cols() != A.cols() || D.cols() != B.cols() || E.rows() != C.rows())
    throw DimensionError("rank_block_oracle: incompatible block dimensions");
  const QMatrix BL = B * pinv(D, tol).proj_left;
  const QMatrix RC = pinv(E, tol).proj_right * C;
  const QMatrix lhs_m = block({{A, BL}, {RC, QMatrix(C.rows(), B.cols())}});
  const QMatrix rhs_m = block({{A, B, QMatrix(A.rows(), E.cols())},
                               {C, QMatrix(C.rows(), B.cols()), E},
                               {QMatrix(D.rows(), A.cols()), D, QMatrix(D.rows(), E.cols())}});
  RankPair out;
  out.lhs = rank(lhs_m, tol);
  const std::size_t big = rank(rhs_m, tol), rd = rank(D, tol), re = rank(E, tol);
  out.rhs = big - rd - re;
  return out;
}

}  // namespace qsylv
