#pragma once

#include <array>
#include <string>
#include <vector>

#include "qsylv/solvers/common.hpp"

namespace qsylv {

namespace detail {

inline double coef_scale(std::initializer_list<const QMatrix*> blocks, const SolverOptions& opt) {
  return opt.scale ? *opt.scale : max_norm(blocks);
}

}  // namespace detail

/// A X = C.  X = A^dagger C + L_A U.
inline SolveResult solve_left(const QMatrix& A, const QMatrix& C, const SolverOptions& opt = {}) {
  if (A.rows() != C.rows()) throw DimensionError("solve_left: A is " + A.shape_string() + ", C is " + C.shape_string());
  const Numerics nx(opt, detail::coef_scale({&A}, opt));
  const PinvBundle pa = nx.pinv_coef(A);
  SolveResult out;
  out.report.add_mp(nx, "R_A C = 0", pa.proj_right * C, frobenius_norm(C));
  out.report.add_rank("r(C, A) = r(A)", nx.rank(hstack({C, A})), nx.rank(A));
  out.report.finalize();
  if (!out.report.consistent) return out;
  const QMatrix X0 = pa.pinv * C;
  const QMatrix LA = pa.proj_left;
  out.family = SolutionFamily({"X"}, {{"U1", A.cols(), C.cols()}},
                              [X0, LA](const std::vector<QMatrix>& p) { return std::vector<QMatrix>{X0 + LA * p[0]}; });
  return out;
}

/// X A = C.  X = C A^dagger + U R_A.
inline SolveResult solve_right(const QMatrix& A, const QMatrix& C, const SolverOptions& opt = {}) {
  if (A.cols() != C.cols())
    throw DimensionError("solve_right: A is " + A.shape_string() + ", C is " + C.shape_string());
  const Numerics nx(opt, detail::coef_scale({&A}, opt));
  const PinvBundle pa = nx.pinv_coef(A);
  SolveResult out;
  out.report.add_mp(nx, "C L_A = 0", C * pa.proj_left, frobenius_norm(C));
  out.report.add_rank("r(C; A) = r(A)", nx.rank(vstack({C, A})), nx.rank(A));
  out.report.finalize();
  if (!out.report.consistent) return out;
  const QMatrix X0 = C * pa.pinv;
  const QMatrix RA = pa.proj_right;
  out.family = SolutionFamily({"X"}, {{"U1", C.rows(), A.rows()}},
                              [X0, RA](const std::vector<QMatrix>& p) { return std::vector<QMatrix>{X0 + p[0] * RA}; });
  return out;
}

/// A X = C together with X B = D.  X = A^dagger C + L_A D B^dagger + L_A U R_B.
inline SolveResult solve_pair(const QMatrix& A, const QMatrix& C, const QMatrix& B, const QMatrix& D,
                              const SolverOptions& opt = {}) {
  const std::size_t p = A.cols(), q = B.rows();
  if (A.rows() != C.rows() || C.cols() != q || D.rows() != p || D.cols() != B.cols())
    throw DimensionError("solve_pair: incoherent shapes A " + A.shape_string() + ", C " + C.shape_string() + ", B " +
                         B.shape_string() + ", D " + D.shape_string());
  const Numerics nx(opt, detail::coef_scale({&A, &B}, opt));
  const PinvBundle pa = nx.pinv_coef(A), pb = nx.pinv_coef(B);
  SolveResult out;
  auto& rep = out.report;
  rep.add_compat(nx, "A D = C B", A * D - C * B, frobenius_norm(A) * frobenius_norm(D) + frobenius_norm(C) * frobenius_norm(B));
  rep.add_mp(nx, "R_A C = 0", pa.proj_right * C, frobenius_norm(C));
  rep.add_mp(nx, "D L_B = 0", D * pb.proj_left, frobenius_norm(D));
  rep.add_rank("r(C, A) = r(A)", nx.rank(hstack({C, A})), pa.rank);
  rep.add_rank("r(D; B) = r(B)", nx.rank(vstack({D, B})), pb.rank);
  rep.finalize();
  if (!rep.consistent) return out;
  const QMatrix X0 = pa.pinv * C + pa.proj_left * D * pb.pinv;
  const QMatrix LA = pa.proj_left, RB = pb.proj_right;
  out.family = SolutionFamily({"X"}, {{"U1", p, q}}, [X0, LA, RB](const std::vector<QMatrix>& prm) {
    return std::vector<QMatrix>{X0 + LA * prm[0] * RB};
  });
  return out;
}

/// Projector bundle for A X B + C Y D = E with M = R_A C, N = D L_B, S = C L_M.
class TwoTermCore {
 public:
  TwoTermCore(const Numerics& nx, const QMatrix& A, const QMatrix& B, const QMatrix& C, const QMatrix& D,
              double natural)
      : A_(A), B_(B), C_(C), D_(D) {
    if (A.rows() != C.rows() || B.cols() != D.cols())
      throw DimensionError("two-term equation: A " + A.shape_string() + ", B " + B.shape_string() + ", C " +
                           C.shape_string() + ", D " + D.shape_string());
    pa_ = nx.pinv(A, natural);
    pb_ = nx.pinv(B, natural);
    pc_ = nx.pinv(C, natural);
    pd_ = nx.pinv(D, natural);
    M_ = pa_.proj_right * C;
    N_ = D * pb_.proj_left;
    pm_ = nx.pinv(M_, natural);
    pn_ = nx.pinv(N_, natural);
    S_ = C * pm_.proj_left;
    ps_ = nx.pinv(S_, natural);
  }

  std::size_t rows() const { return A_.rows(); }
  std::size_t cols() const { return B_.cols(); }
  /// Shapes of X and Y.
  std::pair<std::size_t, std::size_t> x_shape() const { return {A_.cols(), B_.rows()}; }
  std::pair<std::size_t, std::size_t> y_shape() const { return {C_.cols(), D_.rows()}; }

  /// R_M R_A E, E L_B L_N, R_A E L_D, R_C E L_B; all vanish exactly when the equation is consistent.
  std::array<QMatrix, 4> residuals(const QMatrix& E) const {
    return {pm_.proj_right * (pa_.proj_right * E), (E * pb_.proj_left) * pn_.proj_left,
            pa_.proj_right * E * pd_.proj_left, pc_.proj_right * E * pb_.proj_left};
  }

  /// X = A^+EB^+ - A^+CM^+EB^+ - A^+SC^+EN^+DB^+ - A^+S V R_N DB^+ + L_A U + Z R_B.
  QMatrix x(const QMatrix& E, const QMatrix& V, const QMatrix& U, const QMatrix& Z) const {
    const QMatrix& Ad = pa_.pinv;
    const QMatrix& Bd = pb_.pinv;
    const QMatrix EB = E * Bd;
    QMatrix X = Ad * EB - Ad * (C_ * (pm_.pinv * EB)) - Ad * (S_ * (pc_.pinv * E * pn_.pinv * (D_ * Bd))) -
                Ad * (S_ * V * pn_.proj_right * (D_ * Bd));
    X += pa_.proj_left * U + Z * pb_.proj_right;
    return X;
  }

  /// Y = M^+ED^+ + S^+SC^+EN^+ + L_M L_S W + L_M V R_N + W' R_D.
  QMatrix y(const QMatrix& E, const QMatrix& V, const QMatrix& W, const QMatrix& Wp) const {
    QMatrix Y = pm_.pinv * E * pd_.pinv + ps_.pinv * S_ * (pc_.pinv * E * pn_.pinv);
    Y += pm_.proj_left * (ps_.proj_left * W) + pm_.proj_left * V * pn_.proj_right + Wp * pd_.proj_right;
    return Y;
  }

  const QMatrix& M() const { return M_; }
  const QMatrix& N() const { return N_; }
  const QMatrix& S() const { return S_; }
  const PinvBundle& pa() const { return pa_; }
  const PinvBundle& pb() const { return pb_; }
  const PinvBundle& pc() const { return pc_; }
  const PinvBundle& pd() const { return pd_; }
  const PinvBundle& pm() const { return pm_; }
  const PinvBundle& pn() const { return pn_; }
  const PinvBundle& ps() const { return ps_; }

 private:
  QMatrix A_, B_, C_, D_, M_, N_, S_;
  PinvBundle pa_, pb_, pc_, pd_, pm_, pn_, ps_;
};

/// C3 X3 D3 + C4 X4 D4 = E1 with free parameters Y11..Y15.
inline SolveResult solve_two_term(const QMatrix& C3, const QMatrix& D3, const QMatrix& C4, const QMatrix& D4,
                                  const QMatrix& E1, const SolverOptions& opt = {}) {
  if (C3.rows() != E1.rows() || C4.rows() != E1.rows() || D3.cols() != E1.cols() || D4.cols() != E1.cols())
    throw DimensionError("solve_two_term: incoherent shapes");
  const Numerics nx(opt, detail::coef_scale({&C3, &D3, &C4, &D4}, opt));
  auto core = std::make_shared<TwoTermCore>(nx, C3, D3, C4, D4, nx.scale());
  SolveResult out;
  auto& rep = out.report;
  const auto res = core->residuals(E1);
  const double e = frobenius_norm(E1);
  rep.add_mp(nx, "R_M1 R_C3 E1 = 0", res[0], e);
  rep.add_mp(nx, "E1 L_D3 L_N1 = 0", res[1], e);
  rep.add_mp(nx, "R_C3 E1 L_D4 = 0", res[2], e);
  rep.add_mp(nx, "R_C4 E1 L_D3 = 0", res[3], e);
  rep.add_rank("r(C3 E1 C4) = r(C3 C4)", nx.rank(hstack({C3, E1, C4})), nx.rank(hstack({C3, C4})));
  rep.add_rank("r(D3; E1; D4) = r(D3; D4)", nx.rank(vstack({D3, E1, D4})), nx.rank(vstack({D3, D4})));
  rep.add_rank("r[C3 E1; 0 D4] = r(C3) + r(D4)", nx.rank(block({{C3, E1}, {zero, D4}})), nx.rank(C3) + nx.rank(D4));
  rep.add_rank("r[D3 0; E1 C4] = r(D3) + r(C4)", nx.rank(block({{D3, zero}, {E1, C4}})), nx.rank(D3) + nx.rank(C4));
  rep.finalize();
  if (!rep.consistent) return out;
  const auto [xr, xc] = core->x_shape();
  const auto [yr, yc] = core->y_shape();
  const QMatrix E = E1;
  out.family = SolutionFamily(
      {"X3", "X4"}, {{"Y11", yr, yc}, {"Y12", xr, xc}, {"Y13", xr, xc}, {"Y14", yr, yc}, {"Y15", yr, yc}},
      [core, E](const std::vector<QMatrix>& p) {
        return std::vector<QMatrix>{core->x(E, p[0], p[1], p[2]), core->y(E, p[0], p[3], p[4])};
      });
  return out;
}

inline std::vector<LinearEquation> two_term_equations(const QMatrix& C3, const QMatrix& D3, const QMatrix& C4,
                                                      const QMatrix& D4, const QMatrix& E1) {
  return {{"C3 X3 D3 + C4 X4 D4 = E1", {term(C3, "X3", D3), term(C4, "X4", D4)}, E1}};
}

}  // namespace qsylv
