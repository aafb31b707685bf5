#pragma once

#include <memory>
#include <string>
#include <vector>

#include "qsylv/solvers/basic.hpp"

namespace qsylv {

/// A1 X = C1, X B1 = C2, A2 Y = C3, Y B2 = C4, A3 X B3 + A4 Y B4 = Cc.
/// A1/C1, B1/C2, A2/C3 and B2/C4 may be left 0x0 when the constraint is absent.
struct MixedInstance {
  QMatrix A1, B1, A2, B2, A3, B3, A4, B4, C1, C2, C3, C4, Cc;

  MixedInstance normalized() const {
    MixedInstance o = *this;
    const std::size_t p = A3.cols(), q = B3.rows(), s = A4.cols(), t = B4.rows();
    auto fill = [](QMatrix& mat, std::size_t r, std::size_t c) {
      if (mat.rows() == 0 && mat.cols() == 0) mat = QMatrix(r, c);
    };
    fill(o.A1, 0, p);
    fill(o.C1, o.A1.rows(), q);
    fill(o.B1, q, 0);
    fill(o.C2, p, o.B1.cols());
    fill(o.A2, 0, s);
    fill(o.C3, o.A2.rows(), t);
    fill(o.B2, t, 0);
    fill(o.C4, s, o.B2.cols());
    o.validate();
    return o;
  }

  void validate() const {
    auto need = [](bool ok, const std::string& what) {
      if (!ok) throw DimensionError("mixed system: " + what);
    };
    const std::size_t p = A3.cols(), q = B3.rows(), s = A4.cols(), t = B4.rows();
    need(A3.rows() == Cc.rows() && A4.rows() == Cc.rows(), "A3, A4 must have as many rows as Cc");
    need(B3.cols() == Cc.cols() && B4.cols() == Cc.cols(), "B3, B4 must have as many columns as Cc");
    need(A1.cols() == p && C1.rows() == A1.rows() && C1.cols() == q, "A1 X = C1 shapes");
    need(B1.rows() == q && C2.rows() == p && C2.cols() == B1.cols(), "X B1 = C2 shapes");
    need(A2.cols() == s && C3.rows() == A2.rows() && C3.cols() == t, "A2 Y = C3 shapes");
    need(B2.rows() == t && C4.rows() == s && C4.cols() == B2.cols(), "Y B2 = C4 shapes");
  }
};

inline std::vector<LinearEquation> mixed_equations(const MixedInstance& inst) {
  const MixedInstance I = inst.normalized();
  return {{"A1 X = C1", {left_term(I.A1, "X")}, I.C1},
          {"X B1 = C2", {right_term("X", I.B1)}, I.C2},
          {"A2 Y = C3", {left_term(I.A2, "Y")}, I.C3},
          {"Y B2 = C4", {right_term("Y", I.B2)}, I.C4},
          {"A3 X B3 + A4 Y B4 = Cc", {term(I.A3, "X", I.B3), term(I.A4, "Y", I.B4)}, I.Cc}};
}

namespace detail {

struct MixedWork {
  MixedInstance inst;
  PinvBundle pA1, pB1, pA2, pB2;
  std::unique_ptr<TwoTermCore> core;  // A = A3 L_A1, B = R_B1 B3, C = A4 L_A2, D = R_B2 B4
  QMatrix E, X0, Y0;

  MixedWork(const Numerics& nx, const MixedInstance& in) : inst(in) {
    const auto& I = inst;
    const double s = nx.scale();
    pA1 = nx.pinv(I.A1, s);
    pB1 = nx.pinv(I.B1, s);
    pA2 = nx.pinv(I.A2, s);
    pB2 = nx.pinv(I.B2, s);
    core = std::make_unique<TwoTermCore>(nx, I.A3 * pA1.proj_left, pB1.proj_right * I.B3, I.A4 * pA2.proj_left,
                                         pB2.proj_right * I.B4, s);
    X0 = pA1.pinv * I.C1 + pA1.proj_left * I.C2 * pB1.pinv;
    Y0 = pA2.pinv * I.C3 + pA2.proj_left * I.C4 * pB2.pinv;
    E = I.Cc - I.A3 * pA1.pinv * I.C1 * I.B3 - core_A() * I.C2 * pB1.pinv * I.B3 -
        I.A4 * pA2.pinv * I.C3 * I.B4 - core_C() * I.C4 * pB2.pinv * I.B4;
  }

  QMatrix core_A() const { return inst.A3 * pA1.proj_left; }
  QMatrix core_C() const { return inst.A4 * pA2.proj_left; }

  double e_mass() const {
    const auto& I = inst;
    return frobenius_norm(I.Cc) + frobenius_norm(I.A3) * frobenius_norm(X0) * frobenius_norm(I.B3) +
           frobenius_norm(I.A4) * frobenius_norm(Y0) * frobenius_norm(I.B4);
  }

  std::vector<ParamSpec> params() const {
    const auto [xr, xc] = core->x_shape();
    const auto [yr, yc] = core->y_shape();
    return {{"U", xr, xc}, {"V", yr, yc}, {"W", yr, yc}, {"Z", xr, xc}};
  }

  /// X = A1^+C1 + L_A1 C2 B1^+ + L_A1 (two-term X part) R_B1,
  /// Y = A2^+C3 + L_A2 C4 B2^+ + L_A2 [M^+ E D^+ + L_M S^+S C^+ E N^+ + L_M (V - S^+S V N N^+) + W R_D] R_B2.
  std::vector<QMatrix> assemble(const std::vector<QMatrix>& p) const {
    const QMatrix &U = p[0], &V = p[1], &W = p[2], &Z = p[3];
    const TwoTermCore& c = *core;
    const QMatrix X = X0 + pA1.proj_left * c.x(E, V, U, Z) * pB1.proj_right;
    const QMatrix& LM = c.pm().proj_left;
    const QMatrix SS = c.ps().pinv * c.S();
    QMatrix inner = c.pm().pinv * E * c.pd().pinv + LM * SS * (c.pc().pinv * E * c.pn().pinv);
    inner += LM * (V - SS * V * (c.N() * c.pn().pinv)) + W * c.pd().proj_right;
    const QMatrix Y = Y0 + pA2.proj_left * inner * pB2.proj_right;
    return {X, Y};
  }
};

}  // namespace detail

inline SolveResult solve_mixed_system(const MixedInstance& inst, const SolverOptions& opt = {}) {
  const MixedInstance I = inst.normalized();
  const Numerics nx(opt, opt.scale ? *opt.scale
                                   : max_norm({&I.A1, &I.B1, &I.A2, &I.B2, &I.A3, &I.B3, &I.A4, &I.B4}));
  auto w = std::make_shared<const detail::MixedWork>(nx, I);
  SolveResult out;
  auto& rep = out.report;
  auto nrm = [](const QMatrix& m) { return frobenius_norm(m); };
  rep.add_compat(nx, "A1 C2 = C1 B1", I.A1 * I.C2 - I.C1 * I.B1, nrm(I.A1) * nrm(I.C2) + nrm(I.C1) * nrm(I.B1));
  rep.add_compat(nx, "A2 C4 = C3 B2", I.A2 * I.C4 - I.C3 * I.B2, nrm(I.A2) * nrm(I.C4) + nrm(I.C3) * nrm(I.B2));
  rep.add_mp(nx, "R_A1 C1 = 0", w->pA1.proj_right * I.C1, nrm(I.C1));
  rep.add_mp(nx, "R_A2 C3 = 0", w->pA2.proj_right * I.C3, nrm(I.C3));
  rep.add_mp(nx, "C2 L_B1 = 0", I.C2 * w->pB1.proj_left, nrm(I.C2));
  rep.add_mp(nx, "C4 L_B2 = 0", I.C4 * w->pB2.proj_left, nrm(I.C4));
  const auto res = w->core->residuals(w->E);
  const double e = std::max(nrm(w->E), w->e_mass());
  rep.add_mp(nx, "R_M R_A E = 0", res[0], e);
  rep.add_mp(nx, "E L_B L_N = 0", res[1], e);
  rep.add_mp(nx, "R_A E L_D = 0", res[2], e);
  rep.add_mp(nx, "R_C E L_B = 0", res[3], e);

  auto r = [&](const QMatrix& x) { return nx.rank(x); };
  rep.add_rank("r(A1, C1) = r(A1)", r(hstack({I.A1, I.C1})), w->pA1.rank);
  rep.add_rank("r(A2, C3) = r(A2)", r(hstack({I.A2, I.C3})), w->pA2.rank);
  rep.add_rank("r(C2; B1) = r(B1)", r(vstack({I.C2, I.B1})), w->pB1.rank);
  rep.add_rank("r(C4; B2) = r(B2)", r(vstack({I.C4, I.B2})), w->pB2.rank);
  const QMatrix C1B3 = I.C1 * I.B3, C3B4 = I.C3 * I.B4, A3C2 = I.A3 * I.C2, A4C4 = I.A4 * I.C4;
  rep.add_rank("rank 1", r(block({{I.A1, zero, C1B3}, {I.A3, A4C4, I.Cc}, {zero, I.B2, I.B4}})),
               r(block({{I.A1, zero, zero}, {I.A3, zero, zero}, {zero, I.B2, I.B4}})));
  rep.add_rank("rank 2", r(block({{I.A2, zero, C3B4}, {I.A4, A3C2, I.Cc}, {zero, I.B1, I.B3}})),
               r(block({{I.A2, zero, zero}, {I.A4, zero, zero}, {zero, I.B1, I.B3}})));
  rep.add_rank("rank 3", r(block({{I.B1, zero, I.B3}, {zero, I.B2, I.B4}, {A3C2, A4C4, I.Cc}})),
               r(block({{I.B1, zero, I.B3}, {zero, I.B2, I.B4}})));
  rep.add_rank("rank 4", r(block({{C1B3, I.A1, zero}, {C3B4, zero, I.A2}, {I.Cc, I.A3, I.A4}})),
               r(block({{I.A1, zero}, {zero, I.A2}, {I.A3, I.A4}})));
  rep.finalize();
  if (!rep.consistent) return out;
  out.family = SolutionFamily({"X", "Y"}, w->params(), [w](const std::vector<QMatrix>& p) { return w->assemble(p); });
  return out;
}

}  // namespace qsylv
