#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "qsylv/solvers/basic.hpp"

namespace qsylv {

/// A1 X1 + X2 B1 + A2 Y1 B2 + A3 Y2 B3 + A4 Y3 B4 = B.
struct FiveTermInstance {
  QMatrix A1, B1, A2, B2, A3, B3, A4, B4, B;

  void validate() const {
    const std::size_t m = B.rows(), n = B.cols();
    auto need = [](bool ok, const std::string& what) {
      if (!ok) throw DimensionError("five-term instance: " + what);
    };
    need(A1.rows() == m && A2.rows() == m && A3.rows() == m && A4.rows() == m, "A blocks must have rows(B) rows");
    need(B1.cols() == n && B2.cols() == n && B3.cols() == n && B4.cols() == n, "B blocks must have cols(B) columns");
  }

  double coefficient_scale() const { return max_norm({&A1, &B1, &A2, &B2, &A3, &B3, &A4, &B4}); }
};

struct FiveTermIntermediates {
  QMatrix A11, A22, A33, B11, B22, B33, T1, N1, M1, S1;
  QMatrix C, C1, C2, C3, C4, D, D1, D2, D3, D4, E1, E2, E3, E4;
  QMatrix C11, D11, C22, D22, C33, D33, F1, F2, E11, E22, E33, E44, M, N, F, E, S, G1, G2, F11, F22;
};

namespace detail {

/// Intermediates plus the pseudo-inverse bundles the solution display needs.
struct FiveTermWork {
  FiveTermInstance inst;
  FiveTermIntermediates im;
  PinvBundle pA1, pB1, pC1, pC2, pC3, pC4, pD1, pD2, pD3, pD4, pC11, pD11;
  std::unique_ptr<TwoTermCore> core1;  // A11 Y1 B11 + A22 Y2 B22 = T
  std::unique_ptr<TwoTermCore> core2;  // E11 V3 E33 + E22 W3 E44 = E

  FiveTermWork(const Numerics& nx, FiveTermInstance in) : inst(std::move(in)) {
    inst.validate();
    const double s = nx.scale();
    auto& I = inst;
    auto& m = im;
    pA1 = nx.pinv(I.A1, s);
    pB1 = nx.pinv(I.B1, s);
    const QMatrix& RA1 = pA1.proj_right;
    const QMatrix& LB1 = pB1.proj_left;
    m.A11 = RA1 * I.A2;
    m.A22 = RA1 * I.A3;
    m.A33 = RA1 * I.A4;
    m.B11 = I.B2 * LB1;
    m.B22 = I.B3 * LB1;
    m.B33 = I.B4 * LB1;
    m.T1 = RA1 * I.B * LB1;

    core1 = std::make_unique<TwoTermCore>(nx, m.A11, m.B11, m.A22, m.B22, s);
    m.M1 = core1->M();
    m.N1 = core1->N();
    m.S1 = core1->S();
    const PinvBundle& pA11 = core1->pa();
    const PinvBundle& pB11 = core1->pb();
    const PinvBundle& pA22 = core1->pc();
    const PinvBundle& pB22 = core1->pd();

    m.C = core1->pm().proj_right * pA11.proj_right;
    m.C1 = m.C * m.A33;
    m.C2 = pA11.proj_right * m.A33;
    m.C3 = pA22.proj_right * m.A33;
    m.C4 = m.A33;
    m.D = pB11.proj_left * core1->pn().proj_left;
    m.D1 = m.B33;
    m.D2 = m.B33 * pB22.proj_left;
    m.D3 = m.B33 * pB11.proj_left;
    m.D4 = m.B33 * m.D;
    m.E1 = m.C * m.T1;
    m.E2 = pA11.proj_right * m.T1 * pB22.proj_left;
    m.E3 = pA22.proj_right * m.T1 * pB11.proj_left;
    m.E4 = m.T1 * m.D;

    pC1 = nx.pinv(m.C1, s);
    pC2 = nx.pinv(m.C2, s);
    pC3 = nx.pinv(m.C3, s);
    pC4 = nx.pinv(m.C4, s);
    pD1 = nx.pinv(m.D1, s);
    pD2 = nx.pinv(m.D2, s);
    pD3 = nx.pinv(m.D3, s);
    pD4 = nx.pinv(m.D4, s);

    m.C11 = hstack({pC2.proj_left, pC4.proj_left});
    m.D11 = vstack({pD1.proj_right, pD3.proj_right});
    m.C22 = pC1.proj_left;
    m.D22 = pD2.proj_right;
    m.C33 = pC3.proj_left;
    m.D33 = pD4.proj_right;
    m.F1 = pC1.pinv * m.E1 * pD1.pinv + pC1.proj_left * (pC2.pinv * m.E2 * pD2.pinv);
    m.F2 = pC3.pinv * m.E3 * pD3.pinv + pC3.proj_left * (pC4.pinv * m.E4 * pD4.pinv);

    pC11 = nx.pinv_proj(m.C11);
    pD11 = nx.pinv_proj(m.D11);
    m.E11 = pC11.proj_right * m.C22;
    m.E22 = pC11.proj_right * m.C33;
    m.E33 = m.D22 * pD11.proj_left;
    m.E44 = m.D33 * pD11.proj_left;
    core2 = std::make_unique<TwoTermCore>(nx, m.E11, m.E33, m.E22, m.E44, 1.0);
    m.M = core2->M();
    m.N = core2->N();
    m.S = core2->S();
    m.F = m.F2 - m.F1;
    m.E = pC11.proj_right * m.F * pD11.proj_left;
    m.G1 = m.E2 - m.C2 * (pC1.pinv * m.E1 * pD1.pinv) * m.D2;
    m.G2 = m.E4 - m.C4 * (pC3.pinv * m.E3 * pD3.pinv) * m.D4;
    m.F11 = m.C2 * pC1.proj_left;
    m.F22 = m.C4 * pC3.proj_left;
  }

  /// `names` gives the letters used for C_i, D_i, E_i; `ref_floor` is the magnitude of the data T1 came from.
  void conditions(const Numerics& nx, SolvabilityReport& rep, double ref_floor,
                  const std::array<std::string, 3>& names = {"C", "D", "E"}) const {
    const auto& m = im;
    const double t = std::max(frobenius_norm(m.T1), ref_floor);
    const std::string &c = names[0], &d = names[1], &el = names[2];
    const PinvBundle* pc[] = {&pC1, &pC2, &pC3, &pC4};
    const PinvBundle* pd[] = {&pD1, &pD2, &pD3, &pD4};
    const QMatrix* e[] = {&m.E1, &m.E2, &m.E3, &m.E4};
    for (int i = 0; i < 4; ++i) {
      const std::string k = std::to_string(i + 1);
      rep.add_mp(nx, "R_" + c + k + " " + el + k + " = 0", pc[i]->proj_right * *e[i], t);
      rep.add_mp(nx, el + k + " L_" + d + k + " = 0", *e[i] * pd[i]->proj_left, t);
    }
    rep.add_mp(nx, "R_E22 E L_E33 = 0", core2->pc().proj_right * m.E * core2->pb().proj_left,
               std::max(frobenius_norm(m.F), t));
  }

  void rank_conditions(const Numerics& nx, SolvabilityReport& rep) const {
    const auto& I = inst;
    const QMatrix& B = I.B;
    auto r = [&](const QMatrix& x) { return nx.rank(x); };
    rep.add_rank("rank 1", r(block({{B, I.A2, I.A3, I.A4, I.A1}, {I.B1, zero, zero, zero, zero}})),
                 r(I.B1) + r(hstack({I.A2, I.A3, I.A4, I.A1})));
    rep.add_rank("rank 2", r(block({{B, I.A2, I.A4, I.A1}, {I.B3, zero, zero, zero}, {I.B1, zero, zero, zero}})),
                 r(hstack({I.A2, I.A4, I.A1})) + r(vstack({I.B3, I.B1})));
    rep.add_rank("rank 3", r(block({{B, I.A3, I.A4, I.A1}, {I.B2, zero, zero, zero}, {I.B1, zero, zero, zero}})),
                 r(hstack({I.A3, I.A4, I.A1})) + r(vstack({I.B2, I.B1})));
    rep.add_rank("rank 4",
                 r(block({{B, I.A4, I.A1}, {I.B2, zero, zero}, {I.B3, zero, zero}, {I.B1, zero, zero}})),
                 r(vstack({I.B2, I.B3, I.B1})) + r(hstack({I.A4, I.A1})));
    rep.add_rank("rank 5", r(block({{B, I.A2, I.A3, I.A1}, {I.B4, zero, zero, zero}, {I.B1, zero, zero, zero}})),
                 r(hstack({I.A2, I.A3, I.A1})) + r(vstack({I.B4, I.B1})));
    rep.add_rank("rank 6",
                 r(block({{B, I.A2, I.A1}, {I.B3, zero, zero}, {I.B4, zero, zero}, {I.B1, zero, zero}})),
                 r(vstack({I.B3, I.B4, I.B1})) + r(hstack({I.A2, I.A1})));
    rep.add_rank("rank 7",
                 r(block({{B, I.A3, I.A1}, {I.B2, zero, zero}, {I.B4, zero, zero}, {I.B1, zero, zero}})),
                 r(vstack({I.B2, I.B4, I.B1})) + r(hstack({I.A3, I.A1})));
    rep.add_rank("rank 8",
                 r(block({{B, I.A1}, {I.B2, zero}, {I.B3, zero}, {I.B4, zero}, {I.B1, zero}})),
                 r(vstack({I.B2, I.B3, I.B4, I.B1})) + r(I.A1));
    const QMatrix big = block({{B, I.A2, I.A1, zero, zero, zero, I.A4},
                               {I.B3, zero, zero, zero, zero, zero, zero},
                               {I.B1, zero, zero, zero, zero, zero, zero},
                               {zero, zero, zero, -B, I.A3, I.A1, I.A4},
                               {zero, zero, zero, I.B2, zero, zero, zero},
                               {zero, zero, zero, I.B1, zero, zero, zero},
                               {I.B4, zero, zero, I.B4, zero, zero, zero}});
    const QMatrix rb = block({{I.B3, zero}, {I.B1, zero}, {zero, I.B2}, {zero, I.B1}, {I.B4, I.B4}});
    const QMatrix ra = block({{I.A2, I.A1, zero, zero, I.A4}, {zero, zero, I.A3, I.A1, I.A4}});
    rep.add_rank("rank 9", r(big), r(rb) + r(ra));
  }

  std::size_t a4() const { return inst.A4.cols(); }
  std::size_t b4() const { return inst.B4.rows(); }

  std::vector<ParamSpec> params() const {
    const auto& I = inst;
    const std::size_t a = a4(), b = b4();
    return {{"U1", I.B.rows(), I.B1.rows()}, {"U2", I.A1.cols(), I.B.cols()}, {"U3", I.B.rows(), I.B1.rows()},
            {"U4", I.A3.cols(), I.B3.rows()}, {"U5", I.A2.cols(), I.B2.rows()}, {"U6", I.A2.cols(), I.B2.rows()},
            {"U7", I.A3.cols(), I.B3.rows()}, {"U8", I.A3.cols(), I.B3.rows()}, {"U11", a, 2 * b},
            {"U12", 2 * a, b},                {"U21", a, 2 * b},                {"U31", a, b},
            {"U32", a, b},                    {"U33", a, b},                    {"U41", a, b},
            {"U42", a, b}};
  }

  /// (X1, X2, Y1, Y2, Y3) for parameters ordered as params().
  std::vector<QMatrix> assemble(const std::vector<QMatrix>& p, Y3Branch branch) const {
    const auto& I = inst;
    const auto& m = im;
    const QMatrix &U1 = p[0], &U2 = p[1], &U3 = p[2], &U4 = p[3], &U5 = p[4], &U6 = p[5], &U7 = p[6], &U8 = p[7];
    const QMatrix &U11 = p[8], &U12 = p[9], &U21 = p[10], &U31 = p[11], &U32 = p[12], &U33 = p[13], &U41 = p[14],
                  &U42 = p[15];
    const std::size_t a = a4(), b = b4();

    const QMatrix V3 = core2->x(m.E, U31, U32, U33);
    const QMatrix W3 = core2->y(m.E, U31, U41, U42);
    const QMatrix Fp = m.F - m.C22 * V3 * m.D22 - m.C33 * W3 * m.D33;
    const QMatrix P = pC11.pinv * Fp - pC11.pinv * U11 * m.D11 + pC11.proj_left * U12;
    const QMatrix Q = pC11.proj_right * Fp * pD11.pinv + (m.C11 * pC11.pinv) * U11 + U21 * pD11.proj_right;
    QMatrix Y3;
    if (branch == Y3Branch::first) {
      const QMatrix V1 = row_selector(a, 2 * a, 0) * P;
      const QMatrix V2 = Q * col_selector(b, 2 * b, 0);
      Y3 = m.F1 + pC2.proj_left * V1 + V2 * pD1.proj_right + pC1.proj_left * V3 * pD2.proj_right;
    } else {
      const QMatrix W1 = row_selector(a, 2 * a, a) * P;
      const QMatrix W2 = Q * col_selector(b, 2 * b, b);
      Y3 = m.F2 - pC4.proj_left * W1 - W2 * pD3.proj_right - pC3.proj_left * W3 * pD4.proj_right;
    }
    const QMatrix T = m.T1 - m.A33 * Y3 * m.B33;
    const QMatrix Y1 = core1->x(T, U4, U5, U6);
    const QMatrix Y2 = core1->y(T, U4, U7, U8);
    const QMatrix Bp = I.B - I.A2 * Y1 * I.B2 - I.A3 * Y2 * I.B3 - I.A4 * Y3 * I.B4;
    const QMatrix X1 = pA1.pinv * Bp - pA1.pinv * U1 * I.B1 + pA1.proj_left * U2;
    const QMatrix X2 = pA1.proj_right * Bp * pB1.pinv + (I.A1 * pA1.pinv) * U1 + U3 * pB1.proj_right;
    return {X1, X2, Y1, Y2, Y3};
  }
};

}  // namespace detail

inline FiveTermIntermediates five_term_intermediates(const FiveTermInstance& inst, const SolverOptions& opt = {}) {
  const Numerics nx(opt, opt.scale ? *opt.scale : inst.coefficient_scale());
  return detail::FiveTermWork(nx, inst).im;
}

inline std::vector<LinearEquation> five_term_equations(const FiveTermInstance& I) {
  return {{"A1 X1 + X2 B1 + A2 Y1 B2 + A3 Y2 B3 + A4 Y3 B4 = B",
           {left_term(I.A1, "X1"), right_term("X2", I.B1), term(I.A2, "Y1", I.B2), term(I.A3, "Y2", I.B3),
            term(I.A4, "Y3", I.B4)},
           I.B}};
}

inline SolveResult solve_five_term(const FiveTermInstance& inst, const SolverOptions& opt = {}) {
  const Numerics nx(opt, opt.scale ? *opt.scale : inst.coefficient_scale());
  auto work = std::make_shared<const detail::FiveTermWork>(nx, inst);
  SolveResult out;
  work->conditions(nx, out.report, frobenius_norm(inst.B));
  work->rank_conditions(nx, out.report);
  out.report.finalize();
  if (!out.report.consistent) return out;
  const Y3Branch branch = opt.branch;
  out.family = SolutionFamily({"X1", "X2", "Y1", "Y2", "Y3"}, work->params(),
                              [work, branch](const std::vector<QMatrix>& p) { return work->assemble(p, branch); });
  return out;
}

}  // namespace qsylv
