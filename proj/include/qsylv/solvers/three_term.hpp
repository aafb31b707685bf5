#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "qsylv/solvers/master.hpp"

namespace qsylv {

/// A1 X = C1, X B1 = D1, A2 Y = C2, Y B2 = D2, A3 Z = C3, Z B3 = D3, E1 X F1 + E2 Y F2 + E3 Z F3 = Cc.
/// Default-constructed (0x0) blocks are absent, as for MasterInstance.
struct ThreeTermInstance {
  std::array<QMatrix, 3> A, B, C, D, E, F;
  QMatrix Cc;

  /// The master system with U and V absent; index i here is index i + 1 there.
  MasterInstance lift() const {
    MasterInstance m;
    for (int i = 0; i < 3; ++i) {
      m.A[i + 1] = A[i];
      m.B[i + 1] = B[i];
      m.C[i + 1] = C[i];
      m.D[i + 1] = D[i];
      m.E[i + 1] = E[i];
      m.F[i + 1] = F[i];
    }
    m.Cc = Cc;
    m.E[0] = QMatrix(Cc.rows(), 0);
    m.F[0] = QMatrix(0, Cc.cols());
    return m.normalized();
  }
};

inline const std::vector<std::string>& three_term_unknowns() {
  static const std::vector<std::string> names{"X", "Y", "Z"};
  return names;
}

inline std::vector<LinearEquation> three_term_equations(const ThreeTermInstance& inst) {
  const MasterInstance I = inst.lift();
  const auto& n = three_term_unknowns();
  std::vector<LinearEquation> eqs;
  for (int i = 0; i < 3; ++i) {
    const std::string k = std::to_string(i + 1);
    eqs.push_back({"A" + k + " " + n[i] + " = C" + k, {left_term(I.A[i + 1], n[i])}, I.C[i + 1]});
    eqs.push_back({n[i] + " B" + k + " = D" + k, {right_term(n[i], I.B[i + 1])}, I.D[i + 1]});
  }
  eqs.push_back({"E1 X F1 + E2 Y F2 + E3 Z F3 = Cc",
                 {term(I.E[1], "X", I.F[1]), term(I.E[2], "Y", I.F[2]), term(I.E[3], "Z", I.F[3])},
                 I.Cc});
  return eqs;
}

namespace detail {

inline void three_term_rank_conditions(const Numerics& nx, const MasterInstance& I, SolvabilityReport& rep) {
  const QMatrix &C = I.Cc, &E1 = I.E[1], &E2 = I.E[2], &E3 = I.E[3];
  const QMatrix &F1 = I.F[1], &F2 = I.F[2], &F3 = I.F[3];
  const QMatrix &A1 = I.A[1], &A2 = I.A[2], &A3 = I.A[3];
  const QMatrix &B1 = I.B[1], &B2 = I.B[2], &B3 = I.B[3];
  const QMatrix C1F1 = I.C[1] * F1, C2F2 = I.C[2] * F2, C3F3 = I.C[3] * F3;
  const QMatrix E1D1 = E1 * I.D[1], E2D2 = E2 * I.D[2], E3D3 = E3 * I.D[3];
  auto r = [&](const QMatrix& x) { return nx.rank(x); };

  for (int i = 1; i < 4; ++i) {
    const std::string k = std::to_string(i);
    rep.add_rank("r(C" + k + ", A" + k + ") = r(A" + k + ")", r(hstack({I.C[i], I.A[i]})), r(I.A[i]));
    rep.add_rank("r(D" + k + "; B" + k + ") = r(B" + k + ")", r(vstack({I.D[i], I.B[i]})), r(I.B[i]));
  }
  rep.add_rank("rank 1",
               r(block({{C, E1, E2, E3}, {C1F1, A1, zero, zero}, {C2F2, zero, A2, zero}, {C3F3, zero, zero, A3}})),
               r(block({{E1, E2, E3}, {A1, zero, zero}, {zero, A2, zero}, {zero, zero, A3}})));
  rep.add_rank("rank 2",
               r(block({{C, E1, E3, E2D2}, {F2, zero, zero, B2}, {C1F1, A1, zero, zero}, {C3F3, zero, A3, zero}})),
               r(block({{E1, E3}, {A1, zero}, {zero, A3}})) + r(hstack({F2, B2})));
  rep.add_rank("rank 3",
               r(block({{C, E3, E2, E1D1}, {F1, zero, zero, B1}, {C3F3, A3, zero, zero}, {C2F2, zero, A2, zero}})),
               r(block({{E3, E2}, {A3, zero}, {zero, A2}})) + r(hstack({F1, B1})));
  rep.add_rank("rank 4",
               r(block({{C, E3, E1D1, E2D2}, {F1, zero, B1, zero}, {F2, zero, zero, B2}, {C3F3, A3, zero, zero}})),
               r(block({{F1, B1, zero}, {F2, zero, B2}})) + r(vstack({E3, A3})));
  rep.add_rank("rank 5",
               r(block({{C, E1, E2, E3D3}, {F3, zero, zero, B3}, {C1F1, A1, zero, zero}, {C2F2, zero, A2, zero}})),
               r(block({{E1, E2}, {A1, zero}, {zero, A2}})) + r(hstack({F3, B3})));
  rep.add_rank("rank 6",
               r(block({{C, E1, E3D3, E2D2}, {F3, zero, B3, zero}, {F2, zero, zero, B2}, {C1F1, A1, zero, zero}})),
               r(block({{F3, B3, zero}, {F2, zero, B2}})) + r(vstack({E1, A1})));
  rep.add_rank("rank 7",
               r(block({{C, E2, E1D1, E3D3}, {F1, zero, B1, zero}, {F3, zero, zero, B3}, {C2F2, A2, zero, zero}})),
               r(block({{F1, B1, zero}, {F3, zero, B3}})) + r(vstack({E2, A2})));
  rep.add_rank("rank 8",
               r(block({{C, E1D1, E2D2, E3D3}, {F1, B1, zero, zero}, {F2, zero, B2, zero}, {F3, zero, zero, B3}})),
               r(block({{F1, B1, zero, zero}, {F2, zero, B2, zero}, {F3, zero, zero, B3}})));
  rep.add_rank("rank 9",
               r(block({{C, zero, E1, zero, E3, E2D2, zero, E3D3},
                        {zero, -C, zero, E2, E3, zero, -E1D1, zero},
                        {F2, zero, zero, zero, zero, B2, zero, zero},
                        {zero, F1, zero, zero, zero, zero, B1, zero},
                        {F3, F3, zero, zero, zero, zero, zero, B3},
                        {C1F1, zero, A1, zero, zero, zero, zero, zero},
                        {zero, -C2F2, zero, A2, zero, zero, zero, zero},
                        {zero, -C3F3, zero, zero, A3, zero, zero, zero}})),
               r(block({{F2, zero, B2, zero, zero}, {zero, F1, zero, B1, zero}, {F3, F3, zero, zero, B3}})) +
                   r(block({{E1, zero, E3}, {zero, E2, E3}, {A1, zero, zero}, {zero, A2, zero}, {zero, zero, A3}})));
}

}  // namespace detail

/// Solves through the master system; the report lists the conditions in this system's own indexing.
inline SolveResult solve_three_term_system(const ThreeTermInstance& inst, const SolverOptions& opt = {}) {
  const MasterInstance lifted = inst.lift();
  const Numerics nx(opt, detail::master_scale(lifted, opt));
  auto w = std::make_shared<const detail::MasterWork>(nx, lifted);
  const MasterInstance& I = w->inst;
  SolveResult out;
  auto& rep = out.report;
  for (int i = 1; i < 4; ++i) {
    const std::string k = std::to_string(i);
    rep.add_compat(nx, "A" + k + " D" + k + " = C" + k + " B" + k, I.A[i] * I.D[i] - I.C[i] * I.B[i],
                   frobenius_norm(I.A[i]) * frobenius_norm(I.D[i]) + frobenius_norm(I.C[i]) * frobenius_norm(I.B[i]));
  }
  for (int i = 1; i < 4; ++i) {
    const std::string k = std::to_string(i);
    rep.add_mp(nx, "R_A" + k + " C" + k + " = 0", w->pA[i].proj_right * I.C[i], frobenius_norm(I.C[i]));
    rep.add_mp(nx, "D" + k + " L_B" + k + " = 0", I.D[i] * w->pB[i].proj_left, frobenius_norm(I.D[i]));
  }
  w->ft->conditions(nx, rep, w->t_mass, {"G", "H", "L"});
  detail::three_term_rank_conditions(nx, I, rep);
  rep.finalize();
  if (!rep.consistent) return out;
  const Y3Branch branch = opt.branch;
  out.family = SolutionFamily(three_term_unknowns(), w->params(), [w, branch](const std::vector<QMatrix>& p) {
    std::vector<QMatrix> all = w->assemble(p, branch);
    return std::vector<QMatrix>{all[2], all[3], all[4]};
  });
  return out;
}

}  // namespace qsylv
