#pragma once

#include <array>
#include <initializer_list>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qsylv/solvers.hpp"

namespace qsylv {

/// Input that violates a stated precondition (e.g. a right-hand side that must be eta-Hermitian).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Precondition tolerance for eta-Hermicity of given data, relative to ||M||_F.
inline constexpr double kEtaInputTol = 1e-9;

/// (X + X^{eta*}) / 2.
inline QMatrix symmetrize(const QMatrix& X, Eta eta) {
  if (X.rows() != X.cols()) throw DimensionError("symmetrize: matrix must be square, got " + X.shape_string());
  QMatrix out = X + eta_conj_transpose(X, eta);
  out *= 0.5;
  return out;
}

inline double eta_hermicity_defect(const QMatrix& X, Eta eta) {
  return frobenius_norm(X - eta_conj_transpose(X, eta));
}

inline bool is_eta_hermitian(const QMatrix& X, Eta eta, double tol = kEtaInputTol) {
  return X.rows() == X.cols() && eta_hermicity_defect(X, eta) <= tol * (1.0 + frobenius_norm(X));
}

inline void require_eta_hermitian(const QMatrix& X, Eta eta, const std::string& name) {
  if (!is_eta_hermitian(X, eta))
    throw PreconditionError(name + " must be " + std::string(to_string(eta)) + "-Hermitian (defect " +
                            std::to_string(eta_hermicity_defect(X, eta)) + ")");
}

// ---------------------------------------------------------------------------------------------
// Full system:
//   A1 U = C1, A2 X = C2, A3 Y = C3, A4 Z = C4, X, Y, Z eta-Hermitian,
//   E1 U + (E1 U)^{eta*} + E2 X E2^{eta*} + E3 Y E3^{eta*} + E4 Z E4^{eta*} = Cc.
// The three-term variant uses indices 1..3 for X, Y, Z and has no U.

struct EtaSystem {
  Eta eta = Eta::i;
  std::array<QMatrix, 4> A, C, E;
  QMatrix Cc;

  /// The doubled master system: U1 = U, U2 = U^{eta*}, right constraints are the eta-images of the
  /// left ones and F_i = E_i^{eta*}.
  MasterInstance doubled() const {
    MasterInstance m;
    const std::size_t n = Cc.rows();
    for (int i = 0; i < 4; ++i) {
      QMatrix Ei = E[i], Ai = A[i], Ci = C[i];
      const bool absent = Ei.rows() == 0 && Ei.cols() == 0;
      const std::size_t p = !absent ? Ei.cols() : Ai.cols();
      if (absent) Ei = QMatrix(n, p);
      if (Ai.rows() == 0 && Ai.cols() == 0) Ai = QMatrix(0, p);
      if (Ci.rows() == 0 && Ci.cols() == 0) Ci = QMatrix(Ai.rows(), i == 0 ? n : p);
      m.A[i] = Ai;
      m.C[i] = Ci;
      m.E[i] = Ei;
      m.B[i] = eta_conj_transpose(Ai, eta);
      m.D[i] = eta_conj_transpose(Ci, eta);
      m.F[i] = eta_conj_transpose(Ei, eta);
    }
    m.Cc = Cc;
    return m.normalized();
  }
};

inline const std::vector<std::string>& eta_full_unknowns() {
  static const std::vector<std::string> names{"U", "X", "Y", "Z"};
  return names;
}

inline std::vector<LinearEquation> eta_full_equations(const EtaSystem& sys) {
  const MasterInstance I = sys.doubled();
  const auto& n = eta_full_unknowns();
  std::vector<LinearEquation> eqs;
  for (int i = 0; i < 4; ++i) {
    const std::string k = std::to_string(i + 1);
    eqs.push_back({"A" + k + " " + n[i] + " = C" + k, {left_term(I.A[i], n[i])}, I.C[i]});
  }
  eqs.push_back({"E1 U + (E1 U)^eta* + E2 X E2^eta* + E3 Y E3^eta* + E4 Z E4^eta* = Cc",
                 {left_term(I.E[0], "U"), Term{std::nullopt, "U", I.F[0], sys.eta}, term(I.E[1], "X", I.F[1]),
                  term(I.E[2], "Y", I.F[2]), term(I.E[3], "Z", I.F[3])},
                 I.Cc});
  return eqs;
}

inline const std::vector<std::string>& eta_three_unknowns() {
  static const std::vector<std::string> names{"X", "Y", "Z"};
  return names;
}

/// Three-term lift: index 0 of the full system (U) is absent.
inline EtaSystem eta_three_as_full(const EtaSystem& three) {
  EtaSystem full;
  full.eta = three.eta;
  full.Cc = three.Cc;
  for (int i = 0; i < 3; ++i) {
    full.A[i + 1] = three.A[i];
    full.C[i + 1] = three.C[i];
    full.E[i + 1] = three.E[i];
  }
  full.E[0] = QMatrix(three.Cc.rows(), 0);
  return full;
}

inline std::vector<LinearEquation> eta_three_equations(const EtaSystem& three) {
  const MasterInstance I = eta_three_as_full(three).doubled();
  const auto& n = eta_three_unknowns();
  std::vector<LinearEquation> eqs;
  for (int i = 0; i < 3; ++i) {
    const std::string k = std::to_string(i + 1);
    eqs.push_back({"A" + k + " " + n[i] + " = C" + k, {left_term(I.A[i + 1], n[i])}, I.C[i + 1]});
  }
  eqs.push_back({"E1 X E1^eta* + E2 Y E2^eta* + E3 Z E3^eta* = C",
                 {term(I.E[1], "X", I.F[1]), term(I.E[2], "Y", I.F[2]), term(I.E[3], "Z", I.F[3])},
                 I.Cc});
  return eqs;
}

/// Solution (U, X, Y, Z) of the full system to the doubled master tuple (U, U^{eta*}, X, Y, Z).
inline std::vector<QMatrix> eta_lift_solution(const std::vector<QMatrix>& t, Eta eta) {
  if (t.size() != 4) throw DimensionError("eta_lift_solution: expected (U, X, Y, Z)");
  return {t[0], eta_conj_transpose(t[0], eta), t[1], t[2], t[3]};
}

/// Doubled master tuple (U, V, X, Y, Z) to ((U + V^{eta*})/2, sym X, sym Y, sym Z).
inline std::vector<QMatrix> eta_project_solution(const std::vector<QMatrix>& m, Eta eta) {
  if (m.size() != 5) throw DimensionError("eta_project_solution: expected (U, V, X, Y, Z)");
  QMatrix U = m[0] + eta_conj_transpose(m[1], eta);
  U *= 0.5;
  return {U, symmetrize(m[2], eta), symmetrize(m[3], eta), symmetrize(m[4], eta)};
}

namespace detail {

inline QMatrix es(const QMatrix& m, Eta eta) { return eta_conj_transpose(m, eta); }

/// Compatibility of the doubled system: Cc eta-Hermitian and A_i C_i^{eta*} = C_i A_i^{eta*} for the
/// eta-Hermitian unknowns (first index `first`, labels starting at `label0`).
inline void eta_compat(const Numerics& nx, const MasterInstance& I, Eta eta, int first, int label0,
                       SolvabilityReport& rep) {
  rep.add_compat(nx, "Cc = Cc^eta*", I.Cc - es(I.Cc, eta), frobenius_norm(I.Cc));
  for (int i = first; i < 4; ++i) {
    const std::string k = std::to_string(i - first + label0);
    rep.add_compat(nx, "A" + k + " C" + k + "^eta* = C" + k + " A" + k + "^eta*",
                   I.A[i] * I.D[i] - I.C[i] * I.B[i], 2.0 * frobenius_norm(I.A[i]) * frobenius_norm(I.C[i]));
  }
}

inline void eta_full_rank_conditions(const Numerics& nx, const MasterInstance& I, SolvabilityReport& rep) {
  const QMatrix& Cc = I.Cc;
  const QMatrix &E1 = I.E[0], &E2 = I.E[1], &E3 = I.E[2], &E4 = I.E[3];
  const QMatrix &A1 = I.A[0], &A2 = I.A[1], &A3 = I.A[2], &A4 = I.A[3];
  const QMatrix& C1 = I.C[0];
  const QMatrix &E1s = I.F[0], &E2s = I.F[1], &E3s = I.F[2], &E4s = I.F[3];
  const QMatrix &A1s = I.B[0], &A2s = I.B[1], &A3s = I.B[2], &A4s = I.B[3];
  const QMatrix& C1s = I.D[0];
  // P_i = C_i E_i^{eta*}; its eta-image E_i C_i^{eta*} fills the first block row.
  const QMatrix P2 = I.C[1] * E2s, P3 = I.C[2] * E3s, P4 = I.C[3] * E4s;
  const QMatrix Q2 = E2 * I.D[1], Q3 = E3 * I.D[2], Q4 = E4 * I.D[3];
  auto r = [&](const QMatrix& x) { return nx.rank(x); };

  for (int i = 0; i < 4; ++i) {
    const std::string k = std::to_string(i + 1);
    rep.add_rank("r(C" + k + ", A" + k + ") = r(A" + k + ")", r(hstack({I.C[i], I.A[i]})), r(I.A[i]));
  }
  rep.add_rank("rank 1",
               r(block({{Cc, E1, E2, E3, E4, C1s},
                        {E1s, zero, zero, zero, zero, A1s},
                        {C1, A1, zero, zero, zero, zero},
                        {P2, zero, A2, zero, zero, zero},
                        {P3, zero, zero, A3, zero, zero},
                        {P4, zero, zero, zero, A4, zero}})),
               r(block({{E1, E2, E3, E4},
                        {A1, zero, zero, zero},
                        {zero, A2, zero, zero},
                        {zero, zero, A3, zero},
                        {zero, zero, zero, A4}})) +
                   r(vstack({E1, A1})));
  rep.add_rank("rank 2",
               r(block({{Cc, E4, E2, E1, Q3, C1s},
                        {E3s, zero, zero, zero, A3s, zero},
                        {E1s, zero, zero, zero, zero, A1s},
                        {P4, A4, zero, zero, zero, zero},
                        {P2, zero, A2, zero, zero, zero},
                        {C1, zero, zero, A1, zero, zero}})),
               r(block({{E4, E2, E1}, {A4, zero, zero}, {zero, A2, zero}, {zero, zero, A1}})) +
                   r(block({{E3, E1}, {A3, zero}, {zero, A1}})));
  rep.add_rank("rank 3",
               r(block({{Cc, E4, E3, E1, Q2, C1s},
                        {E2s, zero, zero, zero, A2s, zero},
                        {E1s, zero, zero, zero, zero, A1s},
                        {P4, A4, zero, zero, zero, zero},
                        {P3, zero, A3, zero, zero, zero},
                        {C1, zero, zero, A1, zero, zero}})),
               r(block({{E4, E3, E1}, {A4, zero, zero}, {zero, A3, zero}, {zero, zero, A1}})) +
                   r(block({{E2, E1}, {A2, zero}, {zero, A1}})));
  rep.add_rank("rank 4",
               r(block({{Cc, E4, E1, Q3, Q2, C1s},
                        {E3s, zero, zero, A3s, zero, zero},
                        {E2s, zero, zero, zero, A2s, zero},
                        {E1s, zero, zero, zero, zero, A1s},
                        {P4, A4, zero, zero, zero, zero},
                        {C1, zero, A1, zero, zero, zero}})),
               r(block({{E3, E2, E1}, {A3, zero, zero}, {zero, A2, zero}, {zero, zero, A1}})) +
                   r(block({{E4, E1}, {A4, zero}, {zero, A1}})));
  rep.add_rank("rank 5",
               r(block({{Cc, E2, E1, zero, zero, zero, E4, Q3, C1s, zero, zero, Q4},
                        {E3s, zero, zero, zero, zero, zero, zero, A3s, zero, zero, zero, zero},
                        {E1s, zero, zero, zero, zero, zero, zero, zero, A1s, zero, zero, zero},
                        {zero, zero, zero, Cc, E3, E1, E4, zero, zero, Q2, C1s, zero},
                        {zero, zero, zero, E2s, zero, zero, zero, zero, zero, A2s, zero, zero},
                        {zero, zero, zero, E1s, zero, zero, zero, zero, zero, zero, A1s, zero},
                        {E4s, zero, zero, -E4s, zero, zero, zero, zero, zero, zero, zero, A4s},
                        {P2, A2, zero, zero, zero, zero, zero, zero, zero, zero, zero, zero},
                        {C1, zero, A1, zero, zero, zero, zero, zero, zero, zero, zero, zero},
                        {zero, zero, zero, P3, A3, zero, zero, zero, zero, zero, zero, zero},
                        {zero, zero, zero, C1, zero, A1, zero, zero, zero, zero, zero, zero},
                        {zero, zero, zero, P4, zero, zero, A4, zero, zero, zero, zero, zero}})),
               2 * r(block({{E2, E1, zero, zero, E4},
                            {zero, zero, E3, E1, E4},
                            {A2, zero, zero, zero, zero},
                            {zero, A1, zero, zero, zero},
                            {zero, zero, A3, zero, zero},
                            {zero, zero, zero, A1, zero},
                            {zero, zero, zero, zero, A4}})));
}

/// Indices 1..3 of the doubled master carry X, Y, Z (labelled 1..3 here).
inline void eta_three_rank_conditions(const Numerics& nx, const MasterInstance& I, SolvabilityReport& rep) {
  const QMatrix& C = I.Cc;
  const QMatrix &E1 = I.E[1], &E2 = I.E[2], &E3 = I.E[3];
  const QMatrix &A1 = I.A[1], &A2 = I.A[2], &A3 = I.A[3];
  const QMatrix &E1s = I.F[1], &E2s = I.F[2], &E3s = I.F[3];
  const QMatrix &A1s = I.B[1], &A2s = I.B[2], &A3s = I.B[3];
  const QMatrix P1 = I.C[1] * E1s, P2 = I.C[2] * E2s, P3 = I.C[3] * E3s;
  const QMatrix Q1 = E1 * I.D[1], Q2 = E2 * I.D[2], Q3 = E3 * I.D[3];
  auto r = [&](const QMatrix& x) { return nx.rank(x); };

  for (int i = 1; i < 4; ++i) {
    const std::string k = std::to_string(i);
    rep.add_rank("r(A" + k + ", C" + k + ") = r(A" + k + ")", r(hstack({I.A[i], I.C[i]})), r(I.A[i]));
  }
  rep.add_rank("rank 1",
               r(block({{C, E3, E1, E2}, {P3, A3, zero, zero}, {P1, zero, A1, zero}, {P2, zero, zero, A2}})),
               r(block({{E3, E1, E2}, {A3, zero, zero}, {zero, A1, zero}, {zero, zero, A2}})));
  rep.add_rank("rank 2",
               r(block({{C, E3, E1, Q2}, {E2s, zero, zero, A2s}, {P3, A3, zero, zero}, {P1, zero, A1, zero}})),
               r(block({{E3, E1}, {A3, zero}, {zero, A1}})) + r(vstack({E2, A2})));
  rep.add_rank("rank 3",
               r(block({{C, E3, E2, Q1}, {E1s, zero, zero, A1s}, {P3, A3, zero, zero}, {P2, zero, A2, zero}})),
               r(block({{E3, E2}, {A3, zero}, {zero, A2}})) + r(vstack({E1, A1})));
  rep.add_rank("rank 4",
               r(block({{C, E3, Q1, Q2}, {E1s, zero, A1s, zero}, {E2s, zero, zero, A2s}, {P3, A3, zero, zero}})),
               r(block({{E1, E2}, {A1, zero}, {zero, A2}})) + r(vstack({E3, A3})));
  rep.add_rank("rank 5",
               r(block({{C, zero, E1, zero, E3, Q2, zero, Q3},
                        {zero, -C, zero, E2, E3, zero, -Q1, zero},
                        {E2s, zero, zero, zero, zero, A2s, zero, zero},
                        {zero, E1s, zero, zero, zero, zero, A1s, zero},
                        {E3s, E3s, zero, zero, zero, zero, zero, A3s},
                        {P1, zero, A1, zero, zero, zero, zero, zero},
                        {zero, -P2, zero, A2, zero, zero, zero, zero},
                        {zero, -P3, zero, zero, A3, zero, zero, zero}})),
               2 * r(block({{E1, zero, E3}, {zero, E2, E3}, {A1, zero, zero}, {zero, A2, zero}, {zero, zero, A3}})));
}

/// Doubled-master work for the full and three-term variants.
struct EtaMasterWork {
  Eta eta;
  std::unique_ptr<MasterWork> w;

  EtaMasterWork(const Numerics& nx, const MasterInstance& doubled, Eta e)
      : eta(e), w(std::make_unique<MasterWork>(nx, doubled)) {}

  void mp_conditions(const Numerics& nx, int first, SolvabilityReport& rep) const {
    const MasterInstance& I = w->inst;
    for (int i = first; i < 4; ++i) {
      const std::string k = std::to_string(i - first + 1);
      rep.add_mp(nx, "R_A" + k + " C" + k + " = 0", w->pA[i].proj_right * I.C[i], frobenius_norm(I.C[i]));
    }
    w->ft->conditions(nx, rep, w->t_mass, {"G", "H", "L"});
  }

  std::vector<QMatrix> assemble(const std::vector<QMatrix>& p, Y3Branch branch) const {
    return eta_project_solution(w->assemble(p, branch), eta);
  }
};

inline void check_square_rhs(const QMatrix& Cc, const char* who) {
  if (Cc.rows() != Cc.cols()) throw DimensionError(std::string(who) + ": Cc must be square, got " + Cc.shape_string());
}

}  // namespace detail

inline SolveResult solve_eta_full(const EtaSystem& sys, const SolverOptions& opt = {}) {
  detail::check_square_rhs(sys.Cc, "solve_eta_full");
  const MasterInstance I = sys.doubled();
  const Numerics nx(opt, detail::master_scale(I, opt));
  auto ew = std::make_shared<const detail::EtaMasterWork>(nx, I, sys.eta);
  SolveResult out;
  auto& rep = out.report;
  detail::eta_compat(nx, I, sys.eta, 1, 2, rep);
  ew->mp_conditions(nx, 0, rep);
  detail::eta_full_rank_conditions(nx, I, rep);
  rep.finalize();
  if (!rep.consistent) return out;
  const Y3Branch branch = opt.branch;
  out.family = SolutionFamily(eta_full_unknowns(), ew->w->params(),
                              [ew, branch](const std::vector<QMatrix>& p) { return ew->assemble(p, branch); });
  return out;
}

/// Three eta-Hermitian unknowns; uses indices 0..2 of `sys` (index 3 must be absent).
inline SolveResult solve_eta_three(const EtaSystem& sys, const SolverOptions& opt = {}) {
  detail::check_square_rhs(sys.Cc, "solve_eta_three");
  if (!sys.A[3].empty() || !sys.C[3].empty() || !sys.E[3].empty())
    throw DimensionError("solve_eta_three: only three unknowns (blocks 1..3) are allowed");
  const MasterInstance I = eta_three_as_full(sys).doubled();
  const Numerics nx(opt, detail::master_scale(I, opt));
  auto ew = std::make_shared<const detail::EtaMasterWork>(nx, I, sys.eta);
  SolveResult out;
  auto& rep = out.report;
  detail::eta_compat(nx, I, sys.eta, 1, 1, rep);
  ew->mp_conditions(nx, 1, rep);
  detail::eta_three_rank_conditions(nx, I, rep);
  rep.finalize();
  if (!rep.consistent) return out;
  const Y3Branch branch = opt.branch;
  out.family = SolutionFamily(eta_three_unknowns(), ew->w->params(), [ew, branch](const std::vector<QMatrix>& p) {
    std::vector<QMatrix> t = ew->assemble(p, branch);
    return std::vector<QMatrix>{t[1], t[2], t[3]};
  });
  return out;
}

// ---------------------------------------------------------------------------------------------
// B Y B^{eta*} + C Z C^{eta*} = D with Y, Z eta-Hermitian.

namespace detail {

struct EtaTwoCore {
  Eta eta;
  QMatrix B, C, D, M, S;
  PinvBundle pb, pc, pm, ps;

  EtaTwoCore(const Numerics& nx, const QMatrix& B_, const QMatrix& C_, const QMatrix& D_, Eta e, double natural)
      : eta(e), B(B_), C(C_), D(D_) {
    pb = nx.pinv(B, natural);
    pc = nx.pinv(C, natural);
    M = pb.proj_right * C;
    pm = nx.pinv(M, natural);
    S = C * pm.proj_left;
    ps = nx.pinv(S, natural);
  }

  std::size_t y_dim() const { return B.cols(); }
  std::size_t z_dim() const { return C.cols(); }

  /// R_M R_B D and R_B D (R_C)^{eta*}.
  std::array<QMatrix, 2> residuals() const {
    const QMatrix RBD = pb.proj_right * D;
    return {pm.proj_right * RBD, RBD * es(pc.proj_right, eta)};
  }

  std::vector<ParamSpec> params(const std::array<std::string, 4>& names) const {
    const std::size_t y = y_dim(), z = z_dim();
    return {{names[0], z, z}, {names[1], y, y}, {names[2], z, z}, {names[3], z, z}};
  }

  /// Parameters (W1, U, V, W2); W2 enters through its eta-Hermitian part.
  std::pair<QMatrix, QMatrix> assemble(const std::vector<QMatrix>& p) const {
    const QMatrix &W1 = p[0], &U = p[1], &V = p[2];
    const QMatrix W2 = symmetrize(p[3], eta);
    const QMatrix& Bd = pb.pinv;
    const QMatrix& Cd = pc.pinv;
    const QMatrix& Md = pm.pinv;
    const QMatrix Bds = es(Bd, eta);
    const QMatrix Ss = es(S, eta);
    const QMatrix Mds = es(Md, eta);
    const QMatrix SdS = ps.pinv * S;
    const QMatrix Im = QMatrix::identity(D.rows());
    const QMatrix Iz = QMatrix::identity(z_dim());
    const QMatrix& LB = pb.proj_left;
    const QMatrix& LM = pm.proj_left;
    const QMatrix& LS = ps.proj_left;
    const QMatrix& LC = pc.proj_left;

    QMatrix Y = Bd * D * Bds;
    Y -= 0.5 * (Bd * C * Md * D * (Im + es(Cd, eta) * Ss) * Bds);
    Y -= 0.5 * (Bd * (Im + S * Cd) * D * Mds * es(C, eta) * Bds);
    Y -= Bd * S * W2 * Ss * Bds;
    Y += LB * U + es(U, eta) * es(LB, eta);

    QMatrix Z = 0.5 * (Md * D * es(Cd, eta) * (Iz + es(SdS, eta)));
    Z += 0.5 * ((Iz + SdS) * Cd * D * Mds);
    Z += LM * W2 * es(LM, eta) + V * es(LC, eta) + LC * es(V, eta);
    Z += LM * LS * W1 + es(W1, eta) * es(LS, eta) * es(LM, eta);
    return {Y, Z};
  }
};

}  // namespace detail

inline std::vector<LinearEquation> eta_two_equations(const QMatrix& B1, const QMatrix& C1, const QMatrix& D1, Eta eta) {
  return {{"B1 Y B1^eta* + C1 Z C1^eta* = D1",
           {term(B1, "Y", eta_conj_transpose(B1, eta)), term(C1, "Z", eta_conj_transpose(C1, eta))},
           D1}};
}

/// B1 Y B1^{eta*} + C1 Z C1^{eta*} = D1 for eta-Hermitian Y, Z; free parameters W1, U, V, W2 (W2 is
/// replaced by its eta-Hermitian part).
inline SolveResult solve_eta_two(const QMatrix& B1, const QMatrix& C1, const QMatrix& D1, Eta eta,
                                 const SolverOptions& opt = {}) {
  if (B1.rows() != D1.rows() || C1.rows() != D1.rows() || D1.rows() != D1.cols())
    throw DimensionError("solve_eta_two: B1 " + B1.shape_string() + ", C1 " + C1.shape_string() + ", D1 " +
                         D1.shape_string());
  require_eta_hermitian(D1, eta, "D1");
  const Numerics nx(opt, detail::coef_scale({&B1, &C1}, opt));
  auto core = std::make_shared<const detail::EtaTwoCore>(nx, B1, C1, D1, eta, nx.scale());
  SolveResult out;
  auto& rep = out.report;
  const auto res = core->residuals();
  rep.add_mp(nx, "R_M R_B1 D1 = 0", res[0], frobenius_norm(D1));
  rep.add_mp(nx, "R_B1 D1 (R_C1)^eta* = 0", res[1], frobenius_norm(D1));
  auto r = [&](const QMatrix& x) { return nx.rank(x); };
  rep.add_rank("r[B1 D1; 0 C1^eta*] = r(B1) + r(C1)", r(block({{B1, D1}, {zero, eta_conj_transpose(C1, eta)}})),
               core->pb.rank + core->pc.rank);
  rep.add_rank("r(B1, C1, D1) = r(B1, C1)", r(hstack({B1, C1, D1})), r(hstack({B1, C1})));
  rep.finalize();
  if (!rep.consistent) return out;
  out.family = SolutionFamily({"Y", "Z"}, core->params({"W1", "U", "V", "W2"}), [core](const std::vector<QMatrix>& p) {
    auto [Y, Z] = core->assemble(p);
    return std::vector<QMatrix>{Y, Z};
  });
  return out;
}

// ---------------------------------------------------------------------------------------------
// A1 X = C1, Y B1 = D1, A2 X A2^{eta*} + A3 Y A3^{eta*} = D3 with X, Y eta-Hermitian.
// X and Y here are often written Y and Z in the literature.

struct EtaMixedInstance {
  Eta eta = Eta::i;
  QMatrix A1, C1, B1, D1, A2, A3, D3;

  EtaMixedInstance normalized() const {
    EtaMixedInstance o = *this;
    const std::size_t x = A2.cols(), y = A3.cols();
    if (o.A1.rows() == 0 && o.A1.cols() == 0) o.A1 = QMatrix(0, x);
    if (o.C1.rows() == 0 && o.C1.cols() == 0) o.C1 = QMatrix(o.A1.rows(), x);
    if (o.B1.rows() == 0 && o.B1.cols() == 0) o.B1 = QMatrix(y, 0);
    if (o.D1.rows() == 0 && o.D1.cols() == 0) o.D1 = QMatrix(y, o.B1.cols());
    auto need = [](bool ok, const std::string& what) {
      if (!ok) throw DimensionError("eta mixed system: " + what);
    };
    need(D3.rows() == D3.cols(), "D3 must be square");
    need(A2.rows() == D3.rows() && A3.rows() == D3.rows(), "A2, A3 must have as many rows as D3");
    need(o.A1.cols() == x && o.C1.rows() == o.A1.rows() && o.C1.cols() == x, "A1 X = C1 shapes");
    need(o.B1.rows() == y && o.D1.rows() == y && o.D1.cols() == o.B1.cols(), "Y B1 = D1 shapes");
    return o;
  }
};

inline std::vector<LinearEquation> eta_mixed_equations(const EtaMixedInstance& inst) {
  const EtaMixedInstance I = inst.normalized();
  return {{"A1 X = C1", {left_term(I.A1, "X")}, I.C1},
          {"Y B1 = D1", {right_term("Y", I.B1)}, I.D1},
          {"A2 X A2^eta* + A3 Y A3^eta* = D3",
           {term(I.A2, "X", eta_conj_transpose(I.A2, I.eta)), term(I.A3, "Y", eta_conj_transpose(I.A3, I.eta))},
           I.D3}};
}

namespace detail {

struct EtaMixedWork {
  EtaMixedInstance inst;
  PinvBundle pA1, pB1;
  QMatrix X0, Y0, B4, C4, D4;
  double d4_mass = 0.0;
  std::unique_ptr<EtaTwoCore> core;

  EtaMixedWork(const Numerics& nx, const EtaMixedInstance& in) : inst(in) {
    const auto& I = inst;
    const Eta eta = I.eta;
    const double s = nx.scale();
    pA1 = nx.pinv(I.A1, s);
    pB1 = nx.pinv(I.B1, s);
    const QMatrix A1dC1 = pA1.pinv * I.C1;
    X0 = A1dC1 + es(A1dC1, eta) - pA1.pinv * I.A1 * es(I.C1, eta) * es(pA1.pinv, eta);
    const QMatrix D1B1d = I.D1 * pB1.pinv;
    Y0 = D1B1d + es(D1B1d, eta) - es(pB1.pinv, eta) * es(I.B1, eta) * D1B1d;
    B4 = I.A2 * pA1.proj_left;
    C4 = I.A3 * es(pB1.proj_right, eta);
    const QMatrix t2 = I.A2 * X0 * es(I.A2, eta);
    const QMatrix t3 = I.A3 * Y0 * es(I.A3, eta);
    D4 = I.D3 - t2 - t3;
    d4_mass = frobenius_norm(I.D3) + frobenius_norm(t2) + frobenius_norm(t3);
    core = std::make_unique<EtaTwoCore>(nx, B4, C4, D4, eta, s);
  }

  std::vector<QMatrix> assemble(const std::vector<QMatrix>& p) const {
    auto [V, W] = core->assemble(p);
    const Eta eta = inst.eta;
    const QMatrix& LA1 = pA1.proj_left;
    const QMatrix& RB1 = pB1.proj_right;
    return {X0 + LA1 * V * es(LA1, eta), Y0 + es(RB1, eta) * W * RB1};
  }
};

}  // namespace detail

inline SolveResult solve_eta_mixed(const EtaMixedInstance& inst, const SolverOptions& opt = {}) {
  const EtaMixedInstance I = inst.normalized();
  require_eta_hermitian(I.D3, I.eta, "D3");
  const Eta eta = I.eta;
  const Numerics nx(opt, detail::coef_scale({&I.A1, &I.B1, &I.A2, &I.A3}, opt));
  auto w = std::make_shared<const detail::EtaMixedWork>(nx, I);
  SolveResult out;
  auto& rep = out.report;
  auto nrm = [](const QMatrix& m) { return frobenius_norm(m); };
  using detail::es;
  rep.add_compat(nx, "A1 C1^eta* = C1 A1^eta*", I.A1 * es(I.C1, eta) - I.C1 * es(I.A1, eta),
                 2.0 * nrm(I.A1) * nrm(I.C1));
  rep.add_compat(nx, "B1^eta* D1 = D1^eta* B1", es(I.B1, eta) * I.D1 - es(I.D1, eta) * I.B1,
                 2.0 * nrm(I.B1) * nrm(I.D1));
  rep.add_mp(nx, "R_A1 C1 = 0", w->pA1.proj_right * I.C1, nrm(I.C1));
  rep.add_mp(nx, "D1 L_B1 = 0", I.D1 * w->pB1.proj_left, nrm(I.D1));
  const auto res = w->core->residuals();
  rep.add_mp(nx, "R_M R_B4 D4 = 0", res[0], w->d4_mass);
  rep.add_mp(nx, "R_B4 D4 (R_C4)^eta* = 0", res[1], w->d4_mass);

  auto r = [&](const QMatrix& x) { return nx.rank(x); };
  const QMatrix A2s = es(I.A2, eta), A3s = es(I.A3, eta), B1s = es(I.B1, eta);
  rep.add_rank("r(A1, C1) = r(A1)", r(hstack({I.A1, I.C1})), w->pA1.rank);
  rep.add_rank("r(D1; B1) = r(B1)", r(vstack({I.D1, I.B1})), w->pB1.rank);
  rep.add_rank("rank 1",
               r(block({{I.D3, I.A3, I.A2}, {es(I.D1, eta) * A3s, B1s, zero}, {I.C1 * A2s, zero, I.A1}})),
               r(block({{I.A3, I.A2}, {B1s, zero}, {zero, I.A1}})));
  rep.add_rank("rank 2", r(block({{I.D3, I.A2, I.A3 * I.D1}, {A3s, zero, I.B1}, {I.C1 * A2s, I.A1, zero}})),
               r(vstack({I.A2, I.A1})) + r(hstack({A3s, I.B1})));
  rep.finalize();
  if (!rep.consistent) return out;
  out.family = SolutionFamily({"X", "Y"}, w->core->params({"U3", "U4", "U5", "U6"}),
                              [w](const std::vector<QMatrix>& p) { return w->assemble(p); });
  return out;
}

}  // namespace qsylv
