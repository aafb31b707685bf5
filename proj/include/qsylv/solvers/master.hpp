#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "qsylv/solvers/five_term.hpp"

namespace qsylv {

/// A1 U = C1, V B1 = D1, A2 X = C2, X B2 = D2, A3 Y = C3, Y B3 = D3, A4 Z = C4, Z B4 = D4,
/// E1 U + V F1 + E2 X F2 + E3 Y F3 + E4 Z F4 = Cc.
/// Blocks left default-constructed (0x0) are absent; normalized() resizes them to empty blocks of the right shape.
struct MasterInstance {
  std::array<QMatrix, 4> A, B, C, D, E, F;
  QMatrix Cc;

  /// Unknown shapes: U is p1 x n, V is m x q1, X/Y/Z are p_i x q_i.
  struct Shapes {
    std::size_t m = 0, n = 0;
    std::array<std::size_t, 4> p{}, q{};
  };

  Shapes shapes() const {
    Shapes s;
    s.m = Cc.rows();
    s.n = Cc.cols();
    auto pick = [](std::initializer_list<std::pair<const QMatrix*, bool>> src) -> std::size_t {
      for (auto [mat, use_cols] : src)
        if (mat->rows() != 0 || mat->cols() != 0) return use_cols ? mat->cols() : mat->rows();
      return 0;
    };
    s.p[0] = pick({{&E[0], true}, {&A[0], true}});
    s.q[0] = pick({{&F[0], false}, {&B[0], false}});
    for (int i = 1; i < 4; ++i) {
      s.p[i] = pick({{&E[i], true}, {&A[i], true}, {&D[i], false}});
      s.q[i] = pick({{&F[i], false}, {&B[i], false}, {&C[i], true}});
    }
    return s;
  }

  MasterInstance normalized() const {
    MasterInstance out = *this;
    const Shapes s = shapes();
    auto fill = [](QMatrix& mat, std::size_t r, std::size_t c) {
      if (mat.rows() == 0 && mat.cols() == 0) mat = QMatrix(r, c);
    };
    fill(out.E[0], s.m, s.p[0]);
    fill(out.A[0], 0, s.p[0]);
    fill(out.C[0], 0, s.n);
    fill(out.F[0], s.q[0], s.n);
    fill(out.B[0], s.q[0], 0);
    fill(out.D[0], s.m, 0);
    for (int i = 1; i < 4; ++i) {
      fill(out.E[i], s.m, s.p[i]);
      fill(out.F[i], s.q[i], s.n);
      fill(out.A[i], 0, s.p[i]);
      fill(out.C[i], 0, s.q[i]);
      fill(out.B[i], s.q[i], 0);
      fill(out.D[i], s.p[i], 0);
    }
    out.validate();
    return out;
  }

  void validate() const {
    const Shapes s = shapes();
    auto need = [](bool ok, const std::string& what) {
      if (!ok) throw DimensionError("master instance: " + what);
    };
    need(E[0].rows() == s.m && E[0].cols() == s.p[0], "E1 must be " + std::to_string(s.m) + "x" + std::to_string(s.p[0]));
    need(A[0].cols() == s.p[0] && C[0].rows() == A[0].rows() && C[0].cols() == s.n, "A1 U = C1 shapes");
    need(F[0].rows() == s.q[0] && F[0].cols() == s.n, "F1 must be " + std::to_string(s.q[0]) + "x" + std::to_string(s.n));
    need(B[0].rows() == s.q[0] && D[0].rows() == s.m && D[0].cols() == B[0].cols(), "V B1 = D1 shapes");
    for (int i = 1; i < 4; ++i) {
      const std::string k = std::to_string(i + 1);
      need(E[i].rows() == s.m && E[i].cols() == s.p[i], "E" + k + " shape");
      need(F[i].rows() == s.q[i] && F[i].cols() == s.n, "F" + k + " shape");
      need(A[i].cols() == s.p[i] && C[i].rows() == A[i].rows() && C[i].cols() == s.q[i], "A" + k + " X = C" + k + " shapes");
      need(B[i].rows() == s.q[i] && D[i].rows() == s.p[i] && D[i].cols() == B[i].cols(), "X B" + k + " = D" + k + " shapes");
    }
  }

  double coefficient_scale() const {
    double s = 0.0;
    for (int i = 0; i < 4; ++i)
      s = std::max({s, frobenius_norm(A[i]), frobenius_norm(B[i]), frobenius_norm(E[i]), frobenius_norm(F[i])});
    return s;
  }
};

inline const std::vector<std::string>& master_unknowns() {
  static const std::vector<std::string> names{"U", "V", "X", "Y", "Z"};
  return names;
}

inline std::vector<LinearEquation> master_equations(const MasterInstance& I) {
  const auto& n = master_unknowns();
  std::vector<LinearEquation> eqs;
  eqs.push_back({"A1 U = C1", {left_term(I.A[0], "U")}, I.C[0]});
  eqs.push_back({"V B1 = D1", {right_term("V", I.B[0])}, I.D[0]});
  for (int i = 1; i < 4; ++i) {
    const std::string k = std::to_string(i + 1);
    eqs.push_back({"A" + k + " " + n[i + 1] + " = C" + k, {left_term(I.A[i], n[i + 1])}, I.C[i]});
    eqs.push_back({n[i + 1] + " B" + k + " = D" + k, {right_term(n[i + 1], I.B[i])}, I.D[i]});
  }
  eqs.push_back({"E1 U + V F1 + E2 X F2 + E3 Y F3 + E4 Z F4 = Cc",
                 {left_term(I.E[0], "U"), right_term("V", I.F[0]), term(I.E[1], "X", I.F[1]),
                  term(I.E[2], "Y", I.F[2]), term(I.E[3], "Z", I.F[3])},
                 I.Cc});
  return eqs;
}

struct MasterIntermediates {
  std::array<QMatrix, 4> Aii, Bii;  // E_i L_{A_i}, R_{B_i} F_i
  QMatrix B21, B31, B41, A12, A13, A14, T1, N1, M1, S1_mid, T2;
  QMatrix G, G1, G2, G3, G4, H, H1, H2, H3, H4, L1, L2, L3, L4;
  QMatrix C11, D11, C22, D22, C33, D33, E11, E22, E33, E44, M, N, F, E, S;
  QMatrix F11, G11, F22, G22, F33, F44;
};

namespace detail {

struct MasterWork {
  MasterInstance inst;
  std::array<PinvBundle, 4> pA, pB;
  QMatrix U0, V0;
  std::array<QMatrix, 4> X0;  // index 1..3 used
  QMatrix T1;
  double t_mass = 0.0;  // magnitude of the data T1 is assembled from
  std::unique_ptr<FiveTermWork> ft;

  MasterWork(const Numerics& nx, const MasterInstance& in) : inst(in.normalized()) {
    const auto& I = inst;
    const double s = nx.scale();
    for (int i = 0; i < 4; ++i) {
      pA[i] = nx.pinv(I.A[i], s);
      pB[i] = nx.pinv(I.B[i], s);
    }
    U0 = pA[0].pinv * I.C[0];
    V0 = I.D[0] * pB[0].pinv;
    T1 = I.Cc;
    t_mass = frobenius_norm(I.Cc);
    auto sub = [&](const QMatrix& t) {
      t_mass += frobenius_norm(t);
      T1 -= t;
    };
    sub(I.E[0] * U0);
    sub(V0 * I.F[0]);
    for (int i = 1; i < 4; ++i) {
      X0[i] = pA[i].pinv * I.C[i] + pA[i].proj_left * I.D[i] * pB[i].pinv;
      sub(I.E[i] * X0[i] * I.F[i]);
    }
    FiveTermInstance red{I.E[0] * pA[0].proj_left, pB[0].proj_right * I.F[0],
                         I.E[1] * pA[1].proj_left, pB[1].proj_right * I.F[1],
                         I.E[2] * pA[2].proj_left, pB[2].proj_right * I.F[2],
                         I.E[3] * pA[3].proj_left, pB[3].proj_right * I.F[3],
                         T1};
    ft = std::make_unique<FiveTermWork>(nx, std::move(red));
  }

  MasterIntermediates intermediates() const {
    const auto& r = ft->inst;
    const auto& f = ft->im;
    MasterIntermediates m;
    m.Aii = {r.A1, r.A2, r.A3, r.A4};
    m.Bii = {r.B1, r.B2, r.B3, r.B4};
    m.B21 = f.B11;
    m.B31 = f.B22;
    m.B41 = f.B33;
    m.A12 = f.A11;
    m.A13 = f.A22;
    m.A14 = f.A33;
    m.T1 = T1;
    m.N1 = f.N1;
    m.M1 = f.M1;
    m.S1_mid = f.S1;
    m.T2 = f.T1;
    m.G = f.C;
    m.G1 = f.C1;
    m.G2 = f.C2;
    m.G3 = f.C3;
    m.G4 = f.C4;
    m.H = f.D;
    m.H1 = f.D1;
    m.H2 = f.D2;
    m.H3 = f.D3;
    m.H4 = f.D4;
    m.L1 = f.E1;
    m.L2 = f.E2;
    m.L3 = f.E3;
    m.L4 = f.E4;
    m.C11 = f.C11;
    m.D11 = f.D11;
    m.C22 = f.C22;
    m.D22 = f.D22;
    m.C33 = f.C33;
    m.D33 = f.D33;
    m.E11 = f.E11;
    m.E22 = f.E22;
    m.E33 = f.E33;
    m.E44 = f.E44;
    m.M = f.M;
    m.N = f.N;
    m.F = f.F;
    m.E = f.E;
    m.S = f.S;
    m.F11 = f.F11;
    m.G11 = f.G1;
    m.F22 = f.F22;
    m.G22 = f.G2;
    m.F33 = f.F1;
    m.F44 = f.F2;
    return m;
  }

  /// Pair compatibility A_i D_i = C_i B_i for the constrained unknowns.
  void compat_conditions(const Numerics& nx, SolvabilityReport& rep) const {
    const auto& I = inst;
    for (int i = 1; i < 4; ++i) {
      const std::string k = std::to_string(i + 1);
      rep.add_compat(nx, "A" + k + " D" + k + " = C" + k + " B" + k, I.A[i] * I.D[i] - I.C[i] * I.B[i],
                     frobenius_norm(I.A[i]) * frobenius_norm(I.D[i]) + frobenius_norm(I.C[i]) * frobenius_norm(I.B[i]));
    }
  }

  void mp_conditions(const Numerics& nx, SolvabilityReport& rep) const {
    const auto& I = inst;
    for (int i = 0; i < 4; ++i) {
      const std::string k = std::to_string(i + 1);
      rep.add_mp(nx, "R_A" + k + " C" + k + " = 0", pA[i].proj_right * I.C[i], frobenius_norm(I.C[i]));
      rep.add_mp(nx, "D" + k + " L_B" + k + " = 0", I.D[i] * pB[i].proj_left, frobenius_norm(I.D[i]));
    }
    ft->conditions(nx, rep, t_mass, {"G", "H", "L"});
  }

  void side_rank_conditions(const Numerics& nx, SolvabilityReport& rep) const {
    const auto& I = inst;
    for (int i = 0; i < 4; ++i) {
      const std::string k = std::to_string(i + 1);
      rep.add_rank("r(C" + k + ", A" + k + ") = r(A" + k + ")", nx.rank(hstack({I.C[i], I.A[i]})), pA[i].rank);
      rep.add_rank("r(D" + k + "; B" + k + ") = r(B" + k + ")", nx.rank(vstack({I.D[i], I.B[i]})), pB[i].rank);
    }
  }

  void joint_rank_conditions(const Numerics& nx, SolvabilityReport& rep) const {
    const auto& I = inst;
    const QMatrix &Cc = I.Cc, &E1 = I.E[0], &E2 = I.E[1], &E3 = I.E[2], &E4 = I.E[3];
    const QMatrix &F1 = I.F[0], &F2 = I.F[1], &F3 = I.F[2], &F4 = I.F[3];
    const QMatrix &A1 = I.A[0], &A2 = I.A[1], &A3 = I.A[2], &A4 = I.A[3];
    const QMatrix &B1 = I.B[0], &B2 = I.B[1], &B3 = I.B[2], &B4 = I.B[3];
    const QMatrix &C1 = I.C[0], &D1 = I.D[0];
    const QMatrix C2F2 = I.C[1] * F2, C3F3 = I.C[2] * F3, C4F4 = I.C[3] * F4;
    const QMatrix E2D2 = E2 * I.D[1], E3D3 = E3 * I.D[2], E4D4 = E4 * I.D[3];
    auto r = [&](const QMatrix& x) { return nx.rank(x); };

    rep.add_rank("joint rank 1",
                 r(block({{Cc, E1, E2, E3, E4, D1},
                          {F1, zero, zero, zero, zero, B1},
                          {C1, A1, zero, zero, zero, zero},
                          {C2F2, zero, A2, zero, zero, zero},
                          {C3F3, zero, zero, A3, zero, zero},
                          {C4F4, zero, zero, zero, A4, zero}})),
                 r(block({{E1, E2, E3, E4},
                          {A1, zero, zero, zero},
                          {zero, A2, zero, zero},
                          {zero, zero, A3, zero},
                          {zero, zero, zero, A4}})) +
                     r(hstack({F1, B1})));
    rep.add_rank("joint rank 2",
                 r(block({{Cc, E1, E2, E4, E3D3, D1},
                          {C1, A1, zero, zero, zero, zero},
                          {C2F2, zero, A2, zero, zero, zero},
                          {C4F4, zero, zero, A4, zero, zero},
                          {F3, zero, zero, zero, B3, zero},
                          {F1, zero, zero, zero, zero, B1}})),
                 r(block({{E1, E2, E4}, {A1, zero, zero}, {zero, A2, zero}, {zero, zero, A4}})) +
                     r(block({{F3, B3, zero}, {F1, zero, B1}})));
    rep.add_rank("joint rank 3",
                 r(block({{Cc, E1, E3, E4, E2D2, D1},
                          {C1, A1, zero, zero, zero, zero},
                          {C3F3, zero, A3, zero, zero, zero},
                          {C4F4, zero, zero, A4, zero, zero},
                          {F2, zero, zero, zero, B2, zero},
                          {F1, zero, zero, zero, zero, B1}})),
                 r(block({{E1, E3, E4}, {A1, zero, zero}, {zero, A3, zero}, {zero, zero, A4}})) +
                     r(block({{F2, B2, zero}, {F1, zero, B1}})));
    rep.add_rank("joint rank 4",
                 r(block({{Cc, E4, E1, E2D2, E3D3, D1},
                          {F2, zero, zero, B2, zero, zero},
                          {F3, zero, zero, zero, B3, zero},
                          {F1, zero, zero, zero, zero, B1},
                          {C4F4, A4, zero, zero, zero, zero},
                          {C1, zero, A1, zero, zero, zero}})),
                 r(block({{F2, B2, zero, zero}, {F3, zero, B3, zero}, {F1, zero, zero, B1}})) +
                     r(block({{E4, E1}, {A4, zero}, {zero, A1}})));
    rep.add_rank("joint rank 5",
                 r(block({{Cc, E1, E2, E3, E4D4, D1},
                          {C1, A1, zero, zero, zero, zero},
                          {C2F2, zero, A2, zero, zero, zero},
                          {C3F3, zero, zero, A3, zero, zero},
                          {F4, zero, zero, zero, B4, zero},
                          {F1, zero, zero, zero, zero, B1}})),
                 r(block({{E1, E2, E3}, {A1, zero, zero}, {zero, A2, zero}, {zero, zero, A3}})) +
                     r(block({{F4, B4, zero}, {F1, zero, B1}})));
    rep.add_rank("joint rank 6",
                 r(block({{Cc, E2, E1, E3D3, E4D4, D1},
                          {F3, zero, zero, B3, zero, zero},
                          {F4, zero, zero, zero, B4, zero},
                          {F1, zero, zero, zero, zero, B1},
                          {C2F2, A2, zero, zero, zero, zero},
                          {C1, zero, A1, zero, zero, zero}})),
                 r(block({{F3, B3, zero, zero}, {F4, zero, B4, zero}, {F1, zero, zero, B1}})) +
                     r(block({{E2, E1}, {A2, zero}, {zero, A1}})));
    rep.add_rank("joint rank 7",
                 r(block({{Cc, E3, E1, E2D2, E4D4, D1},
                          {F2, zero, zero, B2, zero, zero},
                          {F4, zero, zero, zero, B4, zero},
                          {F1, zero, zero, zero, zero, B1},
                          {C3F3, A3, zero, zero, zero, zero},
                          {C1, zero, A1, zero, zero, zero}})),
                 r(block({{F2, B2, zero, zero}, {F4, zero, B4, zero}, {F1, zero, zero, B1}})) +
                     r(block({{E3, E1}, {A3, zero}, {zero, A1}})));
    rep.add_rank("joint rank 8",
                 r(block({{Cc, E1, E4D4, E2D2, E3D3, D1},
                          {F4, zero, B4, zero, zero, zero},
                          {F2, zero, zero, B2, zero, zero},
                          {F3, zero, zero, zero, B3, zero},
                          {F1, zero, zero, zero, zero, B1},
                          {C1, A1, zero, zero, zero, zero}})),
                 r(block({{F4, B4, zero, zero, zero},
                          {F2, zero, B2, zero, zero},
                          {F3, zero, zero, B3, zero},
                          {F1, zero, zero, zero, B1}})) +
                     r(vstack({E1, A1})));
    rep.add_rank(
        "joint rank 9",
        r(block({{Cc, E2, E1, zero, zero, zero, E4, E3D3, D1, zero, zero, E4D4},
                 {F3, zero, zero, zero, zero, zero, zero, B3, zero, zero, zero, zero},
                 {F1, zero, zero, zero, zero, zero, zero, zero, B1, zero, zero, zero},
                 {zero, zero, zero, Cc, E3, E1, E4, zero, zero, E2D2, D1, zero},
                 {zero, zero, zero, F2, zero, zero, zero, zero, zero, B2, zero, zero},
                 {zero, zero, zero, F1, zero, zero, zero, zero, zero, zero, B1, zero},
                 {F4, zero, zero, -F4, zero, zero, zero, zero, zero, zero, zero, B4},
                 {C2F2, A2, zero, zero, zero, zero, zero, zero, zero, zero, zero, zero},
                 {C1, zero, A1, zero, zero, zero, zero, zero, zero, zero, zero, zero},
                 {zero, zero, zero, C3F3, A3, zero, zero, zero, zero, zero, zero, zero},
                 {zero, zero, zero, C1, zero, A1, zero, zero, zero, zero, zero, zero},
                 {zero, zero, zero, C4F4, zero, zero, A4, zero, zero, zero, zero, zero}})),
        r(block({{F3, zero, B3, zero, zero, zero, zero},
                 {F1, zero, zero, B1, zero, zero, zero},
                 {zero, F2, zero, zero, B2, zero, zero},
                 {zero, F1, zero, zero, zero, B1, zero},
                 {F4, F4, zero, zero, zero, zero, B4}})) +
            r(block({{E2, E1, zero, zero, E4},
                     {zero, zero, E3, E1, E4},
                     {A2, zero, zero, zero, zero},
                     {zero, A1, zero, zero, zero},
                     {zero, zero, A3, zero, zero},
                     {zero, zero, zero, A1, zero},
                     {zero, zero, zero, zero, A4}})));
  }

  std::vector<ParamSpec> params() const {
    std::vector<ParamSpec> p = ft->params();
    p[0].name = "W11";
    p[1].name = "W12";
    p[2].name = "W13";
    return p;
  }

  std::vector<QMatrix> assemble(const std::vector<QMatrix>& prm, Y3Branch branch) const {
    const std::vector<QMatrix> f = ft->assemble(prm, branch);  // S1, S2, U1, U2, U3
    std::vector<QMatrix> out(5);
    out[0] = U0 + pA[0].proj_left * f[0];
    out[1] = V0 + f[1] * pB[0].proj_right;
    for (int i = 1; i < 4; ++i) out[i + 1] = X0[i] + pA[i].proj_left * f[i + 1] * pB[i].proj_right;
    return out;
  }
};

inline double master_scale(const MasterInstance& inst, const SolverOptions& opt) {
  return opt.scale ? *opt.scale : inst.coefficient_scale();
}

}  // namespace detail

inline MasterIntermediates master_intermediates(const MasterInstance& inst, const SolverOptions& opt = {}) {
  const MasterInstance n = inst.normalized();
  const Numerics nx(opt, detail::master_scale(n, opt));
  return detail::MasterWork(nx, n).intermediates();
}

inline SolvabilityReport check_master(const MasterInstance& inst, const SolverOptions& opt = {}) {
  const MasterInstance n = inst.normalized();
  const Numerics nx(opt, detail::master_scale(n, opt));
  const detail::MasterWork w(nx, n);
  SolvabilityReport rep;
  w.compat_conditions(nx, rep);
  w.mp_conditions(nx, rep);
  w.side_rank_conditions(nx, rep);
  w.joint_rank_conditions(nx, rep);
  rep.finalize();
  return rep;
}

inline SolveResult solve_master(const MasterInstance& inst, const SolverOptions& opt = {}) {
  const MasterInstance n = inst.normalized();
  const Numerics nx(opt, detail::master_scale(n, opt));
  auto w = std::make_shared<const detail::MasterWork>(nx, n);
  SolveResult out;
  w->compat_conditions(nx, out.report);
  w->mp_conditions(nx, out.report);
  w->side_rank_conditions(nx, out.report);
  w->joint_rank_conditions(nx, out.report);
  out.report.finalize();
  if (!out.report.consistent) return out;
  const Y3Branch branch = opt.branch;
  out.family = SolutionFamily(master_unknowns(), w->params(),
                              [w, branch](const std::vector<QMatrix>& p) { return w->assemble(p, branch); });
  return out;
}

}  // namespace qsylv
