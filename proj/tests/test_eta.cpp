#include <gtest/gtest.h>

#include "qsylv/harness.hpp"

using namespace qsylv;

namespace {
const Quaternion I = Quaternion::i(), J = Quaternion::j(), K = Quaternion::k();
const Eta kEtas[] = {Eta::i, Eta::j, Eta::k};
const Variant kEtaVariants[] = {Variant::eta_full, Variant::eta_three, Variant::eta_two, Variant::eta_mixed};

std::vector<QMatrix> ordered(const NamedSolution& sol, const std::vector<std::string>& names) {
  std::vector<QMatrix> out;
  for (const auto& n : names) out.push_back(sol.at(n));
  return out;
}
}  // namespace

TEST(Symmetrize, ScalarUnits) {
  // For eta = i: i^{eta*} = -i, so i has no Hermitian part, while j and k are i-Hermitian.
  EXPECT_EQ(frobenius_norm(symmetrize(QMatrix{{I}}, Eta::i)), 0.0);
  EXPECT_TRUE(symmetrize(QMatrix{{J}}, Eta::i) == QMatrix{{J}});
  EXPECT_TRUE(symmetrize(QMatrix{{K}}, Eta::i) == QMatrix{{K}});
  EXPECT_TRUE(symmetrize(QMatrix{{1}}, Eta::j) == QMatrix{{1}});
  EXPECT_EQ(frobenius_norm(symmetrize(QMatrix{{K}}, Eta::k)), 0.0);
}

TEST(Symmetrize, ResultIsEtaHermitianAndIdempotent) {
  Rng g(4);
  for (Eta eta : kEtas) {
    const QMatrix S = symmetrize(g.matrix(4, 4), eta);
    EXPECT_LE(eta_hermicity_defect(S, eta), 1e-15);
    EXPECT_TRUE(symmetrize(S, eta) == S);
  }
}

TEST(Symmetrize, NonSquareThrows) { EXPECT_THROW(symmetrize(QMatrix(2, 3), Eta::j), DimensionError); }

TEST(EtaProjectors, LeftProjectorImageIsRightProjectorOfImage) {
  Rng g(8);
  for (Eta eta : kEtas)
    for (int t = 0; t < 20; ++t) {
      const auto m = static_cast<std::size_t>(g.uniform_int(1, 5));
      const auto n = static_cast<std::size_t>(g.uniform_int(1, 5));
      const QMatrix A = g.low_rank(m, n, static_cast<std::size_t>(g.uniform_int(0, 3)));
      const QMatrix lhs = eta_conj_transpose(pinv(A).proj_left, eta);
      const QMatrix rhs = pinv(eta_conj_transpose(A, eta)).proj_right;
      EXPECT_LE(frobenius_norm(lhs - rhs), 1e-12);
    }
}

TEST(EtaPlanted, AllVariantsAllEtas) {
  for (Variant v : kEtaVariants)
    for (Eta eta : kEtas)
      for (std::uint64_t s = 0; s < 15; ++s) {
        auto d = DimensionProfile::random(s, 1, 4);
        d.eta = eta;
        const auto pl = gen_consistent(v, d);
        const auto r = solve(pl.instance);
        ASSERT_TRUE(r.consistent()) << to_string(v) << " " << to_string(eta) << " seed " << s;
        Rng g(s);
        for (int k = 0; k < 3; ++k) {
          const auto p = k == 0 ? r.family->zero_params() : r.family->random_params(g);
          const auto sol = r.family->named(r.family->assemble(p));
          EXPECT_TRUE(evaluate(equations(pl.instance), sol, 1e-8).pass) << to_string(v) << " seed " << s;
          for (const auto& n : eta_hermitian_unknowns(v))
            EXPECT_LE(eta_hermicity_defect(sol.at(n), eta), 1e-12) << to_string(v) << " " << n;
        }
      }
}

TEST(EtaDoubling, WitnessMapsBothDirections) {
  for (Eta eta : kEtas)
    for (std::uint64_t s = 0; s < 15; ++s) {
      auto d = DimensionProfile::random(s, 1, 4);
      d.eta = eta;
      const auto pl = gen_consistent(Variant::eta_full, d);
      const EtaSystem sys = to_eta_system(pl.instance);
      const MasterInstance doubled = sys.doubled();

      const auto lifted = eta_lift_solution(ordered(pl.witness, eta_full_unknowns()), eta);
      NamedSolution up;
      for (std::size_t i = 0; i < lifted.size(); ++i) up[master_unknowns()[i]] = lifted[i];
      EXPECT_TRUE(verify_solution(doubled, up, 1e-10).pass) << "lift seed " << s;

      const auto r = solve_master(doubled);
      ASSERT_TRUE(r.consistent());
      Rng g(s);
      const auto projected = eta_project_solution(r.family->assemble(r.family->random_params(g)), eta);
      NamedSolution down;
      for (std::size_t i = 0; i < projected.size(); ++i) down[eta_full_unknowns()[i]] = projected[i];
      EXPECT_TRUE(evaluate(eta_full_equations(sys), down, 1e-10).pass) << "project seed " << s;
    }
}

TEST(EtaFull, NonHermitianRhsIsInconsistent) {
  for (Eta eta : kEtas) {
    auto d = DimensionProfile::uniform(2, 9);
    d.eta = eta;
    for (Variant v : {Variant::eta_full, Variant::eta_three}) {
      Instance in = gen_consistent(v, d).instance;
      QMatrix& Cc = in.blocks.at("Cc");
      Cc(0, 1) += Quaternion(0.5, 0.25, 0, 0);
      const auto r = solve(in);
      EXPECT_FALSE(r.consistent());
      const auto f = r.report.failing();
      EXPECT_NE(std::find(f.begin(), f.end(), "Cc = Cc^eta*"), f.end());
    }
  }
}

TEST(EtaFull, IncompatibleSideConstraintIsInconsistent) {
  auto d = DimensionProfile::uniform(2, 10);
  Instance in = gen_consistent(Variant::eta_full, d).instance;
  in.blocks.at("C2") = in.blocks.at("C2") + Rng(1).matrix(2, 2);
  EXPECT_FALSE(solve(in).consistent());
}

TEST(EtaThree, FourthBlockRejected) {
  EtaSystem s;
  s.Cc = QMatrix(2, 2);
  s.E[3] = QMatrix(2, 1);
  EXPECT_THROW(solve_eta_three(s), DimensionError);
}

TEST(EtaTwo, InvertibleBAndEmptyC) {
  Rng g(21);
  for (Eta eta : kEtas) {
    const QMatrix B = g.matrix(3, 3);
    const QMatrix Y = symmetrize(g.matrix(3, 3), eta);
    const QMatrix C(3, 0);
    const QMatrix D = B * Y * eta_conj_transpose(B, eta);
    const auto r = solve_eta_two(B, C, D, eta);
    ASSERT_TRUE(r.consistent());
    const QMatrix Ys = r.family->particular()[0];
    EXPECT_LE(frobenius_norm(Ys - Y), 1e-10 * (1.0 + frobenius_norm(Y)));
    const QMatrix Yr = r.family->assemble(r.family->random_params(g))[0];
    EXPECT_LE(frobenius_norm(Yr - Y), 1e-10 * (1.0 + frobenius_norm(Y)));
  }
}

TEST(EtaTwo, NonHermitianRhsIsAPreconditionError) {
  const QMatrix B{{1, 0}, {0, 1}};
  const QMatrix D{{I, 0}, {0, 0}};
  EXPECT_THROW(solve_eta_two(B, B, D, Eta::i), PreconditionError);
}

TEST(EtaMixed, NonHermitianRhsIsAPreconditionError) {
  auto d = DimensionProfile::uniform(2, 12);
  Instance in = gen_consistent(Variant::eta_mixed, d).instance;
  in.blocks.at("D3")(1, 0) += Quaternion(1, 0, 0, 0);
  EXPECT_THROW(solve(in), PreconditionError);
}

TEST(EtaInconsistent, BothFormsReject) {
  for (Variant v : kEtaVariants)
    for (Eta eta : kEtas)
      for (std::uint64_t s = 0; s < 8; ++s) {
        auto d = DimensionProfile::narrow(s);
        d.eta = eta;
        const auto r = solve(gen_inconsistent(v, d));
        EXPECT_FALSE(r.consistent()) << to_string(v) << " seed " << s;
        EXPECT_TRUE(r.report.forms_agree) << to_string(v) << " seed " << s;
      }
}
