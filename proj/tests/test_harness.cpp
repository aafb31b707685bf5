#include <gtest/gtest.h>

#include "qsylv/harness.hpp"

using namespace qsylv;

TEST(Variants, NamesRoundTrip) {
  for (Variant v : all_variants()) EXPECT_EQ(parse_variant(to_string(v)), v);
  EXPECT_EQ(parse_variant("eta-mixed"), Variant::eta_mixed);
  EXPECT_THROW(parse_variant("quintic"), std::invalid_argument);
}

TEST(Variants, BlockNameChecks) {
  Instance in;
  in.variant = Variant::eta_two;
  in.blocks = {{"B1", QMatrix(2, 2)}, {"C1", QMatrix(2, 2)}};
  EXPECT_THROW(check_block_names(in), DimensionError);  // D1 missing
  in.blocks["D1"] = QMatrix(2, 2);
  EXPECT_NO_THROW(check_block_names(in));
  in.blocks["F1"] = QMatrix(2, 2);
  EXPECT_THROW(check_block_names(in), DimensionError);
}

TEST(Generation, DeterministicPerSeed) {
  for (Variant v : all_variants()) {
    const auto d = DimensionProfile::random(77, 1, 4);
    const auto a = gen_consistent(v, d), b = gen_consistent(v, d);
    EXPECT_TRUE(a.instance.blocks == b.instance.blocks) << to_string(v);
    EXPECT_TRUE(a.witness == b.witness) << to_string(v);
    const auto c = gen_consistent(v, DimensionProfile::random(78, 1, 4));
    EXPECT_FALSE(a.instance.blocks == c.instance.blocks) << to_string(v);
  }
}

TEST(Generation, WitnessSatisfiesItsInstance) {
  for (Variant v : all_variants())
    for (std::uint64_t s = 0; s < 20; ++s) {
      auto d = DimensionProfile::random(s, 0, 4);
      d.eta = static_cast<Eta>(s % 3);
      const auto pl = gen_consistent(v, d);
      EXPECT_TRUE(verify_solution(pl.instance, pl.witness, 1e-10).pass) << to_string(v) << " seed " << s;
    }
}

TEST(Generation, ProfileLimit) {
  auto d = DimensionProfile::uniform(3, 1);
  d.q[2] = kMaxProfileDim + 1;
  EXPECT_THROW(gen_consistent(Variant::master, d), DimensionError);
}

TEST(Generation, InconsistentGuardRejectsWideUnknowns) {
  // Square 3x3 unknowns against a 3x3 right-hand side can span everything.
  EXPECT_THROW(gen_inconsistent(Variant::two_term, DimensionProfile::uniform(3, 2)), DimensionError);
  EXPECT_NO_THROW(gen_inconsistent(Variant::two_term, DimensionProfile::narrow(2)));
}

TEST(Generation, InconsistentIsDeterministic) {
  const auto a = gen_inconsistent(Variant::master, DimensionProfile::narrow(5));
  const auto b = gen_inconsistent(Variant::master, DimensionProfile::narrow(5));
  EXPECT_TRUE(a.blocks == b.blocks);
}

TEST(Verify, ZeroSolutionMissesByTheRhsNorm) {
  const auto pl = gen_consistent(Variant::master, DimensionProfile::uniform(2, 3));
  NamedSolution zero;
  for (const auto& [name, m] : pl.witness) zero[name] = QMatrix(m.rows(), m.cols());
  const auto rep = verify_solution(pl.instance, zero, 1e-9);
  EXPECT_FALSE(rep.pass);
  const auto& main = rep.equations.back();
  const double cc = frobenius_norm(pl.instance.get("Cc"));
  EXPECT_DOUBLE_EQ(main.absolute, cc);
  EXPECT_DOUBLE_EQ(main.relative, cc / (1.0 + cc));
}

TEST(Verify, MissingUnknownThrows) {
  const auto pl = gen_consistent(Variant::pair, DimensionProfile::uniform(2, 3));
  EXPECT_THROW(verify_solution(pl.instance, NamedSolution{}, 1e-9), DimensionError);
}

TEST(Verify, EtaHermicityIsChecked) {
  auto d = DimensionProfile::uniform(2, 4);
  d.eta = Eta::j;
  const auto pl = gen_consistent(Variant::eta_two, d);
  NamedSolution bad = pl.witness;
  bad["Y"](0, 1) += Quaternion(0, 0, 1e-3, 0);
  const auto rep = verify_solution(pl.instance, bad, 1e-9);
  EXPECT_FALSE(rep.pass);
  bool flagged = false;
  for (const auto& e : rep.equations)
    if (e.name == "Y eta-Hermitian") flagged = !e.pass;
  EXPECT_TRUE(flagged);
}
