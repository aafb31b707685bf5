#include <gtest/gtest.h>

#include <array>
#include <cmath>

#include "qsylv/quaternion.hpp"
#include "qsylv/random.hpp"

using namespace qsylv;

namespace {

// Left-multiplication by a as a 4x4 real matrix acting on (w, x, y, z).
std::array<std::array<double, 4>, 4> left_matrix(const Quaternion& a) {
  return {{{a.w, -a.x, -a.y, -a.z},
           {a.x, a.w, -a.z, a.y},
           {a.y, a.z, a.w, -a.x},
           {a.z, -a.y, a.x, a.w}}};
}

Quaternion left_apply(const std::array<std::array<double, 4>, 4>& m, const Quaternion& b) {
  const double v[4] = {b.w, b.x, b.y, b.z};
  double r[4] = {0, 0, 0, 0};
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k) r[i] += m[i][k] * v[k];
  return {r[0], r[1], r[2], r[3]};
}

void expect_near(const Quaternion& a, const Quaternion& b, double tol) {
  EXPECT_NEAR(a.w, b.w, tol);
  EXPECT_NEAR(a.x, b.x, tol);
  EXPECT_NEAR(a.y, b.y, tol);
  EXPECT_NEAR(a.z, b.z, tol);
}

}  // namespace

TEST(Quaternion, UnitTable) {
  const auto i = Quaternion::i(), j = Quaternion::j(), k = Quaternion::k();
  EXPECT_EQ(i * i, Quaternion(-1));
  EXPECT_EQ(j * j, Quaternion(-1));
  EXPECT_EQ(k * k, Quaternion(-1));
  EXPECT_EQ(i * j * k, Quaternion(-1));
  EXPECT_EQ(i * j, k);
  EXPECT_EQ(j * i, -k);
}

TEST(Quaternion, IdentityIsNeutral) {
  const Quaternion q(0.3, -1, 2, 0.5);
  EXPECT_EQ(Quaternion(1) * q, q);
  EXPECT_EQ(q * Quaternion(1), q);
}

TEST(Quaternion, ProductMatchesRealRepresentation) {
  const Quaternion a(1, 2, 0, 0), b = Quaternion::j();
  EXPECT_EQ(quat_mul(a, b), left_apply(left_matrix(a), b));
  EXPECT_EQ(quat_mul(a, b), Quaternion(0, 0, 1, 2));

  Rng rng(7);
  for (int t = 0; t < 1000; ++t) {
    const Quaternion x = rng.quaternion(), y = rng.quaternion();
    expect_near(x * y, left_apply(left_matrix(x), y), 1e-14);
  }
}

TEST(Quaternion, Associativity) {
  Rng rng(11);
  for (int t = 0; t < 1000; ++t) {
    const Quaternion a = rng.quaternion(), b = rng.quaternion(), c = rng.quaternion();
    expect_near((a * b) * c, a * (b * c), 1e-13);
  }
}

TEST(Quaternion, ConjugateAndNorm) {
  const Quaternion q(1, -2, 3, -4);
  EXPECT_EQ(conj(conj(q)), q);
  EXPECT_EQ(norm2(q), 30.0);
  expect_near(q * inverse(q), Quaternion(1), 1e-15);
  EXPECT_THROW(inverse(Quaternion()), std::domain_error);
}

TEST(Quaternion, NormIsMultiplicative) {
  Rng rng(3);
  for (int t = 0; t < 10000; ++t) {
    const Quaternion a = rng.quaternion(), b = rng.quaternion();
    const double lhs = abs(a * b), rhs = abs(a) * abs(b);
    EXPECT_LE(std::abs(lhs - rhs), 1e-14 * rhs);
  }
}

TEST(Quaternion, EtaConjugationExamples) {
  const auto i = Quaternion::i(), j = Quaternion::j();
  EXPECT_EQ(quat_eta_conj(i, Eta::i), -i);
  EXPECT_EQ(quat_eta_conj(j, Eta::i), -i * conj(j) * i);
  EXPECT_EQ(quat_eta_conj(j, Eta::i), j);
  EXPECT_EQ(quat_eta_conj(Quaternion(1), Eta::k), Quaternion(1));
}

TEST(Quaternion, EtaConjugationMatchesTripleProduct) {
  Rng rng(5);
  for (Eta eta : {Eta::i, Eta::j, Eta::k}) {
    const Quaternion e = unit(eta);
    for (int t = 0; t < 1000; ++t) {
      const Quaternion q = rng.quaternion();
      expect_near(quat_eta_conj(q, eta), -(e * conj(q) * e), 1e-15);
    }
  }
}

TEST(Quaternion, EtaConjugationInvolutionAndAntiHomomorphism) {
  Rng rng(42);
  const double ulp4 = 4 * std::numeric_limits<double>::epsilon();
  for (int t = 0; t < 1000000; ++t) {
    const Eta eta = static_cast<Eta>(t % 3);
    const Quaternion q = rng.quaternion();
    ASSERT_EQ(quat_eta_conj(quat_eta_conj(q, eta), eta), q);
  }
  for (int t = 0; t < 100000; ++t) {
    const Eta eta = static_cast<Eta>(t % 3);
    const Quaternion a = rng.quaternion(), b = rng.quaternion();
    const Quaternion lhs = quat_eta_conj(a * b, eta);
    const Quaternion rhs = quat_eta_conj(b, eta) * quat_eta_conj(a, eta);
    const double scale = abs(a) * abs(b);
    ASSERT_LE(std::abs(lhs.w - rhs.w), ulp4 * scale);
    ASSERT_LE(std::abs(lhs.x - rhs.x), ulp4 * scale);
    ASSERT_LE(std::abs(lhs.y - rhs.y), ulp4 * scale);
    ASSERT_LE(std::abs(lhs.z - rhs.z), ulp4 * scale);
  }
}

TEST(Quaternion, ParseEta) {
  EXPECT_EQ(parse_eta("j"), Eta::j);
  EXPECT_STREQ(to_string(Eta::k), "k");
  EXPECT_THROW(parse_eta("x"), std::invalid_argument);
}
