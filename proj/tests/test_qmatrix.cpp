#include <gtest/gtest.h>

#include "qsylv/qmatrix.hpp"
#include "qsylv/random.hpp"

using namespace qsylv;

namespace {
const Quaternion I = Quaternion::i(), J = Quaternion::j(), K = Quaternion::k();

double rel_diff(const QMatrix& a, const QMatrix& b) {
  return frobenius_norm(a - b) / std::max(1.0, frobenius_norm(b));
}
}  // namespace

TEST(QMatrix, LiteralAndShape) {
  QMatrix a{{1, I}, {J, K}};
  EXPECT_EQ(a.rows(), 2u);
  EXPECT_EQ(a(1, 0), J);
  EXPECT_THROW((QMatrix{{1, 2}, {3}}), DimensionError);
  EXPECT_THROW(QMatrix(2, 2, std::vector<Quaternion>(3)), DimensionError);
}

TEST(QMatrix, ProductExamples) {
  Rng rng(1);
  const QMatrix A = rng.matrix(2, 5);
  EXPECT_EQ(QMatrix::identity(2) * A, A);
  EXPECT_EQ((QMatrix{{I}} * QMatrix{{J}}), (QMatrix{{K}}));
  const QMatrix P = QMatrix(3, 0) * QMatrix(0, 4);
  EXPECT_EQ(P, QMatrix::zeros(3, 4));
  EXPECT_THROW(mat_mul(QMatrix(2, 3), QMatrix(2, 3)), DimensionError);
}

TEST(QMatrix, ProductIsOrderSensitive) {
  const QMatrix a{{I}}, b{{J}};
  EXPECT_NE(a * b, b * a);
}

TEST(QMatrix, ConjTranspose) {
  EXPECT_EQ(conj_transpose(QMatrix{{I, J}}), (QMatrix{{-I}, {-J}}));
  EXPECT_EQ(conj_transpose(QMatrix{{Quaternion(1, 1)}}), (QMatrix{{Quaternion(1, -1)}}));
  Rng rng(2);
  for (int t = 0; t < 50; ++t) {
    const QMatrix A = rng.matrix(3, 4), B = rng.matrix(4, 2);
    EXPECT_EQ(conj_transpose(conj_transpose(A)), A);
    EXPECT_LE(rel_diff(conj_transpose(A * B), conj_transpose(B) * conj_transpose(A)), 1e-13);
  }
}

TEST(QMatrix, EtaConjTranspose) {
  EXPECT_EQ(eta_conj_transpose(QMatrix{{I}}, Eta::i), (QMatrix{{-I}}));
  const QMatrix S{{1, 2}, {2, 3}};
  EXPECT_EQ(eta_conj_transpose(S, Eta::i), S);
  const QMatrix D{{J, 0}, {0, J}};
  const QMatrix jD = scalar_mul(-J, scalar_mul(conj_transpose(D), J));
  // -j (jI)* j = -jI: the component along eta flips sign, as for scalars.
  EXPECT_EQ(eta_conj_transpose(D, Eta::j), jD);
  EXPECT_EQ(eta_conj_transpose(D, Eta::j), -D);
  EXPECT_EQ(eta_conj_transpose(D, Eta::i), D);

  Rng rng(3);
  for (Eta eta : {Eta::i, Eta::j, Eta::k}) {
    const QMatrix A = rng.matrix(3, 5);
    EXPECT_EQ(eta_conj_transpose(eta_conj_transpose(A, eta), eta), A);
    const QMatrix expected = scalar_mul(-unit(eta), scalar_mul(conj_transpose(A), unit(eta)));
    EXPECT_LE(rel_diff(eta_conj_transpose(A, eta), expected), 1e-15);
  }
}

TEST(QMatrix, EmbedExamples) {
  const ComplexMatrix e1 = embed(QMatrix{{1}});
  EXPECT_EQ(e1(0, 0), Complex(1));
  EXPECT_EQ(e1(0, 1), Complex(0));
  EXPECT_EQ(e1(1, 1), Complex(1));
  const ComplexMatrix ej = embed(QMatrix{{J}});
  EXPECT_EQ(ej(0, 0), Complex(0));
  EXPECT_EQ(ej(0, 1), Complex(1));
  EXPECT_EQ(ej(1, 0), Complex(-1));
  EXPECT_EQ(ej(1, 1), Complex(0));
}

TEST(QMatrix, EmbedIsRingHomomorphism) {
  Rng rng(4);
  for (int t = 0; t < 50; ++t) {
    const QMatrix A = rng.matrix(3, 2), B = rng.matrix(2, 4), C = rng.matrix(3, 2);
    const ComplexMatrix lhs = embed(A * B), rhs = embed(A) * embed(B);
    EXPECT_LE((lhs - rhs).frobenius_norm(), 1e-12 * lhs.frobenius_norm());
    const ComplexMatrix s = embed(A + C), sa = embed(A), sc = embed(C);
    double dev = 0;
    for (std::size_t r = 0; r < s.rows(); ++r)
      for (std::size_t c = 0; c < s.cols(); ++c) dev += std::norm(s(r, c) - sa(r, c) - sc(r, c));
    EXPECT_LE(std::sqrt(dev), 1e-12 * s.frobenius_norm());
  }
}

TEST(QMatrix, UnembedRoundTripAndStructureCheck) {
  Rng rng(5);
  const QMatrix A = rng.matrix(4, 3);
  EXPECT_EQ(unembed(embed(A)), A);
  EXPECT_EQ(unembed(ComplexMatrix::identity(2)), (QMatrix{{1}}));
  ComplexMatrix bad(2, 2);
  bad(1, 0) = 1.0;
  EXPECT_THROW(unembed(bad), StructureError);
  EXPECT_THROW(unembed(ComplexMatrix(3, 2)), StructureError);
}

TEST(QMatrix, BlockAssemblyRoundTrip) {
  Rng rng(6);
  const QMatrix A = rng.matrix(2, 3), B = rng.matrix(2, 1), C = rng.matrix(4, 1);
  const QMatrix M = block({{A, B}, {zero, C}});
  ASSERT_EQ(M.rows(), 6u);
  ASSERT_EQ(M.cols(), 4u);
  EXPECT_EQ(submatrix(M, 0, 0, 2, 3), A);
  EXPECT_EQ(submatrix(M, 0, 3, 2, 1), B);
  EXPECT_EQ(submatrix(M, 2, 0, 4, 3), QMatrix::zeros(4, 3));
  EXPECT_EQ(submatrix(M, 2, 3, 4, 1), C);
  EXPECT_EQ(hstack({A, B}), submatrix(M, 0, 0, 2, 4));
  EXPECT_EQ(vstack({B, C}), select_cols(M, 3, 1));
  EXPECT_EQ(block({{A, zero}, {zero, C}}).cols(), 4u);
  EXPECT_THROW(block({{zero, A}, {zero, C}}), DimensionError);
  EXPECT_THROW(block({{A, C}}), DimensionError);
}

TEST(QMatrix, EmptyBlocksAreLegal) {
  const QMatrix A(2, 0), B(2, 3);
  const QMatrix M = block({{A, B}, {QMatrix(0, 0), QMatrix(0, 3)}});
  EXPECT_EQ(M, B);
  EXPECT_EQ(frobenius_norm(QMatrix(0, 4)), 0.0);
}

TEST(QMatrix, Selectors) {
  Rng rng(8);
  const QMatrix M = rng.matrix(5, 2);
  EXPECT_EQ(row_selector(2, 5, 0) * M, select_rows(M, 0, 2));
  EXPECT_EQ(row_selector(3, 5, 2) * M, select_rows(M, 2, 3));
  const QMatrix N = rng.matrix(2, 5);
  EXPECT_EQ(N * col_selector(3, 5, 2), select_cols(N, 2, 3));
}

TEST(QMatrix, ScalarMultiplesRespectSide) {
  const QMatrix A{{I}};
  EXPECT_EQ(scalar_mul(J, A), (QMatrix{{-K}}));
  EXPECT_EQ(scalar_mul(A, J), (QMatrix{{K}}));
  EXPECT_EQ(scalar_mul(2.0, A), (QMatrix{{2 * I}}));
}
