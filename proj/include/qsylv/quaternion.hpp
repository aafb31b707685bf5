#pragma once

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qsylv {

/// Real quaternion w + x i + y j + z k in double precision.
struct Quaternion {
  double w = 0.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Quaternion() = default;
  constexpr Quaternion(double w_, double x_ = 0.0, double y_ = 0.0, double z_ = 0.0)
      : w(w_), x(x_), y(y_), z(z_) {}

  static constexpr Quaternion i() { return {0.0, 1.0, 0.0, 0.0}; }
  static constexpr Quaternion j() { return {0.0, 0.0, 1.0, 0.0}; }
  static constexpr Quaternion k() { return {0.0, 0.0, 0.0, 1.0}; }

  constexpr Quaternion& operator+=(const Quaternion& o) {
    w += o.w; x += o.x; y += o.y; z += o.z;
    return *this;
  }
  constexpr Quaternion& operator-=(const Quaternion& o) {
    w -= o.w; x -= o.x; y -= o.y; z -= o.z;
    return *this;
  }
  constexpr Quaternion& operator*=(double s) {
    w *= s; x *= s; y *= s; z *= s;
    return *this;
  }

  friend constexpr bool operator==(const Quaternion&, const Quaternion&) = default;
};

constexpr Quaternion operator+(Quaternion a, const Quaternion& b) { return a += b; }
constexpr Quaternion operator-(Quaternion a, const Quaternion& b) { return a -= b; }
constexpr Quaternion operator-(const Quaternion& a) { return {-a.w, -a.x, -a.y, -a.z}; }
constexpr Quaternion operator*(Quaternion a, double s) { return a *= s; }
constexpr Quaternion operator*(double s, Quaternion a) { return a *= s; }

/// Hamilton product.
constexpr Quaternion operator*(const Quaternion& a, const Quaternion& b) {
  return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
          a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
          a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

constexpr Quaternion quat_mul(const Quaternion& a, const Quaternion& b) { return a * b; }

constexpr Quaternion conj(const Quaternion& q) { return {q.w, -q.x, -q.y, -q.z}; }

constexpr double norm2(const Quaternion& q) {
  return q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z;
}

inline double abs(const Quaternion& q) { return std::sqrt(norm2(q)); }

/// Multiplicative inverse; throws on zero.
inline Quaternion inverse(const Quaternion& q) {
  const double n = norm2(q);
  if (n == 0.0) throw std::domain_error("inverse of zero quaternion");
  return conj(q) * (1.0 / n);
}

/// The imaginary unit used by eta-conjugation and eta-Hermitian structure.
enum class Eta { i, j, k };

inline constexpr Quaternion unit(Eta eta) {
  switch (eta) {
    case Eta::i: return Quaternion::i();
    case Eta::j: return Quaternion::j();
    case Eta::k: return Quaternion::k();
  }
  return Quaternion::i();
}

/// -eta * conj(q) * eta, which negates the single imaginary component along eta.
constexpr Quaternion quat_eta_conj(const Quaternion& q, Eta eta) {
  switch (eta) {
    case Eta::i: return {q.w, -q.x, q.y, q.z};
    case Eta::j: return {q.w, q.x, -q.y, q.z};
    case Eta::k: return {q.w, q.x, q.y, -q.z};
  }
  return q;
}

inline Eta parse_eta(std::string_view s) {
  if (s == "i") return Eta::i;
  if (s == "j") return Eta::j;
  if (s == "k") return Eta::k;
  throw std::invalid_argument("eta must be one of i, j, k (got '" + std::string(s) + "')");
}

inline const char* to_string(Eta eta) {
  switch (eta) {
    case Eta::i: return "i";
    case Eta::j: return "j";
    case Eta::k: return "k";
  }
  return "?";
}

inline std::ostream& operator<<(std::ostream& os, const Quaternion& q) {
  return os << '(' << q.w << ", " << q.x << ", " << q.y << ", " << q.z << ')';
}

}  // namespace qsylv
