#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qsylv/eta.hpp"
#include "qsylv/solvers.hpp"

namespace qsylv {

enum class Variant {
  left,
  right,
  pair,
  two_term,
  five_term,
  master,
  three_term,
  mixed,
  eta_full,
  eta_three,
  eta_two,
  eta_mixed,
};

inline const std::vector<Variant>& all_variants() {
  static const std::vector<Variant> v{Variant::left,     Variant::right,      Variant::pair,     Variant::two_term,
                                      Variant::five_term, Variant::master,    Variant::three_term, Variant::mixed,
                                      Variant::eta_full, Variant::eta_three,  Variant::eta_two,  Variant::eta_mixed};
  return v;
}

inline const char* to_string(Variant v) {
  switch (v) {
    case Variant::left: return "left";
    case Variant::right: return "right";
    case Variant::pair: return "pair";
    case Variant::two_term: return "two-term";
    case Variant::five_term: return "five-term";
    case Variant::master: return "master";
    case Variant::three_term: return "three-term";
    case Variant::mixed: return "mixed";
    case Variant::eta_full: return "eta-full";
    case Variant::eta_three: return "eta-three";
    case Variant::eta_two: return "eta-two";
    case Variant::eta_mixed: return "eta-mixed";
  }
  return "?";
}

inline Variant parse_variant(std::string_view s) {
  for (Variant v : all_variants())
    if (s == to_string(v)) return v;
  std::string names;
  for (Variant v : all_variants()) names += std::string(names.empty() ? "" : ", ") + to_string(v);
  throw std::invalid_argument("unknown variant '" + std::string(s) + "' (expected one of " + names + ")");
}

inline bool is_eta_variant(Variant v) {
  return v == Variant::eta_full || v == Variant::eta_three || v == Variant::eta_two || v == Variant::eta_mixed;
}

// ---------------------------------------------------------------------------------------------
// Instances as named blocks. Absent optional blocks are empty.

struct Instance {
  Variant variant = Variant::master;
  Eta eta = Eta::i;
  std::map<std::string, QMatrix> blocks;

  QMatrix get(const std::string& name) const {
    auto it = blocks.find(name);
    return it == blocks.end() ? QMatrix() : it->second;
  }
};

namespace detail {

inline std::vector<std::string> indexed(std::initializer_list<const char*> letters, int n) {
  std::vector<std::string> out;
  for (const char* l : letters)
    for (int i = 1; i <= n; ++i) out.push_back(l + std::to_string(i));
  return out;
}

}  // namespace detail

/// Block names a variant accepts, and those it requires.
inline std::vector<std::string> allowed_blocks(Variant v) {
  using detail::indexed;
  std::vector<std::string> out;
  switch (v) {
    case Variant::left: return {"A", "C"};
    case Variant::right: return {"B", "D"};
    case Variant::pair: return {"A", "C", "B", "D"};
    case Variant::two_term: return {"C3", "D3", "C4", "D4", "E1"};
    case Variant::five_term: out = indexed({"A", "B"}, 4); out.push_back("B"); return out;
    case Variant::master: out = indexed({"A", "B", "C", "D", "E", "F"}, 4); break;
    case Variant::three_term: out = indexed({"A", "B", "C", "D", "E", "F"}, 3); break;
    case Variant::mixed: out = indexed({"A", "B", "C"}, 4); break;
    case Variant::eta_full: out = indexed({"A", "C", "E"}, 4); break;
    case Variant::eta_three: out = indexed({"A", "C", "E"}, 3); break;
    case Variant::eta_two: return {"B1", "C1", "D1"};
    case Variant::eta_mixed: return {"A1", "C1", "B1", "D1", "A2", "A3", "D3"};
  }
  out.push_back("Cc");
  return out;
}

inline std::vector<std::string> required_blocks(Variant v) {
  switch (v) {
    case Variant::left:
    case Variant::right:
    case Variant::pair:
    case Variant::two_term:
    case Variant::five_term:
    case Variant::eta_two: return allowed_blocks(v);
    case Variant::mixed: return {"A3", "B3", "A4", "B4", "Cc"};
    case Variant::eta_mixed: return {"A2", "A3", "D3"};
    default: return {"Cc"};
  }
}

/// Rejects unknown and missing block names.
inline void check_block_names(const Instance& inst) {
  const auto allowed = allowed_blocks(inst.variant);
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [name, m] : inst.blocks)
    if (!ok.count(name))
      throw DimensionError("block '" + name + "' is not part of the " + to_string(inst.variant) + " system");
  for (const auto& name : required_blocks(inst.variant))
    if (!inst.blocks.count(name))
      throw DimensionError("block '" + name + "' is required by the " + to_string(inst.variant) + " system");
}

inline MasterInstance to_master(const Instance& in) {
  MasterInstance m;
  for (int i = 0; i < 4; ++i) {
    const std::string k = std::to_string(i + 1);
    m.A[i] = in.get("A" + k);
    m.B[i] = in.get("B" + k);
    m.C[i] = in.get("C" + k);
    m.D[i] = in.get("D" + k);
    m.E[i] = in.get("E" + k);
    m.F[i] = in.get("F" + k);
  }
  m.Cc = in.get("Cc");
  return m;
}

inline ThreeTermInstance to_three_term(const Instance& in) {
  ThreeTermInstance t;
  for (int i = 0; i < 3; ++i) {
    const std::string k = std::to_string(i + 1);
    t.A[i] = in.get("A" + k);
    t.B[i] = in.get("B" + k);
    t.C[i] = in.get("C" + k);
    t.D[i] = in.get("D" + k);
    t.E[i] = in.get("E" + k);
    t.F[i] = in.get("F" + k);
  }
  t.Cc = in.get("Cc");
  return t;
}

inline MixedInstance to_mixed(const Instance& in) {
  return {in.get("A1"), in.get("B1"), in.get("A2"), in.get("B2"), in.get("A3"), in.get("B3"), in.get("A4"),
          in.get("B4"), in.get("C1"), in.get("C2"), in.get("C3"), in.get("C4"), in.get("Cc")};
}

inline FiveTermInstance to_five_term(const Instance& in) {
  FiveTermInstance f{in.get("A1"), in.get("B1"), in.get("A2"), in.get("B2"), in.get("A3"),
                     in.get("B3"), in.get("A4"), in.get("B4"), in.get("B")};
  f.validate();
  return f;
}

inline EtaSystem to_eta_system(const Instance& in) {
  EtaSystem s;
  s.eta = in.eta;
  const int n = in.variant == Variant::eta_three ? 3 : 4;
  for (int i = 0; i < n; ++i) {
    const std::string k = std::to_string(i + 1);
    s.A[i] = in.get("A" + k);
    s.C[i] = in.get("C" + k);
    s.E[i] = in.get("E" + k);
  }
  s.Cc = in.get("Cc");
  return s;
}

inline EtaMixedInstance to_eta_mixed(const Instance& in) {
  return {in.eta,        in.get("A1"), in.get("C1"), in.get("B1"),
          in.get("D1"),  in.get("A2"), in.get("A3"), in.get("D3")};
}

inline std::vector<LinearEquation> equations(const Instance& in) {
  switch (in.variant) {
    case Variant::left: return {{"A X = C", {left_term(in.get("A"), "X")}, in.get("C")}};
    case Variant::right: return {{"X B = D", {right_term("X", in.get("B"))}, in.get("D")}};
    case Variant::pair:
      return {{"A X = C", {left_term(in.get("A"), "X")}, in.get("C")},
              {"X B = D", {right_term("X", in.get("B"))}, in.get("D")}};
    case Variant::two_term:
      return two_term_equations(in.get("C3"), in.get("D3"), in.get("C4"), in.get("D4"), in.get("E1"));
    case Variant::five_term: return five_term_equations(to_five_term(in));
    case Variant::master: return master_equations(to_master(in).normalized());
    case Variant::three_term: return three_term_equations(to_three_term(in));
    case Variant::mixed: return mixed_equations(to_mixed(in));
    case Variant::eta_full: return eta_full_equations(to_eta_system(in));
    case Variant::eta_three: return eta_three_equations(to_eta_system(in));
    case Variant::eta_two: return eta_two_equations(in.get("B1"), in.get("C1"), in.get("D1"), in.eta);
    case Variant::eta_mixed: return eta_mixed_equations(to_eta_mixed(in));
  }
  return {};
}

/// Unknowns that must come out eta-Hermitian.
inline std::vector<std::string> eta_hermitian_unknowns(Variant v) {
  switch (v) {
    case Variant::eta_full:
    case Variant::eta_three: return {"X", "Y", "Z"};
    case Variant::eta_two: return {"Y", "Z"};
    case Variant::eta_mixed: return {"X", "Y"};
    default: return {};
  }
}

inline SolveResult solve(const Instance& in, const SolverOptions& opt = {}) {
  check_block_names(in);
  switch (in.variant) {
    case Variant::left: return solve_left(in.get("A"), in.get("C"), opt);
    case Variant::right: return solve_right(in.get("B"), in.get("D"), opt);
    case Variant::pair: return solve_pair(in.get("A"), in.get("C"), in.get("B"), in.get("D"), opt);
    case Variant::two_term:
      return solve_two_term(in.get("C3"), in.get("D3"), in.get("C4"), in.get("D4"), in.get("E1"), opt);
    case Variant::five_term: return solve_five_term(to_five_term(in), opt);
    case Variant::master: return solve_master(to_master(in), opt);
    case Variant::three_term: return solve_three_term_system(to_three_term(in), opt);
    case Variant::mixed: return solve_mixed_system(to_mixed(in), opt);
    case Variant::eta_full: return solve_eta_full(to_eta_system(in), opt);
    case Variant::eta_three: return solve_eta_three(to_eta_system(in), opt);
    case Variant::eta_two: return solve_eta_two(in.get("B1"), in.get("C1"), in.get("D1"), in.eta, opt);
    case Variant::eta_mixed: return solve_eta_mixed(to_eta_mixed(in), opt);
  }
  throw std::logic_error("unreachable variant");
}

inline ResidualReport verify_solution(const Instance& in, const NamedSolution& sol, double tol) {
  check_block_names(in);
  ResidualReport rep = evaluate(equations(in), sol, tol);
  const auto herm = eta_hermitian_unknowns(in.variant);
  if (!herm.empty()) add_eta_hermicity(rep, sol, herm, in.eta, tol);
  return rep;
}

inline ResidualReport verify_solution(const MasterInstance& inst, const NamedSolution& sol, double tol) {
  return evaluate(master_equations(inst.normalized()), sol, tol);
}

// ---------------------------------------------------------------------------------------------
// Witness-first generation.

inline constexpr std::size_t kMaxProfileDim = 16;

/// Shapes for a planted instance; which fields are read depends on the variant.
///   m x n     main right-hand side (square for the eta systems, which read m only)
///   p[i], q[i] unknown i is p[i] x q[i]; in the master system U is p[0] x n and V is m x q[0],
///             in the five-term system X1 is p[0] x n and X2 is m x q[0]; eta unknowns are p[i] x p[i]
///   a[i]      rows of the left side constraint A_i on unknown i (0 drops it)
///   b[i]      columns of the right side constraint B_i on unknown i (0 drops it)
struct DimensionProfile {
  std::size_t m = 2, n = 2;
  std::array<std::size_t, 4> p{2, 2, 2, 2}, q{2, 2, 2, 2}, a{2, 2, 2, 2}, b{2, 2, 2, 2};
  std::uint64_t seed = 0;
  bool deficient = false;  // coefficient blocks get a random rank deficiency
  Eta eta = Eta::i;

  static DimensionProfile uniform(std::size_t d, std::uint64_t seed) {
    DimensionProfile pr;
    pr.m = pr.n = d;
    pr.p.fill(d);
    pr.q.fill(d);
    pr.a.fill(d);
    pr.b.fill(d);
    pr.seed = seed;
    return pr;
  }

  /// Every count drawn from [lo, hi] with a generator derived from `seed`.
  static DimensionProfile random(std::uint64_t seed, std::size_t lo, std::size_t hi) {
    Rng g(seed ^ 0x5DEECE66DULL);
    auto d = [&] { return static_cast<std::size_t>(g.uniform_int(static_cast<int>(lo), static_cast<int>(hi))); };
    DimensionProfile pr;
    pr.m = d();
    pr.n = d();
    for (auto* arr : {&pr.p, &pr.q, &pr.a, &pr.b})
      for (auto& x : *arr) x = d();
    pr.seed = seed;
    pr.deficient = g.uniform_int(0, 1) == 1;
    return pr;
  }

  /// Thin unknowns against a 5..7 wide right-hand side, so every variant passes the gen_inconsistent guard.
  static DimensionProfile narrow(std::uint64_t seed) {
    Rng g(seed ^ 0x2545F4914F6CDD1DULL);
    auto d = [&](int lo, int hi) { return static_cast<std::size_t>(g.uniform_int(lo, hi)); };
    DimensionProfile pr;
    pr.m = d(5, 7);
    pr.n = d(5, 7);
    for (int i = 0; i < 4; ++i) {
      pr.p[i] = i == 0 ? 1 : d(1, 2);
      pr.q[i] = i == 0 ? 1 : d(1, 2);
      pr.a[i] = d(2, 3);
      pr.b[i] = d(2, 3);
    }
    pr.seed = seed;
    pr.deficient = g.uniform_int(0, 1) == 1;
    return pr;
  }

  void validate() const {
    auto ok =[](std::size_t x) { return x <= kMaxProfileDim; };
    bool good = ok(m) && ok(n);
    for (const auto* arr : {&p, &q, &a, &b})
      for (std::size_t x : *arr) good = good && ok(x);
    if (!good) throw DimensionError("dimension profile: counts must not exceed " + std::to_string(kMaxProfileDim));
  }
};

struct Planted {
  Instance instance;
  NamedSolution witness;
};

namespace detail {

/// Real dimension of the eta-Hermitian p x p quaternion matrices.
inline std::size_t eta_hermitian_dim(std::size_t p) { return 2 * p * p + p; }

/// Real dimension of the set of right-hand sides versus the number of real unknowns. When the unknowns
/// are fewer, the left side cannot be onto and a random perturbation breaks consistency almost surely.
inline std::pair<std::size_t, std::size_t> dimension_count(Variant v, const DimensionProfile& d) {
  const auto& p = d.p;
  const auto& q = d.q;
  const auto h = eta_hermitian_dim;
  switch (v) {
    case Variant::left: return {4 * d.a[0] * q[0], 4 * p[0] * q[0]};
    case Variant::right: return {4 * p[0] * d.b[0], 4 * p[0] * q[0]};
    case Variant::pair: return {4 * d.a[0] * q[0], 4 * p[0] * q[0]};  // only C is perturbed
    case Variant::two_term: return {4 * d.m * d.n, 4 * (p[0] * q[0] + p[1] * q[1])};
    case Variant::five_term:
      return {4 * d.m * d.n, 4 * (p[0] * d.n + d.m * q[0] + p[1] * q[1] + p[2] * q[2] + p[3] * q[3])};
    case Variant::master:
      return {4 * d.m * d.n, 4 * (p[0] * d.n + d.m * q[0] + p[1] * q[1] + p[2] * q[2] + p[3] * q[3])};
    case Variant::three_term: return {4 * d.m * d.n, 4 * (p[1] * q[1] + p[2] * q[2] + p[3] * q[3])};
    case Variant::mixed: return {4 * d.m * d.n, 4 * (p[0] * q[0] + p[1] * q[1])};
    case Variant::eta_full: return {h(d.m), 4 * p[0] * d.m + h(p[1]) + h(p[2]) + h(p[3])};
    case Variant::eta_three: return {h(d.m), h(p[1]) + h(p[2]) + h(p[3])};
    case Variant::eta_two:
    case Variant::eta_mixed: return {h(d.m), h(p[0]) + h(p[1])};
  }
  return {0, 0};
}

class BlockDrawer {
 public:
  BlockDrawer(Rng& g, bool deficient) : g_(g), deficient_(deficient) {}

  QMatrix operator()(std::size_t r, std::size_t c) {
    if (!deficient_ || r == 0 || c == 0) return g_.matrix(r, c);
    const int full = static_cast<int>(std::min(r, c));
    return g_.low_rank(r, c, static_cast<std::size_t>(g_.uniform_int(0, full)));
  }

 private:
  Rng& g_;
  bool deficient_;
};

inline QMatrix random_eta_hermitian(Rng& g, std::size_t p, Eta eta) { return symmetrize(g.matrix(p, p), eta); }

}  // namespace detail

/// Draws the witness first, then every right-hand side from it.
inline Planted gen_consistent(Variant v, const DimensionProfile& d) {
  d.validate();
  Rng g(d.seed);
  detail::BlockDrawer coef(g, d.deficient);
  const auto& p = d.p;
  const auto& q = d.q;
  Planted out;
  Instance& in = out.instance;
  in.variant = v;
  in.eta = d.eta;
  auto& B = in.blocks;
  auto& W = out.witness;
  auto es = [&](const QMatrix& x) { return eta_conj_transpose(x, d.eta); };
  auto herm = [&](std::size_t k) { return detail::random_eta_hermitian(g, k, d.eta); };
  auto k_ = [](int i) { return std::to_string(i + 1); };

  switch (v) {
    case Variant::left:
    case Variant::right:
    case Variant::pair: {
      const QMatrix X = g.matrix(p[0], q[0]);
      W["X"] = X;
      if (v != Variant::right) {
        B["A"] = coef(d.a[0], p[0]);
        B["C"] = B["A"] * X;
      }
      if (v != Variant::left) {
        B["B"] = coef(q[0], d.b[0]);
        B["D"] = X * B["B"];
      }
      break;
    }
    case Variant::two_term: {
      const QMatrix X3 = g.matrix(p[0], q[0]), X4 = g.matrix(p[1], q[1]);
      W["X3"] = X3;
      W["X4"] = X4;
      B["C3"] = coef(d.m, p[0]);
      B["D3"] = coef(q[0], d.n);
      B["C4"] = coef(d.m, p[1]);
      B["D4"] = coef(q[1], d.n);
      B["E1"] = B["C3"] * X3 * B["D3"] + B["C4"] * X4 * B["D4"];
      break;
    }
    case Variant::five_term: {
      W["X1"] = g.matrix(p[0], d.n);
      W["X2"] = g.matrix(d.m, q[0]);
      B["A1"] = coef(d.m, p[0]);
      B["B1"] = coef(q[0], d.n);
      QMatrix rhs = B["A1"] * W["X1"] + W["X2"] * B["B1"];
      for (int i = 1; i < 4; ++i) {
        const std::string y = "Y" + std::to_string(i);
        W[y] = g.matrix(p[i], q[i]);
        B["A" + k_(i)] = coef(d.m, p[i]);
        B["B" + k_(i)] = coef(q[i], d.n);
        rhs += B["A" + k_(i)] * W[y] * B["B" + k_(i)];
      }
      B["B"] = rhs;
      break;
    }
    case Variant::master:
    case Variant::three_term: {
      const bool master = v == Variant::master;
      QMatrix rhs(d.m, d.n);
      if (master) {
        const QMatrix U = g.matrix(p[0], d.n), V = g.matrix(d.m, q[0]);
        W["U"] = U;
        W["V"] = V;
        B["A1"] = coef(d.a[0], p[0]);
        B["C1"] = B["A1"] * U;
        B["B1"] = coef(q[0], d.b[0]);
        B["D1"] = V * B["B1"];
        B["E1"] = coef(d.m, p[0]);
        B["F1"] = coef(q[0], d.n);
        rhs += B["E1"] * U + V * B["F1"];
      }
      static const char* names[] = {"", "X", "Y", "Z"};
      for (int i = 1; i < 4; ++i) {
        const QMatrix X = g.matrix(p[i], q[i]);
        W[names[i]] = X;
        const std::string k = master ? k_(i) : std::to_string(i);
        B["A" + k] = coef(d.a[i], p[i]);
        B["C" + k] = B["A" + k] * X;
        B["B" + k] = coef(q[i], d.b[i]);
        B["D" + k] = X * B["B" + k];
        B["E" + k] = coef(d.m, p[i]);
        B["F" + k] = coef(q[i], d.n);
        rhs += B["E" + k] * X * B["F" + k];
      }
      B["Cc"] = rhs;
      break;
    }
    case Variant::mixed: {
      const QMatrix X = g.matrix(p[0], q[0]), Y = g.matrix(p[1], q[1]);
      W["X"] = X;
      W["Y"] = Y;
      B["A1"] = coef(d.a[0], p[0]);
      B["B1"] = coef(q[0], d.b[0]);
      B["A2"] = coef(d.a[1], p[1]);
      B["B2"] = coef(q[1], d.b[1]);
      B["A3"] = coef(d.m, p[0]);
      B["B3"] = coef(q[0], d.n);
      B["A4"] = coef(d.m, p[1]);
      B["B4"] = coef(q[1], d.n);
      B["C1"] = B["A1"] * X;
      B["C2"] = X * B["B1"];
      B["C3"] = B["A2"] * Y;
      B["C4"] = Y * B["B2"];
      B["Cc"] = B["A3"] * X * B["B3"] + B["A4"] * Y * B["B4"];
      break;
    }
    case Variant::eta_full:
    case Variant::eta_three: {
      const bool full = v == Variant::eta_full;
      QMatrix rhs(d.m, d.m);
      if (full) {
        const QMatrix U = g.matrix(p[0], d.m);
        W["U"] = U;
        B["A1"] = coef(d.a[0], p[0]);
        B["C1"] = B["A1"] * U;
        B["E1"] = coef(d.m, p[0]);
        const QMatrix EU = B["E1"] * U;
        rhs += EU + es(EU);
      }
      static const char* names[] = {"", "X", "Y", "Z"};
      for (int i = 1; i < 4; ++i) {
        const QMatrix X = herm(p[i]);
        W[names[i]] = X;
        const std::string k = full ? k_(i) : std::to_string(i);
        B["A" + k] = coef(d.a[i], p[i]);
        B["C" + k] = B["A" + k] * X;
        B["E" + k] = coef(d.m, p[i]);
        rhs += B["E" + k] * X * es(B["E" + k]);
      }
      B["Cc"] = rhs;
      break;
    }
    case Variant::eta_two: {
      const QMatrix Y = herm(p[0]), Z = herm(p[1]);
      W["Y"] = Y;
      W["Z"] = Z;
      B["B1"] = coef(d.m, p[0]);
      B["C1"] = coef(d.m, p[1]);
      B["D1"] = B["B1"] * Y * es(B["B1"]) + B["C1"] * Z * es(B["C1"]);
      break;
    }
    case Variant::eta_mixed: {
      const QMatrix X = herm(p[0]), Y = herm(p[1]);
      W["X"] = X;
      W["Y"] = Y;
      B["A1"] = coef(d.a[0], p[0]);
      B["C1"] = B["A1"] * X;
      B["B1"] = coef(p[1], d.b[1]);
      B["D1"] = Y * B["B1"];
      B["A2"] = coef(d.m, p[0]);
      B["A3"] = coef(d.m, p[1]);
      B["D3"] = B["A2"] * X * es(B["A2"]) + B["A3"] * Y * es(B["A3"]);
      break;
    }
  }
  return out;
}

inline Planted gen_consistent(const DimensionProfile& d) { return gen_consistent(Variant::master, d); }

/// Name of the block that carries the main right-hand side of a variant.
inline std::string main_rhs(Variant v) {
  switch (v) {
    case Variant::left: return "C";
    case Variant::right: return "D";
    case Variant::pair: return "C";
    case Variant::two_term: return "E1";
    case Variant::five_term: return "B";
    case Variant::eta_two: return "D1";
    case Variant::eta_mixed: return "D3";
    default: return "Cc";
  }
}

/// Planted instance with the main right-hand side moved by a random matrix of the same Frobenius norm
/// (eta-Hermitian for the eta systems), re-drawn until the residual conditions fail.
inline Instance gen_inconsistent(Variant v, const DimensionProfile& d) {
  const auto [rhs_dim, unknown_dim] = detail::dimension_count(v, d);
  if (unknown_dim >= rhs_dim)
    throw DimensionError(std::string("gen_inconsistent: the ") + to_string(v) +
                         " profile has at least as many unknowns as right-hand-side entries; it may span everything");
  Instance in = gen_consistent(v, d).instance;
  Rng g(d.seed ^ 0xA5A5A5A5DEADBEEFULL);
  const std::string key = main_rhs(v);
  const QMatrix base = in.blocks.at(key);
  const double scale = std::max(frobenius_norm(base), 1.0);
  for (int attempt = 0; attempt < 8; ++attempt) {
    QMatrix P = g.matrix(base.rows(), base.cols());
    if (is_eta_variant(v)) P = symmetrize(P, d.eta);
    const double pn = frobenius_norm(P);
    if (pn == 0.0) continue;
    P *= scale / pn;
    in.blocks[key] = base + P;
    if (!solve(in).report.mp_verdict()) return in;
  }
  throw std::runtime_error(std::string("gen_inconsistent: ") + to_string(v) +
                           " instance stayed consistent after 8 perturbations");
}

inline MasterInstance gen_inconsistent(const DimensionProfile& d) { return to_master(gen_inconsistent(Variant::master, d)); }

}  // namespace qsylv
