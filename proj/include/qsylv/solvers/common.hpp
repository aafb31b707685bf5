#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qsylv/decomp.hpp"
#include "qsylv/qmatrix.hpp"
#include "qsylv/random.hpp"

namespace qsylv {

/// Which of the two interchangeable Y3 displays the five-term solver assembles.
enum class Y3Branch { first, second };

struct SolverOptions {
  double tol = 1e-9;        // residual tests pass when ||r|| <= tol * (1 + ||source||)
  double rank_rel = 1e-10;  // singular values below rank_rel * (natural scale) count as zero
  Y3Branch branch = Y3Branch::first;
  /// Natural magnitude of coefficient blocks; computed from the instance when absent.
  std::optional<double> scale;
};

/// Tolerance policy shared by one solver call. Pseudo-inverses truncate at
/// max(default threshold, rank_rel * max(||A||, natural)) so that intermediates which are zero in
/// exact arithmetic but carry rounding noise are recognised as zero.
class Numerics {
 public:
  Numerics(const SolverOptions& opt, double scale) : opt_(opt), scale_(scale) {}

  double scale() const { return scale_; }
  const SolverOptions& options() const { return opt_; }

  PinvBundle pinv(const QMatrix& A, double natural) const {
    return qsylv::pinv(A, std::nullopt, opt_.rank_rel * std::max(frobenius_norm(A), natural));
  }
  /// Pseudo-inverse of a matrix built from coefficient blocks.
  PinvBundle pinv_coef(const QMatrix& A) const { return pinv(A, scale_); }
  /// Pseudo-inverse of a matrix built from projectors (entries of order one).
  PinvBundle pinv_proj(const QMatrix& A) const { return pinv(A, 1.0); }

  std::size_t rank(const QMatrix& A) const {
    return qsylv::rank(A, std::nullopt, opt_.rank_rel * frobenius_norm(A));
  }

  double threshold(double source_norm) const { return opt_.tol * (1.0 + source_norm); }

 private:
  SolverOptions opt_;
  double scale_;
};

inline double max_norm(std::initializer_list<const QMatrix*> blocks) {
  double s = 0.0;
  for (const QMatrix* b : blocks) s = std::max(s, frobenius_norm(*b));
  return s;
}

struct ResidualCondition {
  std::string name;
  double residual = 0.0;
  double threshold = 0.0;
  bool pass = true;
};

struct RankCondition {
  std::string name;
  std::size_t lhs = 0;
  std::size_t rhs = 0;
  bool pass = true;
};

struct SolvabilityReport {
  std::vector<ResidualCondition> mp_conditions;
  std::vector<RankCondition> rank_conditions;
  std::vector<ResidualCondition> compat_conditions;
  bool consistent = true;
  bool forms_agree = true;

  void add_mp(const Numerics& nx, std::string name, const QMatrix& residual, double source_norm) {
    mp_conditions.push_back(make(nx, std::move(name), residual, source_norm));
  }
  void add_compat(const Numerics& nx, std::string name, const QMatrix& residual, double source_norm) {
    compat_conditions.push_back(make(nx, std::move(name), residual, source_norm));
  }
  void add_rank(std::string name, std::size_t lhs, std::size_t rhs) {
    rank_conditions.push_back({std::move(name), lhs, rhs, lhs == rhs});
  }

  bool compat_pass() const {
    return std::all_of(compat_conditions.begin(), compat_conditions.end(), [](const auto& c) { return c.pass; });
  }
  bool mp_verdict() const {
    return compat_pass() &&
           std::all_of(mp_conditions.begin(), mp_conditions.end(), [](const auto& c) { return c.pass; });
  }
  bool rank_verdict() const {
    return compat_pass() &&
           std::all_of(rank_conditions.begin(), rank_conditions.end(), [](const auto& c) { return c.pass; });
  }
  void finalize() {
    consistent = mp_verdict() && rank_verdict();
    forms_agree = mp_verdict() == rank_verdict();
  }

  std::vector<std::string> failing() const {
    std::vector<std::string> out;
    for (const auto& c : compat_conditions)
      if (!c.pass) out.push_back(c.name);
    for (const auto& c : mp_conditions)
      if (!c.pass) out.push_back(c.name);
    for (const auto& c : rank_conditions)
      if (!c.pass) out.push_back(c.name);
    return out;
  }

 private:
  static ResidualCondition make(const Numerics& nx, std::string name, const QMatrix& residual, double source_norm) {
    ResidualCondition c{std::move(name), frobenius_norm(residual), nx.threshold(source_norm), true};
    c.pass = c.residual <= c.threshold;
    return c;
  }
};

struct ParamSpec {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;
};

/// A particular solution plus the map from free parameters to the general solution.
class SolutionFamily {
 public:
  using Assembler = std::function<std::vector<QMatrix>(const std::vector<QMatrix>&)>;

  SolutionFamily() = default;
  SolutionFamily(std::vector<std::string> unknowns, std::vector<ParamSpec> params, Assembler fn)
      : unknowns_(std::move(unknowns)), params_(std::move(params)), fn_(std::move(fn)) {
    particular_ = assemble(zero_params());
  }

  const std::vector<std::string>& unknowns() const { return unknowns_; }
  const std::vector<ParamSpec>& params() const { return params_; }
  const std::vector<QMatrix>& particular() const { return particular_; }

  std::vector<QMatrix> zero_params() const {
    std::vector<QMatrix> p;
    p.reserve(params_.size());
    for (const auto& s : params_) p.emplace_back(s.rows, s.cols);
    return p;
  }
  std::vector<QMatrix> random_params(Rng& rng) const {
    std::vector<QMatrix> p;
    p.reserve(params_.size());
    for (const auto& s : params_) p.push_back(rng.matrix(s.rows, s.cols));
    return p;
  }

  std::vector<QMatrix> assemble(const std::vector<QMatrix>& p) const {
    if (p.size() != params_.size())
      throw DimensionError("assemble: expected " + std::to_string(params_.size()) + " parameters, got " +
                           std::to_string(p.size()));
    for (std::size_t i = 0; i < p.size(); ++i)
      if (p[i].rows() != params_[i].rows || p[i].cols() != params_[i].cols)
        throw DimensionError("assemble: parameter " + params_[i].name + " must be " +
                             std::to_string(params_[i].rows) + "x" + std::to_string(params_[i].cols) + ", got " +
                             p[i].shape_string());
    return fn_(p);
  }

  /// Named view of an assembled tuple.
  std::map<std::string, QMatrix> named(const std::vector<QMatrix>& tuple) const {
    std::map<std::string, QMatrix> out;
    for (std::size_t i = 0; i < unknowns_.size() && i < tuple.size(); ++i) out[unknowns_[i]] = tuple[i];
    return out;
  }

 private:
  std::vector<std::string> unknowns_;
  std::vector<ParamSpec> params_;
  Assembler fn_;
  std::vector<QMatrix> particular_;
};

/// Report plus a family when the instance is consistent.
struct SolveResult {
  SolvabilityReport report;
  std::optional<SolutionFamily> family;
  bool consistent() const { return family.has_value(); }
};

// ---------------------------------------------------------------------------------------------
// Equations as data, used for residual checks of any solver output.

struct Term {
  std::optional<QMatrix> left;   // absent means identity
  std::string unknown;
  std::optional<QMatrix> right;  // absent means identity
  std::optional<Eta> eta_star;   // use unknown^{eta*} instead of unknown
};

struct LinearEquation {
  std::string name;
  std::vector<Term> terms;
  QMatrix rhs;
};

struct EquationResidual {
  std::string name;
  double absolute = 0.0;
  double relative = 0.0;
  bool pass = true;
};

struct ResidualReport {
  std::vector<EquationResidual> equations;
  bool pass = true;
  double max_relative() const {
    double m = 0.0;
    for (const auto& e : equations) m = std::max(m, e.relative);
    return m;
  }
};

using NamedSolution = std::map<std::string, QMatrix>;

/// Relative residual is ||lhs - rhs|| / (1 + ||rhs|| + sum of ||term||).
inline EquationResidual evaluate(const LinearEquation& eq, const NamedSolution& sol, double tol) {
  QMatrix acc(eq.rhs.rows(), eq.rhs.cols());
  double mass = frobenius_norm(eq.rhs);
  for (const Term& t : eq.terms) {
    auto it = sol.find(t.unknown);
    if (it == sol.end()) throw DimensionError("equation " + eq.name + ": missing unknown " + t.unknown);
    QMatrix v = t.eta_star ? eta_conj_transpose(it->second, *t.eta_star) : it->second;
    if (t.left) v = *t.left * v;
    if (t.right) v = v * *t.right;
    if (!v.same_shape(acc))
      throw DimensionError("equation " + eq.name + ": term in " + t.unknown + " has shape " + v.shape_string() +
                           ", expected " + acc.shape_string());
    mass += frobenius_norm(v);
    acc += v;
  }
  acc -= eq.rhs;
  EquationResidual r{eq.name, frobenius_norm(acc), 0.0, true};
  r.relative = r.absolute / (1.0 + mass);
  r.pass = r.relative <= tol;
  return r;
}

inline ResidualReport evaluate(const std::vector<LinearEquation>& eqs, const NamedSolution& sol, double tol) {
  ResidualReport rep;
  for (const auto& eq : eqs) {
    rep.equations.push_back(evaluate(eq, sol, tol));
    rep.pass = rep.pass && rep.equations.back().pass;
  }
  return rep;
}

/// Adds the eta-Hermicity defect ||M - M^{eta*}|| / (1 + ||M||) of each listed unknown.
inline void add_eta_hermicity(ResidualReport& rep, const NamedSolution& sol, const std::vector<std::string>& names,
                              Eta eta, double tol) {
  for (const auto& n : names) {
    const QMatrix& m = sol.at(n);
    EquationResidual r{n + " eta-Hermitian", frobenius_norm(m - eta_conj_transpose(m, eta)), 0.0, true};
    r.relative = r.absolute / (1.0 + frobenius_norm(m));
    r.pass = r.relative <= tol;
    rep.equations.push_back(r);
    rep.pass = rep.pass && r.pass;
  }
}

inline Term term(const QMatrix& left, std::string unknown, const QMatrix& right) {
  return {left, std::move(unknown), right, std::nullopt};
}
inline Term left_term(const QMatrix& left, std::string unknown) {
  return {left, std::move(unknown), std::nullopt, std::nullopt};
}
inline Term right_term(std::string unknown, const QMatrix& right) {
  return {std::nullopt, std::move(unknown), right, std::nullopt};
}

}  // namespace qsylv
