#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include "qsylv/harness.hpp"

namespace qsylv::cli {

using json = nlohmann::ordered_json;

/// Malformed document; the message names the offending key.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum ExitCode : int { kOk = 0, kError = 1, kFail = 2 };

// ---------------------------------------------------------------------------------------------
// Documents

inline json matrix_to_json(const QMatrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const Quaternion& q = m(r, c);
      row.push_back(json::array({q.w, q.x, q.y, q.z}));
    }
    rows.push_back(std::move(row));
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"entries", std::move(rows)}};
}

inline std::size_t read_count(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ParseError(where + ": missing '" + key + "'");
  const json& v = j.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
    throw ParseError(where + "." + key + ": expected a non-negative integer");
  return v.get<std::size_t>();
}

inline QMatrix matrix_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": expected an object with rows, cols, entries");
  const std::size_t rows = read_count(j, "rows", where), cols = read_count(j, "cols", where);
  if (rows > 4096 || cols > 4096) throw ParseError(where + ": matrix too large");
  if (!j.contains("entries")) throw ParseError(where + ": missing 'entries'");
  const json& e = j.at("entries");
  if (!e.is_array() || e.size() != rows)
    throw ParseError(where + ".entries: expected " + std::to_string(rows) + " rows");
  QMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const json& row = e[r];
    const std::string rw = where + ".entries[" + std::to_string(r) + "]";
    if (!row.is_array() || row.size() != cols) throw ParseError(rw + ": expected " + std::to_string(cols) + " entries");
    for (std::size_t c = 0; c < cols; ++c) {
      const json& q = row[c];
      const std::string qw = rw + "[" + std::to_string(c) + "]";
      if (!q.is_array() || q.size() != 4) throw ParseError(qw + ": expected [w, x, y, z]");
      double v[4];
      for (int k = 0; k < 4; ++k) {
        if (!q[k].is_number()) throw ParseError(qw + ": expected numbers");
        v[k] = q[k].get<double>();
      }
      m(r, c) = Quaternion(v[0], v[1], v[2], v[3]);
    }
  }
  return m;
}

inline json instance_to_json(const Instance& in) {
  json blocks = json::object();
  for (const auto& [name, m] : in.blocks) blocks[name] = matrix_to_json(m);
  json doc{{"variant", to_string(in.variant)}};
  if (is_eta_variant(in.variant)) doc["eta"] = to_string(in.eta);
  doc["blocks"] = std::move(blocks);
  return doc;
}

/// Command-line choices override the document's own "variant" and "eta".
inline Instance instance_from_json(const json& doc, std::optional<Variant> variant = std::nullopt,
                                   std::optional<Eta> eta = std::nullopt) {
  if (!doc.is_object()) throw ParseError("instance: expected a JSON object");
  for (const auto& [key, v] : doc.items())
    if (key != "variant" && key != "eta" && key != "blocks" && key != "seed" && key != "profile" && key != "notes")
      throw ParseError("instance: unexpected key '" + key + "'");
  Instance in;
  try {
    if (variant) in.variant = *variant;
    else if (doc.contains("variant")) in.variant = parse_variant(doc.at("variant").get<std::string>());
    if (eta) in.eta = *eta;
    else if (doc.contains("eta")) in.eta = parse_eta(doc.at("eta").get<std::string>());
  } catch (const json::exception& e) {
    throw ParseError(std::string("instance: variant/eta must be strings (") + e.what() + ")");
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("instance: ") + e.what());
  }
  if (!doc.contains("blocks") || !doc.at("blocks").is_object()) throw ParseError("instance: missing object 'blocks'");
  const bool b_alias = in.variant == Variant::eta_full || in.variant == Variant::eta_three;
  for (const auto& [key, v] : doc.at("blocks").items()) {
    std::string name = key;
    // The eta systems sometimes label their side right-hand sides B1..B4.
    if (b_alias && name.size() == 2 && name[0] == 'B') name[0] = 'C';
    if (in.blocks.count(name)) throw ParseError("blocks." + key + ": duplicate of " + name);
    in.blocks[name] = matrix_from_json(v, "blocks." + key);
  }
  try {
    check_block_names(in);
  } catch (const DimensionError& e) {
    throw ParseError(std::string("instance: ") + e.what());
  }
  return in;
}

inline json residuals_to_json(const ResidualReport& rep) {
  json eqs = json::array();
  for (const auto& e : rep.equations)
    eqs.push_back({{"name", e.name}, {"absolute", e.absolute}, {"relative", e.relative}, {"pass", e.pass}});
  return json{{"pass", rep.pass}, {"max_relative", rep.max_relative()}, {"equations", std::move(eqs)}};
}

inline json report_to_json(const SolvabilityReport& rep) {
  auto residuals = [](const std::vector<ResidualCondition>& cs) {
    json a = json::array();
    for (const auto& c : cs)
      a.push_back({{"name", c.name}, {"residual", c.residual}, {"threshold", c.threshold}, {"pass", c.pass}});
    return a;
  };
  json ranks = json::array();
  for (const auto& c : rep.rank_conditions)
    ranks.push_back({{"name", c.name}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"pass", c.pass}});
  return json{{"consistent", rep.consistent},
              {"forms_agree", rep.forms_agree},
              {"mp_verdict", rep.mp_verdict()},
              {"rank_verdict", rep.rank_verdict()},
              {"compat_conditions", residuals(rep.compat_conditions)},
              {"mp_conditions", residuals(rep.mp_conditions)},
              {"rank_conditions", std::move(ranks)}};
}

inline json solution_to_json(const NamedSolution& sol, const std::vector<std::string>& order) {
  json u = json::object();
  for (const auto& name : order) u[name] = matrix_to_json(sol.at(name));
  return json{{"unknowns", std::move(u)}};
}

inline NamedSolution solution_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("unknowns") || !doc.at("unknowns").is_object())
    throw ParseError("solution: missing object 'unknowns'");
  NamedSolution sol;
  for (const auto& [key, v] : doc.at("unknowns").items()) sol[key] = matrix_from_json(v, "unknowns." + key);
  return sol;
}

inline json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError(path + ": cannot open");
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline void write_json(const std::string& path, const json& doc, std::ostream& fallback) {
  if (path.empty() || path == "-") {
    fallback << doc.dump(2) << "\n";
    return;
  }
  std::ofstream f(path);
  if (!f) throw ParseError(path + ": cannot write");
  f << doc.dump(2) << "\n";
  if (!f) throw ParseError(path + ": write failed");
}

// ---------------------------------------------------------------------------------------------
// Tables

inline void print_report(const SolvabilityReport& rep, std::ostream& out) {
  auto verdict = [](bool p) { return p ? "ok" : "FAIL"; };
  for (const auto* group : {&rep.compat_conditions, &rep.mp_conditions})
    for (const auto& c : *group)
      out << std::left << std::setw(44) << c.name << std::right << std::setw(13) << std::scientific
          << std::setprecision(3) << c.residual << " <= " << std::setw(10) << c.threshold << "  " << verdict(c.pass)
          << "\n";
  for (const auto& c : rep.rank_conditions)
    out << std::left << std::setw(44) << c.name << std::right << std::setw(13) << c.lhs << " == " << std::setw(10)
        << c.rhs << "  " << verdict(c.pass) << "\n";
  out << std::defaultfloat << "verdict: " << (rep.consistent ? "consistent" : "inconsistent")
      << (rep.forms_agree ? "" : " (residual and rank forms disagree)") << "\n";
}

inline void print_residuals(const ResidualReport& rep, std::ostream& out) {
  for (const auto& e : rep.equations)
    out << std::left << std::setw(44) << e.name << std::right << std::scientific << std::setprecision(3)
        << std::setw(13) << e.relative << "  " << (e.pass ? "ok" : "FAIL") << "\n";
  out << std::defaultfloat << "residuals: " << (rep.pass ? "pass" : "fail") << "\n";
}

// ---------------------------------------------------------------------------------------------
// Commands. Each returns the process exit code.

struct Options {
  std::optional<std::string> variant;
  std::optional<std::string> eta;
  double tol = 1e-9;
  std::string out;
};

inline Instance load_instance(const std::string& path, const Options& o) {
  std::optional<Variant> v;
  std::optional<Eta> e;
  try {
    if (o.variant) v = parse_variant(*o.variant);
    if (o.eta) e = parse_eta(*o.eta);
  } catch (const std::invalid_argument& ex) {
    throw ParseError(ex.what());
  }
  return instance_from_json(read_json_file(path), v, e);
}

inline SolverOptions solver_options(const Options& o) {
  SolverOptions s;
  s.tol = o.tol;
  return s;
}

inline int cmd_check(const std::string& path, const Options& o, std::ostream& out, std::ostream& err) {
  try {
    const Instance in = load_instance(path, o);
    const SolvabilityReport rep = solve(in, solver_options(o)).report;
    print_report(rep, out);
    if (!o.out.empty()) write_json(o.out, report_to_json(rep), out);
    return rep.consistent ? kOk : kFail;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kError;
  }
}

/// free_mode is "zero", "random" (drawn from `seed`) or the path of a document whose "params" object
/// holds every free parameter.
inline int cmd_solve(const std::string& path, const Options& o, const std::string& free_mode, std::uint64_t seed,
                     std::ostream& out, std::ostream& err) {
  try {
    const Instance in = load_instance(path, o);
    const SolveResult res = solve(in, solver_options(o));
    if (!res.consistent()) {
      err << "inconsistent; failing conditions:";
      for (const auto& f : res.report.failing()) err << " [" << f << "]";
      err << "\n";
      return kFail;
    }
    const SolutionFamily& fam = *res.family;
    std::vector<QMatrix> params;
    if (free_mode == "zero") {
      params = fam.zero_params();
    } else if (free_mode == "random") {
      Rng g(seed);
      params = fam.random_params(g);
    } else {
      const json doc = read_json_file(free_mode);
      if (!doc.contains("params") || !doc.at("params").is_object()) throw ParseError(free_mode + ": missing 'params'");
      for (const auto& spec : fam.params()) {
        if (!doc.at("params").contains(spec.name)) throw ParseError(free_mode + ": missing params." + spec.name);
        params.push_back(matrix_from_json(doc.at("params").at(spec.name), "params." + spec.name));
      }
    }
    const NamedSolution sol = fam.named(fam.assemble(params));
    const ResidualReport rr = verify_solution(in, sol, o.tol);
    json doc = solution_to_json(sol, fam.unknowns());
    doc["variant"] = to_string(in.variant);
    doc["free"] = free_mode == "zero" || free_mode == "random" ? free_mode : "file";
    if (free_mode == "random") doc["seed"] = seed;
    json pspec = json::array();
    for (const auto& s : fam.params()) pspec.push_back({{"name", s.name}, {"rows", s.rows}, {"cols", s.cols}});
    doc["params"] = std::move(pspec);
    doc["residuals"] = residuals_to_json(rr);
    std::ostream& table = o.out.empty() ? err : out;
    print_residuals(rr, table);
    write_json(o.out, doc, out);
    if (!rr.pass) {
      err << "solution failed its residual check\n";
      return kError;
    }
    return kOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kError;
  }
}

struct GenOptions {
  std::string variant = "master";
  std::string eta = "i";
  std::uint64_t seed = 0;
  std::string profile = "random:1:4";  // uniform:D, random:LO:HI or narrow
  bool inconsistent = false;
  std::string out;
  std::string witness;
};

inline DimensionProfile parse_profile(const std::string& s, std::uint64_t seed) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  for (std::string t; std::getline(ss, t, ':');) parts.push_back(t);
  auto num = [&](std::size_t i) -> std::size_t {
    try {
      std::size_t pos = 0;
      const long v = std::stol(parts.at(i), &pos);
      if (pos != parts.at(i).size() || v < 0) throw std::invalid_argument("negative");
      return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
      throw ParseError("--profile '" + s + "': bad number");
    }
  };
  DimensionProfile p;
  if (parts.size() == 2 && parts[0] == "uniform") p = DimensionProfile::uniform(num(1), seed);
  else if (parts.size() == 3 && parts[0] == "random" && num(1) <= num(2)) p = DimensionProfile::random(seed, num(1), num(2));
  else if (parts.size() == 1 && parts[0] == "narrow") p = DimensionProfile::narrow(seed);
  else throw ParseError("--profile must be uniform:D, random:LO:HI or narrow (got '" + s + "')");
  p.validate();
  return p;
}

inline int cmd_gen(const GenOptions& g, std::ostream& out, std::ostream& err) {
  try {
    const Variant v = parse_variant(g.variant);
    DimensionProfile prof = parse_profile(g.profile, g.seed);
    prof.eta = parse_eta(g.eta);
    json doc;
    if (g.inconsistent) {
      doc = instance_to_json(gen_inconsistent(v, prof));
    } else {
      const Planted pl = gen_consistent(v, prof);
      doc = instance_to_json(pl.instance);
      if (!g.witness.empty()) {
        std::vector<std::string> order;
        for (const auto& [k, m] : pl.witness) order.push_back(k);
        write_json(g.witness, solution_to_json(pl.witness, order), out);
      }
    }
    doc["seed"] = g.seed;
    doc["profile"] = g.profile;
    write_json(g.out, doc, out);
    return kOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kError;
  }
}

inline int cmd_verify(const std::string& inst_path, const std::string& sol_path, const Options& o, std::ostream& out,
                      std::ostream& err) {
  try {
    const Instance in = load_instance(inst_path, o);
    const NamedSolution sol = solution_from_json(read_json_file(sol_path));
    const ResidualReport rr = verify_solution(in, sol, o.tol);
    print_residuals(rr, out);
    if (!o.out.empty()) write_json(o.out, residuals_to_json(rr), out);
    return rr.pass ? kOk : kFail;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kError;
  }
}

// ---------------------------------------------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Solvability and general solutions of quaternion Sylvester-type systems"};
  app.require_subcommand(1);
  Options o;
  std::string variant, eta, inst_path, sol_path, free_mode = "zero";
  std::uint64_t seed = 0;
  GenOptions g;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--variant", variant, "system: master, three-term, mixed, two-term, five-term, left, right, pair, "
                                          "eta-full, eta-three, eta-two, eta-mixed (default: from the document)");
    sub->add_option("--eta", eta, "i, j or k for the eta systems (default: from the document, else i)");
    sub->add_option("--tol", o.tol, "residual tolerance")->capture_default_str();
    sub->add_option("--out", o.out, "write the structured document here");
  };
  CLI::App* check = app.add_subcommand("check", "decide solvability; exit 0 consistent, 2 inconsistent");
  check->add_option("instance", inst_path, "instance document")->required();
  common(check);
  CLI::App* solve_cmd = app.add_subcommand("solve", "solve and self-verify; exit 2 when inconsistent");
  solve_cmd->add_option("instance", inst_path, "instance document")->required();
  common(solve_cmd);
  solve_cmd->add_option("--free", free_mode, "free parameters: zero, random, or a document with 'params'")
      ->capture_default_str();
  solve_cmd->add_option("--seed", seed, "seed for --free random");
  CLI::App* verify = app.add_subcommand("verify", "residuals of a solution; exit 0 pass, 2 fail");
  verify->add_option("instance", inst_path, "instance document")->required();
  verify->add_option("solution", sol_path, "solution document")->required();
  common(verify);
  CLI::App* gen = app.add_subcommand("gen", "generate a planted instance");
  gen->add_option("--variant", g.variant, "system to generate")->capture_default_str();
  gen->add_option("--eta", g.eta, "i, j or k")->capture_default_str();
  gen->add_option("--seed", g.seed, "generator seed")->capture_default_str();
  gen->add_option("--profile", g.profile, "uniform:D, random:LO:HI or narrow")->capture_default_str();
  gen->add_flag("--inconsistent", g.inconsistent, "perturb the right-hand side until the instance is inconsistent");
  gen->add_option("--out", g.out, "instance document (default stdout)");
  gen->add_option("--witness", g.witness, "write the planted solution here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kError;
  }
  if (!variant.empty()) o.variant = variant;
  if (!eta.empty()) o.eta = eta;
  if (*check) return cmd_check(inst_path, o, out, err);
  if (*solve_cmd) return cmd_solve(inst_path, o, free_mode, seed, out, err);
  if (*verify) return cmd_verify(inst_path, sol_path, o, out, err);
  return cmd_gen(g, out, err);
}

}  // namespace qsylv::cli
