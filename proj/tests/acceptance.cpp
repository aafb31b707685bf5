// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit when any fails.

#include <sys/wait.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <regex>
#include <sstream>

#include "qsylv/cli.hpp"

using namespace qsylv;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;
double ms_since(Clock::time_point t0) { return std::chrono::duration<double, std::milli>(Clock::now() - t0).count(); }

std::string fmt(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

fs::path scratch_dir() {
  const fs::path d = fs::temp_directory_path() / "qsylv_acceptance";
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

int in_process(std::vector<std::string> args) {
  args.insert(args.begin(), "qsylv");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  return cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
}

int binary(const std::string& args) {
  const std::string cmd = std::string(QSYLV_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------------------------

Outcome worked_example_ranks() {
  // Printed joint rank table of the worked example.
  const std::size_t printed[9] = {11, 8, 10, 9, 10, 9, 9, 8, 19};
  const fs::path dir = scratch_dir();
  const std::string rep_path = (dir / "report.json").string();
  const auto t0 = Clock::now();
  const int code = in_process({"check", QSYLV_DATA_DIR "/example51.json", "--out", rep_path});
  const double ms = ms_since(t0);
  Outcome o;
  if (code != 0) return {false, "check exited " + std::to_string(code)};
  const cli::json rep = cli::read_json_file(rep_path);
  std::map<std::string, std::size_t> lhs;
  for (const auto& c : rep.at("rank_conditions")) {
    lhs[c.at("name").get<std::string>()] = c.at("lhs").get<std::size_t>();
    if (!c.at("pass").get<bool>()) o = {false, "condition " + c.at("name").get<std::string>() + " fails; "};
  }

  const std::string deviations = slurp(QSYLV_DOCS_DIR "/deviations.md");
  std::string itemized;
  for (int k = 0; k < 9; ++k) {
    const std::string name = "joint rank " + std::to_string(k + 1);
    if (!lhs.count(name)) return {false, "missing " + name};
    const std::size_t got = lhs[name];
    if (got == printed[k]) continue;
    const std::regex row("\\|\\s*" + name + "\\s*\\|\\s*" + std::to_string(printed[k]) + "\\s*\\|\\s*" +
                         std::to_string(got) + "\\s*\\|");
    const bool listed = std::regex_search(deviations, row) &&
                        deviations.find("Deviation: " + name + ", printed " + std::to_string(printed[k]) +
                                        ", recomputed " + std::to_string(got)) != std::string::npos;
    if (!listed) {
      o.pass = false;
      o.detail += name + " = " + std::to_string(got) + " (printed " + std::to_string(printed[k]) +
                  ") not itemized in docs/deviations.md; ";
    } else {
      itemized += " " + name + " " + std::to_string(printed[k]) + "->" + std::to_string(got);
    }
  }
  const MasterInstance m = to_master(cli::instance_from_json(cli::read_json_file(QSYLV_DATA_DIR "/example51.json")));
  for (int i = 1; i < 4; ++i)
    if (rank(m.A[i]) != 2 || rank(m.B[i]) != 1) {
      o.pass = false;
      o.detail += "side ranks of constraint " + std::to_string(i) + " differ; ";
    }
  if (ms >= 1000.0) {
    o.pass = false;
    o.detail += "check took " + fmt(ms) + " ms; ";
  }
  o.detail += "check " + fmt(ms) + " ms";
  if (!itemized.empty()) o.detail += ", itemized deviations:" + itemized;
  return o;
}

Outcome worked_example_solution() {
  const MasterInstance m = to_master(cli::instance_from_json(cli::read_json_file(QSYLV_DATA_DIR "/example51.json")));
  const NamedSolution printed = cli::solution_from_json(cli::read_json_file(QSYLV_DATA_DIR "/example51_solution.json"));
  const auto r1 = verify_solution(m, printed, 1e-3);
  const auto res = solve_master(m);
  if (!res.consistent()) return {false, "solve_master reports inconsistent"};
  const auto r2 = verify_solution(m, res.family->named(res.family->particular()), 1e-8);
  const bool ok = r1.pass && r2.pass && r1.equations.size() == 9 && r2.equations.size() == 9;
  return {ok, "printed max rel " + fmt(r1.max_relative()) + ", solver max rel " + fmt(r2.max_relative())};
}

Outcome penrose_suite() {
  Rng g(2024);
  double worst = 0.0;
  int odd = 0, deficient = 0;
  for (int t = 0; t < 500; ++t) {
    const auto m = static_cast<std::size_t>(g.uniform_int(1, 8));
    const auto n = static_cast<std::size_t>(g.uniform_int(1, 8));
    QMatrix A;
    if (t % 2 == 1) {
      A = g.low_rank(m, n, static_cast<std::size_t>(g.uniform_int(0, static_cast<int>(std::min(m, n)) - 1)));
      ++deficient;
    } else {
      A = g.matrix(m, n);
    }
    const auto b = pinv(A);
    const QMatrix& X = b.pinv;
    const double sa = frobenius_norm(A), sx = frobenius_norm(X);
    auto rel = [](const QMatrix& r, double s) { return frobenius_norm(r) / (1.0 + s); };
    for (double v : {rel(A * X * A - A, sa), rel(X * A * X - X, sx), rel(conj_transpose(A * X) - A * X, 1.0),
                     rel(conj_transpose(X * A) - X * A, 1.0), rel(b.proj_left * b.proj_left - b.proj_left, 1.0),
                     rel(b.proj_right * b.proj_right - b.proj_right, 1.0)})
      worst = std::max(worst, v);
    const auto cs = complex_svd(embed(A));
    const double tau = default_rank_tolerance(2 * m, 2 * n, cs.sigma.empty() ? 0.0 : cs.sigma[0]);
    std::size_t crank = 0;
    for (double s : cs.sigma) crank += s > tau;
    if (crank % 2 != 0) ++odd;
  }
  return {worst <= 1e-10 && odd == 0,
          "500 matrices (" + std::to_string(deficient) + " rank-deficient), worst rel " + fmt(worst) +
              ", odd embedded ranks " + std::to_string(odd)};
}

Outcome rank_oracle() {
  Rng g(77);
  int mismatch = 0, embed_mismatch = 0;
  for (int t = 0; t < 200; ++t) {
    auto dim = [&] { return static_cast<std::size_t>(g.uniform_int(1, 4)); };
    auto blk = [&](std::size_t r, std::size_t c) {
      return g.uniform() < 0.5 ? g.matrix(r, c) : g.low_rank(r, c, static_cast<std::size_t>(g.uniform_int(0, 2)));
    };
    const std::size_t m = dim(), n = dim(), p = dim(), q = dim(), s = dim(), u = dim();
    const QMatrix A = blk(m, n), B = blk(m, q), C = blk(p, n), D = blk(s, q), E = blk(p, u);
    const auto r = rank_block_oracle(A, B, C, D, E);
    if (!r.equal()) ++mismatch;
    // Independent check of the left side through the complex embedding.
    const QMatrix L = block({{A, B * pinv(D).proj_left}, {pinv(E).proj_right * C, QMatrix(p, q)}});
    const auto cs = complex_svd(embed(L));
    const double tau = default_rank_tolerance(2 * L.rows(), 2 * L.cols(), cs.sigma.empty() ? 0.0 : cs.sigma[0]);
    std::size_t crank = 0;
    for (double v : cs.sigma) crank += v > tau;
    if (crank != 2 * r.lhs) ++embed_mismatch;
  }
  return {mismatch == 0 && embed_mismatch == 0, "200 tuples, lhs != rhs in " + std::to_string(mismatch) +
                                                    ", embedding disagreement in " + std::to_string(embed_mismatch)};
}

Outcome planted_round_trips() {
  const Variant vs[] = {Variant::left,   Variant::right,      Variant::pair,  Variant::two_term,
                        Variant::five_term, Variant::master, Variant::three_term, Variant::mixed};
  Outcome o;
  double worst = 0.0, slowest = 0.0;
  for (Variant v : vs) {
    int bad = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
      const auto pl = gen_consistent(v, DimensionProfile::random(1000 + s, 1, 5));
      const auto t0 = Clock::now();
      const auto r = solve(pl.instance);
      slowest = std::max(slowest, ms_since(t0));
      if (!r.consistent()) {
        ++bad;
        continue;
      }
      const auto rep = verify_solution(pl.instance, r.family->named(r.family->particular()), 1e-8);
      worst = std::max(worst, rep.max_relative());
      bad += !rep.pass;
    }
    if (bad) {
      o.pass = false;
      o.detail += std::string(to_string(v)) + " failed " + std::to_string(bad) + "; ";
    }
  }
  if (slowest >= 100.0) o.pass = false;
  o.detail += "8 x 100 instances, worst rel " + fmt(worst) + ", slowest solve " + fmt(slowest) + " ms";
  return o;
}

Outcome forms_agree() {
  int disagree = 0, wrong = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto rc = check_master(to_master(gen_consistent(DimensionProfile::random(2000 + s, 1, 5)).instance));
    disagree += !rc.forms_agree;
    wrong += !rc.consistent;
    const auto ri = check_master(gen_inconsistent(DimensionProfile::narrow(3000 + s)));
    disagree += !ri.forms_agree;
    wrong += ri.consistent;
  }
  return {disagree == 0 && wrong == 0, "200 instances, disagreements " + std::to_string(disagree) +
                                           ", wrong verdicts " + std::to_string(wrong)};
}

Outcome free_parameter_soundness() {
  int bad = 0;
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const MasterInstance m = to_master(gen_consistent(DimensionProfile::random(4000 + s, 1, 5)).instance);
    const auto r = solve_master(m);
    if (!r.consistent()) {
      bad += 20;
      continue;
    }
    Rng g(5000 + s);
    for (int k = 0; k < 20; ++k) {
      const auto rep = verify_solution(m, r.family->named(r.family->assemble(r.family->random_params(g))), 1e-8);
      worst = std::max(worst, rep.max_relative());
      bad += !rep.pass;
    }
  }
  return {bad == 0, "400 draws, failures " + std::to_string(bad) + ", worst rel " + fmt(worst)};
}

std::vector<QMatrix> ordered(const NamedSolution& sol, const std::vector<std::string>& names) {
  std::vector<QMatrix> out;
  for (const auto& n : names) out.push_back(sol.at(n));
  return out;
}

NamedSolution named(const std::vector<QMatrix>& t, const std::vector<std::string>& names) {
  NamedSolution out;
  for (std::size_t i = 0; i < names.size(); ++i) out[names[i]] = t[i];
  return out;
}

Outcome eta_suite() {
  const Variant vs[] = {Variant::eta_full, Variant::eta_three, Variant::eta_two, Variant::eta_mixed};
  int bad = 0, map_bad = 0;
  double worst = 0.0, worst_herm = 0.0, worst_map = 0.0;
  for (Variant v : vs)
    for (Eta eta : {Eta::i, Eta::j, Eta::k})
      for (std::uint64_t s = 0; s < 50; ++s) {
        auto d = DimensionProfile::random(6000 + s, 1, 5);
        d.eta = eta;
        const auto pl = gen_consistent(v, d);
        const auto r = solve(pl.instance);
        if (!r.consistent()) {
          ++bad;
          continue;
        }
        const auto sol = r.family->named(r.family->particular());
        const auto rep = evaluate(equations(pl.instance), sol, 1e-8);
        worst = std::max(worst, rep.max_relative());
        bad += !rep.pass;
        for (const auto& n : eta_hermitian_unknowns(v)) {
          const double h = eta_hermicity_defect(sol.at(n), eta);
          worst_herm = std::max(worst_herm, h);
          bad += h > 1e-12;
        }
        if (v != Variant::eta_full && v != Variant::eta_three) continue;
        // Doubled reduction: witness up to the master system and master solutions back down.
        EtaSystem sys = to_eta_system(pl.instance);
        std::vector<QMatrix> w;
        if (v == Variant::eta_three) {
          sys = eta_three_as_full(sys);
          w = {QMatrix(0, sys.Cc.rows()), pl.witness.at("X"), pl.witness.at("Y"), pl.witness.at("Z")};
        } else {
          w = ordered(pl.witness, eta_full_unknowns());
        }
        const MasterInstance doubled = sys.doubled();
        const auto up = verify_solution(doubled, named(eta_lift_solution(w, eta), master_unknowns()), 1e-10);
        const auto mr = solve_master(doubled);
        if (!mr.consistent()) {
          ++map_bad;
          continue;
        }
        Rng g(7000 + s);
        const auto down = evaluate(
            eta_full_equations(sys),
            named(eta_project_solution(mr.family->assemble(mr.family->random_params(g)), eta), eta_full_unknowns()),
            1e-10);
        worst_map = std::max({worst_map, up.max_relative(), down.max_relative()});
        map_bad += !up.pass + !down.pass;
      }
  return {bad == 0 && map_bad == 0,
          "600 instances, failures " + std::to_string(bad) + ", worst rel " + fmt(worst) + ", worst eta-Hermicity " +
              fmt(worst_herm) + ", reduction map failures " + std::to_string(map_bad) + " (worst " + fmt(worst_map) +
              ")"};
}

Outcome cli_suite() {
  const fs::path dir = scratch_dir();
  const auto& vs = all_variants();
  int pipeline_bad = 0, disagree = 0, reparse_bad = 0;
  for (int s = 0; s < 20; ++s) {
    const Variant v = vs[static_cast<std::size_t>(s) % vs.size()];
    const std::string inst = (dir / ("p" + std::to_string(s) + ".json")).string();
    const std::string sol = (dir / ("s" + std::to_string(s) + ".json")).string();
    const std::string seed = std::to_string(100 + s);
    const bool ok = binary("gen --variant " + std::string(to_string(v)) + " --seed " + seed + " --out " + inst) == 0 &&
                    binary("solve " + inst + " --free random --seed " + seed + " --out " + sol) == 0 &&
                    binary("verify " + inst + " " + sol) == 0;
    pipeline_bad += !ok;
    if (!ok) continue;
    for (const std::string& p : {inst, sol}) {
      const cli::json a = cli::read_json_file(p);
      std::ostringstream again;
      cli::write_json("", a, again);
      reparse_bad += slurp(p) != again.str();
    }
    const NamedSolution x = cli::solution_from_json(cli::read_json_file(sol));
    std::vector<std::string> order;
    for (const auto& [k, m] : x) order.push_back(k);
    reparse_bad += !(cli::solution_from_json(cli::json::parse(cli::solution_to_json(x, order).dump())) == x);
  }
  for (int s = 0; s < 40; ++s) {
    const Variant v = vs[static_cast<std::size_t>(s / 2) % vs.size()];
    const bool bad = s % 2 == 1;
    const std::string inst = (dir / ("c" + std::to_string(s) + ".json")).string();
    const std::string args = "gen --variant " + std::string(to_string(v)) + " --seed " + std::to_string(200 + s) +
                             (bad ? " --profile narrow --inconsistent" : "") + " --out " + inst;
    if (binary(args) != 0) {
      ++disagree;
      continue;
    }
    const int c = binary("check " + inst), r = binary("solve " + inst + " --out " + (dir / "tmp.json").string());
    disagree += c != r || c != (bad ? 2 : 0);
  }
  return {pipeline_bad == 0 && disagree == 0 && reparse_bad == 0,
          "pipeline failures " + std::to_string(pipeline_bad) + "/20, check/solve disagreements " +
              std::to_string(disagree) + "/40, re-parse mismatches " + std::to_string(reparse_bad)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 worked example rank table", worked_example_ranks},
      {"2 worked example solution", worked_example_solution},
      {"3 Penrose suite", penrose_suite},
      {"4 block rank oracle", rank_oracle},
      {"5 planted round trips", planted_round_trips},
      {"6 characterization forms agree", forms_agree},
      {"7 free-parameter soundness", free_parameter_soundness},
      {"8 eta suite", eta_suite},
      {"9 command line", cli_suite},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << name << "  [" << o.detail << "] (" << fmt(ms_since(t0))
              << " ms)" << std::endl;
  }
  fs::remove_all(fs::temp_directory_path() / "qsylv_acceptance");
  return failed == 0 ? 0 : 1;
}
