// Command-line front end: problem ingestion, suite execution, report and
// table emission. See README.md for the file format and examples.
#include "xishift/verify.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

struct Options {
  std::string in;
  std::string out;
  std::string format = "csv";
  std::string kind;
  std::vector<std::string> suites;
  std::string eps;
  std::string grid;
  double tol = 0.0;
  int random_dim = 0;
  std::uint64_t seed = 0;
};

void add_common(CLI::App* cmd, Options& o, const char* default_kind) {
  o.kind = default_kind;
  cmd->add_option("--in", o.in, "problem file (JSON)");
  cmd->add_option("--out", o.out, "output path (stdout if omitted)");
  cmd->add_option("--format", o.format, "output format: csv|json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--eps", o.eps, "comma-separated positive eps list");
  cmd->add_option("--grid", o.grid, "lambda grid as min,max,count");
  cmd->add_option("--tol", o.tol, "override tol_eig and tol_proj");
  cmd->add_option("--random", o.random_dim, "generate a random instance of this dimension");
  cmd->add_option("--seed", o.seed, "seed for the generator");
  cmd->add_option("--kind", o.kind, "generated problem kind: flow|pair")
      ->check(CLI::IsMember({"flow", "pair"}));
}

xishift::ProblemFile build_problem(const Options& o) {
  if (o.in.empty() == (o.random_dim == 0))
    throw xishift::ConfigError("give exactly one of --in <path> or --random <n>");

  xishift::ProblemFile p;
  if (!o.in.empty()) {
    p = xishift::load_problem(o.in);
  } else if (o.kind == "pair") {
    p = xishift::random_pair(o.random_dim, o.seed);
  } else {
    p = xishift::random_flow(o.random_dim, o.seed);
  }

  if (!o.eps.empty()) {
    p.eps.clear();
    std::stringstream ss(o.eps);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const double e = std::stod(item);
      if (e <= 0.0) throw xishift::ConfigError("--eps entries must be positive");
      p.eps.push_back(e);
    }
  }
  if (!o.grid.empty()) {
    xishift::GridSpec g;
    if (std::sscanf(o.grid.c_str(), "%lf,%lf,%d", &g.min, &g.max, &g.count) != 3 ||
        !(g.min < g.max) || g.count < 1)
      throw xishift::ConfigError("--grid expects min,max,count with min < max, count >= 1");
    p.grid = g;
  }
  if (o.tol > 0.0) {
    p.tol.tol_eig = o.tol;
    p.tol.tol_proj = o.tol;
  }
  return p;
}

void emit(const Options& o, const std::string& payload) {
  if (o.out.empty()) {
    std::cout << payload;
    return;
  }
  std::ofstream out(o.out, std::ios::binary);
  if (!out) throw xishift::Error("cannot open output file '" + o.out + "'");
  out << payload;
}

int run_verify(const Options& o) {
  const xishift::ProblemFile problem = build_problem(o);
  std::vector<std::string> suites = o.suites;
  if (suites.empty()) suites = xishift::suites_for(problem.kind);

  const auto start = std::chrono::steady_clock::now();
  const xishift::VerificationReport report = xishift::cmd_verify(problem, suites);
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

  for (const xishift::ReportEntry& e : report.entries)
    std::fprintf(stderr, "[%s] %s/%s %s residual=%.3g tolerance=%.3g\n",
                 e.pass ? "PASS" : "FAIL", e.suite.c_str(), e.identity.c_str(),
                 e.instance.c_str(), e.residual, e.tolerance);
  std::fprintf(stderr, "%d/%zu entries passed in %.1f ms\n", report.passed(),
               report.entries.size(), ms);

  emit(o, o.format == "json" ? xishift::report_to_json(report)
                             : xishift::report_to_csv(report));
  return report.all_pass() ? 0 : 1;
}

int run_ssf(const Options& o) {
  const xishift::ProblemFile problem = build_problem(o);
  const xishift::SsfTable table = xishift::cmd_ssf(problem);
  emit(o, o.format == "json" ? xishift::ssf_to_json(table) : xishift::ssf_to_csv(table));
  return 0;
}

int run_flow(const Options& o) {
  const xishift::ProblemFile problem = build_problem(o);
  emit(o, o.format == "json" ? xishift::flow_to_json(problem) : xishift::flow_to_csv(problem));
  return 0;
}

int run_bk(const Options& o) {
  const xishift::ProblemFile problem = build_problem(o);
  emit(o, o.format == "json" ? xishift::bk_to_json(problem) : xishift::bk_to_csv(problem));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"xishift: spectral shift, index and scattering identities for finite matrices"};
  app.require_subcommand(1);

  Options o_verify, o_ssf, o_flow, o_bk;

  CLI::App* verify = app.add_subcommand("verify", "run verification suites on one instance");
  add_common(verify, o_verify, "flow");
  verify->add_option("--suites", o_verify.suites, "comma-separated suite list")
      ->delimiter(',');

  CLI::App* ssf = app.add_subcommand("ssf", "tabulate the spectral shift function");
  add_common(ssf, o_ssf, "pair");

  CLI::App* flow = app.add_subcommand("flow", "emit the crossing profile of a flow instance");
  add_common(flow, o_flow, "flow");

  CLI::App* bk = app.add_subcommand("bk", "scattering-determinant report");
  add_common(bk, o_bk, "flow");

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify->parsed()) return run_verify(o_verify);
    if (ssf->parsed()) return run_ssf(o_ssf);
    if (flow->parsed()) return run_flow(o_flow);
    if (bk->parsed()) return run_bk(o_bk);
  } catch (const xishift::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
