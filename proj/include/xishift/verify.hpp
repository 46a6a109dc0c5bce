// Verification-suite execution and report emission. Suites evaluate the
// library's identities on one problem instance and produce one entry per
// checked identity; an entry records the identity, its defining relation,
// the instance context, the residual and the tolerance. Failures are
// entries with pass = false, never exceptions.
//
// Suite names (CLI tokens): index, trindex, ttr8, bk, logtrace, arctan
// for flow problems; index, trindex, ssf, poisson, gap, gbs for pairs.
#pragma once

#include "xishift/problem.hpp"

#include <string>
#include <vector>

namespace xishift {

struct ReportEntry {
  std::string suite;
  std::string identity;  // short name of the identity checked
  std::string anchor;    // the defining relation, in formula form
  std::string instance;  // evaluation context (lambda, eps, repetition, ...)
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct VerificationReport {
  std::vector<ReportEntry> entries;

  int passed() const;
  int failed() const;
  bool all_pass() const { return failed() == 0; }
  void canonicalize();  // sort by (suite, instance, identity)
};

std::vector<std::string> known_suites();
std::vector<std::string> suites_for(ProblemFile::Kind kind);

VerificationReport cmd_verify(const ProblemFile& problem, std::vector<std::string> suites);

std::string report_to_json(const VerificationReport& report);
std::string report_to_csv(const VerificationReport& report);

// ---------------------------------------------------------------------------

struct SsfRow {
  double lambda = 0.0;
  bool nudged = false;
  int xi_exact = 0;
  std::vector<double> xi_trindex;   // one per eps
  std::vector<double> xi_averaged;  // one per eps
  std::vector<double> poisson;      // closed-form smoothing of xi_exact
};

struct SsfTable {
  std::vector<double> eps;
  std::vector<SsfRow> rows;
};

SsfTable cmd_ssf(const ProblemFile& problem);
std::string ssf_to_csv(const SsfTable& table);
std::string ssf_to_json(const SsfTable& table);

// ---------------------------------------------------------------------------

std::string flow_to_csv(const ProblemFile& problem);
std::string flow_to_json(const ProblemFile& problem);
std::string bk_to_csv(const ProblemFile& problem);
std::string bk_to_json(const ProblemFile& problem);

// Fixed 17-significant-digit formatting used by every CSV writer.
std::string format_double(double x);

// Concurrency cap: XISHIFT_THREADS when set, machine default otherwise.
int thread_cap();

}  // namespace xishift
