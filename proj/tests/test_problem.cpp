#include "xishift/problem.hpp"
#include "xishift/verify.hpp"

#include <doctest.h>

#include <cmath>

using namespace xishift;

TEST_CASE("minimal pair document parses") {
  const ProblemFile p = parse_problem(R"({"kind":"pair","H0":[[[0,0]]],"V":[[[1,0]]]})");
  CHECK(p.kind == ProblemFile::Kind::Pair);
  CHECK(p.dim() == 1);
  CHECK(p.h0(0, 0) == Complex(0.0, 0.0));
  CHECK(p.v(0, 0) == Complex(1.0, 0.0));
}

TEST_CASE("flow documents demand a PSD B and name the offending eigenvalue") {
  const std::string doc = R"({"kind":"flow",
    "S":[[[1,0],[0,0]],[[0,0],[-1,0]]],
    "B":[[[-0.5,0],[0,0]],[[0,0],[1,0]]]})";
  CHECK_THROWS_WITH_AS(parse_problem(doc), doctest::Contains("-0.5"), ParseError);
}

TEST_CASE("malformed documents carry field context") {
  CHECK_THROWS_AS(parse_problem("{"), ParseError);
  CHECK_THROWS_WITH_AS(parse_problem(R"({"kind":"wat"})"), doctest::Contains("kind"),
                       ParseError);
  CHECK_THROWS_WITH_AS(parse_problem(R"({"kind":"pair","H0":[[[0,0],[1,0]]],"V":[[[1,0]]]})"),
                       doctest::Contains("H0"), ParseError);
  // non-hermitian input
  CHECK_THROWS_WITH_AS(
      parse_problem(R"({"kind":"pair","H0":[[[0,0],[5,0]],[[1,0],[0,0]]],"V":
        [[[0,0],[0,0]],[[0,0],[0,0]]]})"),
      doctest::Contains("hermiticity"), ParseError);
  CHECK_THROWS_WITH_AS(
      parse_problem(R"({"kind":"pair","H0":[[[0,0]]],"V":[[[1,0]]],"eps":[-1]})"),
      doctest::Contains("eps"), ParseError);
}

TEST_CASE("problem round trip is stable") {
  const ProblemFile p = random_flow(4, 99);
  const std::string text = serialize_problem(p);
  const ProblemFile q = parse_problem(text);
  CHECK(q.kind == p.kind);
  CHECK(op_norm(q.s - p.s) <= 1e-15);
  CHECK(op_norm(q.a - p.a) <= 1e-15);
  CHECK(op_norm(q.b - p.b) <= 1e-15);
  CHECK(q.seed == p.seed);
  CHECK(serialize_problem(q) == text);
}

TEST_CASE("generators are deterministic in the seed") {
  const ProblemFile a = random_pair(5, 42);
  const ProblemFile b = random_pair(5, 42);
  const ProblemFile c = random_pair(5, 43);
  CHECK(serialize_problem(a) == serialize_problem(b));
  CHECK(serialize_problem(a) != serialize_problem(c));
}

TEST_CASE("verify on the scalar flow instance") {
  ProblemFile p;
  p.kind = ProblemFile::Kind::Flow;
  p.s = diag_matrix({-1.0});
  p.a = Matrix::Zero(1, 1);
  p.b = diag_matrix({1.0});
  const VerificationReport report = cmd_verify(p, {"ttr8", "bk"});
  REQUIRE(report.entries.size() == 3);  // averaged index + unitarity + determinant
  for (const ReportEntry& e : report.entries) {
    CHECK(e.pass);
    CHECK(e.residual <= 1e-12);
    CHECK(!e.anchor.empty());
    CHECK(!e.identity.empty());
  }
  CHECK(report.all_pass());
}

TEST_CASE("verify rejects unknown and incompatible suites") {
  const ProblemFile flow = random_flow(3, 1);
  CHECK_THROWS_AS(cmd_verify(flow, {"nope"}), ConfigError);
  CHECK_THROWS_AS(cmd_verify(flow, {"ssf"}), ConfigError);
  const ProblemFile pair = random_pair(3, 1);
  CHECK_THROWS_AS(cmd_verify(pair, {"bk"}), ConfigError);
}

TEST_CASE("empty suite list yields an empty passing report") {
  const VerificationReport report = cmd_verify(random_flow(3, 5), {});
  CHECK(report.entries.empty());
  CHECK(report.all_pass());
}

TEST_CASE("gap suite on the worked pair example") {
  ProblemFile p;
  p.kind = ProblemFile::Kind::Pair;
  p.h0 = diag_matrix({0.0, 2.0});
  p.v = diag_matrix({-1.0, 0.0});
  const VerificationReport report = cmd_verify(p, {"gap"});
  REQUIRE(!report.entries.empty());
  bool found = false;
  for (const ReportEntry& e : report.entries) {
    CHECK(e.pass);
    if (e.instance.find("lambda=-0.5") != std::string::npos &&
        e.instance.find("value=-1") != std::string::npos)
      found = true;
  }
  CHECK(found);
}

TEST_CASE("report serialization is canonical and deterministic") {
  const ProblemFile p = random_flow(4, 7);
  const VerificationReport r1 = cmd_verify(p, {"bk", "ttr8", "index"});
  const VerificationReport r2 = cmd_verify(p, {"index", "ttr8", "bk"});
  CHECK(report_to_json(r1) == report_to_json(r2));
  CHECK(report_to_csv(r1) == report_to_csv(r2));
  // sorted by suite
  for (std::size_t i = 1; i < r1.entries.size(); ++i)
    CHECK(r1.entries[i - 1].suite <= r1.entries[i].suite);
}

TEST_CASE("ssf tables are byte-identical across runs") {
  ProblemFile p = random_pair(4, 21);
  p.grid = GridSpec{-3.0, 3.0, 11};
  p.eps = {0.1, 0.01};
  const std::string a = ssf_to_csv(cmd_ssf(p));
  const std::string b = ssf_to_csv(cmd_ssf(p));
  CHECK(a == b);
  CHECK(a.find("lambda,nudged,xi_exact") == 0);
  CHECK(ssf_to_json(cmd_ssf(p)) == ssf_to_json(cmd_ssf(p)));
}

TEST_CASE("ssf table methods reproduce the exact values at gap-like points") {
  ProblemFile p;
  p.kind = ProblemFile::Kind::Pair;
  p.h0 = diag_matrix({0.0, 2.0});
  p.v = diag_matrix({-1.0, 0.0});
  p.grid = GridSpec{-0.6, -0.4, 3};
  p.eps = {1e-3};
  const SsfTable table = cmd_ssf(p);
  for (const SsfRow& row : table.rows) {
    CHECK(row.xi_exact == -1);
    CHECK(std::abs(row.xi_trindex[0] - row.xi_averaged[0]) <= 1e-8);
    CHECK(std::abs(row.xi_trindex[0] - row.poisson[0]) <= 1e-6);
  }
}

TEST_CASE("ssf table of a zero perturbation is identically zero") {
  ProblemFile p;
  p.kind = ProblemFile::Kind::Pair;
  p.h0 = diag_matrix({0.0, 2.0});
  p.v = Matrix::Zero(2, 2);
  p.grid = GridSpec{-1.0, 3.3, 7};
  p.eps = {0.1};
  for (const SsfRow& row : cmd_ssf(p).rows) {
    CHECK(row.xi_exact == 0);
    CHECK(std::abs(row.xi_trindex[0]) <= 1e-12);
    CHECK(std::abs(row.xi_averaged[0]) <= 1e-12);
    CHECK(std::abs(row.poisson[0]) == 0.0);
  }
}

TEST_CASE("ssf grid points on a jump are nudged") {
  ProblemFile p;
  p.kind = ProblemFile::Kind::Pair;
  p.h0 = diag_matrix({0.0, 2.0});
  p.v = diag_matrix({-1.0, 0.0});
  p.grid = GridSpec{-1.0, 0.0, 2};  // -1 in spec(H), 0 in spec(H0): both nudge
  p.eps = {0.1};
  const SsfTable table = cmd_ssf(p);
  REQUIRE(table.rows.size() == 2);
  CHECK(table.rows[0].nudged);
  CHECK(table.rows[0].lambda > -1.0);
  CHECK(table.rows[1].nudged);
  CHECK(table.rows[1].lambda > 0.0);
}

TEST_CASE("flow and bk emitters") {
  ProblemFile p;
  p.kind = ProblemFile::Kind::Flow;
  p.s = diag_matrix({1.0, -1.0});
  p.a = Matrix::Zero(2, 2);
  p.b = Matrix::Identity(2, 2);

  const std::string csv = flow_to_csv(p);
  CHECK(csv.find("type,t_lo,t_hi,value") == 0);
  CHECK(csv.find("crossing,-1,") != std::string::npos);
  CHECK(csv.find("plateau,-inf,") != std::string::npos);

  const std::string json = flow_to_json(p);
  CHECK(json.find("\"cauchy_average\"") != std::string::npos);

  const std::string bk = bk_to_csv(p);
  CHECK(bk.find("det_re,det_im,trindex,residual,unitarity_defect") == 0);
}

TEST_CASE("thread cap respects the environment variable") {
  CHECK(thread_cap() >= 1);
}
