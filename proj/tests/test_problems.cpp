// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "core/problems.hpp"
#include "core/prox.hpp"
#include "core/report.hpp"
#include "core/solver.hpp"
#include "support/oracles.hpp"

#include <json.hpp>

#include <filesystem>
#include <random>
#include <sstream>

using namespace spliteq;

namespace {

std::string trace_of(const InstanceBundle& b, std::size_t iterations) {
  SolverConfig config = default_config(b.problem);
  config.max_iter = iterations;
  config.tol_residual = 1e-300;
  std::mt19937_64 rng(b.seed);
  const Vector x0 = sample_point(b.problem.c, b.problem.d1(), rng);
  SolveOptions options;
  options.known_solution = b.known_solution;
  const auto result = solve(b.problem, config, Mode::kWeak, x0, options);
  std::ostringstream out;
  write_trace_csv(result.trace, out, false);
  return out.str();
}

nlohmann::json scalar_doc() {
  return nlohmann::json::parse(R"({
    "version": 1, "d1": 1, "d2": 1, "A": [[1]],
    "C": {"kind": "box", "lo": [-1], "hi": [1]},
    "Q": {"kind": "box", "lo": [-1], "hi": [1]},
    "f": [{"P": [[1]], "Q": [[0]], "q": [0]}],
    "F": [{"M": [[1]], "b": [0]}],
    "known_solution": [0], "seed": 3
  })");
}

}  // namespace

TEST_CASE("bilinear and affine classes") {
  Matrix p(2, 2), q(2, 2);
  p << 2, 1, 0, 1;
  q << 1, 0, 0, 0;
  const Bifunction f = make_bilinear(p, q, Vector::Zero(2));
  // sym(P - Q) = [[1, .5], [.5, 1]] is PSD.
  CHECK(f.tag() == MonotonicityClass::kMonotone);
  const Vector x = Vector::Random(2);
  CHECK(f(x, x) == 0.0);

  const Bifunction g = make_bilinear(q, p, Vector::Zero(2));
  CHECK(g.tag() == MonotonicityClass::kPseudomonotone);

  Matrix m(2, 2);
  m << 1, 3, -3, 0;
  const Bifunction big_f = make_affine(m, Vector::Ones(2));
  CHECK(big_f.tag() == MonotonicityClass::kMonotone);
  CHECK(big_f(x, x) == 0.0);
}

TEST_CASE("eigenvalue checks agree with Jacobi") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix x = oracle::random_matrix(rng, 4, 4);
    const Matrix sym = 0.5 * (x + x.transpose());
    const double want = oracle::jacobi_eigenvalues(oracle::to_mat(sym)).front();
    CHECK(min_symmetric_eigenvalue(x) == doctest::Approx(want).epsilon(1e-10));
    CHECK(symmetric_part_psd(x) == (want >= 0));
  }
}

TEST_CASE("generated instances carry a certified solution") {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 8; ++trial) {
    const bool unique = trial % 2 == 0;
    const auto b = generate_instance(1 + trial % 4, 1 + (trial + 1) % 4, 2 + trial, 1 + trial,
                                     500 + trial, unique);
    CAPTURE(trial);
    REQUIRE(b.known_solution);
    CHECK(b.known_solution->isZero(0.0));
    CHECK(b.solution_unique == unique);
    CHECK(b.problem.q.contains(b.problem.a.apply(*b.known_solution), 0.0));

    const auto d1 = b.problem.d1();
    const auto d2 = b.problem.d2();
    for (const auto& f : b.problem.f) {
      REQUIRE(f.form());
      // sym(P - Q) PSD by construction: independent Jacobi check.
      const Matrix diff = f.form()->p - f.form()->q;
      const Matrix sym = 0.5 * (diff + diff.transpose());
      CHECK(oracle::jacobi_eigenvalues(oracle::to_mat(sym)).front() >= -1e-12);
      for (int k = 0; k < 1000; ++k) {
        const Vector y = sample_point(b.problem.c, d1, rng);
        CHECK(f(*b.known_solution, y) >= -1e-12);
      }
      const auto c = f.lipschitz()->c1;
      CHECK(sample_lipschitz_type(f, b.problem.c, d1, 10'000, rng));
      CHECK(sample_pseudomonotone(f, b.problem.c, d1, 10'000, rng));
      CHECK(c == doctest::Approx(oracle::largest_singular_value(oracle::to_mat(
                                     f.form()->p.transpose() - f.form()->q)) /
                                 2.0)
                     .epsilon(1e-8));
    }
    for (const auto& big_f : b.problem.big_f) {
      const Matrix& m = big_f.form()->p;
      CHECK(oracle::jacobi_eigenvalues(oracle::to_mat(0.5 * (m + m.transpose()))).front() >=
            -1e-12);
      CHECK(sample_monotone(big_f, b.problem.q, d2, 10'000, rng));
    }
    const auto cert = check_known_solution(b, default_config(b.problem), 1000, 9);
    CHECK(cert.passed);
  }
}

TEST_CASE("scalar generated instance") {
  const auto b = generate_instance(1, 1, 1, 1, 7, false);
  CHECK(b.problem.d1() == 1);
  CHECK(b.problem.d2() == 1);
  const auto config = default_config(b.problem);
  const Vector zero = Vector::Zero(1);
  const auto y = prox_step(b.problem.f[0], zero, config.lambda, b.problem.c);
  CHECK(y.point.norm() <= 1e-8);
  const auto w = resolvent(b.problem.big_f[0], 1.0, zero, b.problem.q);
  CHECK(w.point.norm() <= 1e-8);
  CHECK(check_known_solution(b, config, 1000, 1).passed);
}

TEST_CASE("generator is deterministic") {
  const auto a = dump_problem(generate_instance(3, 2, 4, 3, 7, true));
  const auto b = dump_problem(generate_instance(3, 2, 4, 3, 7, true));
  const auto c = dump_problem(generate_instance(3, 2, 4, 3, 8, true));
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("unique instances have a single EP point on the grid") {
  // Generated boxes contain [-1, 1]^2, and a solution of EP(f, C) inside the
  // square also solves EP(f, square); a 201-point grid puts 0 on the grid.
  const ConvexSet square = make_box(Vector::Constant(2, -1.0), Vector::Constant(2, 1.0));
  for (std::uint64_t seed : {1u, 2u}) {
    const auto b = generate_instance(1, 1, 2, 2, seed, true);
    const auto points = brute_force_ep(b.problem.f[0], square, 201, 1e-7);
    REQUIRE_FALSE(points.empty());
    for (const auto& p : points) CHECK(p.norm() <= 1e-2);
  }
}

TEST_CASE("brute force EP oracle") {
  const Bifunction scalar = make_bilinear(Matrix::Identity(1, 1), Matrix::Zero(1, 1),
                                          Vector::Zero(1));
  const ConvexSet unit = make_box(Vector::Constant(1, -1.0), Vector::Constant(1, 1.0));
  // f(x,y) = (y - x) x; the grid slack 10/201 admits a small neighbourhood.
  const auto near_zero = brute_force_ep(scalar, unit, 201);
  REQUIRE_FALSE(near_zero.empty());
  for (const auto& p : near_zero) CHECK(std::abs(p[0]) <= 0.25);
  const auto exact = brute_force_ep(scalar, unit, 201, 1e-12);
  REQUIRE(exact.size() == 1);
  CHECK(exact[0][0] == doctest::Approx(0.0));

  const Bifunction zero = make_affine(Matrix::Zero(2, 2), Vector::Zero(2));
  const ConvexSet square = make_box(Vector::Zero(2), Vector::Ones(2));
  CHECK(brute_force_ep(zero, square, 11).size() == 121);
  CHECK_THROWS(brute_force_ep(zero, make_box(Vector::Zero(3), Vector::Ones(3)), 4));
}

TEST_CASE("problem files round-trip bit-exactly") {
  const auto b = generate_instance(3, 2, 4, 3, 77, true);
  const std::string text = dump_problem(b);
  const auto back = parse_problem(text);
  CHECK(dump_problem(back) == text);
  CHECK(back.problem.a.matrix() == b.problem.a.matrix());
  for (std::size_t i = 0; i < b.problem.f.size(); ++i) {
    CHECK(back.problem.f[i].form()->p == b.problem.f[i].form()->p);
    CHECK(back.problem.f[i].form()->q == b.problem.f[i].form()->q);
  }
  CHECK(trace_of(back, 10) == trace_of(b, 10));

  const auto path = std::filesystem::temp_directory_path() / "spliteq_roundtrip.json";
  save_problem(b, path.string());
  CHECK(dump_problem(load_problem(path.string())) == text);
  std::filesystem::remove(path);
}

TEST_CASE("parse errors name the field") {
  auto expect_parse = [](nlohmann::json doc, const std::string& field) {
    CAPTURE(field);
    try {
      parse_problem(doc.dump());
      FAIL("accepted");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find(field) != std::string::npos);
    }
  };
  auto doc = scalar_doc();
  CHECK_NOTHROW(parse_problem(doc.dump()));

  auto no_f = doc;
  no_f["f"] = nlohmann::json::array();
  expect_parse(no_f, "f");

  auto no_big_f = doc;
  no_big_f.erase("F");
  expect_parse(no_big_f, "F");

  auto bad_version = doc;
  bad_version["version"] = 2;
  expect_parse(bad_version, "version");

  auto bad_entry = doc;
  bad_entry["f"][0]["P"][0][0] = "one";
  expect_parse(bad_entry, "f[0].P");

  auto bad_kind = doc;
  bad_kind["C"]["kind"] = "torus";
  expect_parse(bad_kind, "C");

  CHECK_THROWS_AS(parse_problem("{not json"), ParseError);
}

TEST_CASE("validation errors") {
  auto doc = scalar_doc();
  auto not_monotone = doc;
  not_monotone["F"][0]["M"][0][0] = -0.5;
  try {
    parse_problem(not_monotone.dump());
    FAIL("accepted");
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("F[0]") != std::string::npos);
    CHECK(msg.find("-0.5") != std::string::npos);
  }

  auto nonconvex = doc;
  nonconvex["f"][0]["Q"][0][0] = -1;
  CHECK_THROWS_AS(parse_problem(nonconvex.dump()), ValidationError);

  auto inverted = doc;
  inverted["C"]["lo"][0] = 2;
  CHECK_THROWS_AS(parse_problem(inverted.dump()), ValidationError);
}

TEST_CASE("other set kinds round-trip") {
  auto doc = scalar_doc();
  doc["d1"] = 2;
  doc["A"] = {{1, 0}};
  doc["C"] = {{"kind", "ball"}, {"center", {0, 0}}, {"radius", 2}};
  doc["f"][0] = {{"P", {{1, 0}, {0, 1}}}, {"Q", {{0, 0}, {0, 0}}}, {"q", {0, 0}}};
  doc["known_solution"] = {0, 0};
  const auto ball = parse_problem(doc.dump());
  CHECK(ball.problem.c.kind() == SetKind::kBall);
  CHECK(dump_problem(parse_problem(dump_problem(ball))) == dump_problem(ball));

  doc["C"] = {{"kind", "simplex"}};
  doc.erase("known_solution");
  CHECK(parse_problem(doc.dump()).problem.c.kind() == SetKind::kSimplex);
  doc["C"] = {{"kind", "whole-space"}};
  CHECK(parse_problem(doc.dump()).problem.c.kind() == SetKind::kWholeSpace);
  doc["C"] = {{"kind", "halfspace"}, {"normal", {1, 1}}, {"offset", 0.5}};
  CHECK(parse_problem(doc.dump()).problem.c.kind() == SetKind::kHalfspace);
}
