// SPDX-License-Identifier: Apache-2.0
//
// Problem file (JSON, version 1):
//   { "version": 1, "d1": int, "d2": int, "A": [[...]],
//     "C": {"kind": "box", "lo": [...], "hi": [...]}, "Q": {...},
//     "f": [{"P": [[...]], "Q": [[...]], "q": [...]}, ...],
//     "F": [{"M": [[...]], "b": [...]}, ...],
//     "known_solution": [...] | null, "seed": int }
// Set kinds: box, ball (center, radius), simplex (dim), halfspace
// (normal, offset), whole-space (dim). Doubles are written in the shortest
// representation that round-trips.

#include "core/problems.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace spliteq {
namespace {

using json = nlohmann::json;

[[noreturn]] void bad(const std::string& field, const std::string& what) {
  throw ParseError("problem file: field '" + field + "' " + what);
}

const json& member(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) bad(path, "must be an object");
  auto it = obj.find(key);
  if (it == obj.end()) bad(path.empty() ? key : path + "." + key, "is missing");
  return *it;
}

std::string join(const std::string& path, const char* key) {
  return path.empty() ? key : path + "." + key;
}

double number(const json& v, const std::string& field) {
  if (!v.is_number()) bad(field, "must be a number");
  return v.get<double>();
}

std::int64_t integer(const json& v, const std::string& field) {
  if (!v.is_number_integer()) bad(field, "must be an integer");
  return v.get<std::int64_t>();
}

Vector vector_of(const json& v, const std::string& field, Eigen::Index expected) {
  if (!v.is_array()) bad(field, "must be an array of numbers");
  if (expected >= 0 && static_cast<Eigen::Index>(v.size()) != expected) {
    throw ValidationError("problem file: field '" + field + "' has length " +
                          std::to_string(v.size()) + ", expected " +
                          std::to_string(expected));
  }
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t k = 0; k < v.size(); ++k) {
    out[static_cast<Eigen::Index>(k)] =
        number(v[k], field + "[" + std::to_string(k) + "]");
  }
  return out;
}

Matrix matrix_of(const json& v, const std::string& field, Eigen::Index rows,
                 Eigen::Index cols) {
  if (!v.is_array()) bad(field, "must be an array of rows");
  if (static_cast<Eigen::Index>(v.size()) != rows) {
    throw ValidationError("problem file: field '" + field + "' has " +
                          std::to_string(v.size()) + " rows, expected " +
                          std::to_string(rows));
  }
  Matrix out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const std::string row = field + "[" + std::to_string(i) + "]";
    out.row(i) = vector_of(v[static_cast<std::size_t>(i)], row, cols).transpose();
  }
  return out;
}

SetSpec set_of(const json& v, const std::string& field, Eigen::Index dim) {
  const json& kind_v = member(v, "kind", field);
  if (!kind_v.is_string()) bad(join(field, "kind"), "must be a string");
  const auto kind = kind_v.get<std::string>();
  if (kind == "box") {
    return BoxSpec{vector_of(member(v, "lo", field), join(field, "lo"), dim),
                   vector_of(member(v, "hi", field), join(field, "hi"), dim)};
  }
  if (kind == "ball") {
    return BallSpec{vector_of(member(v, "center", field), join(field, "center"), dim),
                    number(member(v, "radius", field), join(field, "radius"))};
  }
  if (kind == "simplex") return SimplexSpec{dim};
  if (kind == "halfspace") {
    return HalfspaceSpec{
        vector_of(member(v, "normal", field), join(field, "normal"), dim),
        number(member(v, "offset", field), join(field, "offset"))};
  }
  if (kind == "whole-space") return WholeSpaceSpec{dim};
  bad(join(field, "kind"), "has unknown set kind '" + kind + "'");
}

json to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v[k]);
  return out;
}

json to_json(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(to_json(Vector(m.row(i).transpose())));
  return out;
}

json to_json(const SetSpec& spec) {
  return std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, BoxSpec>) {
          return {{"kind", "box"}, {"lo", to_json(s.lo)}, {"hi", to_json(s.hi)}};
        } else if constexpr (std::is_same_v<T, BallSpec>) {
          return {{"kind", "ball"}, {"center", to_json(s.center)}, {"radius", s.radius}};
        } else if constexpr (std::is_same_v<T, SimplexSpec>) {
          return {{"kind", "simplex"}};
        } else if constexpr (std::is_same_v<T, HalfspaceSpec>) {
          return {{"kind", "halfspace"}, {"normal", to_json(s.normal)}, {"offset", s.offset}};
        } else {
          return {{"kind", "whole-space"}};
        }
      },
      spec);
}

}  // namespace

InstanceBundle parse_problem(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("problem file: malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) bad("<root>", "must be an object");

  if (integer(member(doc, "version", ""), "version") != 1) {
    bad("version", "must be 1");
  }
  const auto d1 = integer(member(doc, "d1", ""), "d1");
  const auto d2 = integer(member(doc, "d2", ""), "d2");
  if (d1 < 1) bad("d1", "must be >= 1");
  if (d2 < 1) bad("d2", "must be >= 1");

  Matrix a = matrix_of(member(doc, "A", ""), "A", d2, d1);
  SetSpec c = set_of(member(doc, "C", ""), "C", d1);
  SetSpec q = set_of(member(doc, "Q", ""), "Q", d2);

  const json& fj = member(doc, "f", "");
  if (!fj.is_array()) bad("f", "must be an array");
  if (fj.empty()) bad("f", "must contain at least one bifunction (N >= 1)");
  std::vector<BilinearForm> f;
  for (std::size_t i = 0; i < fj.size(); ++i) {
    const std::string path = "f[" + std::to_string(i) + "]";
    f.push_back(BilinearForm{matrix_of(member(fj[i], "P", path), path + ".P", d1, d1),
                             matrix_of(member(fj[i], "Q", path), path + ".Q", d1, d1),
                             vector_of(member(fj[i], "q", path), path + ".q", d1)});
  }

  const json& bj = member(doc, "F", "");
  if (!bj.is_array()) bad("F", "must be an array");
  if (bj.empty()) bad("F", "must contain at least one bifunction (M >= 1)");
  std::vector<BilinearForm> big_f;
  for (std::size_t j = 0; j < bj.size(); ++j) {
    const std::string path = "F[" + std::to_string(j) + "]";
    big_f.push_back(BilinearForm{matrix_of(member(bj[j], "M", path), path + ".M", d2, d2),
                                 Matrix::Zero(d2, d2),
                                 vector_of(member(bj[j], "b", path), path + ".b", d2)});
  }

  std::optional<Vector> known;
  if (auto it = doc.find("known_solution"); it != doc.end() && !it->is_null()) {
    known = vector_of(*it, "known_solution", d1);
  }
  bool unique = false;
  if (auto it = doc.find("solution_unique"); it != doc.end()) {
    if (!it->is_boolean()) bad("solution_unique", "must be a boolean");
    unique = it->get<bool>();
  }
  std::uint64_t seed = 0;
  if (auto it = doc.find("seed"); it != doc.end()) {
    if (!it->is_number_integer()) bad("seed", "must be an integer");
    seed = it->get<std::uint64_t>();
  }

  return make_bundle(std::move(a), std::move(c), std::move(q), std::move(f),
                     std::move(big_f), std::move(known), unique, seed);
}

InstanceBundle load_problem(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("problem file: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_problem(buf.str());
}

std::string dump_problem(const InstanceBundle& bundle) {
  const SplitProblem& p = bundle.problem;
  for (const auto& fi : p.f) {
    if (!fi.form()) throw InvalidArgument("dump_problem: f without bilinear form");
  }
  for (const auto& fj : p.big_f) {
    if (!fj.form() || !fj.form()->linear_in_second()) {
      throw InvalidArgument("dump_problem: F without affine form");
    }
  }
  json doc;
  doc["version"] = 1;
  doc["d1"] = p.d1();
  doc["d2"] = p.d2();
  doc["A"] = to_json(p.a.matrix());
  doc["C"] = to_json(bundle.c_spec);
  doc["Q"] = to_json(bundle.q_spec);
  json f = json::array();
  for (const auto& fi : p.f) {
    const auto& form = *fi.form();
    f.push_back({{"P", to_json(form.p)}, {"Q", to_json(form.q)}, {"q", to_json(form.shift)}});
  }
  doc["f"] = std::move(f);
  json big = json::array();
  for (const auto& fj : p.big_f) {
    const auto& form = *fj.form();
    big.push_back({{"M", to_json(form.p)}, {"b", to_json(form.shift)}});
  }
  doc["F"] = std::move(big);
  doc["known_solution"] = bundle.known_solution ? to_json(*bundle.known_solution) : json(nullptr);
  doc["solution_unique"] = bundle.solution_unique;
  doc["seed"] = bundle.seed;
  return doc.dump(2) + "\n";
}

void save_problem(const InstanceBundle& bundle, const std::string& path) {
  const std::string text = dump_problem(bundle);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("save_problem: cannot write '" + path + "'");
  out << text;
  if (!out) throw std::runtime_error("save_problem: write failed for '" + path + "'");
}

}  // namespace spliteq
