// SPDX-License-Identifier: Apache-2.0

#include "core/report.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>

namespace spliteq {

std::string format_double(double v) {
  if (std::isnan(v)) return {};
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string trace_csv_header() {
  return "n,residual,dist_to_known_solution,norm_zbar_minus_x,"
         "norm_wbar_minus_Azbar,inner_iters_total,halfspace_count,elapsed_ms\n";
}

std::string trace_csv_row(const TraceRecord& r, bool timing) {
  std::string row;
  row += std::to_string(r.n);
  row += ',' + format_double(r.residual);
  row += ',' + format_double(r.dist_to_known_solution);
  row += ',' + format_double(r.norm_zbar_minus_x);
  row += ',' + format_double(r.norm_wbar_minus_azbar);
  row += ',' + std::to_string(r.inner_iterations);
  row += ',' + std::to_string(r.halfspace_count);
  row += ',' + (timing ? format_double(r.elapsed_ms) : std::string("0"));
  row += '\n';
  return row;
}

void write_trace_csv(const Trace& trace, std::ostream& out, bool timing) {
  out << trace_csv_header();
  for (const auto& r : trace.records) out << trace_csv_row(r, timing);
}

std::string solution_json(const Solution& s, const SolverConfig& config) {
  using nlohmann::json;
  auto vec = [](const Vector& v) {
    json a = json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(v[k]);
    return a;
  };
  json doc;
  doc["x"] = vec(s.x);
  doc["Az_bar"] = vec(s.az_bar);
  doc["w_bar"] = vec(s.w_bar);
  doc["status"] = to_string(s.status);
  doc["iterations"] = s.iterations;
  doc["residual"] = s.residual;
  doc["mode"] = to_string(s.mode);
  doc["start_projected"] = s.start_projected;
  doc["config"] = {
      {"lambda", config.lambda},
      {"mu", config.mu},
      {"r0", config.r_schedule ? config.r_schedule(0) : 0.0},
      {"r_min", config.r_min},
      {"max_iter", config.max_iter},
      {"tol_residual", config.tol_residual},
      {"inner_tol", config.inner_tol},
      {"inner_max_iter", config.inner_max_iter},
      {"workers", config.workers},
  };
  return doc.dump(2) + "\n";
}

}  // namespace spliteq
