// SPDX-License-Identifier: Apache-2.0
//
// Trace CSV and solution JSON export.

#ifndef SPLITEQ_CORE_REPORT_HPP
#define SPLITEQ_CORE_REPORT_HPP

#include "core/solver.hpp"

#include <ostream>
#include <string>

namespace spliteq {

// Shortest decimal that parses back to the same double; "" for NaN.
std::string format_double(double v);

// n,residual,dist_to_known_solution,norm_zbar_minus_x,norm_wbar_minus_Azbar,
// inner_iters_total,halfspace_count,elapsed_ms
std::string trace_csv_header();
// With timing off, elapsed_ms is written as 0 so traces compare bytewise.
std::string trace_csv_row(const TraceRecord& record, bool timing);
void write_trace_csv(const Trace& trace, std::ostream& out, bool timing);

std::string solution_json(const Solution& solution, const SolverConfig& config);

}  // namespace spliteq

#endif  // SPLITEQ_CORE_REPORT_HPP
