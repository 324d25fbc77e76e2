#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "icbf/safety.hpp"
#include "icbf/simulation.hpp"

namespace icbf {

/// Columns: t, then per agent v_i, s_i, X_i, Y_i, u_nom_i, u_i, then one
/// column per barrier. Numbers are printed with 17 significant digits so a
/// rerun of the same scenario reproduces the file byte for byte.
void write_trace_csv(std::ostream& out, const SimTrace& trace);
void write_trace_csv(const std::filesystem::path& path, const SimTrace& trace);

/// Inverse of write_trace_csv. QP diagnostics are not stored; records come
/// back with qp_known = false.
SimTrace read_trace_csv(std::istream& in);
SimTrace read_trace_csv(const std::filesystem::path& path);

std::string report_to_json(const SafetyReport& report, const VerifyTolerances& tol = {});
void write_report_json(const std::filesystem::path& path, const SafetyReport& report,
                       const VerifyTolerances& tol = {});

}  // namespace icbf
