#include "icbf/trace_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "icbf/errors.hpp"

namespace icbf {

namespace {

void put(std::ostream& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << ',' << buf;
}

double at_or_nan(const std::vector<double>& v, int i) {
  return static_cast<std::size_t>(i) < v.size() ? v[i] : std::numeric_limits<double>::quiet_NaN();
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_cell(const std::string& s, std::size_t line_no) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size())
    throw InvalidInput("trace line " + std::to_string(line_no) + ": bad number '" + s + "'");
  return v;
}

nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); }

}  // namespace

void write_trace_csv(std::ostream& out, const SimTrace& trace) {
  out << 't';
  for (int i = 1; i <= trace.agent_count; ++i) {
    const std::string id = std::to_string(i);
    out << ",v_" << id << ",s_" << id << ",X_" << id << ",Y_" << id << ",u_nom_" << id << ",u_" << id;
  }
  for (const std::string& name : trace.cbf_names) out << ',' << name;
  out << '\n';
  for (const StepRecord& rec : trace.steps) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", rec.t_s);
    out << buf;
    for (int i = 0; i < trace.agent_count; ++i) {
      put(out, rec.x.at(i).v_mps);
      put(out, rec.x.at(i).s_m);
      put(out, rec.position.at(i).x());
      put(out, rec.position.at(i).y());
      put(out, at_or_nan(rec.u_nom, i));
      put(out, at_or_nan(rec.u, i));
    }
    for (double h : rec.h) put(out, h);
    out << '\n';
  }
}

void write_trace_csv(const std::filesystem::path& path, const SimTrace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path.string());
  write_trace_csv(out, trace);
}

SimTrace read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput("trace is empty");
  const std::vector<std::string> header = split(line);
  if (header.empty() || header[0] != "t") throw InvalidInput("trace header must start with 't'");

  SimTrace trace;
  std::size_t col = 1;
  while (col + 5 < header.size() && header[col] == "v_" + std::to_string(trace.agent_count + 1)) {
    const std::string id = std::to_string(trace.agent_count + 1);
    if (header[col + 1] != "s_" + id || header[col + 2] != "X_" + id || header[col + 3] != "Y_" + id ||
        header[col + 4] != "u_nom_" + id || header[col + 5] != "u_" + id)
      throw InvalidInput("trace header: unexpected columns for agent " + id);
    ++trace.agent_count;
    col += 6;
  }
  if (trace.agent_count == 0) throw InvalidInput("trace header: no agent columns");
  for (; col < header.size(); ++col) {
    if (header[col].rfind("h_", 0) != 0) throw InvalidInput("trace header: unexpected column '" + header[col] + "'");
    trace.cbf_names.push_back(header[col]);
  }

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> cells = split(line);
    if (cells.size() != header.size())
      throw InvalidInput("trace line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                         " cells, got " + std::to_string(cells.size()));
    StepRecord rec;
    rec.t_s = parse_cell(cells[0], line_no);
    std::size_t c = 1;
    for (int i = 0; i < trace.agent_count; ++i) {
      AgentState x;
      x.v_mps = parse_cell(cells[c++], line_no);
      x.s_m = parse_cell(cells[c++], line_no);
      rec.x.push_back(x);
      const double X = parse_cell(cells[c++], line_no);
      const double Y = parse_cell(cells[c++], line_no);
      rec.position.emplace_back(X, Y);
      rec.u_nom.push_back(parse_cell(cells[c++], line_no));
      rec.u.push_back(parse_cell(cells[c++], line_no));
    }
    for (; c < cells.size(); ++c) rec.h.push_back(parse_cell(cells[c], line_no));
    trace.steps.push_back(std::move(rec));
  }
  return trace;
}

SimTrace read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open " + path.string());
  return read_trace_csv(in);
}

std::string report_to_json(const SafetyReport& report, const VerifyTolerances& tol) {
  nlohmann::json j;
  j["scenario"] = report.scenario;
  j["clean"] = report.clean();
  j["steps"] = report.steps;
  j["aborted"] = report.aborted;
  j["abort_reason"] = report.abort_reason;
  j["tolerances"] = {{"h_floor", tol.h_floor}, {"comparison_slack", tol.comparison_slack}, {"input_tol", tol.input_tol}};
  j["counts"] = {{"h_violations", report.h_violations},
                 {"comparison_violations", report.comparison_violations},
                 {"input_violations", report.input_violations},
                 {"qp_failures", report.qp_failures},
                 {"qp_unknown", report.qp_unknown},
                 {"footprint_overlaps", report.obb.overlaps.size()}};
  nlohmann::json cbfs = nlohmann::json::array();
  for (const CbfSummary& s : report.cbfs) {
    cbfs.push_back({{"name", s.name},
                    {"min_h", finite_or_null(s.min_h)},
                    {"t_min_h", s.t_min_h},
                    {"min_comparison_margin", finite_or_null(s.min_comparison_margin)},
                    {"t_min_margin", s.t_min_margin}});
  }
  j["barriers"] = cbfs;
  j["footprint_oracle"] = {{"steps_checked", report.obb.steps_checked}, {"pair_checks", report.obb.pair_checks}};
  j["qp_time_ms"] = {{"mean", report.qp_time_mean_s * 1e3}, {"max", report.qp_time_max_s * 1e3}};
  j["failures"] = report.failures;
  return j.dump(2) + "\n";
}

void write_report_json(const std::filesystem::path& path, const SafetyReport& report, const VerifyTolerances& tol) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path.string());
  out << report_to_json(report, tol);
}

}  // namespace icbf
