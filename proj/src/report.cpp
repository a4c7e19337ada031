#include "pimex/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace pimex {

using nlohmann::json;

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

json gradient_report(const GradientResult& g, const std::string& scheme, double dt) {
  return json{{"scheme", scheme}, {"dt", dt}, {"J", g.J}, {"grad", to_std(g.grad)},
              {"method", g.method}};
}

json tableau_report_json(const TableauReport& report) {
  json checks = json::array();
  for (const auto& c : report.checks)
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"defect", c.defect}});
  return json{{"scheme", report.scheme}, {"all_passed", report.all_passed()}, {"checks", checks}};
}

std::string trace_csv(const OptimizationTrace& trace) {
  CsvTable t;
  t.header.push_back("iter");
  const Index n = trace.iterates.empty() ? 0 : trace.iterates.front().mu.size();
  for (Index k = 0; k < n; ++k) t.header.push_back("mu_" + std::to_string(k));
  t.header.insert(t.header.end(), {"J", "pg_norm", "step"});
  for (const auto& it : trace.iterates) {
    std::vector<double> row{static_cast<double>(it.iter)};
    for (Index k = 0; k < n; ++k) row.push_back(it.mu(k));
    row.insert(row.end(), {it.J, it.pg_norm, it.step});
    t.rows.push_back(std::move(row));
  }
  return t.str();
}

json trace_json(const OptimizationTrace& trace) {
  json arr = json::array();
  for (const auto& it : trace.iterates) {
    arr.push_back({{"iter", it.iter},
                   {"mu", to_std(it.mu)},
                   {"J", it.J},
                   {"grad", to_std(it.grad)},
                   {"pg_norm", it.pg_norm},
                   {"step", it.step},
                   {"method", it.method}});
  }
  return arr;
}

std::string CsvTable::str() const {
  std::ostringstream out;
  for (size_t k = 0; k < header.size(); ++k) out << (k ? "," : "") << header[k];
  out << '\n';
  for (const auto& row : rows) {
    for (size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << num(row[k]);
    out << '\n';
  }
  return out.str();
}

std::string json_vector(const Vector& v) { return json(to_std(v)).dump(); }

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw FormatError("write to '" + path.string() + "' failed");
}

void write_json(const std::filesystem::path& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

}  // namespace pimex
