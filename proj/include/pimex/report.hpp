#pragma once

#include "pimex/optimize.hpp"
#include "pimex/tableaux.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace pimex {

/// {scheme, dt, J, grad, method}
nlohmann::json gradient_report(const GradientResult& g, const std::string& scheme, double dt);

nlohmann::json tableau_report_json(const TableauReport& report);

/// Header row then one row per iterate: iter, mu_0.., J, pg_norm, step.
std::string trace_csv(const OptimizationTrace& trace);
nlohmann::json trace_json(const OptimizationTrace& trace);

/// Simple CSV table with full-precision numbers.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::string str() const;
};

std::string json_vector(const Vector& v);
void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace pimex
