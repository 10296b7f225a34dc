#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "nlohmann/json_fwd.hpp"

#include "cgthermo/coarse.hpp"
#include "cgthermo/dynamics.hpp"
#include "cgthermo/tpm.hpp"

namespace cgthermo::io {

// 17 significant digits: doubles survive a text round trip unchanged.
std::string format_double(double x);

// Minimal CSV table writer with stable headers and '.' decimals.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> columns);
  void add_row(const std::vector<double>& values);
  std::string str() const;
  void write(const std::filesystem::path& path) const;
  size_t row_count() const { return rows_.size(); }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<double>> rows_;
};

// Matrix as a dim x dim CSV grid (one part per file).
void write_matrix_csv(const ComplexMatrix& m, bool imaginary_part,
                      const std::filesystem::path& path);

nlohmann::json partition_to_json(const SlotPartition& partition,
                                 const std::vector<double>& energies, double beta);
SlotPartition partition_from_json(const nlohmann::json& j);

nlohmann::json protocol_to_json(const Protocol& p);
Protocol protocol_from_json(const nlohmann::json& j);

nlohmann::json work_distribution_to_json(const WorkDistribution& d);
nlohmann::json ft_report_to_json(const FTReport& r);

void write_json(const nlohmann::json& j, const std::filesystem::path& path);

// Single-panel SVG line plot of (x, y) series; one polyline per series.
struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};
void write_svg_plot(const std::vector<SvgSeries>& series, const std::string& x_label,
                    const std::string& y_label, const std::filesystem::path& path);

}  // namespace cgthermo::io
