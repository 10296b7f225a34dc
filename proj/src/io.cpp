#include "cgthermo/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "nlohmann/json.hpp"

namespace cgthermo::io {

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

CsvWriter::CsvWriter(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void CsvWriter::add_row(const std::vector<double>& values) {
  if (values.size() != columns_.size()) {
    throw std::invalid_argument("CsvWriter: row width differs from header");
  }
  rows_.push_back(values);
}

std::string CsvWriter::str() const {
  std::ostringstream out;
  for (size_t i = 0; i < columns_.size(); ++i) {
    out << (i ? "," : "") << columns_[i];
  }
  out << "\n";
  for (const auto& row : rows_) {
    for (size_t i = 0; i < row.size(); ++i) {
      out << (i ? "," : "") << format_double(row[i]);
    }
    out << "\n";
  }
  return out.str();
}

void CsvWriter::write(const std::filesystem::path& path) const {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("CsvWriter: cannot open " + path.string());
  f << str();
}

void write_matrix_csv(const ComplexMatrix& m, bool imaginary_part,
                      const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_matrix_csv: cannot open " + path.string());
  for (int r = 0; r < m.dim(); ++r) {
    for (int c = 0; c < m.dim(); ++c) {
      double v = imaginary_part ? m(r, c).imag() : m(r, c).real();
      f << (c ? "," : "") << format_double(v);
    }
    f << "\n";
  }
}

nlohmann::json partition_to_json(const SlotPartition& partition,
                                 const std::vector<double>& energies, double beta) {
  nlohmann::json j;
  if (partition.delta_eps) {
    j["delta_eps"] = *partition.delta_eps;
  } else {
    j["delta_eps"] = nullptr;
  }
  nlohmann::json slots = nlohmann::json::array();
  for (const auto& r : partition.slots) slots.push_back({r.lo, r.hi});
  j["slots"] = slots;
  j["energies"] = energies;
  j["beta"] = beta;
  j["source_spectrum"] = partition.source_spectrum;
  return j;
}

SlotPartition partition_from_json(const nlohmann::json& j) {
  SlotPartition p;
  if (!j.at("delta_eps").is_null()) p.delta_eps = j.at("delta_eps").get<double>();
  for (const auto& s : j.at("slots")) {
    p.slots.push_back({s.at(0).get<int>(), s.at(1).get<int>()});
    p.multiplicities.push_back(p.slots.back().size());
  }
  p.source_spectrum = j.at("source_spectrum").get<std::vector<double>>();
  return p;
}

namespace {

nlohmann::json matrix_to_json(const ComplexMatrix& m) {
  nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
  for (int r = 0; r < m.dim(); ++r) {
    nlohmann::json rrow = nlohmann::json::array(), irow = nlohmann::json::array();
    for (int c = 0; c < m.dim(); ++c) {
      rrow.push_back(m(r, c).real());
      irow.push_back(m(r, c).imag());
    }
    re.push_back(rrow);
    im.push_back(irow);
  }
  return nlohmann::json{{"dim", m.dim()}, {"real", re}, {"imag", im}};
}

ComplexMatrix matrix_from_json(const nlohmann::json& j) {
  const int n = j.at("dim").get<int>();
  ComplexMatrix m(n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      m(r, c) = cplx(j.at("real")[r][c].get<double>(), j.at("imag")[r][c].get<double>());
    }
  }
  return m;
}

}  // namespace

nlohmann::json protocol_to_json(const Protocol& p) {
  nlohmann::json segs = nlohmann::json::array();
  for (const auto& s : p.segments()) {
    segs.push_back({{"hamiltonian", matrix_to_json(s.hamiltonian.matrix())},
                    {"duration", s.duration}});
  }
  return nlohmann::json{{"hbar", p.hbar()},
                        {"initial_hamiltonian", matrix_to_json(p.initial_hamiltonian().matrix())},
                        {"segments", segs}};
}

Protocol protocol_from_json(const nlohmann::json& j) {
  std::vector<ProtocolSegment> segs;
  for (const auto& s : j.at("segments")) {
    segs.push_back({HermitianOperator(matrix_from_json(s.at("hamiltonian"))),
                    s.at("duration").get<double>()});
  }
  HermitianOperator h0(matrix_from_json(j.at("initial_hamiltonian")));
  return Protocol(std::move(h0), std::move(segs), j.at("hbar").get<double>());
}

nlohmann::json work_distribution_to_json(const WorkDistribution& d) {
  nlohmann::json atoms = nlohmann::json::array();
  for (const auto& a : d.atoms) atoms.push_back({{"w", a.w}, {"p", a.p}});
  return nlohmann::json{{"atoms", atoms}, {"merge_tolerance", d.merge_tolerance}};
}

nlohmann::json ft_report_to_json(const FTReport& r) {
  return nlohmann::json{{"jarzynski_value", r.jarzynski_value},
                        {"max_crooks_log_residual", r.max_crooks_log_residual},
                        {"atom_work", r.atom_work},
                        {"log_residuals", r.log_residuals},
                        {"delta_f_estimates", r.delta_f_estimates},
                        {"one_sided_atoms", r.one_sided_atoms},
                        {"crooks_pass", r.crooks_pass},
                        {"jarzynski_pass", r.jarzynski_pass}};
}

void write_json(const nlohmann::json& j, const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_json: cannot open " + path.string());
  f << j.dump(2) << "\n";
}

void write_svg_plot(const std::vector<SvgSeries>& series, const std::string& x_label,
                    const std::string& y_label, const std::filesystem::path& path) {
  constexpr double width = 720, height = 480, margin = 60;
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool first = true;
  for (const auto& s : series) {
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (first) {
        xmin = xmax = s.x[i];
        ymin = ymax = s.y[i];
        first = false;
      }
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  auto px = [&](double x) { return margin + (x - xmin) / (xmax - xmin) * (width - 2 * margin); };
  auto py = [&](double y) { return height - margin - (y - ymin) / (ymax - ymin) * (height - 2 * margin); };

  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b"};
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_svg_plot: cannot open " + path.string());
  f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
    << height << "\">\n";
  f << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  f << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\""
    << width - margin << "\" y2=\"" << height - margin << "\" stroke=\"black\"/>\n";
  f << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin
    << "\" y2=\"" << height - margin << "\" stroke=\"black\"/>\n";
  f << "<text x=\"" << width / 2 << "\" y=\"" << height - margin / 3
    << "\" text-anchor=\"middle\" font-size=\"14\">" << x_label << "</text>\n";
  f << "<text x=\"" << margin / 3 << "\" y=\"" << height / 2
    << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 " << margin / 3
    << " " << height / 2 << ")\">" << y_label << "</text>\n";
  for (size_t s = 0; s < series.size(); ++s) {
    const char* color = palette[s % 6];
    f << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (size_t i = 0; i < series[s].x.size(); ++i) {
      f << px(series[s].x[i]) << "," << py(series[s].y[i]) << " ";
    }
    f << "\"/>\n";
    for (size_t i = 0; i < series[s].x.size(); ++i) {
      f << "<circle cx=\"" << px(series[s].x[i]) << "\" cy=\"" << py(series[s].y[i])
        << "\" r=\"2\" fill=\"" << color << "\"/>\n";
    }
    f << "<text x=\"" << width - margin + 5 << "\" y=\"" << margin + 16 * s
      << "\" font-size=\"12\" fill=\"" << color << "\" text-anchor=\"end\">"
      << series[s].label << "</text>\n";
  }
  f << "</svg>\n";
}

}  // namespace cgthermo::io
