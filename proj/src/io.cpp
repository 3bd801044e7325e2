#include "gmink/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gmink/error.hpp"

namespace gmink {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  return out;
}

std::vector<std::vector<std::string>> read_rows(const std::filesystem::path& path, const std::string& header) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::InvalidArgument, path.string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  // a trailing '*' matches any single column name
  const bool wild = !header.empty() && header.back() == '*';
  const std::string stem = wild ? header.substr(0, header.size() - 1) : header;
  const bool match = wild ? line.size() > stem.size() && line.compare(0, stem.size(), stem) == 0 &&
                                line.find(',', stem.size()) == std::string::npos
                          : line == header;
  if (!match)
    throw Error(ErrorCode::InvalidArgument, path.string() + ": expected header '" + header + "', got '" + line + "'");
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

double parse_number(const std::string& s, const std::filesystem::path& path, std::size_t row) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || !std::isfinite(v))
    throw Error(ErrorCode::InvalidArgument,
                path.string() + ": row " + std::to_string(row + 1) + ": bad number '" + s + "'");
  return v;
}

std::string coord_header(int dim) { return dim == 2 ? "index,x,y" : "index,x,y,z"; }

}  // namespace

void write_field_csv(const std::filesystem::path& path, const ScalarField& field, const std::string& value_name) {
  const DirectionGrid& g = field.grid();
  std::ofstream out = open_out(path);
  out << coord_header(g.dim()) << "," << value_name << "\n";
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec3& x = g.node(i);
    out << i << "," << fmt(x.x()) << "," << fmt(x.y());
    if (g.dim() == 3) out << "," << fmt(x.z());
    out << "," << fmt(field[i]) << "\n";
  }
}

ScalarField read_field_csv(const std::filesystem::path& path, GridPtr grid) {
  const int dim = grid->dim();
  const auto rows = read_rows(path, coord_header(dim) + ",*");
  if (rows.size() != grid->size())
    throw Error(ErrorCode::InvalidArgument, path.string() + ": expected " + std::to_string(grid->size()) +
                                                " rows for the configured grid, found " + std::to_string(rows.size()));
  std::vector<double> v(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& c = rows[r];
    if (c.size() != static_cast<std::size_t>(dim + 2))
      throw Error(ErrorCode::InvalidArgument, path.string() + ": row " + std::to_string(r + 1) + ": wrong column count");
    if (c[0] != std::to_string(r))
      throw Error(ErrorCode::InvalidArgument, path.string() + ": row " + std::to_string(r + 1) + ": index out of order");
    Vec3 x = Vec3::Zero();
    for (int k = 0; k < dim; ++k) x[k] = parse_number(c[static_cast<std::size_t>(k + 1)], path, r);
    if ((x - grid->node(r)).norm() > 1e-9)
      throw Error(ErrorCode::InvalidArgument,
                  path.string() + ": row " + std::to_string(r + 1) + ": direction does not match grid node");
    v[r] = parse_number(c.back(), path, r);
  }
  return ScalarField(std::move(grid), std::move(v));
}

void write_density_table(const std::filesystem::path& path, const ScalarField& density) {
  std::ofstream out = open_out(path);
  out << "index,density\n";
  for (std::size_t i = 0; i < density.size(); ++i) out << i << "," << fmt(density[i]) << "\n";
}

ScalarField read_density_table(const std::filesystem::path& path, GridPtr grid) {
  const auto rows = read_rows(path, "index,density");
  if (rows.size() != grid->size())
    throw Error(ErrorCode::InvalidArgument, path.string() + ": expected " + std::to_string(grid->size()) +
                                                " rows for the configured grid, found " + std::to_string(rows.size()));
  std::vector<double> v(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != 2 || rows[r][0] != std::to_string(r))
      throw Error(ErrorCode::InvalidArgument, path.string() + ": row " + std::to_string(r + 1) + ": malformed");
    v[r] = parse_number(rows[r][1], path, r);
  }
  return ScalarField(std::move(grid), std::move(v));
}

void write_history_csv(const std::filesystem::path& path, const std::vector<FlowHistoryRow>& rows,
                       std::size_t stride) {
  std::ofstream out = open_out(path);
  out << "t,F,gamma,residual,min_h,max_h,lambda_min,lambda_max,tau\n";
  if (stride == 0) stride = 1;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (k % stride != 0 && k + 1 != rows.size()) continue;
    const FlowHistoryRow& r = rows[k];
    out << fmt(r.t) << "," << fmt(r.F) << "," << fmt(r.gamma) << "," << fmt(r.residual) << "," << fmt(r.min_h)
        << "," << fmt(r.max_h) << "," << fmt(r.lambda_min) << "," << fmt(r.lambda_max) << "," << fmt(r.tau)
        << "\n";
  }
}

void write_chart_csv(const std::filesystem::path& path, const ChartResidual& chart) {
  const ChartField& f = chart.field;
  std::ofstream out = open_out(path);
  out << (f.dim == 2 ? "y1,v,residual\n" : "y1,y2,v,residual\n");
  for (std::size_t k = 0; k < f.y.size(); ++k) {
    out << fmt(f.y[k][0]);
    if (f.dim == 3) out << "," << fmt(f.y[k][1]);
    out << "," << fmt(f.v[k]) << ",";
    if (f.interior[k]) out << fmt(chart.pointwise[k]);
    out << "\n";
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out = open_out(path);
  out << text;
}

}  // namespace gmink
