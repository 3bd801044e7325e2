#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gmink/chart.hpp"
#include "gmink/report.hpp"
#include "gmink/sphere.hpp"

namespace gmink {

// index,x,y[,z],<value_name>; one row per grid node in node order.
void write_field_csv(const std::filesystem::path& path, const ScalarField& field,
                     const std::string& value_name = "value");
// Reads the format above; the value column may have any name. Throws Error(Io) when the file cannot be read and
// Error(InvalidArgument) when it is malformed or does not match the grid.
ScalarField read_field_csv(const std::filesystem::path& path, GridPtr grid);

// index,density
void write_density_table(const std::filesystem::path& path, const ScalarField& density);
ScalarField read_density_table(const std::filesystem::path& path, GridPtr grid);

// t,F,gamma,residual,min_h,max_h,lambda_min,lambda_max,tau; every stride-th
// row plus the last.
void write_history_csv(const std::filesystem::path& path, const std::vector<FlowHistoryRow>& rows,
                       std::size_t stride = 1);

// y1[,y2],v,residual
void write_chart_csv(const std::filesystem::path& path, const ChartResidual& chart);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace gmink
