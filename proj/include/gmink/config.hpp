#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gmink/chart.hpp"
#include "gmink/flow.hpp"
#include "gmink/gaussmeas.hpp"
#include "gmink/newton.hpp"

namespace gmink {

struct DensityConfig {
  std::string preset = "constant";  // constant | fourier | ball_density | table | atoms
  double value = 0.04;              // constant
  double total = 0.3;               // fourier
  std::vector<double> cos_coefs;    // fourier: entry k-1 multiplies cos k theta
  std::vector<double> sin_coefs;    // fourier
  double radius = 1.0;              // ball_density
  std::filesystem::path table;      // table
  std::vector<std::pair<Vec3, double>> atoms;  // atoms: direction, mass
  std::optional<double> smooth_width;
};

struct BodyConfig {
  std::filesystem::path path;
  double density_scale = 1.0;  // chart-check compares against scale * density
};

struct ChartConfig {
  double tau1 = 0.8;
  double spacing = 1.0 / 32.0;
  int poles = 8;
  int refinements = 3;
};

struct VerifyConfig {
  std::size_t mc_samples = 1'000'000;
  int mc_seeds = 50;
  int perturbations = 5;
};

struct RunConfig {
  int dim = 2;
  int resolution = 256;
  std::uint64_t seed = 0;
  std::string solver = "newton";  // flow | newton | both
  std::filesystem::path out = "gmink-out";
  std::optional<DensityConfig> density;
  std::optional<BodyConfig> body;
  FlowConfig flow;
  HomotopyConfig newton;
  ChartConfig chart;
  VerifyConfig verify;
  std::size_t history_stride = 100;

  void validate() const;
};

// Unknown keys, wrong types and out-of-range values are rejected with
// Error(InvalidArgument). Relative paths resolve against base_dir.
RunConfig parse_config(const std::string& toml_text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

// Builds mu on the grid, smoothing when requested (always for atoms).
MeasureSpec build_measure(const DensityConfig& d, const GridPtr& grid);

}  // namespace gmink
