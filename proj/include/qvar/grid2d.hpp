#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

namespace qvar {

/// Regular rectangular grid of observations; values(j, i) is the sample at
/// (x, y) = (i * step_x, j * step_y).
struct Grid2D {
  int nx = 0, ny = 0;
  double step_x = 0.0, step_y = 0.0;
  Eigen::MatrixXd values;  // ny x nx

  Grid2D transposed() const;
};

/// Separable exponential field:
/// Cov = sigma2 * exp(-theta1 |x - x'|) * exp(-theta2 |y - y'|), mean mu.
struct SeparableExpModel {
  double sigma2 = 1.0;
  double theta1 = 1.0;
  double theta2 = 1.0;
  double mu = 0.0;
};

struct Separable2DEstimate {
  double sigma2_hat = 0.0;
  double C1_hat = 0.0, C2_hat = 0.0;
  double theta1_hat = 0.0, theta2_hat = 0.0;
  bool degenerate = false;           // constant grid, thetas undefined (NaN)
  bool near_independence_x = false;  // theta1_hat >= 0.9 / step_x
  bool near_independence_y = false;
  std::string warning;
};

/// Four-step moment pipeline: (1) variance from the mean-centered squares,
/// (2) scale C1 averaged over the x-direction lines, (3) same for C2 along
/// y, (4) theta_i = C_i / sigma2. Lines are estimated with the order-1
/// elementary sequence at D=0, s=1 and the unbiased n' denominator.
Separable2DEstimate estimate_separable(const Grid2D& grid);

/// Exact draw via the Kronecker structure: one Cholesky factor per axis
/// applied to an ny x nx standard normal matrix, scaled by sigma, plus mu.
Grid2D simulate_separable(const SeparableExpModel& model, int nx, int ny, double step_x,
                          double step_y, std::uint64_t seed);

/// Rectangular numeric CSV (one grid row per line); errors name the
/// offending row for ragged or non-numeric input.
Grid2D ingest_grid(const std::string& path, double step_x, double step_y);
Grid2D parse_grid(const std::string& csv_text, double step_x, double step_y);

std::string grid_to_csv(const Grid2D& grid);
nlohmann::json estimate_to_json(const Separable2DEstimate& est);

}  // namespace qvar
