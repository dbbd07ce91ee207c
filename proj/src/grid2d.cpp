#include "qvar/grid2d.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "qvar/estimator.hpp"
#include "qvar/sequence.hpp"
#include "qvar/simulate.hpp"
#include "qvar/util.hpp"

namespace qvar {

namespace {

void validate(const Grid2D& grid) {
  if (grid.nx < 2 || grid.ny < 2) throw std::invalid_argument("grid must be at least 2x2");
  if (!(grid.step_x > 0) || !(grid.step_y > 0))
    throw std::invalid_argument("grid steps must be > 0");
  if (grid.values.rows() != grid.ny || grid.values.cols() != grid.nx)
    throw std::invalid_argument("grid value matrix does not match nx/ny");
}

// Mean C estimate over all lines in one direction; each line is a 1-D
// series with local behavior (D=0, s=1, C = sigma2 * theta).
double mean_line_estimate(const Eigen::MatrixXd& values, bool along_rows, double delta) {
  const VariationSequence a = elementary(1);
  const int lines = along_rows ? static_cast<int>(values.rows()) : static_cast<int>(values.cols());
  const int len = along_rows ? static_cast<int>(values.cols()) : static_cast<int>(values.rows());
  std::vector<double> C(static_cast<std::size_t>(lines));
  parallel_for(lines, thread_budget(), [&](int k) {
    PathSample line;
    line.delta = delta;
    line.values.resize(static_cast<std::size_t>(len));
    for (int t = 0; t < len; ++t)
      line.values[static_cast<std::size_t>(t)] = along_rows ? values(k, t) : values(t, k);
    C[static_cast<std::size_t>(k)] =
        estimate_C(line, a, 0, 1.0, DenominatorMode::UnbiasedNPrime).C_hat;
  });
  double sum = 0.0;
  for (double c : C) sum += c;
  return sum / lines;
}

Eigen::MatrixXd exp_corr_factor(int n, double theta, double step) {
  Eigen::MatrixXd K(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      double v = std::exp(-theta * (i - j) * step);
      K(i, j) = v;
      K(j, i) = v;
    }
  Eigen::LLT<Eigen::MatrixXd> llt(K);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("simulate_separable: axis correlation factorization failed");
  return llt.matrixL();
}

}  // namespace

Grid2D Grid2D::transposed() const {
  Grid2D out;
  out.nx = ny;
  out.ny = nx;
  out.step_x = step_y;
  out.step_y = step_x;
  out.values = values.transpose();
  return out;
}

Separable2DEstimate estimate_separable(const Grid2D& grid) {
  validate(grid);
  Separable2DEstimate est;
  const double m = grid.values.mean();
  est.sigma2_hat = (grid.values.array() - m).square().mean();
  est.C1_hat = mean_line_estimate(grid.values, /*along_rows=*/true, grid.step_x);
  est.C2_hat = mean_line_estimate(grid.values, /*along_rows=*/false, grid.step_y);
  if (est.sigma2_hat <= 0.0) {
    est.degenerate = true;
    est.theta1_hat = std::numeric_limits<double>::quiet_NaN();
    est.theta2_hat = std::numeric_limits<double>::quiet_NaN();
    est.warning = "constant grid: sigma2_hat = 0, theta estimates undefined";
    return est;
  }
  est.theta1_hat = est.C1_hat / est.sigma2_hat;
  est.theta2_hat = est.C2_hat / est.sigma2_hat;
  est.near_independence_x = est.theta1_hat >= 0.9 / grid.step_x;
  est.near_independence_y = est.theta2_hat >= 0.9 / grid.step_y;
  if (est.near_independence_x || est.near_independence_y)
    est.warning = "theta estimate at or beyond the grid resolution scale: "
                  "the field is nearly independent at this step";
  return est;
}

Grid2D simulate_separable(const SeparableExpModel& model, int nx, int ny, double step_x,
                          double step_y, std::uint64_t seed) {
  if (nx < 2 || ny < 2) throw std::invalid_argument("simulate_separable: grid must be >= 2x2");
  if (!(step_x > 0) || !(step_y > 0))
    throw std::invalid_argument("simulate_separable: steps must be > 0");
  if (model.sigma2 < 0 || !(model.theta1 > 0) || !(model.theta2 > 0))
    throw std::invalid_argument("simulate_separable: sigma2 >= 0 and thetas > 0 required");
  Grid2D grid;
  grid.nx = nx;
  grid.ny = ny;
  grid.step_x = step_x;
  grid.step_y = step_y;
  if (model.sigma2 == 0.0) {
    grid.values = Eigen::MatrixXd::Constant(ny, nx, model.mu);
    return grid;
  }
  Eigen::MatrixXd L1 = exp_corr_factor(nx, model.theta1, step_x);
  Eigen::MatrixXd L2 = exp_corr_factor(ny, model.theta2, step_y);
  std::vector<double> z = normal_vector(seed, nx * ny);
  Eigen::MatrixXd Z(ny, nx);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) Z(j, i) = z[static_cast<std::size_t>(j) * nx + i];
  grid.values = model.mu + std::sqrt(model.sigma2) * (L2 * Z * L1.transpose()).array();
  return grid;
}

Grid2D parse_grid(const std::string& csv_text, double step_x, double step_y) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(csv_text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        throw std::invalid_argument("grid row " + std::to_string(line_no) +
                                    ": non-numeric cell '" + cell + "'");
      }
      while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
      if (used != cell.size())
        throw std::invalid_argument("grid row " + std::to_string(line_no) +
                                    ": non-numeric cell '" + cell + "'");
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::invalid_argument("grid row " + std::to_string(line_no) + ": expected " +
                                  std::to_string(rows.front().size()) + " cells, got " +
                                  std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument("grid file contains no data rows");
  Grid2D grid;
  grid.ny = static_cast<int>(rows.size());
  grid.nx = static_cast<int>(rows.front().size());
  grid.step_x = step_x;
  grid.step_y = step_y;
  grid.values.resize(grid.ny, grid.nx);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i)
      grid.values(j, i) = rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
  validate(grid);
  return grid;
}

Grid2D ingest_grid(const std::string& path, double step_x, double step_y) {
  std::ifstream file(path);
  if (!file) throw std::invalid_argument("cannot open grid file: " + path);
  std::ostringstream buf;
  buf << file.rdbuf();
  return parse_grid(buf.str(), step_x, step_y);
}

std::string grid_to_csv(const Grid2D& grid) {
  std::ostringstream out;
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      if (i) out << ',';
      out << format_double(grid.values(j, i));
    }
    out << '\n';
  }
  return out.str();
}

nlohmann::json estimate_to_json(const Separable2DEstimate& est) {
  nlohmann::json j;
  j["sigma2_hat"] = est.sigma2_hat;
  j["C1_hat"] = est.C1_hat;
  j["C2_hat"] = est.C2_hat;
  j["theta1_hat"] = est.theta1_hat;
  j["theta2_hat"] = est.theta2_hat;
  j["degenerate"] = est.degenerate;
  j["near_independence_x"] = est.near_independence_x;
  j["near_independence_y"] = est.near_independence_y;
  j["warning"] = est.warning;
  return j;
}

}  // namespace qvar
