#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "mcb/model_id.hpp"
#include "mcb/rng.hpp"

namespace mcb {

enum class Penalty { Lasso, Scad };

inline constexpr double kDefaultScadA = 3.7;
// |beta_j| above this counts as selected.
inline constexpr double kSupportThreshold = 1e-8;

struct PenalizedFit {
  Eigen::VectorXd coeffs;
  double lambda = 0.0;
  std::size_t iterations = 0;  // full coordinate sweeps until convergence

  ModelId support() const;
};

// The least-squares objective in Gram form: (1/2) b'G b - c'b + const, with
// G = X'X / n and c = X'y / n. Coordinate descent needs nothing else.
struct QuadraticForm {
  Eigen::MatrixXd g;
  Eigen::VectorXd c;
};

QuadraticForm quadratic_form(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

double soft_threshold(double z, double t);

// argmin_b (v/2) b^2 - u b + penalty(|b|); v is the coordinate's curvature.
double lasso_update(double u, double v, double lambda);
// Fan-Li SCAD; requires v (a - 1) > 1 so the univariate problem is convex.
double scad_update(double u, double v, double lambda, double a);

struct CdOptions {
  double tolerance = 1e-7;       // max |step| < tolerance * (1 + ||b||_inf)
  std::size_t max_sweeps = 100000;
};

// Cyclic coordinate descent; `warm` (if nonempty) is the starting point.
// Throws ConvergenceError after max_sweeps.
PenalizedFit coordinate_descent(const QuadraticForm& form, Penalty penalty, double lambda,
                                double a, const Eigen::VectorXd& warm = {},
                                const CdOptions& options = {});

// Minimizes (2n)^-1 ||y - Xb||^2 + lambda ||b||_1.
PenalizedFit lasso_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda);
// Same loss with the SCAD penalty.
PenalizedFit scad_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda,
                      double a = kDefaultScadA);

// Largest |c_j| coordinate update at b = 0; for the lasso every lambda >= this
// gives the zero solution.
double lambda_max(const QuadraticForm& form);

// Descending log-spaced grid from lambda_max to ratio * lambda_max.
std::vector<double> lambda_grid(double lambda_max, std::size_t size, double ratio);

struct CvResult {
  double lambda_star = 0.0;
  std::size_t index = 0;           // position of lambda_star in grid
  PenalizedFit fit;                // refit on the full data at lambda_star
  std::vector<double> grid;
  std::vector<double> cv_error;    // mean held-out squared error per grid point
  // Grid points where some lane hit the sweep limit; their cv_error is +inf
  // so they can never be chosen.
  std::size_t unconverged = 0;
};

struct CvSpec {
  Penalty penalty = Penalty::Lasso;
  std::size_t folds = 10;
  std::size_t grid_size = 100;
  double grid_ratio = 1e-4;
  double a = kDefaultScadA;
};

// K-fold CV over a warm-started path. Rows are permuted once from `stream`
// and split into contiguous folds. Ties in CV error go to the larger lambda.
// xtx may be passed to skip recomputing X'X.
CvResult cv_tune(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const CvSpec& spec,
                 Stream stream, const Eigen::MatrixXd* xtx = nullptr);

}  // namespace mcb
