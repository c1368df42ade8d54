#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mmvlab/energy.hpp"

namespace mmvlab {

/// Leading eigenpairs of a generator, eigenvectors orthonormal in the
/// weighted inner product <u, v>_w = sum_x w_x u_x v_x.
struct Spectrum {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // columns
  Eigen::VectorXd weight;
  std::size_t dimension = 0;  // size of the full problem

  bool complete() const { return static_cast<std::size_t>(values.size()) == dimension; }
};

/// Distinct values with multiplicities: consecutive eigenvalues join a
/// cluster while their gap is at most rel_gap * max(|value|, abs_floor).
std::vector<std::pair<double, std::size_t>> cluster(const Eigen::VectorXd& values, double rel_gap,
                                                    double abs_floor = 1e-9);

/// Dense solve of A v = lambda v in the weighted inner product through the
/// symmetric matrix W^{1/2} A W^{-1/2}. Throws InvalidArgument when W A is
/// not symmetric to 1e-10 relative, or k exceeds n.
Spectrum eigensolve(const Generator& gen, std::size_t k);

/// n((a, b]): eigenvalues in (a, b] with multiplicity. Throws InvalidArgument
/// when an endpoint is within 1e-9 of an eigenvalue, when a >= b, or when a
/// partial spectrum cannot decide the count.
std::size_t spectral_projection_count(const Spectrum& s, double a, double b);

/// Value at 0 of the polynomial in x interpolating (x_j, y_j) (Neville).
double extrapolate_to_zero(const std::vector<double>& x, const std::vector<double>& y);

/// A named table of traces over a parameter axis, plus scalar summaries.
struct ConvergenceReport {
  std::string experiment;
  std::string axis_name;
  std::vector<double> axis;
  std::vector<std::string> trace_names;
  Eigen::MatrixXd traces;  // traces(row, column) with one column per axis value
  std::vector<std::pair<std::string, double>> summary;
  std::vector<std::string> notes;

  std::optional<double> value(const std::string& key) const;
  /// Columns: axis, then one column per trace (17 significant digits).
  std::string csv() const;
};

struct EigenConvergenceResult {
  ConvergenceReport report;
  Eigen::MatrixXd eigenvalues;        // (k, schedule) traces lambda_1..lambda_k
  Eigen::VectorXd extrapolated;       // rho -> 0 limit per mode
  std::optional<double> calibration;  // extrapolated lambda_2 / reference lambda_2
  std::vector<std::size_t> zero_multiplicity;  // per schedule point
};

/// Eigenvalues of A^rho along a rho schedule (>= 3 points), polynomial
/// extrapolation in rho^2 to rho -> 0, and the calibration constant against
/// `reference` (the reference spectrum, ascending, starting with 0).
EigenConvergenceResult eigen_convergence_experiment(SpacePtr domain, const EnergyConfig& config,
                                                    const std::vector<double>& rho_schedule,
                                                    std::size_t k,
                                                    const std::vector<double>& reference = {});

}  // namespace mmvlab
