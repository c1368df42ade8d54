#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "mmvlab/energy.hpp"
#include "mmvlab/gh.hpp"
#include "mmvlab/measure_approximation.hpp"
#include "mmvlab/spectral.hpp"

namespace mmvlab {

/// Resolvent convergence along a space sequence: for each phi_i: M_i -> M
/// and each lambda and probe u on M, traces d_L2(J^i(Phi_i u), Phi_i(J u))
/// and |E_i^lambda(Phi_i u) - E^lambda(u)| over i.
ConvergenceReport mosco_resolvent_experiment(const std::vector<MeasureApproximation>& phi_i,
                                             const EnergyConfig& config,
                                             const std::vector<double>& lambdas,
                                             const std::vector<Eigen::VectorXd>& probes);

/// A finite sample of a mapping space with the energy of every sample.
struct MappingSpaceSample {
  std::vector<MappedFunction> maps;
  std::vector<double> energy;
};

/// All maps from the domain into `grid` (|grid|^n of them, at most `cap`).
MappingSpaceSample sample_mapping_space(SpacePtr domain, TargetPtr target,
                                        const std::vector<TargetPoint>& grid,
                                        const std::function<double(const MappedFunction&)>& energy,
                                        std::size_t cap = 200000);

/// gh_upper between the sampled sublevel sets {E_i <= c_i} and {E <= c},
/// traced along i. `levels` defaults to c_i = c (1 + 1/i), i = 1, 2, ...
/// Throws InvalidArgument on an empty sublevel set.
ConvergenceReport sublevel_gh_experiment(const std::vector<MappingSpaceSample>& stages,
                                         const MappingSpaceSample& limit, double c,
                                         const GhSearchBudget& budget,
                                         std::vector<double> levels = {});

struct TwoPointParams {
  double alpha = 1.0;
  double beta = 1.0;
  std::vector<double> y_grid;   // sampled Y = R
  std::vector<double> deltas;   // d(a_i, b_i)
  double c = 0.15;
  GhSearchBudget budget;
};

/// M_i = {a_i, b_i} with weights (alpha, beta) at distance delta_i,
/// E_i(u) = d(u a, u b)^2 / delta_i^2; limit M = {a} with weight alpha + beta
/// and E = 0, so the limit sublevel set is the diagonal sqrt(alpha + beta) Y.
ConvergenceReport two_point_sublevel_experiment(const TwoPointParams& params);

/// Sum set {k_1^2 + 4 k_2^2 + ... + 4^(n-1) k_n^2} (in units of pi^2) as
/// distinct values with multiplicities, covering the first `count`
/// eigenvalues.
std::vector<std::pair<double, std::size_t>> qcube_reference(std::size_t n, std::size_t count);

struct QcubeResult {
  ConvergenceReport report;
  std::vector<Eigen::VectorXd> extrapolated;  // per dimension n = 1..n_max
  std::vector<std::vector<std::pair<double, std::size_t>>> clusters;  // of lambda_k / lambda_2, nonzero
  std::vector<std::vector<std::pair<double, std::size_t>>> reference;  // nonzero, in units of pi^2
  // Each measured ratio assigned to the nearest reference value (log scale);
  // reference value with the number of ratios it received.
  std::vector<std::vector<std::pair<double, std::size_t>>> assigned;
};

/// Eigenvalues of A^rho on grid samples of Q_1..Q_n_max, extrapolated over
/// the rho schedule, normalized by lambda_2 and clustered with relative gap
/// `cluster_gap`. Q_n for n < n_max keeps the modes whose reference value
/// lies within the first k reference values of Q_{n_max} (missing ratios are
/// NaN in the report). Throws InvalidArgument when the grid has fewer than 8
/// points per half-wavelength of the k-th reference mode.
QcubeResult qcube_experiment(std::size_t n_max, std::size_t per_unit, const EnergyConfig& config,
                             const std::vector<double>& rho_schedule, std::size_t k,
                             double cluster_gap = 0.08);

}  // namespace mmvlab
