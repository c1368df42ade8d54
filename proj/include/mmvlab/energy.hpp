#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mmvlab/mapping.hpp"
#include "mmvlab/space.hpp"

namespace mmvlab {

struct EnergyConfig {
  enum class HMode { ConstantRho, PairwiseDistance };
  enum class BMode { BallVolume, UserTable };

  double p = 2.0;
  double rho = 0.1;
  HMode h_mode = HMode::ConstantRho;
  BMode b_mode = BMode::BallVolume;
  Eigen::VectorXd b_table;  // b(x, rho) per point, UserTable mode only
  double kappa = 1.0;       // (AR): kappa b <= |B| <= b
  std::vector<std::pair<double, double>> theta;  // (R, Theta(R)) for condition (M)

  /// Theta(R) by linear interpolation in the table; empty outside its range.
  std::optional<double> theta_at(double r) const;
};

struct KernelEntry {
  std::size_t y;
  double k;  // w_x w_y / (b(x, rho) h(x, y)^p)
};

/// The rho-approximating energy of a fixed domain:
///   e_u(x) = 1/b(x) sum_{0 < d(x,y) < rho} w_y (d_Y(u x, u y) / h(x,y))^p
///   E(u)   = 1/2 sum_x w_x e_u(x) = 1/2 sum_{x,y} k(x,y) d_Y(u x, u y)^p.
/// The ball volume |B(x, rho)| counts x itself.
class EnergyForm {
 public:
  /// Throws InvalidArgument for p < 1, rho <= 0, kappa outside (0,1], or a
  /// user b-table that breaks |B| <= b <= |B| / kappa.
  EnergyForm(SpacePtr domain, EnergyConfig config);

  const SpacePtr& domain() const { return domain_; }
  const EnergyConfig& config() const { return config_; }
  const Eigen::VectorXd& b() const { return b_; }
  const std::vector<std::vector<KernelEntry>>& kernel() const { return rows_; }
  std::size_t nonzeros() const;
  /// Pairs with |d(x,y) - rho| < 1e-9 diameter (the open ball decides them).
  const std::vector<std::string>& warnings() const { return warnings_; }
  /// Number of connected components of the graph 0 < d < rho.
  std::size_t components() const;

 private:
  SpacePtr domain_;
  EnergyConfig config_;
  Eigen::VectorXd b_;
  std::vector<std::vector<KernelEntry>> rows_;
  std::vector<std::string> warnings_;
};

Eigen::VectorXd energy_density(const EnergyForm& form, const MappedFunction& u);
double energy(const EnergyForm& form, const MappedFunction& u);
/// Real-valued shortcut.
double energy(const EnergyForm& form, const Eigen::VectorXd& u);

/// A = W^{-1} L with L = D - S, S the symmetrized kernel; E(u) = <Au, u>_w.
struct Generator {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd weight;

  /// <Au, v>_w = u^T W A v.
  double bilinear(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const;
  /// W A, symmetric.
  Eigen::MatrixXd stiffness() const;
};

/// Requires p = 2 (real targets); throws InvalidArgument otherwise.
Generator assemble_generator(const EnergyForm& form);

struct ConditionMRow {
  double r = 0.0;
  double max_ratio = 0.0;  // max over maps and points of e^R / e^rho (0/0 counts as 0)
  std::size_t worst_map = 0;
  std::size_t worst_point = 0;
  std::optional<double> theta;
  bool violated = false;   // max_ratio > theta, or an infinite ratio
};

/// Scans e_u^R <= Theta(R) e_u^rho for every R in the grid (rho from config,
/// rho <= R/2 required). Needs b(x, R) for every R, so BallVolume mode only.
std::vector<ConditionMRow> check_condition_M(SpacePtr domain, const EnergyConfig& config,
                                             const std::vector<MappedFunction>& maps,
                                             const std::vector<double>& r_grid);

struct PoincareBall {
  std::size_t map = 0;
  std::size_t x = 0;
  double r = 0.0;     // the ratio is the limit r -> this value from above
  double lhs = 0.0;   // 1/|B| iint_{B x B} d^p
  double mu = 0.0;    // mu_u(B(x, c r))
  double ratio = 0.0; // lhs / (r^p mu)
  double slack = 0.0; // C r^p mu - lhs for the certified C
};

struct PoincareCertificate {
  double p = 2.0;
  double c = 1.0;
  double C = 0.0;  // smallest feasible constant over the sampled maps
  double rho = 0.0;
  double R = 0.0;
  std::string mu_rule = "half-density point masses";
  bool feasible = true;  // false when some ball has lhs > 0 and mu = 0
  std::size_t infeasible_balls = 0;
  PoincareBall worst;
  std::vector<PoincareBall> table;
};

/// Smallest C with 1/|B(x,r)| iint d^p <= C r^p mu_u(B(x, c r)) for every
/// sampled map, point and r in (rho, R]. mu_u puts mass w_x e_u(x) / 2 on x,
/// so mu_u(M) = E(u). The supremum over r is attained in the limit from
/// above at the breakpoints {rho} and d(x,y), d(x,y)/c inside [rho, R).
PoincareCertificate poincare_certificate(const EnergyForm& form,
                                         const std::vector<MappedFunction>& maps, double c,
                                         double R);

struct PoincareBoundRow {
  std::size_t map = 0;
  std::size_t x = 0;
  double r = 0.0;
  double ratio = 0.0;  // (1/|B|) iint d^p / (r^p sum_{B(x,r)} w e^rho)
  double theta = 0.0;  // measured Theta(2r): max over maps and points of e^{2r} / e^rho
  double bound = 0.0;  // 2^{p+1} theta / kappa
};

struct PoincareBoundCheck {
  std::vector<PoincareBoundRow> rows;
  double worst_excess = 0.0;  // max of ratio - bound (<= 0 when the bound holds)
  PoincareBoundRow worst;
};

/// Compares the c = 1 Poincaré ratio against 2^{p+1} kappa^{-1} Theta(2r)
/// with Theta measured on the same maps, ball by ball.
PoincareBoundCheck poincare_bound_check(const EnergyForm& form,
                                        const std::vector<MappedFunction>& maps, double R);

struct StepMap {
  MappedFunction map;
  std::vector<std::size_t> centers;  // the maximal r-net
  std::vector<std::size_t> cell;     // cell index of every point
};

/// Piecewise constant approximation on the cells U_k = B(x_k, r) minus the
/// earlier balls of a maximal r-net. Cell values: weighted average on
/// Euclidean targets, weighted Fréchet mean on tree and product targets,
/// Kuratowski average projected to the nearest point on finite targets.
StepMap step_map(const MappedFunction& u, double r, std::optional<std::uint64_t> seed = {});

struct CompactnessWitness {
  std::vector<double> radii;
  Eigen::MatrixXd defect;  // defect(j, i) = d_Lp(u_i, step(u_i, r_j))
  Eigen::MatrixXd cauchy;  // cauchy(j, i) = d_Lp(step(u_i, r_j), step(u_i, r_last))
  Eigen::VectorXd energies;
  double energy_growth = 0.0;  // max_i E_i / E_0
  bool energy_unbounded = false;
};

/// Claim-style table for asymptotic compactness: how well step maps at
/// shrinking radii approximate each u_i, plus an energy-boundedness check
/// (flagged above `energy_bound`, or when the energy grows by more than
/// `growth_limit` along the sequence).
CompactnessWitness compactness_witness(const std::vector<MappedFunction>& u_i,
                                       const std::vector<EnergyForm>& forms,
                                       const std::vector<double>& radii, double p,
                                       double energy_bound = -1.0, double growth_limit = 10.0);

}  // namespace mmvlab
