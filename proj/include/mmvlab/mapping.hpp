#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mmvlab/measure_approximation.hpp"
#include "mmvlab/space.hpp"
#include "mmvlab/target.hpp"

namespace mmvlab {

/// A map u: M -> Y given by its value at every point of the finite domain.
struct MappedFunction {
  SpacePtr domain;
  TargetPtr target;
  std::vector<TargetPoint> values;

  static MappedFunction constant(SpacePtr domain, TargetPtr target, const TargetPoint& y);
  /// Real-valued map (target R).
  static MappedFunction real(SpacePtr domain, const Eigen::VectorXd& values);
  /// Values of a map into R^1 as a vector.
  Eigen::VectorXd real_values() const;
  /// Throws InvalidArgument when sizes or point kinds are inconsistent.
  void check() const;
};

/// (sum_x w_x d_Y(u(x), v(x))^p)^(1/p)
double lp_distance(const MappedFunction& u, const MappedFunction& v, double p);

/// Phi u = u o phi on Dom(phi), `fill` elsewhere (the target basepoint when empty).
MappedFunction pushforward(const MappedFunction& u, const MeasureApproximation& phi,
                           const TargetPoint* fill = nullptr);

/// Local average of u over open eps-balls: the weighted Fréchet mean on
/// geodesic targets; on finite targets the average of the Kuratowski
/// coordinates, projected back to the nearest target point.
MappedFunction smooth(const MappedFunction& u, double eps);

struct LpConvergenceTable {
  std::vector<double> eps;        // rows
  Eigen::MatrixXd table;          // table(r, i) = d_Lp(Phi_i smooth(u, eps_r), u_i)
  std::vector<double> tail_sup;   // per row: max over the second half of the i-axis
  double diagnostic = 0.0;        // max of tail_sup over the smaller half of the eps values
};

/// Double-limit criterion for L^p convergence u_i -> u.
LpConvergenceTable lp_convergence_table(const std::vector<MappedFunction>& u_i,
                                        const std::vector<MeasureApproximation>& phi_i,
                                        const MappedFunction& u, double p,
                                        const std::vector<double>& eps);

using TestFunction = std::function<double(const FiniteMetricMeasureSpace&, std::size_t)>;

/// max over the dictionary of |sum_{Dom} f(phi x) w_x - sum_y f(y) w_y|.
double check_measure_approximation(const MeasureApproximation& phi,
                                   const std::vector<TestFunction>& dictionary);

struct AsymptoticRelationReport {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  Eigen::MatrixXd traces;      // traces(k, i) = |d_i(f_i x, f_i y) - d(x, y)| for pair k
  std::vector<bool> blowup;    // trace ends above where it started
  double final_max = 0.0;      // largest entry of the last column
};

/// Convergence traces of d_{X_i}(f_i x, f_i y) -> d_X(x, y) over sample pairs.
AsymptoticRelationReport asymptotic_relation_diagnostics(
    const FiniteMetricMeasureSpace& x, const std::vector<SpacePtr>& x_i,
    const std::vector<std::vector<std::size_t>>& f_i,
    const std::vector<std::pair<std::size_t, std::size_t>>& pairs);

}  // namespace mmvlab
