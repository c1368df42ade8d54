#pragma once

#include <cstddef>
#include <vector>

#include "mmvlab/energy.hpp"
#include "mmvlab/mapping.hpp"

namespace mmvlab {

/// A convex functional on maps M -> Y with the structure
///   E(v) = sum_pairs c d_Y(v_a, v_b)^p + sum_anchors c d_Y(v_a, q)^p,
/// which covers the rho-approximating energies and simple test functionals.
class ConvexFunctional {
 public:
  struct PairTerm {
    std::size_t a;
    std::size_t b;
    double coeff;
  };
  struct AnchorTerm {
    std::size_t a;
    TargetPoint point;
    double coeff;
  };

  ConvexFunctional(SpacePtr domain, TargetPtr target, double p, std::vector<PairTerm> pairs,
                   std::vector<AnchorTerm> anchors = {}, double lower_bound = 0.0);

  /// E == 0.
  static ConvexFunctional zero(SpacePtr domain, TargetPtr target);
  /// The energy form viewed on maps into `target`.
  static ConvexFunctional from_energy(const EnergyForm& form, TargetPtr target);

  double operator()(const MappedFunction& v) const;
  const SpacePtr& domain() const { return domain_; }
  const TargetPtr& target() const { return target_; }
  double p() const { return p_; }
  const std::vector<PairTerm>& pairs() const { return pairs_; }
  const std::vector<AnchorTerm>& anchors() const { return anchors_; }
  /// Known value <= inf E (0 for energies; constants attain it).
  double lower_bound() const { return lower_bound_; }

 private:
  SpacePtr domain_;
  TargetPtr target_;
  double p_;
  std::vector<PairTerm> pairs_;
  std::vector<AnchorTerm> anchors_;
  double lower_bound_;
};

struct ResolventOptions {
  double tol = 1e-13;             // sweep movement, relative to 1 + |u|_{L2}
  std::size_t max_sweeps = 200000;
  const MappedFunction* initial = nullptr;  // warm start
};

struct ResolventStats {
  std::size_t sweeps = 0;
  double residual = 0.0;
};

/// J_lambda(u) = argmin_v lambda E(v) + d_{L2}(u, v)^2 by cyclic blockwise
/// minimization: every sweep replaces v(x) by the minimizer of the local
/// objective with the other values frozen. For p = 2 that minimizer is a
/// weighted Fréchet mean; for other p it is found by bisection on the
/// one-sided derivative along each edge (trees and the real line only).
/// Throws SolverError when the sweep budget runs out.
MappedFunction resolvent(const ConvexFunctional& e, const MappedFunction& u, double lambda,
                         const ResolventOptions& options = {}, ResolventStats* stats = nullptr);

/// E^lambda(u) = lambda E(J u) + d(u, J u)^2.
/// The Euclidean p = 2 resolvent prepared once for repeated steps on
/// coordinate matrices (dim x n, one column per domain point).
class EuclideanResolvent {
 public:
  /// Throws InvalidArgument unless the target is Euclidean and p = 2.
  explicit EuclideanResolvent(const ConvexFunctional& e);
  /// J_lambda(u) into v; v holds the warm start on entry. Same stopping
  /// rule and SolverError as resolvent().
  ResolventStats apply(const Eigen::MatrixXd& u, double lambda, Eigen::MatrixXd& v,
                       const ResolventOptions& options = {}) const;

  static Eigen::MatrixXd to_matrix(const MappedFunction& u);
  static void assign(MappedFunction& u, const Eigen::MatrixXd& m);

 private:
  struct Link {
    Eigen::Index y;
    double coeff;
  };
  Eigen::VectorXd weight_;
  Eigen::VectorXd base_;
  std::vector<std::vector<Link>> adj_;
  Eigen::VectorXd anchor_coeff_;
  Eigen::MatrixXd anchor_sum_;  // sum of coeff * anchor point per domain point
};

double moreau_yosida(const ConvexFunctional& e, const MappedFunction& u, double lambda,
                     const ResolventOptions& options = {});

}  // namespace mmvlab
