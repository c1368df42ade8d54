#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mmvlab/functional.hpp"

namespace mmvlab {

struct FlowTrace {
  std::vector<double> time;
  std::vector<MappedFunction> iterates;
  std::vector<double> energy;
  std::vector<std::size_t> sweeps;   // inner resolvent sweeps per step
  std::vector<double> residual;      // final sweep movement per step (0 for the initial map)

  /// CSV with columns time, energy, residual, sweeps (17 significant digits).
  std::string csv() const;
};

struct SemigroupOptions {
  std::size_t n_start = 1;
  double tol = 2.5e-7;          // Cauchy criterion between n and 2n steps (L2 distance)
  std::size_t max_steps = 1u << 24;
  ResolventOptions resolvent;
};

struct SemigroupResult {
  MappedFunction value;
  std::size_t steps = 0;        // n of the returned iterate
  double cauchy_defect = 0.0;   // d((J_{t/n})^n u, (J_{t/2n})^{2n} u) at exit
  FlowTrace trace;              // the returned trajectory at times k t / n
};

/// T_t u = lim (J_{t/n})^n u over n = n_start, 2 n_start, ... until two
/// consecutive iterates are within tol. t = 0 returns u.
SemigroupResult semigroup(const ConvexFunctional& e, const MappedFunction& u, double t,
                          const SemigroupOptions& options = {});

struct FlowSchedule {
  enum class Mode {
    ResolventPath,  // J_{lambda_k}(u0) for increasing lambda_k (deformation to a minimizer)
    ProximalSteps,  // u_{k+1} = J_{lambda_k}(u_k)
  };
  Mode mode = Mode::ResolventPath;
  std::vector<double> lambdas;
};

/// Trace of the schedule; time is lambda_k on a resolvent path and the
/// cumulative step size for proximal steps.
FlowTrace harmonic_flow(const ConvexFunctional& e, const MappedFunction& u0,
                        const FlowSchedule& schedule, const ResolventOptions& options = {});

struct IdentityReport {
  double nonexpansive_slack = 0.0;   // min d(x,y) - d(Jx,Jy)
  double step_bound_slack = 0.0;     // min lambda (E(x) - inf E) - d(Jx, x)^2
  double semigroup_defect = 0.0;     // max d(T_{s+t} x, T_s T_t x)
  double monotonicity_slack = 0.0;   // min over lambda' < lambda of E^l'/l' - E^l/l
  std::size_t cases = 0;
};

/// Checks the resolvent and semigroup identities on sample maps: every
/// lambda and pair of samples for nonexpansiveness, every sample and lambda
/// for the step bound, every sample and (s, t) for the semigroup law, and
/// the Moreau–Yosida monotonicity along the sorted lambda list.
IdentityReport resolvent_identities_check(const ConvexFunctional& e,
                                          const std::vector<MappedFunction>& samples,
                                          const std::vector<double>& lambdas,
                                          const std::vector<std::pair<double, double>>& times = {},
                                          const SemigroupOptions& options = {});

}  // namespace mmvlab
