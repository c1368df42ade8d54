#include "mmvlab/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "mmvlab/error.hpp"

namespace mmvlab {

std::string FlowTrace::csv() const {
  std::string out = "time,energy,residual,sweeps\n";
  for (std::size_t k = 0; k < time.size(); ++k) {
    out += fmt::format("{:.17g},{:.17g},{:.17g},{}\n", time[k], energy[k], residual[k], sweeps[k]);
  }
  return out;
}

namespace {

FlowTrace run_steps(const ConvexFunctional& e, const MappedFunction& u, double t, std::size_t n,
                    const ResolventOptions& base) {
  FlowTrace tr;
  tr.time.push_back(0.0);
  tr.iterates.push_back(u);
  tr.energy.push_back(e(u));
  tr.sweeps.push_back(0);
  tr.residual.push_back(0.0);
  const double h = t / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    ResolventStats st;
    auto next = resolvent(e, tr.iterates.back(), h, base, &st);
    tr.time.push_back(h * static_cast<double>(k + 1));
    tr.energy.push_back(e(next));
    tr.sweeps.push_back(st.sweeps);
    tr.residual.push_back(st.residual);
    tr.iterates.push_back(std::move(next));
  }
  return tr;
}

// The endpoint of n resolvent steps without keeping the trajectory.
MappedFunction endpoint(const ConvexFunctional& e, const MappedFunction& u, double t, std::size_t n,
                        const ResolventOptions& base) {
  MappedFunction cur = u;
  const double h = t / static_cast<double>(n);
  if (e.target()->kind() == TargetSpace::Kind::Euclidean && e.p() == 2.0) {
    const EuclideanResolvent prepared(e);
    Eigen::MatrixXd m = EuclideanResolvent::to_matrix(u);
    Eigen::MatrixXd next = m;
    ResolventOptions o = base;
    o.initial = nullptr;
    for (std::size_t k = 0; k < n; ++k) {
      prepared.apply(m, h, next, o);
      m = next;
    }
    EuclideanResolvent::assign(cur, m);
    return cur;
  }
  for (std::size_t k = 0; k < n; ++k) cur = resolvent(e, cur, h, base);
  return cur;
}

}  // namespace

SemigroupResult semigroup(const ConvexFunctional& e, const MappedFunction& u, double t,
                          const SemigroupOptions& options) {
  if (!(t >= 0.0)) throw InvalidArgument("semigroup time must be nonnegative");
  if (options.n_start == 0) throw InvalidArgument("n_start must be positive");
  SemigroupResult r;
  if (t == 0.0) {
    r.value = u;
    r.trace = run_steps(e, u, 0.0, 0, options.resolvent);
    return r;
  }
  std::size_t n = options.n_start;
  MappedFunction prev = endpoint(e, u, t, n, options.resolvent);
  while (true) {
    if (2 * n > options.max_steps) {
      throw SolverError(fmt::format("semigroup at t = {} not converged with {} steps (defect {})", t, n,
                                    r.cauchy_defect),
                        r.cauchy_defect);
    }
    MappedFunction next = endpoint(e, u, t, 2 * n, options.resolvent);
    r.cauchy_defect = lp_distance(prev, next, 2.0);
    n *= 2;
    prev = std::move(next);
    if (r.cauchy_defect < options.tol) break;
  }
  r.value = std::move(prev);
  r.steps = n;
  if (n <= 4096) {
    r.trace = run_steps(e, u, t, n, options.resolvent);
  } else {
    r.trace.time = {0.0, t};
    r.trace.iterates = {u, r.value};
    r.trace.energy = {e(u), e(r.value)};
    r.trace.sweeps = {0, 0};
    r.trace.residual = {0.0, r.cauchy_defect};
  }
  return r;
}

FlowTrace harmonic_flow(const ConvexFunctional& e, const MappedFunction& u0,
                        const FlowSchedule& schedule, const ResolventOptions& options) {
  if (schedule.lambdas.empty()) throw InvalidArgument("empty flow schedule");
  FlowTrace tr;
  tr.time.push_back(0.0);
  tr.iterates.push_back(u0);
  tr.energy.push_back(e(u0));
  tr.sweeps.push_back(0);
  tr.residual.push_back(0.0);
  double clock = 0.0;
  for (double lambda : schedule.lambdas) {
    ResolventStats st;
    ResolventOptions opt = options;
    MappedFunction next;
    if (schedule.mode == FlowSchedule::Mode::ResolventPath) {
      if (lambda < clock) throw InvalidArgument("resolvent path needs nondecreasing lambdas");
      opt.initial = &tr.iterates.back();
      next = resolvent(e, u0, lambda, opt, &st);
      clock = lambda;
    } else {
      next = resolvent(e, tr.iterates.back(), lambda, opt, &st);
      clock += lambda;
    }
    tr.time.push_back(clock);
    tr.energy.push_back(e(next));
    tr.sweeps.push_back(st.sweeps);
    tr.residual.push_back(st.residual);
    tr.iterates.push_back(std::move(next));
  }
  return tr;
}

IdentityReport resolvent_identities_check(const ConvexFunctional& e,
                                          const std::vector<MappedFunction>& samples,
                                          const std::vector<double>& lambdas,
                                          const std::vector<std::pair<double, double>>& times,
                                          const SemigroupOptions& options) {
  IdentityReport rep;
  rep.nonexpansive_slack = std::numeric_limits<double>::infinity();
  rep.step_bound_slack = std::numeric_limits<double>::infinity();
  rep.monotonicity_slack = std::numeric_limits<double>::infinity();
  std::vector<double> sorted = lambdas;
  std::sort(sorted.begin(), sorted.end());
  for (double lambda : sorted) {
    std::vector<MappedFunction> j;
    for (const auto& x : samples) j.push_back(resolvent(e, x, lambda, options.resolvent));
    for (std::size_t a = 0; a < samples.size(); ++a) {
      const double d = lp_distance(j[a], samples[a], 2.0);
      rep.step_bound_slack = std::min(rep.step_bound_slack, lambda * (e(samples[a]) - e.lower_bound()) - d * d);
      ++rep.cases;
      for (std::size_t b = a + 1; b < samples.size(); ++b) {
        rep.nonexpansive_slack = std::min(
            rep.nonexpansive_slack, lp_distance(samples[a], samples[b], 2.0) - lp_distance(j[a], j[b], 2.0));
        ++rep.cases;
      }
    }
  }
  for (const auto& x : samples) {
    double prev = -1.0;
    for (double lambda : sorted) {
      const double scaled = moreau_yosida(e, x, lambda, options.resolvent) / lambda;
      // Sorted ascending, so lambda' < lambda means the previous value must be >= this one.
      if (prev >= 0.0) rep.monotonicity_slack = std::min(rep.monotonicity_slack, prev - scaled);
      prev = scaled;
      ++rep.cases;
    }
  }
  for (const auto& [s, t] : times) {
    for (const auto& x : samples) {
      const auto whole = semigroup(e, x, s + t, options).value;
      const auto inner = semigroup(e, x, t, options).value;
      const auto outer = semigroup(e, inner, s, options).value;
      rep.semigroup_defect = std::max(rep.semigroup_defect, lp_distance(whole, outer, 2.0));
      ++rep.cases;
    }
  }
  if (std::isinf(rep.nonexpansive_slack)) rep.nonexpansive_slack = 0.0;
  if (std::isinf(rep.step_bound_slack)) rep.step_bound_slack = 0.0;
  if (std::isinf(rep.monotonicity_slack)) rep.monotonicity_slack = 0.0;
  return rep;
}

}  // namespace mmvlab
