#include "mmvlab/spectral.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "mmvlab/error.hpp"
#include "mmvlab/parallel.hpp"

namespace mmvlab {

std::vector<std::pair<double, std::size_t>> cluster(const Eigen::VectorXd& values, double rel_gap,
                                                    double abs_floor) {
  std::vector<std::pair<double, std::size_t>> out;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const double v = values(i);
    if (!out.empty()) {
      const double prev = values(i - 1);
      if (v - prev <= rel_gap * std::max({std::abs(v), std::abs(prev), abs_floor})) {
        sum += v;
        ++out.back().second;
        out.back().first = sum / static_cast<double>(out.back().second);
        continue;
      }
    }
    sum = v;
    out.emplace_back(v, 1);
  }
  return out;
}

Spectrum eigensolve(const Generator& gen, std::size_t k) {
  const auto n = gen.matrix.rows();
  if (gen.matrix.cols() != n || gen.weight.size() != n) throw InvalidArgument("generator shape mismatch");
  if (k == 0 || k > static_cast<std::size_t>(n)) {
    throw InvalidArgument(fmt::format("requested {} eigenpairs of a {}-point generator", k, n));
  }
  const Eigen::MatrixXd l = gen.stiffness();
  const double scale = std::max(l.cwiseAbs().maxCoeff(), 1e-300);
  const double asym = (l - l.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * scale) {
    throw InvalidArgument(fmt::format("generator is not self-adjoint in the weighted product (defect {})", asym / scale));
  }
  const Eigen::VectorXd isq = gen.weight.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd b = isq.asDiagonal() * (0.5 * (l + l.transpose())) * isq.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b);
  if (es.info() != Eigen::Success) throw SolverError("dense eigensolver failed", 0.0);
  Spectrum s;
  s.dimension = static_cast<std::size_t>(n);
  s.weight = gen.weight;
  const auto kk = static_cast<Eigen::Index>(k);
  s.values = es.eigenvalues().head(kk);
  s.vectors = isq.asDiagonal() * es.eigenvectors().leftCols(kk);
  return s;
}

std::size_t spectral_projection_count(const Spectrum& s, double a, double b) {
  if (!(a < b)) throw InvalidArgument("spectral interval needs a < b");
  for (Eigen::Index i = 0; i < s.values.size(); ++i) {
    for (double end : {a, b}) {
      if (std::abs(s.values(i) - end) <= 1e-9) {
        throw InvalidArgument(fmt::format("interval endpoint {} is an eigenvalue ({})", end, s.values(i)));
      }
    }
  }
  if (!s.complete()) {
    const double top = s.values.size() ? s.values(s.values.size() - 1) : -INFINITY;
    if (b > top) {
      throw InvalidArgument(fmt::format(
          "partial spectrum up to {} cannot count eigenvalues up to {}", top, b));
    }
  }
  std::size_t count = 0;
  for (Eigen::Index i = 0; i < s.values.size(); ++i)
    if (s.values(i) > a && s.values(i) <= b) ++count;
  return count;
}

double extrapolate_to_zero(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.empty() || x.size() != y.size()) throw InvalidArgument("extrapolation needs matching nonempty data");
  std::vector<double> p = y;
  const std::size_t n = x.size();
  for (std::size_t m = 1; m < n; ++m) {
    for (std::size_t i = 0; i + m < n; ++i) {
      const double den = x[i] - x[i + m];
      if (den == 0.0) throw InvalidArgument("extrapolation nodes must be distinct");
      p[i] = (x[i] * p[i + 1] - x[i + m] * p[i]) / den;
    }
  }
  return p[0];
}

std::optional<double> ConvergenceReport::value(const std::string& key) const {
  for (const auto& [k, v] : summary)
    if (k == key) return v;
  return std::nullopt;
}

std::string ConvergenceReport::csv() const {
  std::string out = axis_name;
  for (const auto& t : trace_names) out += "," + t;
  out += "\n";
  for (std::size_t c = 0; c < axis.size(); ++c) {
    out += fmt::format("{:.17g}", axis[c]);
    for (Eigen::Index r = 0; r < traces.rows(); ++r)
      out += fmt::format(",{:.17g}", traces(r, static_cast<Eigen::Index>(c)));
    out += "\n";
  }
  return out;
}

EigenConvergenceResult eigen_convergence_experiment(SpacePtr domain, const EnergyConfig& config,
                                                    const std::vector<double>& rho_schedule,
                                                    std::size_t k,
                                                    const std::vector<double>& reference) {
  if (rho_schedule.size() < 3) throw InvalidArgument("rho schedule needs at least 3 points");
  if (k < 2) throw InvalidArgument("eigen convergence needs k >= 2");
  const auto m = rho_schedule.size();
  EigenConvergenceResult res;
  res.eigenvalues.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(m));
  res.zero_multiplicity.assign(m, 0);
  parallel_for(m, [&](std::size_t j) {
    EnergyConfig c = config;
    c.rho = rho_schedule[j];
    const EnergyForm form(domain, c);
    const auto spec = eigensolve(assemble_generator(form), k);
    res.eigenvalues.col(static_cast<Eigen::Index>(j)) = spec.values;
    std::size_t zeros = 0;
    const double tol = 1e-9 * std::max(1.0, spec.values.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < spec.values.size(); ++i)
      if (std::abs(spec.values(i)) <= tol) ++zeros;
    res.zero_multiplicity[j] = zeros;
  });
  std::vector<double> x2;
  for (double r : rho_schedule) x2.push_back(r * r);
  res.extrapolated.resize(static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<double> y(m);
    for (std::size_t j = 0; j < m; ++j) y[j] = res.eigenvalues(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    res.extrapolated(static_cast<Eigen::Index>(i)) = extrapolate_to_zero(x2, y);
  }

  auto& rep = res.report;
  rep.experiment = "eigen_convergence";
  rep.axis_name = "rho";
  rep.axis = rho_schedule;
  rep.traces.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < k; ++i) {
    rep.trace_names.push_back(fmt::format("lambda_{}", i + 1));
    rep.traces.row(static_cast<Eigen::Index>(i)) = res.eigenvalues.row(static_cast<Eigen::Index>(i));
  }
  for (std::size_t i = 0; i < k; ++i)
    rep.summary.emplace_back(fmt::format("extrapolated_lambda_{}", i + 1), res.extrapolated(static_cast<Eigen::Index>(i)));
  const double l2 = res.extrapolated(1);
  for (std::size_t i = 2; i < k; ++i)
    rep.summary.emplace_back(fmt::format("ratio_{}_over_2", i + 1), res.extrapolated(static_cast<Eigen::Index>(i)) / l2);
  if (reference.size() >= 2 && reference[1] != 0.0) {
    res.calibration = l2 / reference[1];
    rep.summary.emplace_back("calibration", *res.calibration);
  }
  rep.notes.push_back("a finite discretization has no essential spectrum; only the leading eigenvalues are traced");
  return res;
}

}  // namespace mmvlab
