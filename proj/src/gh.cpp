#include "mmvlab/gh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "mmvlab/error.hpp"

namespace mmvlab {

Correspondence Correspondence::from_maps(std::span<const std::size_t> f,
                                         std::span<const std::size_t> g) {
  Correspondence r;
  r.pairs.reserve(f.size() + g.size());
  for (std::size_t x = 0; x < f.size(); ++x) r.pairs.emplace_back(x, f[x]);
  for (std::size_t y = 0; y < g.size(); ++y) r.pairs.emplace_back(g[y], y);
  return r;
}

bool Correspondence::is_surjective(std::size_t nx, std::size_t ny) const {
  std::vector<char> hx(nx, 0), hy(ny, 0);
  for (auto [a, b] : pairs) {
    if (a >= nx || b >= ny) return false;
    hx[a] = 1;
    hy[b] = 1;
  }
  return std::all_of(hx.begin(), hx.end(), [](char c) { return c != 0; }) &&
         std::all_of(hy.begin(), hy.end(), [](char c) { return c != 0; });
}

double distortion(const Correspondence& r, const FiniteMetricMeasureSpace& x,
                  const FiniteMetricMeasureSpace& y) {
  for (auto [a, b] : r.pairs) {
    if (a >= x.size() || b >= y.size()) {
      throw InvalidArgument(fmt::format("pair ({}, {}) out of range", a, b));
    }
  }
  if (!r.is_surjective(x.size(), y.size())) {
    throw InvalidArgument("relation does not project onto both spaces");
  }
  double dis = 0.0;
  for (std::size_t k = 0; k < r.pairs.size(); ++k) {
    for (std::size_t l = k + 1; l < r.pairs.size(); ++l) {
      const auto [a, b] = r.pairs[k];
      const auto [c, d] = r.pairs[l];
      dis = std::max(dis, std::abs(y.distance(b, d) - x.distance(a, c)));
    }
  }
  return dis;
}

double distortion(std::span<const std::size_t> map, const FiniteMetricMeasureSpace& x,
                  const FiniteMetricMeasureSpace& y) {
  if (map.size() != x.size()) throw InvalidArgument("map must be defined on every point of X");
  for (std::size_t i = 0; i < map.size(); ++i) {
    if (map[i] >= y.size()) throw InvalidArgument(fmt::format("map({}) = {} out of range", i, map[i]));
  }
  double dis = 0.0;
  for (std::size_t i = 0; i < map.size(); ++i)
    for (std::size_t j = i + 1; j < map.size(); ++j)
      dis = std::max(dis, std::abs(y.distance(map[i], map[j]) - x.distance(i, j)));
  return dis;
}

bool is_eps_approximation(std::span<const std::size_t> map, const FiniteMetricMeasureSpace& x,
                          const FiniteMetricMeasureSpace& y, double eps) {
  if (!(distortion(map, x, y) < eps)) return false;
  for (std::size_t q = 0; q < y.size(); ++q) {
    const bool covered = std::any_of(map.begin(), map.end(),
                                     [&](std::size_t p) { return y.distance(q, p) < eps; });
    if (!covered) return false;
  }
  return true;
}

namespace {

std::size_t draw(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

// Farthest-point traversal starting at `start`; ties go to the lowest index.
std::vector<std::size_t> farthest_point_order(const FiniteMetricMeasureSpace& s, std::size_t start) {
  const auto n = s.size();
  std::vector<std::size_t> order{start};
  std::vector<double> gap(n);
  std::vector<char> used(n, 0);
  used[start] = 1;
  for (std::size_t i = 0; i < n; ++i) gap[i] = s.distance(start, i);
  while (order.size() < n) {
    std::size_t best = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (used[i]) continue;
      if (best == n || gap[i] > gap[best]) best = i;
    }
    used[best] = 1;
    order.push_back(best);
    for (std::size_t i = 0; i < n; ++i) gap[i] = std::min(gap[i], s.distance(best, i));
  }
  return order;
}

class CorrespondenceSearch {
 public:
  CorrespondenceSearch(const FiniteMetricMeasureSpace& x, const FiniteMetricMeasureSpace& y,
                       const GhSearchBudget& budget)
      : x_(x), y_(y), budget_(budget), rng_(budget.seed), nx_(x.size()), ny_(y.size()) {}

  GhUpperBound run() {
    GhUpperBound best;
    best.bound = std::numeric_limits<double>::infinity();
    std::size_t used = 0;
    std::size_t restart = 0;
    while (true) {
      std::size_t x0 = 0, y0 = 0;
      if (restart > 0) {
        x0 = draw(rng_, nx_);
        y0 = draw(rng_, ny_);
      }
      seed_greedy(x0, y0);
      ++used;
      keep_if_better(best);
      ++restart;
      bool stuck = false;
      while (!stuck && used < budget_.iterations) {
        stuck = !improve(used);
        keep_if_better(best);
        if (global_max() == 0.0) break;
      }
      if (used >= budget_.iterations || best.bound == 0.0) break;
    }
    best.restarts = restart;
    return best;
  }

 private:
  using Pair = std::pair<std::size_t, std::size_t>;

  double cost(const Pair& a, const Pair& b) const {
    return std::abs(x_.distance(a.first, b.first) - y_.distance(a.second, b.second));
  }

  void seed_greedy(std::size_t x0, std::size_t y0) {
    f_.assign(nx_, 0);
    g_.assign(ny_, 0);
    std::vector<Pair> landmarks;
    const auto cap = std::max<std::size_t>(budget_.landmark_cap, 1);
    auto score = [&](std::size_t a, std::size_t b) {
      double worst = 0.0;
      for (const auto& l : landmarks) worst = std::max(worst, cost({a, b}, l));
      return worst;
    };
    const auto order = farthest_point_order(x_, x0);
    for (auto a : order) {
      std::size_t pick = y0;
      if (!landmarks.empty()) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t b = 0; b < ny_; ++b) {
          const double s = score(a, b);
          if (s < best) {
            best = s;
            pick = b;
          }
        }
      }
      f_[a] = pick;
      if (landmarks.size() < cap) landmarks.emplace_back(a, pick);
    }
    for (std::size_t b = 0; b < ny_; ++b) {
      double best = std::numeric_limits<double>::infinity();
      std::size_t pick = 0;
      for (std::size_t a = 0; a < nx_; ++a) {
        const double s = score(a, b);
        if (s < best) {
          best = s;
          pick = a;
        }
      }
      g_[b] = pick;
    }
    pairs_.clear();
    for (std::size_t a = 0; a < nx_; ++a) pairs_.emplace_back(a, f_[a]);
    for (std::size_t b = 0; b < ny_; ++b) pairs_.emplace_back(g_[b], b);
    recompute_all();
  }

  void recompute_row(std::size_t k) {
    double m = 0.0;
    std::size_t arg = k;
    for (std::size_t l = 0; l < pairs_.size(); ++l) {
      const double c = cost(pairs_[k], pairs_[l]);
      if (c > m) {
        m = c;
        arg = l;
      }
    }
    row_[k] = m;
    arg_[k] = arg;
  }

  void recompute_all() {
    row_.assign(pairs_.size(), 0.0);
    arg_.assign(pairs_.size(), 0);
    for (std::size_t k = 0; k < pairs_.size(); ++k) recompute_row(k);
  }

  std::size_t worst_row() const {
    return static_cast<std::size_t>(std::max_element(row_.begin(), row_.end()) - row_.begin());
  }
  double global_max() const { return row_[worst_row()]; }

  double row_if(std::size_t k, const Pair& candidate) const {
    double m = 0.0;
    for (std::size_t l = 0; l < pairs_.size(); ++l) {
      if (l != k) m = std::max(m, cost(candidate, pairs_[l]));
    }
    return m;
  }

  void assign(std::size_t k, const Pair& p) {
    pairs_[k] = p;
    if (k < nx_) {
      f_[k] = p.second;
    } else {
      g_[k - nx_] = p.first;
    }
    for (std::size_t l = 0; l < pairs_.size(); ++l) {
      if (l == k) continue;
      const double c = cost(pairs_[k], pairs_[l]);
      if (c > row_[l]) {
        row_[l] = c;
        arg_[l] = k;
      } else if (arg_[l] == k && c < row_[l]) {
        recompute_row(l);
      }
    }
    recompute_row(k);
  }

  std::vector<std::size_t> candidates(std::size_t range) {
    std::vector<std::size_t> all(range);
    std::iota(all.begin(), all.end(), std::size_t{0});
    if (range <= budget_.candidate_cap) return all;
    for (std::size_t i = 0; i < budget_.candidate_cap; ++i) {
      std::swap(all[i], all[i + draw(rng_, range - i)]);
    }
    all.resize(budget_.candidate_cap);
    return all;
  }

  bool try_reassign(std::size_t k) {
    const bool moves_y = k < nx_;
    const auto cands = candidates(moves_y ? ny_ : nx_);
    Pair best = pairs_[k];
    double best_row = row_[k];
    for (auto c : cands) {
      const Pair p = moves_y ? Pair{pairs_[k].first, c} : Pair{c, pairs_[k].second};
      if (p == pairs_[k]) continue;
      const double r = row_if(k, p);
      if (r < best_row) {
        best_row = r;
        best = p;
      }
    }
    if (best == pairs_[k]) return false;
    assign(k, best);
    return true;
  }

  bool try_swap(std::size_t k) {
    const bool f_side = k < nx_;
    const std::size_t lo = f_side ? 0 : nx_;
    const std::size_t count = f_side ? nx_ : ny_;
    if (count < 2) return false;
    const std::size_t other = lo + draw(rng_, count);
    if (other == k) return false;
    const double before = global_max();
    const Pair pk = pairs_[k];
    const Pair po = pairs_[other];
    Pair nk = pk, no = po;
    if (f_side) {
      std::swap(nk.second, no.second);
    } else {
      std::swap(nk.first, no.first);
    }
    assign(k, nk);
    assign(other, no);
    if (global_max() < before) return true;
    assign(other, po);
    assign(k, pk);
    return false;
  }

  // One improving move; false when the current correspondence looks locally optimal.
  bool improve(std::size_t& used) {
    const auto k = worst_row();
    const auto l = arg_[k];
    ++used;
    if (try_reassign(k)) return true;
    if (used >= budget_.iterations) return true;
    ++used;
    if (l != k && try_reassign(l)) return true;
    for (int attempt = 0; attempt < 4 && used < budget_.iterations; ++attempt) {
      ++used;
      if (try_swap(k)) return true;
    }
    return false;
  }

  void keep_if_better(GhUpperBound& best) const {
    const double half = 0.5 * global_max();
    if (half < best.bound) {
      best.bound = half;
      best.witness = Correspondence{pairs_};
    }
  }

  const FiniteMetricMeasureSpace& x_;
  const FiniteMetricMeasureSpace& y_;
  GhSearchBudget budget_;
  std::mt19937_64 rng_;
  std::size_t nx_, ny_;
  std::vector<std::size_t> f_, g_;
  std::vector<Pair> pairs_;
  std::vector<double> row_;
  std::vector<std::size_t> arg_;
};

// Hausdorff distance between two sorted finite subsets of the real line.
double sorted_hausdorff(const std::vector<double>& a, const std::vector<double>& b) {
  auto one_sided = [](const std::vector<double>& p, const std::vector<double>& q) {
    double worst = 0.0;
    std::size_t j = 0;
    for (double v : p) {
      while (j + 1 < q.size() && q[j + 1] <= v) ++j;
      double d = std::abs(v - q[j]);
      if (j + 1 < q.size()) d = std::min(d, std::abs(q[j + 1] - v));
      worst = std::max(worst, d);
    }
    return worst;
  };
  return std::max(one_sided(a, b), one_sided(b, a));
}

std::vector<std::vector<double>> sorted_rows(const FiniteMetricMeasureSpace& s) {
  std::vector<std::vector<double>> rows(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    rows[i].resize(s.size());
    for (std::size_t j = 0; j < s.size(); ++j) rows[i][j] = s.distance(i, j);
    std::sort(rows[i].begin(), rows[i].end());
  }
  return rows;
}

}  // namespace

GhUpperBound gh_upper(const FiniteMetricMeasureSpace& x, const FiniteMetricMeasureSpace& y,
                      const GhSearchBudget& budget) {
  CorrespondenceSearch search(x, y, budget);
  return search.run();
}

double gh_lower(const FiniteMetricMeasureSpace& x, const FiniteMetricMeasureSpace& y) {
  double bound = 0.5 * std::abs(x.diameter() - y.diameter());

  const auto rx = sorted_rows(x);
  const auto ry = sorted_rows(y);
  std::vector<double> ex, ey;
  for (const auto& r : rx) ex.push_back(r.back());
  for (const auto& r : ry) ey.push_back(r.back());
  std::sort(ex.begin(), ex.end());
  std::sort(ey.begin(), ey.end());
  bound = std::max(bound, 0.5 * sorted_hausdorff(ex, ey));

  // For (x,y) in an optimal correspondence the distance profiles of x and y
  // are within dis(R) in Hausdorff distance.
  Eigen::MatrixXd h(static_cast<Eigen::Index>(x.size()), static_cast<Eigen::Index>(y.size()));
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) h(i, j) = sorted_hausdorff(rx[i], ry[j]);
  const double local = std::max(h.rowwise().minCoeff().maxCoeff(), h.colwise().minCoeff().maxCoeff());
  return std::max(bound, 0.5 * local);
}

double hausdorff_distance(const FiniteMetricMeasureSpace& z, std::span<const std::size_t> a,
                          std::span<const std::size_t> b) {
  if (a.empty() || b.empty()) throw InvalidArgument("Hausdorff distance needs nonempty subsets");
  for (auto i : a)
    if (i >= z.size()) throw InvalidArgument(fmt::format("index {} out of range", i));
  for (auto i : b)
    if (i >= z.size()) throw InvalidArgument(fmt::format("index {} out of range", i));
  auto one_sided = [&](std::span<const std::size_t> p, std::span<const std::size_t> q) {
    double worst = 0.0;
    for (auto i : p) {
      double near = std::numeric_limits<double>::infinity();
      for (auto j : q) near = std::min(near, z.distance(i, j));
      worst = std::max(worst, near);
    }
    return worst;
  };
  return std::max(one_sided(a, b), one_sided(b, a));
}

}  // namespace mmvlab
