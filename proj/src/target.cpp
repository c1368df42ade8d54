#include "mmvlab/target.hpp"

#include <cmath>

#include <fmt/format.h>

#include "mmvlab/error.hpp"

namespace mmvlab {

TargetPtr TargetSpace::euclidean(std::size_t dim) {
  if (dim == 0) throw InvalidArgument("euclidean target needs dim >= 1");
  auto t = std::shared_ptr<TargetSpace>(new TargetSpace());
  t->kind_ = Kind::Euclidean;
  t->dim_ = dim;
  t->basepoint_ = TargetPoint(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim)));
  return t;
}

TargetPtr TargetSpace::tree(std::shared_ptr<const MetricTree> tree, TreePoint basepoint) {
  if (!tree) throw InvalidArgument("tree target needs a tree");
  tree->check(basepoint);
  auto t = std::shared_ptr<TargetSpace>(new TargetSpace());
  t->kind_ = Kind::Tree;
  t->tree_ = std::move(tree);
  t->basepoint_ = TargetPoint(basepoint);
  return t;
}

TargetPtr TargetSpace::finite(SpacePtr space, std::size_t basepoint) {
  if (!space) throw InvalidArgument("finite target needs a space");
  if (basepoint >= space->size()) throw InvalidArgument("basepoint out of range");
  auto t = std::shared_ptr<TargetSpace>(new TargetSpace());
  t->kind_ = Kind::FiniteMetric;
  t->finite_ = std::move(space);
  t->basepoint_ = TargetPoint(basepoint);
  return t;
}

TargetPtr TargetSpace::product(std::vector<TargetPtr> factors) {
  if (factors.empty()) throw InvalidArgument("product target needs at least one factor");
  auto t = std::shared_ptr<TargetSpace>(new TargetSpace());
  t->kind_ = Kind::Product;
  std::vector<TargetPoint> base;
  for (const auto& f : factors) {
    if (!f) throw InvalidArgument("null product factor");
    base.push_back(f->basepoint());
  }
  t->factors_ = std::move(factors);
  t->basepoint_ = TargetPoint(std::move(base));
  return t;
}

bool TargetSpace::has_geodesics() const {
  switch (kind_) {
    case Kind::Euclidean:
    case Kind::Tree:
      return true;
    case Kind::FiniteMetric:
      return false;
    case Kind::Product:
      for (const auto& f : factors_)
        if (!f->has_geodesics()) return false;
      return true;
  }
  return false;
}

std::string TargetSpace::describe() const {
  switch (kind_) {
    case Kind::Euclidean:
      return fmt::format("euclidean({})", dim_);
    case Kind::Tree:
      return fmt::format("tree({} edges)", tree_->edge_count());
    case Kind::FiniteMetric:
      return fmt::format("finite({})", finite_->label());
    case Kind::Product: {
      std::string s = "product(";
      for (std::size_t i = 0; i < factors_.size(); ++i) {
        if (i) s += ", ";
        s += factors_[i]->describe();
      }
      return s + ")";
    }
  }
  return {};
}

double TargetSpace::distance(const TargetPoint& a, const TargetPoint& b) const {
  switch (kind_) {
    case Kind::Euclidean:
      return (a.coords() - b.coords()).norm();
    case Kind::Tree:
      return tree_->distance(a.tree_point(), b.tree_point());
    case Kind::FiniteMetric:
      return finite_->distance(a.index(), b.index());
    case Kind::Product: {
      double s = 0.0;
      for (std::size_t i = 0; i < factors_.size(); ++i) {
        const double d = factors_[i]->distance(a.parts()[i], b.parts()[i]);
        s += d * d;
      }
      return std::sqrt(s);
    }
  }
  return 0.0;
}

void TargetSpace::check(const TargetPoint& p) const {
  switch (kind_) {
    case Kind::Euclidean: {
      const auto* v = std::get_if<Eigen::VectorXd>(&p.value);
      if (!v || static_cast<std::size_t>(v->size()) != dim_) {
        throw InvalidArgument(fmt::format("expected a point of R^{}", dim_));
      }
      if (!v->allFinite()) throw InvalidArgument("non-finite coordinate");
      return;
    }
    case Kind::Tree: {
      const auto* t = std::get_if<TreePoint>(&p.value);
      if (!t) throw InvalidArgument("expected a tree point (edge, offset)");
      tree_->check(*t);
      return;
    }
    case Kind::FiniteMetric: {
      const auto* i = std::get_if<std::size_t>(&p.value);
      if (!i || *i >= finite_->size()) throw InvalidArgument("expected an index of the target space");
      return;
    }
    case Kind::Product: {
      const auto* parts = std::get_if<std::vector<TargetPoint>>(&p.value);
      if (!parts || parts->size() != factors_.size()) {
        throw InvalidArgument(fmt::format("expected {} product components", factors_.size()));
      }
      for (std::size_t i = 0; i < factors_.size(); ++i) factors_[i]->check((*parts)[i]);
      return;
    }
  }
}

}  // namespace mmvlab
