#include "sivo/subdiff.hpp"

#include "sivo/errors.hpp"

#include <algorithm>
#include <cmath>

namespace sivo {

SubdiffSet::SubdiffSet(std::vector<Vector> generators, double ball_radius)
    : generators_(std::move(generators)), ball_radius_(ball_radius) {
  if (generators_.empty()) throw PreconditionError("SubdiffSet needs at least one generator");
  if (!(ball_radius_ >= 0.0)) throw PreconditionError("SubdiffSet ball radius must be nonnegative");
  for (const auto& g : generators_)
    if (g.size() != generators_.front().size())
      throw PreconditionError("SubdiffSet generators have mixed dimensions");
}

SubdiffSet SubdiffSet::operator+(const SubdiffSet& other) const {
  if (other.dim() != dim()) throw PreconditionError("Minkowski sum of sets of different dimension");
  std::vector<Vector> sums;
  sums.reserve(generators_.size() * other.generators_.size());
  for (const auto& a : generators_)
    for (const auto& b : other.generators_) sums.push_back(a + b);
  if (dim() == 1 && sums.size() > 2) {
    // an interval is determined by its endpoints
    auto [lo, hi] = std::minmax_element(sums.begin(), sums.end(),
                                        [](const Vector& a, const Vector& b) { return a[0] < b[0]; });
    sums = {*lo, *hi};
  }
  return SubdiffSet(unique_vectors(std::move(sums)), ball_radius_ + other.ball_radius_);
}

SubdiffSet SubdiffSet::scaled(double c) const {
  std::vector<Vector> gens;
  gens.reserve(generators_.size());
  for (const auto& g : generators_) gens.push_back(c * g);
  return SubdiffSet(unique_vectors(std::move(gens)), std::abs(c) * ball_radius_);
}

std::vector<Vector> unique_vectors(std::vector<Vector> vs) {
  std::vector<Vector> out;
  out.reserve(vs.size());
  for (auto& v : vs) {
    const bool seen = std::any_of(out.begin(), out.end(), [&](const Vector& u) { return u == v; });
    if (!seen) out.push_back(std::move(v));
  }
  return out;
}

}  // namespace sivo
