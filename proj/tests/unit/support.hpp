#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "curlforce/fieldkit.hpp"

namespace curlforce::testing {

inline Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

inline Box cube(int dim, double lo, double hi) {
  return Box::closed(Eigen::VectorXd::Constant(dim, lo), Eigen::VectorXd::Constant(dim, hi));
}

inline VectorField field(const std::vector<std::string>& components, const Box& domain,
                         const ConstantTable& constants = {}) {
  return VectorField::parse(components, domain.dimension(), constants, domain);
}

inline ScalarField scalar(const std::string& source, const Box& domain,
                          const ConstantTable& constants = {}) {
  return ScalarField::parse(source, domain.dimension(), constants, domain);
}

inline Region quasi(const Box& box, int count, std::uint64_t seed = 7) {
  return Region{box, QuasiRandomPlan{count, seed}};
}

inline Region grid(const Box& box, int per_axis) {
  return Region{box, GridPlan{std::vector<int>(static_cast<std::size_t>(box.dimension()), per_axis)}};
}

}  // namespace curlforce::testing
