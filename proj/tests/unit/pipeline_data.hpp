#pragma once

#include "annokn/knockoff_gen.hpp"
#include "support.hpp"

namespace test {

// AR(1) design with a sparse signal on the first covariates, Gaussian
// knockoffs from the true correlation, and an index-like annotation that
// ranks the signal block first.
struct IndividualCase {
  annokn::Matrix x;
  annokn::Matrix xk;
  annokn::Vector y;
  annokn::Matrix xx;
  annokn::Matrix sigma;
  std::vector<int> support;
};

inline IndividualCase individual_case(std::uint64_t seed, Eigen::Index n, Eigen::Index p, int causal,
                                      double amplitude) {
  IndividualCase c;
  c.sigma = ar1(p, 0.5);
  const annokn::Matrix upper = Eigen::LLT<annokn::Matrix>(c.sigma).matrixU();
  c.x = annokn::standardize(random_matrix(annokn::derive_seed(seed, 1), n, p) * upper).values();
  annokn::Vector beta = annokn::Vector::Zero(p);
  for (int j = 0; j < causal; ++j) {
    beta(2 * j) = (j % 2 == 0 ? amplitude : -amplitude);
    c.support.push_back(2 * j);
  }
  c.y = annokn::standardize_vector(c.x * beta + random_vector(annokn::derive_seed(seed, 2), n));
  const auto model = annokn::KnockoffModel::equicorrelated(c.sigma);
  c.xk = annokn::sample_knockoffs(annokn::StandardizedMatrix::from_raw(c.x), model, annokn::derive_seed(seed, 3))
             .values();
  c.xx.resize(n, 2 * p);
  c.xx << c.x, c.xk;
  return c;
}

inline annokn::AnnotationMatrix index_annotation(Eigen::Index p) {
  return annokn::AnnotationMatrix::from_raw(annokn::Vector::LinSpaced(p, 1.0, static_cast<double>(p)));
}

}  // namespace test
