#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "annokn/adaptive_lasso.hpp"
#include "annokn/data_model.hpp"

namespace annokn {

/// Lasso coefficient-difference statistics, w_j = |b_j| - |b_{j+p}| (M = 1).
struct FeatureStats {
  Vector w;
};

struct SelectionResult {
  /// +infinity when no threshold attains the target.
  double threshold = 0.0;
  /// In [0, 1]; j is selected at level q iff q_values[j] <= q.
  Vector q_values;
  /// 0-based indices, ascending.
  std::vector<int> selected;
  double fdp_estimate = 0.0;
  double q = 0.0;
};

FeatureStats lcd_stats(const Vector& beta, Eigen::Index p);
inline FeatureStats lcd_stats(const FitResult& fit, Eigen::Index p) { return lcd_stats(fit.beta, p); }

/// Knockoff+ estimate (1 + #{w <= -t}) / max(1, #{w >= t}).
double fdp_at(const Vector& w, double t);

/// Knockoff+ threshold T = min{t in {|w_j| : w_j != 0} : fdp_at(w, t) <= q},
/// selection {j : w_j >= T} and q-values. Throws InvalidQ unless 0 < q < 1.
SelectionResult knockoff_threshold(const Vector& w, double q);
inline SelectionResult knockoff_threshold(const FeatureStats& stats, double q) {
  return knockoff_threshold(stats.w, q);
}

/// `snp w q_value selected` TSV.
void write_selection_tsv(std::ostream& out, const std::vector<std::string>& snp_ids, const Vector& w,
                         const SelectionResult& selection);

struct SelectionTable {
  std::vector<std::string> snp_ids;
  Vector w;
  Vector q_values;
  std::vector<bool> selected;
};
SelectionTable read_selection_tsv(const std::string& path);

}  // namespace annokn
