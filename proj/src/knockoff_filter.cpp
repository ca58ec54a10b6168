#include "annokn/knockoff_filter.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "annokn/error.hpp"
#include "annokn/io.hpp"

namespace annokn {

namespace {

double ratio(std::size_t negatives, std::size_t positives) {
  return (1.0 + static_cast<double>(negatives)) / static_cast<double>(std::max<std::size_t>(positives, 1));
}

}  // namespace

FeatureStats lcd_stats(const Vector& beta, Eigen::Index p) {
  if (beta.size() != 2 * p) {
    throw DimensionMismatch("LCD statistics need 2p coefficients", static_cast<std::size_t>(2 * p),
                            static_cast<std::size_t>(beta.size()));
  }
  return FeatureStats{beta.head(p).cwiseAbs() - beta.tail(p).cwiseAbs()};
}

double fdp_at(const Vector& w, double t) {
  std::size_t neg = 0;
  std::size_t pos = 0;
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    if (w(j) <= -t) ++neg;
    if (w(j) >= t) ++pos;
  }
  return ratio(neg, pos);
}

SelectionResult knockoff_threshold(const Vector& w, double q) {
  if (!(q > 0.0 && q < 1.0)) throw InvalidQ(q);
  if (!w.allFinite()) throw NonFiniteInput("feature statistics contain non-finite values");

  // Sorted positive and negative magnitudes; counts at any t come from
  // binary searches.
  std::vector<double> pos, neg;
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    if (w(j) > 0) pos.push_back(w(j));
    if (w(j) < 0) neg.push_back(-w(j));
  }
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end());
  auto count_at_least = [](const std::vector<double>& v, double t) {
    return static_cast<std::size_t>(v.end() - std::lower_bound(v.begin(), v.end(), t));
  };
  auto estimate = [&](double t) { return ratio(count_at_least(neg, t), count_at_least(pos, t)); };

  std::vector<double> candidates;
  candidates.reserve(pos.size() + neg.size());
  candidates.insert(candidates.end(), pos.begin(), pos.end());
  candidates.insert(candidates.end(), neg.begin(), neg.end());
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  // running minimum of the estimate over candidates <= t, for q-values
  std::vector<double> running_min(candidates.size());
  SelectionResult out;
  out.q = q;
  out.threshold = std::numeric_limits<double>::infinity();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const double e = estimate(candidates[k]);
    if (e <= q && !std::isfinite(out.threshold)) out.threshold = candidates[k];
    best = std::min(best, e);
    running_min[k] = best;
  }

  out.q_values = Vector::Ones(w.size());
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    if (w(j) <= 0) continue;
    const auto k = static_cast<std::size_t>(std::upper_bound(candidates.begin(), candidates.end(), w(j)) -
                                            candidates.begin()) - 1;
    out.q_values(j) = std::min(1.0, running_min[k]);
  }
  if (std::isfinite(out.threshold)) {
    for (Eigen::Index j = 0; j < w.size(); ++j)
      if (w(j) >= out.threshold) out.selected.push_back(static_cast<int>(j));
    out.fdp_estimate = estimate(out.threshold);
  } else {
    out.fdp_estimate = 1.0;
  }
  return out;
}

void write_selection_tsv(std::ostream& out, const std::vector<std::string>& snp_ids, const Vector& w,
                         const SelectionResult& selection) {
  if (static_cast<Eigen::Index>(snp_ids.size()) != w.size() || selection.q_values.size() != w.size()) {
    throw DimensionMismatch("selection rows", static_cast<std::size_t>(w.size()), snp_ids.size());
  }
  std::vector<bool> chosen(snp_ids.size(), false);
  for (int j : selection.selected) chosen[static_cast<std::size_t>(j)] = true;
  out << "snp\tw\tq_value\tselected\n";
  for (std::size_t j = 0; j < snp_ids.size(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    out << snp_ids[j] << '\t' << format_double(w(jj)) << '\t' << format_double(selection.q_values(jj)) << '\t'
        << (chosen[j] ? 1 : 0) << '\n';
  }
}

SelectionTable read_selection_tsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open '" + path + "'");
  std::string line;
  std::size_t line_no = 0;
  SelectionTable t;
  std::vector<double> w, q;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != "snp\tw\tq_value\tselected") throw ParseError(1, "selection header must be 'snp w q_value selected'");
      continue;
    }
    std::istringstream fields(line);
    std::string id, ws, qs, sel;
    if (!std::getline(fields, id, '\t') || !std::getline(fields, ws, '\t') || !std::getline(fields, qs, '\t') ||
        !std::getline(fields, sel, '\t')) {
      throw ParseError(line_no, "expected 4 fields");
    }
    try {
      w.push_back(std::stod(ws));
      q.push_back(std::stod(qs));
    } catch (const std::exception&) {
      throw ParseError(line_no, "non-numeric statistic");
    }
    if (sel != "0" && sel != "1") throw ParseError(line_no, "selected must be 0 or 1");
    t.snp_ids.push_back(id);
    t.selected.push_back(sel == "1");
  }
  if (t.snp_ids.empty()) throw ParseError(line_no, "no data rows");
  t.w = Eigen::Map<Vector>(w.data(), static_cast<Eigen::Index>(w.size()));
  t.q_values = Eigen::Map<Vector>(q.data(), static_cast<Eigen::Index>(q.size()));
  return t;
}

}  // namespace annokn
