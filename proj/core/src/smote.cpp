#include "paxsat/smote.hpp"

#include <cmath>
#include <limits>

#include "paxsat/rng.hpp"

namespace paxsat {

std::int64_t smote_target_count(std::int64_t n_majority, std::int64_t n_minority,
                                double target_share) {
  if (n_majority <= 0 || n_minority <= 0)
    throw std::invalid_argument("smote_target_count: empty class");
  if (!(target_share > 0 && target_share < 1))
    throw std::invalid_argument("smote_target_count: share outside (0,1)");
  double current = static_cast<double>(n_minority) / static_cast<double>(n_majority + n_minority);
  if (target_share <= current)
    throw std::invalid_argument("smote_target_count: target share " +
                                std::to_string(target_share) +
                                " does not exceed the current share " + std::to_string(current));
  return static_cast<std::int64_t>(
      std::floor(static_cast<double>(n_majority) * target_share / (1.0 - target_share)));
}

DesignMatrix smote_oversample(const DesignMatrix& m, const SmoteConfig& cfg) {
  const Eigen::Index n = m.n();
  int flag_col = m.col(cfg.minority_flag);
  if (flag_col < 0) throw std::invalid_argument("smote: no column '" + cfg.minority_flag + "'");
  if (cfg.k_neighbors < 1) throw std::invalid_argument("smote: k_neighbors >= 1");

  std::vector<Eigen::Index> minority, majority;
  for (Eigen::Index i = 0; i < n; ++i)
    (m.X(i, flag_col) != 0.0 ? minority : majority).push_back(i);
  if (minority.size() < 2)
    throw std::invalid_argument("smote: need at least 2 minority rows for a nearest neighbor");

  std::vector<Eigen::Index> feat_cols;
  if (cfg.feature_columns.empty()) {
    for (Eigen::Index j = 0; j < m.p(); ++j) feat_cols.push_back(j);
  } else {
    for (const auto& name : cfg.feature_columns) {
      int j = m.col(name);
      if (j < 0) throw std::invalid_argument("smote: no feature column '" + name + "'");
      feat_cols.push_back(j);
    }
  }

  double current_share =
      static_cast<double>(minority.size()) / static_cast<double>(n);
  std::int64_t n_synth = 0;
  if (std::abs(cfg.target_share - current_share) > 1e-12) {
    std::int64_t target = smote_target_count(static_cast<std::int64_t>(majority.size()),
                                             static_cast<std::int64_t>(minority.size()),
                                             cfg.target_share);
    n_synth = target - static_cast<std::int64_t>(minority.size());
  }

  // Distance space over the minority block; optionally standardized.
  const std::size_t nm = minority.size();
  Eigen::MatrixXd F(nm, static_cast<Eigen::Index>(feat_cols.size()));
  for (std::size_t r = 0; r < nm; ++r)
    for (std::size_t c = 0; c < feat_cols.size(); ++c)
      F(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          m.X(minority[r], feat_cols[c]);
  if (cfg.standardize_distance) {
    for (Eigen::Index c = 0; c < F.cols(); ++c) {
      double mu = F.col(c).mean();
      double sd = std::sqrt((F.col(c).array() - mu).square().sum() /
                            static_cast<double>(F.rows()));
      if (sd > 0) F.col(c) = (F.col(c).array() - mu) / sd;
    }
  }

  // Nearest minority neighbor per minority row (k = 1 per the procedure;
  // larger k picks uniformly among the k nearest).
  std::vector<std::vector<std::size_t>> neighbors(nm);
  for (std::size_t r = 0; r < nm; ++r) {
    std::vector<std::pair<double, std::size_t>> dist;
    dist.reserve(nm - 1);
    for (std::size_t s = 0; s < nm; ++s) {
      if (s == r) continue;
      dist.push_back({(F.row(static_cast<Eigen::Index>(r)) - F.row(static_cast<Eigen::Index>(s)))
                          .squaredNorm(),
                      s});
    }
    std::sort(dist.begin(), dist.end());  // ties resolve to the lowest row index
    int k = std::min<int>(cfg.k_neighbors, static_cast<int>(dist.size()));
    for (int i = 0; i < k; ++i) neighbors[r].push_back(dist[static_cast<std::size_t>(i)].second);
  }

  DesignMatrix out;
  out.names = m.names;
  out.penalized = m.penalized;
  out.notes = m.notes;
  out.outcome_categories = m.outcome_categories;
  out.y.resize(n + n_synth);
  out.X.resize(n + n_synth, m.p());
  out.y.head(n) = m.y;
  out.X.topRows(n) = m.X;
  out.cluster_id = m.cluster_id;
  out.synthetic.assign(static_cast<std::size_t>(n + n_synth), 0);

  // Identify 0/1 columns up front in case synthetic rows are re-binarized.
  std::vector<std::uint8_t> is_dummy(static_cast<std::size_t>(m.p()), 0);
  if (cfg.rebinarize_dummies) {
    for (Eigen::Index j = 0; j < m.p(); ++j) {
      bool dummy = true;
      for (Eigen::Index i = 0; i < n && dummy; ++i)
        dummy = m.X(i, j) == 0.0 || m.X(i, j) == 1.0;
      is_dummy[static_cast<std::size_t>(j)] = dummy;
    }
  }

  Rng rng = make_rng(cfg.seed);
  for (std::int64_t s = 0; s < n_synth; ++s) {
    std::size_t base_pos = static_cast<std::size_t>(s) % nm;  // cycle in index order
    const auto& cand = neighbors[base_pos];
    std::size_t nb_pos = cand.size() == 1
                             ? cand[0]
                             : cand[static_cast<std::size_t>(rng.uniform_int(
                                   0, static_cast<std::int64_t>(cand.size()) - 1))];
    Eigen::Index base = minority[base_pos], nb = minority[nb_pos];
    double u = rng.uniform();
    Eigen::Index row = n + s;
    out.X.row(row) = m.X.row(base);
    for (Eigen::Index c : feat_cols)
      out.X(row, c) = m.X(base, c) + u * (m.X(nb, c) - m.X(base, c));
    if (cfg.rebinarize_dummies)
      for (Eigen::Index j = 0; j < m.p(); ++j)
        if (is_dummy[static_cast<std::size_t>(j)]) out.X(row, j) = std::round(out.X(row, j));
    out.X(row, flag_col) = 1.0;  // synthetic rows are minority members
    out.y[row] = cfg.interpolate_outcome
                     ? std::round(m.y[base] + u * (m.y[nb] - m.y[base]))
                     : m.y[base];
    out.cluster_id.push_back(m.cluster_id[static_cast<std::size_t>(base)]);
    out.synthetic[static_cast<std::size_t>(row)] = 1;
  }
  return out;
}

}  // namespace paxsat
