#include "paxsat/postselect.hpp"

namespace paxsat {

DesignMatrix reduce_design(const DesignMatrix& m, const std::vector<int>& selected_controls) {
  std::vector<Eigen::Index> keep;
  std::vector<std::uint8_t> is_control_selected(m.names.size(), 0);
  {
    std::vector<Eigen::Index> controls;
    for (Eigen::Index j = 0; j < m.p(); ++j)
      if (m.penalized[static_cast<std::size_t>(j)]) controls.push_back(j);
    for (int s : selected_controls)
      is_control_selected[static_cast<std::size_t>(controls[static_cast<std::size_t>(s)])] = 1;
  }
  for (Eigen::Index j = 0; j < m.p(); ++j)
    if (!m.penalized[static_cast<std::size_t>(j)] || is_control_selected[static_cast<std::size_t>(j)])
      keep.push_back(j);

  DesignMatrix out;
  out.y = m.y;
  out.cluster_id = m.cluster_id;
  out.synthetic = m.synthetic;
  out.outcome_categories = m.outcome_categories;
  out.notes = m.notes;
  out.X.resize(m.n(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    out.X.col(static_cast<Eigen::Index>(j)) = m.X.col(keep[j]);
    out.names.push_back(m.names[static_cast<std::size_t>(keep[j])]);
    out.penalized.push_back(0);  // everything is retained in the refit
  }
  return out;
}

PostSelectionFit pds_ordered_fit(const DesignMatrix& m, const PdsOptions& pds_opt,
                                 const FitOptions& fit_opt) {
  std::vector<Eigen::Index> focal_idx, control_idx;
  for (Eigen::Index j = 0; j < m.p(); ++j)
    (m.penalized[static_cast<std::size_t>(j)] ? control_idx : focal_idx).push_back(j);

  PostSelectionFit out;
  Eigen::MatrixXd focal(m.n(), static_cast<Eigen::Index>(focal_idx.size()));
  Eigen::MatrixXd controls(m.n(), static_cast<Eigen::Index>(control_idx.size()));
  for (std::size_t j = 0; j < focal_idx.size(); ++j) {
    focal.col(static_cast<Eigen::Index>(j)) = m.X.col(focal_idx[j]);
    out.focal_names.push_back(m.names[static_cast<std::size_t>(focal_idx[j])]);
  }
  for (std::size_t j = 0; j < control_idx.size(); ++j) {
    controls.col(static_cast<Eigen::Index>(j)) = m.X.col(control_idx[j]);
    out.control_names.push_back(m.names[static_cast<std::size_t>(control_idx[j])]);
  }

  out.selection =
      pds_select(m.y, focal, out.focal_names, controls, out.control_names, m.cluster_id, pds_opt);

  std::vector<std::uint8_t> chosen(out.control_names.size(), 0);
  for (int s : out.selection.selected) chosen[static_cast<std::size_t>(s)] = 1;
  for (std::size_t j = 0; j < out.control_names.size(); ++j)
    (chosen[j] ? out.selected_controls : out.dropped_controls).push_back(out.control_names[j]);

  DesignMatrix reduced = reduce_design(m, out.selection.selected);
  out.fit = fit_ordered_probit(reduced, fit_opt);
  return out;
}

}  // namespace paxsat
