#pragma once

#include "paxsat/lasso.hpp"
#include "paxsat/probit.hpp"

namespace paxsat {

/// Two-step estimate: PDS-LASSO over the penalized control block, then an
/// ordered probit on the focal columns plus the selected controls.
struct PostSelectionFit {
  OrderedFit fit;
  PdsResult selection;
  std::vector<std::string> focal_names;
  std::vector<std::string> control_names;
  std::vector<std::string> selected_controls;
  std::vector<std::string> dropped_controls;  // eliminated by the penalty
};

/// The ordinal outcome is treated as numeric in the selection regressions;
/// the refit is the ordered probit on the reduced design.
PostSelectionFit pds_ordered_fit(const DesignMatrix& m, const PdsOptions& pds_opt = {},
                                 const FitOptions& fit_opt = {});

/// The reduced design used by the refit (focal + selected controls).
DesignMatrix reduce_design(const DesignMatrix& m, const std::vector<int>& selected_controls);

}  // namespace paxsat
