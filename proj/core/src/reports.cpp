#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "paxsat/parallel.hpp"
#include "paxsat/pipeline.hpp"
#include "paxsat/stats.hpp"

namespace paxsat {

namespace {

/// Table-style variable order of the descriptives report.
const char* const kDescriptiveOrder[] = {
    "AIRCSIZE",        "APTSAT",          "BOARD(CALL)",     "BOARD(NOT)",
    "BOARD(NOW)",      "BUSYDAY",         "BUSYHOUR",        "CARGO",
    "CASCAD(ARR)",     "CASCAD(DEP)",     "DEL",             "DELDUR",
    "DISSAT(AIRLINE)", "DISSAT(CHECKIN)", "DISSAT(CURBSID)", "DISSAT(FLTINFO)",
    "DISSAT(SECINSP)", "DISSAT(WALKDST)", "DISSAT(WAYFIND)", "DISTANCE",
    "EXPENSIVE",       "EXPERCDFLIER",    "FIRSTTFLIER",     "FOOD",
    "FOOD(4/5)",       "FREQFLIER",       "GENBOOM",         "GENMILLEN",
    "GENSILEN",        "GENX",            "GENZ",            "INTNLDEST",
    "INTNLTERM",       "JETBRIDGE",       "LOADFAC",         "LSRFLIER",
    "PANDEMIC(EARLY)", "PANDEMIC(LATER)", "PANDEMIC(PRE)",   "PRCONNECT",
    "REDEYE",          "RUNWAYCONG",      "RUNWAYDIS",       "SCHLCOLL",
    "SCHLELEM",        "SCHLHIGH",        "SCHLMIDD",        "SHOPS",
    "SHOPS(4/5)",      "SMALLTERM",       "TERMDEN",         "TERMDIS",
    "WEATHER(DST)",    "WEATHER(ORG)",    "WIFI",            "WIFI(4/5)"};

Eigen::VectorXd descriptive_column(const FeatureTable& t, const std::string& name) {
  if (name == "APTSAT") return t.aptsat;
  int idx = t.feature(name);
  if (idx >= 0) return t.numeric.col(idx);
  // Reference-level dummies reconstructed from their complements.
  auto col = [&](const char* n) { return t.numeric.col(t.feature(n)); };
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(t.numeric.rows());
  if (name == "GENX")
    return ones - col("GENSILEN") - col("GENBOOM") - col("GENMILLEN") - col("GENZ");
  if (name == "SCHLCOLL") return ones - col("SCHLELEM") - col("SCHLMIDD") - col("SCHLHIGH");
  throw std::logic_error("descriptives: unknown variable " + name);
}

std::string fmt_stat(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

}  // namespace

void emit_descriptives(const FeatureTable& t, const std::string& csv_path,
                       const std::string& groups_csv_path) {
  {
    CsvWriter w(csv_path);
    w.write_row({"variable", "mean", "sd", "min", "max"});
    for (const char* name : kDescriptiveOrder) {
      Eigen::VectorXd v = descriptive_column(t, name);
      std::vector<double> data(v.data(), v.data() + v.size());
      double m = mean(data);
      double sd = data.size() > 1 ? sample_sd(data) : 0.0;
      w.write_row({name, fmt_stat(m), fmt_stat(sd), fmt_stat(v.minCoeff()),
                   fmt_stat(v.maxCoeff())});
    }
  }

  // Grouped on-time vs delayed mean satisfaction.
  CsvWriter g(groups_csv_path);
  g.write_row({"group", "on_time_mean", "delayed_mean"});
  Eigen::VectorXd del = t.numeric.col(t.feature("DEL"));
  auto emit_group = [&](const std::string& label, const Eigen::VectorXd& member) {
    double s_on = 0, n_on = 0, s_del = 0, n_del = 0;
    for (Eigen::Index i = 0; i < member.size(); ++i) {
      if (member[i] == 0.0) continue;
      if (del[i] > 0) {
        s_del += t.aptsat[i];
        n_del += 1;
      } else {
        s_on += t.aptsat[i];
        n_on += 1;
      }
    }
    g.write_row({label, n_on > 0 ? fmt_stat(s_on / n_on) : "", n_del > 0 ? fmt_stat(s_del / n_del) : ""});
  };
  for (const char* name :
       {"GENSILEN", "GENBOOM", "GENX", "GENMILLEN", "GENZ", "SCHLELEM", "SCHLMIDD", "SCHLHIGH",
        "SCHLCOLL", "FIRSTTFLIER", "EXPERCDFLIER", "FREQFLIER", "SMALLTERM", "INTNLTERM",
        "INTNLDEST", "WEATHER(DST)", "FOOD(4/5)", "SHOPS(4/5)", "WIFI(4/5)"})
    emit_group(name, descriptive_column(t, name));
  emit_group("ALL", Eigen::VectorXd::Ones(t.numeric.rows()));
}

// ---------------------------------------------------------------------------
// Fit tables

namespace {

bool is_bulk_control(const std::string& name) {
  return name.rfind("DEST=", 0) == 0 || name.rfind("AIRL=", 0) == 0 ||
         name.rfind("DATE=", 0) == 0 || name.rfind("TIMETOFLT[", 0) == 0;
}

std::string coef_cell(const PostSelectionFit& f, const std::string& name) {
  for (std::size_t j = 0; j < f.fit.names.size(); ++j) {
    if (f.fit.names[j] != name) continue;
    double b = f.fit.beta[static_cast<Eigen::Index>(j)];
    double se = f.fit.se[static_cast<Eigen::Index>(j)];
    double z = se > 0 ? b / se : 0.0;
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.4f%s", b, p_stars(normal_pvalue(z)).c_str());
    return buf;
  }
  for (const auto& dropped : f.dropped_controls)
    if (dropped == name) return "(lasso drop)";
  return "";
}

bool group_present(const PostSelectionFit& f, const char* prefix) {
  for (const auto& n : f.control_names)
    if (n.rfind(prefix, 0) == 0) return true;
  return false;
}

std::string fmt_ll(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", v);
  return buf;
}

}  // namespace

std::string emit_fit_table(const std::vector<LabeledFit>& fits) {
  if (fits.empty()) throw std::invalid_argument("emit_fit_table: no fits supplied");

  // Display rows: union of displayable coefficient names in first-seen order.
  std::vector<std::string> rows;
  auto add_row = [&](const std::string& n) {
    if (is_bulk_control(n)) return;
    if (std::find(rows.begin(), rows.end(), n) == rows.end()) rows.push_back(n);
  };
  for (const auto& lf : fits) {
    for (const auto& n : lf.fit.fit.names) add_row(n);
    for (const auto& n : lf.fit.dropped_controls) add_row(n);
  }

  std::ostringstream os;
  os << "Variable";
  for (const auto& lf : fits) os << "\t" << lf.label;
  os << "\n";
  for (const auto& r : rows) {
    os << r;
    for (const auto& lf : fits) os << "\t" << coef_cell(lf.fit, r);
    os << "\n";
  }
  auto line = [&](const char* label, auto fn) {
    os << label;
    for (const auto& lf : fits) os << "\t" << fn(lf);
    os << "\n";
  };
  line("Post Lasso Estimator", [](const LabeledFit& lf) { return lf.estimator + " PDS-LASSO"; });
  line("Clusters", [](const LabeledFit& lf) {
    return "AptTerm/Date (" + std::to_string(lf.fit.fit.n_clusters) + ")";
  });
  line("Log-likelihood", [](const LabeledFit& lf) { return fmt_ll(lf.fit.fit.loglik); });
  line("AIC Statistic", [](const LabeledFit& lf) { return fmt_ll(lf.fit.fit.aic); });
  line("BIC Statistic", [](const LabeledFit& lf) { return fmt_ll(lf.fit.fit.bic); });
  line("Flight Date Controls",
       [](const LabeledFit& lf) { return group_present(lf.fit, "DATE=") ? "yes" : "no"; });
  line("Airline Controls",
       [](const LabeledFit& lf) { return group_present(lf.fit, "AIRL=") ? "yes" : "no"; });
  line("Destination Controls",
       [](const LabeledFit& lf) { return group_present(lf.fit, "DEST=") ? "yes" : "no"; });
  line("Time-to-Flight Controls",
       [](const LabeledFit& lf) { return group_present(lf.fit, "TIMETOFLT[") ? "yes" : "no"; });
  line("SMOTE Sampling", [](const LabeledFit& lf) { return lf.smote ? "yes" : "no"; });
  line("Nr Observations", [](const LabeledFit& lf) { return std::to_string(lf.n); });
  os << "Notes: significance *** p<0.01, ** p<0.05, * p<0.10; clustered (terminal x survey "
        "date) standard errors; date/airline/destination/time-to-flight dummy estimates "
        "omitted.\n";
  return os.str();
}

std::string emit_delay_table(const DelayStageFit& d) {
  std::ostringstream os;
  os << "Variable\t(1)\n";
  for (std::size_t j = 0; j < d.fit.names.size(); ++j) {
    double b = d.fit.beta[static_cast<Eigen::Index>(j)];
    double se = j < static_cast<std::size_t>(d.fit.se.size())
                    ? d.fit.se[static_cast<Eigen::Index>(j)]
                    : 0.0;
    double z = se > 0 ? b / se : 0.0;
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.4f%s", b, p_stars(normal_pvalue(z)).c_str());
    os << d.fit.names[j] << "\t" << buf << "\n";
  }
  os << "Estimator\t" << (d.fit.sigma_u ? "RE-Probit" : "Probit") << "\n";
  if (d.fit.sigma_u) os << "sigma_u\t" << format_double(*d.fit.sigma_u) << "\n";
  os << "Log-likelihood\t" << fmt_ll(d.fit.loglik) << "\n";
  os << "AIC Statistic\t" << fmt_ll(d.fit.aic) << "\n";
  os << "BIC Statistic\t" << fmt_ll(d.fit.bic) << "\n";
  os << "Nr Observations\t" << d.fit.n << "\n";
  for (const auto& note : d.notes) os << "note: " << note << "\n";
  return os.str();
}

std::vector<SmoteStudyRow> emit_smote_study(const DesignMatrix& design,
                                            const std::vector<double>& shares, int replications,
                                            std::uint64_t seed, const PdsOptions& pds,
                                            const FitOptions& fit, int threads,
                                            const std::string& csv_path) {
  if (replications < 1) throw ConfigError("smote study: replications >= 1");
  int flag = design.col("BSNFLIER");
  int del = design.col("DEL");
  if (flag < 0 || del < 0)
    throw ConfigError("smote study: design needs BSNFLIER and DEL columns");
  std::int64_t n_min = 0;
  for (Eigen::Index i = 0; i < design.n(); ++i) n_min += design.X(i, flag) != 0.0;
  std::int64_t n_maj = design.n() - n_min;

  std::vector<SmoteStudyRow> out(shares.size());
  for (std::size_t s = 0; s < shares.size(); ++s) {
    SmoteStudyRow row;
    row.share = shares[s];
    row.minority_size = smote_target_count(n_maj, n_min, shares[s]);
    row.total_size = n_maj + row.minority_size;

    std::vector<double> estimates(static_cast<std::size_t>(replications));
    parallel_for(replications, threads, [&](int r) {
      SmoteConfig cfg;
      cfg.target_share = shares[s];
      cfg.seed = seed + static_cast<std::uint64_t>(r);
      DesignMatrix aug = smote_oversample(design, cfg);
      PostSelectionFit f = pds_ordered_fit(aug, pds, fit);
      double b = 0;
      for (std::size_t j = 0; j < f.fit.names.size(); ++j)
        if (f.fit.names[j] == "DEL") b = f.fit.beta[static_cast<Eigen::Index>(j)];
      estimates[static_cast<std::size_t>(r)] = b;
    });
    row.mean_estimate = mean(estimates);
    if (replications > 1) row.se_estimate = sample_sd(estimates);
    out[s] = row;
  }

  CsvWriter w(csv_path);
  w.write_row({"share", "minority_size", "total_size", "mean_del_estimate", "se_del_estimate"});
  for (const auto& r : out)
    w.write_row({format_double(r.share), std::to_string(r.minority_size),
                 std::to_string(r.total_size), format_double(r.mean_estimate),
                 r.se_estimate ? format_double(*r.se_estimate) : ""});
  return out;
}

}  // namespace paxsat
