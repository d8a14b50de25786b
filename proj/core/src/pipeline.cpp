#include "paxsat/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "paxsat/csv.hpp"

namespace fs = std::filesystem;

namespace paxsat {

namespace {

const std::map<std::string, Variant>& variant_table() {
  static const std::map<std::string, Variant> table = {
      {"col1_baseline", Variant::col1_baseline},
      {"col2_smote", Variant::col2_smote},
      {"col3_del30", Variant::col3_del30},
      {"col4_dissat", Variant::col4_dissat},
      {"col5_full", Variant::col5_full},
      {"col6_attribution", Variant::col6_attribution},
      {"col7_board75", Variant::col7_board75},
      {"col8_board90", Variant::col8_board90},
      {"t4_interactions", Variant::t4_interactions},
      {"t4_duration", Variant::t4_duration},
  };
  return table;
}

}  // namespace

const char* to_string(Variant v) {
  for (const auto& [name, value] : variant_table())
    if (value == v) return name.c_str();
  return "?";
}

Variant parse_variant(const std::string& s) {
  auto it = variant_table().find(s);
  if (it == variant_table().end()) {
    std::string msg = "unknown variant '" + s + "'; valid:";
    for (const auto& [name, value] : variant_table()) {
      (void)value;
      msg += " " + name;
    }
    throw ConfigError(msg);
  }
  return it->second;
}

DelayEncoding variant_encoding(Variant v) {
  switch (v) {
    case Variant::col7_board75:
    case Variant::col8_board90:
      return DelayEncoding::DelBoard;
    case Variant::t4_interactions:
      return DelayEncoding::DelFlier;
    case Variant::t4_duration:
      return DelayEncoding::DurationSegments;
    default:
      return DelayEncoding::Del;
  }
}

void apply_variant(PipelineConfig& cfg) {
  auto& f = cfg.features;
  f.include_groups = {"timetoflt", "dest", "airl", "date"};
  f.delay_threshold_min = 15;
  f.board_quantile = 0.75;
  switch (cfg.variant) {
    case Variant::col1_baseline:
      break;
    case Variant::col2_smote:
      if (!cfg.smote) cfg.smote = SmoteConfig{};
      break;
    case Variant::col3_del30:
      f.delay_threshold_min = 30;
      break;
    case Variant::col4_dissat:
      f.include_groups.insert("dissat");
      break;
    case Variant::col8_board90:
      f.board_quantile = 0.90;
      [[fallthrough]];
    case Variant::col5_full:
    case Variant::col6_attribution:
    case Variant::col7_board75:
    case Variant::t4_interactions:
    case Variant::t4_duration:
      f.include_groups.insert("dissat");
      f.include_groups.insert("termdis");
      f.include_groups.insert("pandemic");
      break;
  }
  if (cfg.smote && cfg.smote->seed == 0) cfg.smote->seed = cfg.seed;
  cfg.synth.seed = cfg.seed;
}

// ---------------------------------------------------------------------------
// Config file

namespace {

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw ConfigError("config key '" + key + "': expected a boolean, got '" + v + "'");
}

double parse_num(const std::string& v, const std::string& key) {
  try {
    std::size_t used = 0;
    double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected a number, got '" + v + "'");
  }
}

}  // namespace

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  PipelineConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  auto set_target = [&](const std::string& name, bool is_mean, double v) {
    auto& t = cfg.synth.targets[name];
    (is_mean ? t.first : t.second) = v;
  };
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto eq = line.find('=');
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));

    if (key == "variant")
      cfg.variant = parse_variant(value);
    else if (key == "seed")
      cfg.seed = static_cast<std::uint64_t>(parse_num(value, key));
    else if (key == "out")
      cfg.out_dir = value;
    else if (key == "threads")
      cfg.threads = static_cast<int>(parse_num(value, key));
    else if (key == "generate.n")
      cfg.synth.n_respondents = static_cast<std::int64_t>(parse_num(value, key));
    else if (key == "generate.trait_loading")
      cfg.synth.trait_loading = parse_num(value, key);
    else if (key == "generate.confound_strength")
      cfg.synth.confound_strength = parse_num(value, key);
    else if (key == "generate.delay_effect")
      cfg.synth.delay_effect_true = parse_num(value, key);
    else if (key == "generate.blame_mode") {
      if (value == "pooled_delay")
        cfg.synth.blame_mode = BlameMode::PooledDelay;
      else if (value == "internal_only")
        cfg.synth.blame_mode = BlameMode::InternalOnly;
      else
        throw ConfigError("generate.blame_mode: 'pooled_delay' or 'internal_only'");
    } else if (key == "generate.target_del_mean")
      set_target("DEL", true, parse_num(value, key));
    else if (key == "generate.target_aptsat_mean")
      set_target("APTSAT", true, parse_num(value, key));
    else if (key == "generate.target_aptsat_sd")
      set_target("APTSAT", false, parse_num(value, key));
    else if (key == "generate.target_loadfac_mean")
      set_target("LOADFAC", true, parse_num(value, key));
    else if (key == "generate.target_loadfac_sd")
      set_target("LOADFAC", false, parse_num(value, key));
    else if (key == "ingest.surveys") {
      cfg.surveys_path = value;
      cfg.generate = false;
    } else if (key == "ingest.flights") {
      cfg.flights_path = value;
      cfg.generate = false;
    } else if (key == "ingest.weather") {
      cfg.weather_path = value;
      cfg.generate = false;
    } else if (key == "features.delay_threshold_min")
      cfg.features.delay_threshold_min = static_cast<int>(parse_num(value, key));
    else if (key == "features.board_quantile")
      cfg.features.board_quantile = parse_num(value, key);
    else if (key == "features.peer_mode") {
      if (value == "month_hour")
        cfg.features.peer_mode = FeatureSpec::PeerGroupMode::MonthHour;
      else if (value == "date_hour")
        cfg.features.peer_mode = FeatureSpec::PeerGroupMode::DateHour;
      else
        throw ConfigError("features.peer_mode: 'month_hour' or 'date_hour'");
    } else if (key == "features.dissat_include_self")
      cfg.features.dissat_include_self = parse_bool(value, key);
    else if (key == "lasso.c")
      cfg.lasso.c = parse_num(value, key);
    else if (key == "lasso.gamma")
      cfg.lasso.gamma = parse_num(value, key);
    else if (key == "smote.target_share") {
      if (!cfg.smote) cfg.smote = SmoteConfig{};
      cfg.smote->target_share = parse_num(value, key);
    } else if (key == "smote.seed") {
      if (!cfg.smote) cfg.smote = SmoteConfig{};
      cfg.smote->seed = static_cast<std::uint64_t>(parse_num(value, key));
    } else if (key == "smote.k_neighbors") {
      if (!cfg.smote) cfg.smote = SmoteConfig{};
      cfg.smote->k_neighbors = static_cast<int>(parse_num(value, key));
    } else if (key == "smote.standardize") {
      if (!cfg.smote) cfg.smote = SmoteConfig{};
      cfg.smote->standardize_distance = parse_bool(value, key);
    } else if (key == "smote.rebinarize") {
      if (!cfg.smote) cfg.smote = SmoteConfig{};
      cfg.smote->rebinarize_dummies = parse_bool(value, key);
    } else if (key == "attribute.random_intercept")
      cfg.delay_stage_random_intercept = parse_bool(value, key);
    else if (key == "study.replications")
      cfg.study_replications = static_cast<int>(parse_num(value, key));
    else if (key == "study.shares") {
      cfg.study_shares.clear();
      std::stringstream ss(value);
      std::string tok;
      while (std::getline(ss, tok, ','))
        cfg.study_shares.push_back(parse_num(tok, key));
    } else
      throw ConfigError("unknown config key '" + key + "'");
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Checksums and manifest

std::string file_checksum(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("checksum: cannot open '" + path + "'");
  std::uint64_t h = 1469598103934665603ull;
  char buf[65536];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i)
      h = (h ^ static_cast<unsigned char>(buf[i])) * 1099511628211ull;
    if (in.eof()) break;
  }
  char hex[20];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

namespace {

std::string hash_string(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) h = (h ^ c) * 1099511628211ull;
  char hex[20];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

std::string canonical_config(const PipelineConfig& cfg) {
  std::ostringstream os;
  os << "variant=" << to_string(cfg.variant) << "\nseed=" << cfg.seed
     << "\ngenerate=" << cfg.generate << "\nn=" << cfg.synth.n_respondents
     << "\ntrait_loading=" << format_double(cfg.synth.trait_loading)
     << "\nconfound_strength=" << format_double(cfg.synth.confound_strength)
     << "\ndelay_effect=" << format_double(cfg.synth.delay_effect_true)
     << "\nblame_mode=" << static_cast<int>(cfg.synth.blame_mode)
     << "\ndelay_threshold_min=" << cfg.features.delay_threshold_min
     << "\nboard_quantile=" << format_double(cfg.features.board_quantile)
     << "\npeer_mode=" << static_cast<int>(cfg.features.peer_mode)
     << "\nlasso_c=" << format_double(cfg.lasso.c)
     << "\nlasso_gamma=" << format_double(cfg.lasso.gamma);
  os << "\ngroups=";
  for (const auto& g : cfg.features.include_groups) os << g << ",";
  if (cfg.smote)
    os << "\nsmote_share=" << format_double(cfg.smote->target_share)
       << "\nsmote_seed=" << cfg.smote->seed;
  for (const auto& [name, ms] : cfg.synth.targets)
    os << "\ntarget_" << name << "=" << format_double(ms.first) << ","
       << format_double(ms.second);
  return os.str();
}

/// Tracks artifacts; files are written under a .partial suffix and promoted
/// when their stage completes.
class ArtifactLog {
 public:
  explicit ArtifactLog(std::string out_dir) : dir_(std::move(out_dir)) {
    fs::create_directories(dir_);
  }

  std::string partial_path(const std::string& name) {
    pending_.push_back(name);
    return (fs::path(dir_) / (name + ".partial")).string();
  }

  void commit_stage() {
    for (const auto& name : pending_) {
      fs::rename(fs::path(dir_) / (name + ".partial"), fs::path(dir_) / name);
      finished_.push_back(name);
    }
    pending_.clear();
  }

  const std::vector<std::string>& finished() const { return finished_; }
  std::string path_of(const std::string& name) const {
    return (fs::path(dir_) / name).string();
  }

 private:
  std::string dir_;
  std::vector<std::string> pending_;
  std::vector<std::string> finished_;
};

struct StageError : std::runtime_error {
  StageError(const std::string& stage, const std::string& cause)
      : std::runtime_error("stage " + stage + ": " + cause) {}
};

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& raw_cfg, Stage upto) {
  PipelineConfig cfg = raw_cfg;
  apply_variant(cfg);

  PipelineResult result;
  ArtifactLog log(cfg.out_dir);

  auto stage_wanted = [&](Stage s) {
    if (upto == Stage::SmoteStudy)
      return s == Stage::Generate || s == Stage::Ingest || s == Stage::Features ||
             s == Stage::SmoteStudy;
    if (s == Stage::SmoteStudy) return false;
    return static_cast<int>(s) <= static_cast<int>(upto);
  };

  std::vector<JoinedRecord> kept;
  FeatureTable table;
  DesignMatrix design;
  std::optional<PostSelectionFit> fitted;
  std::optional<DelayStageFit> delay_fit;

  auto run_stage = [&](Stage s, const char* name, auto&& body) {
    if (!stage_wanted(s)) return;
    try {
      body();
      log.commit_stage();
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw StageError(name, e.what());
    }
  };

  std::string surveys_path = cfg.surveys_path;
  std::string flights_path = cfg.flights_path;
  std::string weather_path = cfg.weather_path;

  run_stage(Stage::Generate, "generate", [&] {
    if (!cfg.generate) return;
    SyntheticDataset ds = synthesize_dataset(cfg.synth);
    surveys_path = log.partial_path("surveys.csv");
    write_surveys_csv(ds.surveys, surveys_path);
    flights_path = log.partial_path("flights.csv");
    write_flights_csv(ds.flights, flights_path);
    weather_path = log.partial_path("weather.csv");
    write_weather_csv(ds.weather, weather_path);
    write_truth(ds.truth, log.partial_path("truth.txt"));
    // Later stages read the promoted files.
    surveys_path = log.path_of("surveys.csv");
    flights_path = log.path_of("flights.csv");
    weather_path = log.path_of("weather.csv");
  });

  run_stage(Stage::Ingest, "ingest", [&] {
    if (surveys_path.empty() || flights_path.empty() || weather_path.empty())
      throw ConfigError("ingest stage needs surveys/flights/weather paths or the generate stage");
    auto surveys = load_surveys(surveys_path);
    auto flights = load_flights(flights_path);
    auto weather = load_weather(weather_path);
    JoinResult joined = join_records(surveys, flights, weather);
    FilterResult filtered = filter_sample(joined.joined);
    kept = std::move(filtered.kept);

    std::ofstream sum(log.partial_path("ingest_summary.txt"), std::ios::binary);
    sum << "surveys: " << surveys.size() << "\n";
    sum << "flights: " << flights.size() << "\n";
    sum << "weather: " << weather.size() << "\n";
    sum << "joined: " << joined.joined.size() << "\n";
    std::map<std::string, int> reasons;
    for (const auto& r : joined.rejects) reasons[to_string(r.reason)] += 1;
    for (const auto& r : filtered.dropped) reasons[to_string(r.reason)] += 1;
    for (const auto& [reason, count] : reasons) sum << "dropped." << reason << ": " << count << "\n";
    sum << "kept: " << kept.size() << "\n";
  });

  run_stage(Stage::Features, "features", [&] {
    table = compute_features(kept, cfg.features);
    AssembleOptions opt;
    opt.delay = variant_encoding(cfg.variant);
    design = assemble_from_table(table, cfg.features, opt);
    write_design_csv(design, log.partial_path("design.csv"), log.partial_path("design_meta.json"));
  });

  run_stage(Stage::Smote, "smote", [&] {
    if (!cfg.smote) return;
    design = smote_oversample(design, *cfg.smote);
    write_design_csv(design, log.partial_path("design_smote.csv"),
                     log.partial_path("design_smote_meta.json"));
  });

  run_stage(Stage::Attribute, "attribute", [&] {
    if (cfg.variant != Variant::col6_attribution && upto != Stage::Attribute) return;
    if (design.col("DEL") < 0)
      throw ConfigError("attribute stage needs a DEL-based variant");
    DesignMatrix delay_design = assemble_delay_design_from_table(table, cfg.features);
    AttributionOptions aopt;
    aopt.random_intercept = cfg.delay_stage_random_intercept;
    aopt.fit = cfg.fit;
    delay_fit = fit_delay_stage(delay_design, delay_design.cluster_id, aopt);
    Decomposition dec = decompose_predictions(*delay_fit, delay_design.X);
    write_decomposition_csv(dec, log.partial_path("attribution.csv"));
    {
      std::ofstream f(log.partial_path("delay_fit.txt"), std::ios::binary);
      f << emit_delay_table(*delay_fit);
    }
    design = plug_into_satisfaction(dec.del_int, dec.del_ext, design);
    write_design_csv(design, log.partial_path("design_attrib.csv"),
                     log.partial_path("design_attrib_meta.json"));
  });

  run_stage(Stage::Fit, "fit", [&] {
    FitOptions fopt = cfg.fit;
    PostSelectionFit f = pds_ordered_fit(design, cfg.lasso, fopt);
    result.fit_converged = f.fit.converged;
    {
      std::ofstream sel(log.partial_path("selection.txt"), std::ios::binary);
      sel << format_pds_audit(f.selection, f.control_names);
    }
    {
      LabeledFit lf;
      lf.label = to_string(cfg.variant);
      lf.fit = f;
      lf.smote = cfg.smote.has_value();
      lf.n = design.n();
      std::ofstream out(log.partial_path("fit.txt"), std::ios::binary);
      out << emit_fit_table({lf});
    }
    fitted = std::move(f);
  });

  run_stage(Stage::Simulate, "simulate", [&] {
    if (!fitted) return;
    std::string delay_col;
    for (const auto& n : fitted->fit.names)
      if (n == "DEL" || (delay_col.empty() && n == "DEL(INT)")) delay_col = n;
    if (!delay_col.empty()) {
      ShiftReport shift = simulate_delay_shift(fitted->fit, design, delay_col);
      write_shift_csv(shift, log.partial_path("shift.csv"));
      std::ofstream sum(log.partial_path("shift_summary.txt"), std::ios::binary);
      sum << "delay_column: " << delay_col << "\n";
      sum << "share_drop_ge1_expected: " << format_double(shift.share_drop_ge1_expected) << "\n";
      sum << "share_drop_ge1_coupled: " << format_double(shift.share_drop_ge1_coupled) << "\n";
      sum << "mean_pct_change: " << format_double(shift.mean_pct_change) << "\n";
    }
    if (cfg.variant == Variant::t4_duration) {
      auto coef = [&](const std::string& n) -> std::optional<double> {
        for (std::size_t j = 0; j < fitted->fit.names.size(); ++j)
          if (fitted->fit.names[j] == n) return fitted->fit.beta[static_cast<Eigen::Index>(j)];
        return std::nullopt;
      };
      auto l1 = coef("DELDURxLSRFLIER"), l2 = coef("DELDUR2xLSRFLIER");
      auto b1 = coef("DELDURxBSNFLIER"), b2 = coef("DELDUR2xBSNFLIER");
      if (l1 && l2 && b1 && b2) {
        CurvePoints c = duration_curve({*l1, *l2}, {*b1, *b2}, default_duration_grid());
        write_curve_csv(c, log.partial_path("curve.csv"));
      }
    }
  });

  run_stage(Stage::SmoteStudy, "smote-study", [&] {
    emit_smote_study(design, cfg.study_shares, cfg.study_replications, cfg.seed, cfg.lasso,
                     cfg.fit, cfg.threads, log.partial_path("smote_study.csv"));
  });

  run_stage(Stage::Report, "report", [&] {
    emit_descriptives(table, log.partial_path("descriptives.csv"),
                      log.partial_path("figure3_groups.csv"));
  });

  // Manifest: configuration hash plus artifact checksums, fully reproducible.
  {
    std::string manifest_name = "manifest.txt";
    std::ofstream mf(log.partial_path(manifest_name), std::ios::binary);
    mf << "config_hash: " << hash_string(canonical_config(cfg)) << "\n";
    std::istringstream cc(canonical_config(cfg));
    std::string line;
    while (std::getline(cc, line)) mf << "config." << line << "\n";
    std::vector<std::string> names = log.finished();
    std::sort(names.begin(), names.end());
    for (const auto& name : names) {
      std::string p = log.path_of(name);
      mf << "artifact " << name << " fnv1a64=" << file_checksum(p)
         << " bytes=" << fs::file_size(p) << "\n";
    }
    mf.close();
    log.commit_stage();
    result.manifest_path = log.path_of(manifest_name);
  }
  result.artifacts = log.finished();
  return result;
}

}  // namespace paxsat
