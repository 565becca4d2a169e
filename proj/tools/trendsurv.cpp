// trendsurv: correlate search-trend exports against epidemic case counts.
//
// Exit codes: 0 success, 1 usage, 2 data/parse error, 3 statistical
// degeneracy. Machine output goes to stdout, diagnostics to stderr.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "trendsurv/trendsurv.hpp"

namespace fs = std::filesystem;
using namespace trendsurv;

namespace {

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::bad_argument:
      return 1;
    case Errc::zero_variance:
    case Errc::too_few_samples:
    case Errc::no_valid_lag:
      return 3;
    default:
      return 2;
  }
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_failure, "cannot open " + path);
  return in;
}

void write_output(const std::string& path, const std::string& bytes) {
  if (path.empty() || path == "-") {
    std::cout << bytes;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_failure, "cannot write " + path);
  out << bytes;
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("TRENDSURV_SEED")) {
    char* end = nullptr;
    const auto v = std::strtoull(env, &end, 10);
    if (end && *end == '\0') return v;
    std::cerr << "warning: ignoring non-numeric TRENDSURV_SEED\n";
  }
  return kDefaultSeed;
}

struct SeriesLoadOptions {
  CaseColumnMap columns;
  MissingPolicy missing = MissingPolicy::error;
  double censored_value = 0.5;
};

// A series file is either a trend export (a `Day` header row somewhere near
// the top) or a plain date/value CSV. Trend exports contribute their first
// query column.
DailySeries load_series(const std::string& path, const SeriesLoadOptions& opts) {
  {
    auto in = open_input(path);
    std::string line;
    for (int i = 0; i < 10 && std::getline(in, line); ++i) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const auto cells = csv::split_line(line);
      if (!cells.empty() && cells[0] == "Day") {
        auto again = open_input(path);
        auto all = parse_trends_csv(again, {opts.censored_value, opts.missing});
        if (all.size() > 1) {
          std::cerr << "note: " << path << " has " << all.size()
                    << " query columns; using `" << all[0].label << "`\n";
        }
        return std::move(all[0]);
      }
    }
  }
  auto in = open_input(path);
  return parse_cases_csv(in, opts.columns, opts.missing);
}

std::optional<RenderFormat> format_from(const std::string& name) {
  if (name == "csv") return RenderFormat::csv;
  if (name == "json") return RenderFormat::json;
  if (name == "markdown") return RenderFormat::markdown;
  return std::nullopt;
}

PMethod method_from(const std::string& name) {
  if (name == "t") return PMethod::t_approx;
  if (name == "exact") return PMethod::exact_perm;
  return PMethod::mc_perm;
}

MissingPolicy missing_from(const std::string& name) {
  if (name == "zero") return MissingPolicy::zero;
  if (name == "linear") return MissingPolicy::linear;
  return MissingPolicy::error;
}

double one_sided_p(double rho, double two_sided) {
  return rho > 0.0 ? two_sided / 2.0 : 1.0 - two_sided / 2.0;
}

std::string correlation_csv(const CorrelationResult& r) {
  std::ostringstream out;
  out << "rho,p_value,n,method,lag_days,degenerate\n";
  out << detail::format_rho(r.rho) << ',' << detail::format_p(r.p_value) << ',' << r.n << ','
      << p_method_name(r.method) << ',' << r.lag_days << ',' << (r.degenerate ? 1 : 0) << '\n';
  return out.str();
}

std::string correlation_json(const CorrelationResult& r) {
  nlohmann::ordered_json j;
  j["rho"] = r.rho;
  j["p_value"] = r.p_value;
  j["n"] = r.n;
  j["method"] = p_method_name(r.method);
  j["lag_days"] = r.lag_days;
  j["degenerate"] = r.degenerate;
  return j.dump(2) + "\n";
}

// Flags shared by every correlating subcommand.
struct CommonOpts {
  std::string p_method = "t";
  long mc_iters = 100000;
  std::uint64_t seed = default_seed();
  std::string missing = "error";
  double censored_value = 0.5;
  std::string date_column = "date";
  std::string value_column = "cases";
  std::string date_format = "%Y-%m-%d";
  std::string format = "csv";
  std::string out;
  bool one_sided = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--p-method", o.p_method, "p-value method")
      ->check(CLI::IsMember({"t", "exact", "mc"}));
  cmd->add_option("--mc-iters", o.mc_iters, "Monte Carlo iterations");
  cmd->add_option("--seed", o.seed, "RNG seed (overrides TRENDSURV_SEED)");
  cmd->add_option("--missing", o.missing, "missing-date policy")
      ->check(CLI::IsMember({"error", "zero", "linear"}));
  cmd->add_option("--censored-value", o.censored_value, "value for `<1` cells");
  cmd->add_option("--date-column", o.date_column, "date column in plain CSVs");
  cmd->add_option("--value-column", o.value_column, "value column in plain CSVs");
  cmd->add_option("--date-format", o.date_format, "date pattern, e.g. %Y-%m-%d");
  cmd->add_option("--format", o.format, "output format")
      ->check(CLI::IsMember({"csv", "json", "markdown"}));
  cmd->add_option("--out", o.out, "output file (default: stdout)");
  cmd->add_flag("--one-sided", o.one_sided, "halve p when rho > 0");
}

SeriesLoadOptions load_options(const CommonOpts& o) {
  SeriesLoadOptions lo;
  lo.columns = {o.date_column, o.value_column, o.date_format};
  lo.missing = missing_from(o.missing);
  lo.censored_value = o.censored_value;
  return lo;
}

int run_correlate(const std::string& path_a, const std::string& path_b, const CommonOpts& o) {
  const auto lo = load_options(o);
  const auto a = load_series(path_a, lo);
  const auto b = load_series(path_b, lo);
  auto result = correlate(align_pair(a, b), method_from(o.p_method), {o.mc_iters, o.seed});
  if (o.one_sided) result.p_value = one_sided_p(result.rho, result.p_value);
  write_output(o.out, o.format == "json" ? correlation_json(result) : correlation_csv(result));
  return 0;
}

int run_lag_scan(const std::string& path_a, const std::string& path_b, int max_lag,
                 int min_overlap, const CommonOpts& o) {
  const auto lo = load_options(o);
  const auto a = load_series(path_a, lo);
  const auto b = load_series(path_b, lo);
  const auto scan =
      lag_scan(a, b, max_lag, min_overlap, method_from(o.p_method), {o.mc_iters, o.seed});
  std::ostringstream out;
  if (o.format == "json") {
    nlohmann::ordered_json j;
    j["best_lag"] = scan.best_lag;
    j["min_overlap"] = scan.min_overlap;
    j["entries"] = nlohmann::ordered_json::array();
    for (const auto& e : scan.entries) {
      nlohmann::ordered_json row;
      row["lag"] = e.lag_days;
      row["overlap"] = e.overlap;
      if (e.result) {
        row["rho"] = e.result->rho;
        row["p_value"] = o.one_sided ? one_sided_p(e.result->rho, e.result->p_value)
                                     : e.result->p_value;
      } else {
        row["error"] = e.error;
      }
      j["entries"].push_back(std::move(row));
    }
    out << j.dump(2) << "\n";
  } else {
    out << "lag,overlap,rho,p_value,best\n";
    for (const auto& e : scan.entries) {
      out << e.lag_days << ',' << e.overlap << ',';
      if (e.result) {
        const double p = o.one_sided ? one_sided_p(e.result->rho, e.result->p_value)
                                     : e.result->p_value;
        out << detail::format_rho(e.result->rho) << ',' << detail::format_p(p);
      } else {
        out << "NA,NA";
      }
      out << ',' << (e.lag_days == scan.best_lag ? 1 : 0) << '\n';
    }
  }
  write_output(o.out, out.str());
  return 0;
}

int run_rolling(const std::string& path_a, const std::string& path_b, int window, int step,
                const CommonOpts& o) {
  const auto lo = load_options(o);
  const auto a = load_series(path_a, lo);
  const auto b = load_series(path_b, lo);
  const auto points = rolling_correlation(align_pair(a, b), window, step);
  std::ostringstream out;
  out << "window_start,rho,p_value,note\n";
  for (const auto& pt : points) {
    out << format_date(pt.window_start) << ',';
    if (pt.result) {
      const double p = o.one_sided ? one_sided_p(pt.result->rho, pt.result->p_value)
                                   : pt.result->p_value;
      out << detail::format_rho(pt.result->rho) << ',' << detail::format_p(p) << ',';
    } else {
      out << "NA,NA," << csv::escape(pt.error);
    }
    out << '\n';
  }
  write_output(o.out, out.str());
  return 0;
}

int run_summarize(const std::string& path, const CommonOpts& o) {
  const auto lo = load_options(o);
  const auto cases = load_series(path, lo);
  const auto summary = summarize_cases(cases);
  std::ostringstream out;
  if (o.format == "json") {
    nlohmann::ordered_json j;
    j["peak_date"] = format_date(summary.peak_date);
    j["peak_value"] = summary.peak_value;
    j["monthly"] = nlohmann::ordered_json::array();
    for (const auto& m : summary.monthly) {
      nlohmann::ordered_json row;
      row["month"] = format_year_month(m.year, m.month);
      row["total"] = m.total;
      j["monthly"].push_back(std::move(row));
    }
    out << j.dump(2) << "\n";
  } else if (o.format == "markdown") {
    out << "| Metric | Key | Value |\n|---|---|---|\n";
    out << "| peak | " << format_date(summary.peak_date) << " | "
        << csv::format_value(summary.peak_value) << " |\n";
    for (const auto& m : summary.monthly) {
      out << "| monthly | " << format_year_month(m.year, m.month) << " | "
          << csv::format_value(m.total) << " |\n";
    }
  } else {
    out << "metric,key,value\n";
    out << "peak," << format_date(summary.peak_date) << ','
        << csv::format_value(summary.peak_value) << '\n';
    for (const auto& m : summary.monthly) {
      out << "monthly," << format_year_month(m.year, m.month) << ','
          << csv::format_value(m.total) << '\n';
    }
  }
  write_output(o.out, out.str());
  return 0;
}

struct StudyArgs {
  std::string manifest_path;
  std::string trends_dir;
  std::string cases_path;
  std::string period_start = "2020-03-02";
  std::string period_end = "2020-10-31";
  std::string weekly_rsv = "mean";
  double alpha = 0.05;
  double high = 0.5;
  double moderate = 0.3;
  int max_lag = 0;
  int min_overlap = 10;
  std::string plot_dir;
};

int run_study_cmd(const StudyArgs& a, const CommonOpts& o) {
  auto manifest_in = open_input(a.manifest_path);
  const auto manifest = parse_manifest(manifest_in);

  std::vector<fs::path> files;
  if (!fs::is_directory(a.trends_dir)) {
    throw Error(Errc::io_failure, a.trends_dir + " is not a directory");
  }
  for (const auto& entry : fs::directory_iterator(a.trends_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw Error(Errc::empty_input, "no .csv files in " + a.trends_dir);

  const auto lo = load_options(o);
  std::vector<DailySeries> variant_series;
  for (const auto& file : files) {
    auto in = open_input(file.string());
    auto parsed = parse_trends_csv(in, {lo.censored_value, lo.missing});
    for (auto& s : parsed) variant_series.push_back(std::move(s));
  }
  auto cases_in = open_input(a.cases_path);
  const auto cases = parse_cases_csv(cases_in, lo.columns, lo.missing);

  StudyConfig config;
  const auto start = parse_date(a.period_start);
  const auto end = parse_date(a.period_end);
  if (!start || !end) throw Error(Errc::bad_argument, "period dates must be YYYY-MM-DD");
  config.period_start = *start;
  config.period_end = *end;
  config.p_method = method_from(o.p_method);
  config.weekly_rsv = a.weekly_rsv == "sum" ? WeeklyMode::sum : WeeklyMode::mean;
  config.thresholds = {a.high, a.moderate, a.alpha};
  config.max_lag = a.max_lag;
  config.min_overlap = a.min_overlap;
  config.mc_iterations = o.mc_iters;
  config.seed = o.seed;

  auto report = run_study(manifest, variant_series, cases, config);
  if (o.one_sided) {
    for (auto& row : report.rows) {
      for (auto* slot : {&row.daily, &row.weekly}) {
        if (slot->result) {
          slot->result->p_value = one_sided_p(slot->result->rho, slot->result->p_value);
          slot->cls = classify(slot->result->rho, slot->result->p_value, config.thresholds);
        }
      }
    }
  }
  const auto format = format_from(o.format).value_or(RenderFormat::csv);
  write_output(o.out, render_table(report, format));

  if (!a.plot_dir.empty()) {
    fs::create_directories(a.plot_dir);
    const auto cases_clipped = clip(cases, config.period_start, config.period_end);
    std::map<std::string, const DailySeries*> by_label;
    for (const auto& s : variant_series) by_label[s.label] = &s;
    std::vector<SymptomSignal> signals;
    for (const auto& entry : manifest.entries) {
      std::vector<DailySeries> variants;
      bool complete = true;
      for (const auto& q : entry.variants) {
        const auto it = by_label.find(q);
        if (it == by_label.end()) {
          complete = false;
          break;
        }
        variants.push_back(clip(*it->second, config.period_start, config.period_end));
      }
      if (!complete) continue;
      signals.push_back(aggregate_symptom(variants, entry.id));
    }
    if (!signals.empty()) signals.push_back(composite_all_symptoms(signals));
    for (const auto& signal : signals) {
      const auto panel = render_plot_data(signal, cases_clipped, format);
      const char* ext = format == RenderFormat::json ? ".json"
                        : format == RenderFormat::markdown ? ".md"
                                                           : ".csv";
      write_output((fs::path(a.plot_dir) / ("panel_" + signal.symptom_id + ext)).string(),
                   panel);
    }
  }
  return 0;
}

struct SynthArgs {
  std::string out_dir;
  std::vector<std::string> symptoms;
  int days = 244;
  std::string start = "2020-03-02";
  std::string curve = "unimodal-peak";
  double noise = 0.0;
  double peak = 5000.0;
  std::string geo;
};

// --symptom id:target[:lag[:variants]]
FixtureSymptom parse_symptom_spec(const std::string& text) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : text) {
    if (c == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  if (parts.size() < 2 || parts.size() > 4) {
    throw Error(Errc::bad_argument, "symptom spec must be id:target[:lag[:variants]]");
  }
  FixtureSymptom sym;
  sym.id = parts[0];
  try {
    sym.target_spearman = std::stod(parts[1]);
    if (parts.size() > 2) sym.lag_days = std::stoi(parts[2]);
    if (parts.size() > 3) sym.n_variants = std::stoi(parts[3]);
  } catch (const std::exception&) {
    throw Error(Errc::bad_argument, "bad numeric field in symptom spec `" + text + "`");
  }
  return sym;
}

int run_synth(const SynthArgs& a, const CommonOpts& o) {
  std::vector<FixtureSymptom> symptoms;
  for (const auto& text : a.symptoms) symptoms.push_back(parse_symptom_spec(text));

  FixtureOptions fo;
  const auto start = parse_date(a.start);
  if (!start) throw Error(Errc::bad_argument, "--start must be YYYY-MM-DD");
  fo.start = *start;
  fo.n_days = a.days;
  if (a.curve == "bimodal") fo.case_curve = CaseCurve::bimodal;
  else if (a.curve == "flat") fo.case_curve = CaseCurve::flat;
  else fo.case_curve = CaseCurve::unimodal_peak;
  fo.noise_scale = a.noise;
  fo.peak_cases = a.peak;
  fo.geo = a.geo;

  const auto fixture = generate_study_fixture(symptoms, o.seed, fo);
  fs::create_directories(a.out_dir);
  fs::create_directories(fs::path(a.out_dir) / "trends");
  const auto manifest_path = fs::path(a.out_dir) / "manifest.json";
  const auto cases_path = fs::path(a.out_dir) / "cases.csv";
  write_output(manifest_path.string(), fixture.manifest_json);
  write_output(cases_path.string(), fixture.cases_csv);
  std::cout << manifest_path.string() << '\n' << cases_path.string() << '\n';
  for (const auto& [name, bytes] : fixture.trend_files) {
    const auto path = fs::path(a.out_dir) / "trends" / name;
    write_output(path.string(), bytes);
    std::cout << path.string() << '\n';
  }
  return 0;
}

struct ValidateArgs {
  std::string manifest_path;
  std::string cases_path;
  std::vector<std::string> trends_paths;
};

int run_validate(const ValidateArgs& a, const CommonOpts& o) {
  const auto lo = load_options(o);
  if (!a.manifest_path.empty()) {
    auto in = open_input(a.manifest_path);
    const auto manifest = parse_manifest(in);
    std::size_t variants = 0;
    for (const auto& e : manifest.entries) variants += e.variants.size();
    std::cout << "OK manifest " << a.manifest_path << " entries=" << manifest.entries.size()
              << " variants=" << variants << '\n';
  }
  for (const auto& path : a.trends_paths) {
    auto in = open_input(path);
    const auto series = parse_trends_csv(in, {lo.censored_value, lo.missing});
    std::cout << "OK trends " << path << " columns=" << series.size() << " days="
              << series[0].size() << " from=" << format_date(series[0].start) << '\n';
  }
  if (!a.cases_path.empty()) {
    auto in = open_input(a.cases_path);
    const auto cases = parse_cases_csv(in, lo.columns, lo.missing);
    std::cout << "OK cases " << a.cases_path << " days=" << cases.size() << " from="
              << format_date(cases.start) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Search-trend / case-count correlation toolkit"};
  app.require_subcommand(1);

  CommonOpts common;

  // study
  StudyArgs study_args;
  auto* study = app.add_subcommand("study", "run the full per-symptom correlation study");
  study->add_option("--manifest", study_args.manifest_path, "symptom manifest JSON")
      ->required();
  study->add_option("--trends-dir", study_args.trends_dir, "directory of trend exports")
      ->required();
  study->add_option("--cases", study_args.cases_path, "case-count CSV")->required();
  study->add_option("--period", [&study_args](const std::vector<std::string>& vals) {
    study_args.period_start = vals[0];
    study_args.period_end = vals[1];
    return true;
  }, "study period: START END (YYYY-MM-DD)")->expected(2);
  study->add_option("--weekly-rsv", study_args.weekly_rsv, "weekly RSV aggregation")
      ->check(CLI::IsMember({"mean", "sum"}));
  study->add_option("--alpha", study_args.alpha, "significance level");
  study->add_option("--high", study_args.high, "high-correlation threshold");
  study->add_option("--moderate", study_args.moderate, "moderate-correlation threshold");
  study->add_option("--max-lag", study_args.max_lag, "scan daily correlation over +-N days");
  study->add_option("--min-overlap", study_args.min_overlap, "minimum overlap per lag");
  study->add_option("--plot-dir", study_args.plot_dir, "also write per-symptom panel files");
  add_common(study, common);

  // correlate
  std::string path_a, path_b;
  auto* corr = app.add_subcommand("correlate", "correlate two series files");
  corr->add_option("a", path_a, "first series file")->required();
  corr->add_option("b", path_b, "second series file")->required();
  add_common(corr, common);

  // lag-scan
  int max_lag = 14, min_overlap = 10;
  auto* lagscan = app.add_subcommand("lag-scan", "correlation across day offsets");
  lagscan->add_option("a", path_a, "first series file (leads at positive lags)")->required();
  lagscan->add_option("b", path_b, "second series file")->required();
  lagscan->add_option("--max-lag", max_lag, "scan lags in [-N, +N]");
  lagscan->add_option("--min-overlap", min_overlap, "minimum overlap per lag");
  add_common(lagscan, common);

  // rolling
  int window = 28, step = 1;
  auto* roll = app.add_subcommand("rolling", "rolling-window correlation");
  roll->add_option("a", path_a, "first series file")->required();
  roll->add_option("b", path_b, "second series file")->required();
  roll->add_option("--window", window, "window length in days");
  roll->add_option("--step", step, "window step in days");
  add_common(roll, common);

  // summarize-cases
  std::string cases_path;
  auto* summ = app.add_subcommand("summarize-cases", "peak and monthly totals");
  summ->add_option("cases", cases_path, "case-count CSV")->required();
  add_common(summ, common);

  // synth
  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "generate a synthetic study fixture");
  synth->add_option("--out-dir", synth_args.out_dir, "output directory")->required();
  synth->add_option("--symptom", synth_args.symptoms, "id:target[:lag[:variants]]")
      ->required()
      ->take_all();
  synth->add_option("--days", synth_args.days, "study length in days");
  synth->add_option("--start", synth_args.start, "first day (YYYY-MM-DD)");
  synth->add_option("--curve", synth_args.curve, "case-curve shape")
      ->check(CLI::IsMember({"unimodal-peak", "bimodal", "flat"}));
  synth->add_option("--noise", synth_args.noise, "case noise sd");
  synth->add_option("--peak", synth_args.peak, "case-curve peak height");
  synth->add_option("--geo", synth_args.geo, "geo suffix for trend headers");
  add_common(synth, common);

  // validate
  ValidateArgs validate_args;
  auto* validate = app.add_subcommand("validate", "parse inputs without running anything");
  validate->add_option("--manifest", validate_args.manifest_path, "manifest JSON");
  validate->add_option("--trends", validate_args.trends_paths, "trend export files")
      ->take_all();
  validate->add_option("--cases", validate_args.cases_path, "case-count CSV");
  add_common(validate, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (study->parsed()) return run_study_cmd(study_args, common);
    if (corr->parsed()) return run_correlate(path_a, path_b, common);
    if (lagscan->parsed()) return run_lag_scan(path_a, path_b, max_lag, min_overlap, common);
    if (roll->parsed()) return run_rolling(path_a, path_b, window, step, common);
    if (summ->parsed()) return run_summarize(cases_path, common);
    if (synth->parsed()) return run_synth(synth_args, common);
    if (validate->parsed()) return run_validate(validate_args, common);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
