#include "censorbias/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "censorbias/csv.hpp"
#include "censorbias/errors.hpp"
#include "censorbias/estimate.hpp"
#include "censorbias/experiment.hpp"
#include "censorbias/format.hpp"
#include "censorbias/plot.hpp"
#include "censorbias/rocstat.hpp"
#include "censorbias/simulate.hpp"

namespace censorbias {

namespace {

using json = nlohmann::json;

/// Stream purposes of single simulated cohorts; figure rows reuse them with an offset.
enum CohortTag : std::uint64_t { kComplete = 2, kTime, kInterim, kCase, kFigureOffset = 100 };

RngHandle cohort_stream(std::uint64_t seed, std::uint64_t index, std::uint64_t tag) {
  return {seed, derive_stream(index, tag)};
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("write failed: " + path.string());
}

json optional_number(double value) { return std::isfinite(value) ? json(value) : json(nullptr); }

double parse_double(const std::string& text, const std::string& what) {
  double value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw ValueError("invalid " + what + ": '" + text + "'");
  return value;
}

/// "v" is a fixed value, "lo:hi" a uniform range.
Sampler parse_sampler(const std::string& text, const std::string& what) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) return Sampler::fixed(parse_double(text, what));
  const double lo = parse_double(text.substr(0, colon), what);
  const double hi = parse_double(text.substr(colon + 1), what);
  if (!(lo <= hi)) throw DomainError(what + " range must have lo <= hi");
  return Sampler::uniform(lo, hi);
}

double raw_cutoff_scale(std::string_view index) {
  if (index == "SQBI") return kQbiCutoff;
  if (index == "SABI") return kAbiCutoff;
  return 1.0;
}

json roc_json(const RocResult& roc, std::string_view index) {
  return {{"auc", roc.auc},
          {"auc_ci", {roc.auc_ci_low, roc.auc_ci_high}},
          {"cutoff", roc.cutoff},
          {"raw_cutoff", roc.cutoff * raw_cutoff_scale(index)},
          {"sensitivity", roc.sensitivity},
          {"specificity", roc.specificity},
          {"ppv", optional_number(roc.ppv)},
          {"npv", optional_number(roc.npv)},
          {"positives", roc.positives},
          {"negatives", roc.negatives}};
}

RocResult index_roc(const ExperimentTable& table, std::string_view index) {
  const auto values = column(table, index);
  const auto labels = significance_labels(table);
  return youden_analysis(std::span<const std::optional<double>>(values), labels);
}

std::string cell(const std::optional<double>& v) { return v ? format_signif(*v, 2) : "NA"; }

void render_audit(const std::vector<AuditRow>& rows, std::ostream& out) {
  std::size_t width = 5;
  for (const auto& r : rows) width = std::max(width, r.trial.size());
  out << std::left << std::setw(static_cast<int>(width) + 2) << "trial" << std::right << std::setw(6) << "n"
      << std::setw(7) << "pCens" << std::setw(7) << "SQBI" << std::setw(7) << "SABI" << "  flag  reference\n";
  for (const auto& r : rows) {
    const auto cells = audit_cells(r);
    std::string flag;
    // Highlight as the reference table does: on the displayed (rounded) value.
    if (r.sqbi && signif(*r.sqbi, 2) > 1) flag += 'Q';
    if (r.sabi && signif(*r.sabi, 2) > 1) flag += 'A';
    out << std::left << std::setw(static_cast<int>(width) + 2) << r.trial << std::right << std::setw(6) << cells[1]
        << std::setw(7) << cells[2] << std::setw(7) << cells[3] << std::setw(7) << cells[4] << "  "
        << std::left << std::setw(4) << (flag.empty() ? "" : "*" + flag) << "  " << r.reference << std::right
        << '\n';
  }
}

SurvivalDataset load_dataset(const std::string& path) {
  return read_csv(path, DatasetMapping{"time", "status", {"1"}, std::string("group"), std::nullopt});
}

std::string trial_chart_svg(const SurvivalDataset& complete, const SurvivalDataset& censored,
                            const std::string& title, std::string_view color, bool log_y) {
  plot::Svg svg(560, 400);
  plot::trial_chart(svg, {0, 0, 560, 400}, complete, censored, title, color, log_y);
  return svg.render();
}

// --- subcommands -------------------------------------------------------------

struct SimulateArgs {
  int n_cases = 1000;
  double median = 25;
  double q99 = 100;
  double cure_rate = 0;
  std::string mechanism = "none";
  double p_censoring = 0.5;
  std::uint64_t seed = 1963;
  std::string out;
};

void cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  const CureModelSpec spec{a.n_cases, a.median, a.q99, a.cure_rate};
  validate(spec);
  const SurvivalDataset complete = complete_follow_up(spec, cohort_stream(a.seed, 0, kComplete));
  SurvivalDataset result;
  if (a.mechanism == "none") {
    result = complete;
  } else {
    const Mechanism m = parse_mechanism(a.mechanism);
    switch (m) {
      case Mechanism::time:
        result = time_censoring(complete, a.median, a.q99, a.p_censoring, cohort_stream(a.seed, 0, kTime));
        break;
      case Mechanism::interim:
        result = interim_censoring(complete, a.median, a.q99, a.p_censoring, cohort_stream(a.seed, 0, kInterim));
        break;
      case Mechanism::case_:
        result = case_censoring(complete, a.p_censoring, cohort_stream(a.seed, 0, kCase));
        break;
    }
  }
  write_csv(result, a.out);
  const double n = static_cast<double>(result.size());
  out << json{{"command", "simulate"},
              {"n", result.size()},
              {"events", result.event_count()},
              {"censored_fraction", n > 0 ? static_cast<double>(result.censored_count()) / n : 0.0},
              {"out", a.out}}
             .dump()
      << '\n';
}

struct ExperimentArgs {
  int preset = 0;
  int trials = 1000;
  std::uint64_t seed = 1963;
  unsigned threads = 0;
  std::string n_cases, median, cure_rate, p_censoring;
  double q99 = 100;
  std::string out;
};

void cmd_experiment(const ExperimentArgs& a, std::ostream& out) {
  ExperimentSpec spec = a.preset > 0 ? preset_experiment(a.preset) : ExperimentSpec{};
  spec.n_trials = a.trials;
  spec.master_seed = a.seed;
  spec.q99 = a.q99;
  if (!a.n_cases.empty()) spec.n_cases = parse_sampler(a.n_cases, "--n-cases");
  if (!a.median.empty()) spec.median = parse_sampler(a.median, "--median");
  if (!a.cure_rate.empty()) spec.cure_rate = parse_sampler(a.cure_rate, "--cure-rate");
  if (!a.p_censoring.empty()) spec.p_censoring = parse_sampler(a.p_censoring, "--p-censoring");
  validate(spec);

  const ExperimentTable table = run_experiment(spec, a.threads);
  write_table(table, a.out);

  json summary{{"command", "experiment"}, {"rows", table.rows.size()}, {"non_convergent", table.non_convergent}};
  try {
    summary["case_r"] = case_censoring_correlation(table).pearson_r;
  } catch (const DomainError&) {
    summary["case_r"] = nullptr;
  }
  json roc = json::object();
  for (const char* index : {"SQBI", "UMBI", "SABI"}) {
    try {
      roc[index] = roc_json(index_roc(table, index), index);
    } catch (const DomainError&) {
      roc[index] = nullptr;
    }
  }
  summary["roc"] = roc;
  summary["out"] = a.out;
  out << summary.dump() << '\n';
}

struct AuditArgs {
  std::string builtin;
  std::string input;
  std::string time_col = "time";
  std::string status_col = "status";
  std::vector<std::string> event_values{"1"};
  std::string group_col;
  std::string data_dir;
  std::string out;
};

void cmd_audit(const AuditArgs& a, std::ostream& out) {
  if (a.builtin.empty() == a.input.empty()) throw ValueError("audit needs exactly one of --builtin or --input");
  std::vector<AuditRow> rows;
  if (!a.builtin.empty()) {
    rows = builtin_audit(a.builtin, a.data_dir.empty() ? default_data_dir() : std::filesystem::path(a.data_dir));
  } else {
    DatasetMapping mapping;
    mapping.time_column = a.time_col;
    mapping.status_column = a.status_col;
    mapping.event_values = a.event_values;
    if (!a.group_col.empty()) mapping.group_column = a.group_col;
    const std::filesystem::path path(a.input);
    const SurvivalDataset all = read_csv(path, mapping, path.stem().string());
    rows.push_back(clinical_bias(all, all.name, path.filename().string()));
    if (mapping.group_column) {
      std::vector<std::string> groups;
      for (const auto& r : all.records) groups.push_back(r.group);
      std::sort(groups.begin(), groups.end());
      groups.erase(std::unique(groups.begin(), groups.end()), groups.end());
      for (const auto& g : groups) {
        const std::string name = all.name + " - " + a.group_col + g;
        rows.push_back(clinical_bias(all.subset(g, name), name, path.filename().string()));
      }
    }
  }
  render_audit(rows, out);
  if (!a.out.empty()) {
    std::ostringstream csv;
    write_audit_csv(rows, csv);
    write_text(a.out, csv.str());
  }
}

struct RocArgs {
  std::string table;
  std::string index = "SQBI";
};

void cmd_roc(const RocArgs& a, std::ostream& out) {
  const ExperimentTable table = read_table(a.table);
  json line{{"command", "roc"}, {"index", a.index}, {"rows", table.rows.size()}};
  line.update(roc_json(index_roc(table, a.index), a.index));
  out << line.dump() << '\n';
}

struct PlotArgs {
  std::string kind;
  std::vector<std::string> datasets;
  std::string table;
  std::string index = "SQBI";
  std::string title;
  std::string mechanism = "time";
  bool log_y = false;
  std::string out;
};

void cmd_plot(const PlotArgs& a) {
  std::string svg_text;
  if (a.kind == "km") {
    if (a.datasets.empty()) throw ValueError("km plot needs --dataset");
    static const char* palette[] = {"black", "red", "blue", "green", "darkorange", "purple"};
    // One curve per file; a single file with several group labels gives one curve per group.
    std::vector<plot::KmSeries> series;
    for (const auto& file : a.datasets) {
      const SurvivalDataset ds = load_dataset(file);
      std::vector<std::string> groups;
      for (const auto& r : ds.records)
        if (std::find(groups.begin(), groups.end(), r.group) == groups.end()) groups.push_back(r.group);
      const std::string stem = std::filesystem::path(file).stem().string();
      if (a.datasets.size() > 1 || groups.size() <= 1) {
        series.push_back({ds, palette[series.size() % 6], 1.5, stem});
      } else {
        for (const auto& g : groups) series.push_back({ds.subset(g, g), palette[series.size() % 6], 1.5, g});
      }
    }
    plot::Svg svg(560, 400);
    plot::km_chart(svg, {0, 0, 560, 400}, series, {a.title, a.log_y, 0});
    svg_text = svg.render();
  } else if (a.kind == "trial") {
    if (a.datasets.size() != 2) throw ValueError("trial plot needs --dataset complete.csv --dataset censored.csv");
    const Mechanism m = parse_mechanism(a.mechanism);
    svg_text = trial_chart_svg(load_dataset(a.datasets[0]), load_dataset(a.datasets[1]), a.title,
                               plot::mechanism_color(m), a.log_y);
  } else if (a.kind == "censor_scatter" || a.kind == "bias_scatter") {
    if (a.table.empty()) throw ValueError(a.kind + " needs --table");
    const ExperimentTable table = read_table(a.table);
    plot::Svg svg(560, 440);
    if (a.kind == "censor_scatter")
      plot::censor_scatter(svg, {0, 0, 560, 440}, table, a.title);
    else
      plot::bias_scatter(svg, {0, 0, 560, 440}, table, a.index, a.title);
    svg_text = svg.render();
  } else {
    throw ValueError("unknown plot kind '" + a.kind + "'");
  }
  write_text(a.out, svg_text);
}

}  // namespace

// --- library entry points ------------------------------------------------------

std::vector<AuditRow> builtin_audit(const std::string& id, const std::filesystem::path& data_dir) {
  std::vector<std::string> ids;
  if (id == "all")
    ids = clinical_dataset_ids();
  else
    ids.push_back(id);
  std::vector<AuditRow> rows;
  for (const auto& dataset_id : ids)
    for (const auto& entry : clinical_preprocess(dataset_id, data_dir))
      rows.push_back(clinical_bias(entry.dataset, entry.trial, entry.reference));
  return rows;
}

std::vector<std::string> audit_cells(const AuditRow& row) {
  return {row.trial, std::to_string(row.n), format_fixed(signif(row.p_cens, 2), 2), cell(row.sqbi),
          cell(row.sabi), row.reference};
}

void write_audit_csv(const std::vector<AuditRow>& rows, std::ostream& out) {
  csv::write_row(out, {"trial", "n", "pCens", "SQBI", "SABI", "reference"});
  for (const auto& r : rows) csv::write_row(out, audit_cells(r));
}

std::vector<std::filesystem::path> write_figures(const FiguresOptions& options) {
  std::filesystem::create_directories(options.out_dir);
  std::vector<std::filesystem::path> written;
  auto emit = [&](const std::string& name, const std::string& content) {
    const auto path = options.out_dir / name;
    write_text(path, content);
    written.push_back(path);
  };

  // Figure 1: complete follow-up vs each mechanism, 2x2 design of (median, cure rate).
  {
    constexpr double kW = 400, kH = 300;
    plot::Svg svg(3 * kW, 4 * kH);
    const std::pair<double, double> design[] = {{25, 0}, {50, 0}, {25, 0.4}, {50, 0.4}};
    for (int row = 0; row < 4; ++row) {
      const auto [median, cure] = design[row];
      const CureModelSpec spec{1000, median, 100, cure};
      const auto handle = [&](std::uint64_t tag) {
        return cohort_stream(options.seed, static_cast<std::uint64_t>(row), kFigureOffset + tag);
      };
      const SurvivalDataset complete = complete_follow_up(spec, handle(kComplete));
      const SurvivalDataset censored[] = {time_censoring(complete, median, 100, 0.5, handle(kTime)),
                                          interim_censoring(complete, median, 100, 0.5, handle(kInterim)),
                                          case_censoring(complete, 0.5, handle(kCase))};
      const Mechanism mechanisms[] = {Mechanism::time, Mechanism::interim, Mechanism::case_};
      const char* titles[] = {"Time censoring", "Interim censoring", "Case censoring"};
      for (int col = 0; col < 3; ++col)
        plot::trial_chart(svg, {col * kW, row * kH, kW, kH}, complete, censored[col], titles[col],
                          plot::mechanism_color(mechanisms[col]));
    }
    emit("fig1.svg", svg.render());
  }

  auto experiment = [&](int preset) {
    ExperimentSpec spec = preset_experiment(preset);
    spec.n_trials = options.n_trials;
    spec.master_seed = options.seed;
    return run_experiment(spec, options.threads);
  };
  ExperimentTable tables[5];
  for (int i = 0; i < 5; ++i) tables[i] = experiment(i + 1);

  {
    plot::Svg svg(600, 460);
    plot::censor_scatter(svg, {0, 0, 600, 460}, tables[4], "median: 5-95   pCure = 0-0.8");
    emit("fig2.svg", svg.render());
  }
  auto pair_figure = [&](const std::string& name, const char* index) {
    plot::Svg svg(1000, 440);
    plot::bias_scatter(svg, {0, 0, 500, 440}, tables[0], index, "median: 5-50   pCure = 0");
    plot::bias_scatter(svg, {500, 0, 500, 440}, tables[4], index, "median: 5-95   pCure = 0-0.8");
    emit(name, svg.render());
  };
  pair_figure("fig3.svg", "SQBI");
  {
    plot::Svg svg(1000, 880);
    const char* titles[] = {"median:  5-50   pCure = 0", "median: 50-95   pCure = 0", "median:  5-50   pCure = 0.5",
                            "median: 50-95   pCure = 0.5"};
    for (int i = 0; i < 4; ++i)
      plot::bias_scatter(svg, {(i % 2) * 500.0, (i / 2) * 440.0, 500, 440}, tables[i], "UMBI", titles[i]);
    emit("fig4.svg", svg.render());
  }
  pair_figure("fig5.svg", "SABI");

  std::ostringstream table1;
  write_audit_csv(builtin_audit("all", options.data_dir), table1);
  emit("table1.csv", table1.str());
  return written;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Right-censoring bias in survival trials: simulation, bias indexes and audits", "censorbias"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Simulate one cohort, optionally censored, to CSV");
  simulate->add_option("--n-cases", sim.n_cases, "Number of cases")->capture_default_str();
  simulate->add_option("--median", sim.median, "Median event time of the complete cohort")->capture_default_str();
  simulate->add_option("--q99", sim.q99, "99th percentile of event times")->capture_default_str();
  simulate->add_option("--cure-rate", sim.cure_rate, "Share of cases never having the event")->capture_default_str();
  simulate->add_option("--mechanism", sim.mechanism, "none|time|interim|case")
      ->check(CLI::IsMember({"none", "time", "interim", "case"}))
      ->capture_default_str();
  simulate->add_option("--p-censoring", sim.p_censoring, "Censoring probability")->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Master seed")->capture_default_str();
  simulate->add_option("--out", sim.out, "Output CSV")->required();

  ExperimentArgs exp;
  auto* experiment = app.add_subcommand("experiment", "Run a virtual experiment of many trials");
  experiment->add_option("--preset", exp.preset, "Preset configuration 1..5")->check(CLI::Range(1, 5));
  experiment->add_option("--trials", exp.trials, "Number of trials (3 rows each)")->capture_default_str();
  experiment->add_option("--seed", exp.seed, "Master seed")->capture_default_str();
  experiment->add_option("--threads", exp.threads, "Worker threads, 0 = all cores")->capture_default_str();
  experiment->add_option("--n-cases", exp.n_cases, "Cases per trial: value or lo:hi");
  experiment->add_option("--median", exp.median, "Median: value or lo:hi");
  experiment->add_option("--cure-rate", exp.cure_rate, "Cure rate: value or lo:hi");
  experiment->add_option("--p-censoring", exp.p_censoring, "Censoring probability: value or lo:hi");
  experiment->add_option("--q99", exp.q99, "99th percentile of event times")->capture_default_str();
  experiment->add_option("--out", exp.out, "Output CSV")->required();

  AuditArgs aud;
  auto* audit = app.add_subcommand("audit", "Bias indexes of clinical datasets");
  std::vector<std::string> builtin_choices = clinical_dataset_ids();
  builtin_choices.push_back("all");
  audit->add_option("--builtin", aud.builtin, "Bundled dataset id or 'all'")->check(CLI::IsMember(builtin_choices));
  audit->add_option("--input", aud.input, "CSV file to audit");
  audit->add_option("--time-col", aud.time_col, "Time column")->capture_default_str();
  audit->add_option("--status-col", aud.status_col, "Status column")->capture_default_str();
  audit->add_option("--event-value", aud.event_values, "Status value(s) marking an event")->capture_default_str();
  audit->add_option("--group-col", aud.group_col, "Arm column; adds one row per arm");
  audit->add_option("--data-dir", aud.data_dir, "Directory of the bundled CSVs");
  audit->add_option("--out", aud.out, "Write the audit table as CSV");

  RocArgs rocs;
  auto* roc = app.add_subcommand("roc", "ROC and Youden cutoff of an index against p < 0.05");
  roc->add_option("--table", rocs.table, "Experiment CSV")->required();
  roc->add_option("--index", rocs.index, "SQBI|UMBI|SABI")
      ->check(CLI::IsMember({"SQBI", "UMBI", "SABI"}))
      ->capture_default_str();

  PlotArgs pl;
  auto* plot_cmd = app.add_subcommand("plot", "Render one SVG chart");
  plot_cmd->add_option("--kind", pl.kind, "km|trial|censor_scatter|bias_scatter")->required();
  plot_cmd->add_option("--dataset", pl.datasets, "Dataset CSV (time,status,group); repeatable");
  plot_cmd->add_option("--table", pl.table, "Experiment CSV");
  plot_cmd->add_option("--index", pl.index, "Index for bias_scatter")->capture_default_str();
  plot_cmd->add_option("--title", pl.title, "Chart title");
  plot_cmd->add_option("--mechanism", pl.mechanism, "Color of the censored curve in trial plots")
      ->check(CLI::IsMember({"time", "interim", "case"}));
  plot_cmd->add_flag("--log-y", pl.log_y, "Logarithmic survival axis");
  plot_cmd->add_option("--out", pl.out, "Output SVG")->required();

  FiguresOptions fig;
  std::string fig_dir = fig.out_dir.string();
  std::string fig_data;
  auto* figures = app.add_subcommand("figures", "Regenerate every figure and the audit table");
  figures->add_option("--out-dir", fig_dir, "Output directory")->capture_default_str();
  figures->add_option("--trials", fig.n_trials, "Trials per experiment")->capture_default_str();
  figures->add_option("--seed", fig.seed, "Master seed")->capture_default_str();
  figures->add_option("--threads", fig.threads, "Worker threads, 0 = all cores")->capture_default_str();
  figures->add_option("--data-dir", fig_data, "Directory of the bundled CSVs");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*simulate) {
      cmd_simulate(sim, out);
    } else if (*experiment) {
      cmd_experiment(exp, out);
    } else if (*audit) {
      cmd_audit(aud, out);
    } else if (*roc) {
      cmd_roc(rocs, out);
    } else if (*plot_cmd) {
      cmd_plot(pl);
    } else if (*figures) {
      fig.out_dir = fig_dir;
      if (!fig_data.empty()) fig.data_dir = fig_data;
      json files = json::array();
      for (const auto& p : write_figures(fig)) files.push_back(p.string());
      out << json{{"command", "figures"}, {"files", files}}.dump() << '\n';
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace censorbias
