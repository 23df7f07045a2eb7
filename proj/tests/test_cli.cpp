#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "censorbias/cli.hpp"
#include "censorbias/estimate.hpp"
#include "censorbias/experiment.hpp"
#include "censorbias/format.hpp"
#include "censorbias/plot.hpp"
#include "censorbias/simulate.hpp"

using namespace censorbias;
namespace fs = std::filesystem;

namespace {
struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "censorbias_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

SurvivalDataset load(const fs::path& p) {
  DatasetMapping m;
  m.group_column = "group";
  return read_csv(p, m);
}

/// Minimal XML check: every start tag is closed in order, attributes are quoted.
bool well_formed(const std::string& xml) {
  std::vector<std::string> stack;
  std::size_t i = 0;
  while ((i = xml.find('<', i)) != std::string::npos) {
    const auto end = xml.find('>', i);
    if (end == std::string::npos) return false;
    std::string tag = xml.substr(i + 1, end - i - 1);
    i = end + 1;
    if (tag.empty()) return false;
    if (tag[0] == '?' || tag[0] == '!') continue;
    if (tag[0] == '/') {
      if (stack.empty() || stack.back() != tag.substr(1)) return false;
      stack.pop_back();
      continue;
    }
    if (std::count(tag.begin(), tag.end(), '"') % 2 != 0) return false;
    const bool self_closing = tag.back() == '/';
    const std::string name = tag.substr(0, tag.find_first_of(" /"));
    if (!self_closing) stack.push_back(name);
  }
  return stack.empty();
}
}  // namespace

TEST_CASE("simulate: cure model without censoring") {
  const auto path = scratch("sim_none.csv");
  const auto r = cli({"simulate", "--n-cases", "10", "--median", "25", "--cure-rate", "0.4", "--mechanism", "none",
                      "--out", path.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("\"n\":10") != std::string::npos);
  const auto ds = load(path);
  CHECK(ds.size() == 10);
  CHECK(ds.event_count() == 6);
  CHECK(ds.censored_count() == 4);
}

TEST_CASE("simulate: case censoring at zero reproduces the complete cohort") {
  const auto a = scratch("sim_complete.csv"), b = scratch("sim_case0.csv");
  REQUIRE(cli({"simulate", "--n-cases", "50", "--mechanism", "none", "--out", a.string()}).code == 0);
  REQUIRE(cli({"simulate", "--n-cases", "50", "--mechanism", "case", "--p-censoring", "0", "--out", b.string()})
              .code == 0);
  const auto x = load(a), y = load(b);
  REQUIRE(x.size() == y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(x.records[i].time == y.records[i].time);
    CHECK(x.records[i].status == y.records[i].status);
  }
}

TEST_CASE("simulate: invalid median fails with a nonzero exit") {
  const auto r = cli({"simulate", "--median", "0", "--out", scratch("bad.csv").string()});
  CHECK(r.code != 0);
  CHECK(r.err.find("median") != std::string::npos);
  CHECK(cli({"simulate", "--mechanism", "weird", "--out", scratch("bad.csv").string()}).code != 0);
  CHECK(cli({"nonsense"}).code != 0);
  CHECK(cli({}).code != 0);
}

TEST_CASE("experiment: row count and byte-identical reruns") {
  const auto a = scratch("exp_a.csv"), b = scratch("exp_b.csv");
  const auto r = cli({"experiment", "--preset", "1", "--trials", "2", "--seed", "5", "--out", a.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("\"rows\":6") != std::string::npos);
  CHECK(r.out.find("\"non_convergent\":0") != std::string::npos);
  REQUIRE(cli({"experiment", "--preset", "1", "--trials", "2", "--seed", "5", "--threads", "3", "--out",
               b.string()})
              .code == 0);
  const auto table = slurp(a);
  CHECK(table == slurp(b));
  CHECK(std::count(table.begin(), table.end(), '\n') == 7);
  CHECK(cli({"experiment", "--preset", "9", "--out", a.string()}).code != 0);
}

TEST_CASE("experiment: explicit samplers") {
  const auto path = scratch("exp_custom.csv");
  const auto r = cli({"experiment", "--trials", "3", "--median", "20:30", "--cure-rate", "0.1", "--p-censoring",
                      "0.3:0.4", "--n-cases", "200", "--out", path.string()});
  REQUIRE(r.code == 0);
  const auto table = read_table(path);
  CHECK(table.rows.size() == 9);
  for (const auto& row : table.rows) CHECK(row.n_cases <= 200);
  CHECK(cli({"experiment", "--median", "30:20", "--out", path.string()}).code != 0);
  CHECK(cli({"experiment", "--median", "abc", "--out", path.string()}).code != 0);
}

TEST_CASE("audit: veteran block and a per-arm input file") {
  const auto out = scratch("veteran_audit.csv");
  const auto r = cli({"audit", "--builtin", "veteran", "--out", out.string()});
  REQUIRE(r.code == 0);
  const auto text = slurp(out);
  CHECK(text.find("Veterans' Administration Lung Cancer Study,137,0.07,1.5,1.4,Kalbfleisch1980") !=
        std::string::npos);
  CHECK(text.find(" - standard,69,0.07,1.8,0.8,") != std::string::npos);
  CHECK(text.find(" - test,68,0.06,1.8,2,") != std::string::npos);
  CHECK(r.out.find("*QA") != std::string::npos);

  const auto input = scratch("arms.csv");
  std::ofstream(input) << "t,ev,arm\n1,1,a\n2,0,a\n3,1,a\n4,1,b\n5,0,b\n6,1,b\n7,1,b\n";
  const auto custom = cli({"audit", "--input", input.string(), "--time-col", "t", "--status-col", "ev",
                           "--group-col", "arm"});
  REQUIRE(custom.code == 0);
  CHECK(std::count(custom.out.begin(), custom.out.end(), '\n') == 4);
}

TEST_CASE("audit: schema errors and argument conflicts") {
  const auto input = scratch("nostatus.csv");
  std::ofstream(input) << "time,other\n1,1\n";
  const auto r = cli({"audit", "--input", input.string()});
  CHECK(r.code != 0);
  CHECK(r.err.find("status") != std::string::npos);
  CHECK(cli({"audit"}).code != 0);
  CHECK(cli({"audit", "--builtin", "mystery"}).code != 0);
}

TEST_CASE("roc: summary line for a table") {
  const auto table = scratch("roc_table.csv");
  REQUIRE(cli({"experiment", "--preset", "1", "--trials", "40", "--out", table.string()}).code == 0);
  const auto r = cli({"roc", "--table", table.string(), "--index", "SQBI"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("\"auc\":") != std::string::npos);
  CHECK(r.out.find("\"raw_cutoff\":") != std::string::npos);
}

TEST_CASE("plot km: one step path and one median drop-line per curve") {
  const auto data = scratch("two_arms.csv");
  std::ofstream(data) << "time,status,group\n1,1,a\n2,1,a\n3,1,a\n4,0,a\n2,1,b\n4,1,b\n6,1,b\n8,1,b\n";
  const auto svg = scratch("km.svg");
  REQUIRE(cli({"plot", "--kind", "km", "--dataset", data.string(), "--out", svg.string()}).code == 0);
  const auto text = slurp(svg);
  CHECK(count(text, "class=\"km-step\"") == 2);
  CHECK(count(text, "class=\"median-drop\"") == 2);
  CHECK(count(text, "class=\"censor-marks\"") == 1);
  CHECK(well_formed(text));
  CHECK(text.find("<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\"") != std::string::npos);
  CHECK(text.find("href") == std::string::npos);  // self-contained
  const auto log_svg = scratch("km_log.svg");
  REQUIRE(cli({"plot", "--kind", "km", "--dataset", data.string(), "--log-y", "--out", log_svg.string()}).code == 0);
  CHECK(well_formed(slurp(log_svg)));
}

TEST_CASE("plot trial: four curves, title with hr and p at 3 significant digits") {
  const auto complete = complete_follow_up({300, 25, 100, 0}, {4, 1});
  const auto censored = case_censoring(complete, 0.5, {4, 2});
  const auto a = scratch("trial_complete.csv"), b = scratch("trial_censored.csv"), svg = scratch("trial.svg");
  write_csv(complete, a);
  write_csv(censored, b);
  REQUIRE(cli({"plot", "--kind", "trial", "--dataset", a.string(), "--dataset", b.string(), "--mechanism", "case",
               "--title", "Case censoring", "--out", svg.string()})
              .code == 0);
  const auto text = slurp(svg);
  const auto fit = cox_two_group(load(a), load(b));
  const std::string title =
      "Case censoring,    hr: " + format_signif(fit.hr, 3) + "    p: " + format_signif(fit.p_value, 3);
  CHECK(text.find(plot::escape_xml(title)) != std::string::npos);
  CHECK(count(text, "class=\"km-step\"") == 4);
  CHECK(text.find("stroke=\"green\"") != std::string::npos);
  CHECK(text.find("stroke=\"darkorange\"") != std::string::npos);
  CHECK(text.find("stroke=\"purple\"") != std::string::npos);
  CHECK(well_formed(text));
}

TEST_CASE("plot scatters: regression r and Youden annotations") {
  const auto table = scratch("scatter_table.csv");
  REQUIRE(cli({"experiment", "--preset", "5", "--trials", "60", "--out", table.string()}).code == 0);
  const auto cs = scratch("censor.svg"), bs = scratch("bias.svg");
  REQUIRE(cli({"plot", "--kind", "censor_scatter", "--table", table.string(), "--out", cs.string()}).code == 0);
  const auto ctext = slurp(cs);
  const auto fit = case_censoring_correlation(read_table(table));
  CHECK(ctext.find("r = " + format_signif(fit.pearson_r, 3)) != std::string::npos);
  CHECK(count(ctext, "class=\"regression\"") == 1);
  CHECK(count(ctext, "class=\"point\"") == 180);
  CHECK(well_formed(ctext));

  REQUIRE(cli({"plot", "--kind", "bias_scatter", "--table", table.string(), "--index", "SABI", "--out",
               bs.string()})
              .code == 0);
  const auto btext = slurp(bs);
  CHECK(count(btext, "class=\"cutoff\"") == 1);
  for (const char* label : {"Area under ROC", "Cutoff: ", "Sensit: ", "Specif: ", "posPV: ", "negPV: "})
    CHECK(btext.find(label) != std::string::npos);
  CHECK(well_formed(btext));
  CHECK(cli({"plot", "--kind", "pie", "--out", bs.string()}).code != 0);
  CHECK(cli({"plot", "--kind", "censor_scatter", "--out", bs.string()}).code != 0);
}

TEST_CASE("bias scatter of scaled QBI puts the cutoff near one") {
  auto spec = preset_experiment(1);
  spec.n_trials = 150;
  const auto table = run_experiment(spec, 0);
  plot::Svg svg(500, 400);
  const auto roc = plot::bias_scatter(svg, {0, 0, 500, 400}, table, "SQBI", "exp1");
  CHECK(roc.cutoff > 0.8);
  CHECK(roc.cutoff < 1.2);
  CHECK(well_formed(svg.render()));
}

TEST_CASE("figures: five SVGs and the audit table") {
  const auto dir = scratch("figures");
  fs::remove_all(dir);
  const auto r = cli({"figures", "--out-dir", dir.string(), "--trials", "20"});
  REQUIRE(r.code == 0);
  for (const char* f : {"fig1.svg", "fig2.svg", "fig3.svg", "fig4.svg", "fig5.svg", "table1.csv"}) {
    CAPTURE(f);
    REQUIRE(fs::exists(dir / f));
    CHECK(fs::file_size(dir / f) > 0);
  }
  for (const char* f : {"fig1.svg", "fig2.svg", "fig3.svg", "fig4.svg", "fig5.svg"}) CHECK(well_formed(slurp(dir / f)));
  CHECK(count(slurp(dir / "fig1.svg"), "class=\"title\"") == 12);
  CHECK(count(slurp(dir / "fig4.svg"), "class=\"cutoff\"") == 4);
  const auto audit = scratch("audit_all.csv");
  REQUIRE(cli({"audit", "--builtin", "all", "--out", audit.string()}).code == 0);
  CHECK(slurp(audit) == slurp(dir / "table1.csv"));
}
