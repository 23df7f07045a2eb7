#include "censorbias/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <string_view>

#include "censorbias/csv.hpp"
#include "censorbias/errors.hpp"
#include "censorbias/format.hpp"

#ifndef CENSORBIAS_DATA_DIR
#define CENSORBIAS_DATA_DIR "data"
#endif

namespace censorbias {

std::size_t SurvivalDataset::event_count() const {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [](const auto& r) { return r.status == 1; }));
}

std::size_t SurvivalDataset::censored_count() const { return size() - event_count(); }

std::vector<double> SurvivalDataset::event_times() const {
  std::vector<double> times;
  for (const auto& r : records)
    if (r.status == 1) times.push_back(r.time);
  return times;
}

std::vector<double> SurvivalDataset::censored_times() const {
  std::vector<double> times;
  for (const auto& r : records)
    if (r.status != 1) times.push_back(r.time);
  return times;
}

SurvivalDataset SurvivalDataset::subset(const std::string& group, std::string subset_name) const {
  SurvivalDataset out{std::move(subset_name), {}};
  for (const auto& r : records)
    if (r.group == group) out.records.push_back(r);
  return out;
}

void validate(const SurvivalDataset& dataset) {
  for (std::size_t i = 0; i < dataset.records.size(); ++i) {
    const auto& r = dataset.records[i];
    if (!std::isfinite(r.time) || r.time < 0.0)
      throw ValueError("record " + std::to_string(i) + ": time must be finite and non-negative");
    if (r.status != 0 && r.status != 1)
      throw ValueError("record " + std::to_string(i) + ": status must be 0 or 1");
  }
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

bool is_missing(std::string_view cell) {
  cell = trim(cell);
  return cell.empty() || cell == "NA" || cell == "NaN" || cell == ".";
}

std::optional<double> try_number(std::string_view cell) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc{} || ptr != cell.data() + cell.size() || cell.empty()) return std::nullopt;
  return value;
}

double number_cell(std::string_view cell, std::string_view column, std::size_t row) {
  if (is_missing(cell))
    throw ValueError("row " + std::to_string(row + 1) + ": missing value in column '" +
                     std::string(column) + "'");
  if (auto value = try_number(cell); value && std::isfinite(*value)) return *value;
  throw ValueError("row " + std::to_string(row + 1) + ": non-numeric value '" + std::string(cell) +
                   "' in column '" + std::string(column) + "'");
}

bool is_event(std::string_view cell, const std::vector<std::string>& tokens) {
  cell = trim(cell);
  const auto numeric = try_number(cell);
  for (const auto& token : tokens) {
    if (cell == trim(token)) return true;
    if (numeric) {
      if (auto t = try_number(token); t && *t == *numeric) return true;
    }
  }
  return false;
}

}  // namespace

SurvivalDataset read_csv(const std::filesystem::path& path, const DatasetMapping& mapping,
                         std::string name) {
  const csv::Table table = csv::read_file(path);
  const std::size_t status_col = table.column(mapping.status_column);
  std::optional<std::size_t> time_col, start_col, stop_col, group_col;
  if (mapping.derived_time) {
    start_col = table.column(mapping.derived_time->first);
    stop_col = table.column(mapping.derived_time->second);
  } else {
    time_col = table.column(mapping.time_column);
  }
  if (mapping.group_column) group_col = table.column(*mapping.group_column);
  if (table.rows.empty()) throw SchemaError(path.string() + " has no data rows");

  SurvivalDataset dataset;
  dataset.name = name.empty() ? path.stem().string() : std::move(name);
  dataset.records.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    SurvivalRecord record;
    if (mapping.derived_time) {
      const double start = number_cell(row[*start_col], mapping.derived_time->first, i);
      const double stop = number_cell(row[*stop_col], mapping.derived_time->second, i);
      record.time = stop - start;
      if (record.time < 0.0)
        throw ValueError("row " + std::to_string(i + 1) + ": negative derived time");
    } else {
      record.time = number_cell(row[*time_col], mapping.time_column, i);
      if (record.time < 0.0) throw ValueError("row " + std::to_string(i + 1) + ": negative time");
    }
    const std::string_view status = row[status_col];
    if (is_missing(status))
      throw ValueError("row " + std::to_string(i + 1) + ": missing status");
    record.status = is_event(status, mapping.event_values) ? 1 : 0;
    if (group_col) record.group = std::string(trim(row[*group_col]));
    dataset.records.push_back(std::move(record));
  }
  return dataset;
}

void write_csv(const SurvivalDataset& dataset, const std::filesystem::path& path) {
  csv::Table table;
  table.header = {"time", "status", "group"};
  table.rows.reserve(dataset.size());
  for (const auto& r : dataset.records)
    table.rows.push_back({format_shortest(r.time), std::to_string(r.status), r.group});
  csv::write_file(path, table);
}

namespace {

struct ArmSpec {
  std::string group;
  std::string trial;
};

struct ClinicalSpec {
  std::string id;
  std::string trial;
  std::string reference;
  DatasetMapping mapping;
  std::vector<ArmSpec> arms;
};

const std::vector<ClinicalSpec>& clinical_specs() {
  using Pair = std::pair<std::string, std::string>;
  static const std::vector<ClinicalSpec> specs = {
      {"aml", "Acute Myelogenous Leukemia survival data", "Miller1997",
       {"time", "status", {"1"}, "x", std::nullopt}, {}},
      {"bladder1", "Bladder Cancer Recurrences - bladder1", "Wei1989",
       {"time", "status", {"1", "2"}, "treatment", Pair{"start", "stop"}},
       {{"placebo", " - placebo"}, {"pyridoxine", " - pyridoxine"}, {"thiotepa", " - thiotepa"}}},
      {"bladder2", "Bladder Cancer Recurrences - bladder2", "Wei1989",
       {"time", "event", {"1"}, "rx", Pair{"start", "stop"}},
       {{"1", " - rx1"}, {"2", " - rx2"}}},
      {"lung", "NCCTG Lung Cancer Data", "Loprinzi1994",
       {"time", "status", {"2"}, std::nullopt, std::nullopt}, {}},
      {"colon", "Chemotherapy for Stage B/C colon cancer", "Moertel1990",
       {"time", "status", {"1"}, "rx", std::nullopt},
       {{"Obs", " - Observation"}, {"Lev", " - Levamisol"}, {"Lev+5FU", " - Levamisol + 5FU"}}},
      {"ovarian", "Ovarian Cancer Survival Data", "Edmonson1979",
       {"futime", "fustat", {"1"}, "rx", std::nullopt},
       {{"1", " - rx1"}, {"2", " - rx2"}}},
      {"veteran", "Veterans' Administration Lung Cancer Study", "Kalbfleisch1980",
       {"time", "status", {"1"}, "trt", std::nullopt},
       {{"1", " - standard"}, {"2", " - test"}}},
  };
  return specs;
}

}  // namespace

const std::vector<std::string>& clinical_dataset_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> out;
    for (const auto& spec : clinical_specs()) out.push_back(spec.id);
    return out;
  }();
  return ids;
}

std::filesystem::path default_data_dir() { return CENSORBIAS_DATA_DIR; }

std::vector<ClinicalEntry> clinical_preprocess(const std::string& dataset_id,
                                               const std::filesystem::path& data_dir) {
  const auto& specs = clinical_specs();
  const auto it = std::find_if(specs.begin(), specs.end(),
                               [&](const ClinicalSpec& s) { return s.id == dataset_id; });
  if (it == specs.end()) throw DomainError("unknown dataset '" + dataset_id + "'");

  std::vector<ClinicalEntry> entries;
  SurvivalDataset overall = read_csv(data_dir / (it->id + ".csv"), it->mapping, it->id);
  for (const auto& arm : it->arms) {
    SurvivalDataset part = overall.subset(arm.group, it->id + "/" + arm.group);
    entries.push_back({std::move(part), arm.trial, ""});
  }
  entries.insert(entries.begin(), ClinicalEntry{std::move(overall), it->trial, it->reference});
  return entries;
}

}  // namespace censorbias
