#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace censorbias {

/// One subject: follow-up time, event flag (1 = event, 0 = censored), arm label.
struct SurvivalRecord {
  double time = 0.0;
  int status = 0;
  std::string group;

  friend bool operator==(const SurvivalRecord&, const SurvivalRecord&) = default;
};

struct SurvivalDataset {
  std::string name;
  std::vector<SurvivalRecord> records;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }
  std::size_t event_count() const;
  std::size_t censored_count() const;

  std::vector<double> event_times() const;
  std::vector<double> censored_times() const;

  /// Records whose group label equals `group`, named `name`.
  SurvivalDataset subset(const std::string& group, std::string name) const;

  friend bool operator==(const SurvivalDataset&, const SurvivalDataset&) = default;
};

/// Throws ValueError when a record has a negative or non-finite time or a status outside {0, 1}.
void validate(const SurvivalDataset& dataset);

/// How the columns of an arbitrary CSV map onto (time, status, group).
struct DatasetMapping {
  std::string time_column = "time";
  std::string status_column = "status";
  /// Status cells equal to any of these tokens are events; all others are censored.
  std::vector<std::string> event_values = {"1"};
  std::optional<std::string> group_column;
  /// (start, stop): time = stop - start, replacing time_column.
  std::optional<std::pair<std::string, std::string>> derived_time;
};

SurvivalDataset read_csv(const std::filesystem::path& path, const DatasetMapping& mapping,
                         std::string name = {});

/// Writes columns time,status,group with round-trip exact numbers.
void write_csv(const SurvivalDataset& dataset, const std::filesystem::path& path);

/// One row of the bundled-dataset catalog: a dataset or one of its arms.
struct ClinicalEntry {
  SurvivalDataset dataset;
  std::string trial;
  std::string reference;
};

/// Bundled dataset ids in catalog order.
const std::vector<std::string>& clinical_dataset_ids();

/// Directory holding the bundled CSVs (compile-time default, overridable).
std::filesystem::path default_data_dir();

/// Loads a bundled dataset with its historical preprocessing; returns overall then per-arm entries.
std::vector<ClinicalEntry> clinical_preprocess(const std::string& dataset_id,
                                               const std::filesystem::path& data_dir = default_data_dir());

}  // namespace censorbias
