#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "censorbias/bias.hpp"

namespace censorbias {

/// Runs the command line (arguments without the program name). Returns the exit code;
/// reports go to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Audit rows of one bundled dataset, or of every one in catalog order for "all".
std::vector<AuditRow> builtin_audit(const std::string& id,
                                    const std::filesystem::path& data_dir = default_data_dir());

/// Audit table cells: pCens with two decimals, indexes at 2 significant digits, "NA" when undefined.
std::vector<std::string> audit_cells(const AuditRow& row);

/// CSV with header trial,n,pCens,SQBI,SABI,reference.
void write_audit_csv(const std::vector<AuditRow>& rows, std::ostream& out);

struct FiguresOptions {
  std::filesystem::path out_dir = "figures";
  int n_trials = 1000;
  std::uint64_t seed = 1963;
  unsigned threads = 0;
  std::filesystem::path data_dir = default_data_dir();
};

/// fig1..fig5 SVGs and table1.csv under out_dir; returns the written paths.
std::vector<std::filesystem::path> write_figures(const FiguresOptions& options);

}  // namespace censorbias
