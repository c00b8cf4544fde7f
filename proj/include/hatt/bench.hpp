#pragma once

// Benchmark scenarios, result rows and the CSV schema.
//
// CSV columns (fixed order):
//   scenario,algorithm,d,n,r,s,ell,seed,rel_error,wall_time_s,flops_measured,
//   flops_predicted,output_ranks
// rel_error is empty when no oracle was available. output_ranks is the chain
// joined by ';' (e.g. 1;4;4;1), or "error:<kind>" for a failed cell, where kind
// is "resource" (a cap was hit) or "failed" (any other error).
// flops_measured counts matmul + QR flops; the SVD bucket is reported only by
// --flop-report.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hatt/apps.hpp"
#include "hatt/recompress.hpp"

namespace hatt {

struct ResultRow {
  std::string scenario;
  std::string algorithm;
  Index d = 0;
  Index n = 0;
  Index r = 0;
  Index s = 0;
  Index ell = 0;
  std::uint64_t seed = 0;
  std::optional<double> rel_error;
  double wall_time_s = 0.0;
  std::int64_t flops_measured = 0;
  std::int64_t flops_predicted = 0;
  std::vector<Index> output_ranks;
  std::optional<std::string> error;  ///< "resource" or "failed"

  FlopLedger ledger;  ///< breakdown for --flop-report; not serialized
  std::string note;   ///< free text for --flop-report; not serialized
};

struct Scenario {
  std::string name = "example1";
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::vector<Algorithm> algorithms{Algorithm::tt_rounding, Algorithm::rand_orth,
                                    Algorithm::hatt1, Algorithm::hatt2};
  bool algorithms_given = false;
  std::optional<Index> d;
  std::optional<Index> n;
  std::vector<Index> ranks;    ///< r = s sweep (empty: scenario default)
  std::vector<Index> targets;  ///< l sweep (empty: scenario default)
  std::optional<std::string> variant;  ///< "svd" or "direct" (hatt-1 only)
  std::optional<Index> max_terms;
  std::optional<Index> dense_cap;
  std::optional<Index> core_cap;
  std::optional<Index> harmonics;
  std::optional<Index> max_iterations;
  std::optional<std::string> power_scheme;
  std::vector<std::string> functions;  ///< example3: qing and/or alpine
  std::optional<std::string> y_path;
  std::optional<std::string> z_path;
  std::optional<std::string> out;  ///< CSV path; standard output when absent
  std::optional<std::string> summary;
  bool flop_report = false;
  bool strict = false;
  bool sequential_timing = false;
  Index jobs = 1;

  ResourceLimits limits() const;
  HpcrlVariant hatt1_variant() const;
};

/// Thrown by cli_parse for --help; carries the help text.
struct HelpRequested {
  std::string text;
};

/// Parses tt_bench arguments (without the program name). Malformed, unknown or
/// conflicting flags raise UsageError.
Scenario cli_parse(const std::vector<std::string>& args);

std::vector<ResultRow> run_example1(const Scenario& sc);
std::vector<ResultRow> run_example2(const Scenario& sc);
std::vector<ResultRow> run_example3(const Scenario& sc);
std::vector<ResultRow> run_appendixF(const Scenario& sc);
std::vector<ResultRow> run_custom(const Scenario& sc);
std::vector<ResultRow> run_scenario(const Scenario& sc);

/// One recompression cell. The reference, when given, is the dense Y (.) Z.
ResultRow run_recompress_cell(const std::string& scenario, const TTTensor& y, const TTTensor& z,
                              const DenseTensor* reference, Index ell, Algorithm algorithm,
                              std::uint64_t seed, const Scenario& sc);

std::string csv_header();
std::string to_csv_line(const ResultRow& row);
ResultRow parse_csv_line(const std::string& line);
void write_csv(std::ostream& out, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_csv(std::istream& in);

struct SummaryRow {
  std::string scenario;
  std::string algorithm;
  Index d = 0, n = 0, r = 0, s = 0, ell = 0;
  Index count = 0;   ///< rows that completed
  Index failed = 0;  ///< rows with an error marker
  std::optional<double> rel_error_mean;
  std::optional<double> rel_error_std;
  double wall_time_mean = 0.0;
  double wall_time_std = 0.0;
  double flops_measured_mean = 0.0;
  std::int64_t flops_predicted = 0;
  std::optional<double> speedup_vs_tt_rounding;
};

/// Groups rows by (scenario, algorithm, d, n, r, s, ell) in first-seen order.
/// std is the sample standard deviation (0 for a single row).
std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows);
void write_summary(std::ostream& out, const std::vector<SummaryRow>& rows);

void write_flop_report(std::ostream& out, const std::vector<ResultRow>& rows);

/// 0 when every cell completed; resource-capped cells count as failures only
/// with --strict; any other failure gives 1.
int exit_code(const std::vector<ResultRow>& rows, bool strict);

}  // namespace hatt
