#include "hatt/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "hatt/errors.hpp"
#include "hatt/flop_model.hpp"
#include "hatt/random.hpp"

namespace hatt {

namespace {

const std::vector<std::string> kScenarios{"example1", "example2", "example3", "appendixF",
                                          "custom"};

std::vector<Index> uniform_chain(std::size_t d, Index inner) {
  std::vector<Index> chain(d + 1, inner);
  chain.front() = chain.back() = 1;
  return chain;
}

std::string join_chain(const std::vector<Index>& chain) {
  std::string out;
  for (std::size_t k = 0; k < chain.size(); ++k) {
    if (k) out += ';';
    out += std::to_string(chain[k]);
  }
  return out;
}

std::string format_double(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(s);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

template <typename T>
T parse_number(const std::string& text, const char* column) {
  std::istringstream in(text);
  T value{};
  if (!(in >> value) || !(in >> std::ws).eof()) {
    throw UsageError(std::string("CSV: bad value '") + text + "' in column " + column);
  }
  return value;
}

std::vector<ResultRow> run_cells(std::vector<std::function<ResultRow()>> cells, Index jobs) {
  std::vector<ResultRow> rows(cells.size());
  if (jobs <= 1 || cells.size() <= 1) {
    for (std::size_t i = 0; i < cells.size(); ++i) rows[i] = cells[i]();
    return rows;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), cells.size());
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < cells.size(); i = next++) rows[i] = cells[i]();
    });
  }
  for (auto& t : pool) t.join();
  return rows;
}

std::optional<DenseTensor> dense_hadamard(const TTTensor& y, const TTTensor& z,
                                          const ResourceLimits& limits) {
  if (y.shape().numel() > limits.max_dense_elements) return std::nullopt;
  return hadamard_dense(tt_to_dense(y, limits), tt_to_dense(z, limits));
}

void mark_failure(ResultRow& row, const std::exception& e, bool resource) {
  row.error = resource ? "resource" : "failed";
  row.note = e.what();
  row.rel_error.reset();
  row.output_ranks.clear();
}

}  // namespace

ResourceLimits Scenario::limits() const {
  ResourceLimits out;
  if (dense_cap) out.max_dense_elements = *dense_cap;
  if (core_cap) out.max_core_elements = *core_cap;
  return out;
}

HpcrlVariant Scenario::hatt1_variant() const {
  if (variant && *variant == "direct") return HpcrlVariant::direct();
  return HpcrlVariant::svd(max_terms);
}

// ---------------------------------------------------------------------------
// CLI

Scenario cli_parse(const std::vector<std::string>& args) {
  Scenario sc;
  CLI::App app{"Hadamard-product TT recompression benchmarks", "tt_bench"};
  std::vector<std::string> algorithms;
  app.add_option("--scenario", sc.name, "example1 | example2 | example3 | appendixF | custom")
      ->check(CLI::IsMember(kScenarios));
  app.add_option("--seeds", sc.seeds, "comma-separated distinct seeds (default 1,2,3,4,5)")
      ->delimiter(',');
  app.add_option("--out", sc.out, "CSV output path (default: standard output)");
  app.add_option("--algorithms", algorithms, "subset of tt-rounding,rand-orth,hatt-1,hatt-2")
      ->delimiter(',');
  app.add_option("--d", sc.d, "tensor order")->check(CLI::PositiveNumber);
  app.add_option("--n", sc.n, "mode size")->check(CLI::PositiveNumber);
  app.add_option("--ranks", sc.ranks, "input ranks r = s to sweep")->delimiter(',')
      ->check(CLI::PositiveNumber);
  app.add_option("--targets", sc.targets, "target ranks l to sweep")->delimiter(',')
      ->check(CLI::PositiveNumber);
  app.add_option("--variant", sc.variant, "rank-1 form for hatt-1: svd | direct")
      ->check(CLI::IsMember({"svd", "direct"}));
  app.add_option("--max-terms", sc.max_terms, "cap on retained rank-1 terms (hatt-1, svd)")
      ->check(CLI::PositiveNumber);
  app.add_option("--dense-cap", sc.dense_cap, "element cap for dense oracles")
      ->check(CLI::PositiveNumber);
  app.add_option("--core-cap", sc.core_cap, "element cap for explicitly built TT cores")
      ->check(CLI::PositiveNumber);
  app.add_option("--harmonics", sc.harmonics, "example1: number of Fourier terms J")
      ->check(CLI::PositiveNumber);
  app.add_option("--max-iter", sc.max_iterations, "example3: power-iteration limit")
      ->check(CLI::PositiveNumber);
  app.add_option("--power-scheme", sc.power_scheme, "example3: squaring | linear")
      ->check(CLI::IsMember({"squaring", "linear"}));
  app.add_option("--functions", sc.functions, "example3: qing,alpine")->delimiter(',')
      ->check(CLI::IsMember({"qing", "alpine"}));
  app.add_option("--y", sc.y_path, "custom: TT file for Y");
  app.add_option("--z", sc.z_path, "custom: TT file for Z");
  app.add_option("--summary", sc.summary, "summary CSV path ('-' for standard error)");
  app.add_flag("--flop-report", sc.flop_report, "print a flop breakdown to standard error");
  app.add_flag("--strict", sc.strict, "treat resource-capped cells as failures");
  app.add_flag("--sequential-timing", sc.sequential_timing, "run cells one at a time");
  app.add_option("--jobs", sc.jobs, "cells to run concurrently")->check(CLI::PositiveNumber);

  std::vector<std::string> argv_store{"tt_bench"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested{app.help()};
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  if (!algorithms.empty()) {
    sc.algorithms.clear();
    for (const auto& name : algorithms) {
      const Algorithm a = parse_algorithm(name);
      if (std::find(sc.algorithms.begin(), sc.algorithms.end(), a) == sc.algorithms.end()) {
        sc.algorithms.push_back(a);
      }
    }
    sc.algorithms_given = true;
  } else if (sc.name == "appendixF") {
    sc.algorithms = {Algorithm::hatt1, Algorithm::hatt2};
  }
  const bool has_hatt1 = std::find(sc.algorithms.begin(), sc.algorithms.end(),
                                   Algorithm::hatt1) != sc.algorithms.end();
  if (sc.variant && !has_hatt1) {
    throw UsageError("--variant applies to hatt-1 only; hatt-2 always uses the direct form");
  }
  if (sc.max_terms && !has_hatt1) throw UsageError("--max-terms applies to hatt-1 only");
  if (sc.max_terms && sc.variant && *sc.variant == "direct") {
    throw UsageError("--max-terms needs --variant svd");
  }
  if (sc.seeds.empty()) throw UsageError("--seeds must not be empty");
  if (std::set<std::uint64_t>(sc.seeds.begin(), sc.seeds.end()).size() != sc.seeds.size()) {
    throw UsageError("--seeds must be distinct");
  }
  if (sc.y_path.has_value() != sc.z_path.has_value()) {
    throw UsageError("--y and --z must be given together");
  }
  if (sc.y_path && sc.name != "custom") throw UsageError("--y/--z need --scenario custom");
  if (sc.y_path && (sc.d || sc.n || !sc.ranks.empty())) {
    throw UsageError("--y/--z conflict with --d, --n and --ranks");
  }
  if (sc.name == "custom" && sc.targets.empty()) throw UsageError("custom scenario needs --targets");
  if (sc.name == "custom" && !sc.y_path && (!sc.d || !sc.n || sc.ranks.empty())) {
    throw UsageError("custom scenario needs --y/--z or --d, --n and --ranks");
  }
  if (sc.sequential_timing && sc.jobs > 1) {
    throw UsageError("--sequential-timing conflicts with --jobs > 1");
  }
  if (!sc.functions.empty() && sc.name != "example3") {
    throw UsageError("--functions applies to example3 only");
  }
  if ((sc.max_iterations || sc.power_scheme) && sc.name != "example3") {
    throw UsageError("--max-iter and --power-scheme apply to example3 only");
  }
  if (sc.harmonics && sc.name != "example1") throw UsageError("--harmonics applies to example1 only");
  return sc;
}

// ---------------------------------------------------------------------------
// Cells

ResultRow run_recompress_cell(const std::string& scenario, const TTTensor& y, const TTTensor& z,
                              const DenseTensor* reference, Index ell, Algorithm algorithm,
                              std::uint64_t seed, const Scenario& sc) {
  const Shape shape = y.shape();
  ResultRow row;
  row.scenario = scenario;
  row.algorithm = std::string(algorithm_name(algorithm));
  row.d = static_cast<Index>(shape.order());
  row.n = *std::max_element(shape.dims().begin(), shape.dims().end());
  row.r = y.max_rank();
  row.s = z.max_rank();
  row.ell = ell;
  row.seed = seed;
  if (row.d >= 2) {
    row.flops_predicted = flop_model(row.algorithm, FlopModelParams{row.d, row.n, row.r, row.s,
                                                                    std::max<Index>(1, ell), {}});
  }

  RecompressOptions opts;
  opts.algorithm = algorithm;
  opts.seed = seed;
  opts.svd_variant = sc.hatt1_variant();
  opts.limits = sc.limits();
  opts.warn_on_clamp = false;
  try {
    RecompressResult res = recompress_hadamard(y, z, uniform_chain(shape.order(), ell), opts);
    row.wall_time_s = res.report.wall_time_s;
    row.ledger = res.report.flops_measured;
    row.flops_measured = row.ledger.exact();
    row.flops_predicted = res.report.flops_predicted;
    row.output_ranks = res.report.output_ranks;
    if (reference) row.rel_error = relative_error(res.tensor, *reference);
  } catch (const ResourceError& e) {
    mark_failure(row, e, true);
  } catch (const std::exception& e) {
    mark_failure(row, e, false);
  }
  return row;
}

std::vector<ResultRow> run_example1(const Scenario& sc) {
  FourierSpec spec;
  const Index d = sc.d.value_or(5);
  const Index n = sc.n.value_or(8);
  spec.shape = Shape(std::vector<Index>(d, n));
  spec.harmonics = sc.harmonics.value_or(60);
  std::vector<Index> ells = sc.targets;
  if (ells.empty()) ells = {2, 4, 6, 8, 10, 12};

  std::vector<std::function<ResultRow()>> cells;
  std::vector<std::shared_ptr<const std::pair<FourierPair, std::optional<DenseTensor>>>> inputs;
  const ResourceLimits limits = sc.limits();
  for (std::uint64_t seed : sc.seeds) {
    FlopLedger scratch;
    FourierPair pair = fourier_tt(spec, seed, scratch, limits);
    auto ref = dense_hadamard(pair.y, pair.z, limits);
    inputs.push_back(std::make_shared<const std::pair<FourierPair, std::optional<DenseTensor>>>(
        std::move(pair), std::move(ref)));
    const auto in = inputs.back();
    for (Index ell : ells)
      for (Algorithm a : sc.algorithms)
        cells.push_back([in, ell, a, seed, &sc] {
          return run_recompress_cell("example1", in->first.y, in->first.z,
                                     in->second ? &*in->second : nullptr, ell, a, seed, sc);
        });
  }
  return run_cells(std::move(cells), sc.sequential_timing ? 1 : sc.jobs);
}

std::vector<ResultRow> run_example2(const Scenario& sc) {
  const Index d = sc.d.value_or(5);
  const Index n = sc.n.value_or(6);
  std::vector<Index> ranks = sc.ranks;
  if (ranks.empty()) ranks = {10, 20, 30, 40};
  std::vector<Index> ells = sc.targets;
  if (ells.empty()) ells = {8};
  const Shape shape(std::vector<Index>(d, n));
  const ResourceLimits limits = sc.limits();

  std::vector<std::function<ResultRow()>> cells;
  for (Index r : ranks) {
    for (std::uint64_t seed : sc.seeds) {
      const auto chain = uniform_chain(d, r);
      auto y = std::make_shared<const TTTensor>(random_tt(
          RandomSpec{shape, chain, Distribution::uniform, substream_seed(seed, 1000 + r)}));
      auto z = std::make_shared<const TTTensor>(random_tt(
          RandomSpec{shape, chain, Distribution::uniform, substream_seed(seed, 2000 + r)}));
      auto ref = std::make_shared<const std::optional<DenseTensor>>(dense_hadamard(*y, *z, limits));
      for (Index ell : ells)
        for (Algorithm a : sc.algorithms)
          cells.push_back([=, &sc] {
            return run_recompress_cell("example2", *y, *z, *ref ? &**ref : nullptr, ell, a, seed,
                                       sc);
          });
    }
  }
  return run_cells(std::move(cells), sc.sequential_timing ? 1 : sc.jobs);
}

std::vector<ResultRow> run_example3(const Scenario& sc) {
  const Index d = sc.d.value_or(4);
  const Index n = sc.n.value_or(10);
  std::vector<Index> ells = sc.targets;
  if (ells.empty()) ells = {5};
  std::vector<std::string> functions = sc.functions;
  if (functions.empty()) functions = {"qing", "alpine"};
  const PowerScheme scheme = parse_power_scheme(sc.power_scheme.value_or("squaring"));
  const ResourceLimits limits = sc.limits();

  std::vector<std::function<ResultRow()>> cells;
  for (const auto& fname : functions) {
    const auto spec = separable_spec(parse_separable_kind(fname), d, n);
    auto y = std::make_shared<const TTTensor>(separable_tt(spec));
    std::optional<double> exact;
    if (y->shape().numel() <= limits.max_dense_elements) {
      exact = brute_force_max(tt_to_dense(*y, limits)).value;
    }
    for (Index ell : ells)
      for (std::uint64_t seed : sc.seeds)
        for (Algorithm a : sc.algorithms)
          cells.push_back([=, &sc] {
            ResultRow row;
            row.scenario = "example3-" + fname;
            row.algorithm = std::string(algorithm_name(a));
            row.d = d;
            row.n = n;
            row.r = y->max_rank();
            row.s = ell;
            row.ell = ell;
            row.seed = seed;
            PowerIterOptions opts;
            opts.rank = ell;
            opts.max_iterations = sc.max_iterations.value_or(100);
            opts.algorithm = a;
            opts.scheme = scheme;
            opts.seed = seed;
            opts.svd_variant = sc.hatt1_variant();
            opts.limits = limits;
            try {
              PowerIterResult res = power_iteration_max(*y, opts);
              row.wall_time_s = res.wall_time_s;
              row.ledger = res.flops;
              row.flops_measured = res.flops.exact();
              const Index t = res.iterations_used;
              if (d >= 2) {
                const std::string name(algorithm_name(a));
                if (scheme == PowerScheme::linear) {
                  row.flops_predicted = t * flop_model(name, {d, n, row.r, ell, ell, {}});
                } else {
                  row.flops_predicted = flop_model(name, {d, n, row.r, 1, ell, {}}) +
                                        (t - 1) * flop_model(name, {d, n, ell, ell, ell, {}});
                }
              }
              row.output_ranks = uniform_chain(d, ell);
              if (exact) row.rel_error = std::abs(res.estimate - *exact) / std::abs(*exact);
              row.note = "estimate=" + format_double(res.estimate, 17) +
                         " iterations=" + std::to_string(t) + " scheme=" +
                         std::string(power_scheme_name(scheme));
            } catch (const ResourceError& e) {
              mark_failure(row, e, true);
            } catch (const std::exception& e) {
              mark_failure(row, e, false);
            }
            return row;
          });
  }
  return run_cells(std::move(cells), sc.sequential_timing ? 1 : sc.jobs);
}

std::vector<ResultRow> run_appendixF(const Scenario& sc) {
  Scenario local = sc;
  if (!local.max_terms && !(local.variant && *local.variant == "direct")) local.max_terms = 5;
  const Index d = sc.d.value_or(5);
  const Index n = sc.n.value_or(8);
  std::vector<Index> ranks = sc.ranks;
  if (ranks.empty()) ranks = {20};
  std::vector<Index> ells = sc.targets;
  if (ells.empty()) ells = {4, 6, 8, 10, 12, 14, 16};
  const ResourceLimits limits = sc.limits();

  std::vector<ResultRow> rows;
  for (Index r : ranks) {
    const TTTensor y = hilbert_tt(d, n, r);
    const auto ref = dense_hadamard(y, y, limits);
    std::vector<std::function<ResultRow()>> cells;
    for (Index ell : ells)
      for (std::uint64_t seed : sc.seeds)
        for (Algorithm a : local.algorithms)
          cells.push_back([&, ell, seed, a] {
            return run_recompress_cell("appendixF", y, y, ref ? &*ref : nullptr, ell, a, seed,
                                       local);
          });
    auto part = run_cells(std::move(cells), sc.sequential_timing ? 1 : sc.jobs);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  return rows;
}

std::vector<ResultRow> run_custom(const Scenario& sc) {
  const ResourceLimits limits = sc.limits();
  std::vector<std::function<ResultRow()>> cells;
  if (sc.y_path) {
    auto y = std::make_shared<const TTTensor>(load_tt(*sc.y_path));
    auto z = std::make_shared<const TTTensor>(load_tt(*sc.z_path));
    if (!(y->shape() == z->shape())) throw UsageError("--y and --z have different shapes");
    auto ref = std::make_shared<const std::optional<DenseTensor>>(dense_hadamard(*y, *z, limits));
    for (Index ell : sc.targets)
      for (std::uint64_t seed : sc.seeds)
        for (Algorithm a : sc.algorithms)
          cells.push_back([=, &sc] {
            return run_recompress_cell("custom", *y, *z, *ref ? &**ref : nullptr, ell, a, seed, sc);
          });
  } else {
    const Shape shape(std::vector<Index>(*sc.d, *sc.n));
    for (Index r : sc.ranks)
      for (std::uint64_t seed : sc.seeds) {
        const auto chain = uniform_chain(*sc.d, r);
        auto y = std::make_shared<const TTTensor>(random_tt(
            RandomSpec{shape, chain, Distribution::gaussian, substream_seed(seed, 1000 + r)}));
        auto z = std::make_shared<const TTTensor>(random_tt(
            RandomSpec{shape, chain, Distribution::gaussian, substream_seed(seed, 2000 + r)}));
        auto ref =
            std::make_shared<const std::optional<DenseTensor>>(dense_hadamard(*y, *z, limits));
        for (Index ell : sc.targets)
          for (Algorithm a : sc.algorithms)
            cells.push_back([=, &sc] {
              return run_recompress_cell("custom", *y, *z, *ref ? &**ref : nullptr, ell, a, seed,
                                         sc);
            });
      }
  }
  return run_cells(std::move(cells), sc.sequential_timing ? 1 : sc.jobs);
}

std::vector<ResultRow> run_scenario(const Scenario& sc) {
  if (sc.name == "example1") return run_example1(sc);
  if (sc.name == "example2") return run_example2(sc);
  if (sc.name == "example3") return run_example3(sc);
  if (sc.name == "appendixF") return run_appendixF(sc);
  if (sc.name == "custom") return run_custom(sc);
  throw UsageError("unknown scenario '" + sc.name + "'");
}

// ---------------------------------------------------------------------------
// CSV

std::string csv_header() {
  return "scenario,algorithm,d,n,r,s,ell,seed,rel_error,wall_time_s,flops_measured,"
         "flops_predicted,output_ranks";
}

std::string to_csv_line(const ResultRow& row) {
  std::ostringstream out;
  out << row.scenario << ',' << row.algorithm << ',' << row.d << ',' << row.n << ',' << row.r
      << ',' << row.s << ',' << row.ell << ',' << row.seed << ','
      << (row.rel_error ? format_double(*row.rel_error, 17) : std::string()) << ','
      << format_double(row.wall_time_s, 9) << ',' << row.flops_measured << ','
      << row.flops_predicted << ','
      << (row.error ? "error:" + *row.error : join_chain(row.output_ranks));
  return out.str();
}

ResultRow parse_csv_line(const std::string& line) {
  const auto f = split(line, ',');
  if (f.size() != 13) {
    throw UsageError("CSV: expected 13 fields, got " + std::to_string(f.size()));
  }
  ResultRow row;
  row.scenario = f[0];
  row.algorithm = f[1];
  row.d = parse_number<Index>(f[2], "d");
  row.n = parse_number<Index>(f[3], "n");
  row.r = parse_number<Index>(f[4], "r");
  row.s = parse_number<Index>(f[5], "s");
  row.ell = parse_number<Index>(f[6], "ell");
  row.seed = parse_number<std::uint64_t>(f[7], "seed");
  if (!f[8].empty()) {
    row.rel_error = parse_number<double>(f[8], "rel_error");
    if (*row.rel_error < 0.0) throw UsageError("CSV: negative rel_error");
  }
  row.wall_time_s = parse_number<double>(f[9], "wall_time_s");
  if (row.wall_time_s < 0.0) throw UsageError("CSV: negative wall time");
  row.flops_measured = parse_number<std::int64_t>(f[10], "flops_measured");
  row.flops_predicted = parse_number<std::int64_t>(f[11], "flops_predicted");
  if (f[12].rfind("error:", 0) == 0) {
    row.error = f[12].substr(6);
  } else {
    for (const auto& part : split(f[12], ';')) {
      row.output_ranks.push_back(parse_number<Index>(part, "output_ranks"));
    }
  }
  return row;
}

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << csv_header() << '\n';
  for (const auto& row : rows) out << to_csv_line(row) << '\n';
}

std::vector<ResultRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != csv_header()) throw UsageError("CSV: unexpected header");
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (!line.empty()) rows.push_back(parse_csv_line(line));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Aggregation

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
  using Key = std::tuple<std::string, std::string, Index, Index, Index, Index, Index>;
  std::map<Key, std::size_t> index;
  std::vector<SummaryRow> out;
  std::vector<std::vector<const ResultRow*>> members;
  for (const auto& row : rows) {
    const Key key{row.scenario, row.algorithm, row.d, row.n, row.r, row.s, row.ell};
    auto [it, inserted] = index.emplace(key, out.size());
    if (inserted) {
      SummaryRow s;
      s.scenario = row.scenario;
      s.algorithm = row.algorithm;
      s.d = row.d;
      s.n = row.n;
      s.r = row.r;
      s.s = row.s;
      s.ell = row.ell;
      s.flops_predicted = row.flops_predicted;
      out.push_back(s);
      members.emplace_back();
    }
    members[it->second].push_back(&row);
  }

  auto mean_std = [](const std::vector<double>& v) {
    const double n = double(v.size());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::pair{mean, v.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0};
  };

  for (std::size_t g = 0; g < out.size(); ++g) {
    std::vector<double> errors, times, flops;
    for (const ResultRow* row : members[g]) {
      if (row->error) {
        ++out[g].failed;
        continue;
      }
      ++out[g].count;
      if (row->rel_error) errors.push_back(*row->rel_error);
      times.push_back(row->wall_time_s);
      flops.push_back(double(row->flops_measured));
    }
    if (!errors.empty()) {
      auto [m, s] = mean_std(errors);
      out[g].rel_error_mean = m;
      out[g].rel_error_std = s;
    }
    if (!times.empty()) {
      std::tie(out[g].wall_time_mean, out[g].wall_time_std) = mean_std(times);
      out[g].flops_measured_mean = mean_std(flops).first;
    }
  }

  for (auto& s : out) {
    const Key base{s.scenario, "tt-rounding", s.d, s.n, s.r, s.s, s.ell};
    const auto it = index.find(base);
    if (it == index.end()) continue;
    const SummaryRow& ref = out[it->second];
    if (ref.count > 0 && s.count > 0 && s.wall_time_mean > 0.0) {
      s.speedup_vs_tt_rounding = ref.wall_time_mean / s.wall_time_mean;
    }
  }
  return out;
}

void write_summary(std::ostream& out, const std::vector<SummaryRow>& rows) {
  auto opt = [](const std::optional<double>& v) {
    return v ? format_double(*v, 17) : std::string();
  };
  out << "scenario,algorithm,d,n,r,s,ell,count,failed,rel_error_mean,rel_error_std,"
         "wall_time_mean,wall_time_std,flops_measured_mean,flops_predicted,"
         "speedup_vs_tt_rounding\n";
  for (const auto& s : rows) {
    out << s.scenario << ',' << s.algorithm << ',' << s.d << ',' << s.n << ',' << s.r << ','
        << s.s << ',' << s.ell << ',' << s.count << ',' << s.failed << ',' << opt(s.rel_error_mean)
        << ',' << opt(s.rel_error_std) << ',' << format_double(s.wall_time_mean, 9) << ','
        << format_double(s.wall_time_std, 9) << ',' << format_double(s.flops_measured_mean, 17)
        << ',' << s.flops_predicted << ',' << opt(s.speedup_vs_tt_rounding) << '\n';
  }
}

void write_flop_report(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << "flop report: matmul + qr = measured; svd is the approximate bucket\n";
  char buf[512];
  std::snprintf(buf, sizeof buf, "%-18s %-11s %3s %3s %4s %4s %4s %6s %14s %14s %14s %14s %8s\n",
                "scenario", "algorithm", "d", "n", "r", "s", "ell", "seed", "matmul", "qr", "svd",
                "predicted", "ratio");
  out << buf;
  for (const auto& row : rows) {
    const double ratio = row.flops_predicted > 0
                             ? double(row.flops_measured) / double(row.flops_predicted)
                             : 0.0;
    std::snprintf(buf, sizeof buf,
                  "%-18s %-11s %3lld %3lld %4lld %4lld %4lld %6llu %14lld %14lld %14lld %14lld "
                  "%8.3f",
                  row.scenario.c_str(), row.algorithm.c_str(), (long long)row.d, (long long)row.n,
                  (long long)row.r, (long long)row.s, (long long)row.ell,
                  (unsigned long long)row.seed, (long long)row.ledger.matmul_flops,
                  (long long)row.ledger.qr_flops, (long long)row.ledger.svd_flops,
                  (long long)row.flops_predicted, ratio);
    out << buf;
    if (row.error) out << "  error:" << *row.error << " (" << row.note << ')';
    else if (!row.note.empty()) out << "  " << row.note;
    out << '\n';
  }
}

int exit_code(const std::vector<ResultRow>& rows, bool strict) {
  for (const auto& row : rows) {
    if (!row.error) continue;
    if (*row.error != "resource" || strict) return 1;
  }
  return 0;
}

}  // namespace hatt
