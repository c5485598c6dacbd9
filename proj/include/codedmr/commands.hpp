#pragma once

#include <array>
#include <ostream>
#include <string>
#include <vector>

#include "codedmr/config.hpp"
#include "codedmr/delay_model.hpp"
#include "codedmr/sim.hpp"

namespace codedmr {

enum class OutputFormat { Csv, Json };
OutputFormat parse_format(const std::string& s);

/// One table row: the sweep value and one breakdown per scheme (CM, ZF, SC).
struct ResultRow {
  Rational value{0};
  std::array<DelayBreakdown, 3> schemes;

  const DelayBreakdown& at(Scheme s) const { return schemes[static_cast<std::size_t>(s)]; }
};

/// Rows for q in [q_min, K], all three schemes.
std::vector<ResultRow> analyze_rows(const RunConfig& cfg);
/// Rows per sweep value; fixed q if cfg.q is set, otherwise per-scheme optimal q.
std::vector<ResultRow> sweep_rows(const RunConfig& cfg);
/// One optimum per selected scheme. Throws InfeasibleConfig when no
/// (q, r1, r2) is feasible at all.
std::vector<DelayBreakdown> optimize_rows(const RunConfig& cfg);

struct SchemeSimulation {
  Scheme scheme = Scheme::CodedMulticasting;
  Rational r1{1};
  unsigned r2 = 0;
  std::size_t b = 0;
  std::uint64_t runs = 0;
  bool all_correct = true;
  bool schedule_verified = true;
  Rational max_residual{0};
  ExtRational closed_form_delay;
  std::vector<std::string> diagnostics;
};

struct SimulationReport {
  std::uint64_t trials = 0;
  unsigned q = 0;
  MonteCarloResult map;
  std::vector<SchemeSimulation> schemes;
};

/// Monte Carlo map delay over `trials` realizations plus end-to-end runs on
/// the first min(trials, e2e_trials) of them. Throws InfeasibleConfig on
/// divisibility or feasibility violations.
SimulationReport simulate(const RunConfig& cfg);

void cmd_analyze(const RunConfig& cfg, OutputFormat fmt, std::ostream& out);
void cmd_sweep(const RunConfig& cfg, OutputFormat fmt, std::ostream& out);
void cmd_optimize(const RunConfig& cfg, OutputFormat fmt, std::ostream& out);
void cmd_simulate(const RunConfig& cfg, OutputFormat fmt, std::ostream& out);

/// Header of the analyze CSV.
extern const char* const kAnalyzeHeader;

}  // namespace codedmr
