#include "codedmr/commands.hpp"

#include <algorithm>
#include <random>

#include <json.hpp>

#include "codedmr/errors.hpp"

namespace codedmr {

const char* const kAnalyzeHeader =
    "q,delta_map,delta_shuffle_cm,delta_shuffle_zf,delta_shuffle_sc,delta_total_cm,delta_total_zf,delta_total_sc,"
    "r1_cm,r2_cm,r1_zf,r2_zf,r1_sc,r2_sc";

OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  throw InvalidConfig("unknown format '" + s + "'");
}

namespace {

std::string r1_text(const DelayBreakdown& d) { return d.feasible ? format_sig(d.r1) : std::string(); }
std::string r2_text(const DelayBreakdown& d) { return d.feasible ? std::to_string(d.r2) : std::string(); }

nlohmann::json breakdown_json(const DelayBreakdown& d) {
  nlohmann::json j;
  j["scheme"] = std::string(scheme_name(d.scheme));
  j["q"] = d.q;
  j["feasible"] = d.feasible;
  j["delta_map"] = format_sig(d.map_delay);
  j["delta_shuffle"] = format_sig(d.shuffle_delay);
  j["delta_total"] = format_sig(d.total_delay);
  j["delta_map_exact"] = format_exact(d.map_delay);
  j["delta_shuffle_exact"] = format_exact(d.shuffle_delay);
  j["delta_total_exact"] = format_exact(d.total_delay);
  if (d.feasible) {
    j["r1"] = format_exact(d.r1);
    j["r2"] = d.r2;
    j["b"] = format_exact(d.b);
  } else {
    j["r1"] = nullptr;
    j["r2"] = nullptr;
    j["b"] = nullptr;
  }
  return j;
}

SystemConfig with_sweep_value(const RunConfig& cfg, const Rational& v) {
  SystemConfig s = cfg.system;
  if (cfg.sweep.var == "d") s.d = static_cast<unsigned>(v.get_num().get_ui());
  if (cfg.sweep.var == "alpha") s.alpha = v;
  s.validate();
  return s;
}

}  // namespace

std::vector<ResultRow> analyze_rows(const RunConfig& cfg) {
  cfg.validate();
  const SystemConfig& s = cfg.system;
  std::vector<ResultRow> rows;
  for (unsigned q = q_min(s.K, s.mu, s.m, s.d); q <= s.K; ++q) rows.push_back(ResultRow{Rational(q), {}});
  const long n = static_cast<long>(rows.size());
#pragma omp parallel for collapse(2) schedule(dynamic, 1)
  for (long i = 0; i < n; ++i)
    for (int k = 0; k < 3; ++k)
      rows[static_cast<std::size_t>(i)].schemes[static_cast<std::size_t>(k)] =
          total_delay(kAllSchemes[k], s, static_cast<unsigned>(rows[static_cast<std::size_t>(i)].value.get_num().get_ui()),
                      cfg.mode);
  return rows;
}

std::vector<ResultRow> sweep_rows(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.sweep.var == "none") throw InvalidConfig("sweep needs a sweep variable");
  if (cfg.sweep.var == "q") {
    auto rows = analyze_rows(cfg);
    std::erase_if(rows, [&](const ResultRow& r) { return r.value < cfg.sweep.from || r.value > cfg.sweep.to; });
    return rows;
  }
  const auto values = cfg.sweep.values();
  std::vector<SystemConfig> systems;
  for (const auto& v : values) systems.push_back(with_sweep_value(cfg, v));
  std::vector<ResultRow> rows(values.size());
  const long n = static_cast<long>(values.size());
#pragma omp parallel for collapse(2) schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) {
    for (int k = 0; k < 3; ++k) {
      const auto idx = static_cast<std::size_t>(i);
      rows[idx].value = values[idx];
      rows[idx].schemes[static_cast<std::size_t>(k)] =
          cfg.q ? total_delay(kAllSchemes[k], systems[idx], *cfg.q, cfg.mode)
                : optimize_q(kAllSchemes[k], systems[idx], cfg.mode);
    }
  }
  return rows;
}

std::vector<DelayBreakdown> optimize_rows(const RunConfig& cfg) {
  cfg.validate();
  std::vector<DelayBreakdown> out;
  bool any_feasible = false;
  for (Scheme s : cfg.schemes) {
    out.push_back(optimize_q(s, cfg.system, cfg.mode));
    any_feasible = any_feasible || out.back().feasible;
  }
  if (!any_feasible) throw InfeasibleConfig("no (q, r1, r2) satisfies the feasibility conditions");
  return out;
}

void cmd_analyze(const RunConfig& cfg, OutputFormat fmt, std::ostream& out) {
  const auto rows = analyze_rows(cfg);
  if (fmt == OutputFormat::Json) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : rows) {
      nlohmann::json row;
      row["q"] = r.value.get_num().get_ui();
      row["delta_map"] = format_sig(r.schemes[0].map_delay);
      for (const auto& d : r.schemes) row[std::string(scheme_name(d.scheme))] = breakdown_json(d);
      j.push_back(row);
    }
    out << j.dump(2) << '\n';
    return;
  }
  out << kAnalyzeHeader << '\n';
  for (const auto& r : rows) {
    const auto& cm = r.at(Scheme::CodedMulticasting);
    const auto& zf = r.at(Scheme::ZeroForcing);
    const auto& sc = r.at(Scheme::Superposition);
    out << cm.q << ',' << format_sig(cm.map_delay) << ',' << format_sig(cm.shuffle_delay) << ','
        << format_sig(zf.shuffle_delay) << ',' << format_sig(sc.shuffle_delay) << ',' << format_sig(cm.total_delay)
        << ',' << format_sig(zf.total_delay) << ',' << format_sig(sc.total_delay) << ',' << r1_text(cm) << ','
        << r2_text(cm) << ',' << r1_text(zf) << ',' << r2_text(zf) << ',' << r1_text(sc) << ',' << r2_text(sc)
        << '\n';
  }
}

void cmd_sweep(const RunConfig& cfg, OutputFormat fmt, std::ostream& out) {
  if (cfg.sweep.var == "q") {
    RunConfig c = cfg;
    const auto rows = sweep_rows(c);
    // Same layout as analyze, restricted to the sweep range.
    if (fmt == OutputFormat::Json) {
      nlohmann::json j = nlohmann::json::array();
      for (const auto& r : rows) {
        nlohmann::json row;
        row["q"] = r.value.get_num().get_ui();
        for (const auto& d : r.schemes) row[std::string(scheme_name(d.scheme))] = breakdown_json(d);
        j.push_back(row);
      }
      out << j.dump(2) << '\n';
      return;
    }
    out << kAnalyzeHeader << '\n';
    for (const auto& r : rows) {
      const auto& cm = r.at(Scheme::CodedMulticasting);
      const auto& zf = r.at(Scheme::ZeroForcing);
      const auto& sc = r.at(Scheme::Superposition);
      out << cm.q << ',' << format_sig(cm.map_delay) << ',' << format_sig(cm.shuffle_delay) << ','
          << format_sig(zf.shuffle_delay) << ',' << format_sig(sc.shuffle_delay) << ','
          << format_sig(cm.total_delay) << ',' << format_sig(zf.total_delay) << ',' << format_sig(sc.total_delay)
          << ',' << r1_text(cm) << ',' << r2_text(cm) << ',' << r1_text(zf) << ',' << r2_text(zf) << ','
          << r1_text(sc) << ',' << r2_text(sc) << '\n';
    }
    return;
  }
  const auto rows = sweep_rows(cfg);
  const std::string& var = cfg.sweep.var;
  if (fmt == OutputFormat::Json) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : rows) {
      nlohmann::json row;
      row[var] = format_sig(r.value);
      for (const auto& d : r.schemes) row[std::string(scheme_name(d.scheme))] = breakdown_json(d);
      j.push_back(row);
    }
    out << j.dump(2) << '\n';
    return;
  }
  out << var
      << ",q_cm,q_zf,q_sc,delta_map_cm,delta_map_zf,delta_map_sc,delta_shuffle_cm,delta_shuffle_zf,"
         "delta_shuffle_sc,delta_total_cm,delta_total_zf,delta_total_sc,r1_cm,r2_cm,r1_zf,r2_zf,r1_sc,r2_sc\n";
  for (const auto& r : rows) {
    out << format_sig(r.value);
    for (const auto& d : r.schemes) out << ',' << d.q;
    for (const auto& d : r.schemes) out << ',' << format_sig(d.map_delay);
    for (const auto& d : r.schemes) out << ',' << format_sig(d.shuffle_delay);
    for (const auto& d : r.schemes) out << ',' << format_sig(d.total_delay);
    for (const auto& d : r.schemes) out << ',' << r1_text(d) << ',' << r2_text(d);
    out << '\n';
  }
}

void cmd_optimize(const RunConfig& cfg, OutputFormat fmt, std::ostream& out) {
  const auto rows = optimize_rows(cfg);
  if (fmt == OutputFormat::Json) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& d : rows) j.push_back(breakdown_json(d));
    out << j.dump(2) << '\n';
    return;
  }
  out << "scheme,q,delta_map,delta_shuffle,delta_total,r1,r2\n";
  for (const auto& d : rows) {
    out << scheme_name(d.scheme) << ',' << d.q << ',' << format_sig(d.map_delay) << ','
        << format_sig(d.shuffle_delay) << ',' << format_sig(d.total_delay) << ',' << r1_text(d) << ','
        << r2_text(d) << '\n';
  }
}

SimulationReport simulate(const RunConfig& cfg) {
  cfg.validate();
  SimulationReport report;
  report.trials = cfg.trials;
  if (cfg.trials == 0) return report;

  const SystemConfig& sys = cfg.system;
  unsigned q;
  if (cfg.q) {
    q = *cfg.q;
  } else {
    const Scheme lead = cfg.schemes.back();
    const DelayBreakdown best = optimize_q(lead, sys, Mode::Concrete);
    if (!best.feasible) throw InfeasibleConfig("no concrete-mode code is feasible for any q");
    q = best.q;
  }
  report.q = q;
  if (sys.N % q != 0)
    throw InfeasibleConfig("concrete mode: q = " + std::to_string(q) + " does not divide N = " +
                           std::to_string(sys.N));

  // Resolve the code per scheme before running anything.
  std::vector<SchemeSimulation> plans;
  for (Scheme s : cfg.schemes) {
    SchemeSimulation plan;
    plan.scheme = s;
    if (cfg.r2 || cfg.b) {
      if (!cfg.r2 || !cfg.b) throw InvalidConfig("r2 and b must be given together");
      plan.r2 = *cfg.r2;
      plan.b = *cfg.b;
      plan.r1 = Rational(binom(sys.K, plan.r2) * static_cast<unsigned long>(plan.b),
                         BigInt(static_cast<unsigned long>(sys.m)));
      plan.r1.canonicalize();
      if (plan.r1 < 1) throw InfeasibleConfig("concrete mode: b C(K, r2) < m");
      if (plan.r1 * plan.r2 > sys.mu * sys.K) throw InfeasibleConfig("concrete mode: r1 r2 exceeds mu K");
      if (!feasibility(sys.K, q, sys.m, sys.d, plan.r1, plan.r2))
        throw InfeasibleConfig("concrete mode: (r2 = " + std::to_string(plan.r2) + ", b = " +
                               std::to_string(plan.b) + ") violates the straggler condition at q = " +
                               std::to_string(q));
    } else {
      const ShuffleOptimum opt = min_shuffle_delay(s, sys, q, Mode::Concrete);
      if (!opt.feasible)
        throw InfeasibleConfig("concrete mode: no integral batch size b gives a feasible code at q = " +
                               std::to_string(q));
      plan.r1 = opt.r1;
      plan.r2 = opt.r2;
      plan.b = opt.b.get_num().get_ui();
    }
    plans.push_back(std::move(plan));
  }

  report.map = map_delay_monte_carlo_parallel(sys, q, cfg.trials, cfg.seed);

  const PrimeField field(cfg.prime);
  const std::uint64_t e2e = std::min(cfg.trials, cfg.e2e_trials);
  for (auto& plan : plans) {
    const CodeParams code = concatenated_params(field, sys.K, sys.m, sys.d, plan.r2, plan.b);
    for (std::uint64_t t = 0; t < e2e; ++t) {
      const std::uint64_t seed = trial_seed(cfg.seed, t);
      std::mt19937_64 rng(seed ^ 0xD1B54A32D192ED03ULL);
      std::vector<DataPoint> data(sys.m, DataPoint(cfg.dim));
      for (auto& row : data)
        for (auto& x : row) x = field.random(rng);
      std::vector<MultivariatePolynomial> functions;
      functions.reserve(sys.N);
      for (unsigned n = 0; n < sys.N; ++n) functions.push_back(MultivariatePolynomial::random(field, cfg.dim, sys.d, rng));
      const EndToEndReport r = run_end_to_end_sampled(field, sys, code, plan.scheme, q, functions, data, seed);
      ++plan.runs;
      plan.all_correct = plan.all_correct && r.all_correct;
      plan.schedule_verified = plan.schedule_verified && r.schedule_verified;
      const Rational res = r.residual();
      if (res < 0 || res > plan.max_residual) plan.max_residual = res < 0 ? Rational(-1) : res;
      plan.closed_form_delay = r.closed_form_delay;
      for (const auto& msg : r.diagnostics)
        if (plan.diagnostics.size() < 16) plan.diagnostics.push_back(msg);
    }
  }
  report.schemes = std::move(plans);
  return report;
}

void cmd_simulate(const RunConfig& cfg, OutputFormat fmt, std::ostream& out) {
  const SimulationReport rep = simulate(cfg);
  nlohmann::json j;
  j["trials"] = rep.trials;
  if (rep.trials > 0) {
    j["q"] = rep.q;
    j["seed"] = cfg.seed;
    j["map_delay"] = {{"empirical_mean", rep.map.mean},
                      {"closed_form", rep.map.closed_form},
                      {"relative_error", rep.map.relative_error}};
    bool all_correct = true;
    nlohmann::json schemes = nlohmann::json::object();
    for (const auto& s : rep.schemes) {
      all_correct = all_correct && s.all_correct && s.schedule_verified;
      schemes[std::string(scheme_name(s.scheme))] = {
          {"r1", format_exact(s.r1)},
          {"r2", s.r2},
          {"b", s.b},
          {"runs", s.runs},
          {"all_correct", s.all_correct},
          {"schedule_verified", s.schedule_verified},
          {"residual", s.max_residual < 0 ? std::string("mismatch") : format_exact(s.max_residual)},
          {"closed_form_shuffle_delay", format_exact(s.closed_form_delay)},
          {"diagnostics", s.diagnostics}};
    }
    j["all_correct"] = all_correct;
    j["end_to_end"] = schemes;
  }
  if (fmt == OutputFormat::Json) {
    out << j.dump(2) << '\n';
    return;
  }
  out << "key,value\n";
  const nlohmann::json flat = j.flatten();
  for (const auto& item : flat.items()) out << item.key() << ',' << item.value().dump() << '\n';
}

}  // namespace codedmr
