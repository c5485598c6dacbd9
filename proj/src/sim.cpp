#include "codedmr/sim.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <utility>

#include "codedmr/errors.hpp"

namespace codedmr {

// ---------------------------------------------------------------------------
// Map phase
// ---------------------------------------------------------------------------

MapSample sample_map_times(const Rational& mu, unsigned q, std::span<const double> exponential_draws) {
  const auto K = static_cast<unsigned>(exponential_draws.size());
  if (q == 0 || q > K) throw InvalidConfig("q must lie in [1, K]");
  const double half_mu = mu.get_d() / 2;
  MapSample s;
  s.times.resize(K);
  for (unsigned k = 0; k < K; ++k) s.times[k] = half_mu * (1 + exponential_draws[k]);
  std::vector<unsigned> order(K);
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(), [&](unsigned a, unsigned b) { return s.times[a] < s.times[b]; });
  s.nonstragglers.assign(order.begin(), order.begin() + q);
  s.map_delay_sample = s.times[order[q - 1]];
  std::sort(s.nonstragglers.begin(), s.nonstragglers.end());
  return s;
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) {
  // splitmix64 finalizer over (seed, trial)
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (trial + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

MapSample sample_map_times(const SystemConfig& cfg, unsigned q, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> exp1(1.0);
  std::vector<double> draws(cfg.K);
  for (auto& x : draws) x = exp1(rng);
  return sample_map_times(cfg.mu, q, draws);
}

namespace {

MonteCarloResult summarize(const SystemConfig& cfg, unsigned q, const std::vector<double>& samples) {
  MonteCarloResult r;
  r.trials = samples.size();
  r.closed_form = map_delay(cfg.mu, q, cfg.K).get_d();
  if (samples.empty()) return r;
  double sum = 0;
  for (double v : samples) sum += v;
  r.mean = sum / static_cast<double>(samples.size());
  r.relative_error = std::abs(r.mean - r.closed_form) / r.closed_form;
  return r;
}

}  // namespace

MonteCarloResult map_delay_monte_carlo_serial(const SystemConfig& cfg, unsigned q, std::uint64_t trials,
                                              std::uint64_t seed) {
  std::vector<double> samples(trials);
  for (std::uint64_t t = 0; t < trials; ++t)
    samples[t] = sample_map_times(cfg, q, trial_seed(seed, t)).map_delay_sample;
  return summarize(cfg, q, samples);
}

MonteCarloResult map_delay_monte_carlo_parallel(const SystemConfig& cfg, unsigned q, std::uint64_t trials,
                                                std::uint64_t seed) {
  if (q == 0 || q > cfg.K) throw InvalidConfig("q must lie in [1, K]");
  std::vector<double> samples(trials);
  const auto n = static_cast<long long>(trials);
#pragma omp parallel for schedule(static)
  for (long long t = 0; t < n; ++t)
    samples[static_cast<std::size_t>(t)] =
        sample_map_times(cfg, q, trial_seed(seed, static_cast<std::uint64_t>(t))).map_delay_sample;
  return summarize(cfg, q, samples);
}

// ---------------------------------------------------------------------------
// Assignment
// ---------------------------------------------------------------------------

const std::vector<unsigned>& Assignment::functions_of(unsigned device) const {
  static const std::vector<unsigned> kNone;
  auto it = std::lower_bound(devices.begin(), devices.end(), device);
  if (it == devices.end() || *it != device) return kNone;
  return functions[static_cast<std::size_t>(it - devices.begin())];
}

Assignment make_assignment(const std::vector<unsigned>& nonstragglers, unsigned N) {
  const auto q = static_cast<unsigned>(nonstragglers.size());
  if (q == 0) throw InfeasibleConfig("no non-straggling devices");
  if (N % q != 0)
    throw InfeasibleConfig("q = " + std::to_string(q) + " does not divide N = " + std::to_string(N));
  Assignment a;
  a.devices = nonstragglers;
  std::sort(a.devices.begin(), a.devices.end());
  const unsigned per = N / q;
  a.functions.resize(q);
  for (unsigned i = 0; i < q; ++i)
    for (unsigned f = 0; f < per; ++f) a.functions[i].push_back(i * per + f);
  return a;
}

// ---------------------------------------------------------------------------
// Schedule construction
// ---------------------------------------------------------------------------

namespace {

// Pending deliveries of one multiplicity group, keyed by (receiver, holders),
// where holders are the non-stragglers storing the IV's row.
using PendingKey = std::pair<unsigned, DeviceSet>;
using Pending = std::map<PendingKey, std::deque<IvId>>;

std::size_t pending_count(const Pending& p, unsigned receiver, DeviceSet holders) {
  auto it = p.find({receiver, holders});
  return it == p.end() ? 0 : it->second.size();
}

bool pop_exact(Pending& p, unsigned receiver, DeviceSet holders, Layer layer, Transmission& tx) {
  auto it = p.find({receiver, holders});
  if (it == p.end()) return false;
  tx.payload.push_back({it->second.front(), receiver, layer});
  it->second.pop_front();
  if (it->second.empty()) p.erase(it);
  return true;
}

// First pending entry for `receiver` whose holder set contains `cluster`.
Pending::iterator find_covering(Pending& p, unsigned receiver, DeviceSet cluster) {
  for (auto it = p.lower_bound({receiver, 0}); it != p.end() && it->first.first == receiver; ++it)
    if ((it->first.second & cluster) == cluster) return it;
  return p.end();
}

bool pop_covering(Pending& p, unsigned receiver, DeviceSet cluster, Transmission& tx) {
  auto it = find_covering(p, receiver, cluster);
  if (it == p.end()) return false;
  tx.payload.push_back({it->second.front(), receiver, Layer::Precoded});
  it->second.pop_front();
  if (it->second.empty()) p.erase(it);
  return true;
}

DeviceSet lowest_members(DeviceSet s, unsigned count) {
  DeviceSet out = 0;
  for (unsigned k : members(s)) {
    if (set_size(out) == count) break;
    out |= DeviceSet{1} << k;
  }
  return out;
}

// Cluster sizes for precoded transmission of group j among q devices.
std::pair<unsigned, unsigned> cluster_sizes(int j, unsigned q) {
  const auto jj = static_cast<unsigned>(j);
  if (q >= 2 * jj) return {jj, jj};
  return {(q + 1) / 2, q / 2};
}

// One multicast: the IVs wanted inside T = holders + receiver, sent by the
// member of T that is itself owed the fewest IVs within T.
void add_multicast_layer(Pending& p, unsigned sender, DeviceSet group, Transmission& tx) {
  tx.multicast_sender = sender;
  tx.senders |= DeviceSet{1} << sender;
  for (unsigned t : members(group)) {
    if (t == sender) continue;
    pop_exact(p, t, group & ~(DeviceSet{1} << t), Layer::Multicast, tx);
  }
}

void build_multicast(Pending& p, Transmission& tx) {
  const auto [receiver, holders] = p.begin()->first;
  const DeviceSet group = holders | (DeviceSet{1} << receiver);
  unsigned sender = 0;
  std::size_t best = SIZE_MAX;
  for (unsigned s : members(holders)) {
    const std::size_t owed = pending_count(p, s, group & ~(DeviceSet{1} << s));
    if (owed < best) {
      best = owed;
      sender = s;
    }
  }
  add_multicast_layer(p, sender, group, tx);
}

void build_precoded(Pending& p, int j, DeviceSet alive, Transmission& tx) {
  const unsigned q = set_size(alive);
  const auto [size_a, size_b] = cluster_sizes(j, q);
  const auto [receiver, holders] = p.begin()->first;
  const DeviceSet a = lowest_members(holders, size_a);
  DeviceSet b = DeviceSet{1} << receiver;
  for (const auto& [key, queue] : p) {
    if (set_size(b) == size_b) break;
    const unsigned t = key.first;
    if (contains(a | b, t)) continue;
    if ((key.second & a) == a) b |= DeviceSet{1} << t;
  }
  b |= lowest_members(alive & ~a & ~b, size_b - set_size(b));
  for (unsigned t : members(b)) pop_covering(p, t, a, tx);
  for (unsigned t : members(a)) pop_covering(p, t, b, tx);
  tx.clusters = {a, b};
  tx.senders |= a | b;
}

// Multicast layer on top of a precoded transmission: the first active device
// that holds an IV still owed to someone in its multicast group.
void build_superposed_multicast(Pending& p, Transmission& tx) {
  for (unsigned s : members(tx.senders)) {
    for (const auto& [key, queue] : p) {
      if (contains(key.second, s)) {
        add_multicast_layer(p, s, key.second | (DeviceSet{1} << key.first), tx);
        return;
      }
    }
  }
}

ExtRational duration_of(std::size_t delivered, Scheme scheme, int j, unsigned q, const Rational& alpha) {
  if (delivered == 0) return ExtRational(0);
  const Rational g = gain(scheme, j, q, alpha);
  if (g == 0) return ExtRational::infinity();
  return ExtRational(Rational(Rational(static_cast<unsigned long>(delivered)) / g));
}

}  // namespace

ShuffleSchedule build_schedule(Scheme scheme, const PlacementMap& placement, const MultiplicityProfile& profile,
                               const std::vector<unsigned>& nonstragglers, const Assignment& assignment,
                               const Rational& alpha) {
  ShuffleSchedule sched;
  sched.scheme = scheme;
  sched.q = static_cast<unsigned>(nonstragglers.size());
  sched.alpha = alpha;
  if (profile.empty()) return sched;

  const DeviceSet alive = make_set(nonstragglers);
  const unsigned q = sched.q;
  const int lowest_group = profile.remainder > 0 ? profile.s_q - 1 : profile.s_q;
  if (lowest_group < 1) throw ScheduleError("profile requires IVs of multiplicity zero");
  if (!profile.remainder.get_den().fits_ulong_p() || profile.remainder.get_den() != 1)
    throw ScheduleError("remainder " + format_exact(profile.remainder) + " is not integral");
  const std::size_t remainder = profile.remainder.get_num().get_ui();

  // rows_by_group[k][j]: rows missing at k whose non-straggling holders number j.
  std::map<unsigned, std::map<int, std::vector<std::size_t>>> rows_by_group;
  for (unsigned k : nonstragglers) {
    auto& groups = rows_by_group[k];
    for (std::size_t row = 0; row < placement.rows(); ++row) {
      const DeviceSet holders = placement.row_holders[row];
      if (contains(holders, k)) continue;
      groups[static_cast<int>(set_size(holders & alive))].push_back(row);
    }
    for (int j = profile.s_q; j <= profile.s_max; ++j) {
      if (Rational(static_cast<unsigned long>(groups[j].size())) != profile.count(j))
        throw ScheduleError("device " + std::to_string(k) + " has " + std::to_string(groups[j].size()) +
                            " IVs of multiplicity " + std::to_string(j) + ", profile expects " +
                            format_exact(profile.count(j)));
    }
    if (groups[lowest_group].size() < remainder && lowest_group < profile.s_q)
      throw ScheduleError("not enough IVs of multiplicity " + std::to_string(lowest_group));
  }

  for (int j = profile.s_max; j >= lowest_group; --j) {
    Pending pending;
    for (unsigned k : nonstragglers) {
      const auto& rows = rows_by_group[k][j];
      const std::size_t take = (j >= profile.s_q) ? rows.size() : remainder;
      for (unsigned fn : assignment.functions_of(k)) {
        for (std::size_t t = 0; t < take; ++t) {
          const std::size_t row = rows[t];
          pending[{k, placement.row_holders[row] & alive}].push_back({fn, row});
        }
      }
    }
    while (!pending.empty()) {
      Transmission tx;
      tx.group_multiplicity = j;
      const bool precoded = scheme == Scheme::ZeroForcing || (scheme == Scheme::Superposition && alpha > 0);
      const bool multicast = scheme == Scheme::CodedMulticasting || (scheme == Scheme::Superposition && alpha < 1);
      if (precoded) {
        build_precoded(pending, j, alive, tx);
        if (multicast && !pending.empty()) build_superposed_multicast(pending, tx);
      } else {
        build_multicast(pending, tx);
      }
      if (tx.payload.empty()) throw ScheduleError("transmission construction made no progress");
      for (const auto& del : tx.payload) tx.receivers |= DeviceSet{1} << del.receiver;
      tx.duration = duration_of(tx.payload.size(), scheme, j, q, alpha);
      sched.transmissions.push_back(std::move(tx));
    }
  }
  return sched;
}

// ---------------------------------------------------------------------------
// Verification
// ---------------------------------------------------------------------------

VerifyResult verify_schedule(const ShuffleSchedule& schedule, const PlacementMap& placement,
                             const std::vector<unsigned>& nonstragglers, const Assignment& assignment,
                             std::size_t m_star) {
  VerifyResult result;
  auto fail = [&](std::string msg) {
    result.ok = false;
    if (result.diagnostics.size() < 32) result.diagnostics.push_back(std::move(msg));
  };
  const DeviceSet alive = make_set(nonstragglers);
  const unsigned q = set_size(alive);
  std::map<unsigned, std::set<IvId>> received;
  auto knows = [&](unsigned k, const IvId& iv) {
    if (iv.row >= placement.rows()) return false;
    if (contains(alive, k) && contains(placement.row_holders[iv.row], k)) return true;
    auto it = received.find(k);
    return it != received.end() && it->second.count(iv) > 0;
  };
  const bool allow_multicast = schedule.scheme != Scheme::ZeroForcing;
  const bool allow_precoded = schedule.scheme != Scheme::CodedMulticasting;

  int previous_group = INT32_MAX;
  for (std::size_t t = 0; t < schedule.transmissions.size(); ++t) {
    const Transmission& tx = schedule.transmissions[t];
    const std::string where = "transmission " + std::to_string(t) + ": ";
    const int j = tx.group_multiplicity;
    if (j > previous_group) fail(where + "multiplicity increases from " + std::to_string(previous_group));
    previous_group = j;
    if (j < 1) fail(where + "group multiplicity below 1");
    if ((tx.senders & ~alive) || (tx.receivers & ~alive)) fail(where + "straggler participates");

    std::vector<unsigned> multicast_receivers;
    std::vector<unsigned> precoded_receivers;
    for (const auto& del : tx.payload) {
      if (!contains(alive, del.receiver)) fail(where + "delivery to straggler " + std::to_string(del.receiver));
      (del.layer == Layer::Multicast ? multicast_receivers : precoded_receivers).push_back(del.receiver);
    }

    if (!multicast_receivers.empty()) {
      if (!allow_multicast) fail(where + "multicast layer not allowed for this scheme");
      if (!tx.multicast_sender) {
        fail(where + "multicast deliveries without a sender");
      } else {
        const unsigned s = *tx.multicast_sender;
        if (!contains(alive, s)) fail(where + "multicast sender is a straggler");
        std::set<unsigned> uniq(multicast_receivers.begin(), multicast_receivers.end());
        if (uniq.size() != multicast_receivers.size()) fail(where + "receiver served twice by one multicast");
        if (uniq.count(s)) fail(where + "multicast sender is also a receiver");
        if (static_cast<int>(uniq.size()) > j) fail(where + "multicast serves more than j receivers");
        for (const auto& del : tx.payload) {
          if (del.layer != Layer::Multicast) continue;
          if (!knows(s, del.iv)) fail(where + "sender lacks IV for device " + std::to_string(del.receiver));
          for (unsigned other : uniq) {
            if (other != del.receiver && !knows(other, del.iv))
              fail(where + "device " + std::to_string(other) + " cannot cancel the IV for device " +
                   std::to_string(del.receiver));
          }
        }
      }
    }

    if (!precoded_receivers.empty()) {
      if (!allow_precoded) fail(where + "precoded layer not allowed for this scheme");
      if (tx.clusters.size() != 2) {
        fail(where + "precoded deliveries need exactly two clusters");
      } else {
        const DeviceSet a = tx.clusters[0], b = tx.clusters[1];
        const auto [size_a, size_b] = cluster_sizes(j, q);
        if (a & b) fail(where + "clusters overlap");
        if ((a | b) & ~alive) fail(where + "cluster contains a straggler");
        if (set_size(a) != size_a || set_size(b) != size_b) fail(where + "cluster sizes do not match multiplicity");
        std::set<unsigned> uniq(precoded_receivers.begin(), precoded_receivers.end());
        if (uniq.size() != precoded_receivers.size()) fail(where + "receiver gets two precoded streams");
        for (const auto& del : tx.payload) {
          if (del.layer != Layer::Precoded) continue;
          DeviceSet source;
          if (contains(a, del.receiver))
            source = b;
          else if (contains(b, del.receiver))
            source = a;
          else {
            fail(where + "precoded receiver " + std::to_string(del.receiver) + " is in no cluster");
            continue;
          }
          for (unsigned s : members(source))
            if (!knows(s, del.iv))
              fail(where + "cluster member " + std::to_string(s) + " lacks the IV for device " +
                   std::to_string(del.receiver));
        }
      }
    }

    const ExtRational expected = duration_of(tx.payload.size(), schedule.scheme, j, q, schedule.alpha);
    if (tx.duration != expected) fail(where + "duration does not match payload / gain");

    for (const auto& del : tx.payload) received[del.receiver].insert(del.iv);
  }

  // Completeness: m_star distinct rows per assigned function.
  for (unsigned k : nonstragglers) {
    const std::size_t local = placement.per_device[k].size();
    std::map<unsigned, std::size_t> extra;
    for (const IvId& iv : received[k])
      if (iv.row < placement.rows() && !contains(placement.row_holders[iv.row], k)) ++extra[iv.function];
    for (unsigned fn : assignment.functions_of(k)) {
      const std::size_t have = local + extra[fn];
      if (have < m_star)
        fail("device " + std::to_string(k) + " ends with " + std::to_string(have) + " IVs of function " +
             std::to_string(fn) + ", needs " + std::to_string(m_star));
    }
  }
  return result;
}

ExtRational schedule_delay(const ShuffleSchedule& schedule, std::size_t m, unsigned N) {
  ExtRational total(0);
  for (const auto& tx : schedule.transmissions) total += tx.duration;
  if (total.is_infinite()) return total;
  return ExtRational(Rational(total.value() / (Rational(static_cast<unsigned long>(m)) * N)));
}

// ---------------------------------------------------------------------------
// End to end
// ---------------------------------------------------------------------------

Rational EndToEndReport::residual() const {
  if (schedule_delay.is_infinite() && closed_form_delay.is_infinite()) return Rational(0);
  if (schedule_delay.is_infinite() || closed_form_delay.is_infinite()) return Rational(-1);
  Rational r = schedule_delay.value() - closed_form_delay.value();
  return abs(r);
}

EndToEndReport run_end_to_end(const PrimeField& field, const SystemConfig& cfg, const CodeParams& code,
                              Scheme scheme, DeviceSet straggler_set,
                              std::span<const MultivariatePolynomial> functions, std::span<const DataPoint> data) {
  cfg.validate();
  const unsigned K = cfg.K;
  const DeviceSet all = (K == 64) ? ~DeviceSet{0} : ((DeviceSet{1} << K) - 1);
  if (straggler_set & ~all) throw InfeasibleConfig("straggler set names devices outside [K]");
  const DeviceSet alive = all & ~straggler_set;
  const std::vector<unsigned> nonstragglers = members(alive);
  const auto q = static_cast<unsigned>(nonstragglers.size());
  if (q == 0) throw InfeasibleConfig("every device straggles");
  if (cfg.N % q != 0)
    throw InfeasibleConfig("q = " + std::to_string(q) + " does not divide N = " + std::to_string(cfg.N));
  if (functions.size() != cfg.N) throw InfeasibleConfig("expected N functions");
  if (data.size() != cfg.m || code.m != cfg.m) throw InfeasibleConfig("dataset size does not match m");
  for (const auto& f : functions) {
    if (f.degree() > cfg.d) throw InfeasibleConfig("function degree exceeds d");
    for (const auto& row : data)
      if (row.size() != f.arity()) throw ShapeError("data dimension does not match function arity");
  }
  if (code.b.get_den() != 1) throw InfeasibleConfig("concrete mode needs an integral batch size");
  if (code.r1 * code.r2 > cfg.mu * K) throw InfeasibleConfig("r1 r2 exceeds the storage bound mu K");
  if (!feasibility(K, q, cfg.m, cfg.d, code.r1, code.r2))
    throw InfeasibleConfig("code (r1 = " + format_exact(code.r1) + ", r2 = " + std::to_string(code.r2) +
                           ") cannot tolerate " + std::to_string(K - q) + " stragglers");
  if (code.d != cfg.d) throw InfeasibleConfig("code degree does not match d");

  const std::size_t b = code.b.get_num().get_ui();
  const PlacementMap placement = assign_batches(K, code.r2, b, code.coded_rows());
  const CodedDataset coded = encode(field, data, code);

  // Map: each non-straggler evaluates every function on its stored rows.
  // map_values[i][n][t] = f_n(row per_device[k][t]) for k = nonstragglers[i].
  std::vector<std::vector<std::vector<FieldElement>>> map_values(q);
#pragma omp parallel for schedule(dynamic, 1)
  for (long long i = 0; i < static_cast<long long>(q); ++i) {
    const auto& rows = placement.per_device[nonstragglers[static_cast<std::size_t>(i)]];
    auto& out = map_values[static_cast<std::size_t>(i)];
    out.resize(functions.size());
    for (std::size_t n = 0; n < functions.size(); ++n) {
      out[n].resize(rows.size());
      for (std::size_t t = 0; t < rows.size(); ++t) out[n][t] = poly_eval(field, functions[n], coded.rows[rows[t]]);
    }
  }
  auto device_index = [&](unsigned k) {
    return static_cast<std::size_t>(std::lower_bound(nonstragglers.begin(), nonstragglers.end(), k) -
                                    nonstragglers.begin());
  };

  const Assignment assignment = make_assignment(nonstragglers, cfg.N);
  const Rational stored = stored_per_device(K, code.r2, code.b);
  const MultiplicityProfile profile =
      multiplicity_profile(K, q, code.r2, code.b, Rational(static_cast<unsigned long>(code.m_star)), stored);
  const ShuffleSchedule schedule = build_schedule(scheme, placement, profile, nonstragglers, assignment, cfg.alpha);
  const VerifyResult verdict = verify_schedule(schedule, placement, nonstragglers, assignment, code.m_star);

  EndToEndReport report;
  report.nonstragglers = nonstragglers;
  report.schedule_verified = verdict.ok;
  report.diagnostics = verdict.diagnostics;
  report.transmissions = schedule.transmissions.size();
  report.schedule_delay = schedule_delay(schedule, cfg.m, cfg.N);
  report.closed_form_delay = shuffle_delay_fixed(scheme, profile, cfg.m, q, cfg.alpha);

  // Shuffle: move IV values from a holder to each receiver.
  std::vector<std::map<IvId, FieldElement>> inbox(q);
  auto value_at = [&](unsigned k, const IvId& iv) -> std::optional<FieldElement> {
    const std::size_t i = device_index(k);
    const auto& rows = placement.per_device[k];
    auto it = std::lower_bound(rows.begin(), rows.end(), iv.row);
    if (it != rows.end() && *it == iv.row) return map_values[i][iv.function][static_cast<std::size_t>(it - rows.begin())];
    auto got = inbox[i].find(iv);
    if (got != inbox[i].end()) return got->second;
    return std::nullopt;
  };
  for (const auto& tx : schedule.transmissions) {
    std::vector<std::pair<unsigned, std::pair<IvId, FieldElement>>> arrivals;
    for (const auto& del : tx.payload) {
      std::optional<FieldElement> v;
      if (del.layer == Layer::Multicast && tx.multicast_sender) {
        v = value_at(*tx.multicast_sender, del.iv);
      } else if (tx.clusters.size() == 2) {
        const DeviceSet source = contains(tx.clusters[0], del.receiver) ? tx.clusters[1] : tx.clusters[0];
        if (source) v = value_at(members(source).front(), del.iv);
      }
      if (!v) {
        report.diagnostics.push_back("IV value unavailable at sender for device " + std::to_string(del.receiver));
        continue;
      }
      arrivals.push_back({del.receiver, {del.iv, *v}});
    }
    for (auto& [k, entry] : arrivals) inbox[device_index(k)].insert(entry);
  }

  // Reduce and compare against direct evaluation.
  report.outputs.assign(cfg.N, {});
  report.expected.assign(cfg.N, std::vector<FieldElement>(cfg.m));
  for (std::size_t n = 0; n < cfg.N; ++n)
    for (std::size_t i = 0; i < cfg.m; ++i) report.expected[n][i] = poly_eval(field, functions[n], data[i]);

  bool correct = true;
  for (std::size_t i = 0; i < q; ++i) {
    Decoder decoder(field, code);
    const unsigned k = nonstragglers[i];
    const auto& rows = placement.per_device[k];
    for (unsigned fn : assignment.functions_of(k)) {
      std::vector<IntermediateValue> ivs;
      for (std::size_t t = 0; t < rows.size(); ++t)
        ivs.push_back({fn, code.code_nodes[rows[t]], map_values[i][fn][t]});
      for (const auto& [iv, value] : inbox[i])
        if (iv.function == fn) ivs.push_back({fn, code.code_nodes[iv.row], value});
      try {
        report.outputs[fn] = decoder.decode(functions[fn].degree() == 0 ? 1 : functions[fn].degree(), ivs);
      } catch (const Error& e) {
        report.diagnostics.push_back("device " + std::to_string(k) + " function " + std::to_string(fn) + ": " +
                                     e.what());
        correct = false;
        continue;
      }
      if (report.outputs[fn] != report.expected[fn]) correct = false;
    }
  }
  report.all_correct = correct;
  return report;
}

EndToEndReport run_end_to_end_sampled(const PrimeField& field, const SystemConfig& cfg, const CodeParams& code,
                                      Scheme scheme, unsigned q, std::span<const MultivariatePolynomial> functions,
                                      std::span<const DataPoint> data, std::uint64_t seed) {
  const MapSample sample = sample_map_times(cfg, q, seed);
  const DeviceSet all = (cfg.K == 64) ? ~DeviceSet{0} : ((DeviceSet{1} << cfg.K) - 1);
  return run_end_to_end(field, cfg, code, scheme, all & ~make_set(sample.nonstragglers), functions, data);
}

}  // namespace codedmr
