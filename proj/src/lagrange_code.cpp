#include "codedmr/lagrange_code.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <string>
#include <unordered_map>

#include "codedmr/errors.hpp"

namespace codedmr {

std::size_t recovery_threshold(std::size_t m, unsigned d, const Rational& r1) {
  const std::size_t d_prime = (r1 == 1) ? 1 : d;
  return (m - 1) * d_prime + 1;
}

namespace {

std::vector<FieldElement> consecutive_nodes(const PrimeField& field, std::size_t first, std::size_t count) {
  std::vector<FieldElement> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = {static_cast<std::uint64_t>(first + i)};
  (void)field;
  return out;
}

void check_node_capacity(const PrimeField& field, std::size_t needed) {
  if (needed > field.modulus())
    throw DegenerateNodes("field of size " + std::to_string(field.modulus()) + " cannot host " +
                          std::to_string(needed) + " distinct evaluation nodes");
}

}  // namespace

void check_nodes_disjoint(const CodeParams& params) {
  std::vector<FieldElement> all(params.data_nodes);
  if (!params.uncoded()) all.insert(all.end(), params.code_nodes.begin(), params.code_nodes.end());
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end())
    throw DegenerateNodes("evaluation nodes are not pairwise distinct");
}

CodeParams lagrange_params(const PrimeField& field, std::size_t m, unsigned d, std::size_t m_prime) {
  if (m == 0) throw ShapeError("dataset must have at least one row");
  if (d == 0) throw ShapeError("polynomial degree must be positive");
  if (m_prime < m) throw InfeasibleBatching("Lagrange code needs m' >= m");
  CodeParams p;
  p.m = m;
  p.r1 = Rational(m_prime, m);
  p.r1.canonicalize();
  p.r2 = 1;
  p.b = m_prime;
  p.d = d;
  p.d_prime = p.uncoded() ? 1 : d;
  p.m_star = recovery_threshold(m, d, p.r1);
  p.data_nodes = consecutive_nodes(field, 0, m);
  if (p.uncoded()) {
    check_node_capacity(field, m);
    p.code_nodes = p.data_nodes;
  } else {
    check_node_capacity(field, m + m_prime);
    p.code_nodes = consecutive_nodes(field, m, m_prime);
  }
  return p;
}

CodeParams concatenated_params(const PrimeField& field, unsigned K, std::size_t m, unsigned d, unsigned r2,
                               std::size_t b) {
  if (r2 == 0 || r2 > K) throw InfeasibleBatching("repetition factor must lie in [1, K]");
  if (b == 0) throw InfeasibleBatching("batch size must be positive");
  BigInt batches = binom(K, r2);
  BigInt rows = batches * static_cast<unsigned long>(b);
  if (!rows.fits_ulong_p() || rows.get_ui() > std::numeric_limits<std::size_t>::max() / 2)
    throw InfeasibleBatching("C(K, r2) * b is too large for a concrete code");
  CodeParams p = lagrange_params(field, m, d, rows.get_ui());
  p.r2 = r2;
  p.b = static_cast<unsigned long>(b);
  return p;
}

Matrix generator_matrix(const PrimeField& field, const CodeParams& params) {
  const std::size_t m = params.m;
  const std::size_t rows = params.coded_rows();
  Matrix g(rows, std::vector<FieldElement>(m, field.zero()));
  if (params.uncoded()) {
    for (std::size_t j = 0; j < rows; ++j) g[j][j] = field.one();
    return g;
  }
  check_nodes_disjoint(params);
  const auto w = barycentric_weights(field, params.data_nodes);
  std::vector<FieldElement> prefix(m + 1);
#pragma omp parallel for schedule(static) firstprivate(prefix)
  for (std::size_t j = 0; j < rows; ++j) {
    const FieldElement z = params.code_nodes[j];
    // l_i(z) = w_i * prod_{k != i} (z - beta_k), via prefix/suffix products.
    prefix[0] = field.one();
    for (std::size_t i = 0; i < m; ++i) prefix[i + 1] = field.mul(prefix[i], field.sub(z, params.data_nodes[i]));
    FieldElement suffix = field.one();
    for (std::size_t i = m; i-- > 0;) {
      g[j][i] = field.mul(w[i], field.mul(prefix[i], suffix));
      suffix = field.mul(suffix, field.sub(z, params.data_nodes[i]));
    }
  }
  return g;
}

namespace {

void check_data_shape(std::span<const DataPoint> data, const CodeParams& params) {
  if (data.size() != params.m)
    throw ShapeError("expected " + std::to_string(params.m) + " data rows, got " + std::to_string(data.size()));
  for (const auto& row : data)
    if (row.size() != data.front().size()) throw ShapeError("data rows differ in dimension");
}

DataPoint combine_row(const PrimeField& field, const std::vector<FieldElement>& coeffs,
                      std::span<const DataPoint> data) {
  const std::size_t v = data.front().size();
  DataPoint out(v, field.zero());
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (coeffs[i].value == 0) continue;
    for (std::size_t c = 0; c < v; ++c) out[c] = field.add(out[c], field.mul(coeffs[i], data[i][c]));
  }
  return out;
}

}  // namespace

CodedDataset encode_serial(const PrimeField& field, std::span<const DataPoint> data, const CodeParams& params) {
  check_data_shape(data, params);
  check_nodes_disjoint(params);
  CodedDataset out{{}, params};
  if (params.uncoded()) {
    out.rows.assign(data.begin(), data.end());
    return out;
  }
  // Coordinate-wise interpolation: u(z) through (beta_i, a_i), evaluated at theta_j.
  const std::size_t v = data.front().size();
  out.rows.assign(params.coded_rows(), DataPoint(v, field.zero()));
  std::vector<InterpolationPoint> pts(params.m);
  for (std::size_t c = 0; c < v; ++c) {
    for (std::size_t i = 0; i < params.m; ++i) pts[i] = {params.data_nodes[i], data[i][c]};
    const UnivariatePolynomial u = interpolate(field, pts);
    for (std::size_t j = 0; j < params.coded_rows(); ++j)
      out.rows[j][c] = eval_univariate(field, u, params.code_nodes[j]);
  }
  return out;
}

CodedDataset encode_parallel(const PrimeField& field, std::span<const DataPoint> data, const CodeParams& params) {
  check_data_shape(data, params);
  check_nodes_disjoint(params);
  CodedDataset out{{}, params};
  if (params.uncoded()) {
    out.rows.assign(data.begin(), data.end());
    return out;
  }
  const Matrix g = generator_matrix(field, params);
  out.rows.resize(params.coded_rows());
#pragma omp parallel for schedule(static)
  for (std::size_t j = 0; j < g.size(); ++j) out.rows[j] = combine_row(field, g[j], data);
  return out;
}

namespace {

// Validates the IV set and returns either the data-node values (uncoded) or
// the first `threshold` coded points in ascending node order.
struct DecodeInput {
  bool uncoded = false;
  std::vector<FieldElement> direct;
  std::vector<InterpolationPoint> points;
};

DecodeInput select_points(unsigned f_degree, std::span<const IntermediateValue> ivs, const CodeParams& params) {
  if (!ivs.empty()) {
    for (const auto& iv : ivs)
      if (iv.function_id != ivs.front().function_id) throw ShapeError("IVs belong to different functions");
  }
  std::vector<IntermediateValue> sorted(ivs.begin(), ivs.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const IntermediateValue& a, const IntermediateValue& b) { return a.code_node < b.code_node; });
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i].code_node == sorted[i - 1].code_node)
      throw DegenerateNodes("duplicate IV at node " + std::to_string(sorted[i].code_node.value));

  DecodeInput in;
  if (params.uncoded()) {
    in.uncoded = true;
    std::unordered_map<std::uint64_t, FieldElement> by_node;
    for (const auto& iv : sorted) by_node.emplace(iv.code_node.value, iv.value);
    in.direct.resize(params.m);
    for (std::size_t i = 0; i < params.m; ++i) {
      auto it = by_node.find(params.data_nodes[i].value);
      if (it == by_node.end())
        throw InsufficientIVs("uncoded decode is missing data node " + std::to_string(params.data_nodes[i].value));
      in.direct[i] = it->second;
    }
    return in;
  }

  const std::size_t threshold = recovery_threshold(params.m, f_degree, params.r1);
  if (sorted.size() < threshold)
    throw InsufficientIVs("have " + std::to_string(sorted.size()) + " IVs, need " + std::to_string(threshold));
  const std::uint64_t lo = params.code_nodes.front().value;
  const std::uint64_t hi = params.code_nodes.back().value;
  in.points.reserve(threshold);
  for (std::size_t i = 0; i < threshold; ++i) {
    if (sorted[i].code_node.value < lo || sorted[i].code_node.value > hi)
      throw DegenerateNodes("IV node " + std::to_string(sorted[i].code_node.value) + " is not a code node");
    in.points.push_back({sorted[i].code_node, sorted[i].value});
  }
  return in;
}

}  // namespace

std::vector<FieldElement> decode_outputs(const PrimeField& field, unsigned f_degree,
                                         std::span<const IntermediateValue> ivs, const CodeParams& params) {
  DecodeInput in = select_points(f_degree, ivs, params);
  if (in.uncoded) return std::move(in.direct);
  const UnivariatePolynomial g = interpolate(field, in.points);
  std::vector<FieldElement> out(params.m);
  for (std::size_t i = 0; i < params.m; ++i) out[i] = eval_univariate(field, g, params.data_nodes[i]);
  return out;
}

Matrix decoding_matrix(const PrimeField& field, std::span<const FieldElement> nodes, const CodeParams& params) {
  const std::size_t t = nodes.size();
  const auto w = barycentric_weights(field, nodes);
  Matrix out(params.m, std::vector<FieldElement>(t));
  std::vector<FieldElement> prefix(t + 1);
  for (std::size_t i = 0; i < params.m; ++i) {
    const FieldElement z = params.data_nodes[i];
    prefix[0] = field.one();
    for (std::size_t k = 0; k < t; ++k) prefix[k + 1] = field.mul(prefix[k], field.sub(z, nodes[k]));
    FieldElement suffix = field.one();
    for (std::size_t k = t; k-- > 0;) {
      out[i][k] = field.mul(w[k], field.mul(prefix[k], suffix));
      suffix = field.mul(suffix, field.sub(z, nodes[k]));
    }
  }
  return out;
}

std::vector<FieldElement> Decoder::decode(unsigned f_degree, std::span<const IntermediateValue> ivs) {
  DecodeInput in = select_points(f_degree, ivs, *params_);
  if (in.uncoded) return std::move(in.direct);
  std::vector<std::uint64_t> key(in.points.size());
  for (std::size_t k = 0; k < key.size(); ++k) key[k] = in.points[k].x.value;
  auto it = cache_.find(key);
  if (it == cache_.end()) {
    std::vector<FieldElement> nodes(in.points.size());
    for (std::size_t k = 0; k < nodes.size(); ++k) nodes[k] = in.points[k].x;
    it = cache_.emplace(std::move(key), decoding_matrix(*field_, nodes, *params_)).first;
  }
  const Matrix& mat = it->second;
  std::vector<FieldElement> out(params_->m, field_->zero());
  for (std::size_t i = 0; i < out.size(); ++i) {
    FieldElement acc = field_->zero();
    for (std::size_t k = 0; k < in.points.size(); ++k) acc = field_->add(acc, field_->mul(mat[i][k], in.points[k].y));
    out[i] = acc;
  }
  return out;
}

}  // namespace codedmr
