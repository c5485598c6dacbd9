#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "codedmr/ff_poly.hpp"
#include "codedmr/rational.hpp"

namespace codedmr {

/// Description of the concatenated Lagrange + repetition code.
///
/// Data nodes are beta_i = i (i = 0..m-1) and code nodes are
/// theta_j = m + j (j = 0..m'-1). For the uncoded case (r1 = 1) the code
/// nodes coincide with the data nodes and encoding is the identity.
struct CodeParams {
  std::size_t m = 0;
  Rational r1{1};
  unsigned r2 = 1;
  Rational b{0};
  unsigned d = 1;
  unsigned d_prime = 1;
  std::size_t m_star = 0;
  std::vector<FieldElement> data_nodes;
  std::vector<FieldElement> code_nodes;

  bool uncoded() const { return r1 == 1; }
  std::size_t coded_rows() const { return code_nodes.size(); }
};

/// Throws DegenerateNodes unless data and code nodes are pairwise distinct.
void check_nodes_disjoint(const CodeParams& params);

/// m* = (m - 1) d' + 1 with d' = 1 when r1 = 1 and d' = d otherwise.
std::size_t recovery_threshold(std::size_t m, unsigned d, const Rational& r1);

/// Lagrange code with m' coded rows (r2 = 1, b = m'). Throws DegenerateNodes
/// when the field is too small to host m + m' distinct nodes.
CodeParams lagrange_params(const PrimeField& field, std::size_t m, unsigned d, std::size_t m_prime);

/// Concatenated code over K devices: m' = C(K, r2) * b Lagrange rows, each
/// batch of b rows replicated at one r2-subset. Throws InfeasibleBatching if
/// m' < m or m' overflows.
CodeParams concatenated_params(const PrimeField& field, unsigned K, std::size_t m, unsigned d, unsigned r2,
                               std::size_t b);

struct CodedDataset {
  std::vector<DataPoint> rows;
  CodeParams params;
};

using Matrix = std::vector<std::vector<FieldElement>>;

/// G[j][i] = l_i(theta_j), the Lagrange basis of the data nodes evaluated at
/// the code nodes. Identity for the uncoded case.
Matrix generator_matrix(const PrimeField& field, const CodeParams& params);

/// C = G A, serial reference.
CodedDataset encode_serial(const PrimeField& field, std::span<const DataPoint> data, const CodeParams& params);
/// C = G A, rows computed in parallel. Identical output to encode_serial.
CodedDataset encode_parallel(const PrimeField& field, std::span<const DataPoint> data, const CodeParams& params);
inline CodedDataset encode(const PrimeField& field, std::span<const DataPoint> data, const CodeParams& params) {
  return encode_parallel(field, data, params);
}

struct IntermediateValue {
  unsigned function_id = 0;
  FieldElement code_node;
  FieldElement value;
};

/// Recovers (f(a_1), ..., f(a_m)) from IVs of a single function of degree
/// f_degree. Coded case: interpolates g = f(u(z)) through the first
/// recovery_threshold(m, f_degree, r1) IVs in ascending node order and
/// evaluates at the data nodes. Uncoded case: every data node must appear.
///
/// Throws InsufficientIVs, DegenerateNodes (repeated node or node outside
/// the code), ShapeError (mixed function ids).
std::vector<FieldElement> decode_outputs(const PrimeField& field, unsigned f_degree,
                                         std::span<const IntermediateValue> ivs, const CodeParams& params);

/// m x t matrix mapping values at `nodes` (t of them, all distinct) to the
/// interpolant's values at the data nodes.
Matrix decoding_matrix(const PrimeField& field, std::span<const FieldElement> nodes, const CodeParams& params);

/// Same result as decode_outputs, but caches the decoding matrix per node
/// set so repeated decodes over one set of IV positions cost O(m t) each.
class Decoder {
 public:
  Decoder(const PrimeField& field, const CodeParams& params) : field_(&field), params_(&params) {}
  std::vector<FieldElement> decode(unsigned f_degree, std::span<const IntermediateValue> ivs);

 private:
  const PrimeField* field_;
  const CodeParams* params_;
  std::map<std::vector<std::uint64_t>, Matrix> cache_;
};

}  // namespace codedmr
