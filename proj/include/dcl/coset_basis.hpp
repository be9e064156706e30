#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "dcl/core_math.hpp"

namespace dcl {

/// k-register order-two coset state with shift d and representatives xs:
///   2^{-k/2} sum_b |b, x + b d>
struct CosetStateSpec {
  std::uint32_t d = 0;
  std::vector<std::uint32_t> xs;
};

/// Standard-frame amplitudes of a coset state.
DenseState build_coset_state(const CosetStateSpec& spec, const DihedralParams& params);

enum class BasisFamily { canonical, tilde, hat };
enum class BasisPart { b0, bperp, all };

std::string to_string(BasisFamily family);
std::string to_string(BasisPart part);

/// (l, p, m) with l packed as in pack_ints.
struct BasisLabel {
  std::uint64_t l = 0;
  std::uint32_t p = 0;
  std::uint32_t m = 0;

  friend bool operator==(const BasisLabel&, const BasisLabel&) = default;
};

struct SupportTerm {
  std::uint32_t bits = 0;
  Complex amp;
};

/// A subset-sum basis vector sum_j amp_j |b^(j)>|chi_l> in hybrid coordinates.
/// `support` is in canonical solution order: support[j].bits == b^(j).
struct BasisVector {
  BasisLabel label;
  std::vector<SupportTerm> support;
};

/// One (l, p) pair with |T_{l,p}| >= 1 and the basis entries that live in it.
struct SolutionBlock {
  std::uint64_t l = 0;
  std::uint32_t p = 0;
  std::vector<std::uint32_t> solutions;
  std::size_t first_entry = 0;
  std::size_t entry_count = 0;
};

class LabeledBasis {
 public:
  LabeledBasis(DihedralParams params, BasisFamily family, BasisPart part,
               std::vector<SolutionBlock> blocks, std::vector<BasisVector> entries);

  const DihedralParams& params() const noexcept { return params_; }
  BasisFamily family() const noexcept { return family_; }
  BasisPart part() const noexcept { return part_; }

  std::span<const BasisVector> entries() const noexcept { return entries_; }
  const BasisVector& entry(std::size_t i) const { return entries_.at(i); }
  std::size_t size() const noexcept { return entries_.size(); }

  std::span<const SolutionBlock> blocks() const noexcept { return blocks_; }
  const SolutionBlock* find_block(std::uint64_t l, std::uint32_t p) const;
  std::optional<std::size_t> find(const BasisLabel& label) const;

  std::size_t b0_size() const noexcept { return b0_size_; }
  std::size_t bperp_size() const noexcept { return entries_.size() - b0_size_; }
  bool complete() const noexcept { return entries_.size() == params_.full_dim(); }

 private:
  DihedralParams params_;
  BasisFamily family_;
  BasisPart part_;
  std::vector<SolutionBlock> blocks_;
  std::vector<BasisVector> entries_;
  std::vector<std::int64_t> block_lookup_;  // l * N + p -> block index or -1
  std::size_t b0_size_ = 0;
};

/// |S^m_{l,p}>|chi_l> with amplitudes omega_{|T|}^{m j} / sqrt(|T|).
/// Throws EmptySolutionSet when T_{l,p} is empty and InvalidArgument when
/// m >= |T_{l,p}|.
BasisVector build_basis_vector(std::span<const std::uint32_t> l, std::uint32_t p, std::uint32_t m,
                               const DihedralParams& params);

LabeledBasis enumerate_basis(const DihedralParams& params, BasisPart which = BasisPart::all);

/// Orthonormal change of basis inside span{S^m : m >= 1} of one block.
/// Returns a (|T|-1) x (|T|-1) unitary whose column c holds the coordinates
/// of the new vector c + 1 in terms of S^1 .. S^{|T|-1}. Only called for
/// blocks with |T| >= 2.
using BlockRotation = std::function<Eigen::MatrixXcd(const SolutionBlock&)>;

BlockRotation identity_rotation();

/// Haar-distributed rotation per block, seeded by (seed, l, p).
BlockRotation random_rotation(std::uint64_t seed);

/// First new vector is the uniform combination (1/sqrt(|T|-1)) sum_{m>=1} S^m,
/// the one that overlaps most with |b^(0)>. Remaining vectors are the
/// Gram-Schmidt completion against e_1, e_2, ... in order.
BlockRotation hat_rotation();

/// Rotated basis: B0 entries are copied from the canonical basis, B-perp
/// entries are replaced block by block. Throws InvalidArgument if a rotation
/// is not unitary to 1e-10.
LabeledBasis build_tilde_basis(const DihedralParams& params, const BlockRotation& rotation,
                               BasisFamily family = BasisFamily::tilde);
LabeledBasis build_hat_basis(const DihedralParams& params);

/// Standard-frame amplitudes of a basis vector, computed from the closed form
/// chi_l(x) = omega_N^{l.x} / sqrt(N^k).
DenseState to_dense(const BasisVector& v, const DihedralParams& params);

/// <v|psi> for psi given in hybrid coordinates.
Complex coefficient(const BasisVector& v, const DenseState& hybrid);

struct OrthogonalityReport {
  std::size_t coset_states = 0;
  std::size_t perp_vectors = 0;
  double max_abs_inner = 0.0;     // over B-perp x coset states
  double max_abs_inner_b0 = 0.0;  // informational; generally nonzero
};

OrthogonalityReport verify_coset_orthogonality(const LabeledBasis& basis);
OrthogonalityReport verify_coset_orthogonality(const DihedralParams& params);

struct SpanReport {
  std::size_t coset_states = 0;
  std::size_t rank = 0;
  std::size_t b0_size = 0;
  double rank_tolerance = 1e-8;
  double max_coset_residual = 0.0;  // coset state minus its projection onto span(B0)
  double max_b0_residual = 0.0;     // B0 vector minus its projection onto span(coset states)
  double max_perp_projection = 0.0; // norm of a B-perp vector's projection onto span(B0)
};

SpanReport coset_span_check(const DihedralParams& params, double rank_tolerance = 1e-8);

struct GramReport {
  std::size_t size = 0;
  double max_deviation = 0.0;  // max |G - I| entry
};

/// Gram matrix of the basis materialized in the standard frame.
GramReport gram_check_dense(const LabeledBasis& basis);

/// Gram matrix computed from the hybrid-frame support lists; entries from
/// different l are orthogonal through their chi_l factors.
GramReport gram_check_sparse(const LabeledBasis& basis);

/// Residual of each B-perp vector after projection onto canonical
/// span{S^m : m >= 1} of its own block; zero for any valid tilde basis.
double max_span_residual(const LabeledBasis& tilde, const LabeledBasis& canonical);

/// JSON document {schema, N, k, family, part, entries[{l, p, m, support[{bits, re, im}]}]}.
nlohmann::json basis_to_json(const LabeledBasis& basis);

}  // namespace dcl
