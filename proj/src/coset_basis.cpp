#include "dcl/coset_basis.hpp"

#include <algorithm>
#include <cmath>

#include "dcl/rng.hpp"
#include "dcl/subset_sum.hpp"

namespace dcl {
namespace {

constexpr std::size_t kDenseGramLimit = 4096;

std::string bits_string(std::uint32_t mask, std::uint32_t k) {
  return BitVector{mask, k}.to_string();
}

BasisVector make_vector(std::uint64_t l, std::uint32_t p, std::uint32_t m,
                        const std::vector<std::uint32_t>& solutions) {
  const auto t = static_cast<std::int64_t>(solutions.size());
  const double scale = 1.0 / std::sqrt(static_cast<double>(t));
  BasisVector v{{l, p, m}, {}};
  v.support.reserve(solutions.size());
  for (std::int64_t j = 0; j < t; ++j) {
    v.support.push_back({solutions[j], omega(t, static_cast<std::int64_t>(m) * j) * scale});
  }
  return v;
}

// Visits every coset state of the parameters, d outermost then xs in packed order.
template <typename Fn>
void for_each_coset_state(const DihedralParams& params, Fn&& fn) {
  for (std::uint32_t d = 0; d < params.N(); ++d) {
    for (std::uint64_t x = 0; x < params.int_dim(); ++x) {
      CosetStateSpec spec{d, unpack_ints(x, params.N(), params.k())};
      fn(build_coset_state(spec, params));
    }
  }
}

double standard_normal(Rng& rng) {
  const double u1 = 1.0 - rng.uniform01();
  const double u2 = rng.uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

// Modified Gram-Schmidt (two passes) of `candidate` against `basis` columns.
Eigen::VectorXcd orthogonalize(const Eigen::MatrixXcd& basis, Eigen::Index columns,
                               Eigen::VectorXcd candidate) {
  for (int pass = 0; pass < 2; ++pass) {
    for (Eigen::Index c = 0; c < columns; ++c) {
      candidate -= basis.col(c) * basis.col(c).dot(candidate);
    }
  }
  return candidate;
}

void check_unitary(const Eigen::MatrixXcd& r, Eigen::Index dim) {
  if (r.rows() != dim || r.cols() != dim) {
    throw InvalidArgument("build_tilde_basis: rotation has wrong shape");
  }
  const Eigen::MatrixXcd gram = r.adjoint() * r;
  const double dev = (gram - Eigen::MatrixXcd::Identity(dim, dim)).cwiseAbs().maxCoeff();
  if (!(dev <= 1e-10)) throw InvalidArgument("build_tilde_basis: rotation is not unitary");
}

}  // namespace

std::string to_string(BasisFamily family) {
  switch (family) {
    case BasisFamily::canonical: return "canonical";
    case BasisFamily::tilde: return "tilde";
    case BasisFamily::hat: return "hat";
  }
  return "unknown";
}

std::string to_string(BasisPart part) {
  switch (part) {
    case BasisPart::b0: return "b0";
    case BasisPart::bperp: return "bperp";
    case BasisPart::all: return "all";
  }
  return "unknown";
}

DenseState build_coset_state(const CosetStateSpec& spec, const DihedralParams& params) {
  if (spec.d >= params.N()) throw InvalidArgument("build_coset_state: d out of range");
  if (spec.xs.size() != params.k()) throw InvalidArgument("build_coset_state: need k representatives");
  for (std::uint32_t x : spec.xs) {
    if (x >= params.N()) throw InvalidArgument("build_coset_state: representative out of range");
  }
  DenseState state = DenseState::zero(params);
  const double amp = std::pow(2.0, -0.5 * params.k());
  std::vector<std::uint32_t> shifted(params.k());
  for (std::uint32_t mask = 0; mask < params.block_dim(); ++mask) {
    for (std::uint32_t i = 0; i < params.k(); ++i) {
      const std::uint32_t b = (mask >> (params.k() - 1 - i)) & 1u;
      shifted[i] = static_cast<std::uint32_t>((spec.xs[i] + std::uint64_t{b} * spec.d) % params.N());
    }
    state.amps[flat_index(mask, pack_ints(shifted, params.N()), params)] = amp;
  }
  return state;
}

LabeledBasis::LabeledBasis(DihedralParams params, BasisFamily family, BasisPart part,
                           std::vector<SolutionBlock> blocks, std::vector<BasisVector> entries)
    : params_(params),
      family_(family),
      part_(part),
      blocks_(std::move(blocks)),
      entries_(std::move(entries)),
      block_lookup_(params_.int_dim() * params_.N(), -1) {
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const SolutionBlock& b = blocks_[i];
    if (b.l >= params_.int_dim() || b.p >= params_.N()) {
      throw InvalidArgument("LabeledBasis: block label out of range");
    }
    if (b.first_entry + b.entry_count > entries_.size()) {
      throw InvalidArgument("LabeledBasis: block entry range out of bounds");
    }
    block_lookup_[b.l * params_.N() + b.p] = static_cast<std::int64_t>(i);
  }
  b0_size_ = static_cast<std::size_t>(
      std::count_if(entries_.begin(), entries_.end(), [](const BasisVector& v) { return v.label.m == 0; }));
}

const SolutionBlock* LabeledBasis::find_block(std::uint64_t l, std::uint32_t p) const {
  if (l >= params_.int_dim() || p >= params_.N()) return nullptr;
  const std::int64_t idx = block_lookup_[l * params_.N() + p];
  return idx < 0 ? nullptr : &blocks_[static_cast<std::size_t>(idx)];
}

std::optional<std::size_t> LabeledBasis::find(const BasisLabel& label) const {
  const SolutionBlock* block = find_block(label.l, label.p);
  if (block == nullptr) return std::nullopt;
  for (std::size_t i = block->first_entry; i < block->first_entry + block->entry_count; ++i) {
    if (entries_[i].label.m == label.m) return i;
  }
  return std::nullopt;
}

BasisVector build_basis_vector(std::span<const std::uint32_t> l, std::uint32_t p, std::uint32_t m,
                               const DihedralParams& params) {
  if (l.size() != params.k()) throw InvalidArgument("build_basis_vector: l must have k entries");
  SubsetSumInstance instance{{l.begin(), l.end()}, p, params.N()};
  const SolutionSet set = enumerate_solutions(instance);
  if (set.empty()) throw EmptySolutionSet("build_basis_vector: T_{l,p} is empty");
  if (m >= set.size()) throw InvalidArgument("build_basis_vector: m must be below |T_{l,p}|");
  return make_vector(pack_ints(l, params.N()), p, m, set.solutions);
}

LabeledBasis enumerate_basis(const DihedralParams& params, BasisPart which) {
  std::vector<SolutionBlock> blocks;
  std::vector<BasisVector> entries;
  if (which != BasisPart::bperp) entries.reserve(params.full_dim());
  for (std::uint64_t l = 0; l < params.int_dim(); ++l) {
    const auto digits = unpack_ints(l, params.N(), params.k());
    auto by_target = solutions_by_target(digits, params.N());
    for (std::uint32_t p = 0; p < params.N(); ++p) {
      auto& sols = by_target[p];
      if (sols.empty()) continue;
      const auto t = static_cast<std::uint32_t>(sols.size());
      const std::uint32_t m_begin = which == BasisPart::bperp ? 1 : 0;
      const std::uint32_t m_end = which == BasisPart::b0 ? 1 : t;
      SolutionBlock block{l, p, std::move(sols), entries.size(), 0};
      for (std::uint32_t m = m_begin; m < m_end; ++m) {
        entries.push_back(make_vector(l, p, m, block.solutions));
      }
      block.entry_count = entries.size() - block.first_entry;
      blocks.push_back(std::move(block));
    }
  }
  return LabeledBasis(params, BasisFamily::canonical, which, std::move(blocks), std::move(entries));
}

BlockRotation identity_rotation() {
  return [](const SolutionBlock& block) -> Eigen::MatrixXcd {
    const auto dim = static_cast<Eigen::Index>(block.solutions.size() - 1);
    return Eigen::MatrixXcd::Identity(dim, dim);
  };
}

BlockRotation random_rotation(std::uint64_t seed) {
  return [seed](const SolutionBlock& block) -> Eigen::MatrixXcd {
    const auto dim = static_cast<Eigen::Index>(block.solutions.size() - 1);
    Rng rng(derive_seed(seed, block.l, block.p));
    Eigen::MatrixXcd g(dim, dim);
    const double s = std::sqrt(0.5);
    for (Eigen::Index c = 0; c < dim; ++c) {
      for (Eigen::Index r = 0; r < dim; ++r) {
        const double re = standard_normal(rng);
        const double im = standard_normal(rng);
        g(r, c) = Complex(re * s, im * s);
      }
    }
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
    Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(dim, dim);
    const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    // Fixing the phases of diag(R) makes the distribution Haar.
    for (Eigen::Index c = 0; c < dim; ++c) {
      const double mag = std::abs(r(c, c));
      if (mag > 0.0) q.col(c) *= r(c, c) / mag;
    }
    return q;
  };
}

BlockRotation hat_rotation() {
  return [](const SolutionBlock& block) -> Eigen::MatrixXcd {
    const auto dim = static_cast<Eigen::Index>(block.solutions.size() - 1);
    Eigen::MatrixXcd q(dim, dim);
    q.col(0) = Eigen::VectorXcd::Constant(dim, Complex(1.0 / std::sqrt(static_cast<double>(dim)), 0.0));
    Eigen::Index filled = 1;
    for (Eigen::Index e = 0; e < dim && filled < dim; ++e) {
      Eigen::VectorXcd candidate = Eigen::VectorXcd::Unit(dim, e);
      candidate = orthogonalize(q, filled, candidate);
      const double n = candidate.norm();
      if (n < 1e-8) continue;
      q.col(filled++) = candidate / n;
    }
    return q;
  };
}

LabeledBasis build_tilde_basis(const DihedralParams& params, const BlockRotation& rotation,
                               BasisFamily family) {
  const LabeledBasis canonical = enumerate_basis(params, BasisPart::all);
  std::vector<SolutionBlock> blocks(canonical.blocks().begin(), canonical.blocks().end());
  std::vector<BasisVector> entries(canonical.entries().begin(), canonical.entries().end());
  for (const SolutionBlock& block : blocks) {
    const std::size_t t = block.solutions.size();
    if (t < 2) continue;
    const auto dim = static_cast<Eigen::Index>(t - 1);
    const Eigen::MatrixXcd r = rotation(block);
    check_unitary(r, dim);
    for (Eigen::Index c = 0; c < dim; ++c) {
      BasisVector& out = entries[block.first_entry + 1 + static_cast<std::size_t>(c)];
      for (std::size_t j = 0; j < t; ++j) {
        Complex acc{};
        for (Eigen::Index m = 0; m < dim; ++m) {
          acc += r(m, c) * canonical.entry(block.first_entry + 1 + static_cast<std::size_t>(m)).support[j].amp;
        }
        out.support[j].amp = acc;
      }
    }
  }
  return LabeledBasis(params, family, BasisPart::all, std::move(blocks), std::move(entries));
}

LabeledBasis build_hat_basis(const DihedralParams& params) {
  return build_tilde_basis(params, hat_rotation(), BasisFamily::hat);
}

DenseState to_dense(const BasisVector& v, const DihedralParams& params) {
  DenseState out = DenseState::zero(params);
  const auto l = unpack_ints(v.label.l, params.N(), params.k());
  const double scale = 1.0 / std::sqrt(static_cast<double>(params.int_dim()));
  std::vector<Complex> chi(params.int_dim());
  for (std::uint64_t x = 0; x < params.int_dim(); ++x) {
    const auto xs = unpack_ints(x, params.N(), params.k());
    std::uint64_t e = 0;
    for (std::uint32_t i = 0; i < params.k(); ++i) e += std::uint64_t{l[i]} * xs[i];
    chi[x] = omega(params.N(), static_cast<std::int64_t>(e % params.N())) * scale;
  }
  for (const SupportTerm& term : v.support) {
    for (std::uint64_t x = 0; x < params.int_dim(); ++x) {
      out.amps[flat_index(term.bits, x, params)] += term.amp * chi[x];
    }
  }
  return out;
}

Complex coefficient(const BasisVector& v, const DenseState& hybrid) {
  if (hybrid.frame != Frame::hybrid) throw InvalidArgument("coefficient: state must be in the hybrid frame");
  Complex acc{};
  for (const SupportTerm& term : v.support) {
    acc += std::conj(term.amp) * hybrid.amps[flat_index(term.bits, v.label.l, hybrid.params)];
  }
  return acc;
}

OrthogonalityReport verify_coset_orthogonality(const LabeledBasis& basis) {
  const DihedralParams& params = basis.params();
  OrthogonalityReport report;
  report.perp_vectors = basis.bperp_size();
  for_each_coset_state(params, [&](const DenseState& coset) {
    ++report.coset_states;
    const DenseState hybrid = to_frame(coset, Frame::hybrid);
    for (const BasisVector& v : basis.entries()) {
      const double mag = std::abs(coefficient(v, hybrid));
      double& slot = v.label.m == 0 ? report.max_abs_inner_b0 : report.max_abs_inner;
      slot = std::max(slot, mag);
    }
  });
  return report;
}

OrthogonalityReport verify_coset_orthogonality(const DihedralParams& params) {
  return verify_coset_orthogonality(enumerate_basis(params, BasisPart::all));
}

SpanReport coset_span_check(const DihedralParams& params, double rank_tolerance) {
  const LabeledBasis basis = enumerate_basis(params, BasisPart::all);
  SpanReport report;
  report.rank_tolerance = rank_tolerance;
  report.b0_size = basis.b0_size();

  const auto dim = static_cast<Eigen::Index>(params.full_dim());
  const auto count = static_cast<Eigen::Index>(params.int_dim() * params.N());
  Eigen::MatrixXcd cosets(dim, count);
  Eigen::Index col = 0;
  for_each_coset_state(params, [&](const DenseState& coset) {
    cosets.col(col++) = Eigen::Map<const Eigen::VectorXcd>(coset.amps.data(), dim);
    // Residual after projecting onto span(B0), worked in hybrid coordinates.
    DenseState residual = to_frame(coset, Frame::hybrid);
    for (const BasisVector& v : basis.entries()) {
      if (v.label.m != 0) continue;
      const Complex c = coefficient(v, residual);
      for (const SupportTerm& term : v.support) {
        residual.amps[flat_index(term.bits, v.label.l, params)] -= c * term.amp;
      }
    }
    report.max_coset_residual = std::max(report.max_coset_residual, residual.norm());
  });
  report.coset_states = static_cast<std::size_t>(count);

  Eigen::BDCSVD<Eigen::MatrixXcd> svd(cosets, Eigen::ComputeThinU);
  const Eigen::VectorXd& sv = svd.singularValues();
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > rank_tolerance) ++report.rank;
  }
  const Eigen::MatrixXcd range = svd.matrixU().leftCols(static_cast<Eigen::Index>(report.rank));

  for (const BasisVector& v : basis.entries()) {
    if (v.label.m == 0) {
      const DenseState dense = to_dense(v, params);
      const Eigen::Map<const Eigen::VectorXcd> vec(dense.amps.data(), dim);
      const Eigen::VectorXcd r = vec - range * (range.adjoint() * vec);
      report.max_b0_residual = std::max(report.max_b0_residual, r.norm());
      continue;
    }
    // Projection of a B-perp vector onto span(B0). Only B0 entries sharing its
    // chi_l factor can overlap; others vanish through the Fourier factor.
    double sq = 0.0;
    for (std::uint32_t p = 0; p < params.N(); ++p) {
      const SolutionBlock* block = basis.find_block(v.label.l, p);
      if (block == nullptr) continue;
      const BasisVector& s0 = basis.entry(block->first_entry);
      Complex acc{};
      for (const SupportTerm& a : s0.support) {
        for (const SupportTerm& b : v.support) {
          if (a.bits == b.bits) acc += std::conj(a.amp) * b.amp;
        }
      }
      sq += std::norm(acc);
    }
    report.max_perp_projection = std::max(report.max_perp_projection, std::sqrt(sq));
  }
  return report;
}

GramReport gram_check_dense(const LabeledBasis& basis) {
  const DihedralParams& params = basis.params();
  if (basis.size() > kDenseGramLimit) {
    throw ResourceLimit("gram_check_dense: more than 4096 vectors; use gram_check_sparse");
  }
  const auto dim = static_cast<Eigen::Index>(params.full_dim());
  const auto n = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXcd vectors(dim, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const DenseState dense = to_dense(basis.entry(static_cast<std::size_t>(c)), params);
    vectors.col(c) = Eigen::Map<const Eigen::VectorXcd>(dense.amps.data(), dim);
  }
  const Eigen::MatrixXcd gram = vectors.adjoint() * vectors;
  GramReport report{basis.size(), 0.0};
  if (n > 0) report.max_deviation = (gram - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
  return report;
}

GramReport gram_check_sparse(const LabeledBasis& basis) {
  const DihedralParams& params = basis.params();
  GramReport report{basis.size(), 0.0};
  // Group entries by l; within one l, coordinates are the 2^k bit patterns.
  std::vector<std::vector<std::size_t>> by_l(params.int_dim());
  for (std::size_t i = 0; i < basis.size(); ++i) by_l[basis.entry(i).label.l].push_back(i);
  const auto rows = static_cast<Eigen::Index>(params.block_dim());
  for (const auto& members : by_l) {
    if (members.empty()) continue;
    const auto n = static_cast<Eigen::Index>(members.size());
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(rows, n);
    for (Eigen::Index c = 0; c < n; ++c) {
      for (const SupportTerm& term : basis.entry(members[static_cast<std::size_t>(c)]).support) {
        m(term.bits, c) += term.amp;
      }
    }
    const Eigen::MatrixXcd gram = m.adjoint() * m;
    report.max_deviation = std::max(
        report.max_deviation, (gram - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff());
  }
  return report;
}

double max_span_residual(const LabeledBasis& tilde, const LabeledBasis& canonical) {
  double worst = 0.0;
  for (const BasisVector& v : tilde.entries()) {
    if (v.label.m == 0) continue;
    const SolutionBlock* block = canonical.find_block(v.label.l, v.label.p);
    if (block == nullptr) throw InvalidArgument("max_span_residual: block missing from canonical basis");
    std::vector<Complex> residual(v.support.size());
    for (std::size_t j = 0; j < v.support.size(); ++j) residual[j] = v.support[j].amp;
    for (std::size_t e = block->first_entry; e < block->first_entry + block->entry_count; ++e) {
      const BasisVector& c = canonical.entry(e);
      if (c.label.m == 0) continue;
      Complex proj{};
      for (std::size_t j = 0; j < residual.size(); ++j) proj += std::conj(c.support[j].amp) * v.support[j].amp;
      for (std::size_t j = 0; j < residual.size(); ++j) residual[j] -= proj * c.support[j].amp;
    }
    worst = std::max(worst, norm(residual));
  }
  return worst;
}

nlohmann::json basis_to_json(const LabeledBasis& basis) {
  const DihedralParams& params = basis.params();
  nlohmann::json entries = nlohmann::json::array();
  for (const BasisVector& v : basis.entries()) {
    nlohmann::json support = nlohmann::json::array();
    for (const SupportTerm& term : v.support) {
      support.push_back({{"bits", bits_string(term.bits, params.k())},
                         {"re", term.amp.real()},
                         {"im", term.amp.imag()}});
    }
    entries.push_back({{"l", unpack_ints(v.label.l, params.N(), params.k())},
                       {"p", v.label.p},
                       {"m", v.label.m},
                       {"support", std::move(support)}});
  }
  return {{"schema", "dcl.basis/1"},
          {"N", params.N()},
          {"k", params.k()},
          {"family", to_string(basis.family())},
          {"part", to_string(basis.part())},
          {"entries", std::move(entries)}};
}

}  // namespace dcl
