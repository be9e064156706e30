#include "dcl/simulator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>

namespace dcl {
namespace {

// Probabilities below this are treated as impossible branches.
constexpr double kBranchFloor = 1e-300;

struct PreparedInput {
  const SolutionBlock* block = nullptr;
  std::size_t anchor = 0;  // index of b in the block's solution list
  std::vector<LabelTerm> terms;
};

// |b>|chi_l> written in the basis: coefficient <V_e|b,chi_l> = conj(V_e[j0])
// for every entry e of block (l, b.l).
PreparedInput prepare_input(const LabeledBasis& basis, std::span<const std::uint32_t> l, const BitVector& b) {
  const DihedralParams& params = basis.params();
  if (l.size() != params.k() || b.k != params.k()) {
    throw InvalidArgument("algorithm input: l and b must have k entries");
  }
  const std::uint32_t p = subset_sum(l, b.mask, params.N());
  PreparedInput in;
  in.block = basis.find_block(pack_ints(l, params.N()), p);
  if (in.block == nullptr) throw InvalidArgument("algorithm input: basis lacks the (l, p) block");
  if (in.block->entry_count != in.block->solutions.size()) {
    throw InvalidArgument("algorithm input: basis block is incomplete");
  }
  const auto it = std::lower_bound(in.block->solutions.begin(), in.block->solutions.end(), b.mask);
  in.anchor = static_cast<std::size_t>(it - in.block->solutions.begin());
  for (std::size_t e = in.block->first_entry; e < in.block->first_entry + in.block->entry_count; ++e) {
    in.terms.push_back({e, std::conj(basis.entry(e).support[in.anchor].amp)});
  }
  return in;
}

// Amplitudes over the block's solutions of sum_e amp_e V_e.
std::vector<Complex> compose(const LabeledBasis& basis, const SolutionBlock& block,
                             const std::vector<LabelTerm>& terms) {
  std::vector<Complex> out(block.solutions.size());
  for (const LabelTerm& term : terms) {
    const BasisVector& v = basis.entry(term.entry);
    if (v.label.l != block.l || v.label.p != block.p) {
      throw std::logic_error("compose: label outside the input block");
    }
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += term.amp * v.support[j].amp;
  }
  return out;
}

Outcome finish(const SolutionBlock& block, const std::vector<Complex>& amps, const BitVector& b,
               std::span<const std::uint32_t> l, std::uint32_t modulus, Rng& rng) {
  std::vector<double> weights(amps.size());
  for (std::size_t j = 0; j < amps.size(); ++j) weights[j] = std::norm(amps[j]);
  const std::size_t j = rng.discrete(weights);
  Outcome out;
  out.result = BitVector{block.solutions[j], b.k};
  out.success = verify_collision(l, b, out.result, modulus);
  out.solution_count = block.solutions.size();
  return out;
}

void finalize(OutcomeDistribution& dist, const std::map<std::uint32_t, double>& acc) {
  for (const auto& [mask, prob] : acc) {
    dist.probabilities.emplace_back(mask, prob);
    dist.total += prob;
    if (mask != dist.input.mask) dist.success_probability += prob;
  }
}

}  // namespace

double OutcomeDistribution::probability(std::uint32_t mask) const {
  for (const auto& [m, p] : probabilities) {
    if (m == mask) return p;
  }
  return 0.0;
}

Outcome algorithm1(std::span<const std::uint32_t> l, const BitVector& b, const BasisChangeUnitary& us,
                   Rng& rng) {
  const LabeledBasis& basis = us.basis();
  const PreparedInput in = prepare_input(basis, l, b);
  const std::vector<StandardTerm> after = us.apply(in.terms);
  std::vector<double> weights(after.size());
  for (std::size_t i = 0; i < after.size(); ++i) weights[i] = std::norm(after[i].amp);
  const StandardTerm measured = after[rng.discrete(weights)];
  const std::vector<LabelTerm> back = us.adjoint({{measured.index, Complex(1.0, 0.0)}});
  Outcome out = finish(*in.block, compose(basis, *in.block, back), b, l, basis.params().N(), rng);
  out.measured_target = measured.index;
  out.measured_entry = back.front().entry;
  return out;
}

Outcome algorithm2(std::span<const std::uint32_t> l, const BitVector& b, const IndicatorUnitary& uc,
                   Rng& rng) {
  const LabeledBasis& basis = uc.basis();
  const PreparedInput in = prepare_input(basis, l, b);
  const std::vector<IndicatorTerm> after = uc.apply(in.terms);
  double p[2] = {0.0, 0.0};
  for (const IndicatorTerm& t : after) p[t.indicator] += std::norm(t.amp);
  const std::uint32_t bit = static_cast<std::uint32_t>(rng.discrete(std::span<const double>(p, 2)));
  std::vector<IndicatorTerm> branch;
  const double s = 1.0 / std::sqrt(p[bit]);
  for (const IndicatorTerm& t : after) {
    if (t.indicator == bit) branch.push_back({t.indicator, t.workspace, t.amp * s});
  }
  Outcome out = finish(*in.block, compose(basis, *in.block, uc.adjoint(branch)), b, l, basis.params().N(), rng);
  out.indicator = bit;
  return out;
}

OutcomeDistribution exact_outcome_distribution(std::span<const std::uint32_t> l, const BitVector& b,
                                               const BasisChangeUnitary& us) {
  const LabeledBasis& basis = us.basis();
  const PreparedInput in = prepare_input(basis, l, b);
  std::map<std::uint32_t, double> acc;
  for (const StandardTerm& t : us.apply(in.terms)) {
    const double q = std::norm(t.amp);
    if (q < kBranchFloor) continue;
    const auto amps = compose(basis, *in.block, us.adjoint({{t.index, Complex(1.0, 0.0)}}));
    for (std::size_t j = 0; j < amps.size(); ++j) acc[in.block->solutions[j]] += q * std::norm(amps[j]);
  }
  OutcomeDistribution dist{b, in.block->solutions.size(), {}, 0.0, 0.0};
  finalize(dist, acc);
  return dist;
}

OutcomeDistribution exact_outcome_distribution(std::span<const std::uint32_t> l, const BitVector& b,
                                               const IndicatorUnitary& uc) {
  const LabeledBasis& basis = uc.basis();
  const PreparedInput in = prepare_input(basis, l, b);
  const std::vector<IndicatorTerm> after = uc.apply(in.terms);
  std::map<std::uint32_t, double> acc;
  for (std::uint32_t bit = 0; bit < 2; ++bit) {
    std::vector<IndicatorTerm> branch;
    double q = 0.0;
    for (const IndicatorTerm& t : after) {
      if (t.indicator != bit) continue;
      branch.push_back(t);
      q += std::norm(t.amp);
    }
    if (q < kBranchFloor) continue;
    const double s = 1.0 / std::sqrt(q);
    for (auto& t : branch) t.amp *= s;
    const auto amps = compose(basis, *in.block, uc.adjoint(branch));
    for (std::size_t j = 0; j < amps.size(); ++j) acc[in.block->solutions[j]] += q * std::norm(amps[j]);
  }
  OutcomeDistribution dist{b, in.block->solutions.size(), {}, 0.0, 0.0};
  finalize(dist, acc);
  return dist;
}

OutcomeDistribution dense_algorithm1_distribution(std::span<const std::uint32_t> l, const BitVector& b,
                                                  const Eigen::MatrixXcd& us, const DihedralParams& params) {
  const auto dim = static_cast<Eigen::Index>(params.full_dim());
  if (us.rows() != dim || us.cols() != dim) throw InvalidArgument("dense_algorithm1: matrix has wrong size");
  if (l.size() != params.k() || b.k != params.k()) throw InvalidArgument("dense_algorithm1: bad input length");

  // Steps 1-2: |b, l> then QFT on the integer registers.
  const DenseState prepared =
      frame_transform(DenseState::basis(params, flat_index(b.mask, pack_ints(l, params.N()), params)),
                      Direction::forward);
  const Eigen::VectorXcd psi = us * Eigen::Map<const Eigen::VectorXcd>(prepared.amps.data(), dim);

  std::map<std::uint32_t, double> acc;
  for (Eigen::Index t = 0; t < dim; ++t) {
    const double q = std::norm(psi(t));
    if (q < kBranchFloor) continue;
    // U_S^dagger |t> is the conjugated row t.
    const Eigen::VectorXcd back = us.row(t).adjoint();
    for (Eigen::Index i = 0; i < dim; ++i) {
      const auto mask = static_cast<std::uint32_t>(static_cast<std::uint64_t>(i) / params.int_dim());
      acc[mask] += q * std::norm(back(i));
    }
  }
  const SolutionSet set = enumerate_solutions({{l.begin(), l.end()}, subset_sum(l, b.mask, params.N()), params.N()});
  OutcomeDistribution dist{b, set.size(), {}, 0.0, 0.0};
  finalize(dist, acc);
  return dist;
}

OutcomeDistribution dense_algorithm2_distribution(std::span<const std::uint32_t> l, const BitVector& b,
                                                  const Eigen::MatrixXcd& uc, const DihedralParams& params) {
  const IndicatorLayout layout = indicator_layout(params);
  const auto total = static_cast<Eigen::Index>(layout.total_dim());
  if (uc.rows() != total || uc.cols() != total) throw InvalidArgument("dense_algorithm2: matrix has wrong size");
  if (l.size() != params.k() || b.k != params.k()) throw InvalidArgument("dense_algorithm2: bad input length");

  const DenseState prepared =
      frame_transform(DenseState::basis(params, flat_index(b.mask, pack_ints(l, params.N()), params)),
                      Direction::forward);
  Eigen::VectorXcd input = Eigen::VectorXcd::Zero(total);
  for (std::uint64_t main = 0; main < layout.main_dim; ++main) {
    input(static_cast<Eigen::Index>(layout.index(0, main, 0))) = prepared.amps[main];
  }
  const Eigen::VectorXcd after = uc * input;
  const Eigen::Index half = total / 2;

  std::map<std::uint32_t, double> acc;
  for (std::uint32_t bit = 0; bit < 2; ++bit) {
    Eigen::VectorXcd branch = Eigen::VectorXcd::Zero(total);
    branch.segment(bit * half, half) = after.segment(bit * half, half);
    const double q = branch.squaredNorm();
    if (q < kBranchFloor) continue;
    const Eigen::VectorXcd back = uc.adjoint() * (branch / std::sqrt(q));
    for (Eigen::Index i = 0; i < total; ++i) {
      const std::uint64_t main = (static_cast<std::uint64_t>(i) / layout.workspace_dim) % layout.main_dim;
      const auto mask = static_cast<std::uint32_t>(main / params.int_dim());
      acc[mask] += q * std::norm(back(i));
    }
  }
  const SolutionSet set = enumerate_solutions({{l.begin(), l.end()}, subset_sum(l, b.mask, params.N()), params.N()});
  OutcomeDistribution dist{b, set.size(), {}, 0.0, 0.0};
  finalize(dist, acc);
  return dist;
}

double total_variation(const OutcomeDistribution& a, const OutcomeDistribution& b) {
  std::map<std::uint32_t, double> diff;
  for (const auto& [m, p] : a.probabilities) diff[m] += p;
  for (const auto& [m, p] : b.probabilities) diff[m] -= p;
  double tv = 0.0;
  for (const auto& [m, d] : diff) tv += std::abs(d);
  return 0.5 * tv;
}

double coset_space_probability(const DenseState& state, const LabeledBasis& basis) {
  if (!(state.params == basis.params())) throw InvalidArgument("coset_space_probability: parameter mismatch");
  const DenseState hybrid = to_frame(state, Frame::hybrid);
  double p = 0.0;
  for (const BasisVector& v : basis.entries()) {
    if (v.label.m == 0) p += std::norm(coefficient(v, hybrid));
  }
  return p;
}

DcspResult dcsp_measure(const DenseState& state, const LabeledBasis& basis, Rng& rng) {
  if (!(state.params == basis.params())) throw InvalidArgument("dcsp_measure: parameter mismatch");
  if (std::abs(state.norm() - 1.0) > 1e-9) throw InvalidArgument("dcsp_measure: state must have unit norm");
  const DenseState hybrid = to_frame(state, Frame::hybrid);
  DenseState projected = DenseState::zero(state.params, Frame::hybrid);
  double p_in = 0.0;
  for (const BasisVector& v : basis.entries()) {
    if (v.label.m != 0) continue;
    const Complex c = coefficient(v, hybrid);
    p_in += std::norm(c);
    for (const SupportTerm& term : v.support) {
      projected.amps[flat_index(term.bits, v.label.l, state.params)] += c * term.amp;
    }
  }
  p_in = std::clamp(p_in, 0.0, 1.0);
  DcspVerdict verdict = DcspVerdict::in_c;
  if (rng.uniform01() < p_in) {
    for (auto& a : projected.amps) a /= std::sqrt(p_in);
  } else {
    verdict = DcspVerdict::in_c_perp;
    const double rest = 1.0 - p_in;
    for (std::size_t i = 0; i < projected.amps.size(); ++i) {
      projected.amps[i] = (hybrid.amps[i] - projected.amps[i]) / std::sqrt(rest);
    }
  }
  return DcspResult{verdict, p_in, to_frame(projected, Frame::standard)};
}

DcspParams DcspParams::make(std::uint32_t modulus, std::uint32_t kprime) {
  if (kprime < 1) throw InvalidArgument("DcspParams: k' must be >= 1");
  if (modulus < 2) throw InvalidArgument("DcspParams: N must be >= 2");
  const auto log2n2 = static_cast<std::uint32_t>(std::bit_width(2ull * modulus - 1));  // ceil(log2 2N)
  return DcspParams{DihedralParams(modulus, log2n2 + kprime), kprime};
}

double DcspParams::uniform_input_bound() const { return std::ldexp(1.0, -static_cast<int>(kprime + 1)); }

CosetStateOracle::CosetStateOracle(std::uint32_t modulus, std::uint32_t hidden_d, std::uint64_t seed,
                                   std::uint64_t state_budget)
    : modulus_(modulus), hidden_d_(hidden_d), rng_(seed), budget_(state_budget) {
  if (modulus < 2) throw InvalidArgument("CosetStateOracle: N must be >= 2");
  if (hidden_d >= modulus) throw InvalidArgument("CosetStateOracle: d out of range");
}

std::vector<Complex> CosetStateOracle::next() {
  if (consumed_ >= budget_) throw ResourceLimit("CosetStateOracle: state budget exhausted");
  ++consumed_;
  const auto x = static_cast<std::uint32_t>(rng_.uniform_below(modulus_));
  std::vector<Complex> amps(2ull * modulus_);
  const double s = 1.0 / std::sqrt(2.0);
  amps[x] = s;
  amps[modulus_ + (x + hidden_d_) % modulus_] = s;
  return amps;
}

namespace {

// (|0,x> + |1,x+d>) -> (|0,x> + |1,x+d-shift>): subtraction controlled on the bit register.
void controlled_subtract(std::vector<Complex>& reg, std::uint32_t modulus, std::uint32_t shift) {
  std::vector<Complex> upper(modulus);
  for (std::uint32_t x = 0; x < modulus; ++x) upper[(x + modulus - shift % modulus) % modulus] = reg[modulus + x];
  std::copy(upper.begin(), upper.end(), reg.begin() + modulus);
}

void measure_int_bit(std::vector<Complex>& reg, std::uint32_t modulus, std::uint32_t bit, Rng& rng) {
  double p[2] = {0.0, 0.0};
  for (std::size_t i = 0; i < reg.size(); ++i) p[((i % modulus) >> bit) & 1u] += std::norm(reg[i]);
  const auto outcome = static_cast<std::uint32_t>(rng.discrete(std::span<const double>(p, 2)));
  const double s = 1.0 / std::sqrt(p[outcome]);
  for (std::size_t i = 0; i < reg.size(); ++i) {
    reg[i] = (((i % modulus) >> bit) & 1u) == outcome ? reg[i] * s : Complex{};
  }
}

// Tensor product of k single registers (index b*N + x each) in the
// bits-major flat layout.
DenseState tensor(const std::vector<std::vector<Complex>>& regs, const DihedralParams& params) {
  DenseState out = DenseState::zero(params);
  const std::uint32_t n = params.N();
  const std::uint32_t k = params.k();
  for (std::uint64_t idx = 0; idx < params.full_dim(); ++idx) {
    const auto mask = static_cast<std::uint32_t>(idx / params.int_dim());
    std::uint64_t ints = idx % params.int_dim();
    Complex amp(1.0, 0.0);
    for (std::uint32_t r = k; r-- > 0;) {
      const auto x = static_cast<std::uint32_t>(ints % n);
      ints /= n;
      const std::uint32_t bit = (mask >> (k - 1 - r)) & 1u;
      amp *= regs[r][bit * n + x];
      if (amp == Complex{}) break;
    }
    out.amps[idx] = amp;
  }
  return out;
}

}  // namespace

DcpResult dcp_solve(CosetStateOracle& oracle, const DcspParams& dcsp, std::uint32_t repeats, Rng& rng,
                    const LabeledBasis* b0) {
  const DihedralParams& params = dcsp.params;
  const std::uint32_t n = params.N();
  if (!std::has_single_bit(n)) throw InvalidArgument("dcp_solve: N must be a power of 2");
  if (oracle.modulus() != n) throw InvalidArgument("dcp_solve: oracle modulus does not match");
  if (repeats < 1) throw InvalidArgument("dcp_solve: repeats must be >= 1");

  std::optional<LabeledBasis> owned;
  if (b0 == nullptr) {
    owned.emplace(enumerate_basis(params, BasisPart::b0));
    b0 = &*owned;
  }

  DcpResult result;
  const auto bits = static_cast<std::uint32_t>(std::countr_zero(n));
  for (std::uint32_t i = 0; i < bits; ++i) {
    DcpBitTrace trace;
    std::uint32_t calls = repeats;
    for (std::uint32_t call = 0; call < calls; ++call) {
      std::vector<std::vector<Complex>> regs;
      regs.reserve(params.k());
      for (std::uint32_t r = 0; r < params.k(); ++r) {
        auto reg = oracle.next();
        controlled_subtract(reg, n, result.recovered);
        measure_int_bit(reg, n, i, rng);
        regs.push_back(std::move(reg));
      }
      const DcspResult verdict = dcsp_measure(tensor(regs, params), *b0, rng);
      (verdict.verdict == DcspVerdict::in_c ? trace.votes_in_c : trace.votes_perp) += 1;
      if (call + 1 == calls && trace.votes_in_c == trace.votes_perp) ++calls;
    }
    trace.bit = trace.votes_perp > trace.votes_in_c ? 1u : 0u;
    result.recovered |= trace.bit << i;
    result.bits.push_back(trace);
  }
  result.states_consumed = oracle.consumed();
  return result;
}

}  // namespace dcl
