#include "dcl/core_math.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

namespace dcl {
namespace {

constexpr std::uint64_t kDefaultBudget = std::uint64_t{1} << 24;

// Multiplies while staying at or below `cap`; returns cap + 1 on overflow.
std::uint64_t capped_pow(std::uint64_t base, std::uint32_t exponent, std::uint64_t cap) {
  std::uint64_t result = 1;
  for (std::uint32_t i = 0; i < exponent; ++i) {
    if (base != 0 && result > cap / base) return cap + 1;
    result *= base;
  }
  return result;
}

}  // namespace

std::uint64_t amplitude_budget() {
  static const std::uint64_t budget = [] {
    if (const char* env = std::getenv("DCL_MAX_AMPLITUDES")) {
      char* end = nullptr;
      const unsigned long long v = std::strtoull(env, &end, 10);
      if (end != env && *end == '\0' && v > 0) return static_cast<std::uint64_t>(v);
    }
    return kDefaultBudget;
  }();
  return budget;
}

Complex omega(std::int64_t n, std::int64_t e) {
  if (n <= 0) throw InvalidArgument("omega: order must be positive, got " + std::to_string(n));
  std::int64_t r = e % n;
  if (r < 0) r += n;
  if (r == 0) return {1.0, 0.0};
  // Exact values on the axes avoid sin(pi) ~ 1e-16 residue.
  if (2 * r == n) return {-1.0, 0.0};
  if (4 * r == n) return {0.0, 1.0};
  if (4 * r == 3 * n) return {0.0, -1.0};
  const double angle = 2.0 * kPi * static_cast<double>(r) / static_cast<double>(n);
  return std::polar(1.0, angle);
}

DihedralParams::DihedralParams(std::uint32_t modulus, std::uint32_t registers)
    : DihedralParams(modulus, registers, amplitude_budget()) {}

DihedralParams::DihedralParams(std::uint32_t modulus, std::uint32_t registers,
                               std::uint64_t budget)
    : modulus_(modulus), registers_(registers) {
  if (modulus < 2) throw InvalidArgument("DihedralParams: N must be >= 2");
  if (registers < 1) throw InvalidArgument("DihedralParams: k must be >= 1");
  if (registers > 32) throw ResourceLimit("DihedralParams: k above 32 is not representable");
  full_dim_ = capped_pow(2ull * modulus, registers, budget);
  if (full_dim_ > budget) {
    throw ResourceLimit("DihedralParams: (2N)^k exceeds the amplitude budget of " +
                        std::to_string(budget));
  }
  block_dim_ = std::uint64_t{1} << registers;
  int_dim_ = capped_pow(modulus, registers, budget);
  if (block_dim_ * int_dim_ != full_dim_) {
    throw std::logic_error("DihedralParams: dimension bookkeeping mismatch");
  }
}

std::uint64_t pack_ints(std::span<const std::uint32_t> ints, std::uint32_t modulus) {
  std::uint64_t packed = 0;
  for (std::uint32_t x : ints) {
    if (x >= modulus) throw InvalidArgument("pack_ints: register value out of range");
    packed = packed * modulus + x;
  }
  return packed;
}

std::vector<std::uint32_t> unpack_ints(std::uint64_t packed, std::uint32_t modulus,
                                       std::uint32_t registers) {
  std::vector<std::uint32_t> ints(registers);
  for (std::uint32_t i = registers; i-- > 0;) {
    ints[i] = static_cast<std::uint32_t>(packed % modulus);
    packed /= modulus;
  }
  return ints;
}

std::uint64_t index_encode(const StateIndex& idx, const DihedralParams& params) {
  if (idx.bits.size() != params.k() || idx.ints.size() != params.k()) {
    throw InvalidArgument("index_encode: expected k bits and k integer registers");
  }
  std::uint32_t mask = 0;
  for (std::uint8_t b : idx.bits) {
    if (b > 1) throw InvalidArgument("index_encode: bit register value must be 0 or 1");
    mask = (mask << 1) | b;
  }
  return flat_index(mask, pack_ints(idx.ints, params.N()), params);
}

StateIndex index_decode(std::uint64_t index, const DihedralParams& params) {
  if (index >= params.full_dim()) throw InvalidArgument("index_decode: index out of range");
  const auto mask = static_cast<std::uint32_t>(index / params.int_dim());
  StateIndex out;
  out.bits.resize(params.k());
  for (std::uint32_t i = 0; i < params.k(); ++i) {
    out.bits[i] = static_cast<std::uint8_t>((mask >> (params.k() - 1 - i)) & 1u);
  }
  out.ints = unpack_ints(index % params.int_dim(), params.N(), params.k());
  return out;
}

DenseState DenseState::zero(const DihedralParams& params, Frame frame) {
  return DenseState{params, frame, std::vector<Complex>(params.full_dim())};
}

DenseState DenseState::basis(const DihedralParams& params, std::uint64_t index, Frame frame) {
  if (index >= params.full_dim()) throw InvalidArgument("DenseState::basis: index out of range");
  DenseState s = zero(params, frame);
  s.amps[index] = 1.0;
  return s;
}

double DenseState::norm() const { return dcl::norm(amps); }

DenseState frame_transform(const DenseState& state, Direction direction) {
  const DihedralParams& p = state.params;
  if (state.amps.size() != p.full_dim()) {
    throw InvalidArgument("frame_transform: amplitude count does not match (2N)^k");
  }
  const std::uint32_t n = p.N();
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  const std::int64_t sign = direction == Direction::forward ? 1 : -1;
  std::vector<Complex> kernel(static_cast<std::size_t>(n) * n);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = 0; j < n; ++j) {
      kernel[i * n + j] = omega(n, sign * static_cast<std::int64_t>(i) * j) * scale;
    }
  }

  std::vector<Complex> cur = state.amps;
  std::vector<Complex> next(cur.size());
  std::vector<Complex> column(n);
  // Register r has stride N^(k-1-r) inside the integer block.
  std::uint64_t stride = p.int_dim();
  for (std::uint32_t r = 0; r < p.k(); ++r) {
    stride /= n;
    const std::uint64_t span = stride * n;
    for (std::uint64_t outer = 0; outer < cur.size(); outer += span) {
      for (std::uint64_t inner = 0; inner < stride; ++inner) {
        const std::uint64_t base = outer + inner;
        for (std::uint32_t j = 0; j < n; ++j) column[j] = cur[base + j * stride];
        for (std::uint32_t i = 0; i < n; ++i) {
          Complex acc{};
          for (std::uint32_t j = 0; j < n; ++j) acc += kernel[i * n + j] * column[j];
          next[base + i * stride] = acc;
        }
      }
    }
    cur.swap(next);
  }
  return DenseState{p, state.frame, std::move(cur)};
}

DenseState to_frame(const DenseState& state, Frame target) {
  if (state.frame == target) return state;
  // Hybrid amplitudes h(b,l) = <b,chi_l|psi>, so standard -> hybrid is the
  // inverse kernel and hybrid -> standard the forward one.
  DenseState out = frame_transform(
      state, target == Frame::hybrid ? Direction::inverse : Direction::forward);
  out.frame = target;
  return out;
}

Complex inner_product(std::span<const Complex> a, std::span<const Complex> b) {
  if (a.size() != b.size()) throw InvalidArgument("inner_product: dimension mismatch");
  Complex acc{};
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

Complex inner_product(const DenseState& a, const DenseState& b) {
  if (a.frame != b.frame) throw InvalidArgument("inner_product: frame mismatch");
  if (!(a.params == b.params)) throw InvalidArgument("inner_product: parameter mismatch");
  return inner_product(std::span<const Complex>(a.amps), std::span<const Complex>(b.amps));
}

double norm(std::span<const Complex> v) {
  double acc = 0.0;
  for (const Complex& c : v) acc += std::norm(c);
  return std::sqrt(acc);
}

}  // namespace dcl
