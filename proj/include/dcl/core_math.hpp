#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dcl {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a requested computation would exceed a size budget.
class ResourceLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptySolutionSet : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Default cap on the number of amplitudes a state may hold (2^24).
/// Overridden by the DCL_MAX_AMPLITUDES environment variable when set.
std::uint64_t amplitude_budget();

/// Returns exp(2*pi*i*e/n). The exponent is reduced mod n before evaluation,
/// so omega(n, e + n) is bit-identical to omega(n, e).
Complex omega(std::int64_t n, std::int64_t e);

/// Modulus N and register count k of a k-register coset state over Z_2 x Z_N.
///
/// Dimensions:
///   full_dim  = (2N)^k   amplitudes of a k-register state
///   block_dim = 2^k      bit patterns per integer-register value
///   int_dim   = N^k      integer-register values
class DihedralParams {
 public:
  DihedralParams(std::uint32_t modulus, std::uint32_t registers);
  DihedralParams(std::uint32_t modulus, std::uint32_t registers, std::uint64_t budget);

  std::uint32_t N() const noexcept { return modulus_; }
  std::uint32_t k() const noexcept { return registers_; }
  std::uint64_t full_dim() const noexcept { return full_dim_; }
  std::uint64_t block_dim() const noexcept { return block_dim_; }
  std::uint64_t int_dim() const noexcept { return int_dim_; }

  friend bool operator==(const DihedralParams&, const DihedralParams&) = default;

 private:
  std::uint32_t modulus_;
  std::uint32_t registers_;
  std::uint64_t full_dim_;
  std::uint64_t block_dim_;
  std::uint64_t int_dim_;
};

/// Basis label |b_1..b_k, x_1..x_k>. Flat index layout: bit registers are
/// most significant, register 1 outermost within each group.
struct StateIndex {
  std::vector<std::uint8_t> bits;
  std::vector<std::uint32_t> ints;

  friend bool operator==(const StateIndex&, const StateIndex&) = default;
};

std::uint64_t index_encode(const StateIndex& idx, const DihedralParams& params);
StateIndex index_decode(std::uint64_t index, const DihedralParams& params);

// Packed forms used on hot paths. A bit pattern is a mask with b_1 as the most
// significant of its k bits; integer registers pack as sum_i x_i N^(k-1-i).
std::uint64_t pack_ints(std::span<const std::uint32_t> ints, std::uint32_t modulus);
std::vector<std::uint32_t> unpack_ints(std::uint64_t packed, std::uint32_t modulus,
                                       std::uint32_t registers);
inline std::uint64_t flat_index(std::uint32_t bits, std::uint64_t ints,
                                const DihedralParams& params) {
  return static_cast<std::uint64_t>(bits) * params.int_dim() + ints;
}

/// Coordinates in which a DenseState's amplitudes are expressed.
///   standard: amplitude on |b, x>
///   hybrid:   amplitude on |b>|chi_l>, bits standard and integers Fourier
enum class Frame { standard, hybrid };

enum class Direction { forward, inverse };

struct DenseState {
  DihedralParams params;
  Frame frame = Frame::standard;
  std::vector<Complex> amps;

  static DenseState zero(const DihedralParams& params, Frame frame = Frame::standard);
  static DenseState basis(const DihedralParams& params, std::uint64_t index,
                          Frame frame = Frame::standard);

  double norm() const;
};

/// Applies QFT_N to every integer register of the amplitude array. The forward
/// kernel is omega_N^{+ij}/sqrt(N), i.e. |l> -> |chi_l>. The frame tag is left
/// unchanged: this is an operator, not a change of coordinates.
DenseState frame_transform(const DenseState& state, Direction direction);

/// Change of coordinates between frames (no-op if already in `target`).
DenseState to_frame(const DenseState& state, Frame target);

/// <a|b>, conjugate-linear in the left argument.
Complex inner_product(const DenseState& a, const DenseState& b);
Complex inner_product(std::span<const Complex> a, std::span<const Complex> b);

double norm(std::span<const Complex> v);

}  // namespace dcl
