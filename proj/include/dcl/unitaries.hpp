#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "dcl/coset_basis.hpp"
#include "dcl/rng.hpp"

namespace dcl {

/// Amplitude on one basis entry (index into LabeledBasis::entries()).
struct LabelTerm {
  std::size_t entry = 0;
  Complex amp;
};

/// Amplitude on one standard-basis state of the (2N)^k space.
struct StandardTerm {
  std::uint64_t index = 0;
  Complex amp;
};

/// Amplitude on |indicator>|psi_label>, where the workspace state psi is
/// identified by the basis entry it came from.
struct IndicatorTerm {
  std::uint32_t indicator = 0;
  std::size_t workspace = 0;
  Complex amp;
};

enum class AssignmentStrategy { canonical, random_permutation, adversarial };

std::string to_string(AssignmentStrategy strategy);

/// Bijection from basis entries to standard-basis indices.
///
/// canonical: entries ranked in lexicographic (m, p, l) order; rank r goes to
///            standard index r.
/// random_permutation: a seeded uniform shuffle of the canonical ranks.
/// adversarial: the canonical ranking applied to a hat-family basis.
struct StandardAssignment {
  AssignmentStrategy strategy = AssignmentStrategy::canonical;
  std::vector<std::uint64_t> target;  // entry -> standard index
  std::vector<std::size_t> source;    // standard index -> entry
};

/// U_S: maps every basis vector to a distinct standard basis state.
class BasisChangeUnitary {
 public:
  BasisChangeUnitary(std::shared_ptr<const LabeledBasis> basis, StandardAssignment assignment);

  const LabeledBasis& basis() const noexcept { return *basis_; }
  std::shared_ptr<const LabeledBasis> basis_ptr() const noexcept { return basis_; }
  const StandardAssignment& assignment() const noexcept { return assignment_; }

  std::vector<StandardTerm> apply(const std::vector<LabelTerm>& state) const;
  std::vector<LabelTerm> adjoint(const std::vector<StandardTerm>& state) const;

 private:
  std::shared_ptr<const LabeledBasis> basis_;
  StandardAssignment assignment_;
};

/// U_C: |S^m_{l,p}>|chi_l>|0> -> |[m != 0]>|psi_{l,p,m}>. The workspace states
/// psi are abstract orthonormal labels, one per basis entry.
class IndicatorUnitary {
 public:
  explicit IndicatorUnitary(std::shared_ptr<const LabeledBasis> basis);

  const LabeledBasis& basis() const noexcept { return *basis_; }
  std::shared_ptr<const LabeledBasis> basis_ptr() const noexcept { return basis_; }

  std::uint32_t indicator(std::size_t entry) const { return basis_->entry(entry).label.m == 0 ? 0u : 1u; }

  std::vector<IndicatorTerm> apply(const std::vector<LabelTerm>& state) const;
  std::vector<LabelTerm> adjoint(const std::vector<IndicatorTerm>& state) const;

 private:
  std::shared_ptr<const LabeledBasis> basis_;
};

/// Throws InvalidArgument if the basis is incomplete, or if the adversarial
/// strategy is requested over a non-hat basis. `rng` is required for
/// random_permutation.
BasisChangeUnitary build_US(std::shared_ptr<const LabeledBasis> basis, AssignmentStrategy strategy,
                            Rng* rng = nullptr);

/// U_S under the adversarial strategy: canonical assignment over the hat basis.
BasisChangeUnitary build_adversarial_US(const DihedralParams& params);

IndicatorUnitary build_UC(std::shared_ptr<const LabeledBasis> basis);

/// Default column budget for dense materialization.
inline constexpr std::uint64_t kDenseColumnBudget = 4096;

/// Full-dimension matrix of U_S in the standard frame.
Eigen::MatrixXcd materialize_dense(const BasisChangeUnitary& u,
                                   std::uint64_t column_budget = kDenseColumnBudget);

/// Register layout of the dense U_C: index = (indicator * (2N)^k + main) * W + workspace,
/// with W = 2^ceil(log2 (2N)^k).
struct IndicatorLayout {
  std::uint64_t main_dim = 0;
  std::uint64_t workspace_dim = 0;
  std::uint64_t total_dim() const { return 2 * main_dim * workspace_dim; }
  std::uint64_t index(std::uint32_t indicator, std::uint64_t main, std::uint64_t workspace) const {
    return (indicator * main_dim + main) * workspace_dim + workspace;
  }
};

IndicatorLayout indicator_layout(const DihedralParams& params);

/// Dense U_C. On inputs with indicator and workspace zero it sends the basis
/// vector of entry e to |indicator(e)>|0>_main|e>_workspace; the remaining
/// inputs are paired with the unused outputs in index order.
Eigen::MatrixXcd materialize_dense(const IndicatorUnitary& u,
                                   std::uint64_t column_budget = kDenseColumnBudget);

/// max |U^dagger U - I| entry.
double unitarity_deviation(const Eigen::MatrixXcd& u);

}  // namespace dcl
