#include "dcl/unitaries.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <numeric>
#include <tuple>

namespace dcl {

std::string to_string(AssignmentStrategy strategy) {
  switch (strategy) {
    case AssignmentStrategy::canonical: return "canonical";
    case AssignmentStrategy::random_permutation: return "random-permutation";
    case AssignmentStrategy::adversarial: return "adversarial";
  }
  return "unknown";
}

BasisChangeUnitary::BasisChangeUnitary(std::shared_ptr<const LabeledBasis> basis,
                                       StandardAssignment assignment)
    : basis_(std::move(basis)), assignment_(std::move(assignment)) {
  if (!basis_) throw InvalidArgument("BasisChangeUnitary: null basis");
  const std::size_t n = basis_->size();
  if (assignment_.target.size() != n || assignment_.source.size() != n) {
    throw InvalidArgument("BasisChangeUnitary: assignment size does not match basis");
  }
  for (std::size_t e = 0; e < n; ++e) {
    const std::uint64_t t = assignment_.target[e];
    if (t >= n || assignment_.source[t] != e) {
      throw InvalidArgument("BasisChangeUnitary: assignment is not a bijection");
    }
  }
}

std::vector<StandardTerm> BasisChangeUnitary::apply(const std::vector<LabelTerm>& state) const {
  std::map<std::uint64_t, Complex> acc;
  for (const LabelTerm& term : state) {
    if (term.entry >= basis_->size()) throw InvalidArgument("U_S apply: entry out of range");
    acc[assignment_.target[term.entry]] += term.amp;
  }
  std::vector<StandardTerm> out;
  out.reserve(acc.size());
  for (const auto& [index, amp] : acc) out.push_back({index, amp});
  return out;
}

std::vector<LabelTerm> BasisChangeUnitary::adjoint(const std::vector<StandardTerm>& state) const {
  std::map<std::size_t, Complex> acc;
  for (const StandardTerm& term : state) {
    if (term.index >= assignment_.source.size()) throw InvalidArgument("U_S adjoint: index out of range");
    acc[assignment_.source[term.index]] += term.amp;
  }
  std::vector<LabelTerm> out;
  out.reserve(acc.size());
  for (const auto& [entry, amp] : acc) out.push_back({entry, amp});
  return out;
}

IndicatorUnitary::IndicatorUnitary(std::shared_ptr<const LabeledBasis> basis) : basis_(std::move(basis)) {
  if (!basis_) throw InvalidArgument("IndicatorUnitary: null basis");
}

std::vector<IndicatorTerm> IndicatorUnitary::apply(const std::vector<LabelTerm>& state) const {
  std::map<std::size_t, Complex> acc;
  for (const LabelTerm& term : state) {
    if (term.entry >= basis_->size()) throw InvalidArgument("U_C apply: entry out of range");
    acc[term.entry] += term.amp;
  }
  std::vector<IndicatorTerm> out;
  out.reserve(acc.size());
  for (const auto& [entry, amp] : acc) out.push_back({indicator(entry), entry, amp});
  return out;
}

std::vector<LabelTerm> IndicatorUnitary::adjoint(const std::vector<IndicatorTerm>& state) const {
  std::map<std::size_t, Complex> acc;
  for (const IndicatorTerm& term : state) {
    if (term.workspace >= basis_->size()) throw InvalidArgument("U_C adjoint: workspace label out of range");
    // |1>|psi_e> for an m = 0 entry (or |0>|psi_e> for m >= 1) lies outside
    // the image of U_C applied to workspace-zero inputs.
    if (term.indicator != indicator(term.workspace)) {
      throw InvalidArgument("U_C adjoint: indicator does not match workspace label");
    }
    acc[term.workspace] += term.amp;
  }
  std::vector<LabelTerm> out;
  out.reserve(acc.size());
  for (const auto& [entry, amp] : acc) out.push_back({entry, amp});
  return out;
}

BasisChangeUnitary build_US(std::shared_ptr<const LabeledBasis> basis, AssignmentStrategy strategy,
                            Rng* rng) {
  if (!basis) throw InvalidArgument("build_US: null basis");
  if (!basis->complete()) throw InvalidArgument("build_US: basis must have (2N)^k entries");
  if (strategy == AssignmentStrategy::adversarial && basis->family() != BasisFamily::hat) {
    throw InvalidArgument("build_US: adversarial strategy requires the hat basis");
  }
  if (strategy == AssignmentStrategy::random_permutation && rng == nullptr) {
    throw InvalidArgument("build_US: random-permutation strategy requires an rng");
  }
  const std::size_t n = basis->size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const BasisLabel& x = basis->entry(a).label;
    const BasisLabel& y = basis->entry(b).label;
    return std::tie(x.m, x.p, x.l) < std::tie(y.m, y.p, y.l);
  });
  if (strategy == AssignmentStrategy::random_permutation) {
    for (std::size_t i = n; i > 1; --i) {
      const auto j = static_cast<std::size_t>(rng->uniform_below(i));
      std::swap(order[i - 1], order[j]);
    }
  }
  StandardAssignment assignment{strategy, std::vector<std::uint64_t>(n), std::vector<std::size_t>(n)};
  for (std::size_t rank = 0; rank < n; ++rank) {
    assignment.target[order[rank]] = rank;
    assignment.source[rank] = order[rank];
  }
  return BasisChangeUnitary(std::move(basis), std::move(assignment));
}

BasisChangeUnitary build_adversarial_US(const DihedralParams& params) {
  return build_US(std::make_shared<const LabeledBasis>(build_hat_basis(params)),
                  AssignmentStrategy::adversarial);
}

IndicatorUnitary build_UC(std::shared_ptr<const LabeledBasis> basis) {
  if (!basis) throw InvalidArgument("build_UC: null basis");
  if (!basis->complete()) throw InvalidArgument("build_UC: basis must have (2N)^k entries");
  return IndicatorUnitary(std::move(basis));
}

Eigen::MatrixXcd materialize_dense(const BasisChangeUnitary& u, std::uint64_t column_budget) {
  const DihedralParams& params = u.basis().params();
  if (params.full_dim() > column_budget) {
    throw ResourceLimit("materialize_dense: (2N)^k exceeds the dense column budget");
  }
  const auto dim = static_cast<Eigen::Index>(params.full_dim());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::size_t e = 0; e < u.basis().size(); ++e) {
    const DenseState v = to_dense(u.basis().entry(e), params);
    const auto row = static_cast<Eigen::Index>(u.assignment().target[e]);
    for (Eigen::Index c = 0; c < dim; ++c) m(row, c) = std::conj(v.amps[static_cast<std::size_t>(c)]);
  }
  return m;
}

IndicatorLayout indicator_layout(const DihedralParams& params) {
  return {params.full_dim(), std::bit_ceil(params.full_dim())};
}

Eigen::MatrixXcd materialize_dense(const IndicatorUnitary& u, std::uint64_t column_budget) {
  const DihedralParams& params = u.basis().params();
  const IndicatorLayout layout = indicator_layout(params);
  if (layout.total_dim() > column_budget) {
    throw ResourceLimit("materialize_dense: indicator layout exceeds the dense column budget");
  }
  const auto total = static_cast<Eigen::Index>(layout.total_dim());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(total, total);

  std::vector<DenseState> vectors;
  vectors.reserve(u.basis().size());
  for (const BasisVector& v : u.basis().entries()) vectors.push_back(to_dense(v, params));

  std::vector<bool> used(layout.total_dim(), false);
  for (std::size_t e = 0; e < vectors.size(); ++e) used[layout.index(u.indicator(e), 0, e)] = true;
  std::uint64_t next_free = 0;
  auto take_free = [&] {
    while (used[next_free]) ++next_free;
    used[next_free] = true;
    return next_free;
  };

  for (std::size_t e = 0; e < vectors.size(); ++e) {
    for (std::uint32_t ind = 0; ind < 2; ++ind) {
      for (std::uint64_t ws = 0; ws < layout.workspace_dim; ++ws) {
        const std::uint64_t out =
            (ind == 0 && ws == 0) ? layout.index(u.indicator(e), 0, e) : take_free();
        for (std::uint64_t main = 0; main < layout.main_dim; ++main) {
          m(static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(layout.index(ind, main, ws))) =
              std::conj(vectors[e].amps[main]);
        }
      }
    }
  }
  return m;
}

double unitarity_deviation(const Eigen::MatrixXcd& u) {
  const Eigen::MatrixXcd g = u.adjoint() * u;
  return (g - Eigen::MatrixXcd::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

}  // namespace dcl
