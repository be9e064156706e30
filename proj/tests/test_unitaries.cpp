#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <tuple>

#include "dcl/unitaries.hpp"
#include "support.hpp"

using namespace dcl;

namespace {

std::shared_ptr<const LabeledBasis> canonical(std::uint32_t n, std::uint32_t k) {
  return std::make_shared<const LabeledBasis>(enumerate_basis(DihedralParams(n, k)));
}

std::vector<LabelTerm> random_superposition(const LabeledBasis& b, Rng& rng, std::size_t terms) {
  std::vector<LabelTerm> out;
  for (std::size_t i = 0; i < terms; ++i) {
    out.push_back({static_cast<std::size_t>(rng.uniform_below(b.size())),
                   Complex(dcl::testing::gaussian(rng), dcl::testing::gaussian(rng))});
  }
  return out;
}

// Merges duplicate entries so label states compare canonically.
std::map<std::size_t, Complex> merged(const std::vector<LabelTerm>& terms) {
  std::map<std::size_t, Complex> m;
  for (const auto& t : terms) m[t.entry] += t.amp;
  return m;
}

}  // namespace

TEST(BuildUS, CanonicalRanksFollowMPLOrder) {
  const auto basis = canonical(3, 2);
  const BasisChangeUnitary us = build_US(basis, AssignmentStrategy::canonical);
  const auto& target = us.assignment().target;
  std::vector<std::uint64_t> sorted(target.begin(), target.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::uint64_t> all(basis->size());
  std::iota(all.begin(), all.end(), 0);
  EXPECT_EQ(sorted, all);
  for (std::size_t a = 0; a < basis->size(); ++a) {
    for (std::size_t b = 0; b < basis->size(); ++b) {
      const BasisLabel& x = basis->entry(a).label;
      const BasisLabel& y = basis->entry(b).label;
      EXPECT_EQ(std::tie(x.m, x.p, x.l) < std::tie(y.m, y.p, y.l), target[a] < target[b]);
    }
  }
}

TEST(BuildUS, RandomPermutationIsReproducibleAndInjective) {
  const auto basis = canonical(3, 2);
  Rng r1(5), r2(5), r3(6);
  const BasisChangeUnitary a = build_US(basis, AssignmentStrategy::random_permutation, &r1);
  const BasisChangeUnitary b = build_US(basis, AssignmentStrategy::random_permutation, &r2);
  const BasisChangeUnitary c = build_US(basis, AssignmentStrategy::random_permutation, &r3);
  EXPECT_EQ(a.assignment().target, b.assignment().target);
  EXPECT_NE(a.assignment().target, c.assignment().target);
  std::vector<std::uint64_t> sorted = a.assignment().target;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(std::adjacent_find(sorted.begin(), sorted.end()), sorted.end());
  EXPECT_EQ(sorted.back(), basis->size() - 1);
}

TEST(BuildUS, Preconditions) {
  const auto basis = canonical(2, 2);
  EXPECT_THROW(build_US(basis, AssignmentStrategy::adversarial), InvalidArgument);
  EXPECT_THROW(build_US(basis, AssignmentStrategy::random_permutation), InvalidArgument);
  const auto partial = std::make_shared<const LabeledBasis>(enumerate_basis(DihedralParams(2, 2), BasisPart::b0));
  EXPECT_THROW(build_US(partial, AssignmentStrategy::canonical), InvalidArgument);
  EXPECT_THROW(build_UC(partial), InvalidArgument);
  const BasisChangeUnitary adv = build_adversarial_US(DihedralParams(2, 2));
  EXPECT_EQ(adv.basis().family(), BasisFamily::hat);
  EXPECT_EQ(adv.assignment().strategy, AssignmentStrategy::adversarial);
}

TEST(BuildUS, RejectsNonBijectiveAssignment) {
  const auto basis = canonical(2, 1);
  StandardAssignment bad{AssignmentStrategy::canonical, {0, 0, 1, 2}, {0, 2, 3, 1}};
  EXPECT_THROW(BasisChangeUnitary(basis, bad), InvalidArgument);
}

TEST(BuildUS, AdjointUndoesApply) {
  const auto basis = canonical(3, 3);
  Rng rng(8);
  const BasisChangeUnitary us = build_US(basis, AssignmentStrategy::random_permutation, &rng);
  for (int t = 0; t < 50; ++t) {
    const auto state = random_superposition(*basis, rng, 1 + rng.uniform_below(8));
    EXPECT_EQ(merged(us.adjoint(us.apply(state))), merged(state));
  }
}

TEST(BuildUC, IndicatorMarksPerpEntries) {
  const auto basis = canonical(3, 2);
  const IndicatorUnitary uc = build_UC(basis);
  for (std::size_t e = 0; e < basis->size(); ++e) {
    EXPECT_EQ(uc.indicator(e), basis->entry(e).label.m == 0 ? 0u : 1u);
  }
  Rng rng(2);
  for (int t = 0; t < 50; ++t) {
    const auto state = random_superposition(*basis, rng, 1 + rng.uniform_below(8));
    const auto image = uc.apply(state);
    for (const auto& term : image) EXPECT_EQ(term.indicator, uc.indicator(term.workspace));
    EXPECT_EQ(merged(uc.adjoint(image)), merged(state));
  }
  std::size_t perp = 0;
  while (basis->entry(perp).label.m == 0) ++perp;
  EXPECT_THROW(uc.adjoint({{0, perp, 1.0}}), InvalidArgument);
}

TEST(Materialize, SmallestUSHasBasisVectorsAsAdjointColumns) {
  const auto basis = canonical(2, 1);
  const BasisChangeUnitary us = build_US(basis, AssignmentStrategy::canonical);
  const Eigen::MatrixXcd m = materialize_dense(us);
  ASSERT_EQ(m.rows(), 4);
  EXPECT_LE(unitarity_deviation(m), 1e-10);
  const Eigen::MatrixXcd adj = m.adjoint();
  for (std::size_t e = 0; e < basis->size(); ++e) {
    const DenseState v = to_dense(basis->entry(e), basis->params());
    const auto col = static_cast<Eigen::Index>(us.assignment().target[e]);
    for (Eigen::Index i = 0; i < 4; ++i) EXPECT_LE(std::abs(adj(i, col) - v.amps[i]), 1e-15);
  }
}

TEST(Materialize, UnitarityAtDeskSizes) {
  Rng rng(1);
  for (auto [n, k] : {std::pair{2u, 2u}, {3u, 2u}, {2u, 3u}}) {
    const auto basis = canonical(n, k);
    EXPECT_LE(unitarity_deviation(materialize_dense(build_US(basis, AssignmentStrategy::canonical))), 1e-10);
    EXPECT_LE(unitarity_deviation(materialize_dense(build_US(basis, AssignmentStrategy::random_permutation, &rng))),
              1e-10);
  }
  const auto hat = build_adversarial_US(DihedralParams(2, 2));
  EXPECT_LE(unitarity_deviation(materialize_dense(hat)), 1e-10);
  for (auto [n, k] : {std::pair{2u, 1u}, {2u, 2u}}) {
    const IndicatorUnitary uc = build_UC(canonical(n, k));
    const Eigen::MatrixXcd m = materialize_dense(uc);
    EXPECT_EQ(static_cast<std::uint64_t>(m.rows()), indicator_layout(DihedralParams(n, k)).total_dim());
    EXPECT_LE(unitarity_deviation(m), 1e-10);
  }
}

TEST(Materialize, IndicatorImagesLandOnTheirSlots) {
  const auto basis = canonical(2, 2);
  const IndicatorUnitary uc = build_UC(basis);
  const Eigen::MatrixXcd m = materialize_dense(uc);
  const IndicatorLayout layout = indicator_layout(basis->params());
  EXPECT_EQ(layout.workspace_dim, 16u);
  for (std::size_t e = 0; e < basis->size(); ++e) {
    const DenseState v = to_dense(basis->entry(e), basis->params());
    Eigen::VectorXcd in = Eigen::VectorXcd::Zero(m.cols());
    for (std::uint64_t i = 0; i < layout.main_dim; ++i) in(layout.index(0, i, 0)) = v.amps[i];
    const Eigen::VectorXcd out = m * in;
    const auto slot = static_cast<Eigen::Index>(layout.index(uc.indicator(e), 0, e));
    EXPECT_NEAR(std::abs(out(slot)), 1.0, 1e-12);
    EXPECT_NEAR(out.squaredNorm(), 1.0, 1e-12);
  }
}

TEST(Materialize, LabelAndDenseApplicationAgree) {
  Rng rng(4);
  for (auto [n, k] : {std::pair{2u, 1u}, {2u, 2u}}) {
    const auto basis = canonical(n, k);
    const BasisChangeUnitary us = build_US(basis, AssignmentStrategy::random_permutation, &rng);
    const Eigen::MatrixXcd m = materialize_dense(us);
    for (int t = 0; t < 20; ++t) {
      const auto state = random_superposition(*basis, rng, 1 + rng.uniform_below(6));
      Eigen::VectorXcd dense = Eigen::VectorXcd::Zero(m.cols());
      for (const auto& term : state) {
        const DenseState v = to_dense(basis->entry(term.entry), basis->params());
        for (Eigen::Index i = 0; i < m.cols(); ++i) dense(i) += term.amp * v.amps[i];
      }
      const Eigen::VectorXcd image = m * dense;
      Eigen::VectorXcd label = Eigen::VectorXcd::Zero(m.cols());
      for (const auto& term : us.apply(state)) label(static_cast<Eigen::Index>(term.index)) += term.amp;
      EXPECT_LE((image - label).cwiseAbs().maxCoeff(), 1e-10);
    }
  }
}

TEST(Materialize, RespectsColumnBudget) {
  EXPECT_THROW(materialize_dense(build_US(canonical(2, 3), AssignmentStrategy::canonical), 32), ResourceLimit);
  EXPECT_THROW(materialize_dense(build_UC(canonical(3, 2))), ResourceLimit);
}
