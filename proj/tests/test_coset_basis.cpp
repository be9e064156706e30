#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <tuple>

#include "dcl/coset_basis.hpp"
#include "dcl/subset_sum.hpp"
#include "support.hpp"

using namespace dcl;
using dcl::testing::direct_omega;

namespace {

const double kS = 1.0 / std::sqrt(2.0);

// Dense vector of sum_j amp_j |b^(j)> (x) QFT|l>, built from the transform
// rather than the closed form used by to_dense.
DenseState dense_oracle(const BasisVector& v, const DihedralParams& p) {
  DenseState out = DenseState::zero(p);
  for (const SupportTerm& t : v.support) {
    const DenseState chi = frame_transform(DenseState::basis(p, flat_index(t.bits, v.label.l, p)), Direction::forward);
    for (std::size_t i = 0; i < out.amps.size(); ++i) out.amps[i] += t.amp * chi.amps[i];
  }
  return out;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> grid() { return {{2, 1}, {2, 2}, {3, 2}, {4, 2}, {2, 3}, {3, 3}}; }

}  // namespace

TEST(CosetState, DeclaredExamples) {
  const DihedralParams p(2, 1);
  const DenseState a = build_coset_state({0, {0}}, p);
  EXPECT_LE(dcl::testing::max_abs_diff(a.amps, {kS, 0, kS, 0}), 1e-15);
  const DenseState b = build_coset_state({1, {0}}, p);
  EXPECT_LE(dcl::testing::max_abs_diff(b.amps, {kS, 0, 0, kS}), 1e-15);
}

TEST(CosetState, UnitNormWithTwoToTheKEqualAmplitudes) {
  Rng rng(4);
  const DihedralParams p(5, 3);
  for (int t = 0; t < 50; ++t) {
    CosetStateSpec spec{static_cast<std::uint32_t>(rng.uniform_below(5)), {}};
    for (int r = 0; r < 3; ++r) spec.xs.push_back(static_cast<std::uint32_t>(rng.uniform_below(5)));
    const DenseState s = build_coset_state(spec, p);
    EXPECT_NEAR(s.norm(), 1.0, 1e-12);
    int nonzero = 0;
    for (const Complex& a : s.amps) {
      if (a != Complex{}) {
        ++nonzero;
        EXPECT_NEAR(a.real(), std::pow(2.0, -1.5), 1e-15);
      }
    }
    EXPECT_EQ(nonzero, 8);
  }
  EXPECT_THROW(build_coset_state({5, {0, 0, 0}}, p), InvalidArgument);
  EXPECT_THROW(build_coset_state({0, {0, 0}}, p), InvalidArgument);
}

TEST(BasisVector, DeclaredExamples) {
  const DihedralParams p1(2, 1);
  const std::vector<std::uint32_t> l0 = {0};
  const BasisVector v = build_basis_vector(l0, 0, 1, p1);
  ASSERT_EQ(v.support.size(), 2u);
  EXPECT_EQ(v.support[0].bits, 0u);
  EXPECT_EQ(v.support[1].bits, 1u);
  EXPECT_LE(std::abs(v.support[0].amp - kS), 1e-15);
  EXPECT_LE(std::abs(v.support[1].amp + kS), 1e-15);

  const DihedralParams p2(2, 2);
  const std::vector<std::uint32_t> l11 = {1, 1};
  const BasisVector w = build_basis_vector(l11, 0, 1, p2);
  ASSERT_EQ(w.support.size(), 2u);
  EXPECT_EQ(w.support[0].bits, 0b00u);
  EXPECT_EQ(w.support[1].bits, 0b11u);
  EXPECT_LE(std::abs(w.support[0].amp - kS), 1e-15);
  EXPECT_LE(std::abs(w.support[1].amp + kS), 1e-15);
  EXPECT_EQ(w.label.l, pack_ints(l11, 2));

  const BasisVector z = build_basis_vector(l11, 0, 0, p2);
  for (const auto& t : z.support) EXPECT_LE(std::abs(t.amp - kS), 1e-15);
}

TEST(BasisVector, Errors) {
  const DihedralParams p(4, 2);
  const std::vector<std::uint32_t> l = {2, 2};
  EXPECT_THROW(build_basis_vector(l, 1, 0, p), EmptySolutionSet);
  EXPECT_THROW(build_basis_vector(l, 0, 2, p), InvalidArgument);
}

TEST(BasisVector, AmplitudesFollowTheClosedForm) {
  Rng rng(21);
  const DihedralParams p(3, 4);
  for (int t = 0; t < 40; ++t) {
    std::vector<std::uint32_t> l(4);
    for (auto& x : l) x = static_cast<std::uint32_t>(rng.uniform_below(3));
    const auto b = static_cast<std::uint32_t>(rng.uniform_below(16));
    const std::uint32_t target = subset_sum(l, b, 3);
    const SolutionSet sols = enumerate_solutions({l, target, 3});
    const std::size_t size = sols.size();
    const auto m = static_cast<std::uint32_t>(rng.uniform_below(size));
    const BasisVector v = build_basis_vector(l, target, m, p);
    ASSERT_EQ(v.support.size(), size);
    double norm = 0.0;
    for (std::size_t j = 0; j < size; ++j) {
      EXPECT_EQ(v.support[j].bits, sols.solutions[j]);
      EXPECT_LE(std::abs(v.support[j].amp - direct_omega(double(size), double(m) * j) / std::sqrt(double(size))),
                1e-12);
      norm += std::norm(v.support[j].amp);
    }
    EXPECT_NEAR(norm, 1.0, 1e-12);
  }
}

TEST(EnumerateBasis, CountsAndUniqueLabels) {
  const LabeledBasis b21 = enumerate_basis(DihedralParams(2, 1));
  EXPECT_EQ(b21.b0_size(), 3u);
  EXPECT_EQ(b21.bperp_size(), 1u);
  for (auto [n, k] : grid()) {
    const DihedralParams p(n, k);
    const LabeledBasis all = enumerate_basis(p);
    EXPECT_EQ(all.size(), p.full_dim());
    EXPECT_TRUE(all.complete());
    EXPECT_EQ(enumerate_basis(p, BasisPart::b0).size(), all.b0_size());
    EXPECT_EQ(enumerate_basis(p, BasisPart::bperp).size(), all.bperp_size());
    std::set<std::tuple<std::uint64_t, std::uint32_t, std::uint32_t>> labels;
    for (std::size_t e = 0; e < all.size(); ++e) {
      const BasisLabel& lab = all.entry(e).label;
      labels.insert({lab.l, lab.p, lab.m});
      EXPECT_EQ(all.find(lab), e);
    }
    EXPECT_EQ(labels.size(), all.size());
  }
}

TEST(EnumerateBasis, SinglePerpVectorAtSmallestSize) {
  const DihedralParams p(2, 1);
  const LabeledBasis perp = enumerate_basis(p, BasisPart::bperp);
  ASSERT_EQ(perp.size(), 1u);
  const DenseState d = to_dense(perp.entry(0), p);
  const std::vector<Complex> expect = {0.5, 0.5, -0.5, -0.5};
  EXPECT_LE(dcl::testing::max_abs_diff(d.amps, expect), 1e-15);
}

TEST(Gram, DenseAndSparseAgreeOnIdentity) {
  for (auto [n, k] : grid()) {
    const LabeledBasis b = enumerate_basis(DihedralParams(n, k));
    EXPECT_LE(gram_check_dense(b).max_deviation, 1e-10);
    EXPECT_LE(gram_check_sparse(b).max_deviation, 1e-10);
  }
  EXPECT_EQ(gram_check_dense(enumerate_basis(DihedralParams(3, 2))).size, 36u);
}

TEST(HybridDense, ClosedFormMatchesTransformOracle) {
  Rng rng(13);
  const DihedralParams p(3, 3);
  const LabeledBasis b = enumerate_basis(p);
  for (int t = 0; t < 20; ++t) {
    const BasisVector& v = b.entry(rng.uniform_below(b.size()));
    EXPECT_LE(dcl::testing::max_abs_diff(to_dense(v, p).amps, dense_oracle(v, p).amps), 1e-12);
  }
}

TEST(PhaseIdentity, StandardStateReconstructedFromItsBlock) {
  const DihedralParams p(4, 4);
  const LabeledBasis b = enumerate_basis(p);
  for (const SolutionBlock& block : b.blocks()) {
    const std::size_t size = block.solutions.size();
    for (std::size_t j0 = 0; j0 < size; ++j0) {
      std::vector<Complex> rebuilt(size);
      for (std::size_t m = 0; m < size; ++m) {
        const Complex c = direct_omega(double(size), -double(j0) * m) / std::sqrt(double(size));
        const BasisVector& v = b.entry(block.first_entry + m);
        ASSERT_EQ(v.label.m, m);
        for (std::size_t j = 0; j < size; ++j) rebuilt[j] += c * v.support[j].amp;
      }
      for (std::size_t j = 0; j < size; ++j) {
        EXPECT_LE(std::abs(rebuilt[j] - (j == j0 ? 1.0 : 0.0)), 1e-12);
      }
    }
  }
}

TEST(CosetOrthogonality, PerpVectorsAnnihilateCosetStates) {
  for (auto [n, k] : grid()) {
    const OrthogonalityReport r = verify_coset_orthogonality(DihedralParams(n, k));
    EXPECT_EQ(r.coset_states, std::pow(n, k + 1));
    EXPECT_LE(r.max_abs_inner, 1e-10) << "N=" << n << " k=" << k;
    EXPECT_GT(r.max_abs_inner_b0, 0.1);
  }
}

TEST(CosetSpan, RankEqualsB0AndResidualsVanish) {
  const SpanReport small = coset_span_check(DihedralParams(2, 1));
  EXPECT_EQ(small.rank, 3u);
  EXPECT_EQ(small.b0_size, 3u);
  for (auto [n, k] : grid()) {
    const SpanReport r = coset_span_check(DihedralParams(n, k));
    EXPECT_EQ(r.rank, r.b0_size) << "N=" << n << " k=" << k;
    EXPECT_LE(r.max_coset_residual, 1e-10);
    EXPECT_LE(r.max_b0_residual, 1e-10);
    EXPECT_LE(r.max_perp_projection, 1e-10);
  }
}

TEST(TildeBasis, IdentityRotationReproducesCanonical) {
  const DihedralParams p(3, 3);
  const LabeledBasis canonical = enumerate_basis(p);
  const LabeledBasis same = build_tilde_basis(p, identity_rotation());
  ASSERT_EQ(same.size(), canonical.size());
  for (std::size_t e = 0; e < same.size(); ++e) {
    EXPECT_EQ(same.entry(e).label, canonical.entry(e).label);
    for (std::size_t j = 0; j < same.entry(e).support.size(); ++j) {
      EXPECT_EQ(same.entry(e).support[j].amp, canonical.entry(e).support[j].amp);
    }
  }
}

TEST(TildeBasis, RandomRotationsStayOrthonormalWithinTheirSpan) {
  const DihedralParams p(4, 3);
  const LabeledBasis canonical = enumerate_basis(p);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const LabeledBasis tilde = build_tilde_basis(p, random_rotation(seed));
    EXPECT_EQ(tilde.family(), BasisFamily::tilde);
    EXPECT_LE(gram_check_sparse(tilde).max_deviation, 1e-10);
    EXPECT_LE(max_span_residual(tilde, canonical), 1e-10);
    for (std::size_t e = 0; e < tilde.size(); ++e) {
      if (tilde.entry(e).label.m != 0) continue;
      for (std::size_t j = 0; j < tilde.entry(e).support.size(); ++j) {
        EXPECT_EQ(tilde.entry(e).support[j].amp, canonical.entry(e).support[j].amp);
      }
    }
  }
  const LabeledBasis again = build_tilde_basis(p, random_rotation(3));
  const LabeledBasis first = build_tilde_basis(p, random_rotation(3));
  EXPECT_EQ(again.entry(again.size() - 1).support[0].amp, first.entry(first.size() - 1).support[0].amp);
}

TEST(TildeBasis, RejectsNonUnitaryRotation) {
  const DihedralParams p(2, 2);
  const BlockRotation doubled = [](const SolutionBlock& block) {
    const auto d = static_cast<Eigen::Index>(block.solutions.size() - 1);
    return Eigen::MatrixXcd(2.0 * Eigen::MatrixXcd::Identity(d, d));
  };
  EXPECT_THROW(build_tilde_basis(p, doubled), InvalidArgument);
}

TEST(HatBasis, FirstPerpVectorOverlapsTheAnchor) {
  const DihedralParams p(4, 4);
  const LabeledBasis hat = build_hat_basis(p);
  EXPECT_EQ(hat.family(), BasisFamily::hat);
  EXPECT_LE(gram_check_sparse(hat).max_deviation, 1e-10);
  EXPECT_LE(max_span_residual(hat, enumerate_basis(p)), 1e-10);
  for (const SolutionBlock& block : hat.blocks()) {
    const double size = double(block.solutions.size());
    if (size < 2) continue;
    const BasisVector& s1 = hat.entry(block.first_entry + 1);
    ASSERT_EQ(s1.label.m, 1u);
    EXPECT_NEAR(std::norm(s1.support[0].amp), (size - 1) / size, 1e-12);
  }
}

TEST(BasisJson, SchemaAndEntries) {
  const LabeledBasis b = enumerate_basis(DihedralParams(2, 1));
  const nlohmann::json j = basis_to_json(b);
  EXPECT_EQ(j["schema"], "dcl.basis/1");
  EXPECT_EQ(j["N"], 2);
  EXPECT_EQ(j["k"], 1);
  ASSERT_EQ(j["entries"].size(), 4u);
  int perp = 0;
  for (const auto& e : j["entries"]) {
    if (e["m"] != 1) continue;
    ++perp;
    EXPECT_EQ(e["l"], nlohmann::json::array({0}));
    ASSERT_EQ(e["support"].size(), 2u);
    EXPECT_EQ(e["support"][0]["bits"], "0");
    EXPECT_EQ(e["support"][1]["bits"], "1");
    EXPECT_NEAR(e["support"][1]["re"].get<double>(), -kS, 1e-15);
  }
  EXPECT_EQ(perp, 1);
}
