#include "blochflow/report_json.hpp"
#include "blochflow/verify.hpp"
#include "blochflow/witness.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

namespace bf = blochflow;

namespace {

bf::WitnessConfig config(double t_max = 10.0, std::size_t n = 201) {
  bf::WitnessConfig cfg;
  cfg.t_max = t_max;
  cfg.n_times = n;
  return cfg;
}

}  // namespace

TEST(Trajectory, GadOscillatesAtQuarterBias) {
  const auto s = bf::distance_trajectory(bf::family_gad(0.1, 4), {1, 0, 0}, {0, 1, 0}, 0.25, bf::time_grid(5.0, 500));
  ASSERT_EQ(s.size(), 500u);
  std::size_t runs = 0;
  bool rising = false;
  for (std::size_t k = 1; k < s.size(); ++k) {
    const bool up = s.values[k] - s.values[k - 1] > 1e-9;
    runs += up && !rising;
    rising = up;
  }
  EXPECT_EQ(runs, 9u);  // counted independently with numpy
}

TEST(Trajectory, IsotropicSmallRadiusIsFlat) {
  const auto s = bf::distance_trajectory(bf::family_isotropic_decay(0.1), {0, 0, 0.4}, {0, 0, -0.4}, 0.25,
                                         bf::time_grid(30.0, 300));
  for (double v : s.values) EXPECT_NEAR(v, 0.5, 1e-12);
}

TEST(Trajectory, SpinEquatorialPair) {
  const auto grid = bf::time_grid(10.0, 500);
  const auto s = bf::distance_trajectory(bf::family_spin_cosine(1.25), {0, 1, 0}, {0, -1, 0}, 0.25, grid);
  for (std::size_t k = 0; k < grid.size(); ++k)
    EXPECT_NEAR(s.values[k], std::max(std::abs(std::cos(1.25 * grid[k])), 0.5), 1e-12);
}

TEST(Trajectory, HalfBiasIsTraceDistance) {
  const auto fam = bf::family_gad(0.3, 2.0);
  const auto grid = bf::time_grid(6.0, 100);
  const bf::BlochVector a(0.2, -0.5, 0.3), b(-0.1, 0.4, 0.6);
  const auto s = bf::distance_trajectory(fam, a, b, 0.5, grid);
  for (std::size_t k = 0; k < grid.size(); ++k)
    EXPECT_NEAR(s.values[k], bf::trace_distance(bf::apply(fam(grid[k]), a), bf::apply(fam(grid[k]), b)), 1e-15);
}

TEST(Witness, Gad) {
  const auto fam = bf::family_gad(0.1, 4);
  EXPECT_FALSE(bf::blp_witness(fam, config()));
  const auto rec = bf::gblp_witness(fam, config());
  ASSERT_TRUE(rec);
  EXPECT_GT(rec->D2 - rec->D1, 1e-9);
  EXPECT_LT(rec->t1, rec->t2);
  EXPECT_NE(rec->p, 0.5);
  EXPECT_NEAR(bf::generalized_distance(bf::evolved_helstrom_vector(fam, rec->t2, rec->r1, rec->r2, rec->p)), rec->D2,
              1e-15);
}

TEST(Witness, IsotropicHasNone) {
  const auto fam = bf::family_isotropic_decay(0.1);
  auto cfg = config();
  cfg.pairs = {bf::PairSourceKind::Default, 50, 3};
  EXPECT_FALSE(bf::blp_witness(fam, cfg));
  EXPECT_FALSE(bf::gblp_witness(fam, cfg));
  EXPECT_EQ(bf::nm_measure(fam, cfg, bf::WitnessMode::BLP), 0.0);
  EXPECT_EQ(bf::nm_measure(fam, cfg, bf::WitnessMode::GBLP), 0.0);
}

TEST(Witness, SpinHasBlpRecord) {
  const auto fam = bf::family_spin_cosine(1.25);
  const auto rec = bf::blp_witness(fam, config());
  ASSERT_TRUE(rec);
  EXPECT_EQ(rec->p, 0.5);
  EXPECT_GT(bf::nm_measure(fam, config(), bf::WitnessMode::BLP), 0.0);
}

TEST(Witness, NmMeasureMatchesWitnessOutcome) {
  const auto gad = bf::family_gad(0.1, 4);
  EXPECT_EQ(bf::nm_measure(gad, config(), bf::WitnessMode::BLP), 0.0);
  EXPECT_GT(bf::nm_measure(gad, config(), bf::WitnessMode::GBLP), 0.0);
}

TEST(Witness, HalfOnlyGridReducesToBlp) {
  for (const auto& fam : {bf::family_gad(0.1, 4), bf::family_spin_cosine(1.25), bf::family_isotropic_decay(0.1),
                          bf::family_collapse_shift(0.7)}) {
    auto cfg = config();
    cfg.p_grid = {0.5};
    const auto g = bf::gblp_witness(fam, cfg);
    const auto b = bf::blp_witness(fam, cfg);
    ASSERT_EQ(g.has_value(), b.has_value()) << fam.name;
    if (g) {
      EXPECT_EQ(bf::to_json(*g).dump(), bf::to_json(*b).dump());
    }
  }
}

TEST(Witness, PositiveStepFamiliesShowNoIncrease) {
  // Families whose every grid step passes is_positive cannot raise the distance.
  auto cfg = config(8.0, 81);
  cfg.pairs = {bf::PairSourceKind::Default, 20, 5};
  for (const auto& fam : {bf::family_isotropic_decay(0.2), bf::family_collapse_shift(0.7), bf::family_gad(0.2, 0.0)}) {
    const auto grid = bf::time_grid(cfg.t_max, cfg.n_times);
    for (std::size_t k = 0; k + 1 < grid.size(); ++k)
      ASSERT_TRUE(bf::is_positive(bf::intermediate(fam, grid[k], grid[k + 1])).positive);
    EXPECT_FALSE(bf::gblp_witness(fam, cfg)) << fam.name;
  }
}

TEST(Witness, ParallelScanIsDeterministic) {
  auto cfg = config();
  cfg.pairs = {bf::PairSourceKind::Default, 30, 99};
  auto par = cfg;
  par.threads = 4;
  const auto fam = bf::family_gad(0.1, 4);
  EXPECT_EQ(bf::to_json(bf::gblp_witness(fam, cfg)).dump(), bf::to_json(bf::gblp_witness(fam, par)).dump());
  EXPECT_EQ(bf::nm_measure(fam, cfg, bf::WitnessMode::GBLP), bf::nm_measure(fam, par, bf::WitnessMode::GBLP));
}

TEST(Witness, ConfigValidation) {
  const auto fam = bf::family_gad(0.1, 4);
  auto cfg = config();
  cfg.epsilon = 0.0;
  EXPECT_THROW(bf::blp_witness(fam, cfg), std::invalid_argument);
  cfg = config();
  cfg.p_grid.clear();
  EXPECT_THROW(bf::gblp_witness(fam, cfg), std::invalid_argument);
  cfg = config(10.0, 5);
  EXPECT_THROW(bf::gblp_witness(fam, cfg), std::invalid_argument);
  cfg = config();
  cfg.p_grid = {0.5, 1.2};
  EXPECT_THROW(bf::gblp_witness(fam, cfg), std::invalid_argument);
}

TEST(PairSources, Sizes) {
  EXPECT_EQ(bf::scan_pairs({}).size(), 15u + 16u);
  EXPECT_EQ(bf::scan_pairs({bf::PairSourceKind::Default, 10, 1}).size(), 41u);
  EXPECT_EQ(bf::scan_pairs({bf::PairSourceKind::Random, 7, 1}).size(), 7u);
  EXPECT_EQ(bf::scan_pairs({bf::PairSourceKind::AntipodalSweep}).size(), 16u);
  EXPECT_EQ(bf::scan_pairs({bf::PairSourceKind::FigurePairs}).size(), 7u);
  for (const auto& pr : bf::scan_pairs({bf::PairSourceKind::Random, 200, 4})) {
    EXPECT_TRUE(bf::is_physical(pr.r1));
    EXPECT_TRUE(bf::is_physical(pr.r2));
  }
}

TEST(Theorem1, Examples) {
  const auto iso = bf::theorem1_check(bf::family_isotropic_decay(0.1), config());
  EXPECT_TRUE(iso.consistent);
  EXPECT_FALSE(iso.blp);
  EXPECT_FALSE(iso.gblp);

  const auto spin = bf::theorem1_check(bf::family_spin_cosine(1.25), config());
  EXPECT_TRUE(spin.consistent);
  ASSERT_TRUE(spin.blp);
  ASSERT_TRUE(spin.gblp);
  ASSERT_TRUE(spin.converted_blp);
  EXPECT_GT(spin.converted_blp->D2, spin.converted_blp->D1);
  ASSERT_TRUE(spin.reemitted_gblp);
  EXPECT_EQ(spin.reemitted_gblp->D1, spin.blp->D1);
  EXPECT_EQ(spin.reemitted_gblp->D2, spin.blp->D2);

  EXPECT_THROW(bf::theorem1_check(bf::family_gad(0.1, 4), config()), bf::NonUnitalInput);
}

TEST(Theorem1, ConversionKeepsIntervalAndRescalesStates) {
  const auto fam = bf::family_spin_cosine(1.25);
  const bf::WitnessRecord rec{{1, 0, 0}, {0, 1, 0}, 0.25, 1.3, 1.4, 0.0, 0.0};
  const auto c = bf::convert_to_blp(fam, rec);
  EXPECT_TRUE(c.r1.isApprox(Eigen::Vector3d(0.25, 0, 0)));
  EXPECT_TRUE(c.r2.isApprox(Eigen::Vector3d(0, 0.75, 0)));
  EXPECT_EQ(c.t1, 1.3);
  EXPECT_EQ(c.t2, 1.4);
  EXPECT_DOUBLE_EQ(c.D1, 0.5 * bf::evolved_helstrom_vector(fam, 1.3, {1, 0, 0}, {0, 1, 0}, 0.25).w.norm());
}

TEST(Theorem1, RandomUnitalFamilies) {
  std::mt19937_64 rng(42);
  int nm = 0;
  for (int i = 0; i < 100; ++i) {
    const auto fam = bf::random_unital_family(rng);
    EXPECT_LT(bf::channel_distance(fam(0.0), bf::AffineChannel::identity()), 1e-12);
    const auto res = bf::theorem1_check(fam, config());
    EXPECT_TRUE(res.consistent) << "family " << i << ": " << res.detail;
    nm += res.gblp.has_value();
  }
  EXPECT_GT(nm, 0);
  EXPECT_LT(nm, 100);
}

TEST(Theorem2, Table) {
  const auto grid = bf::uniform_grid(10.0, 200);
  for (const auto& row : bf::theorem2_table()) {
    SCOPED_TRACE(row.label);
    const auto j = bf::theorem2_classifier(row.family, config(), grid);
    EXPECT_EQ(j.unital, row.unital);
    EXPECT_EQ(j.blp_nm, row.blp_nm);
    EXPECT_EQ(j.gblp_nm, row.gblp_nm);
    EXPECT_EQ(j.divisibility, row.divisibility);
    EXPECT_EQ(j.non_invertible_flagged, row.non_invertible_flagged);
    EXPECT_TRUE(j.consistent());
  }
}

TEST(Theorem2, ReportsInconsistentScans) {
  // A coarse scan that misses the oscillation while the classifier still sees non-P steps.
  bf::WitnessConfig cfg = config(10.0, 10);
  cfg.pairs = {bf::PairSourceKind::Random, 1, 0};
  cfg.p_grid = {0.5};
  try {
    bf::theorem2_classifier(bf::family_gad(0.1, 4), cfg, bf::uniform_grid(10.0, 200));
    FAIL() << "expected InconsistentScan";
  } catch (const bf::InconsistentScan& e) {
    EXPECT_FALSE(e.joint().consistent());
    EXPECT_EQ(e.joint().divisibility, bf::DivisibilityClass::NonPDivisible);
  }
}

TEST(FalseFlags, Demos) {
  const auto demos = bf::false_flag_demos();
  ASSERT_EQ(demos.size(), 3u);
  for (const auto& d : demos) {
    SCOPED_TRACE(d.name);
    EXPECT_LT(d.max_deviation, 1e-12);
  }
  for (double v : demos[0].series.values) EXPECT_DOUBLE_EQ(v, 0.5);
  for (double v : demos[1].series.values) EXPECT_NEAR(v, 0.5, 1e-12);
  bool plateau = false;
  for (double v : demos[2].series.values) plateau |= v == 0.5;
  EXPECT_TRUE(plateau);
  double pq = 0, pqc = 0;
  for (const auto& [k, v] : demos[0].notes) {
    if (k == "abs_p_minus_q") pq = v;
    if (k == "abs_p_minus_q_times_c") pqc = v;
  }
  EXPECT_DOUBLE_EQ(pq, 0.5);
  EXPECT_DOUBLE_EQ(pqc, 0.35);
}

TEST(Verify, ContractionSuitePasses) {
  const auto res = bf::verify_contraction(7, 50);
  EXPECT_TRUE(res.passed()) << res.properties.front().detail;
}

TEST(Verify, UnknownSuite) { EXPECT_THROW(bf::run_verify("nope", 1), std::invalid_argument); }
