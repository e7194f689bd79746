#include <gtest/gtest.h>

#include <map>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace coopsim;

namespace {

std::vector<double> vec(std::initializer_list<double> v) { return v; }

double coarse(const std::function<double(double, double)>& f) { return oracles::grid_max(f, 1e-3); }

}  // namespace

TEST(SlackLp, ToyStructure) {
  const auto c = fixtures::load("toy.json");
  const auto lp = build_slack_lp(c, vec({0.4}));
  EXPECT_EQ(lp.num_columns(), 3u);
  EXPECT_EQ(lp.num_constraints(), 3u);
  EXPECT_EQ(lp.columns[0].kind, ColumnKind::first_hop);
  EXPECT_EQ(lp.columns[1].kind, ColumnKind::second_hop);
  EXPECT_EQ(lp.columns[2].kind, ColumnKind::slack);
}

TEST(SlackLp, DeskColumnCount) {
  const auto c = fixtures::load("desk.json");
  std::size_t expected = 1;
  for (const auto& t : c.support.triples())
    for (const auto& w : c.fading.states) expected += (w.state.first == t.first) + (w.state.second == t.second);
  EXPECT_EQ(build_slack_lp(c, vec({0.1, 0.1})).num_columns(), expected);
  EXPECT_EQ(build_scale_lp(c, vec({1, 1})).num_columns(), expected);
}

TEST(InteriorSlack, ToyValues) {
  const auto c = fixtures::load("toy.json");
  EXPECT_NEAR(interior_slack(c, vec({0.4})), 1.0 / 15.0, 1e-9);
  EXPECT_NEAR(interior_slack(c, vec({0.5})), 0.0, 1e-9);
  EXPECT_LT(interior_slack(c, vec({0.6})), 0.0);
  EXPECT_GT(interior_slack(c, vec({0.0})), 0.0);
}

TEST(InteriorSlack, AgreesWithGridSearch) {
  const auto toy = fixtures::load("toy.json");
  const auto fading = fixtures::load("toy_fading.json");
  for (double lambda : {0.0, 0.1, 0.25, 0.4, 0.5, 0.6}) {
    EXPECT_NEAR(interior_slack(toy, vec({lambda})),
                coarse([&](double a, double b) {
                  return a + b > 1.0 ? oracles::kInfeasible : std::min(a - lambda, b - a);
                }),
                2e-4)
        << lambda;
    EXPECT_NEAR(interior_slack(fading, vec({lambda})), coarse([&](double a1, double a2) {
                  const double in = 0.5 * (a1 + a2), out = 0.5 * (1.0 - a1);
                  return std::min(in - lambda, out - in);
                }),
                2e-4)
        << lambda;
  }
}

TEST(BoundaryScale, Toys) {
  EXPECT_NEAR(boundary_scale(fixtures::load("toy.json"), vec({1})), 0.5, 1e-9);
  EXPECT_NEAR(boundary_scale(fixtures::load("toy_fading.json"), vec({1})), 0.5, 1e-9);
}

TEST(BoundaryScale, EmptySupportGivesZero) {
  auto raw = to_json(fixtures::load("toy.json"));
  raw["support"] = Json::array();
  EXPECT_EQ(boundary_scale(validate_config(raw), vec({1})), 0.0);
}

TEST(BoundaryScale, RejectsZeroDirection) {
  EXPECT_THROW(build_scale_lp(fixtures::load("toy.json"), vec({0})), std::invalid_argument);
  EXPECT_THROW(build_scale_lp(fixtures::load("toy.json"), vec({1, 1})), std::invalid_argument);
}

TEST(BoundaryScale, ScalesInverselyWithDirection) {
  const auto c = fixtures::load("desk.json");
  const double base = boundary_scale(c, vec({1, 2}));
  for (double k : {0.5, 2.0, 7.0}) EXPECT_NEAR(boundary_scale(c, vec({k, 2 * k})), base / k, 1e-7);
}

TEST(BoundaryScale, ZeroComponentDirection) {
  const auto c = fixtures::load("desk.json");
  const double rho = boundary_scale(c, vec({1, 0}));
  EXPECT_GT(rho, 0.0);
  EXPECT_NEAR(interior_slack(c, vec({rho, 0})), 0.0, 1e-7);
}

TEST(RegionProperties, MoreSupportNeverHurts) {
  // rho* is monotone in the support set. The slack value itself is not, since
  // every supported triple carries its own drain row, but its sign is.
  const auto full = fixtures::load("desk.json");
  const double rho_full = boundary_scale(full, vec({1, 1}));
  Rng rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<SupportTriple> kept;
    for (const auto& t : full.support.triples())
      if (rng.bernoulli(0.7)) kept.push_back(t);
    auto smaller = full;
    smaller.support = SupportRelation(kept);
    const auto dir = vec({1.0 + rng.uniform01(), 1.0 + rng.uniform01()});
    const double rho_small = boundary_scale(smaller, dir);
    EXPECT_LE(rho_small, boundary_scale(full, dir) + 1e-9);
    for (double f : {0.5, 0.9, 0.99}) {
      const auto lambda = scaled_rates(dir, rho_small, f);
      ASSERT_GT(interior_slack(smaller, lambda), 0.0);
      EXPECT_GT(interior_slack(full, lambda), 0.0);
    }
  }
  EXPECT_GT(rho_full, 0.0);
}

TEST(RegionProperties, SlackIsNotMonotoneInSupport) {
  // Dropping triples removes drain rows, which can raise the slack value.
  const auto full = fixtures::load("desk.json");
  std::vector<SupportTriple> kept(full.support.triples().begin(), full.support.triples().end());
  kept.resize(kept.size() / 2);
  auto smaller = full;
  smaller.support = SupportRelation(kept);
  const auto lambda = vec({0.05, 0.05});
  EXPECT_GT(interior_slack(smaller, lambda), interior_slack(full, lambda));
}

TEST(RegionProperties, WitnessReplays) {
  const auto c = fixtures::load("desk.json");
  Rng rng(17);
  for (int i = 0; i < 5; ++i) {
    const auto dir = vec({rng.uniform01(), rng.uniform01() + 0.1});
    const auto w = solve_lp(c, build_scale_lp(c, dir));
    ASSERT_EQ(w.status, simplex::Status::optimal);
    EXPECT_LE(witness_violation(c, dir, w), 1e-7);

    const auto lambda = scaled_rates(dir, w.value, 0.5 + 0.4 * rng.uniform01());
    const auto s = solve_lp(c, build_slack_lp(c, lambda));
    ASSERT_EQ(s.status, simplex::Status::optimal);
    EXPECT_GT(s.value, 0.0);
    EXPECT_LE(witness_violation(c, lambda, s), 1e-7);
  }
}

TEST(RegionProperties, ScaleAndSlackAgreeOnBoundary) {
  const auto c = fixtures::load("desk.json");
  const auto dir = vec({1, 1});
  const double rho = boundary_scale(c, dir);
  EXPECT_NEAR(rho, 1.25, 1e-7);
  EXPECT_GT(interior_slack(c, scaled_rates(dir, rho, 0.9)), 0.0);
  EXPECT_NEAR(interior_slack(c, scaled_rates(dir, rho, 1.0)), 0.0, 1e-7);
  EXPECT_LT(interior_slack(c, scaled_rates(dir, rho, 1.1)), 0.0);
}
