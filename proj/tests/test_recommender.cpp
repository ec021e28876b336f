#include <doctest.h>

#include <algorithm>
#include <set>

#include "fixtures.hpp"
#include "synthetic.hpp"
#include "wide/error.hpp"
#include "wide/recommender.hpp"

using namespace wide;
using namespace wide::testing;

namespace {

RecommendConfig base_config(double tau = 0.9, int cap = 2) {
  RecommendConfig c;
  c.tau = tau;
  c.seed = 7;
  c.max_level_cap = cap;
  return c;
}

bool same_trace(const std::vector<TraceStep>& a, const std::vector<TraceStep>& b, std::size_t steps) {
  if (a.size() < steps || b.size() < steps) return false;
  for (std::size_t s = 0; s < steps; ++s) {
    if (a[s].level != b[s].level || a[s].k != b[s].k || a[s].decision != b[s].decision) return false;
    if (a[s].candidates.size() != b[s].candidates.size()) return false;
    for (std::size_t c = 0; c < a[s].candidates.size(); ++c) {
      if (a[s].candidates[c].ids != b[s].candidates[c].ids) return false;
      if (a[s].candidates[c].fold_metrics != b[s].candidates[c].fold_metrics) return false;
    }
  }
  return true;
}

FeatureMatrix refine_fixture(std::vector<int>& y, std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t n = 60;
  y.assign(n, 0);
  Eigen::MatrixXd x(n, 4);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = static_cast<int>(i % 2);
    const auto r = static_cast<Eigen::Index>(i);
    x(r, 0) = y[i] + rng.uniform(-0.48, 0.48);  // separable with a 0.04 gap
    for (Eigen::Index c = 1; c < 4; ++c) x(r, c) = rng.normal(0.0, 1.0);
  }
  return matrix_from(x);
}

}  // namespace

TEST_CASE("RecommendConfig validation") {
  auto c = base_config();
  CHECK_NOTHROW(c.validate());
  c.k_schedule.clear();
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = base_config();
  c.k_schedule = {5, 0};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = base_config();
  c.c = 21;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = base_config();
  c.tau = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = base_config();
  c.hidden_fold = 5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = base_config();
  c.max_level_cap = 3;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK_THROWS_AS(recommend(energy_dataset(20, 1), [] {
                    auto k = base_config();
                    k.k_schedule.clear();
                    return k;
                  }()),
                  ConfigError);
}

TEST_CASE("level gating") {
  SUBCASE("energy-separable data stops at level 0") {
    const auto rec = recommend(energy_dataset(60, 2), base_config());
    CHECK(rec.level_reached == 0);
    CHECK(rec.target_met);
    for (const auto& step : rec.trace) {
      CHECK(step.level == 0);
      CHECK(step.columns == 17);
      for (const auto& c : step.candidates) {
        for (auto id : c.ids) CHECK(rec.descriptors[id].level == 0);
      }
    }
  }
  SUBCASE("polarity data needs level 1") {
    const auto records = polarity_dataset(100, 3);
    const auto level0 = recommend(records, base_config(0.9, 0));
    CHECK_FALSE(level0.target_met);
    for (const auto& step : level0.trace) {
      for (const auto& c : step.candidates) CHECK(c.min_metric < 0.9);
    }
    const auto rec = recommend(records, base_config());
    CHECK(rec.level_reached >= 1);
    CHECK(rec.target_met);
  }
  SUBCASE("an unattainable tau exhausts every level and k") {
    auto config = base_config(1.01);
    const auto rec = recommend(energy_dataset(40, 5, 256), config);
    CHECK(rec.level_reached == 2);
    CHECK_FALSE(rec.target_met);
    std::set<std::pair<int, std::size_t>> steps;
    for (const auto& s : rec.trace) steps.insert({s.level, s.k});
    CHECK(steps.size() == 12);
    CHECK(rec.fe2.ids.size() >= 1);
  }
}

TEST_CASE("Fe1 and Fe2 are reproducible from the trace") {
  const auto rec = recommend(polarity_dataset(60, 4), base_config(1.01, 1));
  double best = -1.0;
  double best_min = -1.0;
  for (const auto& s : rec.trace) {
    for (const auto& c : s.candidates) {
      for (double v : c.fold_metrics) best = std::max(best, v);
      best_min = std::max(best_min, c.min_metric);
    }
  }
  CHECK(rec.fe1.best_value == best);
  CHECK(rec.fe1.fold_metrics[static_cast<std::size_t>(rec.fe1.best_fold)] == best);
  // Fe2 dominance
  CHECK(rec.fe2.min_metric == best_min);
  for (const auto* fe : {&rec.fe1, &rec.fe2}) {
    REQUIRE(fe->outcomes.size() == 4);
    for (const auto& o : fe->outcomes) {
      CHECK(o.test.has_value());
      CHECK(o.feature_ids == fe->ids);
    }
    // recomputed eval metrics agree with the trace
    for (std::size_t f = 0; f < 4; ++f) CHECK(fe->outcomes[f].eval.accuracy == fe->fold_metrics[f]);
  }
  // trace completeness: every (split) selection is represented by a candidate
  for (const auto& s : rec.trace) {
    CHECK(s.selections.size() == 4);
    std::size_t covered = 0;
    for (const auto& c : s.candidates) covered += c.source_splits.size();
    CHECK(covered == 4);
    for (const auto& c : s.candidates) CHECK(c.fold_metrics.size() == 4);
  }
}

TEST_CASE("property: determinism and early-stop monotonicity") {
  const auto records = polarity_dataset(60, 9);
  const auto a = recommend(records, base_config());
  const auto b = recommend(records, base_config());
  CHECK(a.fe1.ids == b.fe1.ids);
  CHECK(a.fe2.ids == b.fe2.ids);
  CHECK(same_trace(a.trace, b.trace, a.trace.size()));
  REQUIRE(a.target_met);
  const auto capped = recommend(records, base_config(0.9, a.level_reached));
  CHECK(same_trace(a.trace, capped.trace, a.trace.size()));
  CHECK(capped.fe1.ids == a.fe1.ids);
  CHECK(capped.fe2.ids == a.fe2.ids);
}

TEST_CASE("property: hidden-fold values never change the decisions") {
  for (std::uint64_t trial = 0; trial < 3; ++trial) {
    auto records = polarity_dataset(60, 100 + trial);
    auto config = base_config();
    config.seed = trial;
    const auto before = recommend(records, config);
    Rng rng(trial);
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (before.plan.assignments[i] != before.hidden_fold) continue;
      for (auto& v : records[i].samples) v = rng.normal(0.0, 3.0);
    }
    const auto after = recommend(records, config);
    CHECK(after.fe1.ids == before.fe1.ids);
    CHECK(after.fe2.ids == before.fe2.ids);
    CHECK(same_trace(before.trace, after.trace, before.trace.size()));
    CHECK(after.trace.size() == before.trace.size());
  }
}

TEST_CASE("exhaustive_refine") {
  std::vector<int> y;
  const auto m = refine_fixture(y, 10);  // seed where a noise column costs an eval prediction
  const auto plan = make_folds(y, 5, 1);
  const auto splits = hidden_test_roles(plan, 0);
  EvalConfig eval;

  SUBCASE("a single-feature base is returned as is") {
    const std::vector<std::size_t> base{2};
    const auto log = exhaustive_refine(m, y, splits, base, 6, eval);
    CHECK(log.performed);
    CHECK(log.evaluations.size() == 1);
    CHECK(log.best == base);
  }
  SUBCASE("noise features are dropped; 2^4 - 1 subsets are scored") {
    const std::vector<std::size_t> base{1, 0, 3, 2};
    const auto log = exhaustive_refine(m, y, splits, base, 6, eval);
    CHECK(log.evaluations.size() == 15);
    CHECK(log.best == std::vector<std::size_t>{0});
    // the fixture is one where adding noise hurts
    const std::vector<std::size_t> both{1, 0};
    const auto with_noise = std::find_if(log.evaluations.begin(), log.evaluations.end(),
                                         [&](const SubsetScore& s) { return s.ids == both; });
    REQUIRE(with_noise != log.evaluations.end());
    CHECK(with_noise->min_metric < log.best_min);
    std::set<std::vector<std::size_t>> unique;
    for (const auto& s : log.evaluations) unique.insert(s.ids);
    CHECK(unique.size() == 15);
  }
  SUBCASE("a base larger than c is skipped") {
    const std::vector<std::size_t> base{0, 1, 2};
    const auto log = exhaustive_refine(m, y, splits, base, 2, eval);
    CHECK_FALSE(log.performed);
    CHECK(log.evaluations.empty());
    CHECK(log.note.find("skipped") != std::string::npos);
  }
}

TEST_CASE("recommend refines Fe2 when it fits under c") {
  auto config = base_config();
  config.k_schedule = {3};
  const auto rec = recommend(energy_dataset(40, 6), config);
  REQUIRE(rec.refined.has_value());
  CHECK(rec.refined->performed);
  CHECK(rec.refined->evaluations.size() == 7);
  CHECK(rec.refined->outcomes.size() == 4);
  config.c = 2;
  const auto skipped = recommend(energy_dataset(40, 6), config);
  CHECK_FALSE(skipped.refined->performed);
}

TEST_CASE("interpret") {
  const auto records = energy_dataset(4, 1, 256);
  const auto m = build_feature_matrix(records, ExtractionConfig{}, 2);

  SUBCASE("templates") {
    const auto rms = std::find_if(m.descriptors.begin(), m.descriptors.end(),
                                  [](const FeatureDescriptor& d) { return d.name == "time/rms"; });
    REQUIRE(rms != m.descriptors.end());
    const std::vector<std::size_t> ids{rms->id};
    const auto e = interpret(ids, m.descriptors);
    REQUIRE(e.size() == 1);
    CHECK(e[0].level == 1);
    CHECK(e[0].text.find("RMS") != std::string::npos);
    CHECK(describe(parse_lineage("dwt(db4)/detail3/energy")) == "energy of DWT detail band 3 under db4");
    CHECK(describe(parse_lineage("time/d1/rms")) == "RMS of the first difference of the signal");
  }
  SUBCASE("entries follow rank order") {
    const std::vector<std::size_t> ids{40, 3, 17, 150, 0};
    const auto e = interpret(ids, m.descriptors);
    REQUIRE(e.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) CHECK(e[i].id == ids[i]);
  }
  SUBCASE("every catalog path parses back to its descriptor and has a description") {
    for (const auto& d : m.descriptors) {
      CHECK(parse_lineage(d.name) == d.lineage);
      CHECK(parse_lineage(d.name).level() == d.level);
      const auto text = describe(d.lineage);
      CHECK_FALSE(text.empty());
      CHECK(text.find('_') == std::string::npos);
    }
  }
  SUBCASE("unknown id") {
    const std::vector<std::size_t> ids{m.cols};
    CHECK_THROWS_AS(interpret(ids, m.descriptors), std::logic_error);
  }
}
