#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "wide/error.hpp"
#include "wide/selector.hpp"

using namespace wide;
using namespace wide::testing;

namespace {

FeatureMatrix matrix_from_columns(const oracle::Columns& cols) {
  FeatureMatrix m;
  m.cols = cols.size();
  m.rows = cols.front().size();
  m.values.resize(m.rows * m.cols);
  for (std::size_t c = 0; c < m.cols; ++c) {
    FeatureDescriptor d;
    d.id = c;
    d.name = "f" + std::to_string(c);
    m.descriptors.push_back(d);
    for (std::size_t r = 0; r < m.rows; ++r) m.at(r, c) = cols[c][r];
  }
  for (std::size_t r = 0; r < m.rows; ++r) m.record_ids.push_back("r" + std::to_string(r));
  return m;
}

std::vector<int> two_class_labels(std::size_t n, Rng& rng) {
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = static_cast<int>(i % 2);
  rng.shuffle(std::span(y));
  return y;
}

oracle::Columns random_columns(std::size_t cols, std::size_t rows, std::span<const int> y, Rng& rng) {
  oracle::Columns out(cols, std::vector<double>(rows));
  for (std::size_t c = 0; c < cols; ++c) {
    const double shift = rng.uniform(0.0, 2.0);
    for (std::size_t r = 0; r < rows; ++r) out[c][r] = rng.normal() + shift * y[r];
  }
  return out;
}

}  // namespace

TEST_CASE("f_statistic") {
  const std::vector<int> y{0, 0, 0, 1, 1, 1};
  CHECK(f_statistic(std::vector<double>(6, 4.2), y) == 0.0);
  CHECK(f_statistic(std::vector<double>{0, 0, 0, 1, 1, 1}, y) == kFSentinel);
  // grand mean 2.5, SSB 1.5, SSW 4, df (1, 4)
  CHECK(f_statistic(std::vector<double>{1, 2, 3, 2, 3, 4}, y) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK_THROWS_AS(f_statistic(std::vector<double>{1, 2, 3}, std::vector<int>{0, 0, 1}), ArgumentError);
  CHECK_THROWS_AS(f_statistic(std::vector<double>{1, 2, 3}, std::vector<int>{0, 0, 0}), ArgumentError);
}

TEST_CASE("pearson_abs") {
  const std::vector<double> a{1, 2, 3, 4};
  CHECK(pearson_abs(a, a) == doctest::Approx(1.0));
  CHECK(pearson_abs(std::vector<double>(4, 3.0), a) == 0.0);
  CHECK(pearson_abs(a, std::vector<double>{2, 4, 5, 9}) == doctest::Approx(11.0 / std::sqrt(130.0)).epsilon(1e-14));
  CHECK(pearson_abs(a, std::vector<double>{8, 6, 4, 2}) == doctest::Approx(1.0));
}

TEST_CASE("F and |r| agree with the direct-formula oracles") {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 6 + rng.index(60);
    const auto y = two_class_labels(n, rng);
    const auto cols = random_columns(2, n, y, rng);
    CHECK(std::abs(f_statistic(cols[0], y) - oracle::anova_f(cols[0], y)) <= 1e-9 * std::max(1.0, oracle::anova_f(cols[0], y)));
    CHECK(std::abs(pearson_abs(cols[0], cols[1]) - oracle::abs_pearson(cols[0], cols[1])) <= 1e-9);
  }
}

TEST_CASE("mrmr_select") {
  Rng rng(17);
  const auto y = two_class_labels(40, rng);

  SUBCASE("k = 1 takes the max-F feature under either objective") {
    const auto cols = random_columns(10, 40, y, rng);
    const auto m = matrix_from_columns(cols);
    std::size_t best = 0;
    for (std::size_t c = 1; c < cols.size(); ++c) {
      if (oracle::anova_f(cols[c], y) > oracle::anova_f(cols[best], y)) best = c;
    }
    CHECK(mrmr_select(m, y, 1, MrmrObjective::MID).ranked_ids == std::vector<std::size_t>{best});
    CHECK(mrmr_select(m, y, 1, MrmrObjective::MIQ).ranked_ids == std::vector<std::size_t>{best});
  }
  SUBCASE("a duplicated column loses to an equally relevant uncorrelated one") {
    // col 0 and col 1 identical; col 2 has the same values within each class
    // but permuted so that it is uncorrelated with col 0.
    std::vector<double> base(40), other(40);
    std::vector<double> zero_vals{-1.5, -0.5, 0.5, 1.5}, one_vals{2.5, 3.5, 4.5, 5.5};
    std::size_t zi = 0, oi = 0, zj = 0, oj = 0;
    const std::size_t perm[4] = {2, 0, 3, 1};
    for (std::size_t r = 0; r < 40; ++r) {
      if (y[r] == 0) {
        base[r] = zero_vals[zi++ % 4];
        other[r] = zero_vals[perm[zj++ % 4]];
      } else {
        base[r] = one_vals[oi++ % 4];
        other[r] = one_vals[perm[oj++ % 4]];
      }
    }
    oracle::Columns cols{base, base, other};
    for (int extra = 0; extra < 4; ++extra) cols.push_back(random_columns(1, 40, y, rng)[0]);
    const auto m = matrix_from_columns(cols);
    CHECK(oracle::anova_f(other, y) == doctest::Approx(oracle::anova_f(base, y)));
    const auto sel = mrmr_select(m, y, 2, MrmrObjective::MID);
    CHECK(sel.ranked_ids[0] == 0);
    CHECK(sel.ranked_ids[1] != 1);
    CHECK(sel.step_scores[1].redundancy < 1.0);
  }
  SUBCASE("N = 10, k = 3 matches the brute-force step oracle") {
    for (bool quotient : {false, true}) {
      const auto cols = random_columns(10, 40, y, rng);
      const auto sel = mrmr_select(matrix_from_columns(cols), y, 3, quotient ? MrmrObjective::MIQ : MrmrObjective::MID);
      std::vector<std::size_t> chosen;
      for (std::size_t step = 0; step < 3; ++step) {
        CHECK(sel.ranked_ids[step] == oracle::mrmr_step(cols, y, chosen, quotient));
        chosen.push_back(sel.ranked_ids[step]);
      }
      CHECK(sel.step_scores.size() == 3);
      CHECK(sel.k == 3);
    }
  }
  SUBCASE("k larger than the column count") {
    const auto m = matrix_from_columns(random_columns(3, 40, y, rng));
    CHECK_THROWS_AS(mrmr_select(m, y, 4, MrmrObjective::MID), ArgumentError);
  }
}

TEST_CASE("fuzzy_dependency") {
  const std::vector<int> y{0, 0, 0, 1, 1, 1};
  const auto dep = [&](const std::vector<double>& f) {
    const std::span<const double> cols[] = {f};
    return fuzzy_dependency(cols, y);
  };
  CHECK(dep({0, 0, 0, 1, 1, 1}) == 1.0);
  CHECK(dep(std::vector<double>(6, 2.0)) == 0.0);
  const std::vector<double> separated{0.0, 0.1, 0.2, 0.8, 0.9, 1.0};
  CHECK(dep(separated) == doctest::Approx(oracle::gamma({separated}, y)));
  CHECK(dep(separated) == 1.0);
  // overlapping fixture; independent numpy evaluation gives 0.6157562246130366
  const std::vector<double> overlap{0.0, 0.3, 0.5, 0.45, 0.8, 1.0};
  CHECK(dep(overlap) == doctest::Approx(0.6157562246130366).epsilon(1e-12));
  CHECK(dep(overlap) == doctest::Approx(oracle::gamma({overlap}, y)).epsilon(1e-12));
  CHECK_THROWS_AS(fuzzy_dependency({}, y), ArgumentError);
}

TEST_CASE("property: fuzzy dependency stays in [0, 1] and matches the oracle") {
  Rng rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 4 + rng.index(30);
    const auto y = two_class_labels(n, rng);
    const auto cols = random_columns(1 + rng.index(3), n, y, rng);
    std::vector<std::span<const double>> views(cols.begin(), cols.end());
    const double g = fuzzy_dependency(views, y);
    CHECK(g >= 0.0);
    CHECK(g <= 1.0);
    CHECK(g == doctest::Approx(oracle::gamma(cols, y)).epsilon(1e-12));
  }
}

TEST_CASE("mrms_select") {
  Rng rng(23);
  const auto y = two_class_labels(30, rng);

  SUBCASE("k = 1 takes the max-dependency feature") {
    const auto cols = random_columns(8, 30, y, rng);
    std::size_t best = 0;
    for (std::size_t c = 1; c < cols.size(); ++c) {
      if (oracle::gamma({cols[c]}, y) > oracle::gamma({cols[best]}, y)) best = c;
    }
    CHECK(mrms_select(matrix_from_columns(cols), y, 1, 0.5).ranked_ids == std::vector<std::size_t>{best});
  }
  SUBCASE("a duplicate adds no significance beside its twin") {
    auto cols = random_columns(6, 30, y, rng);
    cols.insert(cols.begin() + 1, cols[0]);
    const auto m = matrix_from_columns(cols);
    SelectionView view(m, y);
    RelevanceCache cache(view);
    CHECK(cache.pair_dependency(0, 1) == doctest::Approx(cache.dependency(0)));
    const auto sel = mrms_select(m, y, 2, 1.0);
    if (sel.ranked_ids[0] == 0 || sel.ranked_ids[0] == 1) {
      CHECK(sel.ranked_ids[1] != (sel.ranked_ids[0] == 0 ? 1u : 0u));
      CHECK(sel.step_scores[1].significance > 0.0);
    }
  }
  SUBCASE("N = 8, k = 3 matches the brute-force step oracle") {
    for (double beta : {0.5, 2.0}) {
      const auto cols = random_columns(8, 30, y, rng);
      const auto sel = mrms_select(matrix_from_columns(cols), y, 3, beta);
      std::vector<std::size_t> chosen;
      for (std::size_t step = 0; step < 3; ++step) {
        CHECK(sel.ranked_ids[step] == oracle::mrms_step(cols, y, chosen, beta));
        chosen.push_back(sel.ranked_ids[step]);
      }
    }
  }
  SUBCASE("argument errors") {
    const auto m = matrix_from_columns(random_columns(3, 30, y, rng));
    CHECK_THROWS_AS(mrms_select(m, y, 4, 0.5), ArgumentError);
    CHECK_THROWS_AS(mrms_select(m, y, 2, -1.0), ArgumentError);
  }
}

TEST_CASE("union_recommend") {
  const auto sel = [](std::vector<std::size_t> ids) {
    SelectionResult r;
    r.k = ids.size();
    r.ranked_ids = std::move(ids);
    r.step_scores.resize(r.k);
    return r;
  };
  CHECK(union_recommend(sel({4, 2, 9}), sel({4, 2, 9}), 3) == std::vector<std::size_t>{4, 2, 9});
  CHECK(union_recommend(sel({0, 1, 2}), sel({3, 4, 5}), 3) == std::vector<std::size_t>{0, 3, 1});
  CHECK(union_recommend(sel({0, 1, 2}), sel({1, 0, 5}), 3) == std::vector<std::size_t>{0, 1, 2});
  CHECK_THROWS_AS(union_recommend(sel({0, 1}), sel({1, 0, 5}), 3), ArgumentError);
}

TEST_CASE("property: union output has k unique ids from x and y") {
  Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 1 + rng.index(8);
    std::vector<std::size_t> pool(20);
    std::iota(pool.begin(), pool.end(), 0);
    SelectionResult x, y;
    rng.shuffle(std::span(pool));
    x.ranked_ids.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
    rng.shuffle(std::span(pool.data(), 10));
    y.ranked_ids.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
    const auto z = union_recommend(x, y, k);
    CHECK(z.size() == k);
    CHECK(std::set<std::size_t>(z.begin(), z.end()).size() == k);
    for (auto id : z) {
      const bool in_x = std::find(x.ranked_ids.begin(), x.ranked_ids.end(), id) != x.ranked_ids.end();
      const bool in_y = std::find(y.ranked_ids.begin(), y.ranked_ids.end(), id) != y.ranked_ids.end();
      CHECK((in_x || in_y));
    }
    CHECK(z[0] == x.ranked_ids[0]);
    if (x.ranked_ids[0] != y.ranked_ids[0] && k > 1) CHECK(z[1] == y.ranked_ids[0]);
  }
}

TEST_CASE("property: mRMR ranking is invariant to positive affine rescaling") {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto y = two_class_labels(36, rng);
    auto cols = random_columns(9, 36, y, rng);
    const auto before = mrmr_select(matrix_from_columns(cols), y, 4, MrmrObjective::MID).ranked_ids;
    for (auto& c : cols) {
      const double a = rng.uniform(0.1, 50.0), b = rng.uniform(-100.0, 100.0);
      for (double& v : c) v = a * v + b;
    }
    CHECK(mrmr_select(matrix_from_columns(cols), y, 4, MrmrObjective::MID).ranked_ids == before);
  }
}

TEST_CASE("property: selectors are invariant to record order") {
  Rng rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const auto y = two_class_labels(24, rng);
    const auto cols = random_columns(8, 24, y, rng);
    std::vector<std::size_t> perm(24);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(std::span(perm));
    oracle::Columns shuffled(cols.size(), std::vector<double>(24));
    std::vector<int> y2(24);
    for (std::size_t r = 0; r < 24; ++r) {
      y2[r] = y[perm[r]];
      for (std::size_t c = 0; c < cols.size(); ++c) shuffled[c][r] = cols[c][perm[r]];
    }
    const auto a = matrix_from_columns(cols), b = matrix_from_columns(shuffled);
    CHECK(mrmr_select(a, y, 3, MrmrObjective::MIQ).ranked_ids == mrmr_select(b, y2, 3, MrmrObjective::MIQ).ranked_ids);
    CHECK(mrms_select(a, y, 3, 0.5).ranked_ids == mrms_select(b, y2, 3, 0.5).ranked_ids);
  }
}

TEST_CASE("property: planted informative column is ranked first by both selectors") {
  Rng rng(404);
  for (int trial = 0; trial < 5; ++trial) {
    const auto y = two_class_labels(60, rng);
    oracle::Columns cols(50, std::vector<double>(60));
    const std::size_t planted = rng.index(50);
    for (std::size_t c = 0; c < 50; ++c) {
      for (std::size_t r = 0; r < 60; ++r) cols[c][r] = rng.normal() + (c == planted ? 4.0 * y[r] : 0.0);
    }
    // enforce a gap of at least 4 sigma between the classes' nearest points
    for (std::size_t r = 0; r < 60; ++r) cols[planted][r] = (y[r] ? 6.0 : -2.0) + std::clamp(cols[planted][r] - 4.0 * y[r], -2.0, 2.0);
    const auto m = matrix_from_columns(cols);
    CHECK(mrmr_select(m, y, 3, MrmrObjective::MID).ranked_ids[0] == planted);
    CHECK(mrmr_select(m, y, 3, MrmrObjective::MIQ).ranked_ids[0] == planted);
    CHECK(mrms_select(m, y, 3, 0.5).ranked_ids[0] == planted);
  }
}
