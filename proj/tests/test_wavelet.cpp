#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fixtures.hpp"
#include "wide/error.hpp"
#include "wide/wavelet.hpp"

using namespace wide;
using namespace wide::testing;

namespace {

double energy(std::span<const double> x) {
  double e = 0.0;
  for (double v : x) e += v * v;
  return e;
}

double band_energy(const WaveletBands& b) {
  double e = energy(b.approx);
  for (const auto& d : b.details) e += energy(d);
  return e;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  REQUIRE(a.size() == b.size());
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

std::vector<double> chirp(std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n);
    x[i] = std::sin(2.0 * std::numbers::pi * (2.0 * t + 12.0 * t * t));
  }
  return x;
}

}  // namespace

TEST_CASE("haar on a constant input") {
  const std::vector<double> x{1, 1, 1, 1};
  const auto bands = dwt_decompose(x, "haar", 1);
  REQUIRE(bands.details.size() == 1);
  for (double d : bands.details[0]) CHECK(d == doctest::Approx(0.0));
  REQUIRE(bands.approx.size() == 2);
  for (double a : bands.approx) CHECK(a == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("db2 symmetric decomposition matches the PyWavelets reference") {
  // tests/oracles/dwt_reference.py: x[i] = sin(0.3 i) + 0.1 i, n = 20, level 2.
  std::vector<double> x(20);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(0.3 * static_cast<double>(i)) + 0.1 * static_cast<double>(i);
  const std::vector<double> approx2{0.27632627630596973, 0.4149526160775203, 2.624414733422556, 2.9126183263480714,
                                    1.5018451107623783,  1.3535405244421406, 2.496464683754252};
  const std::vector<double> detail2{-0.1360806033494643, 0.06701524804406904, 0.2802773376263189, 0.02077959950350511,
                                    -0.2652180395962894, 0.31726495134580446, -0.15347968843708962};
  const std::vector<double> detail1{-0.24220567232010853, 0.0277757463539461,   0.04926477019559172,
                                    0.053544192451579736, 0.03911908780814116,  0.011028560330096249,
                                    -0.020914560564923773, -0.04555162373893119, -0.054276194212485834,
                                    -0.044040528511707824, 0.1972322680104768};
  const auto bands = dwt_decompose(x, "db2", 2);
  CHECK(max_abs_diff(bands.approx, approx2) < 1e-12);
  CHECK(max_abs_diff(bands.details[1], detail2) < 1e-12);
  CHECK(max_abs_diff(bands.details[0], detail1) < 1e-12);
}

TEST_CASE("band lengths follow floor((n + L - 1) / 2)") {
  for (const auto& name : default_wavelet_bank()) {
    const auto len = wavelet(name).length();
    std::size_t n = 257;
    const auto bands = dwt_decompose(std::vector<double>(n, 0.25), name, 3);
    for (const auto& d : bands.details) {
      n = (n + len - 1) / 2;
      CHECK(d.size() == n);
    }
    CHECK(bands.approx.size() == n);
  }
}

TEST_CASE("property: perfect reconstruction for every wavelet and extension") {
  Rng rng(77);
  for (const auto& name : default_wavelet_bank()) {
    for (const auto ext : {Extension::symmetric, Extension::periodization}) {
      for (int trial = 0; trial < 6; ++trial) {
        const std::size_t n = 64 + rng.index(961);
        const auto x = gaussian(n, rng);
        const int depth = 1 + static_cast<int>(rng.index(5));
        const auto bands = dwt_decompose(x, name, depth, ext);
        const auto back = dwt_reconstruct(bands);
        const double scale = *std::max_element(x.begin(), x.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
        CHECK(max_abs_diff(back, x) / std::abs(scale) < 1e-8);
      }
    }
  }
}

TEST_CASE("64-sample random round trip") {
  Rng rng(5);
  const auto x = gaussian(64, rng);
  const auto bands = dwt_decompose(x, "db4", 3);
  CHECK(max_abs_diff(dwt_reconstruct(bands), x) < 1e-8);
}

TEST_CASE("orthogonal transform conserves energy") {
  const auto x = chirp(64);
  const double direct = energy(x);
  for (const auto& name : default_wavelet_bank()) {
    const auto bands = dwt_decompose(x, name, 2, Extension::periodization);
    CHECK(std::abs(band_energy(bands) - direct) / direct < 1e-6);
  }
  const auto db4 = dwt_decompose(x, "db4", 3, Extension::periodization);
  CHECK(std::abs(band_energy(db4) - direct) / direct < 1e-6);
}

TEST_CASE("dwt argument errors") {
  const std::vector<double> x(64, 1.0);
  CHECK_THROWS_AS(dwt_decompose(x, "db99", 2), ArgumentError);
  CHECK_THROWS_AS(dwt_decompose(x, "haar", 0), ArgumentError);
  CHECK_THROWS_AS(dwt_decompose(std::vector<double>(8, 1.0), "db8", 1), ArgumentError);
}

TEST_CASE("clamp_depth") {
  CHECK(clamp_depth(4, 1024, 8) == 4);
  CHECK(clamp_depth(4, 64, 8) == 3);
  CHECK(clamp_depth(4, 16, 16) == 1);
  CHECK(clamp_depth(2, 4096, 2) == 2);
}

TEST_CASE("select_mother_wavelet") {
  Rng rng(1);
  const auto noise = gaussian(128, rng);

  SUBCASE("singleton bank") {
    const std::vector<std::string> bank{"haar"};
    CHECK(select_mother_wavelet(std::span<const double>(noise), bank, 4).wavelet_name == "haar");
  }
  SUBCASE("constant signal is degenerate") {
    const std::vector<double> flat(64, 5.0);
    CHECK_THROWS_AS(select_mother_wavelet(std::span<const double>(flat), default_wavelet_bank(), 4),
                    DegenerateInputError);
  }
  SUBCASE("off-grid step: haar beats db4, scores match the reference DWT") {
    std::vector<double> step(66, 1.0);
    std::fill(step.begin() + 33, step.end(), -1.0);
    const std::vector<std::string> bank{"haar", "db4"};
    const auto choice = select_mother_wavelet(std::span<const double>(step), bank, 4);
    CHECK(choice.wavelet_name == "haar");
    CHECK(choice.per_candidate_scores.at("haar") == doctest::Approx(3.298394998312093).epsilon(1e-9));
    CHECK(choice.per_candidate_scores.at("db4") == doctest::Approx(3.20051525340846).epsilon(1e-9));
    CHECK(choice.ratio == choice.per_candidate_scores.at("haar"));
  }
  SUBCASE("ties go to bank order") {
    register_wavelet("haar_copy", {0.7071067811865476, 0.7071067811865476});
    const std::vector<std::string> bank{"haar_copy", "haar"};
    CHECK(select_mother_wavelet(std::span<const double>(noise), bank, 3).wavelet_name == "haar_copy");
  }
  SUBCASE("argument errors") {
    CHECK_THROWS_AS(select_mother_wavelet(std::span<const double>(noise), std::vector<std::string>{}, 3), ArgumentError);
    CHECK_THROWS_AS(select_mother_wavelet(std::span<const double>(noise.data(), 16), default_wavelet_bank(), 5),
                    ArgumentError);
  }
}
