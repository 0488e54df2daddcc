#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "waveseg/core.hpp"
#include "waveseg/phantom.hpp"

using namespace waveseg;

TEST_SUITE("phantom") {

TEST_CASE("noiseless minefield is two-valued and matches its truth") {
  PhantomSpec spec;
  spec.kind = PhantomKind::Minefield;
  spec.seed = 3;
  const auto lab = make_phantom(spec);

  std::set<double> values(lab.image.pixels.begin(), lab.image.pixels.end());
  CHECK(values == std::set<double>{0.2, 0.8});
  for (size_t j = 0; j < lab.image.size(); ++j) {
    CHECK((lab.image.pixels[j] > 0.5) == (lab.truth.labels[j] == 1));
  }
  CHECK(lab.regions == std::vector<std::string>{"background", "mine"});
}

TEST_CASE("phantom generation is deterministic") {
  PhantomSpec spec;
  spec.kind = PhantomKind::Minefield;
  spec.noise_sigma = 0.25;
  spec.seed = 11;
  const auto a = make_phantom(spec);
  const auto b = make_phantom(spec);
  CHECK(a.image.pixels == b.image.pixels);
  CHECK(a.truth.labels == b.truth.labels);

  spec.seed = 12;
  const auto c = make_phantom(spec);
  CHECK(a.image.pixels != c.image.pixels);
}

TEST_CASE("minefield foreground fraction is near n pi r^2 / area") {
  PhantomSpec spec;
  spec.kind = PhantomKind::Minefield;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    spec.seed = seed;
    const auto lab = make_phantom(spec);
    size_t fg = 0;
    for (int l : lab.truth.labels) fg += l == 1;
    const double expected = spec.mine_count * 3.14159265358979 * spec.mine_radius *
                            spec.mine_radius / (spec.width * spec.height);
    const double actual = static_cast<double>(fg) / (spec.width * spec.height);
    CHECK(std::abs(actual - expected) <= 0.2 * expected);
  }
}

TEST_CASE("impossible placements raise PlacementError") {
  PhantomSpec spec;
  spec.kind = PhantomKind::Minefield;
  spec.width = spec.height = 16;
  spec.mine_count = 20;
  spec.mine_radius = 4.0;
  CHECK_THROWS_AS(make_phantom(spec), PlacementError);
}

TEST_CASE("noise is clipped to the unit range") {
  PhantomSpec spec;
  spec.kind = PhantomKind::Minefield;
  spec.noise_sigma = 0.6;
  spec.seed = 4;
  const auto lab = make_phantom(spec);
  for (double v : lab.image.pixels) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("disk phantom is centered with the default radius") {
  PhantomSpec spec;
  spec.kind = PhantomKind::Disk;
  const auto lab = make_phantom(spec);
  CHECK(lab.truth.labels[static_cast<size_t>(32) * 64 + 32] == 1);
  CHECK(lab.truth.labels[0] == 0);
  size_t fg = 0;
  for (int l : lab.truth.labels) fg += l == 1;
  const double expected = 3.14159265358979 * 16.0 * 16.0;
  CHECK(std::abs(static_cast<double>(fg) - expected) <= 0.05 * expected);
}

TEST_CASE("composite phantom regions are disjoint with declared fractions") {
  PhantomSpec spec;
  spec.kind = PhantomKind::Composite;
  const auto lab = make_phantom(spec);
  CHECK(lab.regions.size() == 3);

  size_t band = 0, blob = 0;
  for (int l : lab.truth.labels) {
    band += l == 1;
    blob += l == 2;
  }
  // band: height/4 rows of full width
  CHECK(band == static_cast<size_t>(64 / 4) * 64);
  // blob: disk of radius 0.16*64
  const double r = 0.16 * 64;
  CHECK(std::abs(static_cast<double>(blob) - 3.14159 * r * r) <= 0.1 * 3.14159 * r * r);

  // zero-mean grating: row means inside the band stay near the base level
  for (int row : {42, 48, 55}) {
    double mean = 0.0;
    for (int c = 0; c < 64; ++c) mean += lab.image.at(row, c);
    mean /= 64.0;
    CHECK(std::abs(mean - 0.4) < 1e-6);
  }
}

TEST_CASE("otsu on a two-valued image recovers the exact split") {
  PhantomSpec spec;
  spec.kind = PhantomKind::Minefield;
  spec.seed = 9;
  const auto lab = make_phantom(spec);
  const auto [mask, threshold] = otsu_binarize(lab.image);
  CHECK(threshold > 0.2);
  CHECK(threshold < 0.8);
  for (size_t j = 0; j < mask.size(); ++j) {
    CHECK(static_cast<int>(mask[j]) == lab.truth.labels[j]);
  }
}

TEST_CASE("otsu separates two well-separated gaussians") {
  GrayImage img(64, 64);
  std::vector<std::uint8_t> truth(img.size());
  Rng rng(31);
  for (size_t j = 0; j < img.size(); ++j) {
    const bool fg = j % 2 == 0;
    truth[j] = fg;
    img.pixels[j] = std::clamp((fg ? 0.75 : 0.25) + 0.05 * rng.normal(), 0.0, 1.0);
  }
  const auto [mask, threshold] = otsu_binarize(img);
  size_t wrong = 0;
  for (size_t j = 0; j < mask.size(); ++j) wrong += mask[j] != truth[j];
  CHECK(static_cast<double>(wrong) / mask.size() <= 0.01);
  CHECK(threshold == doctest::Approx(0.5).epsilon(0.2));
}

TEST_CASE("otsu depends only on the histogram") {
  PhantomSpec spec;
  spec.kind = PhantomKind::Minefield;
  spec.noise_sigma = 0.15;
  spec.seed = 5;
  const auto lab = make_phantom(spec);
  GrayImage shuffled = lab.image;
  Rng rng(77);
  for (size_t j = shuffled.size() - 1; j > 0; --j) {
    std::swap(shuffled.pixels[j], shuffled.pixels[rng.integer(j + 1)]);
  }
  const auto [m1, t1] = otsu_binarize(lab.image);
  const auto [m2, t2] = otsu_binarize(shuffled);
  CHECK(t1 == t2);
}

TEST_CASE("otsu error paths") {
  CHECK_THROWS_AS(otsu_binarize(GrayImage(8, 8, 0.5)), ConstantImageError);
  CHECK_THROWS_AS(otsu_binarize(make_phantom(PhantomSpec{}).image, 1), ConfigError);
}

}  // TEST_SUITE
