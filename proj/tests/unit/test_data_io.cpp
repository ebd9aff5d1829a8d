#include <gtest/gtest.h>

#include "emoadapt/dataset.hpp"
#include "emoadapt/error.hpp"
#include "emoadapt/glyph.hpp"
#include "emoadapt/io.hpp"
#include "emoadapt/pgm.hpp"
#include "oracles.hpp"

using namespace emoadapt;
namespace fs = std::filesystem;

namespace {

std::vector<std::uint8_t> bytes_of(const std::string& s) { return {s.begin(), s.end()}; }

Tensor<float> random_image(std::size_t h, std::size_t w, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> px(0, 255);
  Tensor<float> t({h, w});
  for (auto& v : t.data()) v = static_cast<float>(px(rng));
  return t;
}

TEST(Pgm, TinyImageRoundTrip) {
  Tensor<float> img({2, 2}, {0, 255, 128, 64});
  auto bytes = write_pgm(img);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 11), "P5\n2 2\n255\n");
  EXPECT_TRUE(bit_identical(read_pgm(bytes), img));
  EXPECT_EQ(write_pgm(read_pgm(bytes)), bytes);
}

TEST(Pgm, RandomRoundTrips) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::size_t> side(1, 64);
  for (int trial = 0; trial < 100; ++trial) {
    auto img = trial == 0 ? random_image(48, 48, rng) : random_image(side(rng), side(rng), rng);
    auto bytes = write_pgm(img);
    ASSERT_TRUE(bit_identical(read_pgm(bytes), img)) << trial;
    ASSERT_EQ(write_pgm(read_pgm(bytes)), bytes) << trial;
  }
}

TEST(Pgm, HeaderCommentsAndWhitespace) {
  auto bytes = bytes_of("P5 # comment\n 3\t1 # another\n255\n");
  bytes.insert(bytes.end(), {1, 2, 3});
  EXPECT_EQ(read_pgm(bytes).vec(), (std::vector<float>{1, 2, 3}));
}

TEST(Pgm, Rejections) {
  EXPECT_THROW(read_pgm(bytes_of("P3\n2 2\n255\n0 0 0 0\n")), DataError);
  EXPECT_THROW(read_pgm(bytes_of("P2\n1 1\n255\n0\n")), DataError);
  EXPECT_THROW(read_pgm(bytes_of("GIF89a")), DataError);
  auto short_payload = bytes_of("P5\n2 2\n255\n");
  short_payload.push_back(1);
  EXPECT_THROW(read_pgm(short_payload), DataError);
  auto wide = bytes_of("P5\n1 1\n65535\n");
  wide.insert(wide.end(), {0, 0});
  EXPECT_THROW(read_pgm(wide), DataError);
  EXPECT_THROW(write_pgm(Tensor<float>({1, 1}, {0.5f})), ArgumentError);
  EXPECT_THROW(write_pgm(Tensor<float>({1, 1}, {256.0f})), ArgumentError);
}

TEST(Pgm, PpmConvertsToLuma) {
  auto bytes = bytes_of("P6\n2 1\n255\n");
  bytes.insert(bytes.end(), {255, 255, 255, 0, 0, 0});
  auto gray = read_pnm_gray(bytes);
  EXPECT_NEAR(gray[0], 255.0f, 1e-3);
  EXPECT_EQ(gray[1], 0.0f);
}

TEST(Pgm, QuantizeUnit) {
  auto q = quantize_unit(Tensor<float>({1, 5}, {0.0f, 1.0f, 0.5f, -0.2f, 1.3f}));
  EXPECT_EQ(q.vec(), (std::vector<float>{0, 255, 128, 0, 255}));
}

TEST(Manifest, ParseAndFormat) {
  auto rows = parse_manifest("path,label\na.pgm,happy\nb/c.pgm,neutral\n");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1].path, "b/c.pgm");
  EXPECT_EQ(rows[1].label, 3);
  EXPECT_EQ(parse_manifest(format_manifest(rows)).size(), 2u);
  EXPECT_EQ(format_manifest(rows), "path,label\na.pgm,happy\nb/c.pgm,neutral\n");
}

TEST(Manifest, Rejections) {
  EXPECT_THROW(parse_manifest(""), DataError);
  EXPECT_THROW(parse_manifest("file,class\na.pgm,happy\n"), DataError);
  try {
    parse_manifest("path,label\na.pgm,happy\nb.pgm,hate\n");
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_manifest("path,label\na.pgm,happy\na.pgm,sad\n"), DataError);
}

class DatasetFiles : public ::testing::Test {
 protected:
  oracle::TempDir dir{"dataset"};
  void write_image(const std::string& rel, const Tensor<float>& img) { write_file(dir.path() / rel, write_pgm(img)); }
  fs::path manifest(const std::string& text) {
    write_text_file(dir.path() / "m.csv", text);
    return dir.path() / "m.csv";
  }
};

TEST_F(DatasetFiles, SingleRow) {
  std::mt19937_64 rng(2);
  write_image("img/a.pgm", random_image(48, 48, rng));
  auto ds = load_dataset(manifest("path,label\nimg/a.pgm,sad\n"));
  ASSERT_EQ(ds.size(), 1u);
  EXPECT_EQ(ds.samples[0].label, 2);
  EXPECT_EQ(ds.samples[0].image.shape(), (Shape{1, 48, 48}));
  for (float v : ds.samples[0].image.data()) {
    EXPECT_GE(v, 0.0f);
    EXPECT_LE(v, 1.0f);
  }
}

TEST_F(DatasetFiles, ResizeConstant96To48) {
  write_image("big.pgm", Tensor<float>({96, 96}, 128.0f));
  auto ds = load_dataset(manifest("path,label\nbig.pgm,angry\n"));
  for (float v : ds.samples[0].image.data()) EXPECT_EQ(v, static_cast<float>(128.0 / 255.0));
}

TEST_F(DatasetFiles, AreaAverageMatchesBlockMeanOracle) {
  std::mt19937_64 rng(3);
  auto img = random_image(96, 96, rng);
  auto r = resize_area(img, 48);
  for (std::size_t y = 0; y < 48; ++y)
    for (std::size_t x = 0; x < 48; ++x) {
      const double want = (img[(2 * y) * 96 + 2 * x] + img[(2 * y) * 96 + 2 * x + 1] + img[(2 * y + 1) * 96 + 2 * x] +
                           img[(2 * y + 1) * 96 + 2 * x + 1]) /
                          4.0;
      ASSERT_NEAR(r[y * 48 + x], want, 1e-9);
    }
  // Non-integer ratio keeps the mean.
  auto odd = random_image(70, 50, rng);
  auto small = resize_area(odd, 48);
  double m_in = 0, m_out = 0;
  for (float v : odd.data()) m_in += v;
  for (double v : small.data()) m_out += v;
  EXPECT_NEAR(m_in / odd.size(), m_out / small.size(), 1e-9);
}

TEST_F(DatasetFiles, ErrorsNameTheRow) {
  EXPECT_THROW(load_dataset(dir.path() / "nope.csv"), DataError);
  try {
    load_dataset(manifest("path,label\nmissing.pgm,happy\n"));
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("missing.pgm"), std::string::npos) << e.what();
  }
  write_text_file(dir.path() / "bad.pgm", "P3\n1 1\n255\n0\n");
  try {
    load_dataset(manifest("path,label\nbad.pgm,happy\n"));
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("bad.pgm"), std::string::npos) << e.what();
  }
}

TEST_F(DatasetFiles, OrderFollowsManifest) {
  std::mt19937_64 rng(4);
  std::string text = "path,label\n";
  std::vector<Tensor<float>> imgs;
  for (int i = 0; i < 40; ++i) {
    imgs.push_back(random_image(48, 48, rng));
    const std::string name = "i" + std::to_string(39 - i) + ".pgm";
    write_image(name, imgs.back());
    text += name + "," + std::string(kClassNames[i % 4]) + "\n";
  }
  auto ds = load_dataset(manifest(text));
  for (int i = 0; i < 40; ++i) {
    EXPECT_EQ(ds.samples[i].label, i % 4);
    EXPECT_EQ(ds.samples[i].image[0], static_cast<float>(imgs[i][0] / 255.0));
  }
}

TEST(Split, HashSplitIsStableAndRoughly80_20) {
  std::size_t test = 0;
  for (int i = 0; i < 2000; ++i) test += split_of("images/x_" + std::to_string(i) + ".pgm") == Split::test;
  EXPECT_GT(test, 320u);
  EXPECT_LT(test, 480u);
  EXPECT_EQ(split_of("a.pgm"), split_of("a.pgm"));
}

TEST(Glyph, RenderIsPureAndInRange) {
  auto spec = sample_glyph_spec(1, Domain::target, 5, 3);
  auto a = render_glyph(spec), b = render_glyph(spec);
  EXPECT_TRUE(bit_identical(a, b));
  EXPECT_EQ(a.shape(), (Shape{48, 48}));
  for (float v : a.data()) {
    EXPECT_GE(v, 0.0f);
    EXPECT_LE(v, 1.0f);
  }
  EXPECT_THROW(sample_glyph_spec(4, Domain::source, 1, 0), ArgumentError);
}

TEST(Glyph, ClassGeometry) {
  for (std::uint64_t i = 0; i < 50; ++i) {
    EXPECT_GT(sample_glyph_spec(1, Domain::source, 9, i).mouth_curvature, 2.0);
    EXPECT_LT(sample_glyph_spec(2, Domain::source, 9, i).mouth_curvature, -2.0);
    EXPECT_TRUE(sample_glyph_spec(0, Domain::source, 9, i).eyebrows);
    EXPECT_FALSE(sample_glyph_spec(3, Domain::source, 9, i).eyebrows);
    auto s = sample_glyph_spec(0, Domain::source, 9, i);
    EXPECT_EQ(s.gradient, 0.0);
    EXPECT_FALSE(s.inverted);
  }
}

TEST(Glyph, TargetShiftStatistics) {
  std::size_t inverted = 0;
  double max_offset = 0;
  for (std::uint64_t i = 0; i < 400; ++i) {
    auto s = sample_glyph_spec(static_cast<int>(i % 4), Domain::target, 2, i);
    inverted += s.inverted;
    EXPECT_GT(s.gradient, 0.0);
    max_offset = std::max({max_offset, std::abs(s.center_x - 24.0), std::abs(s.center_y - 24.0)});
  }
  EXPECT_GT(inverted, 150u);
  EXPECT_LT(inverted, 250u);
  EXPECT_LE(max_offset, 1.5 + 4.0 + 1e-9);
  EXPECT_GT(max_offset, 3.0);
}

TEST(Glyph, GenerateWritesFilesAndManifest) {
  oracle::TempDir a("gen_a"), b("gen_b");
  auto set = generate_synthetic(Domain::source, 5, 11, a.path());
  EXPECT_EQ(set.dataset.size(), 20u);
  auto rows = parse_manifest(read_text_file(set.manifest));
  ASSERT_EQ(rows.size(), 20u);
  std::array<int, 4> per{};
  for (auto& r : rows) per[static_cast<std::size_t>(r.label)]++;
  EXPECT_EQ(per, (std::array<int, 4>{5, 5, 5, 5}));
  std::size_t files = 0;
  for (auto& e : fs::directory_iterator(a.path() / "images")) files += e.path().extension() == ".pgm";
  EXPECT_EQ(files, 20u);

  auto loaded = load_dataset(set.manifest);
  for (std::size_t i = 0; i < 20; ++i) EXPECT_TRUE(bit_identical(loaded.samples[i].image, set.dataset.samples[i].image));

  generate_synthetic(Domain::source, 5, 11, b.path());
  for (auto& r : rows) EXPECT_EQ(read_file(a.path() / r.path), read_file(b.path() / r.path)) << r.path;
  EXPECT_EQ(read_file(set.manifest), read_file(b.path() / "train.csv"));
}

TEST(Glyph, SeedsAndSplitsDiffer) {
  oracle::TempDir a("gen_c");
  auto s1 = generate_synthetic(Domain::target, 2, 1, a.path(), "train");
  auto s2 = generate_synthetic(Domain::target, 2, 1, a.path(), "test");
  auto s3 = generate_synthetic(Domain::target, 2, 2, a.path(), "other");
  EXPECT_FALSE(bit_identical(s1.dataset.samples[0].image, s2.dataset.samples[0].image));
  EXPECT_FALSE(bit_identical(s1.dataset.samples[0].image, s3.dataset.samples[0].image));
}

}  // namespace
