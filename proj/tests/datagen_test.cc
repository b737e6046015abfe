#include "gtclust/datagen.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include "oracle.h"

namespace gtclust {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("gtclust_datagen_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
             "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  fs::path file(const std::string& name, const std::string& body) const {
    const fs::path p = path_ / name;
    std::ofstream(p) << body;
    return p;
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string parse_error(const fs::path& p,
                        std::optional<std::size_t> dim = std::nullopt) {
  try {
    load_csv(p, dim);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kParse);
    return e.what();
  }
  ADD_FAILURE() << "no parse error";
  return {};
}

TEST(GenerateDs1Test, DefaultShape) {
  const Dataset ds = generate_ds1(Ds1Config{});
  EXPECT_EQ(ds.size(), 150u);
  EXPECT_EQ(ds.dim(), 2u);
}

TEST(GenerateDs1Test, SameSeedIsBitIdentical) {
  Ds1Config c;
  c.seed = 42;
  EXPECT_EQ(generate_ds1(c).coords(), generate_ds1(c).coords());
  Ds1Config other = c;
  other.seed = 43;
  EXPECT_NE(generate_ds1(c).coords(), generate_ds1(other).coords());
}

TEST(GenerateDs1Test, TinyNoiseCollapsesBlobs) {
  Ds1Config c;
  c.std_dev = 1e-9;
  c.n_points = 20;
  c.blob_count = 3;  // sizes 7, 7, 6
  const Dataset ds = generate_ds1(c);
  const std::size_t starts[] = {0, 7, 14, 20};
  for (int b = 0; b < 3; ++b) {
    const auto first = ds.point(starts[b]);
    for (std::size_t i = starts[b]; i < starts[b + 1]; ++i) {
      for (std::size_t d = 0; d < 2; ++d) {
        EXPECT_NEAR(ds.point(i)[d], first[d], 1e-6);
      }
    }
    const auto p = ds.point(starts[b]);
    EXPECT_GE(p[0], -1e-6);
    EXPECT_LE(p[0], 10 + 1e-6);
  }
}

TEST(GenerateDs1Test, HonoursConfiguredSizes) {
  oracle::Gen gen(3);
  for (int trial = 0; trial < 30; ++trial) {
    Ds1Config c;
    c.n_points = static_cast<std::size_t>(gen.integer(1, 300));
    c.blob_count = static_cast<std::size_t>(gen.integer(1, c.n_points));
    c.dim = static_cast<std::size_t>(gen.integer(1, 5));
    c.seed = static_cast<std::uint64_t>(trial);
    const Dataset ds = generate_ds1(c);
    EXPECT_EQ(ds.size(), c.n_points);
    EXPECT_EQ(ds.dim(), c.dim);
  }
}

TEST(GenerateDs1Test, RejectsBadConfig) {
  Ds1Config c;
  c.std_dev = 0.0;
  EXPECT_THROW(generate_ds1(c), Error);
  c = Ds1Config{};
  c.n_points = 4;
  EXPECT_THROW(generate_ds1(c), Error);
}

TEST(LoadCsvTest, ReadsPlainRows) {
  const TempDir dir;
  const Dataset ds = load_csv(dir.file("a.csv", "1,2\n3.5,-4\n\n5e1,6\n"));
  EXPECT_EQ(ds.size(), 3u);
  EXPECT_EQ(ds.coords(), (std::vector<double>{1, 2, 3.5, -4, 50, 6}));
}

TEST(LoadCsvTest, SkipsHeaderAndChecksDimension) {
  const TempDir dir;
  const auto p = dir.file("h.csv", "a,b,c,d\n1,2,3,4\n5,6,7,8\n9,10,11,12\n");
  const Dataset ds = load_csv(p, 4);
  EXPECT_EQ(ds.size(), 3u);
  EXPECT_EQ(ds.dim(), 4u);
  EXPECT_NE(parse_error(p, 2).find("row 2"), std::string::npos);
}

TEST(LoadCsvTest, FiftyNineTownsShape) {
  const TempDir dir;
  std::string body = "x,y\n";
  for (int i = 0; i < 59; ++i) {
    body += std::to_string(i) + "," + std::to_string(i * 2) + "\n";
  }
  const Dataset ds = load_csv(dir.file("towns.csv", body), 2);
  EXPECT_EQ(ds.size(), 59u);
  EXPECT_EQ(ds.dim(), 2u);
}

TEST(LoadCsvTest, ErrorsNameRowAndColumn) {
  const TempDir dir;
  EXPECT_NE(parse_error(dir.file("empty.csv", "")).find("no data rows"),
            std::string::npos);
  const std::string bad = parse_error(dir.file("bad.csv", "1,2\n3,x\n"));
  EXPECT_NE(bad.find("row 2, column 2"), std::string::npos) << bad;
  const std::string ragged = parse_error(dir.file("r.csv", "1,2\n3,4,5\n"));
  EXPECT_NE(ragged.find("row 2"), std::string::npos) << ragged;
  EXPECT_NE(parse_error(dir.path() / "missing.csv").find("cannot open"),
            std::string::npos);
  EXPECT_NE(parse_error(dir.file("hdr.csv", "a,b\n")).find("no data rows"),
            std::string::npos);
}

TEST(LoadCsvTest, RoundTripsThroughSaveCsv) {
  const TempDir dir;
  oracle::Gen gen(6);
  for (int trial = 0; trial < 20; ++trial) {
    const Dataset ds(gen.points(static_cast<std::size_t>(gen.integer(1, 50)),
                                static_cast<std::size_t>(gen.integer(1, 4)),
                                -1e4, 1e4));
    const fs::path p = dir.path() / "rt.csv";
    save_csv(p, ds);
    const Dataset back = load_csv(p, ds.dim());
    ASSERT_EQ(back.size(), ds.size());
    for (std::size_t i = 0; i < ds.coords().size(); ++i) {
      EXPECT_NEAR(back.coords()[i], ds.coords()[i],
                  1e-8 * std::abs(ds.coords()[i]) + 1e-12);
    }
  }
}

}  // namespace
}  // namespace gtclust
