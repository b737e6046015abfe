#include "gtclust/core.h"

#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "oracle.h"

namespace gtclust {
namespace {

template <typename F>
Errc code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected gtclust::Error";
  return Errc::kInconsistentState;
}

TEST(DatasetTest, StoresPointsRowMajor) {
  const Dataset ds({{1.0, 2.0}, {3.0, 4.0}, {5.0, 6.0}});
  EXPECT_EQ(ds.size(), 3u);
  EXPECT_EQ(ds.dim(), 2u);
  EXPECT_EQ(ds.point(1)[0], 3.0);
  EXPECT_EQ(ds.point(2)[1], 6.0);
  EXPECT_EQ(ds.coords(), (std::vector<double>{1, 2, 3, 4, 5, 6}));
}

TEST(DatasetTest, FlatConstructorMatchesRows) {
  const Dataset a(2, {1, 2, 3, 4});
  const Dataset b({{1, 2}, {3, 4}});
  EXPECT_EQ(a.coords(), b.coords());
  EXPECT_EQ(a.size(), 2u);
}

TEST(DatasetTest, RejectsBadShapes) {
  EXPECT_EQ(code_of([] { Dataset({}); }), Errc::kInvalidInput);
  EXPECT_EQ(code_of([] { Dataset({{1.0, 2.0}, {3.0}}); }), Errc::kStructural);
  EXPECT_EQ(code_of([] { Dataset(0, {}); }), Errc::kInvalidInput);
  EXPECT_EQ(code_of([] { Dataset(2, {1, 2, 3}); }), Errc::kStructural);
  EXPECT_EQ(code_of([] { Dataset({Point{}}); }), Errc::kInvalidInput);
}

TEST(DatasetTest, RejectsNonFiniteCoordinates) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_EQ(code_of([&] { Dataset({{0.0, nan}}); }), Errc::kInvalidInput);
  EXPECT_EQ(code_of([&] { Dataset(std::vector<Point>{{inf}}); }), Errc::kInvalidInput);
}

TEST(IdealLoadTest, IsExactAndReduced) {
  EXPECT_EQ(ideal_load(150, 8), (Rational{75, 4}));
  EXPECT_EQ(ideal_load(6, 3), (Rational{2, 1}));
  EXPECT_EQ(ideal_load(13, 3), (Rational{13, 3}));
  EXPECT_TRUE(ideal_load(6, 3).is_integer());
  EXPECT_FALSE(ideal_load(13, 3).is_integer());
  EXPECT_DOUBLE_EQ(ideal_load(150, 8).to_double(), 18.75);
}

TEST(IdealLoadTest, RejectsBadK) {
  EXPECT_EQ(code_of([] { ideal_load(10, 0); }), Errc::kInvalidConfiguration);
  EXPECT_EQ(code_of([] { ideal_load(3, 4); }), Errc::kInvalidConfiguration);
}

TEST(GapTest, RoundsTowardWholePoints) {
  const Rational ideal{13, 3};  // 4.33...
  EXPECT_EQ(ceil_gap_below(ideal, 1), 4);
  EXPECT_EQ(ceil_gap_below(ideal, 4), 1);
  EXPECT_EQ(floor_gap_above(ideal, 8), 3);
  EXPECT_EQ(floor_gap_above(ideal, 5), 0);
  EXPECT_EQ(ceil_gap_below(Rational{7, 1}, 4), 3);
  EXPECT_EQ(floor_gap_above(Rational{7, 1}, 8), 1);
  EXPECT_DOUBLE_EQ(abs_gap(ideal, 1), 10.0 / 3.0);
  EXPECT_DOUBLE_EQ(abs_gap(Rational{7, 1}, 9), 2.0);
}

TEST(GapTest, MatchesFloatingPointOnRandomInputs) {
  oracle::Gen gen(11);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::int64_t n = gen.integer(1, 500);
    const std::int64_t k = gen.integer(1, n);
    const Rational ideal = ideal_load(n, k);
    const std::int64_t load = gen.integer(0, n);
    const double exact = static_cast<double>(n) / static_cast<double>(k);
    if (load < exact) {
      EXPECT_EQ(ceil_gap_below(ideal, load),
                static_cast<std::int64_t>(std::ceil(exact - load - 1e-12)));
    }
    if (load > exact) {
      EXPECT_EQ(floor_gap_above(ideal, load),
                static_cast<std::int64_t>(std::floor(load - exact + 1e-12)));
    }
    EXPECT_NEAR(abs_gap(ideal, load), std::abs(load - exact), 1e-9);
  }
}

TEST(ClusteringTest, DerivesLoadsAndMeans) {
  const Dataset ds({{0, 0}, {2, 0}, {10, 10}, {0, 4}});
  const Clustering cl(ds, 2, {0, 0, 1, 0});
  EXPECT_EQ(cl.loads(), (std::vector<std::int64_t>{3, 1}));
  EXPECT_DOUBLE_EQ(cl.center(0)[0], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(cl.center(0)[1], 4.0 / 3.0);
  EXPECT_EQ(cl.center(1), (Point{10, 10}));
  EXPECT_EQ(cl.members(0), (std::vector<std::size_t>{0, 1, 3}));
  EXPECT_EQ(cl.dim(), 2u);
}

TEST(ClusteringTest, EmptyClusterUsesFallbackCenter) {
  const Dataset ds(std::vector<Point>{{1.0}, {3.0}});
  const std::vector<Point> fallback{{-1.0}, {42.0}};
  const Clustering with(ds, 2, {0, 0}, fallback);
  EXPECT_EQ(with.center(1), (Point{42.0}));
  EXPECT_EQ(with.center(0), (Point{2.0}));
  const Clustering without(ds, 2, {0, 0});
  EXPECT_EQ(without.center(1), (Point{0.0}));
  EXPECT_EQ(without.load(1), 0);
}

TEST(ClusteringTest, RejectsInconsistentInput) {
  const Dataset ds(std::vector<Point>{{1.0}, {3.0}});
  EXPECT_EQ(code_of([&] { Clustering(ds, 2, {0}); }), Errc::kStructural);
  EXPECT_EQ(code_of([&] { Clustering(ds, 2, {0, 2}); }), Errc::kStructural);
  EXPECT_EQ(code_of([&] { Clustering(ds, 0, {0, 0}); }),
            Errc::kInvalidConfiguration);
  const std::vector<Point> wrong{{1.0}};
  EXPECT_EQ(code_of([&] { Clustering(ds, 2, {0, 0}, wrong); }),
            Errc::kStructural);
}

TEST(ObjectiveTest, LoadMetricExample) {
  const std::vector<std::int64_t> loads{4, 1, 8};
  // (1/3)^2 + (10/3)^2 + (11/3)^2
  EXPECT_DOUBLE_EQ(load_metric(loads, Rational{13, 3}), 222.0 / 9.0);
  const std::vector<std::int64_t> even{5, 5, 5};
  EXPECT_EQ(load_metric(even, Rational{5, 1}), 0.0);
  EXPECT_EQ(code_of([] { load_metric({}, Rational{1, 1}); }),
            Errc::kInvalidInput);
}

TEST(ObjectiveTest, SseAndLoadMetricMatchOracleOnRandomClusterings) {
  oracle::Gen gen(5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = static_cast<std::size_t>(gen.integer(1, 40));
    const std::size_t dim = static_cast<std::size_t>(gen.integer(1, 4));
    const std::size_t k = static_cast<std::size_t>(gen.integer(1, n));
    const Dataset ds(gen.points(n, dim, -50, 50));
    std::vector<ClusterId> a(n);
    for (auto& c : a) c = static_cast<ClusterId>(gen.integer(0, k - 1));
    const Clustering cl(ds, k, a);
    const ObjectiveState st = evaluate(ds, cl);
    const double want = oracle::total_sse(ds, a, k);
    EXPECT_NEAR(st.sse, want, 1e-9 * (1.0 + want));
    EXPECT_NEAR(st.load_metric,
                oracle::load_metric(cl.loads(), static_cast<double>(n),
                                    static_cast<double>(k)),
                1e-9 * (1.0 + st.load_metric));
    EXPECT_EQ(st.ideal_load,
              ideal_load(static_cast<std::int64_t>(n),
                         static_cast<std::int64_t>(k)));
  }
}

TEST(ObjectiveTest, ImprovementPercent) {
  EXPECT_DOUBLE_EQ(improvement_pct(100.0, 50.0), 50.0);
  EXPECT_DOUBLE_EQ(improvement_pct(10.0, 15.0), -50.0);
  EXPECT_DOUBLE_EQ(improvement_pct(8.0, 0.0), 100.0);
  EXPECT_EQ(code_of([] { improvement_pct(0.0, 1.0); }), Errc::kInvalidInput);
}

TEST(ObjectiveTest, ZeroInitialObjectiveReportsNoImprovement) {
  const ObjectiveState initial{0.0, 8.0, Rational{2, 1}};
  const ObjectiveState final_state{0.0, 2.0, Rational{2, 1}};
  const ImprovementReport r = improvement(initial, final_state);
  EXPECT_EQ(r.sse_improvement_pct, 0.0);
  EXPECT_DOUBLE_EQ(r.l_improvement_pct, 75.0);
}

TEST(ErrorTest, MessageCarriesClass) {
  const Error e(Errc::kParse, "row 3");
  EXPECT_EQ(e.code(), Errc::kParse);
  EXPECT_NE(std::string(e.what()).find("row 3"), std::string::npos);
  EXPECT_STREQ(to_string(Errc::kUndefinedIndex), "undefined index");
}

}  // namespace
}  // namespace gtclust
