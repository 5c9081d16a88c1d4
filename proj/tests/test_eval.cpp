#include "mcc/error.hpp"
#include "mcc/eval.hpp"
#include "published_tables.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace mcc;
using namespace mcc::eval;

namespace {

// Chart record laid out axis-aligned at (x, y) with the given scale.
ChartRecord chart(double x, double y, double scale = 40.0, double tint = 0.0)
{
    const Homography h({scale, 0, x, 0, scale, y, 0, 0, 1});
    ChartRecord r;
    r.outline = apply(h, ColorCheckerModel::chart_quad());
    const auto m = ColorCheckerModel::synthetic();
    for (int k = 0; k < 24; ++k) {
        r.patches[k] = apply(h, ColorCheckerModel::patch_quad(k));
        r.mu[k] = m.color(k);
        r.mu[k][0] = std::min(1.0, r.mu[k][0] + tint);
    }
    return r;
}

ImageReport with_a0(const std::vector<double>& values)
{
    ImageReport r;
    for (double v : values) {
        Detection d;
        d.q.a0 = v;
        r.detections.push_back(d);
    }
    return r;
}

}  // namespace

TEST_SUITE("eval")
{
    TEST_CASE("identical prediction scores one")
    {
        const auto g = chart(100, 50);
        const auto r = match_image("a", {g}, {g});
        REQUIRE(r.detections.size() == 1);
        CHECK(r.tp == 1);
        CHECK(r.detections[0].true_positive);
        CHECK(r.detections[0].q.a0 == doctest::Approx(1.0));
        CHECK(r.detections[0].q.a1 == doctest::Approx(1.0));
        CHECK(r.detections[0].q.a2 == doctest::Approx(1.0));
    }

    TEST_CASE("published counts reproduce the printed metrics")
    {
        for (const auto& row : testing::kPublishedRows) {
            CAPTURE(row.table);
            CAPTURE(row.method);
            const auto m = compute_metrics({row.tp, row.fp, row.fn, row.total});
            CHECK(std::abs(m.accuracy - row.acc) <= testing::kRoundingTolerance);
            CHECK(std::abs(m.precision - row.prec) <= testing::kRoundingTolerance);
            CHECK(std::abs(m.recall - row.rec) <= testing::kRoundingTolerance);
            CHECK(std::abs(m.f_measure - row.f) <= testing::kRoundingTolerance);
        }
        const auto net = compute_metrics({855, 29, 116, 1000});
        CHECK(net.accuracy == doctest::Approx(0.855));
        CHECK(net.precision == doctest::Approx(855.0 / 884.0));
        CHECK(net.recall == doctest::Approx(855.0 / 971.0));
        const auto gmcc = compute_metrics({553, 3, 13, 569});
        CHECK(gmcc.precision == doctest::Approx(0.9946).epsilon(1e-4));
        CHECK(gmcc.recall == doctest::Approx(0.977).epsilon(1e-3));
        CHECK(gmcc.f_measure == doctest::Approx(0.986).epsilon(1e-3));
    }

    TEST_CASE("total defaults to the sum of the counts")
    {
        const auto m = compute_metrics({6, 2, 2, 0});
        CHECK(m.accuracy == doctest::Approx(0.6));
        CHECK(compute_metrics({}).f_measure == 0.0);
    }

    TEST_CASE("matching counts false positives and misses")
    {
        const auto g1 = chart(0, 0), g2 = chart(600, 0);
        const auto shifted = chart(5, 5);
        const auto far = chart(0, 800);
        const auto r = match_image("a", {shifted, far}, {g1, g2});
        CHECK(r.tp == 1);
        CHECK(r.fp == 1);
        CHECK(r.fn == 1);
        CHECK(r.missed == std::vector<int>{1});
        CHECK(r.detections[0].gt == 0);
        CHECK(r.detections[1].gt == -1);
        CHECK(r.tp + r.fn == 2);
        CHECK(r.tp + r.fp == 2);
    }

    TEST_CASE("two predictions on one chart give one true positive")
    {
        const auto g = chart(0, 0);
        const auto r = match_image("a", {chart(20, 0), chart(2, 0)}, {g});
        CHECK(r.tp == 1);
        CHECK(r.fp == 1);
        CHECK(r.detections[1].true_positive);
        CHECK_FALSE(r.detections[0].true_positive);
        CHECK(r.detections[0].gt == 0);  // scored against its best overlap
        CHECK(r.detections[0].q.a0 > 0.5);
    }

    TEST_CASE("threshold decides the true positives")
    {
        const auto g = chart(0, 0);
        const auto p = chart(150, 0);  // a0 about 0.45
        const double a0 = iou_box(p.outline.bbox(), g.outline.bbox());
        REQUIRE(a0 > 0.3);
        REQUIRE(a0 < 0.5);
        CHECK(match_image("a", {p}, {g}).tp == 0);
        CHECK(match_image("a", {p}, {g}, 0.3).tp == 1);
    }

    TEST_CASE("color difference lowers a2 only")
    {
        const auto g = chart(0, 0);
        const auto q = quality(chart(0, 0, 40.0, 0.3), g);
        CHECK(q.a0 == doctest::Approx(1.0));
        CHECK(q.a1 == doctest::Approx(1.0));
        CHECK(q.a2 < 1.0);
        CHECK(q.a2 >= 0.0);
    }

    TEST_CASE("matching does not depend on prediction order")
    {
        std::mt19937_64 rng(4);
        std::uniform_real_distribution<double> pos(0, 600), scale(20, 50);
        for (int trial = 0; trial < 30; ++trial) {
            std::vector<ChartRecord> gts, preds;
            for (int i = 0; i < 3; ++i)
                gts.push_back(chart(pos(rng), pos(rng), scale(rng)));
            for (int i = 0; i < 5; ++i)
                preds.push_back(chart(pos(rng), pos(rng), scale(rng)));
            const auto a = match_image("a", preds, gts);
            std::vector<int> perm{0, 1, 2, 3, 4};
            std::shuffle(perm.begin(), perm.end(), rng);
            std::vector<ChartRecord> shuffled;
            for (int i : perm)
                shuffled.push_back(preds[i]);
            const auto b = match_image("a", shuffled, gts);
            CHECK(a.tp == b.tp);
            CHECK(a.fp == b.fp);
            CHECK(a.missed == b.missed);
            for (int i = 0; i < 5; ++i)
                CHECK(b.detections[i].true_positive == a.detections[perm[i]].true_positive);
        }
    }

    TEST_CASE("image ids must pair up")
    {
        using Set = std::vector<std::pair<std::string, std::vector<ChartRecord>>>;
        const Set gts{{"a", {chart(0, 0)}}, {"b", {}}};
        CHECK_THROWS_AS(match_and_score(Set{{"a", {}}}, gts), ScoringError);
        CHECK_THROWS_AS(match_and_score(Set{{"a", {}}, {"b", {}}, {"c", {}}}, gts), ScoringError);
        CHECK_THROWS_AS(match_and_score(Set{{"a", {}}, {"a", {}}}, gts), ScoringError);
        const auto ok = match_and_score(Set{{"b", {}}, {"a", {chart(0, 0)}}}, gts);
        CHECK(ok.counts.tp == 1);
        CHECK(ok.metrics.precision == 1.0);
        CHECK(ok.metrics.recall == 1.0);
    }

    TEST_CASE("curve of perfect detections is one everywhere")
    {
        const auto c = accuracy_curve({with_a0({1, 1, 1})}, Metric::A0, 100);
        REQUIRE(c.size() == 101);
        for (const auto& p : c)
            CHECK(p.fraction == 1.0);
    }

    TEST_CASE("curve of a single detection steps at its value")
    {
        const auto c = accuracy_curve({with_a0({0.6})}, Metric::A0, 100);
        for (const auto& p : c)
            CHECK(p.fraction == (p.tau <= 0.6 ? 1.0 : 0.0));
    }

    TEST_CASE("curve equals direct counting")
    {
        const std::vector<double> v{0.05, 0.2, 0.33, 0.5, 0.5, 0.61, 0.7, 0.88, 0.95, 1.0};
        const auto c = accuracy_curve({with_a0({v.begin(), v.begin() + 4}), with_a0({v.begin() + 4, v.end()})},
                                      Metric::A0, 20);
        for (const auto& p : c) {
            int n = 0;
            for (double x : v)
                n += x >= p.tau;
            CHECK(p.fraction == doctest::Approx(n / 10.0));
        }
    }
}
