#include "mcc/error.hpp"
#include "mcc/recognition.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <map>
#include <random>

using namespace mcc;
using namespace mcc::recognition;
using mcc::testing::square_patch;

namespace {

const ColorCheckerModel& model()
{
    static const ColorCheckerModel m = ColorCheckerModel::synthetic();
    return m;
}

// Region with features set directly, passing every filter by default.
imgproc::Region region(double area, double convex_area, double axis_minor, double axis_major, double perimeter,
                       double entropy)
{
    imgproc::Region r;
    r.pixel_count = static_cast<long>(area);
    r.convex_area = convex_area;
    r.axis_minor = axis_minor;
    r.axis_major = axis_major;
    r.perimeter = perimeter;
    r.entropy = entropy;
    return r;
}

// Model plane -> image for a mildly projective view of the chart.
Homography chart_view()
{
    const auto chart = ColorCheckerModel::chart_quad();
    const std::array<Point2, 4> img{Point2{100, 80}, Point2{540, 95}, Point2{525, 420}, Point2{110, 400}};
    return estimate_homography(chart.corners, img);
}

PatchCandidate warped_patch(const Homography& h, int k, double gain = 0.8)
{
    PatchCandidate p;
    p.quad = apply(h, ColorCheckerModel::patch_quad(k));
    p.center = h.apply(ColorCheckerModel::patch_center(k));
    p.area = p.quad.area();
    double longest = 0;
    for (int i = 0; i < 4; ++i)
        longest = std::max(longest, distance(p.quad.corners[i], p.quad.corners[(i + 1) % 4]));
    p.axis_max = longest;
    for (int c = 0; c < 3; ++c)
        p.mean_color[c] = gain * model().color(k)[c];
    return p;
}

// Assignment holding model colors for a rows x cols block, filled by `at(r, c)`.
template <class F>
GridAssignment color_grid(int rows, int cols, F at)
{
    GridAssignment g;
    g.rows = rows;
    g.cols = cols;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            g.cell_patch.push_back(r * cols + c);
            g.cell_color.emplace_back(model().color(at(r, c)));
            g.cell_centers.push_back({static_cast<double>(c), static_cast<double>(r)});
        }
    return g;
}

// Model indices of the R x C block at (r0, c0), seen rotated counter-clockwise
// by `quarter` quarter turns in the image.
std::vector<std::vector<int>> seen_block(int r0, int c0, int R, int C, int quarter)
{
    std::vector<std::vector<int>> m(R, std::vector<int>(C));
    for (int i = 0; i < R; ++i)
        for (int j = 0; j < C; ++j)
            m[i][j] = (r0 + i) * ColorCheckerModel::kCols + c0 + j;
    for (int q = 0; q < quarter; ++q) {
        const int rows = static_cast<int>(m.size()), cols = static_cast<int>(m[0].size());
        std::vector<std::vector<int>> d(cols, std::vector<int>(rows));
        for (int i = 0; i < cols; ++i)
            for (int j = 0; j < rows; ++j)
                d[i][j] = m[j][cols - 1 - i];
        m = std::move(d);
    }
    return m;
}

GridAssignment grid_of(const std::vector<std::vector<int>>& d)
{
    return color_grid(static_cast<int>(d.size()), static_cast<int>(d[0].size()),
                      [&](int r, int c) { return d[r][c]; });
}

CheckerHypothesis box_hypothesis(double x0, double y0, double x1, double y1, double cost)
{
    CheckerHypothesis h;
    h.corners = {{Point2{x0, y0}, Point2{x1, y0}, Point2{x1, y1}, Point2{x0, y1}}};
    h.cost = cost;
    return h;
}

}  // namespace

TEST_SUITE("recognition")
{
    TEST_CASE("region filter accepts an ideal square and rejects each single violation")
    {
        // 40x40 square: cf = pi/4.
        const auto good = region(1600, 1600, 40, 40, 160, 0.0);
        CHECK(passes_region_filter(good));
        CHECK(std::abs(4 * std::numbers::pi * 1600 / (160.0 * 160.0) - std::numbers::pi / 4) < 1e-12);

        CHECK_FALSE(passes_region_filter(region(1600, 1600 / 0.89, 40, 40, 160, 0.0)));  // convexity
        CHECK_FALSE(passes_region_filter(region(1600, 1600, 15.9, 40, 160, 0.0)));       // axes ratio
        CHECK_FALSE(passes_region_filter(region(1600, 1600, 40, 40, 180, 0.0)));         // cf 0.62
        CHECK_FALSE(passes_region_filter(region(1600, 1600, 40, 40, 142, 0.0)));         // cf 0.997
        CHECK_FALSE(passes_region_filter(region(1600, 1600, 40, 40, 160, 4.95)));        // entropy

        CHECK(passes_region_filter(region(1600, 1600 / 0.91, 40, 40, 160, 0.0)));
        CHECK(passes_region_filter(region(1600, 1600, 16.1, 40, 160, 0.0)));
        CHECK(passes_region_filter(region(1600, 1600, 40, 40, 160, 4.85)));

        // Disc of radius 40: cf = 1.
        const double pi = std::numbers::pi;
        CHECK_FALSE(passes_region_filter(region(pi * 1600, pi * 1600, 80, 80, 2 * pi * 40, 0.0)));
    }

    TEST_CASE("region filter on rasterized shapes")
    {
        auto features = [](const BinaryMask& m, const ImageBuffer& img) {
            const auto regs = imgproc::connected_components(m, img);
            REQUIRE(regs.size() == 1);
            return regs[0];
        };
        const ImageBuffer flat(120, 120, 3, 128);
        BinaryMask square(120, 120);
        for (int y = 30; y < 90; ++y)
            for (int x = 30; x < 90; ++x)
                square.set(x, y, true);
        CHECK(passes_region_filter(features(square, flat)));

        // 256 gray levels spread evenly over the square: entropy 8.
        ImageBuffer noisy(120, 120, 3);
        int v = 0;
        for (int y = 30; y < 90; ++y)
            for (int x = 30; x < 90; ++x, ++v)
                for (int c = 0; c < 3; ++c)
                    noisy.at(x, y, c) = static_cast<std::uint8_t>(v % 256);
        const auto r = features(square, noisy);
        CHECK(r.entropy > 4.9);
        CHECK_FALSE(passes_region_filter(r));
    }

    TEST_CASE("extract drops a triangle")
    {
        BinaryMask tri(100, 100);
        for (int y = 10; y < 90; ++y)
            for (int x = 10; x <= 10 + (y - 10); ++x)
                tri.set(x, y, true);
        const ImageBuffer img(100, 100, 3, 100);
        const auto regs = imgproc::connected_components(tri, img);
        REQUIRE(regs.size() == 1);
        CHECK(extract_patches(regs, img).empty());
    }

    TEST_CASE("frontal render gives 24 candidates centered on the true patches")
    {
        for (const char* bg : {"@gray:0.5", "@procedural"})
            for (double tz : {-15.0, -20.0, -30.0}) {
                CAPTURE(bg);
                CAPTURE(tz);
                const auto scene = testing::single_chart(model(), testing::frontal(tz), bg);
                const auto cands = testing::patch_candidates(scene.image);
                CHECK(cands.size() == 24);
                const double s = 400.0 / 640.0;
                for (const auto& p : cands) {
                    double best = 1e9;
                    for (const auto& q : scene.truth.checkers[0].patches) {
                        const Point2 c = q.centroid();
                        best = std::min(best, distance(p.center, {(c.x + 0.5) * s - 0.5, (c.y + 0.5) * s - 0.5}));
                    }
                    CHECK(best < 1.0);
                }
            }
    }

    TEST_CASE("distance uses the area weight")
    {
        const auto a = square_patch({0, 0}, 10), b = square_patch({30, 40}, 10);
        CHECK(patch_distance(a, b) == doctest::Approx(50.0));
        const auto c = square_patch({30, 40}, 20);  // areas 100 vs 400
        CHECK(patch_distance(a, c) == doctest::Approx(50.0 * (1.0 + 300.0 / 500.0)));
    }

    TEST_CASE("two adjacent patches connect but the group is too small")
    {
        const std::vector<PatchCandidate> p{square_patch({0, 0}, 10), square_patch({12, 0}, 10)};
        const auto comp = similarity_components(p);
        CHECK(comp[0] == comp[1]);
        CHECK(cluster_patches(p).empty());
    }

    TEST_CASE("full grid forms one group, two distant charts form two")
    {
        std::vector<PatchCandidate> p;
        for (const auto& q : testing::grid_patches(40, 8))
            p.push_back(square_patch(q.centroid(), 40));
        auto groups = cluster_patches(p);
        REQUIRE(groups.size() == 1);
        CHECK(groups[0].size() == 24);

        const double shift = 6 * 48 + 3 * 48 + 10;
        for (const auto& q : testing::grid_patches(40, 8))
            p.push_back(square_patch(q.centroid() + Point2{shift, 0}, 40));
        groups = cluster_patches(p);
        REQUIRE(groups.size() == 2);
        CHECK(groups[0].size() == 24);
        CHECK(groups[1].size() == 24);
    }

    TEST_CASE("similarity graph matches union-find on random patch sets")
    {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> pos(0, 300), side(5, 25);
        for (int trial = 0; trial < 30; ++trial) {
            std::vector<PatchCandidate> p;
            const int n = 5 + trial % 46;
            for (int i = 0; i < n; ++i)
                p.push_back(square_patch({pos(rng), pos(rng)}, side(rng)));
            const auto comp = similarity_components(p);
            CHECK(testing::same_partition(comp, testing::bruteforce_components(p, 1.65)));

            // Groups are exactly the components with at least 4 members.
            std::size_t expected = 0;
            std::map<int, int> sizes;
            for (int c : comp)
                ++sizes[c];
            for (auto [id, sz] : sizes)
                expected += sz >= 4 ? sz : 0;
            std::size_t got = 0;
            for (const auto& g : cluster_patches(p)) {
                CHECK(g.size() >= 4);
                got += g.size();
            }
            CHECK(got == expected);
        }
    }

    TEST_CASE("complete grid on a full warped chart")
    {
        const Homography h = chart_view();
        PatchGroup group;
        for (int k = 0; k < 24; ++k)
            group.push_back(warped_patch(h, k));
        const auto g = complete_grid(group);
        CHECK(g.rows == 4);
        CHECK(g.cols == 6);
        CHECK(g.assigned() == 24);
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 6; ++c)
                CHECK(g.patch_at(r, c) == r * 6 + c);
    }

    TEST_CASE("complete grid recovers a missing corner patch")
    {
        const Homography h = chart_view();
        for (int missing : {0, 5, 18, 23}) {
            PatchGroup group;
            for (int k = 0; k < 24; ++k)
                if (k != missing)
                    group.push_back(warped_patch(h, k));
            const auto g = complete_grid(group);
            REQUIRE(g.rows == 4);
            REQUIRE(g.cols == 6);
            const int cell = missing;
            CHECK(g.cell_patch[cell] == -1);
            CHECK_FALSE(g.cell_color[cell].has_value());
            CHECK(distance(g.cell_centers[cell], h.apply(ColorCheckerModel::patch_center(missing))) < 2.0);
        }
    }

    TEST_CASE("2x2 sub-grid is placed and extrapolated to the full chart")
    {
        const Homography h = chart_view();
        // Rows 1-2, columns 0-1 of the chart.
        PatchGroup group;
        for (int k : {6, 7, 12, 13})
            group.push_back(warped_patch(h, k));
        const auto g = complete_grid(group);
        REQUIRE(g.rows == 2);
        REQUIRE(g.cols == 2);
        CHECK(g.assigned() == 4);

        const auto o = fit_orientation(g, model());
        CHECK(o.theta == 0);
        CHECK(o.delta == 6);
        const auto hyp = build_hypothesis(group, g, o);
        for (int k = 0; k < 24; ++k)
            for (int i = 0; i < 4; ++i)
                CHECK(distance(hyp.patch_quads[k].corners[i],
                               h.apply(ColorCheckerModel::patch_quad(k).corners[i])) < 2.0);
    }

    TEST_CASE("orientation of an exact full grid")
    {
        const auto id = fit_orientation(grid_of(seen_block(0, 0, 4, 6, 0)), model());
        CHECK(id.theta == 0);
        CHECK(id.delta == 1);
        CHECK(id.cost == doctest::Approx(0.0).epsilon(1e-12));

        const auto flipped = fit_orientation(grid_of(seen_block(0, 0, 4, 6, 2)), model());
        CHECK(flipped.theta == 180);
        CHECK(flipped.delta == 1);
        CHECK(flipped.cost == doctest::Approx(0.0).epsilon(1e-12));
    }

    TEST_CASE("partial sub-grids resolve to the right shift and rotation")
    {
        // 2x2 block at rows 1-2, columns 0-1, upright.
        const auto a = fit_orientation(grid_of(seen_block(1, 0, 2, 2, 0)), model());
        CHECK(a.theta == 0);
        CHECK(a.delta == 6);

        // 2x3 block at rows 1-2, columns 2-4, seen turned a quarter counter-clockwise.
        const auto b = fit_orientation(grid_of(seen_block(1, 2, 2, 3, 1)), model());
        CHECK(b.theta == 90);
        CHECK(b.delta == 7);
    }

    TEST_CASE("orientation recovery over every placement and rotation")
    {
        int cases = 0;
        for (int R = 1; R <= 4; ++R)
            for (int C = 1; C <= 6; ++C)
                for (int r0 = 0; r0 + R <= 4; ++r0)
                    for (int c0 = 0; c0 + C <= 6; ++c0) {
                        const int chromatic = std::max(0, std::min(r0 + R, 3) - r0) * C;
                        if (chromatic < 4)
                            continue;
                        for (int q = 0; q < 4; ++q) {
                            const auto o = fit_orientation(grid_of(seen_block(r0, c0, R, C, q)), model());
                            CAPTURE(R);
                            CAPTURE(C);
                            CAPTURE(r0);
                            CAPTURE(c0);
                            CHECK(o.theta == 90 * q);
                            CHECK(o.row_offset == r0);
                            CHECK(o.col_offset == c0);
                            ++cases;
                        }
                    }
        CHECK(cases > 100);
    }

    TEST_CASE("oversized sub-grid is malformed")
    {
        GridAssignment g = color_grid(5, 6, [](int, int) { return 0; });
        CHECK_THROWS_AS(fit_orientation(g, model()), MalformedGroup);
    }

    TEST_CASE("score of an exact noiseless chart is near zero")
    {
        const auto pose = testing::frontal(-20);
        const auto scene = testing::single_chart(model(), pose, "@gray:0.5", 0.0);
        const auto h = hypothesis_from_homography(render::chart_homography(pose, render::Camera{}));
        const auto s = score_hypothesis(h, scene.image, model());
        CHECK(s.cost >= 0.0);
        CHECK(s.cost <= 1e-3);
    }

    TEST_CASE("halving intensity keeps the angular terms")
    {
        const auto pose = testing::frontal(-20);
        auto scene = testing::single_chart(model(), pose, "@gray:0.5", 0.0);
        const auto h = hypothesis_from_homography(render::chart_homography(pose, render::Camera{}));
        const auto full = score_hypothesis(h, scene.image, model());
        for (auto& v : scene.image.data())
            v = static_cast<std::uint8_t>(v / 2);
        const auto half = score_hypothesis(h, scene.image, model());
        double ang_full = 0, ang_half = 0;
        for (int k = 0; k < 24; ++k) {
            ang_full += 1 - cosine_similarity(full.mu[k], model().color(k));
            ang_half += 1 - cosine_similarity(half.mu[k], model().color(k));
        }
        // Only 8-bit rounding separates them.
        CHECK(std::abs(ang_full - ang_half) < 2e-3);
    }

    TEST_CASE("score over a flat gray image meets the analytic bound")
    {
        const ImageBuffer gray(1024, 640, 3, 128);
        const auto h = hypothesis_from_homography(render::chart_homography(testing::frontal(-20), render::Camera{}));
        double bound = 0;
        for (int k = 0; k < 24; ++k)
            bound += 1 - cosine_similarity({1, 1, 1}, model().color(k));
        const auto s = score_hypothesis(h, gray, model());
        CHECK(s.cost >= bound - 1e-9);
        CHECK(s.cost == doctest::Approx(bound).epsilon(1e-9));
    }

    TEST_CASE("score throws when the chart is entirely outside")
    {
        const ImageBuffer img(200, 200, 3, 128);
        const auto h = hypothesis_from_homography(Homography::translation(1000, 1000));
        CHECK_THROWS_AS(score_hypothesis(h, img, model()), InvalidHypothesis);
    }

    TEST_CASE("selection keeps the cheaper of two overlapping hypotheses")
    {
        const auto r = select_hypotheses({box_hypothesis(0, 0, 100, 80, 0.4), box_hypothesis(0, 0, 100, 100, 0.1)},
                                         std::nullopt);
        REQUIRE(r.hypotheses.size() == 1);
        CHECK(r.hypotheses[0].cost == 0.1);
    }

    TEST_CASE("selection with a known count")
    {
        const auto three = select_hypotheses({box_hypothesis(0, 0, 50, 50, 2.0), box_hypothesis(100, 0, 150, 50, 3.0),
                                              box_hypothesis(200, 0, 250, 50, 4.0)},
                                             3);
        CHECK(three.hypotheses.size() == 3);

        // 0.2 overlaps 0.1 heavily, the rest are disjoint.
        std::vector<CheckerHypothesis> five{box_hypothesis(0, 0, 100, 100, 0.5), box_hypothesis(5, 5, 105, 105, 0.2),
                                            box_hypothesis(300, 0, 400, 100, 0.9), box_hypothesis(150, 0, 250, 100, 0.3),
                                            box_hypothesis(0, 0, 100, 100, 0.1)};
        const auto two = select_hypotheses(five, 2);
        REQUIRE(two.hypotheses.size() == 2);
        CHECK(two.hypotheses[0].cost == 0.1);
        CHECK(two.hypotheses[1].cost == 0.3);
        CHECK(select_hypotheses({}, std::nullopt).hypotheses.empty());
    }

    TEST_CASE("selection output is sorted, non-overlapping and prefix stable")
    {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> pos(0, 400), size(20, 120), cost(0, 1);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<CheckerHypothesis> c;
            for (int i = 0; i < 15; ++i) {
                const double x = pos(rng), y = pos(rng), s = size(rng);
                c.push_back(box_hypothesis(x, y, x + s, y + s, cost(rng)));
            }
            const auto r = select_hypotheses(c, std::nullopt, 2.0);
            for (std::size_t i = 0; i < r.hypotheses.size(); ++i) {
                if (i > 0)
                    CHECK(r.hypotheses[i - 1].cost <= r.hypotheses[i].cost);
                for (std::size_t j = i + 1; j < r.hypotheses.size(); ++j)
                    CHECK(iou_box(r.hypotheses[i].bbox(), r.hypotheses[j].bbox()) < 0.5);
            }
            if (r.hypotheses.size() < 2)
                continue;
            // Drop the last accepted one: earlier acceptances are unchanged.
            const double last = r.hypotheses.back().cost;
            std::erase_if(c, [&](const CheckerHypothesis& h) { return h.cost == last; });
            const auto r2 = select_hypotheses(c, std::nullopt, 2.0);
            for (std::size_t i = 0; i + 1 < r.hypotheses.size(); ++i)
                CHECK(r2.hypotheses[i].cost == r.hypotheses[i].cost);
        }
    }

    TEST_CASE("cost threshold mode drops expensive hypotheses")
    {
        const auto r = select_hypotheses({box_hypothesis(0, 0, 10, 10, 1.2), box_hypothesis(50, 0, 60, 10, 1.7)},
                                         std::nullopt, 1.5);
        REQUIRE(r.hypotheses.size() == 1);
        CHECK(r.hypotheses[0].cost == 1.2);
    }

    TEST_CASE("detect finds a frontal chart")
    {
        const auto scene = testing::single_chart(model(), testing::frontal(-20), "@procedural");
        const auto r = detect(scene.image, model());
        REQUIRE(r.hypotheses.size() == 1);
        const auto& h = r.hypotheses[0];
        CHECK(eval::quality(testing::record(h), testing::record(scene.truth.checkers[0])).a0 >= 0.9);
        CHECK(h.theta == 0);
        CHECK(h.cost < 0.3);
        for (int k = 0; k < 24; ++k) {
            const auto q = apply(h.homography, ColorCheckerModel::patch_quad(k));
            for (int i = 0; i < 4; ++i)
                CHECK(distance(q.corners[i], h.patch_quads[k].corners[i]) < 1e-6);
        }
    }

    TEST_CASE("detect with a ground-truth roi matches full-image mode")
    {
        render::RigidTransform pose = testing::frontal(-24);
        pose.rz = 0.3;
        pose.rx = 0.2;
        pose.tx = 2;
        const auto scene = testing::single_chart(model(), pose, "@procedural");
        const auto full = detect(scene.image, model());
        const auto roi = detect(scene.image, model(), std::vector<Box>{scene.truth.checkers[0].bbox});
        REQUIRE(full.hypotheses.size() == 1);
        REQUIRE(roi.hypotheses.size() == 1);
        REQUIRE(roi.hypotheses[0].roi.has_value());
        for (int i = 0; i < 4; ++i)
            CHECK(distance(full.hypotheses[0].corners.corners[i], roi.hypotheses[0].corners.corners[i]) < 1.0);
    }

    TEST_CASE("detect with the whole image as roi equals full-image mode")
    {
        const auto scene = testing::single_chart(model(), testing::frontal(-22), "@procedural");
        const auto full = detect(scene.image, model());
        const auto roi = detect(scene.image, model(), std::vector<Box>{{0, 0, 1023, 639}});
        REQUIRE(full.hypotheses.size() == roi.hypotheses.size());
        for (std::size_t j = 0; j < full.hypotheses.size(); ++j) {
            CHECK(full.hypotheses[j].cost == doctest::Approx(roi.hypotheses[j].cost).epsilon(1e-12));
            for (int i = 0; i < 4; ++i)
                CHECK(distance(full.hypotheses[j].corners.corners[i], roi.hypotheses[j].corners.corners[i]) < 1e-9);
        }
    }

    TEST_CASE("detect on a background without a chart is empty")
    {
        for (const char* bg : {"@procedural", "@gray:0.4"}) {
            const auto img = render::make_background(bg, render::Camera{}, 17);
            CHECK(detect(img, model()).hypotheses.empty());
        }
    }

    TEST_CASE("detect rejects an empty image")
    {
        CHECK_THROWS_AS(detect(ImageBuffer{}, model()), InvalidInput);
    }
}
