#include "doctest.h"

#include "hardy/grid.hpp"
#include "hardy/sampling.hpp"

#include <algorithm>
#include <set>

using namespace hardy;

namespace {

// Brute-force oracle: every dyadic rectangle, containment by scanning cells.
struct Brute {
    const OpenSet& s;
    bool inside(const DyadicRectangle& r) const {
        auto b = box_of(r, s.n1, s.n2);
        for (int i = b.lo1; i < b.hi1; ++i)
            for (int j = b.lo2; j < b.hi2; ++j)
                if (!s(i, j)) return false;
        return true;
    }
    std::vector<DyadicRectangle> all() const {
        std::vector<DyadicRectangle> out;
        for (int l1 = 0; (s.n1 >> l1) >= 1; ++l1)
            for (int k1 = 0; k1 < (1 << l1); ++k1)
                for (int l2 = 0; (s.n2 >> l2) >= 1; ++l2)
                    for (int k2 = 0; k2 < (1 << l2); ++k2) out.push_back({{l1, k1}, {l2, k2}});
        return out;
    }
    bool strictly_inside(const DyadicRectangle& a, const DyadicRectangle& b) const {
        return b.i1.contains(a.i1) && b.i2.contains(a.i2) && !(a == b);
    }
    std::vector<DyadicRectangle> maximal() const {
        auto rs = all();
        std::vector<DyadicRectangle> out;
        for (const auto& r : rs) {
            if (!inside(r)) continue;
            bool dominated = false;
            for (const auto& q : rs)
                if (strictly_inside(r, q) && inside(q)) {
                    dominated = true;
                    break;
                }
            if (!dominated) out.push_back(r);
        }
        return out;
    }
    std::vector<DyadicRectangle> maximal_dir(int dir) const {
        auto rs = all();
        std::vector<DyadicRectangle> out;
        for (const auto& r : rs) {
            if (!inside(r)) continue;
            bool grows = false;
            for (const auto& q : rs) {
                bool same_other = dir == 1 ? q.i2 == r.i2 : q.i1 == r.i1;
                bool wider = dir == 1 ? (q.i1.contains(r.i1) && !(q.i1 == r.i1)) : (q.i2.contains(r.i2) && !(q.i2 == r.i2));
                if (same_other && wider && inside(q)) {
                    grows = true;
                    break;
                }
            }
            if (!grows) out.push_back(r);
        }
        return out;
    }
};

std::vector<DyadicRectangle> sorted(std::vector<DyadicRectangle> v) {
    std::sort(v.begin(), v.end());
    return v;
}

Eigen::MatrixXd brute_strong_maximal(const Eigen::MatrixXd& g) {
    const int n1 = g.rows(), n2 = g.cols();
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n1, n2);
    for (int l1 = 0; (n1 >> l1) >= 1; ++l1)
        for (int l2 = 0; (n2 >> l2) >= 1; ++l2) {
            int s1 = n1 >> l1, s2 = n2 >> l2;
            for (int p = 0; p < n1 / s1; ++p)
                for (int q = 0; q < n2 / s2; ++q) {
                    double avg = g.block(p * s1, q * s2, s1, s2).mean();
                    for (int i = p * s1; i < (p + 1) * s1; ++i)
                        for (int j = q * s2; j < (q + 1) * s2; ++j) M(i, j) = std::max(M(i, j), avg);
                }
        }
    return M;
}

}  // namespace

TEST_CASE("axis validation") {
    CHECK_THROWS_WITH(Axis(3, 1.0), "grid too small");
    CHECK_THROWS_WITH(Axis(2, 1.0), "grid too small");
    CHECK_THROWS(Axis(12, 1.0));
    Axis a(16, 0.25);
    CHECK(a.length() == doctest::Approx(4.0));
    CHECK(a.levels() == 4);
}

TEST_CASE("lp_norm examples") {
    Axis a(4, 1.0);
    GridFunction f(a, a);
    CHECK(lp_norm(f, 1) == 0.0);
    f.v.setOnes();
    CHECK(lp_norm(f, 2) == doctest::Approx(4.0).epsilon(1e-14));
    Axis b(4, 0.5);
    GridFunction g(b, b);
    g.v(1, 2) = 1.0;
    CHECK(lp_norm(g, 1) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(lp_norm(g, std::numeric_limits<double>::infinity()) == 1.0);
    g.v(0, 0) = std::nan("");
    CHECK_THROWS_WITH(lp_norm(g, 2), "non-finite sample");
    CHECK_THROWS(lp_norm(f, 0.5));
}

TEST_CASE("lp_norm general p agrees with direct sum") {
    Axis a(8, 0.3);
    Rng rng(3);
    GridFunction f = random_sine_series(a, a, rng, 1, 3);
    double direct = std::pow((f.v.array().abs().pow(3.0)).sum() * 0.09, 1.0 / 3.0);
    CHECK(lp_norm(f, 3) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("maximal dyadic subrectangles") {
    Axis a(4, 1.0);
    SUBCASE("single dyadic rectangle") {
        OpenSet s(a, a);
        DyadicRectangle R{{1, 1}, {2, 2}};
        s.fill_box(box_of(R, 4, 4));
        auto m = maximal_dyadic_subrectangles(s);
        REQUIRE(m.size() == 1);
        CHECK(m[0] == R);
    }
    SUBCASE("L-shape of three quadrant cells") {
        Axis b(4, 1.0);
        OpenSet s(b, b);
        // quadrants of the 2x2 dyadic square at level (1,1), index (0,0) is cells [0,2)x[0,2)
        s.fill_box({0, 2, 0, 2});
        s.fill_box({2, 4, 0, 2});
        s.fill_box({0, 2, 2, 4});
        auto m = sorted(maximal_dyadic_subrectangles(s));
        Brute br{s};
        CHECK(m == sorted(br.maximal()));
        // the three quadrant squares are not merged into a single square
        for (const auto& r : m) CHECK(!(r.i1.level == 0 && r.i2.level == 0));
    }
    SUBCASE("full grid") {
        OpenSet s(a, a);
        s.fill_box({0, 4, 0, 4});
        auto m = maximal_dyadic_subrectangles(s);
        REQUIRE(m.size() == 1);
        CHECK(m[0] == DyadicRectangle{{0, 0}, {0, 0}});
    }
    SUBCASE("empty set") {
        OpenSet s(a, a);
        CHECK_THROWS_WITH(maximal_dyadic_subrectangles(s), "empty open set");
        CHECK_THROWS_WITH(maximal_in_direction(s, 1), "empty open set");
    }
}

TEST_CASE("maximal rectangles agree with brute-force enumeration on random sets") {
    Axis a(16, 1.0 / 16);
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        OpenSet s = random_open_set(a, a, rng);
        Brute br{s};
        CHECK(sorted(maximal_dyadic_subrectangles(s)) == sorted(br.maximal()));
        CHECK(sorted(maximal_in_direction(s, 1)) == sorted(br.maximal_dir(1)));
        CHECK(sorted(maximal_in_direction(s, 2)) == sorted(br.maximal_dir(2)));
    }
}

TEST_CASE("maximal rectangle properties") {
    Axis a(32, 1.0 / 32);
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        OpenSet s = random_open_set(a, a, rng);
        Prefix2D P(s);
        auto m = maximal_dyadic_subrectangles(s);
        std::set<DyadicRectangle> uniq(m.begin(), m.end());
        CHECK(uniq.size() == m.size());
        OpenSet cover(a, a);
        for (const auto& R : m) {
            CHECK(P.full(box_of(R, 32, 32)));
            if (R.i1.has_parent()) CHECK(!P.full(box_of({R.i1.parent(), R.i2}, 32, 32)));
            if (R.i2.has_parent()) CHECK(!P.full(box_of({R.i1, R.i2.parent()}, 32, 32)));
            cover.fill_box(box_of(R, 32, 32));
        }
        // every cell lies in a dyadic rectangle (itself), so the union is the set
        CHECK(cover.mask == s.mask);

        OpenSet big = enlarge(s, 0.5);
        Prefix2D E(big);
        auto m1 = maximal_in_direction(big, 1);
        std::set<DyadicRectangle> m1set(m1.begin(), m1.end());
        for (const auto& R : m) {
            DyadicInterval l = R.i1;
            while (l.has_parent() && E.full(box_of({l.parent(), R.i2}, 32, 32))) l = l.parent();
            CHECK(m1set.count({l, R.i2}) == 1);
            CHECK(l.contains(R.i1));
        }
    }
}

TEST_CASE("strong maximal function") {
    Axis a(16, 0.1);
    GridFunction g(a, a);
    g.v.setConstant(2.5);
    CHECK((strong_maximal(g).v.array() - 2.5).abs().maxCoeff() < 1e-14);
    g.v.setZero();
    CHECK(strong_maximal(g).v.isZero());
    g.v(3, 7) = 1.0;
    auto M = strong_maximal(g);
    CHECK((M.v - brute_strong_maximal(g.v)).cwiseAbs().maxCoeff() < 1e-14);
    // every cell shares the whole-domain rectangle with the point mass
    CHECK(M.v.minCoeff() >= 1.0 / 256 - 1e-15);
    g.v(0, 0) = -1;
    CHECK_THROWS(strong_maximal(g));
}

TEST_CASE("strong maximal is monotone and sublinear") {
    Axis a(16, 1.0 / 16);
    Rng rng(8);
    std::uniform_real_distribution<double> u(0, 1);
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::MatrixXd g(16, 16), h(16, 16);
        for (int i = 0; i < 256; ++i) {
            g.data()[i] = u(rng);
            h.data()[i] = u(rng);
        }
        Eigen::MatrixXd Mg = strong_maximal(g), Mh = strong_maximal(h);
        CHECK((Mg - brute_strong_maximal(g)).cwiseAbs().maxCoeff() < 1e-13);
        Eigen::MatrixXd Msum = strong_maximal(g + h);
        CHECK(((Mg + Mh) - Msum).minCoeff() > -1e-13);
        Eigen::MatrixXd Mbig = strong_maximal(g + h.cwiseAbs());
        CHECK((Mbig - Mg).minCoeff() > -1e-13);
    }
}

TEST_CASE("enlarge") {
    Axis a(64, 1.0 / 64);
    OpenSet full(a, a);
    full.fill_box({0, 64, 0, 64});
    CHECK(enlarge(full, 0.5).mask == full.mask);
    Rng rng(21);
    double worst = 0;
    for (int trial = 0; trial < 100; ++trial) {
        OpenSet s = random_open_set(a, a, rng);
        OpenSet e = enlarge(s, 0.5);
        CHECK(s.subset_of(e));
        worst = std::max(worst, e.measure() / s.measure());
        OpenSet ee = enlarge(e, 0.5);
        CHECK(e.subset_of(ee));
    }
    MESSAGE("max |enlarge(O)|/|O| over 100 random sets: " << worst);
    CHECK(worst <= 16.0);
}

TEST_CASE("journe gamma") {
    Axis a(32, 1.0 / 32);
    SUBCASE("single rectangle") {
        OpenSet s(a, a);
        DyadicRectangle R{{2, 1}, {3, 5}};
        s.fill_box(box_of(R, 32, 32));
        CHECK(journe_gamma(R, s, 1) == 1.0);
        CHECK(journe_gamma(R, s, 2) == 1.0);
        // m_2 holds I' x J for every dyadic I' inside I (3 levels below I on a 32-cell axis),
        // with gamma_1 = l(I)/l(I'): the sum is |R| (1 + 1/2 + 1/4 + 1/8)
        auto [s1, s2] = journe_sum(s, 1.0);
        CHECK(s1 == doctest::Approx(s.measure() * 1.875));
        // m_1 holds I x J' for J' inside J (2 levels below J)
        CHECK(s2 == doctest::Approx(s.measure() * 1.75));
        auto m1 = maximal_in_direction(s, 1);
        CHECK(std::find(m1.begin(), m1.end(), R) != m1.end());
        for (const auto& q : m1) CHECK(q.i1 == R.i1);
    }
    SUBCASE("wide strip") {
        OpenSet s(a, a);
        s.fill_box({0, 32, 8, 12});  // full axis 1 x a dyadic interval of 4 cells
        DyadicRectangle R{{3, 2}, {3, 2}};  // 4x4 square inside the strip
        CHECK(journe_gamma(R, s, 1) == doctest::Approx(8.0));
        CHECK(journe_gamma(R, s, 2) == 1.0);
        auto m1 = maximal_in_direction(s, 1);
        REQUIRE(!m1.empty());
        bool has_strip = std::find(m1.begin(), m1.end(), DyadicRectangle{{0, 0}, {3, 2}}) != m1.end();
        CHECK(has_strip);
    }
    SUBCASE("gamma at least one and rejects outside rectangles") {
        Rng rng(2);
        OpenSet s = random_open_set(a, a, rng);
        for (const auto& R : maximal_dyadic_subrectangles(s)) {
            CHECK(journe_gamma(R, s, 1) >= 1.0);
            CHECK(journe_gamma(R, s, 2) >= 1.0);
        }
        OpenSet t(a, a);
        t.set(0, 0);
        CHECK_THROWS(journe_gamma(DyadicRectangle{{5, 31}, {5, 31}}, t, 1));
    }
}

TEST_CASE("journe sums are monotone in delta") {
    Axis a(32, 1.0 / 32);
    Rng rng(4);
    for (int trial = 0; trial < 10; ++trial) {
        OpenSet s = random_open_set(a, a, rng);
        auto [a1, a2] = journe_sum(s, 0.5);
        auto [b1, b2] = journe_sum(s, 1.0);
        auto [c1, c2] = journe_sum(s, 2.0);
        CHECK(b1 <= a1 + 1e-15);
        CHECK(c1 <= b1 + 1e-15);
        CHECK(b2 <= a2 + 1e-15);
        CHECK(c2 <= b2 + 1e-15);
    }
}

TEST_CASE("scale grid and cone radius") {
    Axis a(64, 1.0 / 64);
    ScaleGrid g = default_scale_grid(a);
    CHECK(g.t.front() <= a.h / 2 + 1e-15);
    CHECK(g.t.back() >= a.length() - 1e-12);
    for (size_t i = 1; i < g.size(); ++i) CHECK(g[i] / g[i - 1] == doctest::Approx(std::exp2(1.0 / 8)));
    CHECK(g.weight() == doctest::Approx(std::log(2.0) / 8));
    CHECK(cone_radius(1.0, 1.0) == 0);
    CHECK(cone_radius(1.0000001, 1.0) == 1);
    CHECK(cone_radius(0.3, 1.0) == 0);
    CHECK(cone_radius(2.5, 1.0) == 2);
    CHECK(cone_radius(3.0 * (1 + 1e-14), 1.0) == 2);
}

TEST_CASE("dilates") {
    DyadicRectangle R{{2, 1}, {3, 0}};  // 16-cell axis: cells [4,8) x [0,2)
    CellBox b = dilate(R, 16, 16, 3.0);
    CHECK(b.lo1 == 0);
    CHECK(b.hi1 == 12);
    CHECK(b.lo2 == 0);
    CHECK(b.hi2 == 4);
    CellBox c = dilate(R, 16, 16, 1.0);
    CHECK(c.contains(box_of(R, 16, 16)));
    CHECK(box_of(R, 16, 16).contains(c));
}

TEST_CASE("open set rle") {
    Axis a(4, 1.0);
    OpenSet s(a, a);
    s.set(0, 1);
    s.set(0, 2);
    CHECK(s.rle() == "4x4:1,2,13");
}
