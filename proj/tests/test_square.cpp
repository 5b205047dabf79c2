#include "doctest.h"

#include "hardy/sampling.hpp"
#include "hardy/square.hpp"

#include <cmath>
#include <random>

using namespace hardy;

namespace {

GridFunction reflect(const GridFunction& f) {
    GridFunction r = f;
    r.v = f.v.colwise().reverse().rowwise().reverse().eval();
    return r;
}

}  // namespace

TEST_CASE("area integral of zero and triangle inequality") {
    Axis a = unit_axis(16);
    auto P = free_pair(a, a);
    CHECK(area_integral(P.zeros(), P).v.cwiseAbs().maxCoeff() == 0.0);
    CHECK(hardy_norm(P.zeros(), P) == 0.0);
    Rng rng(11);
    GridFunction f1 = random_noise(a, a, rng), f2 = random_noise(a, a, rng);
    GridFunction s = f1;
    s.v += f2.v;
    Eigen::MatrixXd lhs = area_integral(s, P).v;
    Eigen::MatrixXd rhs = area_integral(f1, P).v + area_integral(f2, P).v;
    CHECK((lhs.array() <= rhs.array() + 1e-12).all());
    GridFunction g = f1;
    g.v *= -2.5;
    CHECK(hardy_norm(g, P) == doctest::Approx(2.5 * hardy_norm(f1, P)).epsilon(1e-12));
}

TEST_CASE("area integral equals the cone functional of Q_t f") {
    Axis a1 = unit_axis(16), a2 = unit_axis(8);
    Rng rng(12);
    ProductOperatorPair P{build_schrodinger(a1, random_potential(a1, rng, 30)), build_laplacian(a2)};
    GridFunction f = random_noise(a1, a2, rng);
    TentGrid g = TentGrid::standard(a1, a2);
    GridFunction S = area_integral(f, P, g);
    GridFunction A = tent_a_functional(q_tent(f, P, g));
    CHECK((S.v - A.v).cwiseAbs().maxCoeff() < 1e-10 * S.v.maxCoeff());
}

TEST_CASE("L2 identity for the area integral") {
    // continuum constant: (2 * int u^3 exp(-2u^2) du)^(1/2) per axis = 1/2, so 1/4 on the product
    Axis a = unit_axis(64);
    auto P = free_pair(a, a);
    Rng rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        GridFunction f = random_eigen_series(P, rng, 2, 9);
        double ratio = lp_norm(area_integral(f, P), 2) / lp_norm(f, 2);
        CHECK(ratio == doctest::Approx(0.25).epsilon(0.05));
    }
}

TEST_CASE("area integral commutes with reflection") {
    Axis a = unit_axis(32);
    Rng rng(14);
    Eigen::VectorXd V = random_potential(a, rng, 40);
    V = 0.5 * (V + V.reverse()).eval();
    ProductOperatorPair P{build_schrodinger(a, V), build_laplacian(a)};
    GridFunction f = random_noise(a, a, rng);
    GridFunction lhs = area_integral(reflect(f), P);
    GridFunction rhs = reflect(area_integral(f, P));
    CHECK((lhs.v - rhs.v).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("cone functional of a single cell") {
    Axis a = unit_axis(32);
    TentGrid g = TentGrid::standard(a, a);
    TentFunction F(g);
    const size_t ta = 12, tb = 20;
    const int y1 = 10, y2 = 20;
    F(ta, tb, y1, y2) = 3.0;
    GridFunction A = tent_a_functional(F);
    for (int x1 = 0; x1 < 32; ++x1)
        for (int x2 = 0; x2 < 32; ++x2) {
            bool inside = std::abs(x1 - y1) * a.h < g.g1[ta] && std::abs(x2 - y2) * a.h < g.g2[tb];
            CHECK((A.v(x1, x2) > 0) == inside);
        }
    TentFunction Z(g);
    CHECK(tent_norm(Z, 1) == 0.0);
    CHECK(tent_norm(Z, 2) == 0.0);

    Rng rng(15);
    std::normal_distribution<double> N;
    TentFunction F1(g), F2(g);
    for (size_t i = 0; i < F1.values.size(); i += 7) F1.values[i] = N(rng);
    for (size_t i = 3; i < F2.values.size(); i += 5) F2.values[i] = N(rng);
    TentFunction S(g);
    for (size_t i = 0; i < S.values.size(); ++i) S.values[i] = F1.values[i] + F2.values[i];
    Eigen::MatrixXd lhs = tent_a_functional(S).v;
    Eigen::MatrixXd rhs = tent_a_functional(F1).v + tent_a_functional(F2).v;
    CHECK((lhs.array() <= rhs.array() + 1e-12).all());

    // larger aperture never decreases the functional
    TentGrid wide = g;
    wide.aperture = 2.0;
    TentFunction Fw(wide);
    Fw.values = F1.values;
    CHECK((tent_a_functional(Fw).v.array() >= tent_a_functional(F1).v.array() - 1e-12).all());
}

TEST_CASE("Fubini identity for the T22 norm") {
    Axis a = unit_axis(64);
    TentGrid g = TentGrid::standard(a, a);
    Rng rng(16);
    std::normal_distribution<double> N;
    TentFunction F(g);
    for (size_t ta = 0; ta < g.g1.size(); ++ta)
        for (size_t tb = 0; tb < g.g2.size(); ++tb) {
            bool scale_ok = g.g1[ta] > 8 * a.h && g.g1[ta] <= 16 * a.h && g.g2[tb] > 8 * a.h && g.g2[tb] <= 16 * a.h;
            if (!scale_ok) continue;
            for (int i1 = 16; i1 < 48; ++i1)
                for (int i2 = 16; i2 < 48; ++i2) F(ta, tb, i1, i2) = N(rng);
        }
    double t22 = std::pow(tent_norm(F, 2), 2);
    CHECK(t22 == doctest::Approx(tent_t22_fubini(F)).epsilon(1e-10));
    CHECK(t22 / std::pow(tent_l2(F), 2) == doctest::Approx(4.0).epsilon(0.02));
}

TEST_CASE("tents") {
    Axis a = unit_axis(16);
    TentGrid g = TentGrid::standard(a, a);
    OpenSet full(a, a);
    full.fill_box({0, 16, 0, 16});
    CHECK(tent_over(full, g).count() == static_cast<long>(g.size()));

    OpenSet box(a, a);
    box.fill_box({4, 8, 2, 14});
    TentMask T = tent_over(box, g);
    for (size_t ta = 0; ta < g.g1.size(); ++ta)
        for (size_t tb = 0; tb < g.g2.size(); ++tb)
            for (int i1 = 0; i1 < 16; ++i1)
                for (int i2 = 0; i2 < 16; ++i2) {
                    bool expect = i1 - g.radius1(ta) >= 4 && i1 + g.radius1(ta) < 8 && i2 - g.radius2(tb) >= 2 &&
                                  i2 + g.radius2(tb) < 14;
                    CHECK(T(ta, tb, i1, i2) == expect);
                    if (g.g1[ta] > 4 * a.h) CHECK(!T(ta, tb, i1, i2));
                }

    Rng rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        OpenSet small = random_open_set(a, a, rng);
        OpenSet big = small;
        OpenSet extra = random_open_set(a, a, rng);
        for (size_t i = 0; i < big.mask.size(); ++i) big.mask[i] |= extra.mask[i];
        TentMask Ts = tent_over(small, g), Tb = tent_over(big, g);
        for (size_t i = 0; i < Ts.mask.size(); ++i)
            if (Ts.mask[i]) CHECK(Tb.mask[i]);
    }
}
