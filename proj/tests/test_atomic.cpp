#include "doctest.h"

#include "hardy/atomic.hpp"
#include "hardy/sampling.hpp"

#include <cmath>
#include <random>

using namespace hardy;

namespace {

ProductOperatorPair random_pair(int n, Rng& rng) {
    Axis a = unit_axis(n);
    return {build_schrodinger(a, random_potential(a, rng, 100)), build_schrodinger(a, random_potential(a, rng, 100))};
}

double max_abs(const std::vector<double>& v) {
    double m = 0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

}  // namespace

TEST_CASE("tent decomposition of trivial inputs") {
    Axis a = unit_axis(16);
    TentGrid g = TentGrid::standard(a, a);
    CHECK(tent_decompose(TentFunction(g)).empty());

    TentFunction F(g);
    F(10, 12, 5, 9) = 2.5;
    auto terms = tent_decompose(F);
    REQUIRE(terms.size() == 1);
    const TentAtom& A = terms[0].atom;
    CHECK(terms[0].lambda == doctest::Approx(std::sqrt(A.omega.measure()) * tent_l2(F)).epsilon(1e-14));
    REQUIRE(A.cells.size() == 1);
    CHECK(std::fabs(terms[0].lambda * A.cells[0].value - 2.5) < 1e-12);
    CHECK(A.l2() <= std::pow(A.omega.measure(), -0.5) * (1 + 1e-12));
}

TEST_CASE("tent decomposition of random tent functions") {
    Rng rng(21);
    auto P = random_pair(16, rng);
    TentGrid g = TentGrid::standard(P.L1.axis, P.L2.axis);
    double worst_ratio = 0;
    for (int trial = 0; trial < 10; ++trial) {
        TentFunction F = random_tent_function(P, g, rng);
        auto terms = tent_decompose(F);
        REQUIRE(!terms.empty());

        TentFunction R(g);
        double lsum = 0;
        for (const auto& t : terms) {
            const TentAtom& A = t.atom;
            lsum += std::fabs(t.lambda);
            const double omega = A.omega.measure();
            CHECK(A.l2() <= std::pow(omega, -0.5) * (1 + 1e-12));
            double pieces = 0;
            for (double p : A.piece_l2()) pieces += p * p;
            CHECK(pieces <= (1 + 1e-12) / omega);
            // each piece sits in the tent over its dilated rectangle
            for (const auto& c : A.cells) {
                size_t idx = c.index;
                int i1 = static_cast<int>(idx % g.a1.n);
                idx /= g.a1.n;
                int i2 = static_cast<int>(idx % g.a2.n);
                idx /= g.a2.n;
                size_t b = idx % g.g2.size(), aa = idx / g.g2.size();
                CellBox five = dilate(A.rects[c.piece], g.a1.n, g.a2.n, 5.0);
                CHECK(five.contains(g.box(aa, b, i1, i2)));
                R.values[c.index] += t.lambda * c.value;
            }
        }
        double err = 0;
        for (size_t i = 0; i < F.values.size(); ++i) err = std::max(err, std::fabs(F.values[i] - R.values[i]));
        CHECK(err <= 1e-12 * max_abs(F.values));
        worst_ratio = std::max(worst_ratio, lsum / tent_norm(F, 1));

        // tails in T^{2,2} decrease
        double prev = std::numeric_limits<double>::infinity();
        for (size_t N = 0; N <= terms.size(); ++N) {
            TentFunction tail(g);
            for (size_t j = N; j < terms.size(); ++j)
                for (const auto& c : terms[j].atom.cells) tail.values[c.index] += terms[j].lambda * c.value;
            double v = tent_norm(tail, 2);
            CHECK(v <= prev * (1 + 1e-12));
            prev = v;
        }
        CHECK(prev == 0.0);
    }
    MESSAGE("sum |lambda| / ||F||_T1 max over samples: " << worst_ratio);
    CHECK(worst_ratio < 4.0);
}

TEST_CASE("pi operator") {
    Rng rng(22);
    auto P = random_pair(16, rng);
    TentGrid g = TentGrid::standard(P.L1.axis, P.L2.axis);
    PiContext ctx(P, g, 1);
    CHECK(lp_norm(pi_operator(TentFunction(g), ctx), 2) == 0.0);

    // eigen oracle: A = u_j (x) v_k at one scale pair
    const int j = 5, k = 9;
    const size_t ta = 20, tb = 14;
    TentFunction A(g);
    A.slice(ta, tb) = P.L1.evecs.col(j) * P.L2.evecs.col(k).transpose();
    GridFunction pa = pi_operator(A, ctx);
    double factor = ctx.w1.weight * ctx.w1.psi(ta, j, 1) * ctx.w2.weight * ctx.w2.psi(tb, k, 1);
    CHECK((pa.v - factor * A.slice(ta, tb)).cwiseAbs().maxCoeff() < 1e-10 * std::fabs(factor));

    PiBound B = pi_bound(ctx);
    CHECK(B.C_M >= B.C_pi);
    double measured = 0;
    for (int trial = 0; trial < 20; ++trial) {
        TentFunction F = random_tent_function(P, g, rng);
        double n2 = lp_norm(pi_operator(F, ctx), 2);
        CHECK(n2 <= B.C_pi * tent_l2(F) * (1 + 1e-10));
        measured = std::max(measured, n2 / tent_norm(F, 2));
    }
    double searched = measure_pi_constant(ctx, rng, 5, 3);
    CHECK(searched >= measured * 0.5);
    CHECK(searched <= B.C_pi);
    MESSAGE("||pi(A)|| / ||A||_T22: random " << measured << ", searched " << searched << ", provable C_pi " << B.C_pi);

    // adjoint identity <pi(A), g> = <A, pi*(g)>
    TentFunction F = random_tent_function(P, g, rng);
    GridFunction h = random_noise(P.L1.axis, P.L2.axis, rng);
    double lhs = pi_operator(F, ctx).v.cwiseProduct(h.v).sum() * h.cell_area();
    TentFunction Ah = pi_adjoint(h, ctx);
    long double rhs = 0;
    for (size_t i = 0; i < F.values.size(); ++i) rhs += static_cast<long double>(F.values[i]) * Ah.values[i];
    CHECK(lhs == doctest::Approx(static_cast<double>(rhs) * g.cell_measure()).epsilon(1e-9));
}

TEST_CASE("lifted tent atoms are Hardy atoms") {
    Rng rng(23);
    auto P = random_pair(16, rng);
    TentGrid g = TentGrid::standard(P.L1.axis, P.L2.axis);
    for (int M : {1, 2}) {
        PiContext ctx(P, g, M);
        const double C = pi_bound(ctx).C_M;
        int atoms = 0;
        for (int trial = 0; trial < 3; ++trial) {
            TentFunction F = random_tent_function(P, g, rng);
            for (const auto& t : tent_decompose(F)) {
                HardyAtom h = lift_tent_atom(t.atom, ctx, C);
                GridFunction direct = pi_operator(t.atom.dense(), ctx);
                CHECK((h.a().v * C - direct.v).norm() <= 1e-10 * direct.v.norm());
                AtomValidation v = hardy_atom_validate(h, 1e-6);
                CHECK(v.pass());
                ++atoms;

                // rescaling to saturation keeps an atom and hits one of the scaling bounds
                const double rho = v.saturation();
                REQUIRE(rho > 0);
                CHECK(rho <= 1.0);
                HardyAtom sat = h;
                for (auto& p : sat.pieces) p.b_hat /= rho;
                AtomValidation vs = hardy_atom_validate(sat, 1e-6);
                CHECK(vs.pass());
                CHECK(vs.saturation() == doctest::Approx(1.0).epsilon(1e-9));
            }
        }
        CHECK(atoms > 5);
    }
}

TEST_CASE("atom validation detects violations") {
    Rng rng(24);
    auto P = random_pair(16, rng);
    HardyAtom zero;
    zero.pair = &P;
    zero.omega = OpenSet(P.L1.axis, P.L2.axis);
    zero.omega.fill_box({0, 4, 0, 4});
    AtomValidation vz = hardy_atom_validate(zero, 1e-6);
    CHECK(vz.pass());
    CHECK(std::isinf(vz.min_slack()));

    TentGrid g = TentGrid::standard(P.L1.axis, P.L2.axis);
    PiContext ctx(P, g, 1);
    const double C = pi_bound(ctx).C_M;
    auto terms = tent_decompose(random_tent_function(P, g, rng));
    REQUIRE(!terms.empty());
    HardyAtom h = lift_tent_atom(terms.back().atom, ctx, C);
    REQUIRE(hardy_atom_validate(h, 1e-6).pass());

    // smear b_R beyond its dilate
    HardyAtom smeared = h;
    Eigen::MatrixXd wide = Eigen::MatrixXd::Constant(16, 16, 1.0);
    smeared.pieces[0].b_hat += 1e-3 * smeared.pieces[0].b_hat.norm() * P.L1.evecs.transpose() * wide * P.L2.evecs;
    smeared.pieces[0].region = {0, 2, 0, 2};
    AtomValidation vs = hardy_atom_validate(smeared, 1e-6);
    CHECK(!vs.pass());

    // too large
    HardyAtom big = h;
    for (auto& p : big.pieces) p.b_hat *= 1e3 * C;
    CHECK(!hardy_atom_validate(big, 1e-6).pass());
}

TEST_CASE("hardy decomposition") {
    Axis a = unit_axis(16);
    auto P = free_pair(a, a);
    auto zero = hardy_decompose(P.zeros(), 1, P);
    CHECK(zero.terms.empty());
    CHECK(lp_norm(zero.residual, 2) == 0.0);

    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(16, 16);
    c(8, 7) = 1.0;
    GridFunction f = P.from_spectral(c);
    for (int ppo : {8, 16}) {
        DecomposeOptions o;
        o.per_octave = ppo;
        auto rep = hardy_decompose(f, 1, P, o);
        double rel = lp_norm(rep.residual, 2) / lp_norm(f, 2);
        CHECK(rel <= (ppo == 8 ? 1e-3 : 1e-4));
        CHECK(rep.calibration_error <= 1e-3);
        GridFunction rec = rep.reconstruction();
        CHECK((rec.v + rep.residual.v - f.v).cwiseAbs().maxCoeff() < 1e-12);
    }

    DecomposeOptions coarse;
    coarse.per_octave = 1;
    coarse.t_min_cells = 2.0;
    CHECK_THROWS_WITH(hardy_decompose(f, 1, P, coarse), "calderon calibration");
}

TEST_CASE("Calderon identity per eigenvalue") {
    Rng rng(25);
    auto P = random_pair(32, rng);
    TentGrid g = decomposition_grid(P.L1.axis, P.L2.axis, DecomposeOptions{});
    for (int M : {1, 2}) {
        PiContext ctx(P, g, M);
        for (const WindowTable* w : {&ctx.w1, &ctx.w2}) {
            Eigen::VectorXd m = calderon_sum(*w, M);
            double c = 1.0 / m(m.size() / 2);
            CHECK((c * m.array() - 1.0).abs().maxCoeff() <= 1e-3);
        }
    }
}

TEST_CASE("decomposition reproduces the square function and the atom bound") {
    Rng rng(26);
    auto P = random_pair(16, rng);
    for (int trial = 0; trial < 3; ++trial) {
        GridFunction f = random_noise(P.L1.axis, P.L2.axis, rng);
        auto rep = hardy_decompose(f, 1, P);
        GridFunction rec = rep.reconstruction();
        GridFunction Sf = area_integral(f, P), Sr = area_integral(rec, P);
        CHECK(lp_norm(Sr, 1) == doctest::Approx(lp_norm(Sf, 1)).epsilon(1e-3));

        // ||T f||_1 <= sum |c_j| ||T a_j||_1 for T = S and T = identity
        double s_bound = 0, id_bound = 0;
        for (const auto& t : rep.terms) {
            GridFunction at = t.atom.a();
            s_bound += std::fabs(t.coefficient) * hardy_norm(at, P);
            id_bound += std::fabs(t.coefficient) * lp_norm(at, 1);
            CHECK(lp_norm(at, 1) <= 1.0 + 1e-9);
        }
        CHECK(lp_norm(Sr, 1) <= s_bound * (1 + 1e-9));
        CHECK(lp_norm(rec, 1) <= id_bound * (1 + 1e-9));
        CHECK(rep.coefficient_l1 / hardy_norm(f, P) < 1e3);
    }
}
