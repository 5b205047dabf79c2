#include "hardy/square.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hardy {

namespace {

// For each output cell, add the sum of E over its clipped cone box. Boxes
// without support contribute exactly zero despite prefix-sum cancellation.
void add_box_sums(const Eigen::MatrixXd& E, int r1, int r2, double scale, Eigen::MatrixXd& acc) {
    const int n1 = static_cast<int>(E.rows()), n2 = static_cast<int>(E.cols());
    Prefix2D P(E);
    Prefix2D support((E.array() != 0).cast<double>().matrix());
    for (int x2 = 0; x2 < n2; ++x2) {
        int lo2 = std::max(0, x2 - r2), hi2 = std::min(n2, x2 + r2 + 1);
        for (int x1 = 0; x1 < n1; ++x1) {
            CellBox b{std::max(0, x1 - r1), std::min(n1, x1 + r1 + 1), lo2, hi2};
            if (support.sum(b) > 0.5) acc(x1, x2) += scale * std::max(0.0, P.sum(b));
        }
    }
}

double q_symbol(double t, double l) {
    double u = t * t * l;
    return u * std::exp(-u);
}

// Rows of the eigen-coefficient matrix that carry energy.
std::vector<int> active(const Eigen::MatrixXd& c, bool rows) {
    const double tiny = 1e-15 * c.cwiseAbs().maxCoeff();
    std::vector<int> idx;
    const Eigen::Index m = rows ? c.rows() : c.cols();
    for (Eigen::Index i = 0; i < m; ++i) {
        double v = rows ? c.row(i).cwiseAbs().maxCoeff() : c.col(i).cwiseAbs().maxCoeff();
        if (v > tiny) idx.push_back(static_cast<int>(i));
    }
    return idx;
}

}  // namespace

TentGrid::TentGrid(const Axis& x1, const Axis& x2, ScaleGrid s1, ScaleGrid s2, double ap)
    : a1(x1), a2(x2), g1(std::move(s1)), g2(std::move(s2)), aperture(ap) {
    if (!(ap > 0)) throw std::invalid_argument("aperture must be positive");
}

TentGrid TentGrid::standard(const Axis& x1, const Axis& x2, int ppo) {
    return TentGrid(x1, x2, default_scale_grid(x1, ppo), default_scale_grid(x2, ppo));
}

CellBox TentGrid::box(size_t a, size_t b, int i1, int i2) const {
    int r1 = radius1(a), r2 = radius2(b);
    return {std::max(0, i1 - r1), std::min(a1.n, i1 + r1 + 1), std::max(0, i2 - r2), std::min(a2.n, i2 + r2 + 1)};
}

long TentMask::count() const { return static_cast<long>(std::count(mask.begin(), mask.end(), 1)); }

GridFunction area_integral(const GridFunction& f, const ProductOperatorPair& pair, const TentGrid& grid) {
    pair.check(f);
    Eigen::MatrixXd c = pair.to_spectral(f);
    GridFunction out = pair.zeros();
    if (c.cwiseAbs().maxCoeff() == 0) return out;

    std::vector<int> J1 = active(c, true), J2 = active(c, false);
    Eigen::MatrixXd U1(pair.L1.n(), J1.size()), U2t(J2.size(), pair.L2.n()), cc(J1.size(), J2.size());
    Eigen::VectorXd l1(J1.size()), l2(J2.size());
    for (size_t j = 0; j < J1.size(); ++j) {
        U1.col(j) = pair.L1.evecs.col(J1[j]);
        l1(j) = pair.L1.evals(J1[j]);
    }
    for (size_t k = 0; k < J2.size(); ++k) {
        U2t.row(k) = pair.L2.evecs.col(J2[k]).transpose();
        l2(k) = pair.L2.evals(J2[k]);
    }
    for (size_t j = 0; j < J1.size(); ++j)
        for (size_t k = 0; k < J2.size(); ++k) cc(j, k) = c(J1[j], J2[k]);

    const double cnorm = c.norm();
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(f.v.rows(), f.v.cols());
    Eigen::VectorXd p1(J1.size()), p2(J2.size());
    for (size_t a = 0; a < grid.g1.size(); ++a) {
        for (size_t j = 0; j < J1.size(); ++j) p1(j) = q_symbol(grid.g1[a], l1(j));
        if (p1.cwiseAbs().maxCoeff() * cnorm == 0) continue;
        Eigen::MatrixXd G = U1 * (p1.asDiagonal() * cc);
        for (size_t b = 0; b < grid.g2.size(); ++b) {
            for (size_t k = 0; k < J2.size(); ++k) p2(k) = q_symbol(grid.g2[b], l2(k));
            if (p1.cwiseAbs().maxCoeff() * p2.cwiseAbs().maxCoeff() < 1e-17) continue;
            Eigen::MatrixXd Q = G * (p2.asDiagonal() * U2t);
            add_box_sums(Q.cwiseAbs2(), grid.radius1(a), grid.radius2(b),
                         grid.cell_measure() * grid.cone_factor(a, b), acc);
        }
    }
    out.v = acc.cwiseMax(0.0).cwiseSqrt();
    return out;
}

GridFunction area_integral(const GridFunction& f, const ProductOperatorPair& pair) {
    return area_integral(f, pair, TentGrid::standard(f.ax1, f.ax2));
}

double hardy_norm(const GridFunction& f, const ProductOperatorPair& pair, const TentGrid& grid) {
    return lp_norm(area_integral(f, pair, grid), 1);
}

double hardy_norm(const GridFunction& f, const ProductOperatorPair& pair) {
    return lp_norm(area_integral(f, pair), 1);
}

TentFunction q_tent(const GridFunction& f, const ProductOperatorPair& pair, const TentGrid& grid) {
    pair.check(f);
    TentFunction F(grid);
    Eigen::MatrixXd c = pair.to_spectral(f);
    const auto& l1 = pair.L1.evals;
    const auto& l2 = pair.L2.evals;
    Eigen::VectorXd p1(l1.size()), p2(l2.size());
    for (size_t a = 0; a < grid.g1.size(); ++a) {
        for (Eigen::Index j = 0; j < l1.size(); ++j) p1(j) = q_symbol(grid.g1[a], l1(j));
        Eigen::MatrixXd G = pair.L1.evecs * (p1.asDiagonal() * c);
        for (size_t b = 0; b < grid.g2.size(); ++b) {
            for (Eigen::Index k = 0; k < l2.size(); ++k) p2(k) = q_symbol(grid.g2[b], l2(k));
            F.slice(a, b) = G * (p2.asDiagonal() * pair.L2.evecs.transpose());
        }
    }
    return F;
}

GridFunction tent_a_functional(const TentFunction& F) {
    const TentGrid& g = F.grid;
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(g.a1.n, g.a2.n);
    for (size_t a = 0; a < g.g1.size(); ++a)
        for (size_t b = 0; b < g.g2.size(); ++b) {
            auto S = F.slice(a, b);
            if (S.cwiseAbs().maxCoeff() == 0) continue;
            add_box_sums(S.cwiseAbs2(), g.radius1(a), g.radius2(b), g.cell_measure() * g.cone_factor(a, b), acc);
        }
    return GridFunction(g.a1, g.a2, acc.cwiseMax(0.0).cwiseSqrt());
}

double tent_norm(const TentFunction& F, double p) { return lp_norm(tent_a_functional(F), p); }

double tent_l2(const TentFunction& F) {
    long double s = 0;
    for (double v : F.values) s += static_cast<long double>(v) * v;
    return std::sqrt(static_cast<double>(s) * F.grid.cell_measure());
}

double tent_t22_fubini(const TentFunction& F) {
    const TentGrid& g = F.grid;
    long double s = 0;
    for (size_t a = 0; a < g.g1.size(); ++a)
        for (size_t b = 0; b < g.g2.size(); ++b) {
            auto S = F.slice(a, b);
            for (int i2 = 0; i2 < g.a2.n; ++i2)
                for (int i1 = 0; i1 < g.a1.n; ++i1) {
                    double v = S(i1, i2);
                    if (v == 0) continue;
                    CellBox bx = g.box(a, b, i1, i2);
                    double width = (bx.hi1 - bx.lo1) * g.a1.h * (bx.hi2 - bx.lo2) * g.a2.h;
                    s += static_cast<long double>(v) * v * width * g.cone_factor(a, b);
                }
        }
    return static_cast<double>(s) * g.cell_measure();
}

TentMask tent_over(const OpenSet& omega, const TentGrid& grid) {
    if (omega.n1 != grid.a1.n || omega.n2 != grid.a2.n) throw std::invalid_argument("open set does not match grid");
    TentMask T{grid, std::vector<std::uint8_t>(grid.size(), 0)};
    Prefix2D P(omega);
    for (size_t a = 0; a < grid.g1.size(); ++a)
        for (size_t b = 0; b < grid.g2.size(); ++b)
            for (int i2 = 0; i2 < grid.a2.n; ++i2)
                for (int i1 = 0; i1 < grid.a1.n; ++i1)
                    if (omega(i1, i2) && P.full(grid.box(a, b, i1, i2))) T.mask[grid.index(a, b, i1, i2)] = 1;
    return T;
}

}  // namespace hardy
