#pragma once

#include "hardy/product.hpp"

#include <cstdint>
#include <vector>

namespace hardy {

// Discretized product upper half-space: both axes with their scale grids.
struct TentGrid {
    Axis a1, a2;
    ScaleGrid g1, g2;
    double aperture = 1.0;

    TentGrid() = default;
    TentGrid(const Axis& x1, const Axis& x2, ScaleGrid s1, ScaleGrid s2, double ap = 1.0);
    static TentGrid standard(const Axis& x1, const Axis& x2, int ppo = 8);

    size_t slice_size() const { return static_cast<size_t>(a1.n) * a2.n; }
    size_t size() const { return slice_size() * g1.size() * g2.size(); }
    size_t index(size_t a, size_t b, int i1, int i2) const {
        return ((a * g2.size() + b) * a2.n + i2) * a1.n + i1;
    }
    int radius1(size_t a) const { return cone_radius(g1[a], a1.h, aperture); }
    int radius2(size_t b) const { return cone_radius(g2[b], a2.h, aperture); }
    // dy dt/(t1 t2) mass of one cell
    double cell_measure() const { return a1.h * a2.h * g1.weight() * g2.weight(); }
    // extra 1/(t1 t2) of the cone functional
    double cone_factor(size_t a, size_t b) const { return 1.0 / (g1[a] * g2[b]); }
    // cone cells are the clipped box of cells within the radius of (i1,i2)
    CellBox box(size_t a, size_t b, int i1, int i2) const;
};

// F(y1, y2, t1, t2); slice (a,b) is a column-major n1 x n2 block.
struct TentFunction {
    TentGrid grid;
    std::vector<double> values;

    TentFunction() = default;
    explicit TentFunction(const TentGrid& g) : grid(g), values(g.size(), 0.0) {}

    Eigen::Map<Eigen::MatrixXd> slice(size_t a, size_t b) {
        return {values.data() + (a * grid.g2.size() + b) * grid.slice_size(), grid.a1.n, grid.a2.n};
    }
    Eigen::Map<const Eigen::MatrixXd> slice(size_t a, size_t b) const {
        return {values.data() + (a * grid.g2.size() + b) * grid.slice_size(), grid.a1.n, grid.a2.n};
    }
    double& operator()(size_t a, size_t b, int i1, int i2) { return values[grid.index(a, b, i1, i2)]; }
    double operator()(size_t a, size_t b, int i1, int i2) const { return values[grid.index(a, b, i1, i2)]; }
};

struct TentMask {
    TentGrid grid;
    std::vector<std::uint8_t> mask;
    bool operator()(size_t a, size_t b, int i1, int i2) const { return mask[grid.index(a, b, i1, i2)] != 0; }
    long count() const;
};

// Sf(x) with psi(s) = s^2 exp(-s^2); streamed over scale pairs.
GridFunction area_integral(const GridFunction& f, const ProductOperatorPair& pair, const TentGrid& grid);
GridFunction area_integral(const GridFunction& f, const ProductOperatorPair& pair);
double hardy_norm(const GridFunction& f, const ProductOperatorPair& pair, const TentGrid& grid);
double hardy_norm(const GridFunction& f, const ProductOperatorPair& pair);

// Materialized Q_t f over the tent grid.
TentFunction q_tent(const GridFunction& f, const ProductOperatorPair& pair, const TentGrid& grid);

GridFunction tent_a_functional(const TentFunction& F);
double tent_norm(const TentFunction& F, double p);
// Norm in L^2(dy dt/(t1 t2)).
double tent_l2(const TentFunction& F);
// T^{2,2} norm squared computed with the sums exchanged: weights are the clipped cone widths.
double tent_t22_fubini(const TentFunction& F);

TentMask tent_over(const OpenSet& omega, const TentGrid& grid);

}  // namespace hardy
