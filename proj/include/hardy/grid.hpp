#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace hardy {

enum class Boundary { dirichlet, periodic };

struct Axis {
    int n = 0;
    double h = 1.0;
    double origin = 0.0;
    Boundary bc = Boundary::dirichlet;

    Axis() = default;
    Axis(int n_cells, double spacing, Boundary b = Boundary::dirichlet, double orig = 0.0);

    double length() const { return n * h; }
    double center(int i) const { return origin + (i + 0.5) * h; }
    int levels() const;  // number of dyadic levels below the root
};

// Unit-length axis with n cells.
Axis unit_axis(int n, Boundary bc = Boundary::dirichlet);

struct GridFunction {
    Axis ax1, ax2;
    Eigen::MatrixXd v;  // v(i1, i2)

    GridFunction() = default;
    GridFunction(const Axis& a1, const Axis& a2);
    GridFunction(const Axis& a1, const Axis& a2, Eigen::MatrixXd values);

    double cell_area() const { return ax1.h * ax2.h; }
};

double lp_norm(const GridFunction& f, double p);
double lp_norm(const Eigen::MatrixXd& v, double cell_area, double p);

struct DyadicInterval {
    int level = 0;
    int index = 0;

    int size(int n) const { return n >> level; }
    int lo(int n) const { return index * size(n); }
    int hi(int n) const { return lo(n) + size(n); }
    bool has_parent() const { return level > 0; }
    DyadicInterval parent() const { return {level - 1, index / 2}; }
    bool contains(const DyadicInterval& o) const;
    auto operator<=>(const DyadicInterval&) const = default;
};

struct DyadicRectangle {
    DyadicInterval i1, i2;
    double area(const Axis& a1, const Axis& a2) const;
    auto operator<=>(const DyadicRectangle&) const = default;
};

// Half-open cell box [lo1,hi1) x [lo2,hi2).
struct CellBox {
    int lo1 = 0, hi1 = 0, lo2 = 0, hi2 = 0;
    bool contains(const CellBox& o) const {
        return lo1 <= o.lo1 && o.hi1 <= hi1 && lo2 <= o.lo2 && o.hi2 <= hi2;
    }
    int cells() const { return (hi1 - lo1) * (hi2 - lo2); }
};

CellBox box_of(const DyadicRectangle& r, int n1, int n2);

// Concentric dilate of one interval by `factor`, clipped to [0, n).
std::pair<int, int> dilate_interval(const DyadicInterval& I, int n, double factor);
CellBox dilate(const DyadicRectangle& r, int n1, int n2, double factor);

struct OpenSet {
    int n1 = 0, n2 = 0;
    double h1 = 1.0, h2 = 1.0;
    std::vector<std::uint8_t> mask;  // row-major: i1 * n2 + i2

    OpenSet() = default;
    OpenSet(const Axis& a1, const Axis& a2);

    bool operator()(int i1, int i2) const { return mask[static_cast<size_t>(i1) * n2 + i2] != 0; }
    void set(int i1, int i2, bool on = true) { mask[static_cast<size_t>(i1) * n2 + i2] = on ? 1 : 0; }
    long count() const;
    double measure() const { return count() * h1 * h2; }
    bool empty() const { return count() == 0; }
    void fill_box(const CellBox& b);
    bool subset_of(const OpenSet& o) const;
    std::string rle() const;
};

// 2-D inclusive prefix sums for O(1) box counts.
class Prefix2D {
public:
    Prefix2D() = default;
    explicit Prefix2D(const OpenSet& s);
    explicit Prefix2D(const Eigen::MatrixXd& g);
    double sum(const CellBox& b) const;
    bool full(const CellBox& b) const { return sum(b) >= b.cells() - 0.5; }

private:
    int n1_ = 0, n2_ = 0;
    std::vector<double> s_;
};

std::vector<DyadicRectangle> maximal_dyadic_subrectangles(const OpenSet& omega);
std::vector<DyadicRectangle> maximal_in_direction(const OpenSet& omega, int direction);

GridFunction strong_maximal(const GridFunction& g);
Eigen::MatrixXd strong_maximal(const Eigen::MatrixXd& g);
OpenSet enlarge(const OpenSet& omega, double threshold);

double journe_gamma(const DyadicRectangle& r, const OpenSet& omega, int direction);
// Same, with the enlarged set already computed.
double journe_gamma_enlarged(const DyadicRectangle& r, const Prefix2D& enlarged, int n1, int n2,
                             int direction);
std::pair<double, double> journe_sum(const OpenSet& omega, double delta);

struct ScaleGrid {
    double t_min = 0, t_max = 0;
    int per_octave = 8;
    std::vector<double> t;

    ScaleGrid() = default;
    ScaleGrid(double tmin, double tmax, int ppo);
    size_t size() const { return t.size(); }
    double weight() const;  // dt/t cell weight, ln of the ratio
    double operator[](size_t i) const { return t[i]; }
};

// h/2 .. domain length at 8 points per octave.
ScaleGrid default_scale_grid(const Axis& a, int ppo = 8);

// Largest k with |k| h < aperture * t: cells within the open cone radius.
int cone_radius(double t, double h, double aperture = 1.0);

}  // namespace hardy
