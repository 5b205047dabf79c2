#include "hardy/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hardy {

namespace {

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

int log2i(int n) {
    int k = 0;
    while ((1 << k) < n) ++k;
    return k;
}

std::vector<DyadicInterval> all_intervals(int n) {
    std::vector<DyadicInterval> out;
    int L = log2i(n);
    for (int lev = 0; lev <= L; ++lev)
        for (int i = 0; i < (1 << lev); ++i) out.push_back({lev, i});
    return out;
}

}  // namespace

Axis::Axis(int n_cells, double spacing, Boundary b, double orig)
    : n(n_cells), h(spacing), origin(orig), bc(b) {
    if (n_cells < 4) throw std::invalid_argument("grid too small");
    if (!is_pow2(n_cells)) throw std::invalid_argument("cell count must be a power of two");
    if (!(spacing > 0) || !std::isfinite(spacing)) throw std::invalid_argument("spacing must be positive");
}

int Axis::levels() const { return log2i(n); }

Axis unit_axis(int n, Boundary bc) { return Axis(n, 1.0 / n, bc); }

GridFunction::GridFunction(const Axis& a1, const Axis& a2)
    : ax1(a1), ax2(a2), v(Eigen::MatrixXd::Zero(a1.n, a2.n)) {}

GridFunction::GridFunction(const Axis& a1, const Axis& a2, Eigen::MatrixXd values)
    : ax1(a1), ax2(a2), v(std::move(values)) {
    if (v.rows() != a1.n || v.cols() != a2.n) throw std::invalid_argument("value array does not match axes");
}

double lp_norm(const Eigen::MatrixXd& v, double cell_area, double p) {
    if (!(p >= 1)) throw std::invalid_argument("p must be >= 1");
    if (!v.allFinite()) throw std::invalid_argument("non-finite sample");
    if (std::isinf(p)) return v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
    if (p == 1) return v.cwiseAbs().sum() * cell_area;
    if (p == 2) return std::sqrt(v.squaredNorm() * cell_area);
    double m = v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
    if (m == 0) return 0.0;
    // scaled to avoid overflow for large p
    double s = (v.cwiseAbs() / m).array().pow(p).sum();
    return m * std::pow(s * cell_area, 1.0 / p);
}

double lp_norm(const GridFunction& f, double p) { return lp_norm(f.v, f.cell_area(), p); }

bool DyadicInterval::contains(const DyadicInterval& o) const {
    if (o.level < level) return false;
    return (o.index >> (o.level - level)) == index;
}

double DyadicRectangle::area(const Axis& a1, const Axis& a2) const {
    return i1.size(a1.n) * a1.h * i2.size(a2.n) * a2.h;
}

CellBox box_of(const DyadicRectangle& r, int n1, int n2) {
    return {r.i1.lo(n1), r.i1.hi(n1), r.i2.lo(n2), r.i2.hi(n2)};
}

std::pair<int, int> dilate_interval(const DyadicInterval& I, int n, double factor) {
    double len = I.size(n);
    double c = I.lo(n) + 0.5 * len;
    int lo = static_cast<int>(std::floor(c - 0.5 * factor * len + 1e-9));
    int hi = static_cast<int>(std::ceil(c + 0.5 * factor * len - 1e-9));
    return {std::max(lo, 0), std::min(hi, n)};
}

CellBox dilate(const DyadicRectangle& r, int n1, int n2, double factor) {
    auto [a, b] = dilate_interval(r.i1, n1, factor);
    auto [c, d] = dilate_interval(r.i2, n2, factor);
    return {a, b, c, d};
}

OpenSet::OpenSet(const Axis& a1, const Axis& a2)
    : n1(a1.n), n2(a2.n), h1(a1.h), h2(a2.h), mask(static_cast<size_t>(a1.n) * a2.n, 0) {}

long OpenSet::count() const { return std::count(mask.begin(), mask.end(), std::uint8_t{1}); }

void OpenSet::fill_box(const CellBox& b) {
    for (int i = std::max(b.lo1, 0); i < std::min(b.hi1, n1); ++i)
        for (int j = std::max(b.lo2, 0); j < std::min(b.hi2, n2); ++j) set(i, j);
}

bool OpenSet::subset_of(const OpenSet& o) const {
    for (size_t k = 0; k < mask.size(); ++k)
        if (mask[k] && !o.mask[k]) return false;
    return true;
}

std::string OpenSet::rle() const {
    std::ostringstream os;
    os << n1 << 'x' << n2 << ':';
    std::uint8_t cur = 0;
    long run = 0;
    bool first = true;
    for (auto m : mask) {
        if (m == cur) {
            ++run;
        } else {
            os << (first ? "" : ",") << run;
            first = false;
            cur = m;
            run = 1;
        }
    }
    os << (first ? "" : ",") << run;
    return os.str();
}

Prefix2D::Prefix2D(const OpenSet& s) : n1_(s.n1), n2_(s.n2), s_((s.n1 + 1) * (s.n2 + 1), 0.0) {
    for (int i = 0; i < n1_; ++i)
        for (int j = 0; j < n2_; ++j)
            s_[(i + 1) * (n2_ + 1) + j + 1] = (s(i, j) ? 1.0 : 0.0) + s_[i * (n2_ + 1) + j + 1] +
                                              s_[(i + 1) * (n2_ + 1) + j] - s_[i * (n2_ + 1) + j];
}

Prefix2D::Prefix2D(const Eigen::MatrixXd& g)
    : n1_(static_cast<int>(g.rows())), n2_(static_cast<int>(g.cols())), s_((n1_ + 1) * (n2_ + 1), 0.0) {
    for (int i = 0; i < n1_; ++i)
        for (int j = 0; j < n2_; ++j)
            s_[(i + 1) * (n2_ + 1) + j + 1] =
                g(i, j) + s_[i * (n2_ + 1) + j + 1] + s_[(i + 1) * (n2_ + 1) + j] - s_[i * (n2_ + 1) + j];
}

double Prefix2D::sum(const CellBox& b) const {
    int a = std::max(b.lo1, 0), c = std::min(b.hi1, n1_);
    int d = std::max(b.lo2, 0), e = std::min(b.hi2, n2_);
    if (a >= c || d >= e) return 0.0;
    const int w = n2_ + 1;
    return s_[c * w + e] - s_[a * w + e] - s_[c * w + d] + s_[a * w + d];
}

std::vector<DyadicRectangle> maximal_dyadic_subrectangles(const OpenSet& omega) {
    if (omega.empty()) throw std::invalid_argument("empty open set");
    Prefix2D P(omega);
    const int n1 = omega.n1, n2 = omega.n2;
    auto inside = [&](const DyadicInterval& a, const DyadicInterval& b) {
        return P.full(box_of({a, b}, n1, n2));
    };
    std::vector<DyadicRectangle> out;
    for (const auto& I : all_intervals(n1))
        for (const auto& J : all_intervals(n2)) {
            if (!inside(I, J)) continue;
            if (I.has_parent() && inside(I.parent(), J)) continue;
            if (J.has_parent() && inside(I, J.parent())) continue;
            out.push_back({I, J});
        }
    return out;
}

std::vector<DyadicRectangle> maximal_in_direction(const OpenSet& omega, int direction) {
    if (omega.empty()) throw std::invalid_argument("empty open set");
    if (direction != 1 && direction != 2) throw std::invalid_argument("direction must be 1 or 2");
    Prefix2D P(omega);
    const int n1 = omega.n1, n2 = omega.n2;
    auto inside = [&](const DyadicInterval& a, const DyadicInterval& b) {
        return P.full(box_of({a, b}, n1, n2));
    };
    std::vector<DyadicRectangle> out;
    for (const auto& I : all_intervals(n1))
        for (const auto& J : all_intervals(n2)) {
            if (!inside(I, J)) continue;
            if (direction == 1 && I.has_parent() && inside(I.parent(), J)) continue;
            if (direction == 2 && J.has_parent() && inside(I, J.parent())) continue;
            out.push_back({I, J});
        }
    return out;
}

Eigen::MatrixXd strong_maximal(const Eigen::MatrixXd& g) {
    if (!g.allFinite()) throw std::invalid_argument("non-finite sample");
    if (g.size() && g.minCoeff() < 0) throw std::invalid_argument("strong maximal input must be non-negative");
    const int n1 = static_cast<int>(g.rows()), n2 = static_cast<int>(g.cols());
    Prefix2D P(g);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n1, n2);
    for (int a = 0; (n1 >> a) >= 1; ++a) {
        int s1 = n1 >> a;
        for (int b = 0; (n2 >> b) >= 1; ++b) {
            int s2 = n2 >> b;
            double inv = 1.0 / (static_cast<double>(s1) * s2);
            for (int p = 0; p < n1 / s1; ++p)
                for (int q = 0; q < n2 / s2; ++q) {
                    double avg = P.sum({p * s1, (p + 1) * s1, q * s2, (q + 1) * s2}) * inv;
                    auto blk = M.block(p * s1, q * s2, s1, s2);
                    blk = blk.cwiseMax(avg);
                }
            if (s2 == 1) break;
        }
        if (s1 == 1) break;
    }
    return M;
}

GridFunction strong_maximal(const GridFunction& g) { return GridFunction(g.ax1, g.ax2, strong_maximal(g.v)); }

OpenSet enlarge(const OpenSet& omega, double threshold) {
    if (omega.empty()) throw std::invalid_argument("empty open set");
    if (!(threshold > 0 && threshold < 1)) throw std::invalid_argument("threshold must lie in (0,1)");
    Eigen::MatrixXd ind(omega.n1, omega.n2);
    for (int i = 0; i < omega.n1; ++i)
        for (int j = 0; j < omega.n2; ++j) ind(i, j) = omega(i, j) ? 1.0 : 0.0;
    Eigen::MatrixXd M = strong_maximal(ind);
    OpenSet out = omega;
    for (int i = 0; i < omega.n1; ++i)
        for (int j = 0; j < omega.n2; ++j) out.set(i, j, M(i, j) > threshold);
    return out;
}

double journe_gamma_enlarged(const DyadicRectangle& r, const Prefix2D& enlarged, int n1, int n2,
                             int direction) {
    if (direction != 1 && direction != 2) throw std::invalid_argument("direction must be 1 or 2");
    DyadicInterval base = direction == 1 ? r.i1 : r.i2;
    DyadicInterval l = base;
    auto fits = [&](const DyadicInterval& x) {
        DyadicRectangle s = direction == 1 ? DyadicRectangle{x, r.i2} : DyadicRectangle{r.i1, x};
        return enlarged.full(box_of(s, n1, n2));
    };
    while (l.has_parent() && fits(l.parent())) l = l.parent();
    int n = direction == 1 ? n1 : n2;
    return static_cast<double>(l.size(n)) / base.size(n);
}

double journe_gamma(const DyadicRectangle& r, const OpenSet& omega, int direction) {
    Prefix2D P(omega);
    if (!P.full(box_of(r, omega.n1, omega.n2))) throw std::invalid_argument("rectangle not contained in open set");
    Prefix2D E(enlarge(omega, 0.5));
    return journe_gamma_enlarged(r, E, omega.n1, omega.n2, direction);
}

std::pair<double, double> journe_sum(const OpenSet& omega, double delta) {
    if (!(delta > 0)) throw std::invalid_argument("delta must be positive");
    Prefix2D E(enlarge(omega, 0.5));
    Axis a1(omega.n1, omega.h1), a2(omega.n2, omega.h2);
    double s1 = 0, s2 = 0;
    for (const auto& R : maximal_in_direction(omega, 2))
        s1 += R.area(a1, a2) * std::pow(journe_gamma_enlarged(R, E, omega.n1, omega.n2, 1), -delta);
    for (const auto& R : maximal_in_direction(omega, 1))
        s2 += R.area(a1, a2) * std::pow(journe_gamma_enlarged(R, E, omega.n1, omega.n2, 2), -delta);
    return {s1, s2};
}

ScaleGrid::ScaleGrid(double tmin, double tmax, int ppo) : t_min(tmin), t_max(tmax), per_octave(ppo) {
    if (!(tmin > 0) || !(tmax > tmin) || ppo < 1) throw std::invalid_argument("invalid scale grid");
    int K = static_cast<int>(std::ceil(ppo * std::log2(tmax / tmin) - 1e-9));
    t.resize(K + 1);
    for (int k = 0; k <= K; ++k) t[k] = tmin * std::exp2(static_cast<double>(k) / ppo);
}

double ScaleGrid::weight() const { return std::log(2.0) / per_octave; }

ScaleGrid default_scale_grid(const Axis& a, int ppo) { return ScaleGrid(0.5 * a.h, a.length(), ppo); }

int cone_radius(double t, double h, double aperture) {
    double x = aperture * t / h;
    int r = static_cast<int>(std::ceil(x - 1e-9)) - 1;
    return std::max(r, 0);
}

}  // namespace hardy
