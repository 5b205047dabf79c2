#include "hardy/sampling.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hardy {

OpenSet random_open_set(const Axis& a1, const Axis& a2, Rng& rng, int max_rects, double min_side,
                        double max_side) {
    OpenSet s(a1, a2);
    std::uniform_int_distribution<int> count(1, max_rects);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int k = count(rng);
    const double L1 = a1.length(), L2 = a2.length();
    const double lr = std::log(max_side / min_side);
    for (int r = 0; r < k; ++r) {
        double w1 = min_side * std::exp(lr * u(rng)) * L1;
        double w2 = min_side * std::exp(lr * u(rng)) * L2;
        double c1 = a1.origin + u(rng) * L1, c2 = a2.origin + u(rng) * L2;
        for (int i = 0; i < a1.n; ++i) {
            if (std::fabs(a1.center(i) - c1) >= 0.5 * w1) continue;
            for (int j = 0; j < a2.n; ++j)
                if (std::fabs(a2.center(j) - c2) < 0.5 * w2) s.set(i, j);
        }
    }
    if (s.empty()) s.set(a1.n / 2, a2.n / 2);
    return s;
}

Eigen::VectorXd random_potential(const Axis& a, Rng& rng, double vmax) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int terms = 4;
    double amp[terms], ph[terms];
    for (int k = 0; k < terms; ++k) {
        amp[k] = u(rng);
        ph[k] = 2 * std::numbers::pi * u(rng);
    }
    Eigen::VectorXd V(a.n);
    for (int i = 0; i < a.n; ++i) {
        double x = (a.center(i) - a.origin) / a.length();
        double s = 0, norm = 0;
        for (int k = 0; k < terms; ++k) {
            s += amp[k] * 0.5 * (1 + std::cos(2 * std::numbers::pi * (k + 1) * x + ph[k]));
            norm += amp[k];
        }
        V(i) = vmax * s / norm;
    }
    return V;
}

GridFunction random_sine_series(const Axis& a1, const Axis& a2, Rng& rng, int kmin, int kmax) {
    std::normal_distribution<double> g(0.0, 1.0);
    GridFunction f(a1, a2);
    for (int j = kmin; j <= kmax; ++j) {
        Eigen::VectorXd s1(a1.n);
        for (int i = 0; i < a1.n; ++i) s1(i) = std::sin(j * std::numbers::pi * (a1.center(i) - a1.origin) / a1.length());
        for (int k = kmin; k <= kmax; ++k) {
            double c = g(rng);
            Eigen::VectorXd s2(a2.n);
            for (int i = 0; i < a2.n; ++i)
                s2(i) = std::sin(k * std::numbers::pi * (a2.center(i) - a2.origin) / a2.length());
            f.v += c * s1 * s2.transpose();
        }
    }
    return f;
}

GridFunction random_eigen_series(const ProductOperatorPair& pair, Rng& rng, int kmin, int kmax) {
    if (kmin < 0 || kmax >= std::min(pair.L1.n(), pair.L2.n()) || kmin > kmax)
        throw std::invalid_argument("mode window outside the spectrum");
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(pair.L1.n(), pair.L2.n());
    for (int j = kmin; j <= kmax; ++j)
        for (int k = kmin; k <= kmax; ++k) c(j, k) = g(rng);
    return pair.from_spectral(c);
}

GridFunction random_noise(const Axis& a1, const Axis& a2, Rng& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    GridFunction f(a1, a2);
    for (Eigen::Index i = 0; i < f.v.size(); ++i) f.v.data()[i] = g(rng);
    return f;
}

TentFunction random_tent_function(const ProductOperatorPair& pair, const TentGrid& grid, Rng& rng) {
    GridFunction g = random_noise(grid.a1, grid.a2, rng);
    OpenSet omega = random_open_set(grid.a1, grid.a2, rng);
    for (int i1 = 0; i1 < grid.a1.n; ++i1)
        for (int i2 = 0; i2 < grid.a2.n; ++i2)
            if (!omega(i1, i2)) g.v(i1, i2) = 0;
    return q_tent(g, pair, grid);
}

TentFunction random_smooth_tent_function(const ProductOperatorPair& pair, const TentGrid& grid, Rng& rng,
                                         int kmax) {
    GridFunction g = random_sine_series(grid.a1, grid.a2, rng, 1, kmax);
    OpenSet omega = random_open_set(grid.a1, grid.a2, rng);
    for (int i1 = 0; i1 < grid.a1.n; ++i1)
        for (int i2 = 0; i2 < grid.a2.n; ++i2)
            if (!omega(i1, i2)) g.v(i1, i2) = 0;
    return q_tent(g, pair, grid);
}

}  // namespace hardy
