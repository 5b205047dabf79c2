#include "hardy/operator.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace hardy {

namespace {

constexpr double kClamp = 1e-10;

double axis_distance(const Axis& a, int i, int j) {
    int d = std::abs(i - j);
    if (a.bc == Boundary::periodic) d = std::min(d, a.n - d);
    return d * a.h;
}

void decompose(AxisOperator& op) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.matrix);
    if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
    op.evals = es.eigenvalues();
    op.evecs = es.eigenvectors();
    double scale = std::max(1.0, op.matrix.cwiseAbs().maxCoeff());
    for (Eigen::Index k = 0; k < op.evals.size(); ++k) {
        if (op.evals(k) < -kClamp * scale) throw std::runtime_error("operator is not non-negative");
        // roundoff-level eigenvalues are zero modes
        if (op.evals(k) < 1e-12 * scale) op.evals(k) = 0.0;
    }
    // fix eigenvector signs so the first large component is positive
    for (Eigen::Index k = 0; k < op.evecs.cols(); ++k) {
        Eigen::Index idx;
        op.evecs.col(k).cwiseAbs().maxCoeff(&idx);
        if (op.evecs(idx, k) < 0) op.evecs.col(k) *= -1.0;
    }
}

// Gauss-Legendre nodes/weights on [-1,1].
void gauss_legendre(int m, std::vector<long double>& x, std::vector<long double>& w) {
    x.assign(m, 0);
    w.assign(m, 0);
    const long double pi = 3.141592653589793238462643383279502884L;
    for (int i = 0; i < (m + 1) / 2; ++i) {
        long double z = std::cos(pi * (i + 0.75L) / (m + 0.5L));
        long double pp = 0;
        for (int it = 0; it < 100; ++it) {
            long double p1 = 1, p2 = 0;
            for (int j = 1; j <= m; ++j) {
                long double p3 = p2;
                p2 = p1;
                p1 = ((2.0L * j - 1) * z * p2 - (j - 1.0L) * p3) / j;
            }
            pp = m * (z * p1 - p2) / (z * z - 1);
            long double dz = p1 / pp;
            z -= dz;
            if (std::fabs(dz) < 1e-19L) break;
        }
        x[i] = -z;
        x[m - 1 - i] = z;
        w[i] = w[m - 1 - i] = 2.0L / ((1 - z * z) * pp * pp);
    }
}

}  // namespace

Eigen::VectorXd AxisOperator::symbol_values(const Symbol1& F) const {
    Eigen::VectorXd f(evals.size());
    for (Eigen::Index k = 0; k < evals.size(); ++k) {
        f(k) = F(evals(k));
        if (!std::isfinite(f(k))) {
            std::ostringstream os;
            os << "symbol not finite at eigenvalue " << std::setprecision(17) << evals(k);
            throw std::domain_error(os.str());
        }
    }
    return f;
}

Eigen::MatrixXd AxisOperator::function_matrix(const Symbol1& F) const {
    Eigen::VectorXd f = symbol_values(F);
    return evecs * f.asDiagonal() * evecs.transpose();
}

void AxisOperator::save(std::ostream& os) const {
    os << "axis " << axis.n << ' ' << std::setprecision(17) << axis.h << ' ' << axis.origin << ' '
       << (axis.bc == Boundary::dirichlet ? "dirichlet" : "periodic") << '\n';
    os << "potential";
    for (Eigen::Index i = 0; i < potential.size(); ++i) os << ' ' << potential(i);
    os << "\neigenvalues";
    for (Eigen::Index i = 0; i < evals.size(); ++i) os << ' ' << evals(i);
    os << "\neigenvectors\n";
    for (Eigen::Index i = 0; i < evecs.rows(); ++i) {
        for (Eigen::Index j = 0; j < evecs.cols(); ++j) os << (j ? " " : "") << evecs(i, j);
        os << '\n';
    }
}

AxisOperator AxisOperator::load(std::istream& is) {
    std::string tag, bc;
    int n;
    double h, origin;
    is >> tag >> n >> h >> origin >> bc;
    if (tag != "axis" || !is) throw std::runtime_error("malformed operator file");
    Axis axis(n, h, bc == "periodic" ? Boundary::periodic : Boundary::dirichlet, origin);
    Eigen::VectorXd V(n);
    is >> tag;
    if (tag != "potential") throw std::runtime_error("malformed operator file");
    for (int i = 0; i < n; ++i) is >> V(i);
    AxisOperator op = build_schrodinger(axis, V);
    is >> tag;
    if (tag != "eigenvalues") throw std::runtime_error("malformed operator file");
    for (int i = 0; i < n; ++i) is >> op.evals(i);
    is >> tag;
    if (tag != "eigenvectors") throw std::runtime_error("malformed operator file");
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) is >> op.evecs(i, j);
    if (!is) throw std::runtime_error("malformed operator file");
    return op;
}

Eigen::MatrixXd gradient_matrix(const Axis& axis) {
    const int n = axis.n;
    const double ih = 1.0 / axis.h;
    if (axis.bc == Boundary::dirichlet) {
        Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n + 1, n);
        for (int e = 0; e <= n; ++e) {
            if (e < n) D(e, e) = ih;
            if (e >= 1) D(e, e - 1) = -ih;
        }
        return D;
    }
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
    for (int e = 0; e < n; ++e) {
        D(e, e) += ih;
        D(e, (e + n - 1) % n) -= ih;
    }
    return D;
}

AxisOperator build_laplacian(const Axis& axis) { return build_schrodinger(axis, Eigen::VectorXd::Zero(axis.n)); }

AxisOperator build_schrodinger(const Axis& axis, const Eigen::VectorXd& V) {
    if (axis.n < 4) throw std::invalid_argument("grid too small");
    if (V.size() != axis.n) throw std::invalid_argument("potential size does not match axis");
    for (Eigen::Index i = 0; i < V.size(); ++i) {
        if (!std::isfinite(V(i))) throw std::invalid_argument("non-finite sample");
        if (V(i) < 0) throw std::invalid_argument("potential must be non-negative");
    }
    AxisOperator op;
    op.axis = axis;
    op.grad = gradient_matrix(axis);
    op.potential = V;
    op.matrix = op.grad.transpose() * op.grad;
    op.matrix.diagonal() += V;
    decompose(op);
    return op;
}

Eigen::VectorXd spectral_apply(const Symbol1& F, const AxisOperator& L, const Eigen::VectorXd& g) {
    Eigen::VectorXd f = L.symbol_values(F);
    return L.evecs * (f.asDiagonal() * (L.evecs.transpose() * g));
}

Eigen::MatrixXd heat_kernel(const AxisOperator& L, double t) {
    if (!(t > 0)) throw std::invalid_argument("time must be positive");
    Eigen::MatrixXd K = L.function_matrix([t](double l) { return std::exp(-t * l); }) / L.axis.h;
    for (Eigen::Index i = 0; i < K.size(); ++i) {
        double& k = K.data()[i];
        if (k < 0) {
            if (k < -kClamp) throw std::runtime_error("negative heat kernel entry");
            k = 0.0;
        }
    }
    return K;
}

Eigen::MatrixXd heat_derivative_kernel(const AxisOperator& L, double t, int k) {
    if (!(t > 0)) throw std::invalid_argument("time must be positive");
    return L.function_matrix([t, k](double l) { return std::pow(l, k) * std::exp(-t * l); }) / L.axis.h;
}

Eigen::MatrixXd wave_kernel(const AxisOperator& L, double t) {
    if (!(t > 0)) throw std::invalid_argument("time must be positive");
    return L.function_matrix([t](double l) { return std::cos(t * std::sqrt(l)); }) / L.axis.h;
}

SpectralWindow::SpectralWindow() {
    const int order = 20;
    std::vector<long double> gx, gw;
    gauss_legendre(order, gx, gw);
    const long double two_pi = 6.283185307179586476925286766559L;
    long double reference = 0;
    for (int panels : {64, 128, 256, 512, 1024}) {
        Rule r{panels, {}, {}};
        std::vector<long double> wl;
        long double total = 0;
        for (int p = 0; p < panels; ++p) {
            long double a = static_cast<long double>(p) / panels, b = static_cast<long double>(p + 1) / panels;
            for (int i = 0; i < order; ++i) {
                long double x = 0.5L * (a + b) + 0.5L * (b - a) * gx[i];
                long double w = 0.5L * (b - a) * gw[i] * std::exp(-1.0L / (1.0L - x * x));
                r.nodes.push_back(static_cast<double>(x));
                wl.push_back(w);
                total += 2 * w;
            }
        }
        if (reference == 0) reference = total;
        for (auto w : wl) r.weights.push_back(static_cast<double>(w * two_pi / total));
        rules_.push_back(std::move(r));
    }
    c_ = static_cast<double>(two_pi / reference);
}

double SpectralWindow::phi(double xi) const {
    if (std::fabs(xi) >= 1) return 0.0;
    return c_ * std::exp(-1.0 / (1.0 - xi * xi));
}

double SpectralWindow::Phi(double s, int m) const {
    // 2 int_0^1 phi(xi) xi^m cos^{(m)}(s xi) dxi, accumulated in extended precision;
    // panels are chosen so each spans at most about 8 radians of phase
    const double need = 32 + std::fabs(s) / 8;
    const Rule* r = &rules_.back();
    for (const auto& cand : rules_)
        if (cand.panels >= need) {
            r = &cand;
            break;
        }
    long double acc = 0;
    const long double shift = 1.5707963267948966192313216916397514L * m;
    const long double ls = s;
    for (size_t i = 0; i < r->nodes.size(); ++i) {
        long double x = r->nodes[i];
        long double term = r->weights[i] * std::cos(ls * x + shift);
        if (m) term *= std::pow(x, m);
        acc += term;
    }
    return static_cast<double>(2 * acc);
}

double HeatKernelFit::C_at(double cc) const {
    for (const auto& [c0, C0] : sweep)
        if (std::fabs(c0 - cc) <= 1e-12 * cc) return C0;
    throw std::invalid_argument("c not on the sweep grid");
}

HeatKernelFit fit_gaussian_bound(const AxisOperator& L, const GaussianFitOptions& opt) {
    const Axis& ax = L.axis;
    const int n = ax.n;
    const int k = opt.derivative;
    double tmin = opt.t_min > 0 ? opt.t_min : ax.h * ax.h;
    double tmax = opt.t_max > 0 ? opt.t_max : std::pow(ax.length() / 4, 2);
    ScaleGrid ts(tmin, tmax, opt.t_per_octave);
    const int b = ax.bc == Boundary::dirichlet ? opt.boundary_cells : 0;
    if (n - 2 * b < 2) throw std::invalid_argument("grid too small");

    struct Sample {
        double logq, d2t, q, t, x, y;
    };
    std::vector<Sample> smp;
    const double expo = 0.5 + k;
    for (double t : ts.t) {
        Eigen::MatrixXd K = k == 0 ? heat_kernel(L, t) : heat_derivative_kernel(L, t, k);
        double tp = std::pow(t, expo);
        for (int i = b; i < n - b; ++i)
            for (int j = b; j < n - b; ++j) {
                double q = std::fabs(K(i, j)) * tp;
                if (q <= opt.rel_tol) continue;
                double d = axis_distance(ax, i, j);
                smp.push_back({std::log(q), d * d / t, q, t, ax.center(i), ax.center(j)});
            }
    }
    HeatKernelFit fit;
    fit.samples = static_cast<long>(smp.size());
    if (smp.empty()) return fit;

    std::vector<double> cs(opt.c_count);
    for (int i = 0; i < opt.c_count; ++i)
        cs[i] = opt.c_min * std::pow(opt.c_max / opt.c_min, opt.c_count == 1 ? 0.0 : double(i) / (opt.c_count - 1));
    size_t worst_last = 0;
    for (size_t ci = 0; ci < cs.size(); ++ci) {
        double best = -std::numeric_limits<double>::infinity();
        size_t arg = 0;
        for (size_t s = 0; s < smp.size(); ++s) {
            double v = smp[s].logq + smp[s].d2t / cs[ci];
            if (v > best) {
                best = v;
                arg = s;
            }
        }
        fit.sweep.emplace_back(cs[ci], std::exp(best));
        if (ci + 1 == cs.size()) worst_last = arg;
    }
    double Cend = fit.sweep.back().second;
    if (!(Cend <= opt.C_max)) {
        const auto& w = smp[worst_last];
        std::ostringstream os;
        os << "Gaussian bound violated: C(c_max)=" << Cend << " at t=" << w.t << " x=" << w.x << " y=" << w.y;
        throw std::runtime_error(os.str());
    }
    size_t pick = cs.size() - 1;
    for (size_t ci = 0; ci < cs.size(); ++ci)
        if (fit.sweep[ci].second <= (1 + opt.knee_slack) * Cend) {
            pick = ci;
            break;
        }
    fit.c = cs[pick];
    fit.C = fit.sweep[pick].second;

    double viol = -std::numeric_limits<double>::infinity();
    for (const auto& s : smp) {
        double v = s.q - fit.C * std::exp(-s.d2t / fit.c) - opt.rel_tol;
        if (v > viol) {
            viol = v;
            fit.worst_t = s.t;
            fit.worst_x = s.x;
            fit.worst_y = s.y;
        }
    }
    fit.max_violation = viol;
    return fit;
}

Eigen::MatrixXd window_kernel(const AxisOperator& L, const SpectralWindow& w, double t, int kappa) {
    return L.function_matrix([&](double l) {
               double s = t * std::sqrt(l);
               return std::pow(t * t * l, kappa) * w.Phi(s);
           }) /
           L.axis.h;
}

LeakageReport propagation_leakage(const AxisOperator& L, const SpectralWindow& w, double t, double buffer,
                                  int kappa) {
    Eigen::MatrixXd K = window_kernel(L, w, t, kappa);
    LeakageReport r;
    const Axis& ax = L.axis;
    for (int i = 0; i < ax.n; ++i)
        for (int j = 0; j < ax.n; ++j) {
            double d = axis_distance(ax, i, j);
            double v = std::fabs(K(i, j));
            if (d <= t) r.on_cone = std::max(r.on_cone, v);
            if (d > t + buffer) r.leakage = std::max(r.leakage, v);
        }
    return r;
}

}  // namespace hardy
