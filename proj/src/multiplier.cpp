#include "hardy/multiplier.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace hardy {

namespace {

double distance(double x, double y, const Axis& a) {
    double d = std::abs(x - y);
    if (a.bc == Boundary::periodic) d = std::min(d, a.length() - d);
    return d;
}

double beyond(double x, double y, double h, double cut, const Axis& a) {
    return std::clamp((distance(x, y, a) + 0.5 * h - cut) / h, 0.0, 1.0);
}

double smallest_positive(const AxisOperator& L) {
    const double scale = std::max(1.0, L.lambda_max());
    for (Eigen::Index k = 0; k < L.evals.size(); ++k)
        if (L.evals(k) > 1e-12 * scale) return L.evals(k);
    throw std::domain_error("operator has no positive spectrum");
}

struct FftwBuffer {
    double* in = nullptr;
    fftw_complex* out = nullptr;
    fftw_plan plan = nullptr;
    FftwBuffer(int n0, int n1) {
        in = fftw_alloc_real(static_cast<size_t>(n0) * n1);
        out = fftw_alloc_complex(static_cast<size_t>(n0) * (n1 / 2 + 1));
        if (!in || !out) throw std::bad_alloc();
        plan = fftw_plan_dft_r2c_2d(n0, n1, in, out, FFTW_ESTIMATE);
    }
    ~FftwBuffer() {
        if (plan) fftw_destroy_plan(plan);
        fftw_free(in);
        fftw_free(out);
    }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
};

}  // namespace

std::vector<std::string> builtin_symbol_names() { return {"one", "heat", "ratio", "riesz-like", "sin-divergent"}; }

MultiplierSymbol builtin_symbol(const std::string& name) {
    if (name == "one") return {name, "marcinkiewicz", [](double, double) { return 1.0; }};
    if (name == "heat") return {name, "marcinkiewicz", [](double l, double m) { return std::exp(-l - m); }};
    if (name == "ratio")
        return {name, "marcinkiewicz", [](double l, double m) { return l + m > 0 ? l / (l + m) : 0.0; }};
    if (name == "riesz-like")
        return {name, "marcinkiewicz", [](double l, double m) { return l * m / ((1 + l) * (1 + m)); }};
    if (name == "sin-divergent") return {name, "none", [](double l, double) { return std::sin(l); }};
    throw std::invalid_argument("unknown symbol: " + name);
}

double DyadicWindow::step(double u) {
    if (u <= 0) return 0.0;
    if (u >= 1) return 1.0;
    const double a = std::exp(-1.0 / u), b = std::exp(-1.0 / (1.0 - u));
    return a / (a + b);
}

double DyadicWindow::omega(double lambda) const {
    if (!(lambda > 0)) return 0.0;
    const double u = std::log2(lambda);
    return step(u + 2) - step(u + 1);
}

double DyadicWindow::cutoff(double lambda) const {
    if (!(lambda > 0)) return 1.0;
    return 1.0 - step(std::log2(lambda) + 1);
}

double DyadicWindow::partition_residual(int L, int samples) const {
    double worst = 0;
    const double u0 = -L + 1, u1 = L - 1;
    for (int i = 0; i < samples; ++i) {
        const double lambda = std::exp2(u0 + (u1 - u0) * i / (samples - 1));
        double s = 0;
        for (int l = -L; l <= L; ++l) s += omega(std::exp2(-l) * lambda);
        worst = std::max(worst, std::abs(s - 1));
    }
    return worst;
}

double sobolev_norm(const Eigen::MatrixXd& G, double dx1, double dx2, const SobolevParams& p) {
    if (!(dx1 > 0) || !(dx2 > 0)) throw std::invalid_argument("spacing must be positive");
    if (p.padding < 1) throw std::invalid_argument("padding must be at least 1");
    if (!G.allFinite()) throw std::invalid_argument("non-finite sample");
    if (G.size() == 0 || G.cwiseAbs().maxCoeff() == 0) return 0.0;
    const int n0 = static_cast<int>(G.rows()) * p.padding, n1 = static_cast<int>(G.cols()) * p.padding;
    FftwBuffer buf(n0, n1);
    std::fill(buf.in, buf.in + static_cast<size_t>(n0) * n1, 0.0);
    for (Eigen::Index i = 0; i < G.rows(); ++i)
        for (Eigen::Index j = 0; j < G.cols(); ++j) buf.in[i * n1 + j] = G(i, j);
    fftw_execute(buf.plan);

    const int h1 = n1 / 2 + 1;
    const double c0 = 2 * std::numbers::pi / (n0 * dx1), c1 = 2 * std::numbers::pi / (n1 * dx2);
    long double total = 0, tail = 0;
    for (int k0 = 0; k0 < n0; ++k0) {
        const int s0 = k0 <= n0 / 2 ? k0 : k0 - n0;
        const double w0 = std::pow(1 + (c0 * s0) * (c0 * s0), p.s1);
        for (int k1 = 0; k1 < h1; ++k1) {
            const double mult = (k1 == 0 || (n1 % 2 == 0 && k1 == n1 / 2)) ? 1.0 : 2.0;
            const double w = w0 * std::pow(1 + (c1 * k1) * (c1 * k1), p.s2);
            const fftw_complex& z = buf.out[static_cast<size_t>(k0) * h1 + k1];
            const long double e = mult * w * (z[0] * z[0] + z[1] * z[1]);
            total += e;
            if (std::abs(s0) > n0 / 4 || k1 > n1 / 4) tail += e;
        }
    }
    // share of the norm carried by the upper half of the sampled band
    const double drop = 1.0 - std::sqrt(static_cast<double>((total - tail) / total));
    if (drop > p.tail_tol) throw std::runtime_error("undersampled symbol");
    return std::sqrt(static_cast<double>(total) * dx1 * dx2 / (static_cast<double>(n0) * n1));
}

Eigen::MatrixXd windowed_samples(const MultiplierSymbol& F, const DyadicWindow& w, int which, double t1, double t2,
                                 int samples, double* dx1, double* dx2) {
    if (which < 1 || which > 3) throw std::invalid_argument("window selector must be 1, 2 or 3");
    if (samples < 8) throw std::invalid_argument("too few samples");
    const bool win1 = which != 2, win2 = which != 1;
    const double d1 = (win1 ? 2.0 : 4.0) / samples, d2 = (win2 ? 2.0 : 4.0) / samples;
    std::vector<double> x1(samples), x2(samples), g1(samples), g2(samples);
    for (int i = 0; i < samples; ++i) {
        x1[i] = win1 ? i * d1 : -2.0 + i * d1;
        x2[i] = win2 ? i * d2 : -2.0 + i * d2;
        g1[i] = win1 ? w.omega(x1[i]) : w.cutoff(std::abs(x1[i]) / 2);
        g2[i] = win2 ? w.omega(x2[i]) : w.cutoff(std::abs(x2[i]) / 2);
    }
    const double s1 = win1 ? t1 : 1.0, s2 = win2 ? t2 : 1.0;
    // C^2 reflection across 0 in the unwindowed variable: E(-y) = 6F(y) - 8F(2y) + 3F(3y)
    static constexpr double kc[3] = {6.0, -8.0, 3.0};
    auto value = [&](double x1v, double x2v) {
        if (x1v < 0) {
            double v = 0;
            for (int k = 0; k < 3; ++k) v += kc[k] * F(-(k + 1) * x1v, s2 * x2v);
            return v;
        }
        if (x2v < 0) {
            double v = 0;
            for (int k = 0; k < 3; ++k) v += kc[k] * F(s1 * x1v, -(k + 1) * x2v);
            return v;
        }
        return F(s1 * x1v, s2 * x2v);
    };
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(samples, samples);
    for (int i = 0; i < samples; ++i) {
        if (g1[i] == 0) continue;
        for (int j = 0; j < samples; ++j) {
            if (g2[j] == 0) continue;
            G(i, j) = g1[i] * g2[j] * value(x1[i], x2[j]);
        }
    }
    if (dx1) *dx1 = d1;
    if (dx2) *dx2 = d2;
    return G;
}

double windowed_norm(const MultiplierSymbol& F, const DyadicWindow& w, const SobolevParams& p, int which, double t1,
                     double t2) {
    double dx1 = 0, dx2 = 0;
    Eigen::MatrixXd G = windowed_samples(F, w, which, t1, t2, p.samples, &dx1, &dx2);
    return sobolev_norm(G, dx1, dx2, p);
}

std::vector<double> dyadic_t_grid(double lo, double hi, int max_count) {
    if (!(lo > 0) || !(hi >= lo)) throw std::invalid_argument("invalid t range");
    std::vector<double> t;
    const int l0 = static_cast<int>(std::ceil(2 * std::log2(lo) - 1e-9));
    for (int l = l0; static_cast<int>(t.size()) < max_count; ++l) {
        const double v = std::exp2(0.5 * l);
        if (v > hi * (1 + 1e-12)) break;
        t.push_back(v);
    }
    return t;
}

bool MarcinkiewiczReport::interior() const {
    auto inside = [](int a, size_t n) { return a > 0 && a + 1 < static_cast<int>(n); };
    return inside(arg1, t1.size()) && inside(arg2, t2.size()) && inside(arg12_1, t1.size()) &&
           inside(arg12_2, t2.size());
}

MarcinkiewiczReport marcinkiewicz_constant(const MultiplierSymbol& F, const DyadicWindow& w, const SobolevParams& p,
                                           const std::vector<double>& t1, const std::vector<double>& t2) {
    if (t1.empty() || t2.empty()) throw std::invalid_argument("empty t grid");
    MarcinkiewiczReport r;
    r.t1 = t1;
    r.t2 = t2;
    for (size_t i = 0; i < t1.size(); ++i) {
        r.norm1.push_back(windowed_norm(F, w, p, 1, t1[i], 1.0));
        if (r.norm1.back() > r.sup1 || r.arg1 < 0) {
            r.sup1 = r.norm1.back();
            r.arg1 = static_cast<int>(i);
        }
    }
    for (size_t j = 0; j < t2.size(); ++j) {
        r.norm2.push_back(windowed_norm(F, w, p, 2, 1.0, t2[j]));
        if (r.norm2.back() > r.sup2 || r.arg2 < 0) {
            r.sup2 = r.norm2.back();
            r.arg2 = static_cast<int>(j);
        }
    }
    r.norm12.resize(static_cast<Eigen::Index>(t1.size()), static_cast<Eigen::Index>(t2.size()));
    for (size_t i = 0; i < t1.size(); ++i)
        for (size_t j = 0; j < t2.size(); ++j) {
            const double v = windowed_norm(F, w, p, 3, t1[i], t2[j]);
            r.norm12(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
            if (v > r.sup12 || r.arg12_1 < 0) {
                r.sup12 = v;
                r.arg12_1 = static_cast<int>(i);
                r.arg12_2 = static_cast<int>(j);
            }
        }
    r.total = r.sup1 + r.sup2 + r.sup12;
    auto growth = [](const std::vector<double>& t, const std::vector<double>& v) {
        if (t.size() < 4) return 0.0;
        std::vector<double> a(t.begin() + static_cast<long>(t.size() / 2), t.end()),
            b(v.begin() + static_cast<long>(v.size() / 2), v.end());
        PowerFit f = fit_power_law(a, b);
        return std::isfinite(f.delta) ? -f.delta : 0.0;
    };
    r.growth1 = growth(t1, r.norm1);
    r.growth2 = growth(t2, r.norm2);
    return r;
}

MarcinkiewiczReport marcinkiewicz_constant(const MultiplierSymbol& F, const DyadicWindow& w, const SobolevParams& p,
                                           const ProductOperatorPair& pair) {
    auto t1 = dyadic_t_grid(smallest_positive(pair.L1), 4 * pair.L1.lambda_max());
    auto t2 = dyadic_t_grid(smallest_positive(pair.L2), 4 * pair.L2.lambda_max());
    return marcinkiewicz_constant(F, w, p, t1, t2);
}

double symmetric_power_norm(const std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>& apply, int n1, int n2,
                            double tol, int max_iter) {
    Eigen::MatrixXd v(n1, n2);
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j) v(i, j) = 1.0 + 0.3 * std::sin(1.7 * i + 0.4) * std::cos(0.9 * j + 0.1);
    v /= v.norm();
    double est = 0;
    for (int it = 0; it < max_iter; ++it) {
        Eigen::MatrixXd w = apply(apply(v));
        const double nw = w.norm();
        if (nw == 0) return 0.0;
        const double next = std::sqrt(nw);
        v = w / nw;
        if (it > 0 && std::abs(next - est) <= tol * next) return next;
        est = next;
    }
    return est;
}

MultiplierAtomReport multiplier_atom_harness(const MultiplierSymbol& F, const std::vector<HardyAtom>& atoms,
                                             const ProductOperatorPair& pair, double C_F) {
    MultiplierAtomReport r;
    r.F00 = F(0.0, 0.0);
    if (!std::isfinite(r.F00)) throw std::domain_error("symbol not finite at the origin");
    SymbolTable full(F.F, pair);
    Symbol2 reduced_symbol = [&](double l, double m) { return F(l, m) - r.F00; };
    SymbolTable reduced(reduced_symbol, pair);
    const Axis &a1 = pair.L1.axis, &a2 = pair.L2.axis;
    const double area = a1.h * a2.h;
    for (const HardyAtom& atom : atoms) {
        GridFunction a = atom.a();
        const double l1 = full.apply(a).v.cwiseAbs().sum() * area;
        const double lr = reduced.apply(a).v.cwiseAbs().sum() * area;
        const double lc = std::abs(r.F00) * a.v.cwiseAbs().sum() * area;
        r.per_atom.push_back(l1);
        r.max_l1 = std::max(r.max_l1, l1);
        r.max_l1_reduced = std::max(r.max_l1_reduced, lr);
        r.max_l1_constant = std::max(r.max_l1_constant, lc);
    }
    r.sup_F = full.sup();
    r.opnorm = symmetric_power_norm(
        [&](const Eigen::MatrixXd& f) { return full.apply(GridFunction(a1, a2, f)).v; }, a1.n, a2.n);
    if (std::isfinite(C_F) && C_F > 0) r.ratio = r.max_l1 / C_F;
    return r;
}

Prop53Report prop53_offdiag_check(const MultiplierSymbol& F, const ProductOperatorPair& pair, const DyadicWindow& w,
                                  const std::vector<std::pair<double, double>>& t_list, const Prop53Options& opt) {
    const bool on1 = opt.which == Prop53Case::first || opt.which == Prop53Case::both;
    const bool on2 = opt.which == Prop53Case::second || opt.which == Prop53Case::both;
    if (!on1 && !on2) throw std::invalid_argument("unsupported support pattern");
    if ((on1 && !(opt.R1 > 0)) || (on2 && !(opt.R2 > 0))) throw std::invalid_argument("unsupported support pattern");
    if (opt.gammas.empty()) throw std::invalid_argument("empty gamma list");

    const AxisOperator &L1 = pair.L1, &L2 = pair.L2;
    const Axis &a1 = L1.axis, &a2 = L2.axis;
    std::vector<int> ys1 = opt.y1_samples.empty() ? default_samples(a1) : opt.y1_samples;
    std::vector<int> ys2 = opt.y2_samples.empty() ? default_samples(a2) : opt.y2_samples;
    for (int y : ys1)
        if (y < 0 || y >= a1.n) throw std::out_of_range("sample index outside the grid");
    for (int y : ys2)
        if (y < 0 || y >= a2.n) throw std::out_of_range("sample index outside the grid");

    // symbol cut to the support pattern
    Eigen::MatrixXd base(L1.n(), L2.n());
    for (int j = 0; j < L1.n(); ++j)
        for (int k = 0; k < L2.n(); ++k) {
            const double l = L1.evals(j), m = L2.evals(k);
            double c = 1.0;
            if (on1) c *= w.cutoff(l / (opt.R1 * opt.R1));
            if (on2) c *= w.cutoff(m / (opt.R2 * opt.R2));
            base(j, k) = c == 0 ? 0.0 : c * F(l, m);
        }
    if (!base.allFinite()) throw std::domain_error("symbol not finite on the spectrum");

    Prop53Report rep;
    rep.which = opt.which;
    for (auto [t1, t2] : t_list) {
        if ((on1 && !(t1 > 0)) || (on2 && !(t2 > 0))) throw std::invalid_argument("scale must be positive");
        Eigen::MatrixXd G = base;
        if (on1)
            for (int j = 0; j < L1.n(); ++j) G.row(j) *= 1 - std::exp(-t1 * t1 * L1.evals(j));
        if (on2)
            for (int k = 0; k < L2.n(); ++k) G.col(k) *= 1 - std::exp(-t2 * t2 * L2.evals(k));

        std::vector<double> best(opt.gammas.size(), 0.0);
        std::vector<bool> any(opt.gammas.size(), false);

        if (opt.which == Prop53Case::both) {
            for (int y1 : ys1)
                for (int y2 : ys2) {
                    Eigen::MatrixXd K = L1.evecs * L1.evecs.row(y1).transpose().asDiagonal() * G *
                                        L2.evecs.row(y2).transpose().asDiagonal() * L2.evecs.transpose() /
                                        (a1.h * a2.h);
                    for (size_t g = 0; g < opt.gammas.size(); ++g) {
                        const double gm = opt.gammas[g];
                        double acc = 0;
                        bool hit = false;
                        for (int x2 = 0; x2 < a2.n; ++x2) {
                            const double b2 = beyond(a2.center(x2), a2.center(y2), a2.h, gm * t2, a2);
                            if (b2 == 0) continue;
                            const double w2 = std::pow(1 + opt.R2 * distance(a2.center(x2), a2.center(y2), a2), opt.s2);
                            for (int x1 = 0; x1 < a1.n; ++x1) {
                                const double b1 = beyond(a1.center(x1), a1.center(y1), a1.h, gm * t1, a1);
                                if (b1 == 0) continue;
                                hit = true;
                                const double w1 =
                                    std::pow(1 + opt.R1 * distance(a1.center(x1), a1.center(y1), a1), opt.s1);
                                acc += b1 * b2 * w1 * w2 * K(x1, x2) * K(x1, x2);
                            }
                        }
                        best[g] = std::max(best[g], acc * a1.h * a2.h);
                        any[g] = any[g] || hit;
                    }
                }
        } else {
            const bool first = opt.which == Prop53Case::first;
            const AxisOperator& L = first ? L1 : L2;
            const Axis& a = L.axis;
            const double R = first ? opt.R1 : opt.R2, s = first ? opt.s1 : opt.s2, t = first ? t1 : t2;
            const Eigen::MatrixXd Gt = first ? G : Eigen::MatrixXd(G.transpose());
            for (int y : first ? ys1 : ys2) {
                // C(x, k) = sum_j u_j(x) u_j(y) G(j, k); the slice is diagonal in the other eigenbasis
                Eigen::MatrixXd C = L.evecs * L.evecs.row(y).transpose().asDiagonal() * Gt;
                Eigen::VectorXd slice = C.cwiseAbs().rowwise().maxCoeff() / a.h;
                for (size_t g = 0; g < opt.gammas.size(); ++g) {
                    double acc = 0;
                    bool hit = false;
                    for (int x = 0; x < a.n; ++x) {
                        const double b = beyond(a.center(x), a.center(y), a.h, opt.gammas[g] * t, a);
                        if (b == 0) continue;
                        hit = true;
                        acc += b * slice(x) * slice(x) * std::pow(1 + R * distance(a.center(x), a.center(y), a), s);
                    }
                    best[g] = std::max(best[g], acc * a.h);
                    any[g] = any[g] || hit;
                }
            }
        }

        std::vector<double> gx, gv;
        for (size_t g = 0; g < opt.gammas.size(); ++g) {
            Prop53Row row;
            row.t1 = on1 ? t1 : 0.0;
            row.t2 = on2 ? t2 : 0.0;
            row.gamma1 = on1 ? opt.gammas[g] : 0.0;
            row.gamma2 = on2 ? opt.gammas[g] : 0.0;
            row.empty = !any[g];
            row.integral = best[g];
            row.amplitude = std::sqrt(best[g]);
            rep.rows.push_back(row);
            if (any[g]) {
                gx.push_back(opt.which == Prop53Case::both ? opt.gammas[g] * opt.gammas[g] : opt.gammas[g]);
                gv.push_back(best[g]);
            }
        }
        rep.fits.push_back(fit_power_law(gx, gv));
    }
    rep.fit_eta = std::numeric_limits<double>::infinity();
    for (const PowerFit& f : rep.fits) {
        rep.fit_C = std::max(rep.fit_C, f.C);
        rep.fit_eta = std::min(rep.fit_eta, f.delta);
    }
    return rep;
}

}  // namespace hardy
