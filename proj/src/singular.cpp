#include "hardy/singular.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace hardy {

namespace {

double axis_distance(double x, double y, const Axis& a) {
    double d = std::abs(x - y);
    if (a.bc == Boundary::periodic) d = std::min(d, a.length() - d);
    return d;
}

// Fraction of the output cell of width h around x lying beyond distance cut from y.
double beyond(double x, double y, double h, double cut, const Axis& a) {
    return std::clamp((axis_distance(x, y, a) + 0.5 * h - cut) / h, 0.0, 1.0);
}

Eigen::MatrixXd heat_matrix(const AxisOperator& L, double s) {
    if (s < 0) throw std::invalid_argument("negative time");
    if (s == 0) return Eigen::MatrixXd::Identity(L.n(), L.n());
    return L.function_matrix([s](double l) { return std::exp(-s * l); });
}

}  // namespace

Eigen::MatrixXd ProductKernelOperator::apply(const Eigen::MatrixXd& f) const {
    if (f.rows() != in1.n || f.cols() != in2.n) throw std::invalid_argument("input size does not match operator");
    if (factors) return (*factors)[0] * f * (*factors)[1].transpose();
    return action(f);
}

Eigen::MatrixXd ProductKernelOperator::kernel_column(int y1, int y2) const {
    if (factors) {
        return (*factors)[0].col(y1) * (*factors)[1].col(y2).transpose() / (in1.h * in2.h);
    }
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(in1.n, in2.n);
    e(y1, y2) = 1.0 / (in1.h * in2.h);
    return apply(e);
}

double ProductKernelOperator::kernel(int x1, int y1, int x2, int y2) const {
    if (!factors) return kernel_column(y1, y2)(x1, x2);
    return (*factors)[0](x1, y1) * (*factors)[1](x2, y2) / (in1.h * in2.h);
}

std::vector<double> cell_positions(const Axis& a) {
    std::vector<double> x(a.n);
    for (int i = 0; i < a.n; ++i) x[i] = a.center(i);
    return x;
}

std::vector<double> edge_positions(const AxisOperator& L) {
    const Axis& a = L.axis;
    std::vector<double> x(L.grad.rows());
    for (size_t e = 0; e < x.size(); ++e) x[e] = a.origin + static_cast<double>(e) * a.h;
    return x;
}

ProductKernelOperator separable_operator(std::string name, const Axis& in1, const Axis& in2, Eigen::MatrixXd A1,
                                         Eigen::MatrixXd A2, std::vector<double> out_x1, double out_h1,
                                         std::vector<double> out_x2, double out_h2) {
    if (A1.cols() != in1.n || A2.cols() != in2.n || A1.rows() != static_cast<Eigen::Index>(out_x1.size()) ||
        A2.rows() != static_cast<Eigen::Index>(out_x2.size()))
        throw std::invalid_argument("factor sizes do not match the grids");
    ProductKernelOperator T;
    T.name = std::move(name);
    T.in1 = in1;
    T.in2 = in2;
    T.out_x1 = std::move(out_x1);
    T.out_x2 = std::move(out_x2);
    T.out_h1 = out_h1;
    T.out_h2 = out_h2;
    T.factors = std::array<Eigen::MatrixXd, 2>{std::move(A1), std::move(A2)};
    return T;
}

ProductKernelOperator identity_operator(const Axis& a1, const Axis& a2) {
    return separable_operator("identity", a1, a2, Eigen::MatrixXd::Identity(a1.n, a1.n),
                              Eigen::MatrixXd::Identity(a2.n, a2.n), cell_positions(a1), a1.h, cell_positions(a2),
                              a2.h);
}

ProductKernelOperator zero_operator(const Axis& a1, const Axis& a2) {
    return separable_operator("zero", a1, a2, Eigen::MatrixXd::Zero(a1.n, a1.n), Eigen::MatrixXd::Zero(a2.n, a2.n),
                              cell_positions(a1), a1.h, cell_positions(a2), a2.h);
}

ProductKernelOperator heat_operator(const ProductOperatorPair& pair, double s1, double s2) {
    const Axis &a1 = pair.L1.axis, &a2 = pair.L2.axis;
    return separable_operator("heat", a1, a2, heat_matrix(pair.L1, s1), heat_matrix(pair.L2, s2), cell_positions(a1),
                              a1.h, cell_positions(a2), a2.h);
}

ProductKernelOperator compose_heat(const ProductKernelOperator& T, const ProductOperatorPair& pair, double s1,
                                   double s2) {
    ProductKernelOperator out = T;
    if (T.factors) {
        (*out.factors)[0] = (*T.factors)[0] * heat_matrix(pair.L1, s1);
        (*out.factors)[1] = (*T.factors)[1] * heat_matrix(pair.L2, s2);
        return out;
    }
    Eigen::MatrixXd H1 = heat_matrix(pair.L1, s1), H2 = heat_matrix(pair.L2, s2);
    auto inner = T.action;
    out.action = [inner, H1, H2](const Eigen::MatrixXd& f) -> Eigen::MatrixXd { return inner(H1 * f * H2); };
    return out;
}

double matrix_opnorm(const Eigen::MatrixXd& A, double tol, int max_iter) {
    if (A.size() == 0) return 0.0;
    if (!A.allFinite()) throw std::invalid_argument("non-finite sample");
    if (A.norm() == 0) return 0.0;
    // Power iteration on the Gram matrix, squaring the iterated power each step so that
    // clustered top singular values still settle in a few dozen steps.
    const Eigen::MatrixXd G0 = A.rows() < A.cols() ? Eigen::MatrixXd(A * A.transpose())
                                                   : Eigen::MatrixXd(A.transpose() * A);
    const Eigen::Index n = G0.rows();
    Eigen::MatrixXd G = G0 / G0.norm();
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = 1.0 + 0.37 * std::sin(1.3 * static_cast<double>(i) + 0.2);
    v.normalize();
    double sigma = -1;
    for (int it = 0; it < max_iter; ++it) {
        Eigen::VectorXd w = G * v;
        double nw = w.norm();
        if (nw == 0) {
            v = Eigen::VectorXd::Unit(n, it % n);
            continue;
        }
        v = w / nw;
        const double next = std::sqrt(std::max(0.0, v.dot(G0 * v)));
        if (std::abs(next - sigma) <= 1e-3 * tol * next) return next;
        sigma = next;
        G = G * G;
        const double ng = G.norm();
        if (ng == 0 || !std::isfinite(ng)) throw std::runtime_error("power iteration did not converge");
        G /= ng;
    }
    throw std::runtime_error("power iteration did not converge");
}

double operator_norm(const ProductKernelOperator& T) {
    if (T.factors) {
        return matrix_opnorm((*T.factors)[0]) * std::sqrt(T.out_h1 / T.in1.h) * matrix_opnorm((*T.factors)[1]) *
               std::sqrt(T.out_h2 / T.in2.h);
    }
    const int n1 = T.in1.n, n2 = T.in2.n;
    Eigen::MatrixXd A(T.out_n1() * T.out_n2(), n1 * n2);
    for (int j = 0; j < n2; ++j)
        for (int i = 0; i < n1; ++i) {
            Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n1, n2);
            e(i, j) = 1;
            A.col(j * n1 + i) = T.apply(e).reshaped();
        }
    return matrix_opnorm(A) * std::sqrt(T.out_h1 * T.out_h2 / (T.in1.h * T.in2.h));
}

double kernel_slice_opnorm(const ProductKernelOperator& T, int x1, int y1) {
    const double w = std::sqrt(T.out_h2 / T.in2.h);
    if (T.factors) {
        return std::abs((*T.factors)[0](x1, y1)) / T.in1.h * matrix_opnorm((*T.factors)[1]) * w;
    }
    Eigen::MatrixXd S(T.out_n2(), T.in2.n);
    for (int y2 = 0; y2 < T.in2.n; ++y2) S.col(y2) = T.kernel_column(y1, y2).row(x1).transpose();
    return matrix_opnorm(T.in2.h * S) * w;
}

PowerFit fit_power_law(const std::vector<double>& x, const std::vector<double>& v) {
    if (x.size() != v.size()) throw std::invalid_argument("fit inputs differ in length");
    std::vector<double> lx, lv;
    for (size_t i = 0; i < x.size(); ++i) {
        if (x[i] > 0 && v[i] > 0 && std::isfinite(v[i])) {
            lx.push_back(std::log(x[i]));
            lv.push_back(std::log(v[i]));
        }
    }
    PowerFit fit;
    fit.points = static_cast<int>(lx.size());
    if (fit.points == 0) {
        fit.delta = std::numeric_limits<double>::infinity();
        return fit;
    }
    if (fit.points == 1) {
        fit.C = std::exp(lv[0]);
        return fit;
    }
    const double n = static_cast<double>(lx.size());
    double mx = 0, mv = 0;
    for (size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        mv += lv[i];
    }
    mx /= n;
    mv /= n;
    double sxx = 0, sxv = 0, svv = 0;
    for (size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxv += (lx[i] - mx) * (lv[i] - mv);
        svv += (lv[i] - mv) * (lv[i] - mv);
    }
    if (sxx == 0) {
        fit.C = std::exp(mv);
        return fit;
    }
    const double slope = sxv / sxx;
    fit.delta = -slope;
    fit.C = std::exp(mv - slope * mx);
    const double r2 = svv > 0 ? sxv * sxv / (sxx * svv) : 1.0;
    fit.residual = std::sqrt(std::max(0.0, 1.0 - r2));
    return fit;
}

void ConditionReport::write_csv(std::ostream& os, bool header) const {
    if (header) os << "condition,t1,t2,gamma1,gamma2,integral,fit_C,fit_delta,residual\n";
    const auto old = os.precision();
    os << std::setprecision(12);
    // rows are grouped by t in the order of the fits
    size_t fi = 0;
    for (size_t r = 0; r < rows.size(); ++r) {
        if (r > 0 && (rows[r].t1 != rows[r - 1].t1 || rows[r].t2 != rows[r - 1].t2)) ++fi;
        const ConditionRow& row = rows[r];
        const PowerFit& f = fits.at(fi);
        os << condition << ',' << row.t1 << ',' << row.t2 << ',' << row.gamma1 << ',' << row.gamma2 << ',';
        if (row.empty)
            os << "nan";
        else
            os << row.integral;
        os << ',' << f.C << ',' << f.delta << ',' << f.residual << '\n';
    }
    os.precision(old);
}

std::vector<int> default_samples(const Axis& a, int count) {
    std::vector<int> s;
    for (int k = 0; k < count; ++k) {
        int i = static_cast<int>(std::floor((2.0 * k + 1.0) * a.n / (2.0 * count)));
        i = std::clamp(i, 0, a.n - 1);
        if (s.empty() || s.back() != i) s.push_back(i);
    }
    return s;
}

namespace {

void summarize(ConditionReport& rep) {
    rep.fit_C = 0;
    rep.fit_delta = std::numeric_limits<double>::infinity();
    rep.residual = 0;
    for (const PowerFit& f : rep.fits) {
        rep.fit_C = std::max(rep.fit_C, f.C);
        rep.fit_delta = std::min(rep.fit_delta, f.delta);
        rep.residual = std::max(rep.residual, f.residual);
    }
    rep.uniform_C = 0;
    rep.envelope.assign(rep.fits.size(), 0.0);
    if (!std::isfinite(rep.fit_delta)) return;
    size_t fi = 0;
    for (size_t r = 0; r < rep.rows.size(); ++r) {
        const ConditionRow& row = rep.rows[r];
        if (r > 0 && (row.t1 != rep.rows[r - 1].t1 || row.t2 != rep.rows[r - 1].t2)) ++fi;
        if (row.empty) continue;
        const double g = (row.gamma1 > 0 ? row.gamma1 : 1.0) * (row.gamma2 > 0 ? row.gamma2 : 1.0);
        rep.envelope[fi] = std::max(rep.envelope[fi], row.integral * std::pow(g, rep.fit_delta));
    }
    for (double e : rep.envelope) rep.uniform_C = std::max(rep.uniform_C, e);
}

// Shared driver for the one-parameter conditions.  `which` is the axis carrying the tail;
// the other axis enters only through the operator norm of the slice.
ConditionReport one_axis_check(const ProductKernelOperator& T, const ProductOperatorPair& pair, int which,
                               const std::vector<double>& t_list, const std::vector<double>& gammas,
                               std::vector<int> y_samples) {
    const Axis& in = which == 1 ? T.in1 : T.in2;
    const Axis& other_in = which == 1 ? T.in2 : T.in1;
    const std::vector<double>& out_x = which == 1 ? T.out_x1 : T.out_x2;
    const double out_h = which == 1 ? T.out_h1 : T.out_h2;
    const double other_out_h = which == 1 ? T.out_h2 : T.out_h1;
    if (y_samples.empty()) y_samples = default_samples(in);
    for (int y : y_samples)
        if (y < 0 || y >= in.n) throw std::out_of_range("sample index outside the grid");

    ConditionReport rep;
    rep.condition = which == 1 ? "condition1" : "condition2";

    for (double t : t_list) {
        if (!(t > 0)) throw std::invalid_argument("scale must be positive");
        const double s1 = which == 1 ? t * t : 0.0, s2 = which == 2 ? t * t : 0.0;
        ProductKernelOperator Tt = compose_heat(T, pair, s1, s2);

        // norms[y][x] = ||K~(x, y)|| on the other axis
        std::vector<std::vector<double>> norms(y_samples.size(), std::vector<double>(out_x.size()));
        if (T.factors) {
            const int k = which == 1 ? 0 : 1;
            Eigen::MatrixXd diff = (*T.factors)[k] - (*Tt.factors)[k];
            const double other = matrix_opnorm((*T.factors)[1 - k]) * std::sqrt(other_out_h / other_in.h);
            for (size_t s = 0; s < y_samples.size(); ++s)
                for (size_t x = 0; x < out_x.size(); ++x)
                    norms[s][x] = std::abs(diff(static_cast<Eigen::Index>(x), y_samples[s])) / in.h * other;
        } else {
            for (size_t s = 0; s < y_samples.size(); ++s) {
                const int y = y_samples[s];
                std::vector<Eigen::MatrixXd> cols(other_in.n);
                for (int yo = 0; yo < other_in.n; ++yo) {
                    const int y1 = which == 1 ? y : yo, y2 = which == 1 ? yo : y;
                    cols[yo] = T.kernel_column(y1, y2) - Tt.kernel_column(y1, y2);
                }
                for (size_t x = 0; x < out_x.size(); ++x) {
                    const Eigen::Index other_out = which == 1 ? T.out_n2() : T.out_n1();
                    Eigen::MatrixXd S(other_out, other_in.n);
                    for (int yo = 0; yo < other_in.n; ++yo) {
                        if (which == 1)
                            S.col(yo) = cols[yo].row(static_cast<Eigen::Index>(x)).transpose();
                        else
                            S.col(yo) = cols[yo].col(static_cast<Eigen::Index>(x));
                    }
                    norms[s][x] = matrix_opnorm(other_in.h * S) * std::sqrt(other_out_h / other_in.h);
                }
            }
        }

        std::vector<double> gx, gv;
        for (double g : gammas) {
            ConditionRow row;
            row.t1 = which == 1 ? t : 0.0;
            row.t2 = which == 2 ? t : 0.0;
            row.gamma1 = which == 1 ? g : 0.0;
            row.gamma2 = which == 2 ? g : 0.0;
            bool any = false;
            double best = 0;
            for (size_t s = 0; s < y_samples.size(); ++s) {
                const double y = in.center(y_samples[s]);
                double acc = 0;
                for (size_t x = 0; x < out_x.size(); ++x) {
                    const double w = beyond(out_x[x], y, out_h, g * t, in);
                    if (w > 0) {
                        any = true;
                        acc += w * norms[s][x] * out_h;
                    }
                }
                best = std::max(best, acc);
            }
            row.empty = !any;
            row.integral = any ? best : 0.0;
            if (any) {
                gx.push_back(g);
                gv.push_back(best);
            }
            rep.rows.push_back(row);
        }
        rep.fits.push_back(fit_power_law(gx, gv));
    }
    summarize(rep);
    return rep;
}

}  // namespace

ConditionReport condition1_check(const ProductKernelOperator& T, const ProductOperatorPair& pair,
                                 const std::vector<double>& t1_list, const std::vector<double>& gammas,
                                 std::vector<int> y1_samples) {
    return one_axis_check(T, pair, 1, t1_list, gammas, std::move(y1_samples));
}

ConditionReport condition2_check(const ProductKernelOperator& T, const ProductOperatorPair& pair,
                                 const std::vector<double>& t2_list, const std::vector<double>& gammas,
                                 std::vector<int> y2_samples) {
    return one_axis_check(T, pair, 2, t2_list, gammas, std::move(y2_samples));
}

ConditionReport condition3_check(const ProductKernelOperator& T, const ProductOperatorPair& pair,
                                 const std::vector<std::pair<double, double>>& t_pairs,
                                 const std::vector<std::pair<double, double>>& gamma_pairs,
                                 std::vector<std::pair<int, int>> y_samples) {
    if (y_samples.empty()) {
        for (int a : default_samples(T.in1, 4))
            for (int b : default_samples(T.in2, 4)) y_samples.emplace_back(a, b);
    }
    for (auto [y1, y2] : y_samples)
        if (y1 < 0 || y1 >= T.in1.n || y2 < 0 || y2 >= T.in2.n)
            throw std::out_of_range("sample index outside the grid");
    ConditionReport rep;
    rep.condition = "condition3";
    for (auto [t1, t2] : t_pairs) {
        if (!(t1 > 0) || !(t2 > 0)) throw std::invalid_argument("scale must be positive");
        const double s1 = t1 * t1, s2 = t2 * t2;
        // K - K_(t1,0) - K_(0,t2) + K_(t1,t2)
        std::function<Eigen::MatrixXd(int, int)> diff_column;
        ProductKernelOperator A = compose_heat(T, pair, s1, 0), B = compose_heat(T, pair, 0, s2),
                              C = compose_heat(T, pair, s1, s2);
        if (T.factors) {
            Eigen::MatrixXd D1 = (*T.factors)[0] - (*A.factors)[0];
            Eigen::MatrixXd D2 = (*T.factors)[1] - (*B.factors)[1];
            const double scale = 1.0 / (T.in1.h * T.in2.h);
            diff_column = [D1, D2, scale](int y1, int y2) -> Eigen::MatrixXd {
                return D1.col(y1) * D2.col(y2).transpose() * scale;
            };
        } else {
            diff_column = [&](int y1, int y2) -> Eigen::MatrixXd {
                return T.kernel_column(y1, y2) - A.kernel_column(y1, y2) - B.kernel_column(y1, y2) +
                       C.kernel_column(y1, y2);
            };
        }
        std::vector<Eigen::MatrixXd> cols;
        cols.reserve(y_samples.size());
        for (auto [y1, y2] : y_samples) cols.push_back(diff_column(y1, y2).cwiseAbs());

        std::vector<double> gx, gv;
        for (auto [g1, g2] : gamma_pairs) {
            ConditionRow row{t1, t2, g1, g2, 0.0, false};
            bool any = false;
            double best = 0;
            for (size_t s = 0; s < y_samples.size(); ++s) {
                const double y1 = T.in1.center(y_samples[s].first), y2 = T.in2.center(y_samples[s].second);
                double acc = 0;
                Eigen::VectorXd w1(T.out_n1());
                for (int x1 = 0; x1 < T.out_n1(); ++x1) w1(x1) = beyond(T.out_x1[x1], y1, T.out_h1, g1 * t1, T.in1);
                for (int x2 = 0; x2 < T.out_n2(); ++x2) {
                    const double w2 = beyond(T.out_x2[x2], y2, T.out_h2, g2 * t2, T.in2);
                    if (w2 == 0) continue;
                    for (int x1 = 0; x1 < T.out_n1(); ++x1) {
                        if (w1(x1) == 0) continue;
                        any = true;
                        acc += w1(x1) * w2 * cols[s](x1, x2);
                    }
                }
                best = std::max(best, acc * T.out_h1 * T.out_h2);
            }
            row.empty = !any;
            row.integral = any ? best : 0.0;
            if (any) {
                gx.push_back(g1 * g2);
                gv.push_back(best);
            }
            rep.rows.push_back(row);
        }
        rep.fits.push_back(fit_power_law(gx, gv));
    }
    summarize(rep);
    return rep;
}

Eigen::MatrixXd riesz_axis(const AxisOperator& L, bool restrict_positive) {
    const double scale = std::max(1.0, L.lambda_max());
    Eigen::VectorXd d(L.evals.size());
    for (Eigen::Index k = 0; k < d.size(); ++k) {
        const double l = L.evals(k);
        if (l <= 1e-12 * scale) {
            if (!restrict_positive) throw std::domain_error("singular operator: zero eigenvalue");
            d(k) = 0;
        } else {
            d(k) = 1.0 / std::sqrt(l);
        }
    }
    return L.grad * (L.evecs * d.asDiagonal() * L.evecs.transpose());
}

Eigen::MatrixXd riesz_quadrature(const AxisOperator& L, int points) {
    if (points < 2) throw std::invalid_argument("too few quadrature points");
    const double scale = std::max(1.0, L.lambda_max());
    double lmin = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < L.evals.size(); ++k)
        if (L.evals(k) > 1e-12 * scale) lmin = std::min(lmin, L.evals(k));
    if (!std::isfinite(lmin)) throw std::domain_error("singular operator: zero eigenvalue");
    const double smin = 1e-10 / L.lambda_max(), smax = 60.0 / lmin;
    const double u0 = std::log(smin), u1 = std::log(smax), du = (u1 - u0) / (points - 1);
    // sum_s w_s e^{-s l} s^{1/2}, trapezoid in u = log s
    Eigen::VectorXd d = Eigen::VectorXd::Zero(L.evals.size());
    for (int i = 0; i < points; ++i) {
        const double s = std::exp(u0 + i * du);
        const double w = (i == 0 || i == points - 1 ? 0.5 : 1.0) * du * std::sqrt(s);
        for (Eigen::Index k = 0; k < d.size(); ++k)
            if (L.evals(k) > 1e-12 * scale) d(k) += w * std::exp(-s * L.evals(k));
    }
    d /= std::sqrt(M_PI);
    return L.grad * (L.evecs * d.asDiagonal() * L.evecs.transpose());
}

ProductKernelOperator double_riesz(const ProductOperatorPair& pair, bool restrict_positive) {
    return separable_operator("double-riesz", pair.L1.axis, pair.L2.axis, riesz_axis(pair.L1, restrict_positive),
                              riesz_axis(pair.L2, restrict_positive), edge_positions(pair.L1), pair.L1.axis.h,
                              edge_positions(pair.L2), pair.L2.axis.h);
}

TailReport riesz_tail(const AxisOperator& L, double t, const std::vector<double>& gammas,
                      std::vector<int> y_samples) {
    if (!(t > 0)) throw std::invalid_argument("scale must be positive");
    const Axis& a = L.axis;
    if (y_samples.empty()) y_samples = default_samples(a);
    for (int y : y_samples)
        if (y < 0 || y >= a.n) throw std::out_of_range("sample index outside the grid");
    Eigen::MatrixXd R = riesz_axis(L);
    Eigen::MatrixXd K = (R - R * heat_matrix(L, t * t)) / a.h;
    std::vector<double> ex = edge_positions(L);
    TailReport rep;
    rep.gammas = gammas;
    std::vector<double> gx, gv;
    for (double g : gammas) {
        double best = 0;
        bool any = false;
        for (int y : y_samples) {
            double acc = 0;
            for (size_t e = 0; e < ex.size(); ++e) {
                const double w = beyond(ex[e], a.center(y), a.h, g * t, a);
                if (w > 0) {
                    any = true;
                    acc += w * std::abs(K(static_cast<Eigen::Index>(e), y)) * a.h;
                }
            }
            best = std::max(best, acc);
        }
        rep.integrals.push_back(any ? best : std::numeric_limits<double>::quiet_NaN());
        if (any) {
            gx.push_back(g);
            gv.push_back(best);
        }
    }
    rep.fit = fit_power_law(gx, gv);
    return rep;
}

double atom_image_l1(const ProductKernelOperator& T, const HardyAtom& a) {
    GridFunction f = a.a();
    return T.apply(f.v).cwiseAbs().sum() * T.out_h1 * T.out_h2;
}

}  // namespace hardy
