#pragma once

#include "hardy/atomic.hpp"
#include "hardy/product.hpp"
#include "hardy/singular.hpp"

#include <limits>
#include <string>
#include <vector>

namespace hardy {

struct MultiplierSymbol {
    std::string name;
    std::string smoothness;  // "marcinkiewicz" for the derivative class, "none" otherwise
    Symbol2 F;

    double operator()(double l1, double l2) const { return F(l1, l2); }
};

// one, heat, ratio, riesz-like, sin-divergent
std::vector<std::string> builtin_symbol_names();
MultiplierSymbol builtin_symbol(const std::string& name);

// omega(2^u) = step(u + 2) - step(u + 1): support (1/4, 1), dyadic partition of unity.
class DyadicWindow {
public:
    static double step(double u);  // smooth, 0 for u <= 0, 1 for u >= 1
    double omega(double lambda) const;
    // sum_{l <= 0} omega(2^{-l} lambda): 1 on [0, 1/2], 0 from 1 on
    double cutoff(double lambda) const;
    // max |sum_{|l| <= L} omega(2^{-l} lambda) - 1| on a log grid inside [2^{-L+1}, 2^{L-1}]
    double partition_residual(int L, int samples = 2001) const;
};

struct SobolevParams {
    double s1 = 1.25, s2 = 1.25;
    int samples = 256;  // per axis, before padding
    int padding = 4;
    double tail_tol = 0.01;
};

// ||(1 + |xi1|^2)^{s1/2} (1 + |xi2|^2)^{s2/2} G^||_{L^2} with the continuum Fourier normalization,
// for G sampled on a uniform grid (values(i1, i2), spacings dx1, dx2) and zero-padded.
double sobolev_norm(const Eigen::MatrixXd& G, double dx1, double dx2, const SobolevParams& p);

// Windowed, dilated symbol sampled for the Sobolev norm. which = 1: omega(l1) F(t1 l1, l2);
// 2: F(l1, t2 l2) omega(l2); 3: omega(l1) omega(l2) F(t1 l1, t2 l2). A windowed variable is sampled
// on [0, 2]; an unwindowed one on [-2, 2], extended to negative arguments by a C^2 reflection and
// multiplied by cutoff(|l|/2).
Eigen::MatrixXd windowed_samples(const MultiplierSymbol& F, const DyadicWindow& w, int which, double t1, double t2,
                                 int samples, double* dx1, double* dx2);
double windowed_norm(const MultiplierSymbol& F, const DyadicWindow& w, const SobolevParams& p, int which, double t1,
                     double t2);

// t = 2^{l/2} from the first value >= lo, at most max_count values, none above hi.
std::vector<double> dyadic_t_grid(double lo, double hi, int max_count = 40);

struct MarcinkiewiczReport {
    std::vector<double> t1, t2;
    std::vector<double> norm1, norm2;  // per t of the single-window terms
    Eigen::MatrixXd norm12;            // (t1, t2) of the mixed term
    double sup1 = 0, sup2 = 0, sup12 = 0, total = 0;
    int arg1 = -1, arg2 = -1, arg12_1 = -1, arg12_2 = -1;
    double growth1 = 0, growth2 = 0;  // log-log slope of norm1/norm2 over the upper half of the t grid
    bool interior() const;            // every supremum attained strictly inside its grid
};

MarcinkiewiczReport marcinkiewicz_constant(const MultiplierSymbol& F, const DyadicWindow& w, const SobolevParams& p,
                                           const std::vector<double>& t1, const std::vector<double>& t2);
// t grids covering [lambda_min, 4 lambda_max] of each axis.
MarcinkiewiczReport marcinkiewicz_constant(const MultiplierSymbol& F, const DyadicWindow& w, const SobolevParams& p,
                                           const ProductOperatorPair& pair);

struct MultiplierAtomReport {
    double F00 = 0;
    double max_l1 = 0;           // max ||F(L1,L2) a||_1
    double max_l1_reduced = 0;   // max ||(F - F(0,0))(L1,L2) a||_1
    double max_l1_constant = 0;  // max |F(0,0)| ||a||_1
    double ratio = std::numeric_limits<double>::quiet_NaN();  // max_l1 / C_{F,phi,s}
    double opnorm = 0;           // ||F(L1,L2)||_{2->2} by power iteration
    double sup_F = 0;            // max |F| over spectral pairs
    std::vector<double> per_atom;
};

MultiplierAtomReport multiplier_atom_harness(const MultiplierSymbol& F, const std::vector<HardyAtom>& atoms,
                                             const ProductOperatorPair& pair,
                                             double C_F = std::numeric_limits<double>::quiet_NaN());

// Largest |eigenvalue| of a symmetric operator on grid values by power iteration.
double symmetric_power_norm(const std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>& apply, int n1, int n2,
                            double tol = 1e-10, int max_iter = 2000);

enum class Prop53Case { first = 1, second = 2, both = 3 };

struct Prop53Options {
    Prop53Case which = Prop53Case::first;
    double R1 = 0, R2 = 0;  // support radii: F is cut to [0, R1^2] and/or [0, R2^2]
    double s1 = 1.25, s2 = 1.25;
    std::vector<double> gammas{2, 4, 8, 16};
    std::vector<int> y1_samples, y2_samples;  // default: 8 per axis
};

struct Prop53Row {
    double t1 = 0, t2 = 0, gamma1 = 0, gamma2 = 0;
    double integral = 0;   // weighted integral of the squared slice norm (or squared kernel)
    double amplitude = 0;  // sqrt(integral)
    bool empty = false;
};

struct Prop53Report {
    Prop53Case which = Prop53Case::first;
    std::vector<Prop53Row> rows;
    std::vector<PowerFit> fits;  // integral against gamma (gamma1 gamma2 in the mixed case), per t
    double fit_C = 0, fit_eta = 0;
};

// Weighted off-diagonal integrals for F(L1,L2)(I - e^{-t1^2 L1}) and its mirrors, after cutting F to the
// support pattern of the chosen case. t_list holds (t1, t2); the unused entry is ignored.
Prop53Report prop53_offdiag_check(const MultiplierSymbol& F, const ProductOperatorPair& pair, const DyadicWindow& w,
                                  const std::vector<std::pair<double, double>>& t_list, const Prop53Options& opt);

}  // namespace hardy
