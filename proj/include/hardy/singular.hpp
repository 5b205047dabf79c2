#pragma once

#include "hardy/atomic.hpp"
#include "hardy/product.hpp"

#include <array>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hardy {

// Linear map on value arrays of the input grid. Outputs may live on a different
// (e.g. edge) grid described by sample positions and spacings.
struct ProductKernelOperator {
    std::string name;
    Axis in1, in2;
    std::vector<double> out_x1, out_x2;
    double out_h1 = 1, out_h2 = 1;
    std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)> action;
    std::optional<std::array<Eigen::MatrixXd, 2>> factors;  // T = A1 (x) A2

    Eigen::MatrixXd apply(const Eigen::MatrixXd& f) const;
    int out_n1() const { return static_cast<int>(out_x1.size()); }
    int out_n2() const { return static_cast<int>(out_x2.size()); }
    // K(., y1, ., y2), density with respect to dy
    Eigen::MatrixXd kernel_column(int y1, int y2) const;
    bool has_kernel() const { return factors.has_value(); }
    double kernel(int x1, int y1, int x2, int y2) const;
};

std::vector<double> cell_positions(const Axis& a);

ProductKernelOperator separable_operator(std::string name, const Axis& in1, const Axis& in2, Eigen::MatrixXd A1,
                                         Eigen::MatrixXd A2, std::vector<double> out_x1, double out_h1,
                                         std::vector<double> out_x2, double out_h2);
ProductKernelOperator identity_operator(const Axis& a1, const Axis& a2);
ProductKernelOperator zero_operator(const Axis& a1, const Axis& a2);
ProductKernelOperator heat_operator(const ProductOperatorPair& pair, double s1, double s2);
// T o (e^{-s1 L1} (x) e^{-s2 L2}); s = 0 means identity on that axis
ProductKernelOperator compose_heat(const ProductKernelOperator& T, const ProductOperatorPair& pair, double s1,
                                   double s2);

// Top singular value by power iteration on A^T A; throws if the estimate has not settled.
double matrix_opnorm(const Eigen::MatrixXd& A, double tol = 1e-6, int max_iter = 500);
// ||T||_{L^2 -> L^2} with the grid weights.
double operator_norm(const ProductKernelOperator& T);

// ||K~(1)(x1,y1)|| as an operator on the second axis.
double kernel_slice_opnorm(const ProductKernelOperator& T, int x1, int y1);

struct PowerFit {
    double C = 0, delta = 0;
    double residual = 0;  // sqrt(1 - R^2) of the log-log regression
    int points = 0;
};
// Least squares fit of log v = log C - delta log x over positive values.
PowerFit fit_power_law(const std::vector<double>& x, const std::vector<double>& v);

struct ConditionRow {
    double t1 = 0, t2 = 0, gamma1 = 0, gamma2 = 0;
    double integral = 0;
    bool empty = false;  // integration region outside the grid
};

struct ConditionReport {
    std::string condition;
    std::vector<ConditionRow> rows;
    std::vector<PowerFit> fits;  // one per t (or t pair), same order as the t list
    double fit_C = 0, fit_delta = 0, residual = 0;  // worst case over the t list
    // Smallest C with integral <= C gamma^{-fit_delta} on every row (gamma1 gamma2 for condition3).
    double uniform_C = 0;
    std::vector<double> envelope;  // the same constant per t

    void write_csv(std::ostream& os, bool header = true) const;
};

std::vector<int> default_samples(const Axis& a, int count = 8);

ConditionReport condition1_check(const ProductKernelOperator& T, const ProductOperatorPair& pair,
                                 const std::vector<double>& t1_list, const std::vector<double>& gammas,
                                 std::vector<int> y1_samples = {});
ConditionReport condition2_check(const ProductKernelOperator& T, const ProductOperatorPair& pair,
                                 const std::vector<double>& t2_list, const std::vector<double>& gammas,
                                 std::vector<int> y2_samples = {});
ConditionReport condition3_check(const ProductKernelOperator& T, const ProductOperatorPair& pair,
                                 const std::vector<std::pair<double, double>>& t_pairs,
                                 const std::vector<std::pair<double, double>>& gamma_pairs,
                                 std::vector<std::pair<int, int>> y_samples = {});

// D U Lambda^{-1/2} U^T; with restrict_positive the zero modes are dropped.
Eigen::MatrixXd riesz_axis(const AxisOperator& L, bool restrict_positive = false);
// (1/sqrt(pi)) sum_s D e^{-sL} ds/sqrt(s) on a geometric s grid.
Eigen::MatrixXd riesz_quadrature(const AxisOperator& L, int points = 200);
// Positions of the gradient samples (cell edges).
std::vector<double> edge_positions(const AxisOperator& L);

ProductKernelOperator double_riesz(const ProductOperatorPair& pair, bool restrict_positive = false);

// int_{|x-y| > gamma t} |k(x,y)| dx for the kernel of R (I - e^{-t^2 L}), maximized over y samples.
struct TailReport {
    std::vector<double> gammas, integrals;
    PowerFit fit;
};
TailReport riesz_tail(const AxisOperator& L, double t, const std::vector<double>& gammas,
                      std::vector<int> y_samples = {});

double atom_image_l1(const ProductKernelOperator& T, const HardyAtom& a);

}  // namespace hardy
