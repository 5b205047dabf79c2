#pragma once

#include "hardy/grid.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace hardy {

using Symbol1 = std::function<double(double)>;

struct AxisOperator {
    Axis axis;
    Eigen::MatrixXd matrix;     // L in the cell basis
    Eigen::MatrixXd grad;       // D, with L = D^T D + diag(V)
    Eigen::VectorXd potential;  // V per cell
    Eigen::VectorXd evals;      // non-decreasing, clamped at 0
    Eigen::MatrixXd evecs;      // orthonormal columns

    int n() const { return axis.n; }
    double lambda_min() const { return evals(0); }
    double lambda_max() const { return evals(evals.size() - 1); }

    // U F(Lambda) U^T as a matrix acting on cell vectors.
    Eigen::MatrixXd function_matrix(const Symbol1& F) const;
    Eigen::VectorXd symbol_values(const Symbol1& F) const;

    void save(std::ostream& os) const;
    static AxisOperator load(std::istream& is);
};

// Forward-difference gradient for the axis boundary condition, scaled by 1/h.
Eigen::MatrixXd gradient_matrix(const Axis& axis);

AxisOperator build_laplacian(const Axis& axis);
AxisOperator build_schrodinger(const Axis& axis, const Eigen::VectorXd& V);

Eigen::VectorXd spectral_apply(const Symbol1& F, const AxisOperator& L, const Eigen::VectorXd& g);

// Kernels carry the 1/h density factor.
Eigen::MatrixXd heat_kernel(const AxisOperator& L, double t);
Eigen::MatrixXd heat_derivative_kernel(const AxisOperator& L, double t, int k);
Eigen::MatrixXd wave_kernel(const AxisOperator& L, double t);

class SpectralWindow {
public:
    SpectralWindow();

    double phi(double xi) const;  // even bump on (-1,1), integral 2*pi
    // m-th derivative of Phi(s) = int phi(xi) cos(s xi) dxi.
    double Phi(double s, int m = 0) const;
    double psi(double s, int M) const { return std::pow(s, 2 * M) * Phi(s); }
    double normalization() const { return c_; }

private:
    struct Rule {
        int panels;
        std::vector<double> nodes, weights;  // composite Gauss rule on [0,1], weights include phi
    };
    double c_ = 1.0;
    std::vector<Rule> rules_;  // increasing panel counts for increasing frequency
};

struct GaussianFitOptions {
    int derivative = 0;        // k: fit |d^k p_t| <= C t^{-1/2-k} exp(-d^2/(c t))
    int boundary_cells = 4;    // excluded near a Dirichlet boundary
    double t_min = -1, t_max = -1;  // defaults h^2 and (length/4)^2
    int t_per_octave = 4;
    double c_min = 0.5, c_max = 64.0;
    int c_count = 97;
    double C_max = 4.0;
    double rel_tol = 1e-10;    // samples with |p| t^{1/2+k} below this are insignificant
    double knee_slack = 0.05;
};

struct HeatKernelFit {
    double C = 0, c = 0;
    double max_violation = 0;
    std::vector<std::pair<double, double>> sweep;  // (c, C(c))
    double worst_t = 0, worst_x = 0, worst_y = 0;
    long samples = 0;
    double C_at(double c) const;  // C(c) from the sweep, exact grid points only
};

HeatKernelFit fit_gaussian_bound(const AxisOperator& L, const GaussianFitOptions& opt = {});

struct LeakageReport {
    double leakage = 0;   // max |K| beyond t + buffer
    double on_cone = 0;   // max |K| within distance t
    double relative() const { return on_cone > 0 ? leakage / on_cone : 0.0; }
};

// Kernel of (t^2 L)^kappa Phi(t sqrt L).
Eigen::MatrixXd window_kernel(const AxisOperator& L, const SpectralWindow& w, double t, int kappa = 0);
LeakageReport propagation_leakage(const AxisOperator& L, const SpectralWindow& w, double t, double buffer,
                                  int kappa = 0);

}  // namespace hardy
