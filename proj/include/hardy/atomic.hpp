#pragma once

#include "hardy/sampling.hpp"
#include "hardy/square.hpp"

#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace hardy {

// One nonzero cell of a sparse tent function.
struct TentCell {
    size_t index;  // TentGrid::index layout
    double value;
    int piece;     // position in TentAtom::rects
};

struct TentAtom {
    OpenSet omega;
    std::vector<DyadicRectangle> rects;  // m(omega), lexicographic
    TentGrid grid;
    std::vector<TentCell> cells;
    int fallback_cells = 0;  // cells placed in T(5R) because no T(3R) fits

    double l2() const;                     // L^2(dy dt/(t1 t2))
    std::vector<double> piece_l2() const;  // same, per rectangle
    TentFunction dense() const;
};

struct TentTerm {
    double lambda = 0;
    int level = 0;  // j with Omega_j = {AF > 2^j}
    TentAtom atom;
};

// Stopping-time decomposition F = sum lambda_j A_j; terms are handed out one at a time.
void tent_decompose_each(const TentFunction& F, const std::function<void(TentTerm&&)>& sink);
std::vector<TentTerm> tent_decompose(const TentFunction& F);

// Axis tables of Phi(t sqrt(lambda)) on a scale grid.
struct WindowTable {
    Eigen::MatrixXd phi;  // (scale, eigen index)
    Eigen::VectorXd t, lambda;
    double weight = 0;

    WindowTable() = default;
    WindowTable(const AxisOperator& L, const ScaleGrid& g, const SpectralWindow& w);
    // psi_M(t sqrt lambda) = (t^2 lambda)^M Phi(t sqrt lambda)
    double psi(int a, int j, int M) const { return std::pow(t(a) * t(a) * lambda(j), M) * phi(a, j); }
    // t^{2M} Phi(t sqrt lambda), the factor producing b_R
    double b_factor(int a, int j, int M) const { return std::pow(t(a), 2 * M) * phi(a, j); }
};

struct PiContext {
    const ProductOperatorPair* pair = nullptr;
    TentGrid grid;
    int M = 1;
    WindowTable w1, w2;

    PiContext(const ProductOperatorPair& p, const TentGrid& g, int M, const SpectralWindow& w = SpectralWindow());
};

// pi_{L1,L2,M}(A) = sum_t psi(t1 sqrt L1) psi(t2 sqrt L2) A(., t) dt1/t1 dt2/t2
GridFunction pi_operator(const TentFunction& A, const PiContext& ctx);

struct PiBound {
    double C_pi = 0;   // ||pi(A)||_2 <= C_pi ||A||_{L^2(dydt/t1t2)}
    double C_iii = 0;  // bound on the weighted sum of condition (iii) per unit piece mass
    double C_M = 0;    // max of the two
};
PiBound pi_bound(const PiContext& ctx);

// psi(t1 sqrt L1) psi(t2 sqrt L2) g as a tent function: the L^2(dy dt/(t1 t2)) adjoint of pi.
TentFunction pi_adjoint(const GridFunction& g, const PiContext& ctx);

// Largest ||pi(A)||_2 / ||A||_{T^{2,2}} seen over random starts refined by power iteration.
double measure_pi_constant(const PiContext& ctx, Rng& rng, int samples = 50, int iterations = 4);

struct AtomOptions {
    double dilate = 10.0;  // support dilate of each R
    int buffer = 8;        // extra cells per side for discrete leakage
};

struct HardyPiece {
    DyadicRectangle rect;
    Eigen::MatrixXd b_hat;  // eigen-coefficients of b_R
    CellBox region;         // allowed support
};

struct HardyAtom {
    OpenSet omega;
    int M = 1;
    const ProductOperatorPair* pair = nullptr;
    std::vector<HardyPiece> pieces;

    Eigen::MatrixXd a_hat() const;
    GridFunction a() const;
    GridFunction a_piece(size_t i) const;
    // (L1^{k1} (x) L2^{k2}) b_R
    GridFunction b_power(size_t i, int k1, int k2) const;
    double measure() const { return omega.measure(); }
};

// C^{-1} pi(A) split over the rectangles of A.
HardyAtom lift_tent_atom(const TentAtom& A, const PiContext& ctx, double C, const AtomOptions& opt = {});

// Lifted atoms of smooth random tent functions, in decomposition order, until `count` non-zero atoms.
std::vector<HardyAtom> random_hardy_atoms(const PiContext& ctx, double C, size_t count, Rng& rng,
                                          const AtomOptions& opt = {});

struct ConditionEntry {
    std::string name;
    double measured = 0, bound = 0;
    double slack = std::numeric_limits<double>::infinity();  // (bound - measured)/bound
    bool pass = true;
};

struct AtomValidation {
    std::vector<ConditionEntry> entries;
    bool pass() const;
    double min_slack() const;
    // Smallest rho with a/rho still meeting the size and weighted-sum bounds; a/rho is a saturated atom.
    double saturation() const;
};

AtomValidation hardy_atom_validate(const HardyAtom& a, double tol);

// a / saturation: still an atom, with the tightest scaling bound met with equality.
HardyAtom saturate(const HardyAtom& a, double tol = 1e-6);

struct AtomicTerm {
    double coefficient = 0;
    HardyAtom atom;
    double tent_lambda = 0;
};

struct AtomicRepresentation {
    std::vector<AtomicTerm> terms;
    GridFunction residual;
    double coefficient_l1 = 0;
    double c_psi = 0, C_M = 0;
    double calibration_error = 0;  // max |c_psi m(lambda) - 1| over the spectrum, per axis
    GridFunction reconstruction() const;
};

struct DecomposeOptions {
    int per_octave = 8;
    double t_min_cells = 1.0 / 32;  // scale grid [h t_min_cells, t_max_lengths L]
    double t_max_lengths = 2.0;
    double calibration_tol = 1e-3;
    bool keep_atoms = true;
    AtomOptions atom;
};

TentGrid decomposition_grid(const Axis& a1, const Axis& a2, const DecomposeOptions& opt);

// Per-axis Calderon sum m(lambda) = sum_t w psi_M(t sqrt lambda) (t^2 lambda) exp(-t^2 lambda).
Eigen::VectorXd calderon_sum(const WindowTable& w, int M);

AtomicRepresentation hardy_decompose(const GridFunction& f, int M, const ProductOperatorPair& pair,
                                     const DecomposeOptions& opt = {});

}  // namespace hardy
