#pragma once

#include "hardy/operator.hpp"

#include <functional>

namespace hardy {

using Symbol2 = std::function<double(double, double)>;

struct ProductOperatorPair {
    AxisOperator L1, L2;

    const AxisOperator& axis(int which) const { return which == 1 ? L1 : L2; }
    void check(const GridFunction& f) const;  // throws on axis mismatch
    GridFunction zeros() const { return GridFunction(L1.axis, L2.axis); }

    // Coefficients in the joint eigenbasis: U1^T f U2, and back.
    Eigen::MatrixXd to_spectral(const GridFunction& f) const;
    GridFunction from_spectral(const Eigen::MatrixXd& c) const;
};

ProductOperatorPair free_pair(const Axis& a1, const Axis& a2);

GridFunction apply_axis(const Symbol1& F, int which, const GridFunction& f, const ProductOperatorPair& pair);
GridFunction product_heat(const GridFunction& f, const ProductOperatorPair& pair, double t1, double t2);

// psi(t1 sqrt L1) (x) psi(t2 sqrt L2) with psi(s) = s^2 exp(-s^2).
GridFunction q_operator(const GridFunction& f, const ProductOperatorPair& pair, double t1, double t2);

// Values F(lambda_j, mu_k) sampled once and reused for many inputs.
class SymbolTable {
public:
    SymbolTable(const Symbol2& F, const ProductOperatorPair& pair);
    const Eigen::MatrixXd& values() const { return table_; }
    double sup() const { return table_.cwiseAbs().maxCoeff(); }
    GridFunction apply(const GridFunction& f) const;

private:
    const ProductOperatorPair* pair_;
    Eigen::MatrixXd table_;
};

GridFunction joint_spectral_apply(const Symbol2& F, const GridFunction& f, const ProductOperatorPair& pair);

}  // namespace hardy
