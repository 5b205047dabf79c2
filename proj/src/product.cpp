#include "hardy/product.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace hardy {

namespace {

bool same_axis(const Axis& a, const Axis& b) {
    return a.n == b.n && a.h == b.h && a.origin == b.origin && a.bc == b.bc;
}

}  // namespace

void ProductOperatorPair::check(const GridFunction& f) const {
    if (!same_axis(f.ax1, L1.axis) || !same_axis(f.ax2, L2.axis))
        throw std::invalid_argument("grid function axes do not match the operator pair");
}

Eigen::MatrixXd ProductOperatorPair::to_spectral(const GridFunction& f) const {
    check(f);
    return L1.evecs.transpose() * f.v * L2.evecs;
}

GridFunction ProductOperatorPair::from_spectral(const Eigen::MatrixXd& c) const {
    return GridFunction(L1.axis, L2.axis, L1.evecs * c * L2.evecs.transpose());
}

ProductOperatorPair free_pair(const Axis& a1, const Axis& a2) { return {build_laplacian(a1), build_laplacian(a2)}; }

GridFunction apply_axis(const Symbol1& F, int which, const GridFunction& f, const ProductOperatorPair& pair) {
    pair.check(f);
    if (which != 1 && which != 2) throw std::invalid_argument("axis index must be 1 or 2");
    Eigen::MatrixXd M = pair.axis(which).function_matrix(F);
    GridFunction out = f;
    if (which == 1)
        out.v = M * f.v;
    else
        out.v = f.v * M;  // M is symmetric
    return out;
}

GridFunction product_heat(const GridFunction& f, const ProductOperatorPair& pair, double t1, double t2) {
    if (t1 < 0 || t2 < 0) throw std::invalid_argument("negative time");
    return joint_spectral_apply([t1, t2](double l, double m) { return std::exp(-t1 * l - t2 * m); }, f, pair);
}

GridFunction q_operator(const GridFunction& f, const ProductOperatorPair& pair, double t1, double t2) {
    if (!(t1 > 0 && t2 > 0)) throw std::invalid_argument("scales must be positive");
    auto q = [](double t, double l) { return t * t * l * std::exp(-t * t * l); };
    return joint_spectral_apply([&](double l, double m) { return q(t1, l) * q(t2, m); }, f, pair);
}

SymbolTable::SymbolTable(const Symbol2& F, const ProductOperatorPair& pair) : pair_(&pair) {
    const auto& l = pair.L1.evals;
    const auto& m = pair.L2.evals;
    table_.resize(l.size(), m.size());
    for (Eigen::Index j = 0; j < l.size(); ++j)
        for (Eigen::Index k = 0; k < m.size(); ++k) {
            double v = F(l(j), m(k));
            if (!std::isfinite(v)) {
                std::ostringstream os;
                os << "symbol not finite at spectral pair (" << std::setprecision(17) << l(j) << ", " << m(k)
                   << ")";
                throw std::domain_error(os.str());
            }
            table_(j, k) = v;
        }
}

GridFunction SymbolTable::apply(const GridFunction& f) const {
    Eigen::MatrixXd c = pair_->to_spectral(f);
    return pair_->from_spectral(c.cwiseProduct(table_));
}

GridFunction joint_spectral_apply(const Symbol2& F, const GridFunction& f, const ProductOperatorPair& pair) {
    pair.check(f);
    return SymbolTable(F, pair).apply(f);
}

}  // namespace hardy
