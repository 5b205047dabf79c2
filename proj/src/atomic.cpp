#include "hardy/atomic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hardy {

namespace {

CellBox expand(const CellBox& b, int cells, int n1, int n2) {
    return {std::max(0, b.lo1 - cells), std::min(n1, b.hi1 + cells), std::max(0, b.lo2 - cells),
            std::min(n2, b.hi2 + cells)};
}

struct CellPos {
    size_t a, b;
    int i1, i2;
};

CellPos decode(const TentGrid& g, size_t index) {
    CellPos p;
    p.i1 = static_cast<int>(index % g.a1.n);
    index /= g.a1.n;
    p.i2 = static_cast<int>(index % g.a2.n);
    index /= g.a2.n;
    p.b = index % g.g2.size();
    p.a = index / g.g2.size();
    return p;
}

double mass_outside(const GridFunction& g, const CellBox& region) {
    double out = 0;
    for (int i2 = 0; i2 < g.v.cols(); ++i2)
        for (int i1 = 0; i1 < g.v.rows(); ++i1)
            if (i1 < region.lo1 || i1 >= region.hi1 || i2 < region.lo2 || i2 >= region.hi2) out += g.v(i1, i2) * g.v(i1, i2);
    return std::sqrt(out * g.cell_area());
}

Eigen::MatrixXd matrix_power(const Eigen::MatrixXd& A, int k) {
    Eigen::MatrixXd R = Eigen::MatrixXd::Identity(A.rows(), A.cols());
    for (int i = 0; i < k; ++i) R = R * A;
    return R;
}

ConditionEntry upper(std::string name, double measured, double bound, double tol) {
    ConditionEntry e{std::move(name), measured, bound};
    e.slack = bound > 0 ? (bound - measured) / bound : (measured == 0 ? std::numeric_limits<double>::infinity() : -1);
    e.pass = measured <= bound * (1 + tol);
    return e;
}

// Relative defect against an absolute tolerance; 0/0 counts as exact.
ConditionEntry relative(std::string name, double defect, double scale, double tol) {
    ConditionEntry e{std::move(name), 0, tol};
    if (scale == 0) {
        e.measured = 0;
        e.slack = defect == 0 ? std::numeric_limits<double>::infinity() : -1;
        e.pass = defect == 0;
        return e;
    }
    e.measured = defect / scale;
    e.slack = (tol - e.measured) / tol;
    e.pass = e.measured <= tol;
    return e;
}

}  // namespace

double TentAtom::l2() const {
    long double s = 0;
    for (const auto& c : cells) s += static_cast<long double>(c.value) * c.value;
    return std::sqrt(static_cast<double>(s) * grid.cell_measure());
}

std::vector<double> TentAtom::piece_l2() const {
    std::vector<long double> s(rects.size(), 0);
    for (const auto& c : cells) s[c.piece] += static_cast<long double>(c.value) * c.value;
    std::vector<double> out(rects.size());
    for (size_t i = 0; i < s.size(); ++i) out[i] = std::sqrt(static_cast<double>(s[i]) * grid.cell_measure());
    return out;
}

TentFunction TentAtom::dense() const {
    TentFunction F(grid);
    for (const auto& c : cells) F.values[c.index] = c.value;
    return F;
}

void tent_decompose_each(const TentFunction& F, const std::function<void(TentTerm&&)>& sink) {
    const TentGrid& g = F.grid;
    for (double v : F.values)
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite sample");
    Eigen::MatrixXd AF = tent_a_functional(F).v;
    const double top = AF.maxCoeff();
    if (top == 0) return;
    double bottom = top;
    for (Eigen::Index i = 0; i < AF.size(); ++i)
        if (AF.data()[i] > 0) bottom = std::min(bottom, AF.data()[i]);

    int jmin = static_cast<int>(std::floor(std::log2(bottom)));
    while (std::exp2(jmin) >= bottom) --jmin;
    int jmax = static_cast<int>(std::ceil(std::log2(top)));
    while (std::exp2(jmax) >= top) --jmax;

    std::vector<OpenSet> stars;
    std::vector<Prefix2D> prefix;
    for (int j = jmin; j <= jmax; ++j) {
        OpenSet level(g.a1, g.a2);
        const double thr = std::exp2(j);
        for (int i1 = 0; i1 < g.a1.n; ++i1)
            for (int i2 = 0; i2 < g.a2.n; ++i2) level.set(i1, i2, AF(i1, i2) > thr);
        stars.push_back(enlarge(level, 0.5));
        prefix.emplace_back(stars.back());
    }

    // each support cell goes to the finest level whose enlarged set holds its whole box
    std::vector<std::vector<size_t>> members(stars.size());
    for (size_t idx = 0; idx < F.values.size(); ++idx) {
        if (F.values[idx] == 0) continue;
        CellPos p = decode(g, idx);
        CellBox bx = g.box(p.a, p.b, p.i1, p.i2);
        if (!prefix[0].full(bx)) throw std::logic_error("support cell outside the coarsest tent");
        size_t lo = 0, hi = stars.size() - 1;
        while (lo < hi) {
            size_t mid = (lo + hi + 1) / 2;
            if (prefix[mid].full(bx))
                lo = mid;
            else
                hi = mid - 1;
        }
        members[lo].push_back(idx);
    }

    for (size_t s = 0; s < stars.size(); ++s) {
        if (members[s].empty()) continue;
        TentTerm term;
        term.level = jmin + static_cast<int>(s);
        TentAtom& A = term.atom;
        A.omega = stars[s];
        A.grid = g;
        A.rects = maximal_dyadic_subrectangles(A.omega);
        std::sort(A.rects.begin(), A.rects.end());
        std::vector<CellBox> d3, d5;
        for (const auto& R : A.rects) {
            d3.push_back(dilate(R, g.a1.n, g.a2.n, 3.0));
            d5.push_back(dilate(R, g.a1.n, g.a2.n, 5.0));
        }
        long double mass = 0;
        for (size_t idx : members[s]) mass += static_cast<long double>(F.values[idx]) * F.values[idx];
        const double norm = std::sqrt(static_cast<double>(mass) * g.cell_measure());
        term.lambda = std::sqrt(A.omega.measure()) * norm;
        A.cells.reserve(members[s].size());
        for (size_t idx : members[s]) {
            CellPos p = decode(g, idx);
            CellBox bx = g.box(p.a, p.b, p.i1, p.i2);
            int piece = -1;
            for (size_t r = 0; r < A.rects.size() && piece < 0; ++r)
                if (d3[r].contains(bx)) piece = static_cast<int>(r);
            if (piece < 0) {
                for (size_t r = 0; r < A.rects.size() && piece < 0; ++r)
                    if (d5[r].contains(bx)) piece = static_cast<int>(r);
                if (piece < 0) throw std::logic_error("tent cell fits no dilated rectangle");
                ++A.fallback_cells;
            }
            A.cells.push_back({idx, F.values[idx] / term.lambda, piece});
        }
        sink(std::move(term));
    }
}

std::vector<TentTerm> tent_decompose(const TentFunction& F) {
    std::vector<TentTerm> out;
    tent_decompose_each(F, [&](TentTerm&& t) { out.push_back(std::move(t)); });
    return out;
}

WindowTable::WindowTable(const AxisOperator& L, const ScaleGrid& g, const SpectralWindow& w)
    : phi(g.size(), L.n()), t(g.size()), lambda(L.evals), weight(g.weight()) {
    for (size_t a = 0; a < g.size(); ++a) {
        t(a) = g[a];
        for (int j = 0; j < L.n(); ++j) phi(a, j) = w.Phi(g[a] * std::sqrt(lambda(j)));
    }
}

PiContext::PiContext(const ProductOperatorPair& p, const TentGrid& g, int m, const SpectralWindow& w)
    : pair(&p), grid(g), M(m), w1(p.L1, g.g1, w), w2(p.L2, g.g2, w) {
    if (M < 1) throw std::invalid_argument("M must be at least 1");
    if (g.a1.n != p.L1.n() || g.a2.n != p.L2.n()) throw std::invalid_argument("tent grid does not match operators");
}

GridFunction pi_operator(const TentFunction& A, const PiContext& ctx) {
    const auto& P = *ctx.pair;
    const TentGrid& g = A.grid;
    const int n1 = g.a1.n, n2 = g.a2.n;
    Eigen::MatrixXd hat = Eigen::MatrixXd::Zero(n1, n2);
    Eigen::VectorXd s2(n2);
    for (size_t a = 0; a < g.g1.size(); ++a) {
        Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n1, n2);
        bool any = false;
        for (size_t b = 0; b < g.g2.size(); ++b) {
            auto S = A.slice(a, b);
            if (S.cwiseAbs().maxCoeff() == 0) continue;
            any = true;
            for (int k = 0; k < n2; ++k) s2(k) = ctx.w2.weight * ctx.w2.psi(static_cast<int>(b), k, ctx.M);
            acc += (S * P.L2.evecs) * s2.asDiagonal();
        }
        if (!any) continue;
        Eigen::VectorXd s1(n1);
        for (int j = 0; j < n1; ++j) s1(j) = ctx.w1.weight * ctx.w1.psi(static_cast<int>(a), j, ctx.M);
        hat += s1.asDiagonal() * (P.L1.evecs.transpose() * acc);
    }
    return P.from_spectral(hat);
}

TentFunction pi_adjoint(const GridFunction& g, const PiContext& ctx) {
    const auto& P = *ctx.pair;
    P.check(g);
    TentFunction F(ctx.grid);
    Eigen::MatrixXd c = P.to_spectral(g);
    const int n1 = P.L1.n(), n2 = P.L2.n();
    Eigen::VectorXd s1(n1), s2(n2);
    for (size_t a = 0; a < ctx.grid.g1.size(); ++a) {
        for (int j = 0; j < n1; ++j) s1(j) = ctx.w1.psi(static_cast<int>(a), j, ctx.M);
        Eigen::MatrixXd G = P.L1.evecs * (s1.asDiagonal() * c);
        for (size_t b = 0; b < ctx.grid.g2.size(); ++b) {
            for (int k = 0; k < n2; ++k) s2(k) = ctx.w2.psi(static_cast<int>(b), k, ctx.M);
            F.slice(a, b) = G * (s2.asDiagonal() * P.L2.evecs.transpose());
        }
    }
    return F;
}

double measure_pi_constant(const PiContext& ctx, Rng& rng, int samples, int iterations) {
    double best = 0;
    for (int s = 0; s < samples; ++s) {
        TentFunction A = random_tent_function(*ctx.pair, ctx.grid, rng);
        for (int it = 0; it <= iterations; ++it) {
            GridFunction g = pi_operator(A, ctx);
            double T = tent_norm(A, 2);
            if (T > 0) best = std::max(best, lp_norm(g, 2) / T);
            if (it == iterations) break;
            A = pi_adjoint(g, ctx);
        }
    }
    return best;
}

PiBound pi_bound(const PiContext& ctx) {
    PiBound out;
    auto axis_pi = [&](const WindowTable& w) {
        double best = 0;
        for (Eigen::Index j = 0; j < w.lambda.size(); ++j) {
            double s = 0;
            for (Eigen::Index a = 0; a < w.t.size(); ++a) s += w.weight * std::pow(w.psi(a, j, ctx.M), 2);
            best = std::max(best, s);
        }
        return best;
    };
    out.C_pi = std::sqrt(axis_pi(ctx.w1) * axis_pi(ctx.w2));

    // pieces of an interval of length l sit at scales whose cone box fits the clipped 5-dilate
    auto axis_iii = [&](const WindowTable& w, const Axis& ax) {
        double best = 0;
        for (int p = 0; (1 << p) <= ax.n; ++p) {
            const double ell = (1 << p) * ax.h;
            const bool whole = 5 * ell >= ax.length();
            for (int k = 0; k <= ctx.M; ++k)
                for (Eigen::Index j = 0; j < w.lambda.size(); ++j) {
                    double s = 0;
                    for (Eigen::Index a = 0; a < w.t.size(); ++a) {
                        int r = cone_radius(w.t(a), ax.h);
                        if (!whole && r > 3 * (1 << p) - 1) continue;
                        double v = std::pow(w.t(a) / ell, 2 * ctx.M - 2 * k) *
                                   std::pow(w.t(a) * w.t(a) * w.lambda(j), k) * w.phi(a, j);
                        s += w.weight * v * v;
                    }
                    best = std::max(best, s);
                }
        }
        return std::sqrt(best);
    };
    out.C_iii = axis_iii(ctx.w1, ctx.grid.a1) * axis_iii(ctx.w2, ctx.grid.a2);
    out.C_M = std::max(out.C_pi, out.C_iii);
    return out;
}

Eigen::MatrixXd HardyAtom::a_hat() const {
    Eigen::MatrixXd hat = Eigen::MatrixXd::Zero(pair->L1.n(), pair->L2.n());
    Eigen::VectorXd l = pair->L1.evals.array().pow(M), m = pair->L2.evals.array().pow(M);
    for (const auto& p : pieces) hat += l.asDiagonal() * p.b_hat * m.asDiagonal();
    return hat;
}

GridFunction HardyAtom::a() const { return pair->from_spectral(a_hat()); }

GridFunction HardyAtom::a_piece(size_t i) const { return b_power(i, M, M); }

GridFunction HardyAtom::b_power(size_t i, int k1, int k2) const {
    Eigen::VectorXd l = pair->L1.evals.array().pow(k1), m = pair->L2.evals.array().pow(k2);
    return pair->from_spectral(l.asDiagonal() * pieces[i].b_hat * m.asDiagonal());
}

HardyAtom lift_tent_atom(const TentAtom& A, const PiContext& ctx, double C, const AtomOptions& opt) {
    if (!(C > 0)) throw std::invalid_argument("normalizing constant must be positive");
    const auto& P = *ctx.pair;
    const TentGrid& g = A.grid;
    const int n1 = g.a1.n, n2 = g.a2.n;
    HardyAtom out;
    out.omega = A.omega;
    out.M = ctx.M;
    out.pair = ctx.pair;

    // weighted t^{2M} Phi tables
    Eigen::MatrixXd G1(g.g1.size(), n1), G2(g.g2.size(), n2);
    for (size_t a = 0; a < g.g1.size(); ++a)
        for (int j = 0; j < n1; ++j) G1(a, j) = ctx.w1.weight * ctx.w1.b_factor(static_cast<int>(a), j, ctx.M);
    for (size_t b = 0; b < g.g2.size(); ++b)
        for (int k = 0; k < n2; ++k) G2(b, k) = ctx.w2.weight * ctx.w2.b_factor(static_cast<int>(b), k, ctx.M);

    std::vector<std::vector<const TentCell*>> by_piece(A.rects.size());
    for (const auto& c : A.cells) by_piece[c.piece].push_back(&c);

    for (size_t r = 0; r < A.rects.size(); ++r) {
        if (by_piece[r].empty()) continue;
        auto& cells = by_piece[r];
        std::sort(cells.begin(), cells.end(), [](const TentCell* x, const TentCell* y) { return x->index < y->index; });
        HardyPiece piece;
        piece.rect = A.rects[r];
        piece.region = expand(dilate(A.rects[r], n1, n2, opt.dilate), opt.buffer, n1, n2);
        piece.b_hat = Eigen::MatrixXd::Zero(n1, n2);
        Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n1, n2);
        size_t cur = decode(g, cells.front()->index).a;
        auto flush = [&](size_t a) {
            piece.b_hat += G1.row(a).transpose().asDiagonal() * (P.L1.evecs.transpose() * acc);
            acc.setZero();
        };
        for (const TentCell* c : cells) {
            CellPos p = decode(g, c->index);
            if (p.a != cur) {
                flush(cur);
                cur = p.a;
            }
            acc.row(p.i1) += c->value * P.L2.evecs.row(p.i2).cwiseProduct(G2.row(p.b));
        }
        flush(cur);
        piece.b_hat /= C;
        out.pieces.push_back(std::move(piece));
    }
    return out;
}

std::vector<HardyAtom> random_hardy_atoms(const PiContext& ctx, double C, size_t count, Rng& rng,
                                          const AtomOptions& opt) {
    std::vector<HardyAtom> out;
    for (int attempt = 0; out.size() < count; ++attempt) {
        if (attempt > static_cast<int>(10 * count + 10)) throw std::runtime_error("atom generator stalled");
        TentFunction F = random_smooth_tent_function(*ctx.pair, ctx.grid, rng);
        for (const TentTerm& t : tent_decompose(F)) {
            HardyAtom h = lift_tent_atom(t.atom, ctx, C, opt);
            if (h.a_hat().norm() == 0) continue;
            out.push_back(std::move(h));
            if (out.size() == count) break;
        }
    }
    return out;
}

double AtomValidation::saturation() const {
    double rho = 0;
    for (const ConditionEntry& e : entries) {
        if (!(e.bound > 0)) continue;
        if (e.name == "size") rho = std::max(rho, e.measured / e.bound);
        // quadratic in the atom
        if (e.name.rfind("weighted sum", 0) == 0) rho = std::max(rho, std::sqrt(e.measured / e.bound));
    }
    return rho;
}

bool AtomValidation::pass() const {
    return std::all_of(entries.begin(), entries.end(), [](const ConditionEntry& e) { return e.pass; });
}

double AtomValidation::min_slack() const {
    double s = std::numeric_limits<double>::infinity();
    for (const auto& e : entries) s = std::min(s, e.slack);
    return s;
}

AtomValidation hardy_atom_validate(const HardyAtom& atom, double tol) {
    AtomValidation rep;
    const auto& P = *atom.pair;
    const int n1 = P.L1.n(), n2 = P.L2.n();
    const double omega = atom.measure();
    GridFunction a = atom.a();
    const double anorm = lp_norm(a, 2);

    // 1) support of a inside the union of the piece regions
    {
        OpenSet allowed(P.L1.axis, P.L2.axis);
        for (const auto& p : atom.pieces) allowed.fill_box(p.region);
        double out = 0;
        for (int i1 = 0; i1 < n1; ++i1)
            for (int i2 = 0; i2 < n2; ++i2)
                if (!allowed(i1, i2)) out += a.v(i1, i2) * a.v(i1, i2);
        rep.entries.push_back(relative("support a", std::sqrt(out * a.cell_area()), anorm, tol));
    }

    // factorization and localization, checked with explicit matrix powers
    std::vector<Eigen::MatrixXd> pow1, pow2;
    for (int k = 0; k <= atom.M; ++k) {
        pow1.push_back(matrix_power(P.L1.matrix, k));
        pow2.push_back(matrix_power(P.L2.matrix, k));
    }
    double worst_fact = 0, worst_supp = 0;
    bool fact_zero = true, supp_zero = true;
    std::vector<std::vector<double>> weighted((atom.M + 1), std::vector<double>(atom.M + 1, 0.0));
    Eigen::MatrixXd sum_pieces = Eigen::MatrixXd::Zero(n1, n2);
    for (size_t i = 0; i < atom.pieces.size(); ++i) {
        const auto& p = atom.pieces[i];
        Eigen::MatrixXd b = P.L1.evecs * p.b_hat * P.L2.evecs.transpose();
        GridFunction aR = atom.a_piece(i);
        sum_pieces += aR.v;
        Eigen::MatrixXd direct = pow1[atom.M] * b * pow2[atom.M];
        double an = aR.v.norm();
        if (an > 0) {
            fact_zero = false;
            worst_fact = std::max(worst_fact, (direct - aR.v).norm() / an);
        }
        const double l1 = p.rect.i1.size(n1) * P.L1.axis.h, l2 = p.rect.i2.size(n2) * P.L2.axis.h;
        for (int k1 = 0; k1 <= atom.M; ++k1)
            for (int k2 = 0; k2 <= atom.M; ++k2) {
                GridFunction g(P.L1.axis, P.L2.axis, pow1[k1] * b * pow2[k2]);
                double gn = lp_norm(g, 2);
                if (gn > 0) {
                    supp_zero = false;
                    worst_supp = std::max(worst_supp, mass_outside(g, p.region) / gn);
                }
                double scale = std::pow(l1, 2 * k1 - 2 * atom.M) * std::pow(l2, 2 * k2 - 2 * atom.M);
                weighted[k1][k2] += scale * scale * gn * gn;
            }
    }
    {
        double scale = std::max(sum_pieces.norm(), a.v.norm());
        rep.entries.push_back(relative("a equals sum of pieces", (sum_pieces - a.v).norm(), scale, tol));
    }
    if (fact_zero)
        rep.entries.push_back(relative("a_R = L^M b_R", 0, 0, tol));
    else
        rep.entries.push_back(relative("a_R = L^M b_R", worst_fact, 1.0, tol));
    if (supp_zero)
        rep.entries.push_back(relative("support of L^k b_R", 0, 0, tol));
    else
        rep.entries.push_back(relative("support of L^k b_R", worst_supp, 1.0, tol));

    if (anorm == 0) {
        ConditionEntry e{"size", 0, 1};
        rep.entries.push_back(e);
    } else {
        rep.entries.push_back(upper("size", anorm * std::sqrt(omega), 1.0, tol));
    }
    for (int k1 = 0; k1 <= atom.M; ++k1)
        for (int k2 = 0; k2 <= atom.M; ++k2) {
            std::string name = "weighted sum k=(" + std::to_string(k1) + "," + std::to_string(k2) + ")";
            if (weighted[k1][k2] == 0)
                rep.entries.push_back(ConditionEntry{name, 0, 1});
            else
                rep.entries.push_back(upper(name, weighted[k1][k2] * omega, 1.0, tol));
        }
    return rep;
}

HardyAtom saturate(const HardyAtom& a, double tol) {
    const double rho = hardy_atom_validate(a, tol).saturation();
    if (!(rho > 0)) throw std::invalid_argument("zero atom");
    HardyAtom out = a;
    for (auto& p : out.pieces) p.b_hat /= rho;
    return out;
}

GridFunction AtomicRepresentation::reconstruction() const {
    GridFunction out = residual;
    out.v.setZero();
    for (const auto& t : terms) out.v += t.coefficient * t.atom.a().v;
    return out;
}

TentGrid decomposition_grid(const Axis& a1, const Axis& a2, const DecomposeOptions& opt) {
    return TentGrid(a1, a2, ScaleGrid(opt.t_min_cells * a1.h, opt.t_max_lengths * a1.length(), opt.per_octave),
                    ScaleGrid(opt.t_min_cells * a2.h, opt.t_max_lengths * a2.length(), opt.per_octave));
}

Eigen::VectorXd calderon_sum(const WindowTable& w, int M) {
    Eigen::VectorXd m = Eigen::VectorXd::Zero(w.lambda.size());
    for (Eigen::Index j = 0; j < w.lambda.size(); ++j)
        for (Eigen::Index a = 0; a < w.t.size(); ++a) {
            double u = w.t(a) * w.t(a) * w.lambda(j);
            m(j) += w.weight * w.psi(a, j, M) * u * std::exp(-u);
        }
    return m;
}

AtomicRepresentation hardy_decompose(const GridFunction& f, int M, const ProductOperatorPair& pair,
                                     const DecomposeOptions& opt) {
    pair.check(f);
    if (!f.v.allFinite()) throw std::invalid_argument("non-finite sample");
    TentGrid grid = decomposition_grid(f.ax1, f.ax2, opt);
    PiContext ctx(pair, grid, M);
    AtomicRepresentation rep;

    // per-axis calibration at the middle of the spectrum
    double c[2], err = 0;
    const WindowTable* tables[2] = {&ctx.w1, &ctx.w2};
    for (int ax = 0; ax < 2; ++ax) {
        Eigen::VectorXd m = calderon_sum(*tables[ax], M);
        const auto& lam = tables[ax]->lambda;
        c[ax] = 1.0 / m(lam.size() / 2);
        for (Eigen::Index j = 0; j < lam.size(); ++j)
            if (lam(j) > 0) err = std::max(err, std::fabs(c[ax] * m(j) - 1));
    }
    rep.calibration_error = err;
    if (!(err <= opt.calibration_tol)) throw std::runtime_error("calderon calibration");
    rep.c_psi = c[0] * c[1];
    rep.C_M = pi_bound(ctx).C_M;

    Eigen::MatrixXd recon_hat = Eigen::MatrixXd::Zero(f.v.rows(), f.v.cols());
    if (f.v.cwiseAbs().maxCoeff() > 0) {
        TentFunction F = q_tent(f, pair, grid);
        tent_decompose_each(F, [&](TentTerm&& t) {
            AtomicTerm term;
            term.tent_lambda = t.lambda;
            term.coefficient = rep.c_psi * t.lambda * rep.C_M;
            term.atom = lift_tent_atom(t.atom, ctx, rep.C_M, opt.atom);
            recon_hat += term.coefficient * term.atom.a_hat();
            rep.coefficient_l1 += std::fabs(term.coefficient);
            if (opt.keep_atoms) rep.terms.push_back(std::move(term));
        });
    }
    rep.residual = f;
    rep.residual.v -= pair.L1.evecs * recon_hat * pair.L2.evecs.transpose();
    return rep;
}

}  // namespace hardy
