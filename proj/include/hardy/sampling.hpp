#pragma once

#include "hardy/square.hpp"

#include <random>

namespace hardy {

using Rng = std::mt19937_64;

// Union of a few rectangles drawn in physical coordinates, rasterized by cell centers.
OpenSet random_open_set(const Axis& a1, const Axis& a2, Rng& rng, int max_rects = 5,
                        double min_side = 1.0 / 16, double max_side = 0.5);

// Bounded non-negative potential, smooth in physical coordinates.
Eigen::VectorXd random_potential(const Axis& a, Rng& rng, double vmax);

// Random combination of sin(j pi x) sin(k pi y) over the given mode window,
// sampled at cell centers of a unit-length product domain.
GridFunction random_sine_series(const Axis& a1, const Axis& a2, Rng& rng, int kmin, int kmax);

// Random combination of joint eigenvectors u_j (x) v_k, kmin <= j,k <= kmax (0-based).
GridFunction random_eigen_series(const ProductOperatorPair& pair, Rng& rng, int kmin, int kmax);

// White noise of unit variance per cell.
GridFunction random_noise(const Axis& a1, const Axis& a2, Rng& rng);

// Q_t g for white noise g restricted to a random open set.
TentFunction random_tent_function(const ProductOperatorPair& pair, const TentGrid& grid, Rng& rng);
// Same with a sine series (modes 1..kmax) in place of the noise; comparable across grid sizes.
TentFunction random_smooth_tent_function(const ProductOperatorPair& pair, const TentGrid& grid, Rng& rng,
                                         int kmax = 6);

}  // namespace hardy
