#pragma once

#include <vector>

#include "heatlab/geometry.hpp"

namespace heatlab {

// Dirichlet spectrum of the Laplace-Beltrami operator on an opening:
// eigenvalues lambda^i, characters alpha^i = sqrt(lambda^i + (n/2-1)^2),
// and evaluable eigenfunctions m^i orthonormal in L^2(D, sigma).
//
// 2D arcs are closed form. 3D caps solve the Legendre ODE by shooting in
// the degree nu (azimuthally symmetric modes only); eigenfunctions are
// cubic-Hermite tables on a fine colatitude grid. Immutable once built.
struct SpectralData {
    Opening opening;
    int dim = 2;
    int count = 0;

    std::vector<double> eigenvalues; // lambda^1 < lambda^2 <= ...
    std::vector<double> characters;  // alpha^i
    double alpha = 0.0;              // alpha^1
    double kappa = 0.0;              // 1 + alpha - n/2
    double beta = 0.0;               // 1 + alpha + n/2

    std::vector<double> first_integrals; // I1(i) = int m^i dsigma
    std::vector<double> sup_abs;         // upper bounds for sup |m^i|

    // value of m^i at intrinsic coordinate u (i is 1-based);
    // u = offset from theta_a (arc) or colatitude (cap)
    double eigenfunction(int i, double u) const;

    // CDF of the m^1-weighted angular density on [0, width]
    double first_angular_cdf(double u) const;

    double first_integral() const { return first_integrals.at(0); }
    double width() const { return opening.width(); }

    // 3D eigenfunction tables (value and derivative per grid node)
    struct Table {
        std::vector<double> val, der;
        double h = 0.0;
    };
    std::vector<Table> tables;
    std::vector<double> m1_cdf; // cumulative angular mass of m^1 (3D)
};

// Compute the first K eigenpairs. Throws on invalid openings, K < 1,
// K > 10^4, or when the shooting scan cannot bracket enough roots.
SpectralData spectrum(const Opening& opening, int K);

} // namespace heatlab
