#include "heatlab/spectral.hpp"

#include <algorithm>
#include <cmath>

namespace heatlab {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Legendre ODE y'' + cot(theta) y' + nu(nu+1) y = 0, shot from the pole.
// Returns y(theta_end); when table != nullptr also fills value/derivative
// at the m+1 uniform grid nodes.
double legendre_shoot(double nu, double theta_end, int m, SpectralData::Table* table) {
    const double lam = nu * (nu + 1.0);
    const double h = theta_end / m;

    // regular solution near the pole: P = sum c_k u^k, u = sin^2(theta/2)
    auto series = [&](double theta, double& y, double& dy) {
        double u = std::sin(0.5 * theta);
        u *= u;
        double c = 1.0, yy = 1.0, ss = 0.0;
        for (int k = 0; k < 12; ++k) {
            double cn = c * ((k - nu) * (k + nu + 1.0)) / ((k + 1.0) * (k + 1.0));
            ss += cn * (k + 1) * std::pow(u, k);
            yy += cn * std::pow(u, k + 1);
            c = cn;
            if (std::fabs(c) < 1e-22) break;
        }
        y = yy;
        dy = ss * 0.5 * std::sin(theta);
    };

    if (table) {
        table->h = h;
        table->val.assign(m + 1, 0.0);
        table->der.assign(m + 1, 0.0);
        table->val[0] = 1.0;
        table->der[0] = 0.0;
    }

    double y, v;
    series(h, y, v);
    if (table) {
        table->val[1] = y;
        table->der[1] = v;
    }

    auto rhs = [&](double th, double yy, double vv, double& dy, double& dv) {
        dy = vv;
        dv = -vv / std::tan(th) - lam * yy;
    };

    double th = h;
    for (int i = 1; i < m; ++i) {
        double k1y, k1v, k2y, k2v, k3y, k3v, k4y, k4v;
        rhs(th, y, v, k1y, k1v);
        rhs(th + 0.5 * h, y + 0.5 * h * k1y, v + 0.5 * h * k1v, k2y, k2v);
        rhs(th + 0.5 * h, y + 0.5 * h * k2y, v + 0.5 * h * k2v, k3y, k3v);
        rhs(th + h, y + h * k3y, v + h * k3v, k4y, k4v);
        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        th += h;
        if (table) {
            table->val[i + 1] = y;
            table->der[i + 1] = v;
        }
    }
    return y;
}

void build_cap_spectrum(SpectralData& s, int K) {
    const double theta0 = s.opening.colat;
    const int coarse_steps = 1200;
    const int fine_steps = 8192;
    const double nu_max = 200.0, grid = 0.01;

    auto f = [&](double nu) { return legendre_shoot(nu, theta0, coarse_steps, nullptr); };

    std::vector<double> roots;
    double prev_nu = 1e-6, prev_f = f(prev_nu);
    for (double nu = grid; nu <= nu_max && static_cast<int>(roots.size()) < K; nu += grid) {
        double fv = f(nu);
        if (prev_f == 0.0) roots.push_back(prev_nu);
        else if (fv * prev_f < 0.0) {
            double lo = prev_nu, hi = nu, flo = prev_f;
            while (hi - lo > 1e-12) {
                double mid = 0.5 * (lo + hi);
                double fm = f(mid);
                if (fm == 0.0) { lo = hi = mid; break; }
                if (fm * flo < 0.0) hi = mid;
                else { lo = mid; flo = fm; }
            }
            roots.push_back(0.5 * (lo + hi));
        }
        prev_nu = nu;
        prev_f = fv;
    }
    if (static_cast<int>(roots.size()) < K)
        throw Error("spectrum: could not bracket " + std::to_string(K) +
                    " cap eigenvalues in nu=(0,200]; found " + std::to_string(roots.size()));

    s.count = K;
    for (int k = 0; k < K; ++k) {
        double nu = roots[k];
        double lam = nu * (nu + 1.0);
        s.eigenvalues.push_back(lam);
        s.characters.push_back(std::sqrt(lam + 0.25));

        SpectralData::Table table;
        legendre_shoot(nu, theta0, fine_steps, &table);

        // L2(D, sigma) normalization: 2*pi int m^2 sin(theta) dtheta = 1
        const double h = table.h;
        auto moment = [&](int pw) {
            double acc = 0.0; // composite Simpson on the fine grid
            for (int i = 0; i + 2 <= fine_steps; i += 2) {
                auto g = [&](int j) {
                    double t = j * h;
                    double val = pw == 2 ? table.val[j] * table.val[j] : table.val[j];
                    return val * std::sin(t);
                };
                acc += h / 3.0 * (g(i) + 4.0 * g(i + 1) + g(i + 2));
            }
            return 2.0 * kPi * acc;
        };
        double scale = 1.0 / std::sqrt(moment(2));
        for (auto& v : table.val) v *= scale;
        for (auto& v : table.der) v *= scale;
        s.first_integrals.push_back(moment(1));
        double sup = 0.0;
        for (double v : table.val) sup = std::max(sup, std::fabs(v));
        s.sup_abs.push_back(sup * 1.01);
        s.tables.push_back(std::move(table));
    }

    // cumulative angular mass of m^1 for the Yaglom angular CDF
    const auto& t1 = s.tables[0];
    s.m1_cdf.assign(t1.val.size(), 0.0);
    for (std::size_t i = 1; i < t1.val.size(); ++i) {
        double a = (i - 1) * t1.h, b = i * t1.h;
        double fa = t1.val[i - 1] * std::sin(a), fb = t1.val[i] * std::sin(b);
        double fm = 0.5 * (t1.val[i - 1] + t1.val[i]) * std::sin(0.5 * (a + b));
        s.m1_cdf[i] = s.m1_cdf[i - 1] + (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    }
    double total = s.m1_cdf.back();
    for (auto& v : s.m1_cdf) v /= total;
}

} // namespace

SpectralData spectrum(const Opening& opening, int K) {
    opening.check();
    if (K < 1) throw Error("spectrum: K must be >= 1");
    if (K > 10000) throw Error("spectrum: K exceeds supported series length (10^4)");

    SpectralData s;
    s.opening = opening;
    s.dim = opening.dim;

    if (opening.kind == Opening::Kind::Arc) {
        const double L = opening.width();
        s.count = K;
        for (int k = 1; k <= K; ++k) {
            double lam = (k * kPi / L) * (k * kPi / L);
            s.eigenvalues.push_back(lam);
            s.characters.push_back(std::sqrt(lam)); // (n/2-1) = 0
            double i1 = (k % 2 == 1) ? std::sqrt(2.0 / L) * 2.0 * L / (k * kPi) : 0.0;
            s.first_integrals.push_back(i1);
            s.sup_abs.push_back(std::sqrt(2.0 / L));
        }
    } else {
        build_cap_spectrum(s, K);
    }

    s.alpha = s.characters[0];
    s.kappa = 1.0 + s.alpha - 0.5 * s.dim;
    s.beta = 1.0 + s.alpha + 0.5 * s.dim;
    return s;
}

double SpectralData::eigenfunction(int i, double u) const {
    if (i < 1 || i > count) throw Error("eigenfunction: index out of range");
    const double L = width();
    if (u < -1e-12 || u > L + 1e-12) throw Error("eigenfunction: coordinate outside the closed opening");
    u = std::clamp(u, 0.0, L);
    if (opening.kind == Opening::Kind::Arc)
        return std::sqrt(2.0 / L) * std::sin(i * kPi * u / L);
    const auto& t = tables[i - 1];
    if (u >= L) return 0.0;
    std::size_t j = std::min(static_cast<std::size_t>(u / t.h), t.val.size() - 2);
    double s = (u - j * t.h) / t.h;
    double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    double h10 = s * (1 - s) * (1 - s);
    double h01 = s * s * (3 - 2 * s);
    double h11 = s * s * (s - 1);
    return h00 * t.val[j] + h10 * t.h * t.der[j] + h01 * t.val[j + 1] + h11 * t.h * t.der[j + 1];
}

double SpectralData::first_angular_cdf(double u) const {
    const double L = width();
    u = std::clamp(u, 0.0, L);
    if (opening.kind == Opening::Kind::Arc)
        return 0.5 * (1.0 - std::cos(kPi * u / L));
    const auto& t = tables[0];
    std::size_t j = std::min(static_cast<std::size_t>(u / t.h), m1_cdf.size() - 2);
    double s = (u - j * t.h) / t.h;
    return m1_cdf[j] * (1.0 - s) + m1_cdf[j + 1] * s;
}

} // namespace heatlab
