#include "heatlab/bessel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "heatlab/common.hpp"

namespace heatlab {

namespace {

constexpr double kSeriesCut = 30.0;
constexpr double kTwoPi = 6.283185307179586476925286766559;

void check_args(double nu, double z) {
    if (nu < 0.0) throw Error("bessel_i: negative order");
    if (z < 0.0) throw Error("bessel_i: negative argument");
    if (!std::isfinite(nu) || !std::isfinite(z)) throw Error("bessel_i: non-finite input");
}

// power series, all terms positive; valid for any (nu, z), used for z <= 30
double series_scaled(double nu, double z) {
    if (z == 0.0) return nu == 0.0 ? 1.0 : 0.0;
    const double q = 0.25 * z * z;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 400; ++k) {
        term *= q / (k * (nu + k));
        sum += term;
        if (term < sum * 1e-17) break;
    }
    double ln = nu * std::log(0.5 * z) - std::lgamma(1.0 + nu) - z + std::log(sum);
    return std::exp(ln);
}

// large-argument expansion of e^{-z} I_nu(z); needs z > ~30 and nu < 1
double asym_scaled(double nu, double z) {
    const double mu4 = 4.0 * nu * nu;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k <= 40; ++k) {
        double factor = -(mu4 - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * k * z);
        double next = term * factor;
        if (std::fabs(next) >= std::fabs(term)) break;
        term = next;
        sum += term;
        if (std::fabs(term) < 1e-17 * std::fabs(sum)) break;
    }
    return sum / std::sqrt(kTwoPi * z);
}

// Downward ratio sweep r_k = I_{mu+k+1}/I_{mu+k} on the unit ladder above mu,
// anchored at I_mu from the large-argument expansion. Fills out[i] for ladder
// offsets offs[i] (ascending). Stable: errors contract going down.
void ladder_scaled(double mu, double z, const std::vector<int>& offs,
                   const std::vector<std::size_t>& slots, std::vector<double>& out) {
    const int top_off = offs.back();
    const int extra = static_cast<int>(5.5 * std::sqrt(z)) + 30;
    const int depth = top_off + extra;

    std::vector<double> ratio(depth);
    double nu_top = mu + depth;
    double r = z / (nu_top + 0.5 + std::hypot(nu_top + 0.5, z));
    for (int k = depth - 1; k >= 0; --k) {
        r = z / (2.0 * (mu + k + 1.0) + z * r);
        ratio[k] = r;
    }

    double value = asym_scaled(mu, z);
    std::size_t next = 0;
    for (int k = 0; k <= top_off && next < offs.size(); ++k) {
        while (next < offs.size() && offs[next] == k) out[slots[next++]] = value;
        if (k < top_off) value *= ratio[k];
    }
}

} // namespace

double bessel_i_scaled(double nu, double z) {
    check_args(nu, z);
    if (z <= kSeriesCut) return series_scaled(nu, z);
    int m = static_cast<int>(std::floor(nu));
    double mu = nu - m;
    std::vector<double> out(1);
    ladder_scaled(mu, z, {m}, {0}, out);
    return out[0];
}

double bessel_i(double nu, double z) {
    double s = bessel_i_scaled(nu, z);
    if (z > 700.0) {
        double ln = std::log(s) + z;
        return ln > 709.0 ? std::numeric_limits<double>::infinity() : std::exp(ln);
    }
    return s * std::exp(z);
}

void bessel_i_scaled_many(const std::vector<double>& orders, double z,
                          std::vector<double>& out) {
    out.resize(orders.size());
    if (orders.empty()) return;
    check_args(orders.front(), z);
    if (z <= kSeriesCut) {
        for (std::size_t i = 0; i < orders.size(); ++i) {
            if (orders[i] < 0.0) throw Error("bessel_i: negative order");
            out[i] = series_scaled(orders[i], z);
        }
        return;
    }
    // one ratio sweep per fractional class
    struct Entry { double mu; int off; std::size_t slot; };
    std::vector<Entry> entries(orders.size());
    for (std::size_t i = 0; i < orders.size(); ++i) {
        if (orders[i] < 0.0) throw Error("bessel_i: negative order");
        int m = static_cast<int>(std::floor(orders[i]));
        entries[i] = {orders[i] - m, m, i};
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (std::fabs(a.mu - b.mu) > 1e-12) return a.mu < b.mu;
        return a.off < b.off;
    });
    std::size_t i = 0;
    while (i < entries.size()) {
        std::size_t j = i;
        std::vector<int> offs;
        std::vector<std::size_t> slots;
        while (j < entries.size() && std::fabs(entries[j].mu - entries[i].mu) <= 1e-12) {
            offs.push_back(entries[j].off);
            slots.push_back(entries[j].slot);
            ++j;
        }
        ladder_scaled(entries[i].mu, z, offs, slots, out);
        i = j;
    }
}

double bessel_i_scaled_upper(double nu, double z) {
    check_args(nu, z);
    if (z == 0.0) return nu == 0.0 ? 1.0 : 0.0;
    double base = nu * std::log(0.5 * z) - std::lgamma(1.0 + nu);
    double b = std::exp(std::min(base, 700.0));
    double b2 = std::exp(std::min(base + z * z / (4.0 * (nu + 1.0)) - z, 700.0));
    b = std::min(b, b2);
    if (nu >= 20.0) {
        double w = std::hypot(nu, z);
        double ln = w - z - nu * std::log((nu + w) / z);
        double b3 = 1.3 * std::exp(ln) / std::sqrt(kTwoPi * w);
        b = std::min(b, b3);
    }
    return b;
}

} // namespace heatlab
