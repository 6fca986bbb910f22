#include "heatlab/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "heatlab/special.hpp"

namespace heatlab {

MaximalSet maximal_indices(const std::vector<SpectralData>& spectra) {
    MaximalSet m;
    if (spectra.empty()) return m;
    m.alpha = spectra[0].alpha;
    for (const auto& s : spectra) m.alpha = std::min(m.alpha, s.alpha);
    for (std::size_t j = 0; j < spectra.size(); ++j)
        if (spectra[j].alpha <= m.alpha + 1e-10) m.indices.push_back(static_cast<int>(j));
    return m;
}

std::vector<double> geometric_grid(double start, double factor, int count) {
    std::vector<double> g;
    double t = start;
    for (int i = 0; i < count; ++i, t *= factor) g.push_back(t);
    return g;
}

namespace {

SimConfig target_config(const SimConfig& cfg) {
    SimConfig c = cfg;
    c.paths = std::max<std::int64_t>(cfg.paths / 10, 20000);
    c.seed = cfg.seed ^ 0x7461726765740000ull;
    return c;
}

// verdict per the report invariants: final deviation within tolerance and
// deviations nonincreasing across the last three rows up to 3-sigma CI slack
void finish_report(LimitExperimentReport& r) {
    for (auto& row : r.rows)
        row.deviation = std::fabs(row.renormalized / r.target - 1.0);
    std::vector<double> lt, lraw;
    for (const auto& row : r.rows)
        if (row.raw > 0.0) {
            lt.push_back(std::log(row.t));
            lraw.push_back(std::log(row.raw));
        }
    if (lt.size() >= 2) r.fitted_exponent = fit_slope(lt, lraw);

    const GridRow& last = r.rows.back();
    bool final_ok = last.deviation <= r.tolerance;
    bool trend_ok = true;
    std::size_t n = r.rows.size();
    std::size_t first = n >= 3 ? n - 3 : 0;
    for (std::size_t i = first; i + 1 < n; ++i) {
        double slack = 3.0 *
                       std::sqrt(r.rows[i].se * r.rows[i].se + r.rows[i + 1].se * r.rows[i + 1].se +
                                 2.0 * r.target_se * r.target_se) /
                       std::fabs(r.target);
        if (r.rows[i + 1].deviation > r.rows[i].deviation + slack) trend_ok = false;
    }
    r.pass = final_ok && trend_ok;
    std::ostringstream os;
    os << (r.pass ? "PASS" : "FAIL") << ": final deviation " << last.deviation << " vs tolerance "
       << r.tolerance << (trend_ok ? ", trend nonincreasing" : ", trend increased beyond CI");
    r.verdict = os.str();
}

template <class Simulate, class Kde>
LimitExperimentReport kernel_experiment_impl(double alpha, double target, double target_se,
                                             const std::vector<double>& t_grid,
                                             const SimConfig& cfg, double tolerance,
                                             std::uint64_t domain_id, const Simulate& simulate,
                                             const Kde& kde) {
    LimitExperimentReport r;
    r.kind = "kernel";
    r.alpha = alpha;
    r.target = target;
    r.target_se = target_se;
    r.tolerance = tolerance;
    r.domain_id = domain_id;
    r.seed = cfg.seed;
    for (double t : t_grid) {
        PathEnsemble ens = simulate(t);
        EstimateCI kv = kde(ens, t);
        double scale = std::pow(t, 1.0 + alpha);
        r.rows.push_back({t, kv.estimate, scale * kv.estimate, scale * kv.se, 0.0});
    }
    finish_report(r);
    return r;
}

template <class Simulate>
LimitExperimentReport exit_experiment_impl(double alpha, double kappa, double target,
                                           double target_se, const std::vector<double>& t_grid,
                                           const SimConfig& cfg, double tolerance,
                                           std::uint64_t domain_id, const Simulate& simulate) {
    LimitExperimentReport r;
    r.kind = "exit";
    r.alpha = alpha;
    r.kappa = kappa;
    r.target = target;
    r.target_se = target_se;
    r.tolerance = tolerance;
    r.domain_id = domain_id;
    r.seed = cfg.seed;
    for (double t : t_grid) {
        PathEnsemble ens = simulate(t);
        EstimateCI sv = estimate_survival(ens);
        double scale = std::pow(t, 0.5 * kappa);
        r.rows.push_back({t, sv.estimate, scale * sv.estimate, scale * sv.se, 0.0});
    }
    finish_report(r);
    return r;
}

} // namespace

LimitExperimentReport kernel_limit_experiment(const TruncatedCone& cone, const SpectralData& spec,
                                              const Vec& x, const Vec& y,
                                              const std::vector<double>& t_grid,
                                              const SimConfig& cfg, double tolerance) {
    const bool same = (x - y).norm() < 1e-14;
    SimConfig tc = target_config(cfg);
    EstimateCI wx = estimate_w(cone, spec, x, tc);
    tc.seed ^= 0x77ull;
    EstimateCI wy = same ? wx : estimate_w(cone, spec, y, tc);
    double norm = std::exp(spec.alpha * std::log(2.0) + std::lgamma(1.0 + spec.alpha));
    double target = wx.estimate * wy.estimate / norm;
    double target_se = same ? 2.0 * std::fabs(wx.estimate) * wx.se / norm
                            : std::hypot(wx.se * wy.estimate, wy.se * wx.estimate) / norm;
    auto rep = kernel_experiment_impl(
        spec.alpha, target, target_se, t_grid, cfg, tolerance, 0x636f6e65ull,
        [&](double t) { return simulate_paths(cone, x, t, cfg); },
        [&](const PathEnsemble& ens, double t) {
            return estimate_kernel_at(cone, ens, y, cfg.bandwidth > 0 ? cfg.bandwidth
                                                                      : 0.05 * std::sqrt(t));
        });
    rep.kappa = spec.kappa;
    return rep;
}

LimitExperimentReport kernel_limit_experiment(const MulticoneDomain& domain,
                                              const std::vector<SpectralData>& spectra,
                                              const Vec& x, const Vec& y,
                                              const std::vector<double>& t_grid,
                                              const SimConfig& cfg, double tolerance) {
    MaximalSet m = maximal_indices(spectra);
    const bool same = (x - y).norm() < 1e-14;
    SimConfig tc = target_config(cfg);
    double target = 0.0, var = 0.0;
    double norm = std::exp(m.alpha * std::log(2.0) + std::lgamma(1.0 + m.alpha));
    for (int l : m.indices) {
        EstimateCI ux = estimate_u(domain, spectra, l, x, tc);
        tc.seed ^= 0x55ull;
        EstimateCI uy = same ? ux : estimate_u(domain, spectra, l, y, tc);
        tc.seed ^= 0x56ull;
        target += ux.estimate * uy.estimate / norm;
        if (same)
            var += std::pow(2.0 * ux.estimate * ux.se / norm, 2);
        else
            var += (std::pow(ux.se * uy.estimate, 2) + std::pow(uy.se * ux.estimate, 2)) /
                   (norm * norm);
    }
    auto rep = kernel_experiment_impl(
        m.alpha, target, std::sqrt(var), t_grid, cfg, tolerance, domain_hash(domain),
        [&](double t) { return simulate_paths(domain, x, t, cfg); },
        [&](const PathEnsemble& ens, double t) {
            return estimate_kernel_at(domain, ens, y, cfg.bandwidth > 0 ? cfg.bandwidth
                                                                        : 0.05 * std::sqrt(t));
        });
    rep.kappa = 1.0 + m.alpha - 0.5 * domain.dim;
    return rep;
}

LimitExperimentReport exit_limit_experiment(const TruncatedCone& cone, const SpectralData& spec,
                                            const Vec& x, const std::vector<double>& t_grid,
                                            const SimConfig& cfg, double tolerance) {
    EstimateCI wx = estimate_w(cone, spec, x, target_config(cfg));
    double g = gamma_v(spec);
    auto rep = exit_experiment_impl(spec.alpha, spec.kappa, g * wx.estimate, g * wx.se, t_grid,
                                    cfg, tolerance, 0x636f6e65ull,
                                    [&](double t) { return simulate_paths(cone, x, t, cfg); });
    return rep;
}

LimitExperimentReport exit_limit_experiment(const MulticoneDomain& domain,
                                            const std::vector<SpectralData>& spectra, const Vec& x,
                                            const std::vector<double>& t_grid,
                                            const SimConfig& cfg, double tolerance) {
    MaximalSet m = maximal_indices(spectra);
    SimConfig tc = target_config(cfg);
    double target = 0.0, var = 0.0;
    for (int l : m.indices) {
        double g = gamma_v(spectra[static_cast<std::size_t>(l)]);
        EstimateCI ul = estimate_u(domain, spectra, l, x, tc);
        tc.seed ^= 0x55ull;
        target += g * ul.estimate;
        var += g * g * ul.se * ul.se;
    }
    double kappa = 1.0 + m.alpha - 0.5 * domain.dim;
    return exit_experiment_impl(m.alpha, kappa, target, std::sqrt(var), t_grid, cfg, tolerance,
                                domain_hash(domain),
                                [&](double t) { return simulate_paths(domain, x, t, cfg); });
}

YaglomReport yaglom_experiment(const MulticoneDomain& domain,
                               const std::vector<SpectralData>& spectra, const Vec& x, double t,
                               const SimConfig& cfg) {
    if (spectra.size() != domain.branches.size())
        throw Error("yaglom_experiment: one SpectralData per branch required");
    MaximalSet m = maximal_indices(spectra);

    YaglomReport rep;
    rep.t = t;
    rep.domain_id = domain_hash(domain);
    rep.seed = cfg.seed;

    PathEnsemble ens = simulate_paths(domain, x, t, cfg);
    rep.paths = ens.n_paths;
    rep.survivors = ens.n_survived;
    if (ens.n_survived < 10000)
        throw Error("yaglom_experiment: insufficient survivors (" +
                    std::to_string(ens.n_survived) + " < 10^4)");

    // branch-selection targets from the discrete Yaglom law
    std::vector<double> gu(domain.branches.size(), 0.0);
    std::vector<double> gu_se(domain.branches.size(), 0.0);
    double gu_sum = 0.0;
    SimConfig tc = target_config(cfg);
    for (int l : m.indices) {
        EstimateCI ul = estimate_u(domain, spectra, l, x, tc);
        tc.seed ^= 0x55ull;
        double g = gamma_v(spectra[static_cast<std::size_t>(l)]);
        gu[static_cast<std::size_t>(l)] = g * ul.estimate;
        gu_se[static_cast<std::size_t>(l)] = g * ul.se;
        gu_sum += gu[static_cast<std::size_t>(l)];
    }

    const double sqrt_t = std::sqrt(t);
    bool pass = true;
    std::ostringstream verdict;
    for (std::size_t j = 0; j < domain.branches.size(); ++j) {
        BranchYaglom bj;
        bj.branch = static_cast<int>(j);
        bj.maximal = std::find(m.indices.begin(), m.indices.end(), static_cast<int>(j)) !=
                     m.indices.end();
        bj.target = gu_sum > 0.0 ? gu[j] / gu_sum : 0.0;
        bj.target_se = gu_sum > 0.0 ? gu_se[j] / gu_sum : 0.0;

        std::vector<double> radial_cdf, angular_cdf;
        const auto& cone = domain.branches[j];
        for (std::size_t s = 0; s < ens.endpoints.size(); ++s) {
            if (ens.endpoint_branch[s] != static_cast<std::int32_t>(j)) continue;
            ++bj.count;
            Vec rel = ens.endpoints[s] - cone.vertex;
            double rho = rel.norm() / sqrt_t;
            radial_cdf.push_back(yaglom_radial_cdf(spectra[j], rho));
            double u = spectra[j].opening.coordinate(rel * (1.0 / rel.norm()));
            angular_cdf.push_back(spectra[j].first_angular_cdf(std::min(u, spectra[j].width())));
        }
        bj.frequency = static_cast<double>(bj.count) / ens.n_survived;
        bj.freq_se = std::sqrt(std::max(bj.frequency * (1.0 - bj.frequency), 1e-300) /
                               ens.n_survived);
        if (bj.maximal && bj.count > 1) {
            bj.ks_radial = ks_statistic(radial_cdf);
            bj.ks_radial_crit = ks_critical(0.01, radial_cdf.size());
            bj.ks_angular = ks_statistic(angular_cdf);
            bj.ks_angular_crit = ks_critical(0.01, angular_cdf.size());
            if (bj.ks_radial > bj.ks_radial_crit || bj.ks_angular > bj.ks_angular_crit) {
                pass = false;
                verdict << "branch " << j << ": KS exceeded; ";
            }
            if (std::fabs(bj.frequency - bj.target) > 3.0 * (bj.freq_se + bj.target_se) + 0.005) {
                pass = false;
                verdict << "branch " << j << ": frequency off target; ";
            }
        } else if (!bj.maximal) {
            if (bj.frequency > 2.0 * 3.0 * bj.freq_se) {
                pass = false;
                verdict << "branch " << j << ": non-maximal frequency too large; ";
            }
        }
        rep.branches.push_back(bj);
    }
    rep.pass = pass;
    rep.verdict = pass ? "PASS" : "FAIL: " + verdict.str();
    return rep;
}

void write_report_csv(const LimitExperimentReport& r, std::ostream& os) {
    os << "t,raw,renormalized,se,target,deviation\n";
    for (const auto& row : r.rows) {
        os.precision(12);
        os << row.t << ',' << row.raw << ',' << row.renormalized << ',' << row.se << ','
           << r.target << ',' << row.deviation << '\n';
    }
}

void write_report_json(const LimitExperimentReport& r, std::ostream& os) {
    os.precision(12);
    os << "{\"kind\":\"" << r.kind << "\",\"target\":" << r.target
       << ",\"target_se\":" << r.target_se << ",\"tolerance\":" << r.tolerance
       << ",\"alpha\":" << r.alpha << ",\"kappa\":" << r.kappa
       << ",\"fitted_exponent\":" << r.fitted_exponent << ",\"pass\":" << (r.pass ? "true" : "false")
       << ",\"verdict\":\"" << r.verdict << "\",\"domain\":\"" << hash_hex(r.domain_id)
       << "\",\"seed\":" << r.seed << "}\n";
}

void write_yaglom_csv(const YaglomReport& r, std::ostream& os) {
    os << "branch,maximal,count,frequency,target,freq_se,ks_radial,ks_radial_crit,ks_angular,"
          "ks_angular_crit\n";
    os.precision(12);
    for (const auto& b : r.branches)
        os << b.branch << ',' << (b.maximal ? 1 : 0) << ',' << b.count << ',' << b.frequency
           << ',' << b.target << ',' << b.freq_se << ',' << b.ks_radial << ',' << b.ks_radial_crit
           << ',' << b.ks_angular << ',' << b.ks_angular_crit << '\n';
}

void write_yaglom_json(const YaglomReport& r, std::ostream& os) {
    os.precision(12);
    os << "{\"t\":" << r.t << ",\"paths\":" << r.paths << ",\"survivors\":" << r.survivors
       << ",\"pass\":" << (r.pass ? "true" : "false") << ",\"verdict\":\"" << r.verdict
       << "\",\"domain\":\"" << hash_hex(r.domain_id) << "\",\"seed\":" << r.seed << "}\n";
}

} // namespace heatlab
