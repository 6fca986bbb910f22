#pragma once

#include <iosfwd>

#include "heatlab/cone.hpp"
#include "heatlab/mc.hpp"

namespace heatlab {

struct MaximalSet {
    std::vector<int> indices; // branches whose character equals the minimum
    double alpha = 0.0;       // character of the domain
};

// alpha = min_j alpha_j; ties within 1e-10 are all maximal.
MaximalSet maximal_indices(const std::vector<SpectralData>& spectra);

struct GridRow {
    double t = 0.0;
    double raw = 0.0;          // p-hat or P-hat
    double renormalized = 0.0; // t^{1+alpha} p-hat or t^{kappa/2} P-hat
    double se = 0.0;           // standard error of the renormalized value
    double deviation = 0.0;    // |renormalized/target - 1|
};

struct LimitExperimentReport {
    std::string kind;
    std::vector<GridRow> rows;
    double target = 0.0;
    double target_se = 0.0; // MC uncertainty of the target itself
    double tolerance = 0.1;
    bool pass = false;
    std::string verdict;
    double alpha = 0.0, kappa = 0.0;
    double fitted_exponent = 0.0; // log-log slope of raw estimates vs t
    std::uint64_t domain_id = 0;
    std::uint64_t seed = 0;
};

// t^{1+alpha} p(t,x,y) against the Martin-product target. The truncated-cone
// overloads drive the single-cone limit (target w(x)w(y)/2^alpha Gamma);
// the multicone overloads use u-estimates over the maximal branches.
LimitExperimentReport kernel_limit_experiment(const TruncatedCone& cone,
                                              const SpectralData& spec, const Vec& x,
                                              const Vec& y, const std::vector<double>& t_grid,
                                              const SimConfig& cfg, double tolerance);
LimitExperimentReport kernel_limit_experiment(const MulticoneDomain& domain,
                                              const std::vector<SpectralData>& spectra,
                                              const Vec& x, const Vec& y,
                                              const std::vector<double>& t_grid,
                                              const SimConfig& cfg, double tolerance);

// t^{kappa/2} P_x(T > t) against gamma-weighted u (or w) targets.
LimitExperimentReport exit_limit_experiment(const TruncatedCone& cone, const SpectralData& spec,
                                            const Vec& x, const std::vector<double>& t_grid,
                                            const SimConfig& cfg, double tolerance);
LimitExperimentReport exit_limit_experiment(const MulticoneDomain& domain,
                                            const std::vector<SpectralData>& spectra,
                                            const Vec& x, const std::vector<double>& t_grid,
                                            const SimConfig& cfg, double tolerance);

struct BranchYaglom {
    int branch = -1;
    bool maximal = false;
    std::int64_t count = 0;
    double frequency = 0.0;
    double target = 0.0;    // gamma_j u_j(x) / sum over maximal
    double target_se = 0.0; // propagated from the u estimates
    double freq_se = 0.0;   // binomial
    double ks_radial = 0.0, ks_radial_crit = 0.0;
    double ks_angular = 0.0, ks_angular_crit = 0.0;
};

struct YaglomReport {
    double t = 0.0;
    std::int64_t paths = 0, survivors = 0;
    std::vector<BranchYaglom> branches;
    bool pass = false;
    std::string verdict;
    std::uint64_t domain_id = 0;
    std::uint64_t seed = 0;
};

// Conditions the ensemble on survival: branch-selection frequencies vs the
// discrete Yaglom law, and per-maximal-branch KS tests of the rescaled
// radial marginal and the m^1-weighted angular marginal (1% level).
YaglomReport yaglom_experiment(const MulticoneDomain& domain,
                               const std::vector<SpectralData>& spectra, const Vec& x, double t,
                               const SimConfig& cfg);

// geometric t-grid helper: {start, start*factor, ...} with `count` entries
std::vector<double> geometric_grid(double start, double factor, int count);

void write_report_csv(const LimitExperimentReport& report, std::ostream& os);
void write_report_json(const LimitExperimentReport& report, std::ostream& os);
void write_yaglom_csv(const YaglomReport& report, std::ostream& os);
void write_yaglom_json(const YaglomReport& report, std::ostream& os);

} // namespace heatlab
