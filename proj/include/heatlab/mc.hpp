#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "heatlab/geometry.hpp"
#include "heatlab/spectral.hpp"

namespace heatlab {

struct SimConfig {
    double dt = 1e-3;             // base (far-field) time step
    std::int64_t paths = 100000;
    std::uint64_t seed = 1;
    bool bridge = true;           // Brownian-bridge crossing correction
    double bandwidth = 0.0;       // KDE bandwidth; 0 = 0.05 sqrt(t)
    double stop_radius = 0.0;     // rho for estimate_u; 0 = auto
    int workers = 0;              // 0 = hardware concurrency
    bool keep_records = false;    // full per-path records
    double dt_floor = 1e-4;       // adaptive floor as a fraction of dt
    std::int64_t step_budget = 100000000; // per-path cap for open-ended walks
};

struct PathRecord {
    double kill_time = 0.0; // horizon when survived, estimate otherwise
    Vec endpoint;           // survivor endpoint, or position at the kill step
    std::int32_t tag = 0;   // survivor: branch (-1 core); killed: boundary piece
    std::uint8_t survived = 0;
};

// piece ids used in kill tags
constexpr std::int32_t kPieceSphereBase = 100000; // + ball index
constexpr std::int32_t kPieceConeBase = -3;       // cone-domain base sphere

struct PathEnsemble {
    SimConfig cfg;
    Vec start;
    double horizon = 0.0;
    std::uint64_t domain_id = 0;
    std::int64_t n_paths = 0;
    std::int64_t n_survived = 0;
    std::vector<Vec> endpoints;              // survivors, path-index order
    std::vector<std::int32_t> endpoint_branch;
    std::vector<PathRecord> records;         // only when cfg.keep_records
    int dim = 2;
};

struct EstimateCI {
    double estimate = 0.0;
    double se = 0.0;
    std::int64_t n = 0;
    std::string method;
};

// Euler walk with per-step kill: explicit exit, plus bridge crossing with
// probability exp(-2 d1 d2 / dt) from boundary-distance lower bounds.
PathEnsemble simulate_paths(const MulticoneDomain& domain, const Vec& x, double t,
                            const SimConfig& cfg);
// same walk with a bare truncated cone as the whole domain (base kills)
PathEnsemble simulate_paths(const TruncatedCone& cone, const Vec& x, double t,
                            const SimConfig& cfg);

EstimateCI estimate_survival(const PathEnsemble& ens);

// Gaussian-kernel density estimate of the surviving-endpoint density at y;
// estimates p(t, x, y). Requires dist(y, boundary) > 2 h.
EstimateCI estimate_kernel_at(const MulticoneDomain& domain, const PathEnsemble& ens,
                              const Vec& y, double bandwidth);
EstimateCI estimate_kernel_at(const TruncatedCone& cone, const PathEnsemble& ens, const Vec& y,
                              double bandwidth);

// w(x) = v(x) - E_x v(B_{T^C}) by simulation in the truncated cone. Paths
// reaching the far cutoff contribute the separated-solution remainder
// v(X)(R/|X|)^{2 alpha} exactly.
EstimateCI estimate_w(const TruncatedCone& cone, const SpectralData& spec, const Vec& x,
                      const SimConfig& cfg);

// u_j(x) = E_x[ w_j(B_{sigma_rho}) 1{B in branch j, sigma_rho < T} ] where
// sigma_rho is the first exit from the ball of radius rho about the branch
// vertex. spectra[j] must describe branch j's opening.
EstimateCI estimate_u(const MulticoneDomain& domain, const std::vector<SpectralData>& spectra,
                      int branch, const Vec& x, const SimConfig& cfg);

// exp(-2 d1 d2 / dt), clamped to [0,1]
double bridge_crossing_prob(double d1, double d2, double dt);

// P_r(tau^mu in dt)/dt = r/sqrt(2 pi t^3) exp(-(r + mu t)^2 / (2t)):
// hitting time of 0 for Brownian motion with drift mu started at r.
// Total mass over t in (0,inf) is exp(-2 r mu).
double hitting_time_density(double r, double mu, double t);

} // namespace heatlab
