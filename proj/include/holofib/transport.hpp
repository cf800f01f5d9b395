#pragma once

#include <vector>

#include "holofib/bundle.hpp"

namespace holofib {

/// Parametric base path t in [0,1] -> s(t), with velocity (finite differences
/// when no analytic derivative is supplied). Interior breakpoints mark corners
/// of piecewise-smooth paths; integration grids are split there.
struct BasePath {
    int n;
    std::function<CVec(double)> position;
    std::function<CVec(double)> velocity; // optional
    std::vector<double> breakpoints;      // strictly inside (0,1), sorted

    CVec pos(double t) const;
    CVec vel(double t) const;

    static BasePath line(const CVec& a, const CVec& b);
    /// s(t) = center + radius * exp(2 pi i turns t) * dir.
    static BasePath loop(const CVec& center, const CVec& dir, double radius, int turns = 1);
    /// a followed by b (b must start where a ends for a continuous path).
    static BasePath concat(const BasePath& a, const BasePath& b);
    /// Same image path under a smooth increasing time change t -> t^2(3-2t).
    static BasePath reparametrized(const BasePath& a);
};

enum class TransportStatus { Completed, BlewUp, StepLimitReached };

struct TransportOptions {
    double step = 1e-3;
    double blowup_threshold = 1e8;
    bool estimate_error = false; // Richardson half-step comparison
    std::size_t max_steps = 20'000'000;
    std::size_t max_trajectory_samples = 1024;
};

struct TransportResult {
    TransportStatus status = TransportStatus::Completed;
    CVec endpoint;                                    // last finite state
    std::vector<std::pair<double, CVec>> trajectory;  // sampled (t, z)
    double blowup_time = std::numeric_limits<double>::quiet_NaN();
    double error_estimate = std::numeric_limits<double>::quiet_NaN();
};

/// RK4 integration of dz/dt = Gamma_i v^i + conj(Gamma_i^{bar}) conj(v^i)
/// along the path; BlewUp reported in the status (never thrown).
TransportResult horizontal_lift(const Connection10Spec& conn, const BasePath& path,
                                const CVec& z0, TransportOptions opt = {});

struct CompletenessReport {
    TransportStatus status;
    double blowup_time; // NaN unless BlewUp
};

CompletenessReport completeness_probe(const Connection10Spec& conn, const BasePath& path,
                                      const CVec& z0, double threshold,
                                      TransportOptions opt = {});

struct TransportJacobian {
    CMat hol;     // dz(1)/dz0
    CMat antihol; // dz(1)/dz0bar
};

/// Central differences of the endpoint map; throws IncompleteTransport if any
/// perturbed run fails to complete.
TransportJacobian transport_jacobian(const Connection10Spec& conn, const BasePath& path,
                                     const CVec& z0, TransportOptions opt = {});

/// Max-abs endpoint difference for two paths sharing endpoints.
double path_independence_check(const Connection10Spec& conn, const BasePath& path_a,
                               const BasePath& path_b, const CVec& z0,
                               TransportOptions opt = {});

/// Endpoints of the loop transport for each start value.
std::vector<CVec> monodromy(const Connection10Spec& conn, const BasePath& loop,
                            const std::vector<CVec>& fiber_samples, TransportOptions opt = {});

} // namespace holofib
