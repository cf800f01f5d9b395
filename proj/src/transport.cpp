#include "holofib/transport.hpp"

#include <algorithm>
#include <cmath>

namespace holofib {

CVec BasePath::pos(double t) const { return position(t); }

CVec BasePath::vel(double t) const {
    if (velocity) return velocity(t);
    const double h = 1e-5;
    CVec p1 = position(t + h), m1 = position(t - h);
    CVec p2 = position(t + 2 * h), m2 = position(t - 2 * h);
    return (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h);
}

BasePath BasePath::line(const CVec& a, const CVec& b) {
    if (a.size() != b.size()) throw DimensionMismatch("BasePath::line: endpoint size mismatch");
    BasePath p;
    p.n = int(a.size());
    p.position = [a, b](double t) { return CVec(a + t * (b - a)); };
    p.velocity = [a, b](double) { return CVec(b - a); };
    return p;
}

BasePath BasePath::loop(const CVec& center, const CVec& dir, double radius, int turns) {
    if (center.size() != dir.size())
        throw DimensionMismatch("BasePath::loop: center/direction size mismatch");
    BasePath p;
    p.n = int(center.size());
    const double w = 2.0 * M_PI * turns;
    p.position = [=](double t) {
        Complex ph = radius * std::exp(kI * (w * t));
        return CVec(center + ph * dir);
    };
    p.velocity = [=](double t) {
        Complex ph = radius * kI * w * std::exp(kI * (w * t));
        return CVec(ph * dir);
    };
    return p;
}

BasePath BasePath::concat(const BasePath& a, const BasePath& b) {
    if (a.n != b.n) throw DimensionMismatch("BasePath::concat: dimension mismatch");
    BasePath p;
    p.n = a.n;
    p.position = [a, b](double t) { return t <= 0.5 ? a.pos(2 * t) : b.pos(2 * t - 1); };
    p.velocity = [a, b](double t) {
        return CVec(2.0 * (t <= 0.5 ? a.vel(2 * t) : b.vel(2 * t - 1)));
    };
    p.breakpoints.reserve(a.breakpoints.size() + b.breakpoints.size() + 1);
    for (double s : a.breakpoints) p.breakpoints.push_back(s / 2);
    p.breakpoints.push_back(0.5);
    for (double s : b.breakpoints) p.breakpoints.push_back(0.5 + s / 2);
    return p;
}

BasePath BasePath::reparametrized(const BasePath& a) {
    BasePath p = a;
    auto tau = [](double t) { return t * t * (3 - 2 * t); };
    auto dtau = [](double t) { return 6 * t * (1 - t); };
    p.position = [a, tau](double t) { return a.pos(tau(t)); };
    p.velocity = [a, tau, dtau](double t) { return CVec(dtau(t) * a.vel(tau(t))); };
    std::vector<double> bps;
    for (double s : a.breakpoints) bps.push_back(s); // image knots unchanged in [0,1]
    p.breakpoints = bps;
    return p;
}

namespace {

struct Integrator {
    const Connection10Spec& conn;
    const BasePath& path;

    CVec rhs(double t, const CVec& z) const {
        CVec s = path.pos(t);
        CVec v = path.vel(t);
        CMat gh = conn.gamma_hol.eval(s, z);
        CMat ga = conn.gamma_antihol.eval(s, z);
        return CVec(gh * v + (ga * v).conjugate());
    }

    CVec rk4_step(double t, const CVec& z, double h) const {
        CVec k1 = rhs(t, z);
        CVec k2 = rhs(t + h / 2, z + (h / 2) * k1);
        CVec k3 = rhs(t + h / 2, z + (h / 2) * k2);
        CVec k4 = rhs(t + h, z + h * k3);
        return z + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
    }
};

bool crossed(const CVec& z, double threshold) {
    return !all_finite(z) || max_abs(z) >= threshold;
}

struct Crossing {
    double t_lo;   // last time with a finite below-threshold state
    CVec z_lo;     // state there
    double t_hi;   // first time known past the threshold
};

// Advances z over [t, t+h]. A fixed step cannot resolve a pole (it lands on a
// large but finite value on the far side), so when one step moves z by more
// than 2% of its magnitude the interval is re-integrated with two half steps;
// near a genuine blow-up this follows the solution up through the threshold.
// The factor must be small: relative error in z near a pole is amplified by
// the remaining growth factor, and a percent-level lag entering the last
// refined interval displaces the apparent pole past the path end.
constexpr double kGrowthGuard = 0.02;

bool advance(const Integrator& I, double t, double h, CVec& z, double threshold, int depth,
             Crossing& cross) {
    CVec z_new = I.rk4_step(t, z, h);
    if (crossed(z_new, threshold)) {
        cross = {t, z, t + h};
        return true;
    }
    if (depth < 70 && h > 1e-14 &&
        max_abs(CVec(z_new - z)) > kGrowthGuard * std::max(1.0, max_abs(z))) {
        if (advance(I, t, h / 2, z, threshold, depth + 1, cross)) return true;
        if (advance(I, t + h / 2, h / 2, z, threshold, depth + 1, cross)) return true;
        return false;
    }
    z = std::move(z_new);
    return false;
}

// Bisection for the threshold crossing inside [t0, t0+h], starting from a
// finite state z0 at t0.
double refine_blowup(const Integrator& I, double t0, CVec z0, double h, double threshold) {
    double lo = t0, hi = t0 + h;
    CVec z_lo = std::move(z0);
    for (int iter = 0; iter < 60 && (hi - lo) > 1e-9; ++iter) {
        double mid = 0.5 * (lo + hi);
        // a few substeps for accuracy over the half interval
        CVec z = z_lo;
        double t = lo;
        double sub = (mid - lo) / 4;
        bool hit = false;
        for (int k = 0; k < 4; ++k) {
            z = I.rk4_step(t, z, sub);
            t += sub;
            if (crossed(z, threshold)) {
                hit = true;
                break;
            }
        }
        if (hit) {
            hi = mid;
        } else {
            lo = mid;
            z_lo = z;
        }
    }
    return 0.5 * (lo + hi);
}

TransportResult integrate(const Connection10Spec& conn, const BasePath& path, const CVec& z0,
                          const TransportOptions& opt, bool record_trajectory) {
    if (opt.step <= 0) throw DimensionMismatch("horizontal_lift: step must be positive");
    if (z0.size() != conn.chart.m)
        throw DimensionMismatch("horizontal_lift: fiber point dimension mismatch");
    if (!all_finite(z0)) throw NonFiniteEvaluation("horizontal_lift: non-finite start value");

    Integrator I{conn, path};
    TransportResult res;
    res.endpoint = z0;

    // segment boundaries: 0, breakpoints, 1
    std::vector<double> knots{0.0};
    for (double b : path.breakpoints)
        if (b > 0.0 && b < 1.0) knots.push_back(b);
    knots.push_back(1.0);
    std::sort(knots.begin(), knots.end());

    std::size_t total_steps = 0;
    for (std::size_t seg = 0; seg + 1 < knots.size(); ++seg) {
        double a = knots[seg], b = knots[seg + 1];
        std::size_t nsteps = std::size_t(std::ceil((b - a) / opt.step));
        nsteps = std::max<std::size_t>(nsteps, 1);
        double h = (b - a) / double(nsteps);
        std::size_t stride =
            std::max<std::size_t>(1, nsteps / std::max<std::size_t>(1, opt.max_trajectory_samples));
        for (std::size_t k = 0; k < nsteps; ++k) {
            if (++total_steps > opt.max_steps) {
                res.status = TransportStatus::StepLimitReached;
                return res;
            }
            double t = a + double(k) * h;
            Crossing cross{t, res.endpoint, t + h};
            if (advance(I, t, h, res.endpoint, opt.blowup_threshold, 0, cross)) {
                res.status = TransportStatus::BlewUp;
                res.blowup_time = refine_blowup(I, cross.t_lo, cross.z_lo,
                                                cross.t_hi - cross.t_lo, opt.blowup_threshold);
                return res;
            }
            if (record_trajectory && (k % stride == 0 || k + 1 == nsteps))
                res.trajectory.emplace_back(t + h, res.endpoint);
        }
    }
    res.status = TransportStatus::Completed;
    return res;
}

} // namespace

TransportResult horizontal_lift(const Connection10Spec& conn, const BasePath& path,
                                const CVec& z0, TransportOptions opt) {
    TransportResult res = integrate(conn, path, z0, opt, true);
    res.trajectory.insert(res.trajectory.begin(), {0.0, z0});
    if (res.status == TransportStatus::Completed && opt.estimate_error) {
        TransportOptions half = opt;
        half.step = opt.step / 2;
        half.estimate_error = false;
        TransportResult fine = integrate(conn, path, z0, half, false);
        if (fine.status == TransportStatus::Completed)
            res.error_estimate = max_abs(CVec(res.endpoint - fine.endpoint)) / 15.0;
    }
    return res;
}

CompletenessReport completeness_probe(const Connection10Spec& conn, const BasePath& path,
                                      const CVec& z0, double threshold, TransportOptions opt) {
    opt.blowup_threshold = threshold;
    TransportResult res = integrate(conn, path, z0, opt, false);
    return {res.status, res.blowup_time};
}

TransportJacobian transport_jacobian(const Connection10Spec& conn, const BasePath& path,
                                     const CVec& z0, TransportOptions opt) {
    const int m = conn.chart.m;
    auto endpoint = [&](const CVec& start) {
        TransportResult r = integrate(conn, path, start, opt, false);
        if (r.status != TransportStatus::Completed)
            throw IncompleteTransport("transport_jacobian: a perturbed transport did not complete");
        return r.endpoint;
    };
    TransportJacobian jac{CMat(m, m), CMat(m, m)};
    for (int b = 0; b < m; ++b) {
        const double d = fd_step(std::abs(z0(b)));
        auto along = [&](Complex dir) {
            CVec e = CVec::Zero(m);
            e(b) = 1.0;
            CVec p1 = endpoint(z0 + d * dir * e), m1 = endpoint(z0 - d * dir * e);
            CVec p2 = endpoint(z0 + 2 * d * dir * e), m2 = endpoint(z0 - 2 * d * dir * e);
            return CVec((-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * d));
        };
        CVec dx = along(Complex(1, 0));
        CVec dy = along(kI);
        jac.hol.col(b) = 0.5 * (dx - kI * dy);
        jac.antihol.col(b) = 0.5 * (dx + kI * dy);
    }
    return jac;
}

double path_independence_check(const Connection10Spec& conn, const BasePath& path_a,
                               const BasePath& path_b, const CVec& z0, TransportOptions opt) {
    TransportResult ra = integrate(conn, path_a, z0, opt, false);
    TransportResult rb = integrate(conn, path_b, z0, opt, false);
    if (ra.status != TransportStatus::Completed || rb.status != TransportStatus::Completed)
        throw IncompleteTransport("path_independence_check: a transport did not complete");
    return max_abs(CVec(ra.endpoint - rb.endpoint));
}

std::vector<CVec> monodromy(const Connection10Spec& conn, const BasePath& loop,
                            const std::vector<CVec>& fiber_samples, TransportOptions opt) {
    std::vector<CVec> out;
    out.reserve(fiber_samples.size());
    for (const CVec& z0 : fiber_samples) {
        TransportResult r = integrate(conn, loop, z0, opt, false);
        if (r.status != TransportStatus::Completed)
            throw IncompleteTransport("monodromy: transport did not complete for a sample");
        out.push_back(r.endpoint);
    }
    return out;
}

} // namespace holofib
