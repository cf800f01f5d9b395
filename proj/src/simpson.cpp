#include "holofib/simpson.hpp"

#include <Eigen/LU>

namespace holofib {

std::vector<std::pair<int, int>> FiberFrame::standard_pairing(int m) {
    std::vector<std::pair<int, int>> xy(m);
    for (int j = 0; j < m; ++j) xy[j] = {j, m + j};
    return xy;
}

double FiberFrame::structure_defect() const {
    const int d = real_dim();
    RMat id = RMat::Identity(d, d);
    double r = 0;
    r = std::max(r, (JA * JA + id).cwiseAbs().maxCoeff());
    r = std::max(r, (JB * JB + id).cwiseAbs().maxCoeff());
    r = std::max(r, (JC * JC + id).cwiseAbs().maxCoeff());
    r = std::max(r, (JA * JB - JC).cwiseAbs().maxCoeff());
    r = std::max(r, (JA.transpose() * g * JA - g).cwiseAbs().maxCoeff());
    r = std::max(r, (JB.transpose() * g * JB - g).cwiseAbs().maxCoeff());
    r = std::max(r, (JC.transpose() * g * JC - g).cwiseAbs().maxCoeff());
    return r;
}

CVec apply_real(const RMat& M, const CVec& w) {
    return CVec(M * w.real() + kI * (M * w.imag()));
}

CVec project_10(const RMat& J, const CVec& w) {
    return 0.5 * (w - kI * apply_real(J, w));
}

CVec complex_parts_to_real(const FiberFrame& fr, const CVec& hol, const CVec& antihol) {
    const int m = fr.complex_dim();
    if (hol.size() != m || antihol.size() != m)
        throw DimensionMismatch("complex_parts_to_real: component size mismatch");
    CVec w = CVec::Zero(fr.real_dim());
    for (int j = 0; j < m; ++j) {
        auto [ix, iy] = fr.xy[j];
        w(ix) = 0.5 * (hol(j) + antihol(j));
        w(iy) = 0.5 * kI * (antihol(j) - hol(j));
    }
    return w;
}

std::pair<CVec, CVec> real_to_complex_parts(const FiberFrame& fr, const CVec& w) {
    const int m = fr.complex_dim();
    CVec hol(m), antihol(m);
    for (int j = 0; j < m; ++j) {
        auto [ix, iy] = fr.xy[j];
        hol(j) = w(ix) + kI * w(iy);
        antihol(j) = w(ix) - kI * w(iy);
    }
    return {hol, antihol};
}

double frame_operator_norm(const FiberFrame& fr, const RMat& T) {
    Eigen::FullPivLU<RMat> lu(fr.g);
    if (!lu.isInvertible()) throw SingularMetric("frame_operator_norm: metric is singular");
    RMat adj = lu.solve(T.transpose() * fr.g);
    double tr = (adj * T).trace();
    return std::sqrt(std::max(0.0, tr / double(fr.real_dim())));
}

RMat TwistingMap::inverse() const {
    Eigen::FullPivLU<RMat> lu(beta);
    if (!lu.isInvertible()) throw SingularMetric("TwistingMap: beta is not invertible");
    return lu.inverse();
}

double TwistingMap::intertwine_defect(const FiberFrame& fr) const {
    (void)inverse();
    return (beta * fr.JA - fr.JB * beta).cwiseAbs().maxCoeff();
}

TwistingMap twist_parametrization(const FiberFrame& fr, double angle) {
    const int d = fr.real_dim();
    RMat id = RMat::Identity(d, d);
    RMat b = (std::cos(angle) * (id + fr.JC) + std::sin(angle) * (fr.JA + fr.JB)) / std::sqrt(2.0);
    return TwistingMap{b};
}

CVec theta_bar_J(const FiberFrame& fr, const CVec& theta_w) {
    if (theta_w.size() != fr.real_dim())
        throw DimensionMismatch("theta_bar_J: vector does not match frame dimension");
    CVec u = kI * apply_real(fr.JA, theta_w.conjugate());
    return project_10(fr.JB, u);
}

namespace {

void check_same_shape(const CMat& a, const CMat& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionMismatch(std::string(what) + ": coefficient shape mismatch");
}

} // namespace

HiggsSideValue simpson_flat_to_higgs(const CMat& partial_flat, const CMat& partial_chern,
                                     const ConjRule& conj_rule, const CMat& dbar_flat) {
    check_same_shape(partial_flat, partial_chern, "simpson_flat_to_higgs");
    check_same_shape(partial_flat, dbar_flat, "simpson_flat_to_higgs");
    CMat theta = 0.5 * (partial_flat - partial_chern);
    CMat theta_bar = conj_rule(theta);
    check_same_shape(theta, theta_bar, "simpson_flat_to_higgs(conj_rule)");
    return {theta, CMat(dbar_flat - theta_bar)};
}

FlatSideValue simpson_higgs_to_flat(const CMat& dbar_higgs, const CMat& theta,
                                    const CMat& partial_chern, const ConjRule& conj_rule) {
    check_same_shape(dbar_higgs, theta, "simpson_higgs_to_flat");
    check_same_shape(dbar_higgs, partial_chern, "simpson_higgs_to_flat");
    CMat theta_bar = conj_rule(theta);
    check_same_shape(theta, theta_bar, "simpson_higgs_to_flat(conj_rule)");
    return {CMat(dbar_higgs + theta_bar), CMat(partial_chern + 2.0 * theta)};
}

namespace {

struct TwistContext {
    RMat beta_inv;
    double norm;

    TwistContext(const FiberFrame& fr, const TwistingMap& beta) : beta_inv(beta.inverse()) {
        norm = frame_operator_norm(fr, RMat(fr.JA - fr.JB));
        if (norm < 1e-8)
            throw DegenerateTwist(
                "twisted mechanism: |J_A - J_B|_g below 1e-8, structures coincide at the point");
    }
};

void check_family(const FiberFrame& fr, const std::vector<CVec>& vs, const char* what) {
    for (const CVec& v : vs)
        if (v.size() != fr.real_dim())
            throw DimensionMismatch(std::string(what) + ": vertical vector size mismatch");
}

} // namespace

TwistedConnectionValue twisted_higgs_to_connection(
    const FiberFrame& fr, const TwistingMap& beta, const std::vector<CVec>& dbar_B,
    const std::vector<CVec>& dbar_B0, const std::vector<CVec>& dbar_A0,
    const std::vector<CVec>& theta, const std::vector<CVec>& chern_A) {
    const std::size_t n = theta.size();
    if (dbar_B.size() != n || dbar_B0.size() != n || dbar_A0.size() != n || chern_A.size() != n)
        throw DimensionMismatch("twisted_higgs_to_connection: direction count mismatch");
    check_family(fr, dbar_B, "twisted_higgs_to_connection");
    check_family(fr, theta, "twisted_higgs_to_connection");
    TwistContext ctx(fr, beta);

    TwistedConnectionValue out;
    out.dbar_A.reserve(n);
    out.partial_A.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        CVec tb = theta_bar_J(fr, theta[i]);
        out.dbar_A.push_back(apply_real(ctx.beta_inv, CVec(dbar_B[i] - dbar_B0[i] + tb)) +
                             dbar_A0[i]);
        out.partial_A.push_back(chern_A[i] +
                                2.0 * ctx.norm * apply_real(ctx.beta_inv, theta[i]));
    }
    return out;
}

TwistedHiggsValue twisted_connection_to_higgs(
    const FiberFrame& fr, const TwistingMap& beta, const std::vector<CVec>& dbar_A,
    const std::vector<CVec>& dbar_A0, const std::vector<CVec>& dbar_B0,
    const std::vector<CVec>& partial_A, const std::vector<CVec>& chern_A) {
    const std::size_t n = partial_A.size();
    if (dbar_A.size() != n || dbar_A0.size() != n || dbar_B0.size() != n || chern_A.size() != n)
        throw DimensionMismatch("twisted_connection_to_higgs: direction count mismatch");
    check_family(fr, dbar_A, "twisted_connection_to_higgs");
    check_family(fr, partial_A, "twisted_connection_to_higgs");
    TwistContext ctx(fr, beta);

    TwistedHiggsValue out;
    out.theta.reserve(n);
    out.dbar_B.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        CVec th = 0.5 / ctx.norm * apply_real(beta.beta, CVec(partial_A[i] - chern_A[i]));
        out.theta.push_back(th);
        CVec tb = theta_bar_J(fr, th);
        out.dbar_B.push_back(apply_real(beta.beta, CVec(dbar_A[i] - dbar_A0[i])) + dbar_B0[i] -
                             tb);
    }
    return out;
}

FiberMetricSpec FiberMetricSpec::from_potential(AdaptedChart c, ChartFunction phi) {
    if (phi.base_dim() != c.n || phi.fiber_dim() != c.m || phi.rows() != 1 || phi.cols() != 1)
        throw DimensionMismatch("FiberMetricSpec: potential must be scalar on the chart");
    FiberMetricSpec spec{c, std::nullopt, std::nullopt, std::move(phi)};
    return spec;
}

FiberMetricSpec FiberMetricSpec::from_blocks(AdaptedChart c, ChartFunction g,
                                             ChartFunction g_mixed) {
    if (g.rows() != c.m || g.cols() != c.m)
        throw DimensionMismatch("FiberMetricSpec: fiber block must be m x m");
    if (g_mixed.rows() != c.m || g_mixed.cols() != c.n)
        throw DimensionMismatch("FiberMetricSpec: mixed block must be m x n");
    FiberMetricSpec spec{c, std::move(g), std::move(g_mixed), std::nullopt};
    return spec;
}

namespace {

CMat metric_fiber_block(const FiberMetricSpec& metric, const CVec& base, const CVec& fiber) {
    const int m = metric.chart.m;
    if (metric.g) return metric.g->eval(base, fiber);
    CMat g(m, m);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            g(a, b) = wirtinger_second_derivative(*metric.potential, base, fiber,
                                                  {Side::Fiber, a, Kind::Hol},
                                                  {Side::Fiber, b, Kind::Antihol})(0, 0);
    return g;
}

CVec metric_mixed_column(const FiberMetricSpec& metric, const CVec& base, const CVec& fiber,
                         int i) {
    const int m = metric.chart.m;
    if (metric.g_mixed) return metric.g_mixed->eval(base, fiber).col(i);
    CVec col(m);
    for (int b = 0; b < m; ++b)
        col(b) = wirtinger_second_derivative(*metric.potential, base, fiber,
                                             {Side::Base, i, Kind::Hol},
                                             {Side::Fiber, b, Kind::Antihol})(0, 0);
    return col;
}

// LU of the transposed fiber block: Gamma solves G^T x = -mixed.
Eigen::FullPivLU<CMat> metric_lu_transposed(const FiberMetricSpec& metric, const CVec& base,
                                            const CVec& fiber) {
    CMat g = metric_fiber_block(metric, base, fiber);
    CMat herm = 0.5 * (g + CMat(g.adjoint())); // symmetrize away FD noise
    Eigen::SelfAdjointEigenSolver<CMat> es(herm);
    if (es.eigenvalues().minCoeff() <= 1e-12 * std::max(1.0, max_abs(herm)))
        throw SingularMetric("connection_from_relative_kahler: fiber metric not positive definite");
    return Eigen::FullPivLU<CMat>(CMat(herm.transpose()));
}

} // namespace

CMat connection_from_relative_kahler(const FiberMetricSpec& metric, const CVec& base,
                                     const CVec& fiber) {
    const int n = metric.chart.n, m = metric.chart.m;
    if (!metric.potential && !(metric.g && metric.g_mixed))
        throw DimensionMismatch("connection_from_relative_kahler: metric data incomplete");
    auto lu = metric_lu_transposed(metric, base, fiber);
    CMat gamma(m, n);
    for (int i = 0; i < n; ++i) {
        CVec mixed = metric_mixed_column(metric, base, fiber, i);
        // Gamma_i^alpha = -g^{betabar alpha} g_{i betabar}
        gamma.col(i) = -lu.solve(mixed);
    }
    return gamma;
}

CVec connection_from_relative_kahler(const FiberMetricSpec& metric, const CVec& base,
                                     const CVec& fiber, int direction) {
    if (direction < 0 || direction >= metric.chart.n)
        throw IndexOutOfRange("connection_from_relative_kahler: direction out of range");
    if (!metric.potential && !(metric.g && metric.g_mixed))
        throw DimensionMismatch("connection_from_relative_kahler: metric data incomplete");
    auto lu = metric_lu_transposed(metric, base, fiber);
    CVec mixed = metric_mixed_column(metric, base, fiber, direction);
    return CVec(-lu.solve(mixed));
}

double hypercomplex_conjugate_check(const FiberFrame& fr, const CVec& v_w,
                                    const ChartFunction& f_v, const CVec& base,
                                    const CVec& fiber) {
    if (v_w.size() != fr.real_dim())
        throw DimensionMismatch("hypercomplex_conjugate_check: vector size mismatch");
    if (f_v.rows() != 1 || f_v.cols() != 1)
        throw DimensionMismatch("hypercomplex_conjugate_check: f_v must be scalar");

    // Route (a): i J_A applied to the conjugate vector.
    CVec route_a = kI * apply_real(fr.JA, v_w.conjugate());

    // Route (b): Hamiltonian field of -1/2 conj(f_v) for omega_B = g(J_B ., .).
    // d(conj f) over the real coordinates via Wirtinger derivatives.
    const int m = fr.complex_dim();
    CVec dconj(fr.real_dim());
    dconj.setZero();
    for (int j = 0; j < m; ++j) {
        Complex dz = wirtinger_derivative(f_v, base, fiber, {Side::Fiber, j, Kind::Hol})(0, 0);
        Complex dzb =
            wirtinger_derivative(f_v, base, fiber, {Side::Fiber, j, Kind::Antihol})(0, 0);
        // for F = conj(f): dF/dz = conj(df/dzbar), dF/dzbar = conj(df/dz)
        Complex Fz = std::conj(dzb), Fzb = std::conj(dz);
        auto [ix, iy] = fr.xy[j];
        dconj(ix) = Fz + Fzb;
        dconj(iy) = kI * (Fz - Fzb);
    }
    // omega_B(u, w) = g(J_B u, w) = u^T W w with W = J_B^T g; solve W^T vt = rhs.
    RMat W = fr.JB.transpose() * fr.g;
    Eigen::FullPivLU<RMat> lu(RMat(W.transpose()));
    if (!lu.isInvertible())
        throw SingularMetric("hypercomplex_conjugate_check: omega_B degenerate");
    CVec rhs = -0.5 * dconj;
    CVec route_b = lu.solve(rhs.real()).cast<Complex>() + kI * lu.solve(rhs.imag()).cast<Complex>();

    return max_abs(CVec(route_a - route_b));
}

} // namespace holofib
