#include "holofib/families.hpp"

#include <Eigen/LU>
#include <cmath>

namespace holofib {

AbelianFamily::AbelianFamily(int k) : k_(k) {
    if (k < 1) throw DimensionMismatch("AbelianFamily: k must be >= 1");
}

int AbelianFamily::flat_index(int i, int j) const {
    if (i < 0 || j < i || j >= k_)
        throw IndexOutOfRange("AbelianFamily: direction pair requires 0 <= i <= j < k");
    return i * k_ - i * (i - 1) / 2 + (j - i);
}

std::pair<int, int> AbelianFamily::index_pair(int flat) const {
    if (flat < 0 || flat >= base_dim())
        throw IndexOutOfRange("AbelianFamily: flat direction index out of range");
    for (int i = 0; i < k_; ++i) {
        int row = k_ - i;
        if (flat < row) return {i, i + flat};
        flat -= row;
    }
    throw IndexOutOfRange("AbelianFamily: unreachable");
}

RMat AbelianFamily::variation(int i, int j) const {
    if (i < 0 || j < i || j >= k_)
        throw IndexOutOfRange("AbelianFamily: variation pair requires 0 <= i <= j < k");
    RMat v = RMat::Zero(k_, k_);
    v(i, j) += 1.0;
    v(j, i) += 1.0;
    return v;
}

AbelianFamily::Vertical AbelianFamily::zero_vertical() const {
    return {CVec::Zero(k_), CVec::Zero(k_), CVec::Zero(k_), CVec::Zero(k_)};
}

CVec AbelianFamily::vertical_to_frame(const Vertical& v) const {
    CVec w = CVec::Zero(4 * k_);
    for (int a = 0; a < k_; ++a) {
        w(a) = 0.5 * (v.dq(a) + v.dqbar(a));
        w(k_ + a) = 0.5 * kI * (v.dqbar(a) - v.dq(a));
        w(2 * k_ + a) = 0.5 * (v.dp(a) + v.dpbar(a));
        w(3 * k_ + a) = 0.5 * kI * (v.dpbar(a) - v.dp(a));
    }
    return w;
}

AbelianFamily::Vertical AbelianFamily::frame_to_vertical(const CVec& w) const {
    if (w.size() != 4 * k_)
        throw DimensionMismatch("AbelianFamily: frame vector must have length 4k");
    Vertical v = zero_vertical();
    for (int a = 0; a < k_; ++a) {
        v.dq(a) = w(a) + kI * w(k_ + a);
        v.dqbar(a) = w(a) - kI * w(k_ + a);
        v.dp(a) = w(2 * k_ + a) + kI * w(3 * k_ + a);
        v.dpbar(a) = w(2 * k_ + a) - kI * w(3 * k_ + a);
    }
    return v;
}

FiberFrame AbelianFamily::hyperkahler_frame(const SiegelPoint& pi) const {
    if (pi.degree() != k_) throw DimensionMismatch("AbelianFamily: degree mismatch");
    const int k = k_;
    RMat P = pi.Pi_y();
    RMat Pinv = pi.Pi_y_inv();
    RMat g = RMat::Zero(4 * k, 4 * k), JA = g, JB = g, JC = g;
    RMat id = RMat::Identity(k, k);

    g.block(0, 0, k, k) = Pinv;
    g.block(k, k, k, k) = Pinv;
    g.block(2 * k, 2 * k, k, k) = P;
    g.block(3 * k, 3 * k, k, k) = P;

    JB.block(k, 0, k, k) = id;        // q_x -> q_y
    JB.block(0, k, k, k) = -id;       // q_y -> -q_x
    JB.block(3 * k, 2 * k, k, k) = id;
    JB.block(2 * k, 3 * k, k, k) = -id;

    JA.block(3 * k, 0, k, k) = -Pinv; // q_x -> -Piy^{-1} p_y
    JA.block(2 * k, k, k, k) = -Pinv; // q_y -> -Piy^{-1} p_x
    JA.block(k, 2 * k, k, k) = P;     // p_x -> Piy q_y
    JA.block(0, 3 * k, k, k) = P;     // p_y -> Piy q_x

    JC.block(2 * k, 0, k, k) = -Pinv; // q_x -> -Piy^{-1} p_x
    JC.block(3 * k, k, k, k) = Pinv;  // q_y -> Piy^{-1} p_y
    JC.block(0, 2 * k, k, k) = P;     // p_x -> Piy q_x
    JC.block(k, 3 * k, k, k) = -P;    // p_y -> -Piy q_y

    FiberFrame fr{g, JA, JB, JC, {}};
    fr.xy.resize(2 * k);
    for (int a = 0; a < k; ++a) fr.xy[a] = {a, k + a};
    for (int a = 0; a < k; ++a) fr.xy[k + a] = {2 * k + a, 3 * k + a};
    return fr;
}

CVec AbelianFamily::flat_xi(const CMat& pi, const CVec& q, const CVec& p) const {
    RMat piy = pi.imag();
    RVec qy = q.imag();
    RVec px = p.real();
    RVec re = piy.lu().solve(qy);
    return re.cast<Complex>() - kI * px.cast<Complex>();
}

CVec AbelianFamily::flat_eta(const CMat& pi, const CVec& q, const CVec& p) const {
    RMat pix = pi.real(), piy = pi.imag();
    RVec qx = q.real(), qy = q.imag(), px = p.real(), py = p.imag();
    RVec re = qx - pix * piy.lu().solve(qy);
    RVec im = pix * px - piy * py;
    return re.cast<Complex>() + kI * im.cast<Complex>();
}

std::pair<CVec, CVec> AbelianFamily::from_flat_raw(const CMat& pi, const CVec& xi,
                                                   const CVec& eta) const {
    RMat piy = pi.imag();
    CVec q = eta.real().cast<Complex>() + pi * xi.real().cast<Complex>();
    CVec rhs = eta.imag().cast<Complex>() + pi.conjugate() * xi.imag().cast<Complex>();
    CVec p = -kI * piy.cast<Complex>().lu().solve(rhs);
    return {q, p};
}

AbelianFamily::FlatCoords AbelianFamily::flat_coordinates(const SiegelPoint& pi, const CVec& q,
                                                          const CVec& p) const {
    if (q.size() != k_ || p.size() != k_)
        throw DimensionMismatch("AbelianFamily: fiber point must be (q, p) in C^k x C^k");
    return {flat_xi(pi.Pi(), q, p), flat_eta(pi.Pi(), q, p)};
}

std::pair<CVec, CVec> AbelianFamily::from_flat(const SiegelPoint& pi, const CVec& xi,
                                               const CVec& eta) const {
    if (xi.size() != k_ || eta.size() != k_)
        throw DimensionMismatch("AbelianFamily: flat coordinates must be in C^k x C^k");
    return from_flat_raw(pi.Pi(), xi, eta);
}

AbelianFamily::Vertical AbelianFamily::gauss_manin_lift(const SiegelPoint& pi, const CVec& q,
                                                        const CVec& p, int i, int j) const {
    RMat v = variation(i, j);
    RMat piy = pi.Pi_y();
    Vertical out = zero_vertical();
    out.dq = (v * piy.lu().solve(RVec(q.imag()))).cast<Complex>();
    CVec a = piy.cast<Complex>().lu().solve(CVec(v.cast<Complex>() * p));
    out.dp = 0.5 * kI * a;
    out.dpbar = -0.5 * kI * a;
    return out;
}

AbelianFamily::Vertical AbelianFamily::kodaira_spencer_higgs(const CVec& p, int i, int j) const {
    RMat v = variation(i, j);
    Vertical out = zero_vertical();
    out.dq = -0.5 * kI * (v.cast<Complex>() * p);
    return out;
}

AbelianFamily::Vertical AbelianFamily::dbar_offset(const SiegelPoint& pi, const CVec& p, int i,
                                                   int j) const {
    RMat v = variation(i, j);
    Vertical out = zero_vertical();
    out.dp = 0.5 * kI *
             pi.Pi_y().cast<Complex>().lu().solve(CVec(v.cast<Complex>() * p.conjugate()));
    return out;
}

AbelianFamily::Vertical AbelianFamily::symplectic_connection(const SiegelPoint& pi, const CVec& p,
                                                             int i, int j) const {
    RMat v = variation(i, j);
    Vertical out = zero_vertical();
    CVec vp = v.cast<Complex>() * p;
    out.dq = kI * vp;
    out.dpbar = kI * pi.Pi_y().cast<Complex>().lu().solve(vp);
    return out;
}

CMat AbelianFamily::fiber_metric_block(const SiegelPoint& pi) const {
    RMat pix = pi.Pi_x(), piy = pi.Pi_y(), piyinv = pi.Pi_y_inv();
    CMat g(2 * k_, 2 * k_);
    g.block(0, 0, k_, k_) = (piy + pix * piyinv * pix).cast<Complex>();
    g.block(0, k_, k_, k_) = (pix * piyinv).cast<Complex>();
    g.block(k_, 0, k_, k_) = (piyinv * pix).cast<Complex>();
    g.block(k_, k_, k_, k_) = piyinv.cast<Complex>();
    return 0.5 * g;
}

CMat AbelianFamily::fiber_metric_block_inverse(const SiegelPoint& pi) const {
    RMat pix = pi.Pi_x(), piy = pi.Pi_y(), piyinv = pi.Pi_y_inv();
    CMat g(2 * k_, 2 * k_);
    g.block(0, 0, k_, k_) = piyinv.cast<Complex>();
    g.block(0, k_, k_, k_) = (-piyinv * pix).cast<Complex>();
    g.block(k_, 0, k_, k_) = (-pix * piyinv).cast<Complex>();
    g.block(k_, k_, k_, k_) = (piy + pix * piyinv * pix).cast<Complex>();
    return 2.0 * g;
}

std::pair<CVec, CVec> AbelianFamily::mixed_metric_terms(const SiegelPoint& pi, const CVec& p,
                                                        int i, int j) const {
    RMat v = variation(i, j);
    RMat pix = pi.Pi_x();
    CVec vp = v.cast<Complex>() * p;
    CVec piyinv_vp = pi.Pi_y().cast<Complex>().lu().solve(vp);
    CVec g_xi = 0.5 * kI * (kI * vp - pix.cast<Complex>() * piyinv_vp);
    CVec g_eta = -0.5 * kI * piyinv_vp;
    return {g_xi, g_eta};
}

namespace {

AbelianFamily::Vertical vertical_from_flat_gamma(const AbelianFamily& fam, const SiegelPoint& pi,
                                                 const CVec& gamma_xi, const CVec& gamma_eta) {
    const int k = fam.k();
    CMat picx = pi.Pi();
    AbelianFamily::Vertical out = fam.zero_vertical();
    out.dq = 0.5 * (gamma_eta + picx * gamma_xi);
    out.dqbar = 0.5 * (gamma_eta + picx.conjugate() * gamma_xi);
    CMat piy = pi.Pi_y().cast<Complex>();
    out.dp = -piy.lu().solve(out.dqbar);
    out.dpbar = piy.lu().solve(out.dq);
    return out;
}

} // namespace

AbelianFamily::Vertical AbelianFamily::symplectic_connection_blocks(const SiegelPoint& pi,
                                                                    const CVec& p, int i,
                                                                    int j) const {
    auto [g_xi, g_eta] = mixed_metric_terms(pi, p, i, j);
    CMat ginv = fiber_metric_block_inverse(pi);
    CVec mixed(2 * k_);
    mixed.head(k_) = g_xi;
    mixed.tail(k_) = g_eta;
    CVec gamma = -(ginv * mixed);
    return vertical_from_flat_gamma(*this, pi, gamma.head(k_), gamma.tail(k_));
}

AbelianFamily::Vertical AbelianFamily::symplectic_connection_potential(const SiegelPoint& pi,
                                                                       const CVec& q,
                                                                       const CVec& p, int i,
                                                                       int j) const {
    FiberMetricSpec metric = FiberMetricSpec::from_potential(chart(), hodge_potential(pi));
    FlatCoords fc = flat_coordinates(pi, q, p);
    CVec fiber(2 * k_);
    fiber.head(k_) = fc.xi;
    fiber.tail(k_) = fc.eta;
    CVec w0 = CVec::Zero(base_dim());
    CVec gamma = connection_from_relative_kahler(metric, w0, fiber, flat_index(i, j));
    return vertical_from_flat_gamma(*this, pi, gamma.head(k_), gamma.tail(k_));
}

double AbelianFamily::hamiltonian_check(const CVec& p, int i, int j) const {
    RMat v = variation(i, j);
    // iota_theta(dp ^ dq) with theta = -(i/2) V p . d_q gives (i/2)(V p) . dp.
    CVec lhs = 0.5 * kI * (v.cast<Complex>() * p);
    // dH for H = (i/4) V_ab p^a p^b.
    CVec rhs = 0.25 * kI * ((v + v.transpose()).cast<Complex>() * p);
    return max_abs(CVec(lhs - rhs));
}

TwistingMap AbelianFamily::canonical_twist(const SiegelPoint& pi) const {
    FiberFrame fr = hyperkahler_frame(pi);
    RMat id = RMat::Identity(fr.real_dim(), fr.real_dim());
    return TwistingMap{std::sqrt(0.5) * (id + fr.JC)};
}

CMat AbelianFamily::pi_of_w(const CMat& pi0, const CVec& w) const {
    CMat pi = pi0;
    for (int d = 0; d < base_dim(); ++d) {
        auto [i, j] = index_pair(d);
        pi += w(d) * variation(i, j).cast<Complex>();
    }
    return pi;
}

Connection10Spec AbelianFamily::gm_connection(const SiegelPoint& pi0) const {
    const int k = k_, n = base_dim(), m = fiber_dim();
    CMat base_pi = pi0.Pi();
    AbelianFamily fam = *this;
    auto hol = [fam, base_pi, k, n](const CVec& w, const CVec& zf) {
        CMat pi = fam.pi_of_w(base_pi, w);
        RMat piy = pi.imag();
        auto piy_lu = piy.lu();
        auto piy_clu = piy.cast<Complex>().lu();
        CVec q = zf.head(k), p = zf.tail(k);
        RVec piyinv_qy = piy_lu.solve(RVec(q.imag()));
        CMat out = CMat::Zero(2 * k, n);
        for (int d = 0; d < n; ++d) {
            auto [i, j] = fam.index_pair(d);
            RMat v = fam.variation(i, j);
            out.col(d).head(k) = (v * piyinv_qy).cast<Complex>();
            out.col(d).tail(k) = 0.5 * kI * piy_clu.solve(CVec(v.cast<Complex>() * p));
        }
        return out;
    };
    auto antihol = [fam, base_pi, k, n](const CVec& w, const CVec& zf) {
        CMat pi = fam.pi_of_w(base_pi, w);
        auto piy_clu = pi.imag().cast<Complex>().lu();
        CVec p = zf.tail(k);
        CMat out = CMat::Zero(2 * k, n);
        for (int d = 0; d < n; ++d) {
            auto [i, j] = fam.index_pair(d);
            RMat v = fam.variation(i, j);
            out.col(d).tail(k) = -0.5 * kI * piy_clu.solve(CVec(v.cast<Complex>() * p));
        }
        return out;
    };
    return Connection10Spec(chart(), ChartFunction(n, m, m, n, hol),
                            ChartFunction(n, m, m, n, antihol));
}

Connection10Spec AbelianFamily::gm_connection_sign_flipped(const SiegelPoint& pi0) const {
    Connection10Spec gm = gm_connection(pi0);
    const int k = k_, n = base_dim(), m = fiber_dim();
    ChartFunction hol = gm.gamma_hol;
    auto flipped = [hol, k](const CVec& w, const CVec& zf) {
        CMat out = hol.eval(w, zf);
        out.bottomRows(k) *= -1.0;
        return out;
    };
    return Connection10Spec(chart(), ChartFunction(n, m, m, n, flipped), gm.gamma_antihol);
}

HiggsSpec AbelianFamily::ks_higgs_spec(const SiegelPoint&) const {
    const int k = k_, n = base_dim(), m = fiber_dim();
    AbelianFamily fam = *this;
    auto theta = [fam, k, n](const CVec&, const CVec& zf) {
        CVec p = zf.tail(k);
        CMat out = CMat::Zero(2 * k, n);
        for (int d = 0; d < n; ++d) {
            auto [i, j] = fam.index_pair(d);
            out.col(d).head(k) = -0.5 * kI * (fam.variation(i, j).cast<Complex>() * p);
        }
        return out;
    };
    return HiggsSpec(chart(), ChartFunction(n, m, m, n, theta));
}

DbarSpec AbelianFamily::canonical_dbar(const SiegelPoint&) const {
    return DbarSpec::canonical(chart());
}

ChartFunction AbelianFamily::hodge_potential(const SiegelPoint& pi0) const {
    const int k = k_, n = base_dim(), m = fiber_dim();
    CMat base_pi = pi0.Pi();
    AbelianFamily fam = *this;
    auto phi = [fam, base_pi, k](const CVec& w, const CVec& zf) {
        CMat pi = fam.pi_of_w(base_pi, w);
        auto [q, p] = fam.from_flat_raw(pi, zf.head(k), zf.tail(k));
        Complex val = (p.adjoint() * pi.imag().cast<Complex>() * p)(0, 0);
        CMat out(1, 1);
        out(0, 0) = val;
        return out;
    };
    return ChartFunction(n, m, 1, 1, phi);
}

Eigen::Vector4d AbelianFamily::twist_span_coefficients(const SiegelPoint& pi,
                                                       const CVec& p) const {
    FiberFrame fr = hyperkahler_frame(pi);
    const int dim = fr.real_dim(), n = base_dim();
    RMat id = RMat::Identity(dim, dim);
    const RMat* ops[4] = {&id, &fr.JA, &fr.JB, &fr.JC};
    const double scale = 2.0 * std::sqrt(2.0);

    RMat lsq(2 * dim * n, 4);
    RVec rhs(2 * dim * n);
    for (int d = 0; d < n; ++d) {
        auto [i, j] = index_pair(d);
        CVec theta_w = vertical_to_frame(kodaira_spencer_higgs(p, i, j));
        CVec target = -vertical_to_frame(symplectic_connection(pi, p, i, j));
        for (int c = 0; c < 4; ++c) {
            CVec col = scale * apply_real(*ops[c], theta_w);
            lsq.block(2 * dim * d, c, dim, 1) = col.real();
            lsq.block(2 * dim * d + dim, c, dim, 1) = col.imag();
        }
        rhs.segment(2 * dim * d, dim) = target.real();
        rhs.segment(2 * dim * d + dim, dim) = target.imag();
    }
    return lsq.colPivHouseholderQr().solve(rhs);
}

HermitianBundleSpec::HermitianBundleSpec(int n_, int rank_, ChartFunction h_)
    : n(n_), rank(rank_), h(std::move(h_)) {
    if (n < 1 || rank < 1)
        throw DimensionMismatch("HermitianBundleSpec: dimensions must be positive");
    if (h.base_dim() != n || h.fiber_dim() != 0 || h.rows() != rank || h.cols() != rank)
        throw DimensionMismatch("HermitianBundleSpec: h must be a base-only rank x rank function");
}

namespace {

CMat hermitian_inverse(const CMat& h, const char* what) {
    Eigen::FullPivLU<CMat> lu(h);
    if (!lu.isInvertible()) throw SingularMetric(std::string(what) + ": metric is singular");
    return lu.inverse();
}

} // namespace

CMat chern_connection_hermitian(const HermitianBundleSpec& spec, const CVec& s, const CVec& z) {
    if (z.size() != spec.rank)
        throw DimensionMismatch("chern_connection_hermitian: fiber point dimension mismatch");
    CVec empty(0);
    CMat hval = spec.h.eval(s, empty);
    CMat k = hermitian_inverse(hval, "chern_connection_hermitian");
    CMat gamma(spec.rank, spec.n);
    for (int i = 0; i < spec.n; ++i) {
        CMat dh = wirtinger_derivative(spec.h, s, empty, {Side::Base, i, Kind::Hol});
        gamma.col(i) = -(k.transpose() * (dh.transpose() * z));
    }
    return gamma;
}

Connection10Spec chern_connection_spec(const HermitianBundleSpec& spec) {
    AdaptedChart chart(spec.n, spec.rank);
    HermitianBundleSpec copy = spec;
    auto hol = [copy](const CVec& s, const CVec& z) {
        return chern_connection_hermitian(copy, s, z);
    };
    return Connection10Spec::pure(chart, ChartFunction(spec.n, spec.rank, spec.rank, spec.n, hol));
}

PrincipalConnectionSpec to_principal(const HermitianBundleSpec& spec) {
    HermitianBundleSpec copy = spec;
    auto a_fn = [copy](const CVec& s) {
        CVec empty(0);
        CMat hval = copy.h.eval(s, empty);
        CMat k = hermitian_inverse(hval, "to_principal");
        std::vector<CMat> out;
        out.reserve(copy.n);
        for (int i = 0; i < copy.n; ++i) {
            CMat dh = wirtinger_derivative(copy.h, s, empty, {Side::Base, i, Kind::Hol});
            out.push_back(CMat((dh * k).transpose()));
        }
        return out;
    };
    auto b_fn = [n = spec.n, d = spec.rank](const CVec&) {
        return std::vector<CMat>(n, CMat::Zero(d, d));
    };
    return PrincipalConnectionSpec{spec.n, spec.rank, a_fn, b_fn};
}

double chern_identity_defect(const HermitianBundleSpec& spec, const CVec& s, const CVec& z) {
    const int n = spec.n, m = spec.rank;
    CVec empty(0);
    CMat hval = spec.h.eval(s, empty);
    CMat kinv = hermitian_inverse(hval, "chern_identity_defect");

    // connection-form stack theta_i = d_i H . H^{-1} with theta^gamma_alpha = T_i(alpha, gamma)
    HermitianBundleSpec copy = spec;
    ChartFunction t_stack(n, 0, m, m * n, [copy, n, m](const CVec& sb, const CVec&) {
        CVec e(0);
        CMat hv = copy.h.eval(sb, e);
        CMat ki = hermitian_inverse(hv, "chern_identity_defect");
        CMat out(m, m * n);
        for (int i = 0; i < n; ++i) {
            CMat dh = wirtinger_derivative(copy.h, sb, e, {Side::Base, i, Kind::Hol});
            out.middleCols(i * m, m) = dh * ki;
        }
        return out;
    });

    double defect = 0;
    for (int j = 0; j < n; ++j) {
        CMat dhb = wirtinger_derivative(spec.h, s, empty, {Side::Base, j, Kind::Antihol});
        CMat dt = wirtinger_derivative(t_stack, s, empty, {Side::Base, j, Kind::Antihol});
        for (int i = 0; i < n; ++i) {
            CMat dh = wirtinger_derivative(spec.h, s, empty, {Side::Base, i, Kind::Hol});
            CMat d2h = wirtinger_second_derivative(spec.h, s, empty, {Side::Base, i, Kind::Hol},
                                                   {Side::Base, j, Kind::Antihol});
            CMat mmat = d2h - dh * kinv * dhb;
            Complex lhs = kI * (z.transpose() * mmat * z.conjugate())(0, 0);
            CVec fz = -(dt.middleCols(i * m, m).transpose() * z);
            Complex rhs = -kI * (fz.transpose() * hval * z.conjugate())(0, 0);
            defect = std::max(defect, std::abs(lhs - rhs));
        }
    }
    return defect;
}

HermitianBundleSpec gaussian_line_bundle() {
    ChartFunction h(1, 0, 1, 1, [](const CVec& s, const CVec&) {
        CMat out(1, 1);
        out(0, 0) = std::exp(-std::norm(s(0)));
        return out;
    });
    return HermitianBundleSpec(1, 1, h);
}

IncompleteFamily::IncompleteFamily()
    : conn(Connection10Spec::pure(
          AdaptedChart(1, 1), ChartFunction(1, 1, 1, 1, [](const CVec&, const CVec& z) {
              CMat out(1, 1);
              out(0, 0) = z(0) * z(0);
              return out;
          }))) {}

BasePath IncompleteFamily::unit_path() const {
    CVec a(1), b(1);
    a(0) = 0;
    b(0) = 1;
    return BasePath::line(a, b);
}

Complex IncompleteFamily::analytic_transport(double t, Complex z0) const {
    return z0 / (1.0 - t * z0);
}

DiskFamily::DiskFamily()
    : conn(Connection10Spec::pure(
          AdaptedChart(1, 1), ChartFunction(1, 1, 1, 1, [](const CVec&, const CVec& z) {
              CMat out(1, 1);
              out(0, 0) = -std::conj(z(0));
              return out;
          }))),
      potential(1, 1, 1, 1, [](const CVec& s, const CVec& z) {
          CMat out(1, 1);
          Complex zz = z(0), ss = s(0);
          out(0, 0) = std::norm(zz) + 2.0 * std::norm(ss) +
                      0.5 * (std::conj(ss) * zz * zz + ss * std::conj(zz) * std::conj(zz));
          return out;
      }) {}

BasePath DiskFamily::real_path(double tmax) const {
    CVec a(1), b(1);
    a(0) = 0;
    b(0) = tmax;
    return BasePath::line(a, b);
}

Complex DiskFamily::analytic_transport(double t, Complex z0) const {
    return std::exp(-t) * z0.real() + kI * (std::exp(t) * z0.imag());
}

FlatQuotientFamily::FlatQuotientFamily(double lambda_)
    : lambda(lambda_),
      conn(Connection10Spec::pure(
          AdaptedChart(1, 1),
          ChartFunction(1, 1, 1, 1, [c = kI * std::log(lambda_) / (2.0 * M_PI)](
                                        const CVec& s, const CVec& z) {
              CMat out(1, 1);
              out(0, 0) = c * z(0) / s(0);
              return out;
          }))) {
    if (!(lambda_ > 0))
        throw DimensionMismatch("FlatQuotientFamily: lambda must be positive");
}

BasePath FlatQuotientFamily::standard_loop(int turns) const {
    CVec center(1), dir(1);
    center(0) = 0;
    dir(0) = 1;
    return BasePath::loop(center, dir, 1.0, turns);
}

Complex FlatQuotientFamily::expected_multiplier(int turns) const {
    return std::exp(Complex(-double(turns) * std::log(lambda), 0.0));
}

FamilyId parse_family_id(const std::string& id) {
    auto starts_with = [&](const std::string& prefix) {
        return id.rfind(prefix, 0) == 0;
    };
    try {
        if (starts_with("abelian:k=")) {
            int k = std::stoi(id.substr(10));
            if (k < 1) throw UnknownFamily("family degree must be >= 1: " + id);
            return {FamilyKind::Abelian, k, 0.0};
        }
        if (id == "hermitian:line-gaussian") return {FamilyKind::HermitianLineGaussian};
        if (id == "incomplete") return {FamilyKind::Incomplete};
        if (id == "disk-nonholomorphic") return {FamilyKind::DiskNonholomorphic};
        if (starts_with("flat-quotient:lambda=")) {
            double l = std::stod(id.substr(21));
            if (!(l > 0)) throw UnknownFamily("lambda must be positive: " + id);
            return {FamilyKind::FlatQuotient, 1, l};
        }
    } catch (const std::invalid_argument&) {
    } catch (const std::out_of_range&) {
    }
    throw UnknownFamily("unknown family id: " + id);
}

} // namespace holofib
