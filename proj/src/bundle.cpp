#include "holofib/bundle.hpp"

#include <Eigen/LU>

namespace holofib {

namespace {

void check_coeff_shape(const AdaptedChart& chart, const ChartFunction& f, const char* what) {
    if (f.base_dim() != chart.n || f.fiber_dim() != chart.m || f.rows() != chart.m ||
        f.cols() != chart.n)
        throw DimensionMismatch(std::string(what) + ": coefficient function must be m x n on the chart");
}

} // namespace

Connection10Spec::Connection10Spec(AdaptedChart c, ChartFunction hol, ChartFunction antihol)
    : chart(c), gamma_hol(std::move(hol)), gamma_antihol(std::move(antihol)) {
    check_coeff_shape(chart, gamma_hol, "Connection10Spec.gamma_hol");
    check_coeff_shape(chart, gamma_antihol, "Connection10Spec.gamma_antihol");
}

Connection10Spec Connection10Spec::pure(AdaptedChart c, ChartFunction hol) {
    return Connection10Spec(c, std::move(hol), ChartFunction::zero(c.n, c.m, c.m, c.n));
}

DbarSpec::DbarSpec(AdaptedChart c, ChartFunction bar) : chart(c), gamma_bar(std::move(bar)) {
    check_coeff_shape(chart, gamma_bar, "DbarSpec.gamma_bar");
}

DbarSpec DbarSpec::canonical(AdaptedChart c) {
    return DbarSpec(c, ChartFunction::zero(c.n, c.m, c.m, c.n));
}

LiftedDbarSpec::LiftedDbarSpec(DbarSpec d, ChartFunction bar_antihol)
    : dbar(std::move(d)), gamma_bar_antihol(std::move(bar_antihol)) {
    check_coeff_shape(dbar.chart, gamma_bar_antihol, "LiftedDbarSpec.gamma_bar_antihol");
}

HiggsSpec::HiggsSpec(AdaptedChart c, ChartFunction t) : chart(c), theta(std::move(t)) {
    check_coeff_shape(chart, theta, "HiggsSpec.theta");
}

MixedTensor::MixedTensor(std::vector<IndexRole> roles, std::vector<int> dims, CVec base,
                         CVec fiber)
    : roles_(std::move(roles)), dims_(std::move(dims)), base_(std::move(base)),
      fiber_(std::move(fiber)) {
    if (roles_.size() != dims_.size())
        throw DimensionMismatch("MixedTensor: signature/dims rank mismatch");
    strides_.assign(dims_.size(), 1);
    std::size_t total = 1;
    for (int i = int(dims_.size()) - 1; i >= 0; --i) {
        strides_[i] = total;
        total *= std::size_t(dims_[i]);
    }
    values_.assign(total, Complex(0, 0));
}

std::size_t MixedTensor::offset(std::initializer_list<int> idx) const {
    if (idx.size() != dims_.size()) throw DimensionMismatch("MixedTensor: wrong index rank");
    std::size_t off = 0;
    int k = 0;
    for (int i : idx) {
        if (i < 0 || i >= dims_[k]) throw IndexOutOfRange("MixedTensor: index out of range");
        off += strides_[k] * std::size_t(i);
        ++k;
    }
    return off;
}

Complex& MixedTensor::at(std::initializer_list<int> idx) { return values_[offset(idx)]; }
Complex MixedTensor::at(std::initializer_list<int> idx) const { return values_[offset(idx)]; }

double MixedTensor::max_abs() const {
    double r = 0;
    for (const Complex& v : values_) r = std::max(r, std::abs(v));
    return r;
}

void MixedTensor::declare_antisymmetric(int a, int b) {
    if (a == b || a < 0 || b < 0 || a >= rank() || b >= rank() || dims_[a] != dims_[b])
        throw DimensionMismatch("MixedTensor: invalid antisymmetric pair");
    antisym_.emplace_back(a, b);
}

double MixedTensor::antisymmetry_defect() const {
    double r = 0;
    for (auto [a, b] : antisym_) {
        // walk all multi-indices, swap slots a/b
        std::vector<int> idx(rank(), 0);
        std::size_t total = values_.size();
        for (std::size_t lin = 0; lin < total; ++lin) {
            std::size_t rem = lin;
            for (int k = 0; k < rank(); ++k) {
                idx[k] = int(rem / strides_[k]);
                rem %= strides_[k];
            }
            std::vector<int> sw = idx;
            std::swap(sw[a], sw[b]);
            std::size_t lin2 = 0;
            for (int k = 0; k < rank(); ++k) lin2 += strides_[k] * std::size_t(sw[k]);
            r = std::max(r, std::abs(values_[lin] + values_[lin2]));
        }
    }
    return r;
}

namespace {

// Fiber-antiholomorphic derivatives of an m x n coefficient block, one matrix
// per conjugated fiber coordinate.
std::vector<CMat> fiber_antihol_derivs(const ChartFunction& f, const CVec& base,
                                       const CVec& fiber) {
    std::vector<CMat> out;
    out.reserve(f.fiber_dim());
    for (int b = 0; b < f.fiber_dim(); ++b)
        out.push_back(wirtinger_derivative(f, base, fiber, {Side::Fiber, b, Kind::Antihol}));
    return out;
}

std::vector<CMat> fiber_hol_derivs(const ChartFunction& f, const CVec& base, const CVec& fiber) {
    std::vector<CMat> out;
    out.reserve(f.fiber_dim());
    for (int b = 0; b < f.fiber_dim(); ++b)
        out.push_back(wirtinger_derivative(f, base, fiber, {Side::Fiber, b, Kind::Hol}));
    return out;
}

double max_abs_of(const std::vector<CMat>& ms) {
    double r = 0;
    for (const CMat& m : ms) r = std::max(r, max_abs(m));
    return r;
}

} // namespace

double relative_holomorphy_defect(const Connection10Spec& conn, const CVec& base,
                                  const CVec& fiber) {
    return max_abs_of(fiber_antihol_derivs(conn.gamma_hol, base, fiber));
}

double mixed_relative_holomorphy_defect(const DbarSpec& dbar, const CVec& base,
                                        const CVec& fiber) {
    return max_abs_of(fiber_antihol_derivs(dbar.gamma_bar, base, fiber));
}

double higgs_relative_holomorphy_defect(const HiggsSpec& higgs, const CVec& base,
                                        const CVec& fiber) {
    return max_abs_of(fiber_antihol_derivs(higgs.theta, base, fiber));
}

MixedTensor curvature_f11(const Connection10Spec& conn, const DbarSpec& dbar, const CVec& base,
                          const CVec& fiber, CurvatureOptions opt) {
    const int n = conn.chart.n, m = conn.chart.m;
    if (dbar.chart.n != n || dbar.chart.m != m)
        throw DimensionMismatch("curvature_f11: chart mismatch between connection and dbar");
    double defect = relative_holomorphy_defect(conn, base, fiber);
    if (defect > opt.rel_hol_tol)
        throw NotRelativelyHolomorphic(
            "curvature_f11: connection is not relatively holomorphic at the point (defect " +
                std::to_string(defect) + ")",
            defect);

    CMat gh = conn.gamma_hol.eval(base, fiber);
    CMat ga = conn.gamma_antihol.eval(base, fiber);
    CMat gb = dbar.gamma_bar.eval(base, fiber);

    std::vector<CMat> d_gb_base(n);
    for (int i = 0; i < n; ++i)
        d_gb_base[i] = wirtinger_derivative(dbar.gamma_bar, base, fiber, {Side::Base, i, Kind::Hol});
    std::vector<CMat> d_gh_basebar(n);
    for (int j = 0; j < n; ++j)
        d_gh_basebar[j] =
            wirtinger_derivative(conn.gamma_hol, base, fiber, {Side::Base, j, Kind::Antihol});
    std::vector<CMat> d_gb_fh = fiber_hol_derivs(dbar.gamma_bar, base, fiber);
    std::vector<CMat> d_gh_fh = fiber_hol_derivs(conn.gamma_hol, base, fiber);
    std::vector<CMat> d_gb_fa = fiber_antihol_derivs(dbar.gamma_bar, base, fiber);

    MixedTensor out({IndexRole::FiberHol, IndexRole::BaseHol, IndexRole::BaseAntihol}, {m, n, n},
                    base, fiber);
    for (int a = 0; a < m; ++a)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Complex v = d_gb_base[i](a, j) - d_gh_basebar[j](a, i);
                for (int b = 0; b < m; ++b) {
                    v += gh(b, i) * d_gb_fh[b](a, j);
                    v -= gb(b, j) * d_gh_fh[b](a, i);
                    v += ga(b, i) * d_gb_fa[b](a, j);
                }
                out.at({a, i, j}) = v;
            }
    return out;
}

MixedTensor curvature_f11_pure(const Connection10Spec& conn, const CVec& base, const CVec& fiber,
                               CurvatureOptions opt) {
    const int n = conn.chart.n, m = conn.chart.m;
    double defect = relative_holomorphy_defect(conn, base, fiber);
    if (defect > opt.rel_hol_tol)
        throw NotRelativelyHolomorphic(
            "curvature_f11_pure: connection is not relatively holomorphic at the point (defect " +
                std::to_string(defect) + ")",
            defect);
    MixedTensor out({IndexRole::FiberHol, IndexRole::BaseHol, IndexRole::BaseAntihol}, {m, n, n},
                    base, fiber);
    for (int j = 0; j < n; ++j) {
        CMat d = wirtinger_derivative(conn.gamma_hol, base, fiber, {Side::Base, j, Kind::Antihol});
        for (int a = 0; a < m; ++a)
            for (int i = 0; i < n; ++i) out.at({a, i, j}) = -d(a, i);
    }
    return out;
}

MixedTensor curvature_f20(const Connection10Spec& conn, const CVec& base, const CVec& fiber) {
    const int n = conn.chart.n, m = conn.chart.m;
    MixedTensor out({IndexRole::FiberHol, IndexRole::BaseHol, IndexRole::BaseHol}, {m, n, n},
                    base, fiber);
    out.declare_antisymmetric(1, 2);
    if (n == 1) return out;

    CMat gh = conn.gamma_hol.eval(base, fiber);
    std::vector<CMat> d_base(n);
    for (int i = 0; i < n; ++i)
        d_base[i] = wirtinger_derivative(conn.gamma_hol, base, fiber, {Side::Base, i, Kind::Hol});
    std::vector<CMat> d_fh = fiber_hol_derivs(conn.gamma_hol, base, fiber);

    for (int b = 0; b < m; ++b)
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                Complex v = d_base[i](b, j) - d_base[j](b, i);
                for (int a = 0; a < m; ++a)
                    v += gh(a, i) * d_fh[a](b, j) - gh(a, j) * d_fh[a](b, i);
                out.at({b, i, j}) = v;
                out.at({b, j, i}) = -v;
            }
    return out;
}

MixedTensor pseudo_curvature_g11(const HiggsSpec& higgs, const DbarSpec& dbar, const CVec& base,
                                 const CVec& fiber, CurvatureOptions opt) {
    const int n = higgs.chart.n, m = higgs.chart.m;
    if (dbar.chart.n != n || dbar.chart.m != m)
        throw DimensionMismatch("pseudo_curvature_g11: chart mismatch");
    double defect = higgs_relative_holomorphy_defect(higgs, base, fiber);
    if (defect > opt.rel_hol_tol)
        throw NotRelativelyHolomorphic(
            "pseudo_curvature_g11: Higgs field is not relatively holomorphic at the point (defect " +
                std::to_string(defect) + ")",
            defect);

    CMat th = higgs.theta.eval(base, fiber);
    CMat gb = dbar.gamma_bar.eval(base, fiber);
    std::vector<CMat> d_th_basebar(n);
    for (int j = 0; j < n; ++j)
        d_th_basebar[j] =
            wirtinger_derivative(higgs.theta, base, fiber, {Side::Base, j, Kind::Antihol});
    std::vector<CMat> d_gb_fh = fiber_hol_derivs(dbar.gamma_bar, base, fiber);
    std::vector<CMat> d_th_fh = fiber_hol_derivs(higgs.theta, base, fiber);

    MixedTensor out({IndexRole::FiberHol, IndexRole::BaseHol, IndexRole::BaseAntihol}, {m, n, n},
                    base, fiber);
    for (int a = 0; a < m; ++a)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Complex v = -d_th_basebar[j](a, i);
                for (int g = 0; g < m; ++g) {
                    v += th(g, i) * d_gb_fh[g](a, j);
                    v -= gb(g, j) * d_th_fh[g](a, i);
                }
                out.at({a, i, j}) = v;
            }
    return out;
}

MixedTensor pseudo_curvature_g20(const HiggsSpec& higgs, const CVec& base, const CVec& fiber) {
    const int n = higgs.chart.n, m = higgs.chart.m;
    MixedTensor out({IndexRole::FiberHol, IndexRole::BaseHol, IndexRole::BaseHol}, {m, n, n},
                    base, fiber);
    out.declare_antisymmetric(1, 2);
    if (n == 1) return out;

    CMat th = higgs.theta.eval(base, fiber);
    std::vector<CMat> d_fh = fiber_hol_derivs(higgs.theta, base, fiber);
    for (int b = 0; b < m; ++b)
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                Complex v(0, 0);
                for (int a = 0; a < m; ++a)
                    v += th(a, i) * d_fh[a](b, j) - th(a, j) * d_fh[a](b, i);
                out.at({b, i, j}) = v;
                out.at({b, j, i}) = -v;
            }
    return out;
}

MixedTensor ks_tensor(const Connection10Spec& conn, const CVec& base, const CVec& fiber) {
    const int n = conn.chart.n, m = conn.chart.m;
    std::vector<CMat> d_fa = fiber_antihol_derivs(conn.gamma_hol, base, fiber);
    MixedTensor out({IndexRole::FiberHol, IndexRole::BaseHol, IndexRole::FiberAntihol}, {m, n, m},
                    base, fiber);
    for (int a = 0; a < m; ++a)
        for (int i = 0; i < n; ++i)
            for (int b = 0; b < m; ++b) out.at({a, i, b}) = d_fa[b](a, i);
    return out;
}

MixedTensor dbar_decomposition_ra1(const Connection10Spec& conn, const LiftedDbarSpec& lifted,
                                   const CVec& base, const CVec& fiber) {
    const int n = conn.chart.n, m = conn.chart.m;
    if (lifted.dbar.chart.n != n || lifted.dbar.chart.m != m)
        throw DimensionMismatch("dbar_decomposition_ra1: chart mismatch");
    CMat lift = lifted.gamma_bar_antihol.eval(base, fiber);
    std::vector<CMat> d_gh_basebar(n);
    for (int j = 0; j < n; ++j)
        d_gh_basebar[j] =
            wirtinger_derivative(conn.gamma_hol, base, fiber, {Side::Base, j, Kind::Antihol});
    std::vector<CMat> d_gh_fa = fiber_antihol_derivs(conn.gamma_hol, base, fiber);

    MixedTensor out({IndexRole::FiberHol, IndexRole::BaseHol, IndexRole::BaseAntihol}, {m, n, n},
                    base, fiber);
    for (int a = 0; a < m; ++a)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Complex v = d_gh_basebar[j](a, i);
                for (int b = 0; b < m; ++b) v += d_gh_fa[b](a, i) * lift(b, j);
                out.at({a, i, j}) = v;
            }
    return out;
}

double dolbeault_closedness_defect(const Connection10Spec& conn, const CVec& base,
                                   const CVec& fiber) {
    const int n = conn.chart.n, m = conn.chart.m;
    const ChartFunction& g = conn.gamma_hol;
    double defect = 0;
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k) {
            CMat a = wirtinger_second_derivative(g, base, fiber, {Side::Base, k, Kind::Antihol},
                                                 {Side::Base, j, Kind::Antihol});
            CMat b = wirtinger_second_derivative(g, base, fiber, {Side::Base, j, Kind::Antihol},
                                                 {Side::Base, k, Kind::Antihol});
            defect = std::max(defect, max_abs(CMat(a - b)));
        }
    for (int b = 0; b < m; ++b)
        for (int j = 0; j < n; ++j) {
            CMat u = wirtinger_second_derivative(g, base, fiber, {Side::Fiber, b, Kind::Antihol},
                                                 {Side::Base, j, Kind::Antihol});
            CMat v = wirtinger_second_derivative(g, base, fiber, {Side::Base, j, Kind::Antihol},
                                                 {Side::Fiber, b, Kind::Antihol});
            defect = std::max(defect, max_abs(CMat(u - v)));
        }
    return defect;
}

namespace {

// Wraps a smooth point map as a ChartFunction column so Wirtinger stencils
// and finiteness checks apply to transition maps too.
ChartFunction wrap_map(int n, int m, int out_dim,
                       std::function<CVec(const CVec&, const CVec&)> f) {
    return ChartFunction(n, m, out_dim, 1, [f = std::move(f)](const CVec& b, const CVec& z) {
        return CMat(f(b, z));
    });
}

} // namespace

CMat TransitionMap::jacobian_base(const CVec& s) const {
    if (base_jacobian) return base_jacobian(s);
    ChartFunction f = wrap_map(n, 0, n, [this](const CVec& b, const CVec&) { return base_map(b); });
    CMat j(n, n);
    CVec dummy(0);
    for (int i = 0; i < n; ++i)
        j.col(i) = wirtinger_derivative(f, s, dummy, {Side::Base, i, Kind::Hol});
    return j;
}

CMat TransitionMap::jacobian_fiber_z(const CVec& s, const CVec& z) const {
    if (fiber_jacobian_z) return fiber_jacobian_z(s, z);
    ChartFunction f = wrap_map(n, m, m, fiber_map);
    CMat j(m, m);
    for (int a = 0; a < m; ++a)
        j.col(a) = wirtinger_derivative(f, s, z, {Side::Fiber, a, Kind::Hol});
    return j;
}

CMat TransitionMap::jacobian_fiber_s(const CVec& s, const CVec& z) const {
    if (fiber_jacobian_s) return fiber_jacobian_s(s, z);
    ChartFunction f = wrap_map(n, m, m, fiber_map);
    CMat j(m, n);
    for (int i = 0; i < n; ++i)
        j.col(i) = wirtinger_derivative(f, s, z, {Side::Base, i, Kind::Hol});
    return j;
}

MixedTensor cech_cocycle(const TransitionMap& t, const CVec& base, const CVec& fiber) {
    CMat b = t.jacobian_fiber_z(base, fiber);
    CMat c = t.jacobian_fiber_s(base, fiber);
    Eigen::FullPivLU<CMat> lu(b);
    if (!lu.isInvertible())
        throw SingularFiberJacobian("cech_cocycle: fiber Jacobian B is singular at the point");
    CMat coc = lu.solve(c);
    MixedTensor out({IndexRole::FiberHol, IndexRole::BaseHol}, {t.m, t.n}, base, fiber);
    for (int a = 0; a < t.m; ++a)
        for (int i = 0; i < t.n; ++i) out.at({a, i}) = coc(a, i);
    return out;
}

namespace {

// Coefficient matrices of the induced objects on the associated bundle.
CMat minus_action_stack(const std::vector<CMat>& mats, const CVec& z, int d, int n) {
    CMat out(d, n);
    for (int i = 0; i < n; ++i) {
        if (mats[i].rows() != d || mats[i].cols() != d)
            throw DimensionMismatch("principal connection: matrix dimension != rep_dim");
        out.col(i) = -(mats[i] * z);
    }
    return out;
}

} // namespace

InducedConnection induced_connection_from_principal(const PrincipalConnectionSpec& p) {
    if (p.n < 1 || p.rep_dim < 1)
        throw DimensionMismatch("induced_connection_from_principal: dimensions must be positive");
    AdaptedChart chart(p.n, p.rep_dim);
    const int n = p.n, d = p.rep_dim;
    auto A = p.A;
    auto B = p.B;
    ChartFunction gh(n, d, d, n, [A, d, n](const CVec& s, const CVec& z) {
        return minus_action_stack(A(s), z, d, n);
    });
    ChartFunction ga(n, d, d, n, [B, d, n](const CVec& s, const CVec& z) {
        return CMat(minus_action_stack(B(s), z, d, n).conjugate());
    });
    ChartFunction gb(n, d, d, n, [B, d, n](const CVec& s, const CVec& z) {
        return minus_action_stack(B(s), z, d, n);
    });
    ChartFunction gba(n, d, d, n, [A, d, n](const CVec& s, const CVec& z) {
        return CMat(minus_action_stack(A(s), z, d, n).conjugate());
    });
    return InducedConnection{Connection10Spec(chart, gh, ga),
                             LiftedDbarSpec(DbarSpec(chart, gb), gba)};
}

double curvature_correspondence_check(const PrincipalConnectionSpec& p, const CVec& base,
                                      const CVec& fiber) {
    const int n = p.n, d = p.rep_dim;
    InducedConnection ind = induced_connection_from_principal(p);
    MixedTensor lhs = curvature_f11(ind.conn, ind.dbar.dbar, base, fiber);

    // Principal curvature F^{1,1}(i,j) = d_i B_j - d_jbar A_i + [A_i, B_j],
    // acting on the fiber point through the linear action.
    auto stack = [d, n](std::function<std::vector<CMat>(const CVec&)> coeffs) {
        return ChartFunction(n, 0, d, d * n,
                             [coeffs = std::move(coeffs), d, n](const CVec& s, const CVec&) {
                                 std::vector<CMat> ms = coeffs(s);
                                 CMat out(d, d * n);
                                 for (int i = 0; i < n; ++i) out.middleCols(i * d, d) = ms[i];
                                 return out;
                             });
    };
    ChartFunction a_stack = stack(p.A);
    ChartFunction b_stack = stack(p.B);
    CVec empty(0);
    std::vector<CMat> a_vals = p.A(base), b_vals = p.B(base);
    std::vector<CMat> da(n), db(n);
    for (int i = 0; i < n; ++i) {
        da[i] = wirtinger_derivative(a_stack, base, empty, {Side::Base, i, Kind::Antihol});
        db[i] = wirtinger_derivative(b_stack, base, empty, {Side::Base, i, Kind::Hol});
    }

    double defect = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            CMat f = db[i].middleCols(j * d, d) - da[j].middleCols(i * d, d) +
                     a_vals[i] * b_vals[j] - b_vals[j] * a_vals[i];
            CVec rhs = -(f * fiber);
            for (int a = 0; a < d; ++a)
                defect = std::max(defect, std::abs(lhs.at({a, i, j}) - rhs(a)));
        }
    return defect;
}

} // namespace holofib
