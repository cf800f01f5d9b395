#include <doctest.h>

#include "holofib/families.hpp"
#include "holofib/simpson.hpp"

using namespace holofib;

namespace {

SiegelPoint unit_pi() {
    CMat m(1, 1);
    m(0, 0) = kI;
    return SiegelPoint(m);
}

FiberFrame unit_frame() { return AbelianFamily(1).hyperkahler_frame(unit_pi()); }

CVec frame_vec(std::initializer_list<Complex> vals) {
    CVec v(int(vals.size()));
    int i = 0;
    for (Complex c : vals) v(i++) = c;
    return v;
}

} // namespace

TEST_CASE("hyperkahler frame structure at Pi = i") {
    FiberFrame fr = unit_frame();
    CHECK(fr.structure_defect() <= 1e-12);
    CHECK((fr.g - RMat::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-12);

    // J_A(d_qx) = -d_py and J_A(d_px) = d_qy
    RVec e_qx = RVec::Zero(4);
    e_qx(0) = 1;
    RVec im = fr.JA * e_qx;
    CHECK(im(3) == doctest::Approx(-1.0));
    RVec e_px = RVec::Zero(4);
    e_px(2) = 1;
    im = fr.JA * e_px;
    CHECK(im(1) == doctest::Approx(1.0));
}

TEST_CASE("complexified coordinate conversions invert each other") {
    FiberFrame fr = unit_frame();
    Rng rng(51);
    for (int t = 0; t < 20; ++t) {
        CVec hol = rng.cvec_box(2, 1.5), antihol = rng.cvec_box(2, 1.5);
        CVec w = complex_parts_to_real(fr, hol, antihol);
        auto [h2, a2] = real_to_complex_parts(fr, w);
        CHECK(max_abs(CVec(h2 - hol)) <= 1e-14);
        CHECK(max_abs(CVec(a2 - antihol)) <= 1e-14);
    }
}

TEST_CASE("theta_bar_J on the abelian example") {
    AbelianFamily fam(1);
    FiberFrame fr = unit_frame();

    // zero in, zero out
    CHECK(max_abs(theta_bar_J(fr, CVec::Zero(4))) == 0.0);

    // theta(d_Pi) = -i p d_q at p = 1 maps to i pbar d_p = i d_p
    CVec p(1);
    p(0) = 1.0;
    CVec theta_w = fam.vertical_to_frame(fam.kodaira_spencer_higgs(p, 0, 0));
    CVec tb = theta_bar_J(fr, theta_w);
    AbelianFamily::Vertical v = fam.frame_to_vertical(tb);
    CHECK(std::abs(v.dp(0) - kI) <= 1e-14);
    CHECK(max_abs(v.dq) <= 1e-14);
    CHECK(max_abs(v.dqbar) <= 1e-14);
    CHECK(max_abs(v.dpbar) <= 1e-14);

    // unit q-direction: i J_A(conj(d_q)) definition unwinding
    AbelianFamily::Vertical unit_q = fam.zero_vertical();
    unit_q.dq(0) = 1.0;
    CVec w = fam.vertical_to_frame(unit_q);
    CVec expect = kI * apply_real(fr.JA, w.conjugate());
    CHECK(max_abs(CVec(theta_bar_J(fr, w) - expect)) <= 1e-14);
}

TEST_CASE("theta_bar_J is conjugate-linear") {
    AbelianFamily fam(2);
    SiegelPoint pi = siegel_sample(2, 9);
    FiberFrame fr = fam.hyperkahler_frame(pi);
    Rng rng(52);
    for (int t = 0; t < 20; ++t) {
        CVec p = rng.cvec_box(2, 2.0);
        CVec w = fam.vertical_to_frame(fam.kodaira_spencer_higgs(p, 0, 1));
        Complex lambda = rng.complex_box(2.0);
        CVec lhs = theta_bar_J(fr, CVec(lambda * w));
        CVec rhs = std::conj(lambda) * theta_bar_J(fr, w);
        CHECK(max_abs(CVec(lhs - rhs)) <= 1e-12);
    }
}

TEST_CASE("twist parametrization") {
    AbelianFamily fam(2);
    SiegelPoint pi = siegel_sample(2, 11);
    FiberFrame fr = fam.hyperkahler_frame(pi);

    // angle 0: beta = (id + J_C)/sqrt2 with inverse (id - J_C)/sqrt2
    TwistingMap b0 = twist_parametrization(fr, 0.0);
    RMat expected = (RMat::Identity(8, 8) + fr.JC) / std::sqrt(2.0);
    CHECK((b0.beta - expected).cwiseAbs().maxCoeff() <= 1e-13);
    RMat inv_expected = (RMat::Identity(8, 8) - fr.JC) / std::sqrt(2.0);
    CHECK((b0.inverse() - inv_expected).cwiseAbs().maxCoeff() <= 1e-10);

    Rng rng(53);
    for (int t = 0; t < 10; ++t) {
        double angle = 2 * M_PI * rng.u01();
        TwistingMap b = twist_parametrization(fr, angle);
        CHECK(b.intertwine_defect(fr) <= 1e-10);
        // isometry of g
        CHECK((b.beta.transpose() * fr.g * b.beta - fr.g).cwiseAbs().maxCoeff() <= 1e-10);
        // quaternion conjugation: beta J_A beta^{-1} = J_B
        RMat conj = b.beta * fr.JA * b.inverse();
        CHECK((conj - fr.JB).cwiseAbs().maxCoeff() <= 1e-10);
        // angle + pi flips the sign
        TwistingMap bpi = twist_parametrization(fr, angle + M_PI);
        CHECK((b.beta + bpi.beta).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("hypercomplex frame norm factor is sqrt 2") {
    AbelianFamily fam(2);
    FiberFrame fr = fam.hyperkahler_frame(siegel_sample(2, 13));
    CHECK(std::abs(frame_operator_norm(fr, RMat(fr.JA - fr.JB)) - std::sqrt(2.0)) <= 1e-10);
}

TEST_CASE("plain mechanism: fixed point and round trips") {
    Rng rng(54);
    ConjRule rule = [](const CMat& th) { return CMat(th.conjugate()); };

    // partial_flat = partial_chern: theta = 0 and dbar unchanged
    CMat chern(1, 1), dbar(1, 1);
    chern(0, 0) = Complex(0.3, 0.4);
    dbar(0, 0) = Complex(-0.2, 0.7);
    HiggsSideValue h = simpson_flat_to_higgs(chern, chern, rule, dbar);
    CHECK(max_abs(h.theta) == 0.0);
    CHECK(max_abs(CMat(h.dbar - dbar)) == 0.0);

    // random round trips with a matrix conjugation rule
    for (int t = 0; t < 50; ++t) {
        int m = 1 + int(rng.next_u64() % 3), n = 1 + int(rng.next_u64() % 2);
        auto mk = [&]() {
            CMat c(m, n);
            for (int r = 0; r < m; ++r)
                for (int cc = 0; cc < n; ++cc) c(r, cc) = rng.complex_box(1.0);
            return c;
        };
        CMat mmat(m, m);
        for (int r = 0; r < m; ++r)
            for (int cc = 0; cc < m; ++cc) mmat(r, cc) = rng.complex_box(1.0);
        ConjRule mat_rule = [mmat](const CMat& th) { return CMat(mmat * th.conjugate()); };
        CMat dbar_f = mk(), theta = mk(), chern2 = mk();
        FlatSideValue flat = simpson_higgs_to_flat(dbar_f, theta, chern2, mat_rule);
        HiggsSideValue back = simpson_flat_to_higgs(flat.partial, chern2, mat_rule, flat.dbar);
        CHECK(max_abs(CMat(back.theta - theta)) <= 1e-12);
        CHECK(max_abs(CMat(back.dbar - dbar_f)) <= 1e-12);
    }

    CMat wrong(2, 1);
    CHECK_THROWS_AS(simpson_flat_to_higgs(chern, wrong, rule, dbar), DimensionMismatch);
}

TEST_CASE("plain mechanism abelian example: theta coefficient is -i p") {
    // GM lift against the symplectic connection at k=1, Pi=i, p=1, V=2
    AbelianFamily fam(1);
    SiegelPoint pi = unit_pi();
    FiberFrame fr = unit_frame();
    CVec q = CVec::Zero(1), p(1);
    p(0) = 1.0;

    AbelianFamily::Vertical gm = fam.gauss_manin_lift(pi, q, p, 0, 0);
    AbelianFamily::Vertical sy = fam.symplectic_connection(pi, p, 0, 0);
    CMat partial_flat(2, 1), partial_chern(2, 1), dbar_flat(2, 1);
    partial_flat << gm.dq(0), gm.dp(0);
    partial_chern << sy.dq(0), sy.dp(0);
    AbelianFamily::Vertical off = fam.dbar_offset(pi, p, 0, 0);
    dbar_flat << off.dq(0), off.dp(0);

    ConjRule rule = [&](const CMat& th) {
        CMat out(2, th.cols());
        for (int d = 0; d < th.cols(); ++d) {
            AbelianFamily::Vertical v = fam.zero_vertical();
            v.dq(0) = th(0, d);
            v.dp(0) = th(1, d);
            AbelianFamily::Vertical vb =
                fam.frame_to_vertical(theta_bar_J(fr, fam.vertical_to_frame(v)));
            out(0, d) = vb.dq(0);
            out(1, d) = vb.dp(0);
        }
        return out;
    };

    HiggsSideValue h = simpson_flat_to_higgs(partial_flat, partial_chern, rule, dbar_flat);
    CHECK(std::abs(h.theta(0, 0) - Complex(0, -1)) <= 1e-12); // -i p at p = 1

    // round trip recovers the flat side exactly
    FlatSideValue back = simpson_higgs_to_flat(h.dbar, h.theta, partial_chern, rule);
    CHECK(max_abs(CMat(back.partial - partial_flat)) <= 1e-12);
    CHECK(max_abs(CMat(back.dbar - dbar_flat)) <= 1e-12);
}

TEST_CASE("twisted mechanism: fixed point, round trip and degeneration guard") {
    AbelianFamily fam(1);
    FiberFrame fr = unit_frame();
    TwistingMap beta = fam.canonical_twist(unit_pi());
    Rng rng(55);

    // theta = 0 and dbar_B = dbar_B0: dbar_A = dbar_A0, partial_A = chern_A
    std::vector<CVec> zero{CVec::Zero(4)};
    std::vector<CVec> dbar_B0{rng.cvec_box(4, 1.0)}, dbar_A0{rng.cvec_box(4, 1.0)},
        chern_A{rng.cvec_box(4, 1.0)};
    TwistedConnectionValue cv =
        twisted_higgs_to_connection(fr, beta, dbar_B0, dbar_B0, dbar_A0, zero, chern_A);
    CHECK(max_abs(CVec(cv.dbar_A[0] - dbar_A0[0])) <= 1e-14);
    CHECK(max_abs(CVec(cv.partial_A[0] - chern_A[0])) <= 1e-14);

    // random round trips
    for (int t = 0; t < 30; ++t) {
        std::vector<CVec> dbar_B{rng.cvec_box(4, 1.0)}, theta{rng.cvec_box(4, 1.0)};
        TwistedConnectionValue c2 =
            twisted_higgs_to_connection(fr, beta, dbar_B, dbar_B0, dbar_A0, theta, chern_A);
        TwistedHiggsValue h2 = twisted_connection_to_higgs(fr, beta, c2.dbar_A, dbar_A0,
                                                           dbar_B0, c2.partial_A, chern_A);
        CHECK(max_abs(CVec(h2.theta[0] - theta[0])) <= 1e-12);
        CHECK(max_abs(CVec(h2.dbar_B[0] - dbar_B[0])) <= 1e-12);
    }

    // degenerate twist: J_A = J_B
    FiberFrame degen = fr;
    degen.JA = fr.JB;
    degen.JC = RMat::Zero(4, 4);
    CHECK_THROWS_AS(
        twisted_higgs_to_connection(degen, beta, zero, zero, zero, zero, zero),
        DegenerateTwist);
}

TEST_CASE("twisted transform reproduces the abelian symplectic identity") {
    // partial_A - partial_omega = 2 sqrt2 beta^{-1}(theta) on random points
    Rng rng(56);
    for (int k = 1; k <= 2; ++k) {
        AbelianFamily fam(k);
        for (int t = 0; t < 10; ++t) {
            SiegelPoint pi = siegel_sample(k, rng.next_u64());
            FiberFrame fr = fam.hyperkahler_frame(pi);
            TwistingMap beta = fam.canonical_twist(pi);
            CVec p = rng.cvec_box(k, 2.0);
            int i = int(rng.next_u64() % std::uint64_t(k));
            int j = i + int(rng.next_u64() % std::uint64_t(k - i));

            std::vector<CVec> theta{fam.vertical_to_frame(fam.kodaira_spencer_higgs(p, i, j))};
            std::vector<CVec> zero{CVec::Zero(4 * k)};
            TwistedConnectionValue cv =
                twisted_higgs_to_connection(fr, beta, zero, zero, zero, theta, zero);
            // partial_A - chern_A = 2 sqrt2 beta^{-1} theta must equal
            // -(symplectic connection) by the displayed proposition
            CVec expected = -fam.vertical_to_frame(fam.symplectic_connection(pi, p, i, j));
            CHECK(max_abs(CVec(cv.partial_A[0] - expected)) <= 1e-10);
        }
    }
}

TEST_CASE("connection from a relatively Kahler metric") {
    // product metric: Gamma = 0
    AdaptedChart chart(1, 1);
    ChartFunction g_const(1, 1, 1, 1, [](const CVec&, const CVec&) {
        CMat out(1, 1);
        out(0, 0) = 2.0;
        return out;
    });
    FiberMetricSpec product =
        FiberMetricSpec::from_blocks(chart, g_const, ChartFunction::zero(1, 1, 1, 1));
    CVec s0(1), z0(1);
    s0(0) = Complex(0.3, 0.5);
    z0(0) = Complex(0.7, -0.4);
    CHECK(max_abs(connection_from_relative_kahler(product, s0, z0)) == 0.0);

    // disk potential gives Gamma = -zbar
    DiskFamily disk;
    FiberMetricSpec pot = FiberMetricSpec::from_potential(chart, disk.potential);
    CMat gamma = connection_from_relative_kahler(pot, s0, z0);
    CHECK(std::abs(gamma(0, 0) + std::conj(z0(0))) <= 1e-6);

    // Hermitian-bundle potential phi = e^{-|s|^2} z zbar at s = 0: Gamma = 0
    ChartFunction hermpot(1, 1, 1, 1, [](const CVec& s, const CVec& z) {
        CMat out(1, 1);
        out(0, 0) = std::exp(-std::norm(s(0))) * std::norm(z(0));
        return out;
    });
    FiberMetricSpec herm = FiberMetricSpec::from_potential(chart, hermpot);
    CVec origin = CVec::Zero(1);
    CMat g0 = connection_from_relative_kahler(herm, origin, z0);
    CHECK(max_abs(g0) <= 1e-6);
    // and at s = 1 the Chern value sbar z
    CVec s1(1);
    s1(0) = 1.0;
    CMat g1 = connection_from_relative_kahler(herm, s1, z0);
    CHECK(std::abs(g1(0, 0) - z0(0)) <= 1e-6);

    // singular fiber block
    ChartFunction g_sing(1, 1, 1, 1, [](const CVec&, const CVec&) {
        CMat out(1, 1);
        out(0, 0) = 0.0;
        return out;
    });
    FiberMetricSpec sing =
        FiberMetricSpec::from_blocks(chart, g_sing, ChartFunction::zero(1, 1, 1, 1));
    CHECK_THROWS_AS(connection_from_relative_kahler(sing, s0, z0), SingularMetric);
}

TEST_CASE("hypercomplex conjugate check on the abelian family") {
    AbelianFamily fam(1);
    FiberFrame fr = unit_frame();
    CVec base(0), fiber(2);
    fiber << Complex(0.2, 0.1), Complex(0.8, -0.3); // (q, p)

    // v = 0 with f = 0
    ChartFunction zero_f(0, 2, 1, 1, [](const CVec&, const CVec&) { return CMat::Zero(1, 1); });
    CHECK(hypercomplex_conjugate_check(fr, CVec::Zero(4), zero_f, base, fiber) <= 1e-14);

    // v = theta(d_Pi) with Hamiltonian potential f_v = (1/4) V p^2 (V = 2)
    CVec p = fiber.tail(1);
    CVec v_w = fam.vertical_to_frame(fam.kodaira_spencer_higgs(p, 0, 0));
    ChartFunction f_v(0, 2, 1, 1, [](const CVec&, const CVec& zf) {
        CMat out(1, 1);
        out(0, 0) = 0.5 * zf(1) * zf(1); // (1/4) * 2 * p^2
        return out;
    });
    CHECK(hypercomplex_conjugate_check(fr, v_w, f_v, base, fiber) <= 1e-8);

    // linearity: scaling v by 2 scales the conjugate by 2
    ChartFunction f_2v(0, 2, 1, 1, [](const CVec&, const CVec& zf) {
        CMat out(1, 1);
        out(0, 0) = zf(1) * zf(1);
        return out;
    });
    CHECK(hypercomplex_conjugate_check(fr, CVec(2.0 * v_w), f_2v, base, fiber) <= 1e-8);
}
