#include "holofib/verify.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <future>
#include <limits>

namespace holofib {

namespace {

using nlohmann::json;

CVec sample_box(Rng& rng, int n, double radius) { return rng.cvec_box(n, radius); }

struct CheckOutcome {
    double max_defect = 0;
    int samples = 0;
};

struct CheckDef {
    std::string id;
    std::string identity;
    double tolerance;
    Expectation expect;
    std::function<CheckOutcome(std::uint64_t seed)> run;
};

// ---- shared helpers --------------------------------------------------------

double gm_loop_flat_defect(const AbelianFamily& fam, const Connection10Spec& conn,
                           const SiegelPoint& pi0, Rng& rng) {
    const int n = fam.base_dim(), k = fam.k();
    CVec dir = sample_box(rng, n, 1.0);
    double norm = std::sqrt(dir.squaredNorm());
    if (norm < 1e-3) dir(0) = 1.0;
    dir /= std::max(norm, 1e-3);
    double radius = 0.005 + 0.015 * rng.u01();
    BasePath loop = BasePath::loop(CVec::Zero(n), dir, radius);

    CVec q = sample_box(rng, k, 2.0), p = sample_box(rng, k, 2.0);
    CVec z0(2 * k);
    z0.head(k) = q;
    z0.tail(k) = p;
    TransportResult res = horizontal_lift(conn, loop, z0);
    if (res.status != TransportStatus::Completed)
        return std::numeric_limits<double>::infinity();
    auto start = fam.flat_coordinates(pi0, q, p);
    auto end = fam.flat_coordinates(pi0, res.endpoint.head(k), res.endpoint.tail(k));
    return std::max(max_abs(CVec(start.xi - end.xi)), max_abs(CVec(start.eta - end.eta)));
}

// The sign-flipped Gauss-Manin lift must break flat-coordinate conservation
// in every suite (guards against vacuous passes).
// Deterministic configuration with a macroscopic loop; the leading-order
// closed-loop cancellation makes tiny radii inconclusive.
CheckDef negative_control_gm(const SuiteConfig& config) {
    return {"zz-negative-control-gm-sign-flip",
            "sign-flipped Gauss-Manin lift must NOT conserve flat coordinates",
            config.tol.ode, Expectation::Above, [](std::uint64_t) {
                AbelianFamily fam(1);
                CMat pi_mat(1, 1);
                pi_mat(0, 0) = kI;
                SiegelPoint pi0(pi_mat);
                Connection10Spec bad = fam.gm_connection_sign_flipped(pi0);
                CVec dir(1);
                dir(0) = 1.0;
                BasePath loop = BasePath::loop(CVec::Zero(1), dir, 0.3);
                CVec z0(2);
                z0(0) = Complex(0.3, 0.2); // q
                z0(1) = Complex(1.0, 0.4); // p
                CheckOutcome out;
                out.samples = 1;
                TransportResult res = horizontal_lift(bad, loop, z0);
                if (res.status != TransportStatus::Completed) {
                    out.max_defect = std::numeric_limits<double>::infinity();
                    return out;
                }
                auto start = fam.flat_coordinates(pi0, z0.head(1), z0.tail(1));
                auto end =
                    fam.flat_coordinates(pi0, res.endpoint.head(1), res.endpoint.tail(1));
                out.max_defect = std::max(max_abs(CVec(start.xi - end.xi)),
                                          max_abs(CVec(start.eta - end.eta)));
                return out;
            }};
}

using RandomMatrixFn = std::function<CMat(const CVec&)>;

// degree <= 2 polynomial in (s, sbar) with matrix coefficients
RandomMatrixFn random_poly_matrix(Rng& rng, int d, int n, double scale) {
    std::vector<CMat> coeffs;
    const int nterms = 1 + 2 * n + 2 * n; // const, linear, quadratic diagonal
    for (int t = 0; t < nterms; ++t) {
        CMat c(d, d);
        for (int r = 0; r < d; ++r)
            for (int cidx = 0; cidx < d; ++cidx) c(r, cidx) = rng.complex_box(scale);
        coeffs.push_back(c);
    }
    return [coeffs, n](const CVec& s) {
        CMat out = coeffs[0];
        int t = 1;
        for (int i = 0; i < n; ++i) {
            out += coeffs[t++] * s(i);
            out += coeffs[t++] * std::conj(s(i));
        }
        for (int i = 0; i < n; ++i) {
            out += coeffs[t++] * (s(i) * s(i));
            out += coeffs[t++] * (s(i) * std::conj(s(i)));
        }
        return out;
    };
}

PrincipalConnectionSpec random_principal(Rng& rng, int n, int d, double scale) {
    std::vector<RandomMatrixFn> a_fns, b_fns;
    for (int i = 0; i < n; ++i) {
        a_fns.push_back(random_poly_matrix(rng, d, n, scale));
        b_fns.push_back(random_poly_matrix(rng, d, n, scale));
    }
    auto pack = [](std::vector<RandomMatrixFn> fns) {
        return [fns](const CVec& s) {
            std::vector<CMat> out;
            out.reserve(fns.size());
            for (const auto& f : fns) out.push_back(f(s));
            return out;
        };
    };
    return PrincipalConnectionSpec{n, d, pack(a_fns), pack(b_fns)};
}

// ---- abelian family checks -------------------------------------------------

std::vector<CheckDef> abelian_checks(const SuiteConfig& config, int k) {
    std::vector<CheckDef> defs;
    const int N = config.samples;
    const Tolerances tol = config.tol;

    defs.push_back({"frame-quaternion-relations",
                    "J_A^2 = J_B^2 = J_C^2 = -id, J_A J_B = J_C = -J_B J_A, g(J.,J.) = g",
                    tol.algebraic, Expectation::Below, [k, N](std::uint64_t seed) {
                        AbelianFamily fam(k);
                        Rng rng(seed);
                        CheckOutcome out;
                        out.samples = N;
                        for (int s = 0; s < N; ++s) {
                            FiberFrame fr =
                                fam.hyperkahler_frame(siegel_sample(k, rng.next_u64()));
                            double d = fr.structure_defect();
                            d = std::max(d, (fr.JB * fr.JA + fr.JC).cwiseAbs().maxCoeff());
                            out.max_defect = std::max(out.max_defect, d);
                        }
                        return out;
                    }});

    defs.push_back({"frame-kahler-forms-antisymmetric",
                    "omega_J = J^t g is antisymmetric for J_A, J_B, J_C", tol.algebraic,
                    Expectation::Below, [k, N](std::uint64_t seed) {
                        AbelianFamily fam(k);
                        Rng rng(seed);
                        CheckOutcome out;
                        out.samples = N;
                        for (int s = 0; s < N; ++s) {
                            FiberFrame fr =
                                fam.hyperkahler_frame(siegel_sample(k, rng.next_u64()));
                            for (const RMat* j : {&fr.JA, &fr.JB, &fr.JC}) {
                                RMat w = j->transpose() * fr.g;
                                out.max_defect = std::max(
                                    out.max_defect, (w + w.transpose()).cwiseAbs().maxCoeff());
                            }
                        }
                        return out;
                    }});

    defs.push_back({"flat-coordinates-roundtrip",
                    "(q,p) -> (xi,eta) -> (q,p) is the identity", tol.algebraic,
                    Expectation::Below, [k, N, config](std::uint64_t seed) {
                        AbelianFamily fam(k);
                        Rng rng(seed);
                        CheckOutcome out;
                        out.samples = N;
                        for (int s = 0; s < N; ++s) {
                            SiegelPoint pi = siegel_sample(k, rng.next_u64());
                            CVec q = sample_box(rng, k, config.fiber_radius);
                            CVec p = sample_box(rng, k, config.fiber_radius);
                            auto fc = fam.flat_coordinates(pi, q, p);
                            auto [q2, p2] = fam.from_flat(pi, fc.xi, fc.eta);
                            out.max_defect = std::max(out.max_defect,
                                                      std::max(max_abs(CVec(q - q2)),
                                                               max_abs(CVec(p - p2))));
                        }
                        return out;
                    }});

    defs.push_back({"higgs-conjugate-equals-dbar-offset",
                    "theta_bar_J of the Kodaira-Spencer Higgs field equals the "
                    "Gauss-Manin dbar offset",
                    tol.algebraic, Expectation::Below, [k, N, config](std::uint64_t seed) {
                        AbelianFamily fam(k);
                        Rng rng(seed);
                        CheckOutcome out;
                        out.samples = N;
                        for (int s = 0; s < N; ++s) {
                            SiegelPoint pi = siegel_sample(k, rng.next_u64());
                            FiberFrame fr = fam.hyperkahler_frame(pi);
                            CVec p = sample_box(rng, k, config.fiber_radius);
                            int i = int(rng.next_u64() % std::uint64_t(k));
                            int j = i + int(rng.next_u64() % std::uint64_t(k - i));
                            CVec lhs = theta_bar_J(
                                fr, fam.vertical_to_frame(fam.kodaira_spencer_higgs(p, i, j)));
                            CVec rhs = fam.vertical_to_frame(fam.dbar_offset(pi, p, i, j));
                            out.max_defect = std::max(out.max_defect, max_abs(CVec(lhs - rhs)));
                        }
                        return out;
                    }});

    auto symplectic_check = [k, N, config](std::uint64_t seed, bool potential_route) {
        AbelianFamily fam(k);
        Rng rng(seed);
        CheckOutcome out;
        out.samples = N;
        for (int s = 0; s < N; ++s) {
            SiegelPoint pi = siegel_sample(k, rng.next_u64());
            CVec q = sample_box(rng, k, config.fiber_radius);
            CVec p = sample_box(rng, k, config.fiber_radius);
            int i = int(rng.next_u64() % std::uint64_t(k));
            int j = i + int(rng.next_u64() % std::uint64_t(k - i));
            AbelianFamily::Vertical v =
                potential_route ? fam.symplectic_connection_potential(pi, q, p, i, j)
                                : fam.symplectic_connection(pi, p, i, j);
            CVec target = -fam.vertical_to_frame(v);
            TwistingMap beta = fam.canonical_twist(pi);
            CVec theta_w = fam.vertical_to_frame(fam.kodaira_spencer_higgs(p, i, j));
            CVec cand = 2.0 * std::sqrt(2.0) * apply_real(beta.inverse(), theta_w);
            out.max_defect = std::max(out.max_defect, max_abs(CVec(target - cand)));
        }
        return out;
    };
    defs.push_back({"symplectic-connection-identity-exact",
                    "partial_A - partial_omega = 2 sqrt2 beta^{-1}(theta), exact coefficients",
                    1e-8, Expectation::Below,
                    [symplectic_check](std::uint64_t seed) { return symplectic_check(seed, false); }});
    defs.push_back({"symplectic-connection-identity-potential",
                    "partial_A - partial_omega = 2 sqrt2 beta^{-1}(theta), Hessian of the "
                    "Hodge-norm potential",
                    tol.first_fd, Expectation::Below,
                    [symplectic_check](std::uint64_t seed) { return symplectic_check(seed, true); }});

    defs.push_back({"symplectic-connection-blocks-agree",
                    "displayed fiber-metric blocks reproduce the symplectic connection",
                    tol.algebraic, Expectation::Below, [k, N, config](std::uint64_t seed) {
                        AbelianFamily fam(k);
                        Rng rng(seed);
                        CheckOutcome out;
                        out.samples = N;
                        for (int s = 0; s < N; ++s) {
                            SiegelPoint pi = siegel_sample(k, rng.next_u64());
                            CVec p = sample_box(rng, k, config.fiber_radius);
                            int i = int(rng.next_u64() % std::uint64_t(k));
                            int j = i + int(rng.next_u64() % std::uint64_t(k - i));
                            CVec a = fam.vertical_to_frame(fam.symplectic_connection(pi, p, i, j));
                            CVec b = fam.vertical_to_frame(
                                fam.symplectic_connection_blocks(pi, p, i, j));
                            out.max_defect = std::max(out.max_defect, max_abs(CVec(a - b)));
                        }
                        return out;
                    }});

    defs.push_back({"gauss-manin-loops-preserve-flat-coordinates",
                    "horizontal transport around closed base loops returns (xi,eta)", tol.ode,
                    Expectation::Below, [k, N](std::uint64_t seed) {
                        AbelianFamily fam(k);
                        Rng rng(seed);
                        CheckOutcome out;
                        out.samples = std::max(2, N / 10);
                        for (int s = 0; s < out.samples; ++s) {
                            SiegelPoint pi0 = siegel_sample(k, rng.next_u64());
                            Connection10Spec gm = fam.gm_connection(pi0);
                            out.max_defect = std::max(out.max_defect,
                                                      gm_loop_flat_defect(fam, gm, pi0, rng));
                        }
                        return out;
                    }});

    defs.push_back({"kodaira-spencer-higgs-pseudo-curvature-g11",
                    "G^{1,1} of the abelian Higgs field with the canonical dbar vanishes", 1e-8,
                    Expectation::Below, [k, N, config](std::uint64_t seed) {
                        AbelianFamily fam(k);
                        Rng rng(seed);
                        CheckOutcome out;
                        out.samples = N;
                        SiegelPoint pi0 = siegel_sample(k, rng.next_u64());
                        HiggsSpec higgs = fam.ks_higgs_spec(pi0);
                        DbarSpec dbar = fam.canonical_dbar(pi0);
                        CVec w0 = CVec::Zero(fam.base_dim());
                        for (int s = 0; s < N; ++s) {
                            CVec zf = sample_box(rng, 2 * k, config.fiber_radius);
                            MixedTensor g11 = pseudo_curvature_g11(higgs, dbar, w0, zf);
                            out.max_defect = std::max(out.max_defect, g11.max_abs());
                        }
                        return out;
                    }});

    defs.push_back({"kodaira-spencer-higgs-pseudo-curvature-g20",
                    "G^{2,0} = [theta, theta] of the abelian Higgs field vanishes", 1e-8,
                    Expectation::Below, [k, N, config](std::uint64_t seed) {
                        AbelianFamily fam(k);
                        Rng rng(seed);
                        CheckOutcome out;
                        out.samples = N;
                        SiegelPoint pi0 = siegel_sample(k, rng.next_u64());
                        HiggsSpec higgs = fam.ks_higgs_spec(pi0);
                        CVec w0 = CVec::Zero(fam.base_dim());
                        for (int s = 0; s < N; ++s) {
                            CVec zf = sample_box(rng, 2 * k, config.fiber_radius);
                            MixedTensor g20 = pseudo_curvature_g20(higgs, w0, zf);
                            out.max_defect = std::max(out.max_defect, g20.max_abs());
                        }
                        return out;
                    }});

    defs.push_back({"hamiltonian-vector-field",
                    "iota_theta(dp ^ dq) = dH with H = (i/4) V_ab p^a p^b", tol.algebraic,
                    Expectation::Below, [k, N, config](std::uint64_t seed) {
                        AbelianFamily fam(k);
                        Rng rng(seed);
                        CheckOutcome out;
                        out.samples = N;
                        for (int s = 0; s < N; ++s) {
                            CVec p = sample_box(rng, k, config.fiber_radius);
                            int i = int(rng.next_u64() % std::uint64_t(k));
                            int j = i + int(rng.next_u64() % std::uint64_t(k - i));
                            out.max_defect =
                                std::max(out.max_defect, fam.hamiltonian_check(p, i, j));
                        }
                        return out;
                    }});

    defs.push_back({"canonical-twist-invariants",
                    "beta beta^{-1} = id, beta J_A = J_B beta, beta is a g-isometry",
                    tol.algebraic, Expectation::Below, [k, N](std::uint64_t seed) {
                        AbelianFamily fam(k);
                        Rng rng(seed);
                        CheckOutcome out;
                        out.samples = N;
                        for (int s = 0; s < N; ++s) {
                            SiegelPoint pi = siegel_sample(k, rng.next_u64());
                            FiberFrame fr = fam.hyperkahler_frame(pi);
                            TwistingMap beta = fam.canonical_twist(pi);
                            double d = beta.intertwine_defect(fr);
                            RMat prod = beta.beta * beta.inverse();
                            d = std::max(d, (prod - RMat::Identity(prod.rows(), prod.cols()))
                                                .cwiseAbs()
                                                .maxCoeff());
                            d = std::max(d, (beta.beta.transpose() * fr.g * beta.beta - fr.g)
                                                .cwiseAbs()
                                                .maxCoeff());
                            out.max_defect = std::max(out.max_defect, d);
                        }
                        return out;
                    }});

    defs.push_back({"twist-uniqueness-least-squares",
                    "solving for beta^{-1} in span{id,J_A,J_B,J_C} recovers "
                    "sqrt(1/2)(id - J_C)",
                    tol.algebraic, Expectation::Below, [k, N, config](std::uint64_t seed) {
                        AbelianFamily fam(k);
                        Rng rng(seed);
                        CheckOutcome out;
                        out.samples = std::max(3, N / 10);
                        Eigen::Vector4d expected(std::sqrt(0.5), 0.0, 0.0, -std::sqrt(0.5));
                        for (int s = 0; s < out.samples; ++s) {
                            SiegelPoint pi = siegel_sample(k, rng.next_u64());
                            CVec p = sample_box(rng, k, config.fiber_radius);
                            if (max_abs(p) < 0.2) p(0) += 1.0; // keep the span nondegenerate
                            Eigen::Vector4d a = fam.twist_span_coefficients(pi, p);
                            out.max_defect = std::max(out.max_defect,
                                                      (a - expected).cwiseAbs().maxCoeff());
                        }
                        return out;
                    }});

    defs.push_back({"twisted-mechanism-roundtrip",
                    "Higgs -> connection -> Higgs is the identity on coefficient data", 1e-12,
                    Expectation::Below, [k, N, config](std::uint64_t seed) {
                        AbelianFamily fam(k);
                        Rng rng(seed);
                        CheckOutcome out;
                        out.samples = N;
                        const int n = fam.base_dim(), dim = 4 * k;
                        for (int s = 0; s < N; ++s) {
                            SiegelPoint pi = siegel_sample(k, rng.next_u64());
                            FiberFrame fr = fam.hyperkahler_frame(pi);
                            TwistingMap beta =
                                twist_parametrization(fr, 2 * M_PI * rng.u01());
                            auto mk = [&](double r) {
                                std::vector<CVec> vs;
                                for (int d = 0; d < n; ++d) vs.push_back(sample_box(rng, dim, r));
                                return vs;
                            };
                            std::vector<CVec> dbar_B = mk(1.0), dbar_B0 = mk(1.0),
                                              dbar_A0 = mk(1.0), theta = mk(1.0),
                                              chern_A = mk(1.0);
                            TwistedConnectionValue cv = twisted_higgs_to_connection(
                                fr, beta, dbar_B, dbar_B0, dbar_A0, theta, chern_A);
                            TwistedHiggsValue hv = twisted_connection_to_higgs(
                                fr, beta, cv.dbar_A, dbar_A0, dbar_B0, cv.partial_A, chern_A);
                            for (int d = 0; d < n; ++d) {
                                out.max_defect = std::max(
                                    out.max_defect, max_abs(CVec(hv.theta[d] - theta[d])));
                                out.max_defect = std::max(
                                    out.max_defect, max_abs(CVec(hv.dbar_B[d] - dbar_B[d])));
                            }
                        }
                        return out;
                    }});

    defs.push_back({"plain-mechanism-roundtrip",
                    "flat -> Higgs -> flat is the identity on coefficient data", 1e-12,
                    Expectation::Below, [k, N](std::uint64_t seed) {
                        Rng rng(seed);
                        CheckOutcome out;
                        out.samples = N;
                        const int m = 2 * k, n = std::max(1, k);
                        for (int s = 0; s < N; ++s) {
                            auto mk = [&]() {
                                CMat c(m, n);
                                for (int r = 0; r < m; ++r)
                                    for (int cc = 0; cc < n; ++cc)
                                        c(r, cc) = rng.complex_box(1.0);
                                return c;
                            };
                            CMat conj_mat(m, m);
                            for (int r = 0; r < m; ++r)
                                for (int cc = 0; cc < m; ++cc)
                                    conj_mat(r, cc) = rng.complex_box(1.0);
                            ConjRule rule = [conj_mat](const CMat& th) {
                                return CMat(conj_mat * th.conjugate());
                            };
                            CMat dbar_f = mk(), theta = mk(), chern = mk();
                            FlatSideValue flat = simpson_higgs_to_flat(dbar_f, theta, chern, rule);
                            HiggsSideValue back =
                                simpson_flat_to_higgs(flat.partial, chern, rule, flat.dbar);
                            out.max_defect = std::max(out.max_defect,
                                                      max_abs(CMat(back.theta - theta)));
                            out.max_defect = std::max(out.max_defect,
                                                      max_abs(CMat(back.dbar - dbar_f)));
                        }
                        return out;
                    }});

    defs.push_back({"gauss-manin-dolbeault-closedness",
                    "mixed antiholomorphic second derivatives of the lift coefficients commute",
                    tol.first_fd, Expectation::Below, [k, N, config](std::uint64_t seed) {
                        AbelianFamily fam(k);
                        Rng rng(seed);
                        CheckOutcome out;
                        out.samples = std::max(2, std::min(N, 10));
                        for (int s = 0; s < out.samples; ++s) {
                            // well-conditioned period matrix keeps the nested-FD
                            // truncation term small
                            SiegelPoint raw = siegel_sample(k, rng.next_u64());
                            SiegelPoint pi0(raw.Pi() +
                                            kI * RMat::Identity(k, k).cast<Complex>());
                            Connection10Spec gm = fam.gm_connection(pi0);
                            CVec w0 = CVec::Zero(fam.base_dim());
                            CVec zf = sample_box(rng, 2 * k, config.fiber_radius);
                            out.max_defect = std::max(
                                out.max_defect, dolbeault_closedness_defect(gm, w0, zf));
                        }
                        return out;
                    }});

    defs.push_back({"gauss-manin-kodaira-spencer-tensor",
                    "finite-difference KS tensor of the lift equals (i/2) V Pi_y^{-1} on "
                    "the qbar legs",
                    tol.first_fd, Expectation::Below, [k, N, config](std::uint64_t seed) {
                        AbelianFamily fam(k);
                        Rng rng(seed);
                        CheckOutcome out;
                        out.samples = std::max(2, N / 5);
                        for (int s = 0; s < out.samples; ++s) {
                            SiegelPoint pi0 = siegel_sample(k, rng.next_u64());
                            Connection10Spec gm = fam.gm_connection(pi0);
                            CVec w0 = CVec::Zero(fam.base_dim());
                            CVec zf = sample_box(rng, 2 * k, config.fiber_radius);
                            MixedTensor ks = ks_tensor(gm, w0, zf);
                            RMat piyinv = pi0.Pi_y_inv();
                            for (int d = 0; d < fam.base_dim(); ++d) {
                                auto [i, j] = fam.index_pair(d);
                                CMat expected =
                                    0.5 * kI * (fam.variation(i, j) * piyinv).cast<Complex>();
                                for (int a = 0; a < 2 * k; ++a)
                                    for (int b = 0; b < 2 * k; ++b) {
                                        Complex want = (a < k && b < k) ? expected(a, b)
                                                                        : Complex(0, 0);
                                        out.max_defect =
                                            std::max(out.max_defect,
                                                     std::abs(ks.at({a, d, b}) - want));
                                    }
                            }
                        }
                        return out;
                    }});

    defs.push_back({"dbar-offset-not-fiberwise-holomorphic",
                    "the Gauss-Manin dbar offset has mixed defect (1/2) max |Pi_y^{-1} V|",
                    tol.first_fd, Expectation::Below, [k, N, config](std::uint64_t seed) {
                        AbelianFamily fam(k);
                        Rng rng(seed);
                        CheckOutcome out;
                        out.samples = std::max(2, N / 5);
                        const int n = fam.base_dim(), m = 2 * k;
                        for (int s = 0; s < out.samples; ++s) {
                            SiegelPoint pi0 = siegel_sample(k, rng.next_u64());
                            CMat base_pi = pi0.Pi();
                            auto bar = [base_pi, k, n](const CVec& w, const CVec& zf) {
                                // coefficients of dbar_{B,0} in the (q,p) chart
                                AbelianFamily fl(k);
                                CMat pi = base_pi;
                                for (int d = 0; d < n; ++d) {
                                    auto [i, j] = fl.index_pair(d);
                                    pi += w(d) * fl.variation(i, j).cast<Complex>();
                                }
                                auto lu = pi.imag().cast<Complex>().lu();
                                CVec p = zf.tail(k);
                                CMat out2 = CMat::Zero(2 * k, n);
                                for (int d = 0; d < n; ++d) {
                                    auto [i, j] = fl.index_pair(d);
                                    out2.col(d).tail(k) =
                                        0.5 * kI *
                                        lu.solve(CVec(fl.variation(i, j).cast<Complex>() *
                                                      p.conjugate()));
                                }
                                return out2;
                            };
                            DbarSpec dbar(fam.chart(), ChartFunction(n, m, m, n, bar));
                            CVec w0 = CVec::Zero(n);
                            CVec zf = sample_box(rng, 2 * k, config.fiber_radius);
                            double fd = mixed_relative_holomorphy_defect(dbar, w0, zf);
                            double exact = 0;
                            RMat piyinv = pi0.Pi_y_inv();
                            for (int d = 0; d < n; ++d) {
                                auto [i, j] = fam.index_pair(d);
                                exact = std::max(
                                    exact,
                                    0.5 * (piyinv * fam.variation(i, j)).cwiseAbs().maxCoeff());
                            }
                            out.max_defect = std::max(out.max_defect, std::abs(fd - exact));
                        }
                        return out;
                    }});

    defs.push_back(negative_control_gm(config));
    return defs;
}

// ---- hermitian family ------------------------------------------------------

std::vector<CheckDef> hermitian_checks(const SuiteConfig& config) {
    std::vector<CheckDef> defs;
    const int N = config.samples;
    const Tolerances tol = config.tol;

    defs.push_back({"chern-connection-coefficient",
                    "Gamma of h = e^{-|s|^2} equals sbar z", tol.first_fd, Expectation::Below,
                    [N, config](std::uint64_t seed) {
                        HermitianBundleSpec spec = gaussian_line_bundle();
                        Rng rng(seed);
                        CheckOutcome out;
                        out.samples = N;
                        for (int s = 0; s < N; ++s) {
                            CVec sp = sample_box(rng, 1, config.base_box_radius);
                            CVec zp = sample_box(rng, 1, config.fiber_radius);
                            CMat g = chern_connection_hermitian(spec, sp, zp);
                            Complex expected = std::conj(sp(0)) * zp(0);
                            out.max_defect =
                                std::max(out.max_defect, std::abs(g(0, 0) - expected));
                        }
                        return out;
                    }});

    defs.push_back({"chern-identity",
                    "omega - omega_nabla = -i <F_h z, z>_h", tol.first_fd, Expectation::Below,
                    [N, config](std::uint64_t seed) {
                        HermitianBundleSpec spec = gaussian_line_bundle();
                        Rng rng(seed);
                        CheckOutcome out;
                        out.samples = N;
                        for (int s = 0; s < N; ++s) {
                            CVec sp = sample_box(rng, 1, config.base_box_radius);
                            CVec zp = sample_box(rng, 1, config.fiber_radius);
                            out.max_defect =
                                std::max(out.max_defect, chern_identity_defect(spec, sp, zp));
                        }
                        return out;
                    }});

    defs.push_back({"curvature-correspondence-line",
                    "F^{1,1} of the induced connection matches the principal curvature "
                    "acting on the fiber",
                    tol.first_fd, Expectation::Below, [N, config](std::uint64_t seed) {
                        PrincipalConnectionSpec p = to_principal(gaussian_line_bundle());
                        Rng rng(seed);
                        CheckOutcome out;
                        out.samples = N;
                        for (int s = 0; s < N; ++s) {
                            CVec sp = sample_box(rng, 1, config.base_box_radius);
                            CVec zp = sample_box(rng, 1, config.fiber_radius);
                            out.max_defect = std::max(
                                out.max_defect, curvature_correspondence_check(p, sp, zp));
                        }
                        return out;
                    }});

    defs.push_back({"curvature-correspondence-rank2-polynomial",
                    "dual-route F^{1,1} agreement for random rank-2 polynomial data",
                    tol.first_fd, Expectation::Below, [N, config](std::uint64_t seed) {
                        Rng rng(seed);
                        CheckOutcome out;
                        out.samples = N;
                        for (int s = 0; s < N; ++s) {
                            PrincipalConnectionSpec p = random_principal(rng, 2, 2, 0.4);
                            CVec sp = sample_box(rng, 2, config.base_box_radius);
                            CVec zp = sample_box(rng, 2, config.fiber_radius);
                            out.max_defect = std::max(
                                out.max_defect, curvature_correspondence_check(p, sp, zp));
                        }
                        return out;
                    }});

    defs.push_back({"chern-relative-holomorphy",
                    "the induced Chern connection is relatively holomorphic", 1e-8,
                    Expectation::Below, [N, config](std::uint64_t seed) {
                        Connection10Spec conn = chern_connection_spec(gaussian_line_bundle());
                        Rng rng(seed);
                        CheckOutcome out;
                        out.samples = N;
                        for (int s = 0; s < N; ++s) {
                            CVec sp = sample_box(rng, 1, config.base_box_radius);
                            CVec zp = sample_box(rng, 1, config.fiber_radius);
                            out.max_defect = std::max(
                                out.max_defect, relative_holomorphy_defect(conn, sp, zp));
                        }
                        return out;
                    }});

    defs.push_back({"f11-pure-matches-general",
                    "the one-term and five-term curvature formulas agree with zero dbar",
                    tol.algebraic, Expectation::Below, [N, config](std::uint64_t seed) {
                        Connection10Spec conn = chern_connection_spec(gaussian_line_bundle());
                        DbarSpec dbar = DbarSpec::canonical(conn.chart);
                        Rng rng(seed);
                        CheckOutcome out;
                        out.samples = N;
                        for (int s = 0; s < N; ++s) {
                            CVec sp = sample_box(rng, 1, config.base_box_radius);
                            CVec zp = sample_box(rng, 1, config.fiber_radius);
                            MixedTensor a = curvature_f11(conn, dbar, sp, zp);
                            MixedTensor b = curvature_f11_pure(conn, sp, zp);
                            double d = 0;
                            for (std::size_t t = 0; t < a.values().size(); ++t)
                                d = std::max(d, std::abs(a.values()[t] - b.values()[t]));
                            out.max_defect = std::max(out.max_defect, d);
                        }
                        return out;
                    }});

    defs.push_back(negative_control_gm(config));
    return defs;
}

// ---- incomplete family -----------------------------------------------------

std::vector<CheckDef> incomplete_checks(const SuiteConfig& config) {
    std::vector<CheckDef> defs;
    const int N = config.samples;
    const Tolerances tol = config.tol;

    defs.push_back({"transport-closed-form",
                    "tau(gamma)(z0) = z0/(1 - z0) along gamma(t) = t", tol.ode,
                    Expectation::Below, [N](std::uint64_t seed) {
                        IncompleteFamily fam;
                        Rng rng(seed);
                        CheckOutcome out;
                        out.samples = N;
                        for (int s = 0; s < N; ++s) {
                            CVec z0(1);
                            z0(0) = rng.complex_box(0.5);
                            TransportResult r = horizontal_lift(fam.conn, fam.unit_path(), z0);
                            if (r.status != TransportStatus::Completed) {
                                out.max_defect = std::numeric_limits<double>::infinity();
                                continue;
                            }
                            out.max_defect = std::max(
                                out.max_defect,
                                std::abs(r.endpoint(0) - fam.analytic_transport(1.0, z0(0))));
                        }
                        return out;
                    }});

    defs.push_back({"blow-up-at-unit-start",
                    "z0 = 1 blows up with t* in [0.99, 1.0] at threshold 1e8", 0.5,
                    Expectation::Below, [](std::uint64_t) {
                        IncompleteFamily fam;
                        CVec z0(1);
                        z0(0) = 1.0;
                        CompletenessReport rep =
                            completeness_probe(fam.conn, fam.unit_path(), z0, 1e8);
                        CheckOutcome out;
                        out.samples = 1;
                        bool ok = rep.status == TransportStatus::BlewUp &&
                                  rep.blowup_time >= 0.99 && rep.blowup_time <= 1.0;
                        out.max_defect = ok ? 0.0 : 1.0;
                        return out;
                    }});

    defs.push_back({"completeness-inside-disk",
                    "|z0| <= 0.5 transports complete", 0.5, Expectation::Below,
                    [N](std::uint64_t seed) {
                        IncompleteFamily fam;
                        Rng rng(seed);
                        CheckOutcome out;
                        out.samples = N;
                        for (int s = 0; s < N; ++s) {
                            CVec z0(1);
                            z0(0) = rng.complex_box(0.35);
                            CompletenessReport rep =
                                completeness_probe(fam.conn, fam.unit_path(), z0, 1e8);
                            if (rep.status != TransportStatus::Completed) out.max_defect = 1.0;
                        }
                        return out;
                    }});

    defs.push_back({"rk4-convergence-order",
                    "endpoint error on dz/dt = z^2 scales as step^4 (fitted slope 4 +- 0.3)",
                    0.3, Expectation::Below, [](std::uint64_t) {
                        IncompleteFamily fam;
                        CVec z0(1);
                        z0(0) = 0.5;
                        std::vector<double> steps{1e-2, 5e-3, 2.5e-3};
                        std::vector<double> logh, loge;
                        for (double h : steps) {
                            TransportOptions opt;
                            opt.step = h;
                            TransportResult r =
                                horizontal_lift(fam.conn, fam.unit_path(), z0, opt);
                            double err = std::abs(r.endpoint(0) - Complex(1.0, 0.0));
                            logh.push_back(std::log(h));
                            loge.push_back(std::log(err));
                        }
                        double mh = (logh[0] + logh[1] + logh[2]) / 3;
                        double me = (loge[0] + loge[1] + loge[2]) / 3;
                        double num = 0, den = 0;
                        for (int i = 0; i < 3; ++i) {
                            num += (logh[i] - mh) * (loge[i] - me);
                            den += (logh[i] - mh) * (logh[i] - mh);
                        }
                        CheckOutcome out;
                        out.samples = 3;
                        out.max_defect = std::abs(num / den - 4.0);
                        return out;
                    }});

    defs.push_back({"transport-jacobian-analytic",
                    "endpoint Jacobian at z0 = 0.5 is (1/(1-z0)^2, 0)", tol.ode,
                    Expectation::Below, [](std::uint64_t) {
                        IncompleteFamily fam;
                        CVec z0(1);
                        z0(0) = 0.5;
                        TransportJacobian jac =
                            transport_jacobian(fam.conn, fam.unit_path(), z0);
                        CheckOutcome out;
                        out.samples = 1;
                        out.max_defect = std::max(std::abs(jac.hol(0, 0) - Complex(4.0, 0.0)),
                                                  std::abs(jac.antihol(0, 0)));
                        return out;
                    }});

    defs.push_back({"path-independence-reparametrization",
                    "transport agrees along two parametrizations of the same segment", tol.ode,
                    Expectation::Below, [N](std::uint64_t seed) {
                        IncompleteFamily fam;
                        Rng rng(seed);
                        CheckOutcome out;
                        out.samples = std::max(2, N / 10);
                        BasePath a = fam.unit_path();
                        BasePath b = BasePath::reparametrized(a);
                        for (int s = 0; s < out.samples; ++s) {
                            CVec z0(1);
                            z0(0) = rng.complex_box(0.4);
                            out.max_defect = std::max(
                                out.max_defect, path_independence_check(fam.conn, a, b, z0));
                        }
                        return out;
                    }});

    defs.push_back(negative_control_gm(config));
    return defs;
}

// ---- disk family -----------------------------------------------------------

std::vector<CheckDef> disk_checks(const SuiteConfig& config) {
    std::vector<CheckDef> defs;
    const int N = config.samples;
    const Tolerances tol = config.tol;

    defs.push_back({"transport-analytic-form",
                    "tau_t(x + iy) = e^{-t} x + i e^{t} y for t in {0.25, 0.5, 1}", tol.ode,
                    Expectation::Below, [N](std::uint64_t seed) {
                        DiskFamily fam;
                        Rng rng(seed);
                        CheckOutcome out;
                        out.samples = N;
                        const double times[3] = {0.25, 0.5, 1.0};
                        for (int s = 0; s < N; ++s) {
                            CVec z0(1);
                            z0(0) = rng.complex_box(0.9);
                            double t = times[s % 3];
                            TransportResult r =
                                horizontal_lift(fam.conn, fam.real_path(t), z0);
                            out.max_defect = std::max(
                                out.max_defect,
                                std::abs(r.endpoint(0) - fam.analytic_transport(t, z0(0))));
                        }
                        return out;
                    }});

    defs.push_back({"antiholomorphic-jacobian",
                    "endpoint Jacobian at t = 1 is (cosh 1, -sinh 1)", 1e-4, Expectation::Below,
                    [](std::uint64_t) {
                        DiskFamily fam;
                        CVec z0(1);
                        z0(0) = Complex(0.3, 0.2);
                        TransportJacobian jac =
                            transport_jacobian(fam.conn, fam.real_path(1.0), z0);
                        CheckOutcome out;
                        out.samples = 1;
                        out.max_defect =
                            std::max(std::abs(jac.hol(0, 0) - std::cosh(1.0)),
                                     std::abs(jac.antihol(0, 0) + std::sinh(1.0)));
                        return out;
                    }});

    defs.push_back({"relative-holomorphy-defect-one",
                    "|d_zbar Gamma| = 1 for Gamma = -zbar", 1e-8, Expectation::Below,
                    [N, config](std::uint64_t seed) {
                        DiskFamily fam;
                        Rng rng(seed);
                        CheckOutcome out;
                        out.samples = N;
                        for (int s = 0; s < N; ++s) {
                            CVec sp = sample_box(rng, 1, config.base_box_radius);
                            CVec zp = sample_box(rng, 1, 0.9);
                            double d = relative_holomorphy_defect(fam.conn, sp, zp);
                            out.max_defect = std::max(out.max_defect, std::abs(d - 1.0));
                        }
                        return out;
                    }});

    defs.push_back({"kahler-potential-lift",
                    "Gamma from the potential equals -zbar", tol.first_fd, Expectation::Below,
                    [N, config](std::uint64_t seed) {
                        DiskFamily fam;
                        FiberMetricSpec metric =
                            FiberMetricSpec::from_potential(fam.conn.chart, fam.potential);
                        Rng rng(seed);
                        CheckOutcome out;
                        out.samples = N;
                        for (int s = 0; s < N; ++s) {
                            CVec sp = sample_box(rng, 1, config.base_box_radius);
                            CVec zp = sample_box(rng, 1, 0.9);
                            CMat g = connection_from_relative_kahler(metric, sp, zp);
                            out.max_defect = std::max(out.max_defect,
                                                      std::abs(g(0, 0) + std::conj(zp(0))));
                        }
                        return out;
                    }});

    defs.push_back({"zz-negative-control-kodaira-spencer",
                    "the Kodaira-Spencer tensor of Gamma = -zbar must NOT vanish", 1e-3,
                    Expectation::Above, [config](std::uint64_t seed) {
                        DiskFamily fam;
                        Rng rng(seed);
                        CVec sp = sample_box(rng, 1, config.base_box_radius);
                        CVec zp = sample_box(rng, 1, 0.9);
                        MixedTensor ks = ks_tensor(fam.conn, sp, zp);
                        CheckOutcome out;
                        out.samples = 1;
                        out.max_defect = ks.max_abs();
                        return out;
                    }});

    defs.push_back(negative_control_gm(config));
    return defs;
}

// ---- flat quotient ---------------------------------------------------------

std::vector<CheckDef> flat_quotient_checks(const SuiteConfig& config, double lambda) {
    std::vector<CheckDef> defs;
    const int N = config.samples;
    const Tolerances tol = config.tol;

    auto samples_for = [](Rng& rng, int count) {
        std::vector<CVec> zs;
        for (int s = 0; s < count; ++s) {
            CVec z(1);
            z(0) = rng.complex_box(1.5);
            if (std::abs(z(0)) < 0.1) z(0) += 1.0; // stay inside C^*
            zs.push_back(z);
        }
        return zs;
    };

    defs.push_back({"monodromy-multiplier",
                    "one loop around the puncture multiplies the fiber by 1/lambda", tol.ode,
                    Expectation::Below, [N, lambda, samples_for](std::uint64_t seed) {
                        FlatQuotientFamily fam(lambda);
                        Rng rng(seed);
                        CheckOutcome out;
                        out.samples = std::max(3, N / 5);
                        std::vector<CVec> zs = samples_for(rng, out.samples);
                        std::vector<CVec> ends = monodromy(fam.conn, fam.standard_loop(1), zs);
                        Complex mult = fam.expected_multiplier(1);
                        for (std::size_t i = 0; i < zs.size(); ++i)
                            out.max_defect = std::max(out.max_defect,
                                                      std::abs(ends[i](0) - mult * zs[i](0)));
                        return out;
                    }});

    defs.push_back({"monodromy-loop-squared",
                    "traversing the loop twice squares the monodromy map", tol.ode,
                    Expectation::Below, [N, lambda, samples_for](std::uint64_t seed) {
                        FlatQuotientFamily fam(lambda);
                        Rng rng(seed);
                        CheckOutcome out;
                        out.samples = std::max(3, N / 5);
                        std::vector<CVec> zs = samples_for(rng, out.samples);
                        std::vector<CVec> ends = monodromy(fam.conn, fam.standard_loop(2), zs);
                        Complex mult = fam.expected_multiplier(2);
                        for (std::size_t i = 0; i < zs.size(); ++i)
                            out.max_defect = std::max(out.max_defect,
                                                      std::abs(ends[i](0) - mult * zs[i](0)));
                        return out;
                    }});

    defs.push_back({"monodromy-contractible-loop",
                    "a loop not enclosing the puncture transports by the identity", tol.ode,
                    Expectation::Below, [N, lambda, samples_for](std::uint64_t seed) {
                        FlatQuotientFamily fam(lambda);
                        Rng rng(seed);
                        CheckOutcome out;
                        out.samples = std::max(3, N / 5);
                        CVec center(1), dir(1);
                        center(0) = 1.0;
                        dir(0) = 1.0;
                        BasePath loop = BasePath::loop(center, dir, 0.3);
                        std::vector<CVec> zs = samples_for(rng, out.samples);
                        std::vector<CVec> ends = monodromy(fam.conn, loop, zs);
                        for (std::size_t i = 0; i < zs.size(); ++i)
                            out.max_defect =
                                std::max(out.max_defect, std::abs(ends[i](0) - zs[i](0)));
                        return out;
                    }});

    defs.push_back({"monodromy-homotopy-invariance",
                    "loops of different radii around the puncture give the same map", tol.ode,
                    Expectation::Below, [N, lambda, samples_for](std::uint64_t seed) {
                        FlatQuotientFamily fam(lambda);
                        Rng rng(seed);
                        CheckOutcome out;
                        out.samples = std::max(3, N / 5);
                        CVec center = CVec::Zero(1), dir(1);
                        dir(0) = 1.0;
                        BasePath small = BasePath::loop(center, dir, 0.7);
                        BasePath large = BasePath::loop(center, dir, 1.3);
                        std::vector<CVec> zs = samples_for(rng, out.samples);
                        std::vector<CVec> e1 = monodromy(fam.conn, small, zs);
                        std::vector<CVec> e2 = monodromy(fam.conn, large, zs);
                        for (std::size_t i = 0; i < zs.size(); ++i)
                            out.max_defect =
                                std::max(out.max_defect, std::abs(e1[i](0) - e2[i](0)));
                        return out;
                    }});

    defs.push_back({"transport-group-law",
                    "tau(gamma1 * gamma2) = tau(gamma2) o tau(gamma1)", 2 * tol.ode,
                    Expectation::Below, [N, lambda, samples_for](std::uint64_t seed) {
                        FlatQuotientFamily fam(lambda);
                        Rng rng(seed);
                        CheckOutcome out;
                        out.samples = std::max(3, N / 5);
                        BasePath g1{1, [](double t) {
                                        CVec s(1);
                                        s(0) = std::exp(kI * (M_PI * t));
                                        return s;
                                    },
                                    [](double t) {
                                        CVec s(1);
                                        s(0) = kI * M_PI * std::exp(kI * (M_PI * t));
                                        return s;
                                    },
                                    {}};
                        BasePath g2{1, [](double t) {
                                        CVec s(1);
                                        s(0) = std::exp(kI * (M_PI * (1 + t)));
                                        return s;
                                    },
                                    [](double t) {
                                        CVec s(1);
                                        s(0) = kI * M_PI * std::exp(kI * (M_PI * (1 + t)));
                                        return s;
                                    },
                                    {}};
                        BasePath both = BasePath::concat(g1, g2);
                        std::vector<CVec> zs = samples_for(rng, out.samples);
                        for (const CVec& z0 : zs) {
                            TransportResult ab = horizontal_lift(fam.conn, both, z0);
                            TransportResult a = horizontal_lift(fam.conn, g1, z0);
                            TransportResult b = horizontal_lift(fam.conn, g2, a.endpoint);
                            out.max_defect = std::max(
                                out.max_defect, max_abs(CVec(ab.endpoint - b.endpoint)));
                        }
                        return out;
                    }});

    defs.push_back(negative_control_gm(config));
    return defs;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.16e", v);
    return buf;
}

} // namespace

VerificationReport run_suite(const SuiteConfig& config) {
    if (config.samples < 1) throw DimensionMismatch("run_suite: sample count must be >= 1");
    if (!(config.tol.algebraic > 0) || !(config.tol.first_fd > 0) ||
        !(config.tol.second_fd > 0) || !(config.tol.ode > 0))
        throw DimensionMismatch("run_suite: tolerances must be positive");

    FamilyId id = parse_family_id(config.family);
    std::vector<CheckDef> defs;
    switch (id.kind) {
        case FamilyKind::Abelian: defs = abelian_checks(config, id.k); break;
        case FamilyKind::HermitianLineGaussian: defs = hermitian_checks(config); break;
        case FamilyKind::Incomplete: defs = incomplete_checks(config); break;
        case FamilyKind::DiskNonholomorphic: defs = disk_checks(config); break;
        case FamilyKind::FlatQuotient: defs = flat_quotient_checks(config, id.lambda); break;
    }

    // independent seeds per check id: results do not depend on scheduling
    std::vector<std::future<CheckOutcome>> futures;
    futures.reserve(defs.size());
    for (const CheckDef& def : defs) {
        std::uint64_t seed = derive_seed(config.seed, def.id);
        futures.push_back(std::async(std::launch::async, def.run, seed));
    }

    VerificationReport report;
    report.family = config.family;
    report.seed = config.seed;
    report.samples = config.samples;
    report.tol = config.tol;
    report.compiler = __VERSION__;
    report.eigen_version = std::to_string(EIGEN_WORLD_VERSION) + "." +
                           std::to_string(EIGEN_MAJOR_VERSION) + "." +
                           std::to_string(EIGEN_MINOR_VERSION);

    for (std::size_t i = 0; i < defs.size(); ++i) {
        CheckRecord rec;
        rec.id = defs[i].id;
        rec.identity = defs[i].identity;
        rec.tolerance = defs[i].tolerance;
        rec.expect = defs[i].expect;
        try {
            CheckOutcome out = futures[i].get();
            rec.max_defect = out.max_defect;
            rec.samples = out.samples;
        } catch (const std::exception&) {
            rec.max_defect = std::numeric_limits<double>::infinity();
            rec.samples = 0;
        }
        rec.pass = rec.expect == Expectation::Below ? (rec.max_defect <= rec.tolerance)
                                                    : (rec.max_defect > rec.tolerance);
        report.checks.push_back(std::move(rec));
    }
    std::sort(report.checks.begin(), report.checks.end(),
              [](const CheckRecord& a, const CheckRecord& b) { return a.id < b.id; });
    report.pass = std::all_of(report.checks.begin(), report.checks.end(),
                              [](const CheckRecord& r) { return r.pass; });
    return report;
}

std::string report_serialize(const VerificationReport& report, bool with_timestamp) {
    json j;
    j["schema_version"] = report.schema_version;
    j["family"] = report.family;
    j["seed"] = report.seed;
    j["samples"] = report.samples;
    j["tolerances"] = {{"algebraic", format_double(report.tol.algebraic)},
                       {"first_fd", format_double(report.tol.first_fd)},
                       {"second_fd", format_double(report.tol.second_fd)},
                       {"ode", format_double(report.tol.ode)}};
    j["environment"] = {{"compiler", report.compiler}, {"eigen", report.eigen_version}};
    if (with_timestamp) {
        j["generated_at_unix_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                                        std::chrono::system_clock::now().time_since_epoch())
                                        .count();
    }
    json checks = json::array();
    for (const CheckRecord& rec : report.checks) {
        json c;
        c["id"] = rec.id;
        c["identity"] = rec.identity;
        c["samples"] = rec.samples;
        c["max_defect"] = format_double(rec.max_defect);
        c["tolerance"] = format_double(rec.tolerance);
        c["expect"] = rec.expect == Expectation::Below ? "below" : "above";
        c["pass"] = rec.pass;
        checks.push_back(c);
    }
    j["checks"] = checks;
    j["pass"] = report.pass;
    return j.dump(2) + "\n";
}

} // namespace holofib
