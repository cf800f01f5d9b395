#pragma once

#include <string>

#include "holofib/simpson.hpp"
#include "holofib/transport.hpp"

namespace holofib {

/// Universal family of cotangent bundles of principally polarized abelian
/// varieties over the degree-k Siegel upper half-space.
///
/// Conventions used throughout:
///  - base directions are indexed by pairs (i,j) with 0 <= i <= j < k; the
///    direction (i,j) deforms the period matrix by the symmetric matrix
///    V_ij with (V_ij)_{mu nu} = delta_{i mu} delta_{j nu} +
///    delta_{j mu} delta_{i nu} (so V_ii carries a 2 on the diagonal);
///  - fiber coordinates are (q^1..q^k, p^1..p^k); real 4k x 4k operators use
///    the basis order (q_x, q_y, p_x, p_y);
///  - q is a representative in C^k; no lattice reduction is performed.
class AbelianFamily {
public:
    explicit AbelianFamily(int k);

    int k() const { return k_; }
    int base_dim() const { return k_ * (k_ + 1) / 2; }
    int fiber_dim() const { return 2 * k_; }

    int flat_index(int i, int j) const;              // (i,j), i<=j -> direction
    std::pair<int, int> index_pair(int flat) const;  // inverse
    RMat variation(int i, int j) const;              // V_ij

    /// Vertical vector split into coefficient blocks over d_q, d_p, d_qbar, d_pbar.
    struct Vertical {
        CVec dq, dp, dqbar, dpbar;
    };
    Vertical zero_vertical() const;
    /// Complexified coordinates in the real basis (q_x, q_y, p_x, p_y).
    CVec vertical_to_frame(const Vertical& v) const;
    Vertical frame_to_vertical(const CVec& w) const;

    /// Hyperkahler data (g, J_A, J_B, J_C) at Pi; constant along fibers.
    FiberFrame hyperkahler_frame(const SiegelPoint& pi) const;

    struct FlatCoords {
        CVec xi, eta;
    };
    FlatCoords flat_coordinates(const SiegelPoint& pi, const CVec& q, const CVec& p) const;
    std::pair<CVec, CVec> from_flat(const SiegelPoint& pi, const CVec& xi,
                                    const CVec& eta) const;

    /// Horizontal lift of the direction (i,j): coefficient blocks over
    /// d_q, d_p, d_pbar (flat-coordinate-preserving connection).
    Vertical gauss_manin_lift(const SiegelPoint& pi, const CVec& q, const CVec& p, int i,
                              int j) const;

    /// theta(d_ij) = -(i/2) V_ij p . d_q.
    Vertical kodaira_spencer_higgs(const CVec& p, int i, int j) const;

    /// (i/2) Pi_y^{-1} V_ij conj(p) . d_p.
    Vertical dbar_offset(const SiegelPoint& pi, const CVec& p, int i, int j) const;

    /// Symplectic-connection coefficients i V_ij p . d_q + i Pi_y^{-1} V_ij p . d_pbar.
    Vertical symplectic_connection(const SiegelPoint& pi, const CVec& p, int i, int j) const;

    /// Same value reconstructed from the displayed fiber-metric blocks in the
    /// (xi, eta) chart (exact algebra).
    Vertical symplectic_connection_blocks(const SiegelPoint& pi, const CVec& p, int i,
                                          int j) const;

    /// Same value via finite-difference Hessians of the Hodge-norm potential
    /// phi = p^dagger Pi_y p through the generic relatively-Kahler machinery.
    Vertical symplectic_connection_potential(const SiegelPoint& pi, const CVec& q, const CVec& p,
                                             int i, int j) const;

    /// Fiber metric block over (xi, eta) and its inverse (displayed formulas).
    CMat fiber_metric_block(const SiegelPoint& pi) const;
    CMat fiber_metric_block_inverse(const SiegelPoint& pi) const;
    /// Mixed terms (g_{ij, xibar}, g_{ij, etabar}).
    std::pair<CVec, CVec> mixed_metric_terms(const SiegelPoint& pi, const CVec& p, int i,
                                             int j) const;

    /// Covector defect of iota_theta(dp ^ dq) = dH_ij, H_ij = (i/4) V_ab p^a p^b.
    double hamiltonian_check(const CVec& p, int i, int j) const;

    /// beta with beta^{-1} = sqrt(1/2)(id - J_C).
    TwistingMap canonical_twist(const SiegelPoint& pi) const;

    /// Charts over base coordinates w (Pi = Pi0 + sum w_d V_d) and fiber (q,p).
    AdaptedChart chart() const { return AdaptedChart(base_dim(), fiber_dim()); }
    Connection10Spec gm_connection(const SiegelPoint& pi0) const;
    /// Deliberately wrong sign on the d_p block; negative-control input.
    Connection10Spec gm_connection_sign_flipped(const SiegelPoint& pi0) const;
    HiggsSpec ks_higgs_spec(const SiegelPoint& pi0) const;
    DbarSpec canonical_dbar(const SiegelPoint& pi0) const;
    /// phi(w, (xi,eta)) = p^dagger Pi_y(w) p.
    ChartFunction hodge_potential(const SiegelPoint& pi0) const;

    /// Least-squares coefficients (a0,a1,a2,a3) of beta^{-1} in
    /// span{id, J_A, J_B, J_C} solving partial_A - partial_omega = 2 sqrt2 beta^{-1}(theta)
    /// over all base directions at (pi, p).
    Eigen::Vector4d twist_span_coefficients(const SiegelPoint& pi, const CVec& p) const;

private:
    CVec flat_xi(const CMat& pi, const CVec& q, const CVec& p) const;
    CVec flat_eta(const CMat& pi, const CVec& q, const CVec& p) const;
    std::pair<CVec, CVec> from_flat_raw(const CMat& pi, const CVec& xi, const CVec& eta) const;
    CMat pi_of_w(const CMat& pi0, const CVec& w) const;

    int k_;
};

/// Hermitian holomorphic vector bundle given by a frame metric h(s).
struct HermitianBundleSpec {
    int n;    // base complex dimension
    int rank; // m
    ChartFunction h; // base-only function, rank x rank

    HermitianBundleSpec(int n_, int rank_, ChartFunction h_);
};

/// Gamma_i^alpha = -h^{betabar alpha} z^gamma d_i h_{gamma betabar} (m x n).
CMat chern_connection_hermitian(const HermitianBundleSpec& spec, const CVec& s, const CVec& z);

/// The same data packaged as a pure Connection10Spec on the chart (s, z).
Connection10Spec chern_connection_spec(const HermitianBundleSpec& spec);

/// A_i = (d_i H . H^{-1})^T, B = 0 (Chern connection as principal data).
PrincipalConnectionSpec to_principal(const HermitianBundleSpec& spec);

/// Max defect over (i,j) of omega - omega_nabla = -i <F_h z, z>_h.
double chern_identity_defect(const HermitianBundleSpec& spec, const CVec& s, const CVec& z);

/// h(s) = e^{-|s|^2} on a line bundle over C.
HermitianBundleSpec gaussian_line_bundle();

/// Trivial bundle C x C with Gamma = z^2; incomplete along gamma(t) = t.
struct IncompleteFamily {
    Connection10Spec conn;

    IncompleteFamily();
    BasePath unit_path() const;
    /// z(t) = z0 / (1 - t z0).
    Complex analytic_transport(double t, Complex z0) const;
};

/// Disk bundle with Gamma = -zbar from the potential
/// phi = |z|^2 + 2|s|^2 + (sbar z^2 + s zbar^2)/2; transport is not holomorphic.
struct DiskFamily {
    Connection10Spec conn;
    ChartFunction potential;

    DiskFamily();
    BasePath real_path(double tmax) const; // gamma(u) = u * tmax
    /// tau_t(x + iy) = e^{-t) x + i e^{t} y (valid for the linear ODE).
    Complex analytic_transport(double t, Complex z0) const;
};

/// C*-fiber over C* with monodromy multiplication by lambda:
/// Gamma(s, z) = c z / s, c = i log(lambda) / (2 pi); loop transport is z/lambda.
struct FlatQuotientFamily {
    double lambda;
    Connection10Spec conn;

    explicit FlatQuotientFamily(double lambda_);
    BasePath standard_loop(int turns = 1) const; // unit circle around 0 from s=1
    Complex expected_multiplier(int turns) const;
};

/// Catalog ids: "abelian:k=K", "hermitian:line-gaussian", "incomplete",
/// "disk-nonholomorphic", "flat-quotient:lambda=L".
enum class FamilyKind { Abelian, HermitianLineGaussian, Incomplete, DiskNonholomorphic, FlatQuotient };

struct FamilyId {
    FamilyKind kind;
    int k = 1;
    double lambda = 2.0;
};

FamilyId parse_family_id(const std::string& id); // throws UnknownFamily

} // namespace holofib
