#pragma once

#include <optional>
#include <vector>

#include "holofib/bundle.hpp"

namespace holofib {

/// Pointwise fiber data for a pair of complex structures: real 2m x 2m
/// operators J_A, J_B, J_C and the metric g, plus the pairing between complex
/// fiber coordinates and real basis slots ((x index, y index) per coordinate).
/// Complex-linear maps are recovered from the real operators by complexified
/// application, so conjugations stay unambiguous.
struct FiberFrame {
    RMat g, JA, JB, JC;
    std::vector<std::pair<int, int>> xy;

    int real_dim() const { return int(g.rows()); }
    int complex_dim() const { return int(xy.size()); }

    /// Default pairing: coordinate j -> (x at j, y at m+j).
    static std::vector<std::pair<int, int>> standard_pairing(int m);

    /// J^2 = -id, J_A J_B = J_C, g(J., J.) = g; max violation.
    double structure_defect() const;
};

/// M w for a real operator on a complexified vector.
CVec apply_real(const RMat& M, const CVec& w);

/// (1,0)-projection 1/2 (w - i J w) with respect to J.
CVec project_10(const RMat& J, const CVec& w);

/// Complexified real-basis coordinates of hol/antihol component vectors.
CVec complex_parts_to_real(const FiberFrame& fr, const CVec& hol, const CVec& antihol);
std::pair<CVec, CVec> real_to_complex_parts(const FiberFrame& fr, const CVec& w);

/// Pointwise g-operator norm sqrt(tr(g^{-1} T^t g T)/dim); equals sqrt(2) on
/// J_A - J_B for hypercomplex frames.
double frame_operator_norm(const FiberFrame& fr, const RMat& T);

/// Real fiber isomorphism intertwining J_A and J_B.
struct TwistingMap {
    RMat beta;

    RMat inverse() const;
    /// || beta J_A - J_B beta ||_max plus invertibility check.
    double intertwine_defect(const FiberFrame& fr) const;
};

/// beta(angle) = (1/sqrt 2)(cos a (id + J_C) + sin a (J_A + J_B)); an isometry
/// of g intertwining J_A into J_B.
TwistingMap twist_parametrization(const FiberFrame& fr, double angle);

/// Hypercomplex conjugate of a Higgs value: project_10_B(i J_A conj(theta)).
CVec theta_bar_J(const FiberFrame& fr, const CVec& theta_w);

/// ---- plain mechanism on coefficient matrices ------------------------------

/// Caller-supplied conjugation rule theta -> theta_bar (matrix involution for
/// linear families; no canonical choice exists in general).
using ConjRule = std::function<CMat(const CMat&)>;

struct HiggsSideValue {
    CMat theta; // m x n
    CMat dbar;  // m x n
};
struct FlatSideValue {
    CMat dbar;    // m x n
    CMat partial; // m x n
};

/// theta = 1/2(partial_flat - partial_chern); dbar = dbar_flat - theta_bar.
HiggsSideValue simpson_flat_to_higgs(const CMat& partial_flat, const CMat& partial_chern,
                                     const ConjRule& conj_rule, const CMat& dbar_flat);

/// dbar = dbar_higgs + theta_bar; partial = partial_chern + 2 theta.
FlatSideValue simpson_higgs_to_flat(const CMat& dbar_higgs, const CMat& theta,
                                    const CMat& partial_chern, const ConjRule& conj_rule);

/// ---- twisted mechanism on complexified vertical vectors -------------------
/// All per-direction values are complexified real-basis vectors (length 2m).

struct TwistedConnectionValue {
    std::vector<CVec> dbar_A;
    std::vector<CVec> partial_A;
};
struct TwistedHiggsValue {
    std::vector<CVec> theta;
    std::vector<CVec> dbar_B;
};

/// dbar_A = beta^{-1}(dbar_B - dbar_B0 + theta_bar_J) + dbar_A0;
/// partial_A = chern_A + 2 |J_A - J_B|_g beta^{-1}(theta).
/// Throws DegenerateTwist when |J_A - J_B|_g < 1e-8.
TwistedConnectionValue twisted_higgs_to_connection(
    const FiberFrame& fr, const TwistingMap& beta, const std::vector<CVec>& dbar_B,
    const std::vector<CVec>& dbar_B0, const std::vector<CVec>& dbar_A0,
    const std::vector<CVec>& theta, const std::vector<CVec>& chern_A);

/// theta = 1/2 |J_A - J_B|^{-1} beta(partial_A - chern_A);
/// dbar_B = beta(dbar_A - dbar_A0) + dbar_B0 - theta_bar_J.
TwistedHiggsValue twisted_connection_to_higgs(
    const FiberFrame& fr, const TwistingMap& beta, const std::vector<CVec>& dbar_A,
    const std::vector<CVec>& dbar_A0, const std::vector<CVec>& dbar_B0,
    const std::vector<CVec>& partial_A, const std::vector<CVec>& chern_A);

/// ---- relatively Kahler lift ------------------------------------------------

/// Fiberwise Kahler data in a chart: either the Hermitian fiber block g and
/// the mixed block g_{i betabar} directly, or a real potential phi with
/// g = fiber Hessian and mixed = d_i d_betabar phi.
struct FiberMetricSpec {
    AdaptedChart chart;
    std::optional<ChartFunction> g;       // m x m
    std::optional<ChartFunction> g_mixed; // m x n, entry (beta, i) = g_{i betabar}
    std::optional<ChartFunction> potential; // 1 x 1

    static FiberMetricSpec from_potential(AdaptedChart c, ChartFunction phi);
    static FiberMetricSpec from_blocks(AdaptedChart c, ChartFunction g, ChartFunction g_mixed);
};

/// Gamma_i^alpha = -g^{betabar alpha} g_{i betabar} (m x n). Throws
/// SingularMetric when the fiber block is not invertible positive.
CMat connection_from_relative_kahler(const FiberMetricSpec& metric, const CVec& base,
                                     const CVec& fiber);
/// Single-direction variant (returns column i).
CVec connection_from_relative_kahler(const FiberMetricSpec& metric, const CVec& base,
                                     const CVec& fiber, int direction);

/// Compares the two characterizations of the conjugate of a J_B-holomorphic
/// Hamiltonian field v with potential f_v (iota_v Omega_B = partial f_v):
/// i J_A(conj v) against the omega_B-Hamiltonian field of -1/2 conj(f_v).
double hypercomplex_conjugate_check(const FiberFrame& fr, const CVec& v_w,
                                    const ChartFunction& f_v, const CVec& base,
                                    const CVec& fiber);

} // namespace holofib
