#pragma once

#include <vector>

#include "holofib/chart.hpp"

namespace holofib {

/// Coefficients of a (1,0)-connection in an adapted chart:
///   H_i = d_i + gamma_hol[.][i] d_alpha + gamma_antihol[.][i] d_alphabar.
/// Both coefficient functions are m x n (row = fiber index, column = base
/// direction). Pure connections carry a zero antiholomorphic block.
struct Connection10Spec {
    AdaptedChart chart;
    ChartFunction gamma_hol;
    ChartFunction gamma_antihol;

    Connection10Spec(AdaptedChart c, ChartFunction hol, ChartFunction antihol);
    static Connection10Spec pure(AdaptedChart c, ChartFunction hol);
};

/// Coefficients Gamma_{jbar}^gamma of a dbar-operator (zero for the canonical
/// dbar of a holomorphic fibration in adapted holomorphic coordinates).
struct DbarSpec {
    AdaptedChart chart;
    ChartFunction gamma_bar;

    DbarSpec(AdaptedChart c, ChartFunction bar);
    static DbarSpec canonical(AdaptedChart c);
};

/// A dbar-operator together with the conjugate-vertical coefficients
/// Gamma_{jbar}^{betabar} of a (0,1)-connection lifting it.
struct LiftedDbarSpec {
    DbarSpec dbar;
    ChartFunction gamma_bar_antihol;

    LiftedDbarSpec(DbarSpec d, ChartFunction bar_antihol);
};

/// theta = theta_i^alpha ds^i (x) d_alpha.
struct HiggsSpec {
    AdaptedChart chart;
    ChartFunction theta;

    HiggsSpec(AdaptedChart c, ChartFunction t);
};

enum class IndexRole { FiberHol, FiberAntihol, BaseHol, BaseAntihol };

/// Point-evaluated complex array with an explicit index signature.
class MixedTensor {
public:
    MixedTensor(std::vector<IndexRole> roles, std::vector<int> dims, CVec base, CVec fiber);

    int rank() const { return int(dims_.size()); }
    int dim(int i) const { return dims_[i]; }
    const std::vector<IndexRole>& signature() const { return roles_; }
    const CVec& base_point() const { return base_; }
    const CVec& fiber_point() const { return fiber_; }

    Complex& at(std::initializer_list<int> idx);
    Complex at(std::initializer_list<int> idx) const;

    const std::vector<Complex>& values() const { return values_; }
    double max_abs() const;

    /// Marks a pair of (equal-dimension) slots as antisymmetric.
    void declare_antisymmetric(int a, int b);
    /// Max |T(..a..b..) + T(..b..a..)| over declared pairs (0 when none).
    double antisymmetry_defect() const;

private:
    std::size_t offset(std::initializer_list<int> idx) const;

    std::vector<IndexRole> roles_;
    std::vector<int> dims_;
    std::vector<std::size_t> strides_;
    std::vector<Complex> values_;
    std::vector<std::pair<int, int>> antisym_;
    CVec base_, fiber_;
};

/// Holomorphic chart change: s' = sigma(s), z' = tau(s, z) with invertible
/// fiber Jacobian. Jacobians fall back to Wirtinger finite differences when
/// no analytic maps are registered.
struct TransitionMap {
    int n, m;
    std::function<CVec(const CVec&)> base_map;
    std::function<CVec(const CVec&, const CVec&)> fiber_map;
    std::function<CMat(const CVec&)> base_jacobian;                   // optional
    std::function<CMat(const CVec&, const CVec&)> fiber_jacobian_z;   // optional
    std::function<CMat(const CVec&, const CVec&)> fiber_jacobian_s;   // optional

    CMat jacobian_base(const CVec& s) const;              // A = ds'/ds  (n x n)
    CMat jacobian_fiber_z(const CVec& s, const CVec& z) const; // B = dz'/dz (m x m)
    CMat jacobian_fiber_s(const CVec& s, const CVec& z) const; // C = dz'/ds (m x n)
};

/// Principal-connection data A = A_i(s) ds^i + B_{jbar}(s) dsbar^j for a
/// linear action on C^d, with infinitesimal action xi |-> (z -> -xi z).
struct PrincipalConnectionSpec {
    int n;       // base complex dimension
    int rep_dim; // d
    std::function<std::vector<CMat>(const CVec&)> A;
    std::function<std::vector<CMat>(const CVec&)> B;
};

struct CurvatureOptions {
    double rel_hol_tol = 1e-6;
};

/// max_{alpha,beta,i} |d_{zbar^beta} Gamma_i^alpha| at the point.
double relative_holomorphy_defect(const Connection10Spec& conn, const CVec& base,
                                  const CVec& fiber);

/// Same with Gamma_{jbar}^gamma (lifting condition test).
double mixed_relative_holomorphy_defect(const DbarSpec& dbar, const CVec& base,
                                        const CVec& fiber);

/// max |d_{zbar^beta} theta_i^alpha|.
double higgs_relative_holomorphy_defect(const HiggsSpec& higgs, const CVec& base,
                                        const CVec& fiber);

/// Five-term (1,1)-curvature coefficient array, signature (alpha, i, jbar).
/// Requires the connection to be relatively holomorphic at the point.
MixedTensor curvature_f11(const Connection10Spec& conn, const DbarSpec& dbar,
                          const CVec& base, const CVec& fiber, CurvatureOptions opt = {});

/// One-term form -(d_{jbar} Gamma_i^alpha) valid for pure connections with
/// the canonical dbar.
MixedTensor curvature_f11_pure(const Connection10Spec& conn, const CVec& base,
                               const CVec& fiber, CurvatureOptions opt = {});

/// (2,0)-curvature R_{ij}^beta, antisymmetric in (i,j); zero when n = 1.
MixedTensor curvature_f20(const Connection10Spec& conn, const CVec& base, const CVec& fiber);

/// Pseudo-curvature G^{1,1}, signature (alpha, i, jbar); requires the Higgs
/// field to be relatively holomorphic at the point.
MixedTensor pseudo_curvature_g11(const HiggsSpec& higgs, const DbarSpec& dbar,
                                 const CVec& base, const CVec& fiber,
                                 CurvatureOptions opt = {});

/// G^{2,0} = [theta, theta], antisymmetric in (i,j); zero when n = 1.
MixedTensor pseudo_curvature_g20(const HiggsSpec& higgs, const CVec& base, const CVec& fiber);

/// Kodaira-Spencer coefficients (d_{betabar} Gamma_i^alpha), signature
/// (alpha, i, betabar).
MixedTensor ks_tensor(const Connection10Spec& conn, const CVec& base, const CVec& fiber);

/// R_{A1} coefficients d_{jbar}Gamma_i^alpha
///   + (d_{betabar}Gamma_i^alpha) Gamma_{jbar}^{betabar}.
MixedTensor dbar_decomposition_ra1(const Connection10Spec& conn, const LiftedDbarSpec& lifted,
                                   const CVec& base, const CVec& fiber);

/// Max violation of the mixed second-derivative symmetries
/// d_{kbar}d_{jbar}Gamma = d_{jbar}d_{kbar}Gamma and
/// d_{betabar}d_{jbar}Gamma = d_{jbar}d_{betabar}Gamma.
double dolbeault_closedness_defect(const Connection10Spec& conn, const CVec& base,
                                   const CVec& fiber);

/// Cech cocycle c = B^{-1} C, signature (alpha, i).
MixedTensor cech_cocycle(const TransitionMap& t, const CVec& base, const CVec& fiber);

struct InducedConnection {
    Connection10Spec conn;
    LiftedDbarSpec dbar;
};

/// Connection and lifted dbar induced on the associated bundle by a linear
/// principal connection: Gamma_i = -(A_i z), lifts by conjugate data.
InducedConnection induced_connection_from_principal(const PrincipalConnectionSpec& p);

/// Max componentwise difference between curvature_f11 of the induced
/// connection and the principal curvature acted on the fiber point.
double curvature_correspondence_check(const PrincipalConnectionSpec& p, const CVec& base,
                                      const CVec& fiber);

} // namespace holofib
