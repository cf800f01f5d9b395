#include "holofib/linalg.hpp"

#include <cmath>

namespace holofib {

bool all_finite(const CMat& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            const Complex& c = m(i, j);
            if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
        }
    return true;
}

bool all_finite(const CVec& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v(i).real()) || !std::isfinite(v(i).imag())) return false;
    }
    return true;
}

double max_abs(const CMat& m) {
    double r = 0.0;
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) r = std::max(r, std::abs(m(i, j)));
    return r;
}

double max_abs(const CVec& v) {
    double r = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) r = std::max(r, std::abs(v(i)));
    return r;
}

std::uint64_t derive_seed(std::uint64_t master, const std::string& tag) {
    // FNV-1a over the tag, mixed with the master seed.
    std::uint64_t h = 1469598103934665603ULL ^ master;
    for (unsigned char c : tag) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

SiegelPoint::SiegelPoint(CMat pi) : pi_(std::move(pi)) {
    if (pi_.rows() != pi_.cols() || pi_.rows() < 1)
        throw DimensionMismatch("SiegelPoint: matrix must be square and nonempty");
    if (!all_finite(pi_)) throw NonFiniteEvaluation("SiegelPoint: non-finite entries");
    const double scale = std::max(1e-300, max_abs(pi_));
    if (max_abs(CMat(pi_ - pi_.transpose())) > 1e-12 * scale)
        throw DimensionMismatch("SiegelPoint: matrix is not symmetric");
    PosdefResult pd = posdef_check(pi_.imag().cast<Complex>());
    if (!pd.ok)
        throw SingularMetric("SiegelPoint: Im(Pi) is not positive definite (min eig " +
                             std::to_string(pd.min_eigenvalue) + ")");
}

RMat SiegelPoint::Pi_y_inv() const {
    return pi_.imag().inverse();
}

SiegelPoint siegel_sample(int k, std::uint64_t seed) {
    if (k < 1) throw DimensionMismatch("siegel_sample: k must be >= 1");
    Rng rng(derive_seed(seed, "siegel_sample"));
    RMat x(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = i; j < k; ++j) {
            double v = rng.sym();
            x(i, j) = v;
            x(j, i) = v;
        }
    RMat a(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) a(i, j) = rng.sym();
    RMat y = a * a.transpose() + 0.1 * RMat::Identity(k, k);
    CMat pi = x.cast<Complex>() + kI * y.cast<Complex>();
    return SiegelPoint(pi);
}

PosdefResult posdef_check(const CMat& m) {
    if (m.rows() != m.cols())
        throw DimensionMismatch("posdef_check: matrix must be square");
    if (m.rows() == 0) return {false, 0.0};
    const double scale = max_abs(m);
    const double norm = scale > 0 ? scale : 1.0;
    CMat herm_defect = m - m.adjoint();
    bool hermitian = max_abs(herm_defect) <= 1e-10 * norm;
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (m + CMat(m.adjoint())));
    double min_eig = es.eigenvalues().minCoeff();
    return {hermitian && min_eig > 0.0, min_eig};
}

} // namespace holofib
