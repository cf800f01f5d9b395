#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <utility>

#include "holofib/errors.hpp"

namespace holofib {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

bool all_finite(const CMat& m);
bool all_finite(const CVec& v);

/// Largest absolute entry; 0 for empty.
double max_abs(const CMat& m);
double max_abs(const CVec& v);

/// Deterministic, platform-independent uniform sampling on top of a 64-bit
/// SplitMix-style generator. std::uniform_real_distribution is avoided so
/// that reports are reproducible bit-for-bit across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0,1).
    double u01() { return double(next_u64() >> 11) * (1.0 / 9007199254740992.0); }

    /// Uniform in [-1,1].
    double sym() { return 2.0 * u01() - 1.0; }

    Complex complex_box(double radius = 1.0) { return {radius * sym(), radius * sym()}; }

    CVec cvec_box(int n, double radius = 1.0) {
        CVec v(n);
        for (int i = 0; i < n; ++i) v(i) = complex_box(radius);
        return v;
    }

private:
    std::uint64_t state_;
};

/// Derives an independent stream for a named sub-task (check id, sample index).
std::uint64_t derive_seed(std::uint64_t master, const std::string& tag);

/// Symmetric k x k complex matrix with positive definite imaginary part.
class SiegelPoint {
public:
    explicit SiegelPoint(CMat pi);

    int degree() const { return int(pi_.rows()); }
    const CMat& Pi() const { return pi_; }
    RMat Pi_x() const { return pi_.real(); }
    RMat Pi_y() const { return pi_.imag(); }
    RMat Pi_y_inv() const;

private:
    CMat pi_;
};

/// Pi = X + iY with X symmetric entries in [-1,1] and Y = A A^T + 0.1 I.
SiegelPoint siegel_sample(int k, std::uint64_t seed);

struct PosdefResult {
    bool ok;
    double min_eigenvalue;
};

/// Hermitian within 1e-10 (absolute, on the unit-normalized matrix) and
/// positive definite. Throws DimensionMismatch on non-square input.
PosdefResult posdef_check(const CMat& m);

} // namespace holofib
