#pragma once

#include <functional>
#include <optional>
#include <string>

#include "holofib/linalg.hpp"

namespace holofib {

/// Local adapted coordinates (s^1..s^n, z^1..z^m): the projection is (s,z) -> s.
struct AdaptedChart {
    int n; // base complex dimension
    int m; // fiber complex dimension

    AdaptedChart(int n_, int m_) : n(n_), m(m_) {
        if (n < 1 || m < 1)
            throw DimensionMismatch("AdaptedChart: base and fiber dimensions must be positive");
    }
};

enum class Side { Base, Fiber };
enum class Kind { Hol, Antihol };

/// Coordinate selector for a Wirtinger derivative.
struct Target {
    Side side;
    int index;
    Kind kind;
};

/// A smooth map (base point, fiber point) -> complex matrix of declared shape.
/// The universal carrier of chart coefficients (Gamma, theta, metrics, potentials).
/// Evaluators must be deterministic and thread-safe; analytic first derivatives
/// may be registered and then override finite differences.
class ChartFunction {
public:
    using Evaluator = std::function<CMat(const CVec&, const CVec&)>;
    using DerivEvaluator = std::function<CMat(const CVec&, const CVec&, int index)>;

    ChartFunction(int base_dim, int fiber_dim, int rows, int cols, Evaluator f)
        : base_dim_(base_dim), fiber_dim_(fiber_dim), rows_(rows), cols_(cols),
          eval_(std::move(f)) {}

    static ChartFunction zero(int base_dim, int fiber_dim, int rows, int cols) {
        return ChartFunction(base_dim, fiber_dim, rows, cols,
                             [rows, cols](const CVec&, const CVec&) {
                                 return CMat::Zero(rows, cols);
                             });
    }

    int base_dim() const { return base_dim_; }
    int fiber_dim() const { return fiber_dim_; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }

    /// Evaluate with shape and finiteness checks.
    CMat eval(const CVec& base, const CVec& fiber) const;

    void register_derivative(Side side, Kind kind, DerivEvaluator d) {
        analytic_[slot(side, kind)] = std::move(d);
    }
    const std::optional<DerivEvaluator>& analytic(Side side, Kind kind) const {
        return analytic_[slot(side, kind)];
    }

private:
    static int slot(Side side, Kind kind) {
        return (side == Side::Base ? 0 : 2) + (kind == Kind::Hol ? 0 : 1);
    }

    int base_dim_, fiber_dim_, rows_, cols_;
    Evaluator eval_;
    std::optional<DerivEvaluator> analytic_[4];
};

/// Step for first-order Wirtinger stencils.
inline double fd_step(double coord_abs) { return 1e-4 * std::max(1.0, coord_abs); }
/// Outer step for nested second derivatives (~1e-5 accuracy floor on generic data).
inline double fd_step_outer(double coord_abs) { return 1e-3 * std::max(1.0, coord_abs); }

/// 4th-order central Wirtinger derivative 1/2(d_x -+ i d_y) of the targeted
/// coordinate; analytic derivative used when registered.
CMat wirtinger_derivative(const ChartFunction& f, const CVec& base, const CVec& fiber,
                          Target target);

/// Nested mixed second derivative: outer finite difference of the inner
/// Wirtinger derivative (inner uses analytic data when available).
CMat wirtinger_second_derivative(const ChartFunction& f, const CVec& base, const CVec& fiber,
                                 Target outer, Target inner);

} // namespace holofib
