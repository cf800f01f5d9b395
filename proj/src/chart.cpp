#include "holofib/chart.hpp"

namespace holofib {

CMat ChartFunction::eval(const CVec& base, const CVec& fiber) const {
    if (base.size() != base_dim_ || fiber.size() != fiber_dim_)
        throw DimensionMismatch("ChartFunction::eval: point dimensions do not match chart");
    CMat out = eval_(base, fiber);
    if (out.rows() != rows_ || out.cols() != cols_)
        throw DimensionMismatch("ChartFunction::eval: evaluator output shape mismatch");
    if (!all_finite(out)) throw NonFiniteEvaluation("ChartFunction::eval: non-finite output");
    return out;
}

namespace {

// Derivative of f along the real line coord -> coord + t*dir, dir in {1, i}.
CMat directional_fd(const ChartFunction& f, const CVec& base, const CVec& fiber,
                    Side side, int index, Complex dir, double h) {
    auto displaced = [&](double t) {
        CVec b = base, z = fiber;
        if (side == Side::Base)
            b(index) += t * dir;
        else
            z(index) += t * dir;
        return f.eval(b, z);
    };
    CMat fp1 = displaced(h), fm1 = displaced(-h);
    CMat fp2 = displaced(2 * h), fm2 = displaced(-2 * h);
    return (-fp2 + 8.0 * fp1 - 8.0 * fm1 + fm2) / (12.0 * h);
}

Complex coord_at(const CVec& base, const CVec& fiber, Side side, int index) {
    return side == Side::Base ? base(index) : fiber(index);
}

void check_target(const ChartFunction& f, Target t) {
    int dim = t.side == Side::Base ? f.base_dim() : f.fiber_dim();
    if (t.index < 0 || t.index >= dim)
        throw IndexOutOfRange("wirtinger_derivative: coordinate index out of range");
}

} // namespace

CMat wirtinger_derivative(const ChartFunction& f, const CVec& base, const CVec& fiber,
                          Target target) {
    check_target(f, target);
    if (const auto& a = f.analytic(target.side, target.kind))
        return (*a)(base, fiber, target.index);
    const double h = fd_step(std::abs(coord_at(base, fiber, target.side, target.index)));
    CMat dx = directional_fd(f, base, fiber, target.side, target.index, Complex(1, 0), h);
    CMat dy = directional_fd(f, base, fiber, target.side, target.index, kI, h);
    if (target.kind == Kind::Hol) return 0.5 * (dx - kI * dy);
    return 0.5 * (dx + kI * dy);
}

CMat wirtinger_second_derivative(const ChartFunction& f, const CVec& base, const CVec& fiber,
                                 Target outer, Target inner) {
    check_target(f, outer);
    check_target(f, inner);
    const double h = fd_step_outer(std::abs(coord_at(base, fiber, outer.side, outer.index)));
    auto inner_at = [&](Complex offset) {
        CVec b = base, z = fiber;
        if (outer.side == Side::Base)
            b(outer.index) += offset;
        else
            z(outer.index) += offset;
        return wirtinger_derivative(f, b, z, inner);
    };
    auto along = [&](Complex dir) {
        CMat fp1 = inner_at(dir * h), fm1 = inner_at(-dir * h);
        CMat fp2 = inner_at(dir * (2 * h)), fm2 = inner_at(-dir * (2 * h));
        return CMat((-fp2 + 8.0 * fp1 - 8.0 * fm1 + fm2) / (12.0 * h));
    };
    CMat dx = along(Complex(1, 0));
    CMat dy = along(kI);
    if (outer.kind == Kind::Hol) return 0.5 * (dx - kI * dy);
    return 0.5 * (dx + kI * dy);
}

} // namespace holofib
