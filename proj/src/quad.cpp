#include "kslab/quad.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "kslab/errors.hpp"

namespace kslab {
namespace quad {

namespace {
// 7-point Gauss-Legendre abscissae/weights on [-1, 1].
constexpr double kX[7] = {
    -0.9491079123427585245261897, -0.7415311855993944398638648,
    -0.4058451513773971669066064, 0.0,
    0.4058451513773971669066064,  0.7415311855993944398638648,
    0.9491079123427585245261897};
constexpr double kW[7] = {
    0.1294849661688696932706114, 0.2797053914892766679014678,
    0.3818300505051189449503698, 0.4179591836734693877551020,
    0.3818300505051189449503698, 0.2797053914892766679014678,
    0.1294849661688696932706114};
} // namespace

double gauss(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double acc = 0.0;
    for (int i = 0; i < 7; ++i) acc += kW[i] * f(c + h * kX[i]);
    return acc * h;
}

double over_grid(const std::function<double(double)>& f, const std::vector<double>& nodes,
                 double a, double b) {
    if (!(b > a)) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        const double lo = std::max(a, nodes[i]);
        const double hi = std::min(b, nodes[i + 1]);
        if (hi > lo) acc += gauss(f, lo, hi);
    }
    // Pieces of [a, b] outside the grid range.
    if (a < nodes.front()) acc += gauss(f, a, std::min(b, nodes.front()));
    if (b > nodes.back()) acc += gauss(f, std::max(a, nodes.back()), b);
    return acc;
}

double adaptive(const std::function<double(double)>& f, double a, double b, double rel_tol) {
    using boost::math::quadrature::gauss_kronrod;
    return gauss_kronrod<double, 15>::integrate(f, a, b, 12, rel_tol);
}

std::vector<double> cumulative(const std::function<double(double)>& f,
                               const std::vector<double>& nodes) {
    std::vector<double> out(nodes.size(), 0.0);
    for (std::size_t i = 1; i < nodes.size(); ++i)
        out[i] = out[i - 1] + gauss(f, nodes[i - 1], nodes[i]);
    return out;
}

double algebraic_tail(double f_edge, double edge, double q) {
    if (!(q > 1.0)) throw TailDivergence("declared decay too slow for tail quadrature");
    // int_edge^inf A x^-q dx with A = f_edge * edge^q.
    return f_edge * edge / (q - 1.0);
}

} // namespace quad
} // namespace kslab
