#pragma once

#include <cstddef>
#include <vector>

namespace kslab {

enum class Variable { soliton, parabolic };

// Strictly increasing positive nodes in gamma (soliton) or zeta (parabolic).
// Default grading is geometric with a configurable points-per-decade count.
struct RadialGrid {
    std::vector<double> nodes;
    Variable tag = Variable::soliton;
    double points_per_decade = 64.0;

    static RadialGrid geometric(double lo, double hi, double ppd, Variable tag);

    std::size_t size() const { return nodes.size(); }
    double front() const { return nodes.front(); }
    double back() const { return nodes.back(); }
    void validate() const; // throws ConfigError on invariant violations
};

// Monotone cubic (Fritsch-Carlson) interpolant on a nonuniform grid.
class Pchip {
  public:
    Pchip() = default;
    Pchip(std::vector<double> x, std::vector<double> y);

    double operator()(double x) const;
    double deriv(double x) const;
    // Exact integral of the cubic interpolant over [a, b] (clipped to the grid).
    double integrate(double a, double b) const;
    bool empty() const { return x_.empty(); }

    const std::vector<double>& x() const { return x_; }
    const std::vector<double>& y() const { return y_; }

  private:
    std::vector<double> x_, y_, d_;
    std::size_t locate(double x) const;
    double segment_integral(std::size_t i, double a, double b) const;
};

// Samples of a radial function plus the fixed documented interpolation rule.
struct RadialField {
    RadialGrid grid;
    std::vector<double> values;
    Pchip interp;

    RadialField() = default;
    RadialField(RadialGrid g, std::vector<double> v);

    template <typename F>
    static RadialField sample(const RadialGrid& g, F&& f) {
        std::vector<double> v(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) v[i] = f(g.nodes[i]);
        return RadialField(g, std::move(v));
    }

    double operator()(double x) const { return interp(x); }
    double deriv(double x) const { return interp.deriv(x); }
    std::size_t size() const { return values.size(); }
    void check_finite() const; // throws RuntimeError on NaN/Inf
};

} // namespace kslab
