#pragma once

#include <functional>
#include <vector>

#include "kslab/grid.hpp"

namespace kslab {
namespace quad {

// Fixed 7-point Gauss-Legendre rule on [a, b].
double gauss(const std::function<double(double)>& f, double a, double b);

// Composite Gauss over the grid intervals, clipped to [a, b].
double over_grid(const std::function<double(double)>& f, const std::vector<double>& nodes,
                 double a, double b);

// Adaptive quadrature (Gauss-Kronrod) with a relative tolerance.
double adaptive(const std::function<double(double)>& f, double a, double b, double rel_tol);

// Cumulative integrals of f over the grid: out[i] = int_{nodes[0]}^{nodes[i]} f.
std::vector<double> cumulative(const std::function<double(double)>& f,
                               const std::vector<double>& nodes);

// Tail of int_{edge}^inf f given a declared algebraic decay f ~ A x^{-q},
// with the amplitude pinned at the last node value. Throws TailDivergence
// for q <= 1.
double algebraic_tail(double f_edge, double edge, double q);

} // namespace quad
} // namespace kslab
