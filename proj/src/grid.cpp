#include "kslab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "kslab/errors.hpp"

namespace kslab {

RadialGrid RadialGrid::geometric(double lo, double hi, double ppd, Variable tag) {
    if (!(lo > 0.0) || !(hi > lo) || !(ppd > 1.0))
        throw ConfigError("geometric grid requires 0 < lo < hi and ppd > 1");
    RadialGrid g;
    g.tag = tag;
    g.points_per_decade = ppd;
    const double decades = std::log10(hi / lo);
    const auto n = static_cast<std::size_t>(std::ceil(decades * ppd)) + 1;
    g.nodes.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        g.nodes[i] = lo * std::pow(10.0, decades * static_cast<double>(i) / static_cast<double>(n - 1));
    g.nodes.back() = hi;
    return g;
}

void RadialGrid::validate() const {
    if (nodes.size() < 4) throw ConfigError("grid needs at least 4 nodes");
    if (!(nodes.front() > 0.0)) throw ConfigError("grid nodes must be positive");
    for (std::size_t i = 1; i < nodes.size(); ++i)
        if (!(nodes[i] > nodes[i - 1])) throw ConfigError("grid nodes must be strictly increasing");
}

namespace {

std::vector<double> pchip_slopes(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    std::vector<double> d(n, 0.0);
    if (n == 1) return d;
    std::vector<double> h(n - 1), del(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x[i + 1] - x[i];
        del[i] = (y[i + 1] - y[i]) / h[i];
    }
    if (n == 2) {
        d[0] = d[1] = del[0];
        return d;
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (del[i - 1] * del[i] <= 0.0) {
            d[i] = 0.0;
        } else {
            const double w1 = 2.0 * h[i] + h[i - 1];
            const double w2 = h[i] + 2.0 * h[i - 1];
            d[i] = (w1 + w2) / (w1 / del[i - 1] + w2 / del[i]);
        }
    }
    auto end_slope = [](double h0, double h1, double del0, double del1) {
        double d0 = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
        if (d0 * del0 <= 0.0)
            d0 = 0.0;
        else if (del0 * del1 < 0.0 && std::abs(d0) > 3.0 * std::abs(del0))
            d0 = 3.0 * del0;
        return d0;
    };
    d[0] = end_slope(h[0], h[1], del[0], del[1]);
    d[n - 1] = end_slope(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
    return d;
}

} // namespace

Pchip::Pchip(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    if (x_.size() != y_.size() || x_.size() < 2) throw ConfigError("Pchip needs >= 2 matched samples");
    d_ = pchip_slopes(x_, y_);
}

std::size_t Pchip::locate(double x) const {
    if (x <= x_.front()) return 0;
    if (x >= x_[x_.size() - 2]) return x_.size() - 2;
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    return static_cast<std::size_t>(it - x_.begin()) - 1;
}

double Pchip::operator()(double x) const {
    const std::size_t i = locate(x);
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1;
    const double h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2;
    const double h11 = t3 - t2;
    return h00 * y_[i] + h * h10 * d_[i] + h01 * y_[i + 1] + h * h11 * d_[i + 1];
}

double Pchip::deriv(double x) const {
    const std::size_t i = locate(x);
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double t2 = t * t;
    const double g00 = (6 * t2 - 6 * t) / h;
    const double g10 = 3 * t2 - 4 * t + 1;
    const double g01 = (-6 * t2 + 6 * t) / h;
    const double g11 = 3 * t2 - 2 * t;
    return g00 * y_[i] + g10 * d_[i] + g01 * y_[i + 1] + g11 * d_[i + 1];
}

double Pchip::segment_integral(std::size_t i, double a, double b) const {
    // Antiderivative of the Hermite cubic on [x_i, x_{i+1}] in local t.
    const double h = x_[i + 1] - x_[i];
    auto anti = [&](double t) {
        const double t2 = t * t, t3 = t2 * t, t4 = t3 * t;
        const double H00 = t4 / 2 - t3 + t;
        const double H10 = t4 / 4 - 2 * t3 / 3 + t2 / 2;
        const double H01 = -t4 / 2 + t3;
        const double H11 = t4 / 4 - t3 / 3;
        return h * (H00 * y_[i] + h * H10 * d_[i] + H01 * y_[i + 1] + h * H11 * d_[i + 1]);
    };
    const double ta = (a - x_[i]) / h, tb = (b - x_[i]) / h;
    return anti(tb) - anti(ta);
}

double Pchip::integrate(double a, double b) const {
    a = std::max(a, x_.front());
    b = std::min(b, x_.back());
    if (!(b > a)) return 0.0;
    const std::size_t ia = locate(a), ib = locate(b);
    if (ia == ib) return segment_integral(ia, a, b);
    double acc = segment_integral(ia, a, x_[ia + 1]);
    for (std::size_t i = ia + 1; i < ib; ++i) acc += segment_integral(i, x_[i], x_[i + 1]);
    acc += segment_integral(ib, x_[ib], b);
    return acc;
}

RadialField::RadialField(RadialGrid g, std::vector<double> v)
    : grid(std::move(g)), values(std::move(v)) {
    if (grid.size() != values.size()) throw ConfigError("field/grid size mismatch");
    interp = Pchip(grid.nodes, values);
}

void RadialField::check_finite() const {
    for (double v : values)
        if (!std::isfinite(v)) throw RuntimeError("non-finite field value");
}

} // namespace kslab
