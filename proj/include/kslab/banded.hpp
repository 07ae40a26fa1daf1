#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "kslab/errors.hpp"

namespace kslab {

// Symmetric positive definite banded matrix, lower-band storage by diagonals.
// Used for the implicit diffusion and Poisson solves on tensor grids, where
// the half bandwidth equals the fast (z) dimension.
class BandedSPD {
  public:
    BandedSPD(std::size_t n, std::size_t kd)
        : n_(n), kd_(kd), a_((kd + 1) * n, 0.0) {}

    std::size_t size() const { return n_; }
    std::size_t bandwidth() const { return kd_; }

    // entry A(i, i-d), 0 <= d <= kd
    double& diag(std::size_t d, std::size_t i) { return a_[d * n_ + i]; }
    double diag(std::size_t d, std::size_t i) const { return a_[d * n_ + i]; }

    void add(std::size_t i, std::size_t j, double v) {
        if (j > i) std::swap(i, j);
        a_[(i - j) * n_ + i] += v;
    }

    // In-place Cholesky, A = L L^T.
    void factor() {
        for (std::size_t j = 0; j < n_; ++j) {
            double s = diag(0, j);
            const std::size_t k0 = j > kd_ ? j - kd_ : 0;
            for (std::size_t k = k0; k < j; ++k) {
                const double l = diag(j - k, j);
                s -= l * l;
            }
            if (!(s > 0.0)) throw LinearSolveFailure("banded Cholesky breakdown");
            const double ljj = std::sqrt(s);
            diag(0, j) = ljj;
            const std::size_t imax = std::min(j + kd_, n_ - 1);
            for (std::size_t i = j + 1; i <= imax; ++i) {
                double t = diag(i - j, i);
                const std::size_t kk0 = i > kd_ ? i - kd_ : 0;
                for (std::size_t k = std::max(kk0, k0); k < j; ++k)
                    t -= diag(i - k, i) * diag(j - k, j);
                diag(i - j, i) = t / ljj;
            }
        }
        factored_ = true;
    }

    void solve(std::vector<double>& b) const {
        if (!factored_) throw LinearSolveFailure("solve before factor");
        for (std::size_t i = 0; i < n_; ++i) {
            double s = b[i];
            const std::size_t k0 = i > kd_ ? i - kd_ : 0;
            for (std::size_t k = k0; k < i; ++k) s -= diag(i - k, i) * b[k];
            b[i] = s / diag(0, i);
        }
        for (std::size_t ii = n_; ii-- > 0;) {
            double s = b[ii];
            const std::size_t imax = std::min(ii + kd_, n_ - 1);
            for (std::size_t i = ii + 1; i <= imax; ++i) s -= diag(i - ii, i) * b[i];
            b[ii] = s / diag(0, ii);
        }
    }

  private:
    std::size_t n_, kd_;
    std::vector<double> a_;
    bool factored_ = false;
};

// Tridiagonal solver (Thomas), used by the radial stepper.
// Solves in place: diag d, lower l (l[0] unused), upper u (u[n-1] unused).
inline void solve_tridiag(std::vector<double>& l, std::vector<double>& d,
                          std::vector<double>& u, std::vector<double>& b) {
    const std::size_t n = d.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double w = l[i] / d[i - 1];
        d[i] -= w * u[i - 1];
        b[i] -= w * b[i - 1];
    }
    b[n - 1] /= d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) b[i] = (b[i] - u[i] * b[i + 1]) / d[i];
}

} // namespace kslab
