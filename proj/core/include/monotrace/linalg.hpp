#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace monotrace {

// Dense row-major matrix of doubles. Small and dumb on purpose: every
// forward/backward pass in this library spells out its loops so that the
// floating-point evaluation order is fixed.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}

    double& at(int r, int c) {
        assert(r >= 0 && r < rows && c >= 0 && c < cols);
        return a[static_cast<std::size_t>(r) * cols + c];
    }
    double at(int r, int c) const {
        assert(r >= 0 && r < rows && c >= 0 && c < cols);
        return a[static_cast<std::size_t>(r) * cols + c];
    }
    const double* row(int r) const { return a.data() + static_cast<std::size_t>(r) * cols; }
    double* row(int r) { return a.data() + static_cast<std::size_t>(r) * cols; }

    bool operator==(const Matrix& o) const = default;
};

using Rng = std::mt19937_64;

inline void fill_uniform(std::vector<double>& v, double lo, double hi, Rng& rng) {
    std::uniform_real_distribution<double> d(lo, hi);
    for (auto& x : v) x = d(rng);
}

inline void fill_uniform(Matrix& m, double lo, double hi, Rng& rng) {
    fill_uniform(m.a, lo, hi, rng);
}

// Subgradient of |w| used throughout the weight reparameterization: 0 at 0.
inline double sign0(double w) {
    if (w > 0.0) return 1.0;
    if (w < 0.0) return -1.0;
    return 0.0;
}

} // namespace monotrace
