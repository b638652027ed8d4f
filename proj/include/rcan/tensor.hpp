#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "rcan/real.hpp"

namespace rcan {

// Dense rank-4 array, row-major (n, c, h, w). The one layout used everywhere.
struct Tensor4 {
    int n = 0, c = 0, h = 0, w = 0;
    std::vector<real> data;
    std::vector<real> grad;  // empty until ensure_grad(); same length as data otherwise

    Tensor4() = default;
    Tensor4(int n_, int c_, int h_, int w_);

    std::size_t size() const { return static_cast<std::size_t>(n) * c * h * w; }
    bool same_shape(const Tensor4& o) const { return n == o.n && c == o.c && h == o.h && w == o.w; }
    std::string shape_str() const;

    std::size_t index(int ni, int ci, int hi, int wi) const {
        return ((static_cast<std::size_t>(ni) * c + ci) * h + hi) * w + wi;
    }
    real& at(int ni, int ci, int hi, int wi) { return data[index(ni, ci, hi, wi)]; }
    const real& at(int ni, int ci, int hi, int wi) const { return data[index(ni, ci, hi, wi)]; }

    void fill(real v);
    void ensure_grad();
    void zero_grad();
};

Tensor4 zeros_like(const Tensor4& t);

// Elementwise arithmetic; operands must agree in shape exactly.
Tensor4 add(const Tensor4& a, const Tensor4& b);
Tensor4 sub(const Tensor4& a, const Tensor4& b);
Tensor4 mul(const Tensor4& a, const Tensor4& b);
Tensor4 scale(const Tensor4& a, real s);

// b has shape (n, c, 1, 1) and is broadcast across (h, w).
Tensor4 broadcast_add(const Tensor4& a, const Tensor4& b);
Tensor4 broadcast_mul(const Tensor4& a, const Tensor4& b);

bool all_finite(const Tensor4& t);

// Relative error metric used by every gradient check in the repo.
inline double rel_err(double a, double b) {
    double denom = std::max(std::max(std::abs(a), std::abs(b)), 1e-8);
    return std::abs(a - b) / denom;
}

// Central-difference gradient (f(t+h e_i) - f(t-h e_i)) / 2h of a scalar
// function. This is the oracle every analytic backward pass is validated
// against; it only ever calls f forward. f must be pure (it is evaluated
// concurrently from worker threads).
std::vector<double> finite_diff_grad(const std::function<double(const std::vector<double>&)>& f,
                                     const std::vector<double>& theta, double step = 1e-3);

}  // namespace rcan
