#include "rcan/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace rcan {

Tensor4::Tensor4(int n_, int c_, int h_, int w_) : n(n_), c(c_), h(h_), w(w_) {
    if (n < 0 || c < 0 || h < 0 || w < 0) {
        throw std::invalid_argument("Tensor4: negative dimension in " + shape_str());
    }
    data.assign(size(), real(0));
}

std::string Tensor4::shape_str() const {
    return "(" + std::to_string(n) + ", " + std::to_string(c) + ", " + std::to_string(h) + ", " +
           std::to_string(w) + ")";
}

void Tensor4::fill(real v) { std::fill(data.begin(), data.end(), v); }

void Tensor4::ensure_grad() {
    if (grad.size() != data.size()) {
        grad.assign(data.size(), real(0));
    }
}

void Tensor4::zero_grad() {
    if (grad.empty()) {
        ensure_grad();
    } else {
        std::fill(grad.begin(), grad.end(), real(0));
    }
}

Tensor4 zeros_like(const Tensor4& t) { return Tensor4(t.n, t.c, t.h, t.w); }

namespace {

void require_same_shape(const Tensor4& a, const Tensor4& b, const char* op) {
    if (!a.same_shape(b)) {
        throw std::invalid_argument(std::string(op) + ": shape mismatch " + a.shape_str() +
                                    " vs " + b.shape_str());
    }
}

void require_broadcastable(const Tensor4& a, const Tensor4& b, const char* op) {
    if (b.n != a.n || b.c != a.c || b.h != 1 || b.w != 1) {
        throw std::invalid_argument(std::string(op) + ": operand " + b.shape_str() +
                                    " is not broadcastable as (n, c, 1, 1) over " + a.shape_str());
    }
}

template <typename F>
Tensor4 zip(const Tensor4& a, const Tensor4& b, F&& f) {
    Tensor4 out = zeros_like(a);
    const std::size_t total = a.size();
    for (std::size_t i = 0; i < total; ++i) {
        out.data[i] = f(a.data[i], b.data[i]);
    }
    return out;
}

template <typename F>
Tensor4 zip_broadcast(const Tensor4& a, const Tensor4& b, F&& f) {
    Tensor4 out = zeros_like(a);
    const std::size_t plane = static_cast<std::size_t>(a.h) * a.w;
    for (int ni = 0; ni < a.n; ++ni) {
        for (int ci = 0; ci < a.c; ++ci) {
            const real s = b.at(ni, ci, 0, 0);
            const std::size_t base = a.index(ni, ci, 0, 0);
            for (std::size_t i = 0; i < plane; ++i) {
                out.data[base + i] = f(a.data[base + i], s);
            }
        }
    }
    return out;
}

}  // namespace

Tensor4 add(const Tensor4& a, const Tensor4& b) {
    require_same_shape(a, b, "add");
    return zip(a, b, [](real x, real y) { return x + y; });
}

Tensor4 sub(const Tensor4& a, const Tensor4& b) {
    require_same_shape(a, b, "sub");
    return zip(a, b, [](real x, real y) { return x - y; });
}

Tensor4 mul(const Tensor4& a, const Tensor4& b) {
    require_same_shape(a, b, "mul");
    return zip(a, b, [](real x, real y) { return x * y; });
}

Tensor4 scale(const Tensor4& a, real s) {
    Tensor4 out = zeros_like(a);
    for (std::size_t i = 0; i < a.size(); ++i) {
        out.data[i] = a.data[i] * s;
    }
    return out;
}

Tensor4 broadcast_add(const Tensor4& a, const Tensor4& b) {
    require_broadcastable(a, b, "broadcast_add");
    return zip_broadcast(a, b, [](real x, real y) { return x + y; });
}

Tensor4 broadcast_mul(const Tensor4& a, const Tensor4& b) {
    require_broadcastable(a, b, "broadcast_mul");
    return zip_broadcast(a, b, [](real x, real y) { return x * y; });
}

bool all_finite(const Tensor4& t) {
    for (real v : t.data) {
        if (!std::isfinite(static_cast<double>(v))) {
            return false;
        }
    }
    return true;
}

std::vector<double> finite_diff_grad(const std::function<double(const std::vector<double>&)>& f,
                                     const std::vector<double>& theta, double step) {
    if (step <= 0.0) {
        throw std::invalid_argument("finite_diff_grad: step must be positive");
    }
    const std::size_t dim = theta.size();
    std::vector<double> grad(dim, 0.0);

    unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(dim, 1)));

    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto run_range = [&](std::size_t lo, std::size_t hi) {
        std::vector<double> local = theta;
        try {
            for (std::size_t i = lo; i < hi; ++i) {
                const double orig = local[i];
                local[i] = orig + step;
                const double fp = f(local);
                local[i] = orig - step;
                const double fm = f(local);
                local[i] = orig;
                if (!std::isfinite(fp) || !std::isfinite(fm)) {
                    throw std::runtime_error("finite_diff_grad: non-finite value at coordinate " +
                                             std::to_string(i));
                }
                grad[i] = (fp - fm) / (2.0 * step);
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) {
                first_error = std::current_exception();
            }
        }
    };

    if (workers <= 1 || dim < 2) {
        run_range(0, dim);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (dim + workers - 1) / workers;
        for (unsigned t = 0; t < workers; ++t) {
            const std::size_t lo = static_cast<std::size_t>(t) * chunk;
            const std::size_t hi = std::min(dim, lo + chunk);
            if (lo >= hi) {
                break;
            }
            pool.emplace_back(run_range, lo, hi);
        }
        for (auto& th : pool) {
            th.join();
        }
    }
    if (first_error) {
        std::rethrow_exception(first_error);
    }
    return grad;
}

}  // namespace rcan
