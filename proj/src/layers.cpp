#include "rcan/layers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rcan {

Conv2dParams make_conv(int out_c, int in_c, int k) {
    if (k % 2 == 0 || k <= 0) {
        throw std::invalid_argument("make_conv: kernel size must be odd, got " + std::to_string(k));
    }
    Conv2dParams p;
    p.weight = Tensor4(out_c, in_c, k, k);
    p.bias = Tensor4(out_c, 1, 1, 1);
    return p;
}

Tensor4 conv2d(const Tensor4& x, const Conv2dParams& p, ConvTape* tape) {
    if (x.c != p.in_c()) {
        throw std::invalid_argument("conv2d: input has " + std::to_string(x.c) +
                                    " channels, layer expects " + std::to_string(p.in_c()));
    }
    const int k = p.k();
    const int pad = (k - 1) / 2;
    const int oc_n = p.out_c();

    Tensor4 y(x.n, oc_n, x.h, x.w);
    for (int ni = 0; ni < x.n; ++ni) {
        for (int oc = 0; oc < oc_n; ++oc) {
            const real b = p.bias.at(oc, 0, 0, 0);
            real* yrow0 = &y.at(ni, oc, 0, 0);
            for (int i = 0; i < x.h * x.w; ++i) {
                yrow0[i] = b;
            }
            for (int ic = 0; ic < x.c; ++ic) {
                for (int ky = 0; ky < k; ++ky) {
                    for (int kx = 0; kx < k; ++kx) {
                        const real wv = p.weight.at(oc, ic, ky, kx);
                        // valid output range so that the tapped input index stays in bounds
                        const int oy_lo = std::max(0, pad - ky);
                        const int oy_hi = std::min(x.h, x.h + pad - ky);
                        const int ox_lo = std::max(0, pad - kx);
                        const int ox_hi = std::min(x.w, x.w + pad - kx);
                        for (int oy = oy_lo; oy < oy_hi; ++oy) {
                            const real* xrow = &x.at(ni, ic, oy + ky - pad, 0);
                            real* yrow = &y.at(ni, oc, oy, 0);
                            const int shift = kx - pad;
                            for (int ox = ox_lo; ox < ox_hi; ++ox) {
                                yrow[ox] += wv * xrow[ox + shift];
                            }
                        }
                    }
                }
            }
        }
    }
    if (tape) {
        tape->x = x;
    }
    return y;
}

Tensor4 conv2d_backward(const Tensor4& grad_y, const ConvTape& tape, Conv2dParams& p) {
    const Tensor4& x = tape.x;
    if (grad_y.n != x.n || grad_y.c != p.out_c() || grad_y.h != x.h || grad_y.w != x.w) {
        throw std::invalid_argument("conv2d_backward: grad shape " + grad_y.shape_str() +
                                    " does not match forward output");
    }
    const int k = p.k();
    const int pad = (k - 1) / 2;

    p.weight.ensure_grad();
    p.bias.ensure_grad();
    Tensor4 grad_x = zeros_like(x);

    for (int ni = 0; ni < x.n; ++ni) {
        for (int oc = 0; oc < p.out_c(); ++oc) {
            real bsum = 0;
            const real* gyrow0 = &grad_y.at(ni, oc, 0, 0);
            for (int i = 0; i < x.h * x.w; ++i) {
                bsum += gyrow0[i];
            }
            p.bias.grad[p.bias.index(oc, 0, 0, 0)] += bsum;

            for (int ic = 0; ic < x.c; ++ic) {
                for (int ky = 0; ky < k; ++ky) {
                    for (int kx = 0; kx < k; ++kx) {
                        const int oy_lo = std::max(0, pad - ky);
                        const int oy_hi = std::min(x.h, x.h + pad - ky);
                        const int ox_lo = std::max(0, pad - kx);
                        const int ox_hi = std::min(x.w, x.w + pad - kx);
                        const int shift = kx - pad;
                        const real wv = p.weight.at(oc, ic, ky, kx);
                        real wsum = 0;
                        for (int oy = oy_lo; oy < oy_hi; ++oy) {
                            const real* xrow = &x.at(ni, ic, oy + ky - pad, 0);
                            const real* gyrow = &grad_y.at(ni, oc, oy, 0);
                            real* gxrow = &grad_x.at(ni, ic, oy + ky - pad, 0);
                            for (int ox = ox_lo; ox < ox_hi; ++ox) {
                                wsum += gyrow[ox] * xrow[ox + shift];
                                gxrow[ox + shift] += wv * gyrow[ox];
                            }
                        }
                        p.weight.grad[p.weight.index(oc, ic, ky, kx)] += wsum;
                    }
                }
            }
        }
    }
    return grad_x;
}

Tensor4 relu(const Tensor4& x, ReluTape* tape) {
    Tensor4 y = zeros_like(x);
    for (std::size_t i = 0; i < x.size(); ++i) {
        y.data[i] = x.data[i] > real(0) ? x.data[i] : real(0);
    }
    if (tape) {
        tape->x = x;
    }
    return y;
}

Tensor4 relu_backward(const Tensor4& grad_y, const ReluTape& tape) {
    if (!grad_y.same_shape(tape.x)) {
        throw std::invalid_argument("relu_backward: grad shape " + grad_y.shape_str() +
                                    " vs input " + tape.x.shape_str());
    }
    Tensor4 grad_x = zeros_like(grad_y);
    for (std::size_t i = 0; i < grad_y.size(); ++i) {
        grad_x.data[i] = tape.x.data[i] > real(0) ? grad_y.data[i] : real(0);
    }
    return grad_x;
}

Tensor4 sigmoid(const Tensor4& x, SigmoidTape* tape) {
    Tensor4 y = zeros_like(x);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const real v = x.data[i];
        // evaluate with exp of a non-positive argument only, stable for large |v|
        if (v >= real(0)) {
            const real e = std::exp(-v);
            y.data[i] = real(1) / (real(1) + e);
        } else {
            const real e = std::exp(v);
            y.data[i] = e / (real(1) + e);
        }
    }
    if (tape) {
        tape->y = y;
    }
    return y;
}

Tensor4 sigmoid_backward(const Tensor4& grad_y, const SigmoidTape& tape) {
    if (!grad_y.same_shape(tape.y)) {
        throw std::invalid_argument("sigmoid_backward: grad shape " + grad_y.shape_str() +
                                    " vs output " + tape.y.shape_str());
    }
    Tensor4 grad_x = zeros_like(grad_y);
    for (std::size_t i = 0; i < grad_y.size(); ++i) {
        const real s = tape.y.data[i];
        grad_x.data[i] = grad_y.data[i] * s * (real(1) - s);
    }
    return grad_x;
}

Tensor4 global_avg_pool(const Tensor4& x, GapTape* tape) {
    if (x.h < 1 || x.w < 1) {
        throw std::invalid_argument("global_avg_pool: empty spatial extent " + x.shape_str());
    }
    Tensor4 z(x.n, x.c, 1, 1);
    const real inv = real(1) / (static_cast<real>(x.h) * static_cast<real>(x.w));
    for (int ni = 0; ni < x.n; ++ni) {
        for (int ci = 0; ci < x.c; ++ci) {
            const real* row = &x.at(ni, ci, 0, 0);
            real acc = 0;
            for (int i = 0; i < x.h * x.w; ++i) {
                acc += row[i];
            }
            z.at(ni, ci, 0, 0) = acc * inv;
        }
    }
    if (tape) {
        tape->h = x.h;
        tape->w = x.w;
    }
    return z;
}

Tensor4 gap_backward(const Tensor4& grad_z, const GapTape& tape) {
    if (grad_z.h != 1 || grad_z.w != 1) {
        throw std::invalid_argument("gap_backward: grad must be (n, c, 1, 1), got " +
                                    grad_z.shape_str());
    }
    Tensor4 grad_x(grad_z.n, grad_z.c, tape.h, tape.w);
    const real inv = real(1) / (static_cast<real>(tape.h) * static_cast<real>(tape.w));
    for (int ni = 0; ni < grad_z.n; ++ni) {
        for (int ci = 0; ci < grad_z.c; ++ci) {
            const real g = grad_z.at(ni, ci, 0, 0) * inv;
            real* row = &grad_x.at(ni, ci, 0, 0);
            for (int i = 0; i < tape.h * tape.w; ++i) {
                row[i] = g;
            }
        }
    }
    return grad_x;
}

Tensor4 channel_scale(const Tensor4& x, const Tensor4& s, ChannelScaleTape* tape) {
    Tensor4 out = broadcast_mul(x, s);
    if (tape) {
        tape->x = x;
        tape->s = s;
    }
    return out;
}

std::pair<Tensor4, Tensor4> channel_scale_backward(const Tensor4& grad,
                                                   const ChannelScaleTape& tape) {
    if (!grad.same_shape(tape.x)) {
        throw std::invalid_argument("channel_scale_backward: grad shape " + grad.shape_str() +
                                    " vs input " + tape.x.shape_str());
    }
    Tensor4 grad_x = broadcast_mul(grad, tape.s);
    Tensor4 grad_s(tape.s.n, tape.s.c, 1, 1);
    const int plane = tape.x.h * tape.x.w;
    for (int ni = 0; ni < tape.x.n; ++ni) {
        for (int ci = 0; ci < tape.x.c; ++ci) {
            const real* xrow = &tape.x.at(ni, ci, 0, 0);
            const real* grow = &grad.at(ni, ci, 0, 0);
            real acc = 0;
            for (int i = 0; i < plane; ++i) {
                acc += xrow[i] * grow[i];
            }
            grad_s.at(ni, ci, 0, 0) = acc;
        }
    }
    return {std::move(grad_x), std::move(grad_s)};
}

Tensor4 pixel_shuffle(const Tensor4& x, int u) {
    if (u <= 0 || x.c % (u * u) != 0) {
        throw std::invalid_argument("pixel_shuffle: channel count " + std::to_string(x.c) +
                                    " not divisible by u^2 with u=" + std::to_string(u));
    }
    const int oc = x.c / (u * u);
    Tensor4 y(x.n, oc, x.h * u, x.w * u);
    for (int ni = 0; ni < x.n; ++ni) {
        for (int co = 0; co < oc; ++co) {
            for (int a = 0; a < u; ++a) {
                for (int b = 0; b < u; ++b) {
                    const int ci = co * u * u + a * u + b;
                    for (int i = 0; i < x.h; ++i) {
                        const real* src = &x.at(ni, ci, i, 0);
                        for (int j = 0; j < x.w; ++j) {
                            y.at(ni, co, u * i + a, u * j + b) = src[j];
                        }
                    }
                }
            }
        }
    }
    return y;
}

Tensor4 pixel_unshuffle(const Tensor4& y, int u) {
    if (u <= 0 || y.h % u != 0 || y.w % u != 0) {
        throw std::invalid_argument("pixel_unshuffle: spatial dims " + y.shape_str() +
                                    " not divisible by u=" + std::to_string(u));
    }
    const int h = y.h / u;
    const int w = y.w / u;
    Tensor4 x(y.n, y.c * u * u, h, w);
    for (int ni = 0; ni < y.n; ++ni) {
        for (int co = 0; co < y.c; ++co) {
            for (int a = 0; a < u; ++a) {
                for (int b = 0; b < u; ++b) {
                    const int ci = co * u * u + a * u + b;
                    for (int i = 0; i < h; ++i) {
                        real* dst = &x.at(ni, ci, i, 0);
                        for (int j = 0; j < w; ++j) {
                            dst[j] = y.at(ni, co, u * i + a, u * j + b);
                        }
                    }
                }
            }
        }
    }
    return x;
}

}  // namespace rcan
