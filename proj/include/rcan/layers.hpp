#pragma once

#include <utility>

#include "rcan/tensor.hpp"

namespace rcan {

// 2-D convolution parameters. weight is (out_c, in_c, k, k), bias is
// (out_c, 1, 1, 1). k is odd and zero padding of (k-1)/2 keeps the spatial
// size fixed.
struct Conv2dParams {
    Tensor4 weight;
    Tensor4 bias;

    int out_c() const { return weight.n; }
    int in_c() const { return weight.c; }
    int k() const { return weight.w; }
};

Conv2dParams make_conv(int out_c, int in_c, int k);

// Tapes cache whatever the matching backward pass needs. Each tape belongs to
// exactly one forward call and feeds exactly one backward call.
struct ConvTape {
    Tensor4 x;
};
struct ReluTape {
    Tensor4 x;
};
struct SigmoidTape {
    Tensor4 y;
};
struct GapTape {
    int h = 0, w = 0;
};
struct ChannelScaleTape {
    Tensor4 x;
    Tensor4 s;
};

// Cross-correlation (no kernel flip) with zero padding; output spatial size
// equals input spatial size. Pass a tape to enable the backward pass.
Tensor4 conv2d(const Tensor4& x, const Conv2dParams& p, ConvTape* tape = nullptr);
// Returns grad_x and accumulates parameter gradients into p.weight.grad and
// p.bias.grad (allocated on demand).
Tensor4 conv2d_backward(const Tensor4& grad_y, const ConvTape& tape, Conv2dParams& p);

Tensor4 relu(const Tensor4& x, ReluTape* tape = nullptr);
// Subgradient at exactly 0 is 0.
Tensor4 relu_backward(const Tensor4& grad_y, const ReluTape& tape);

Tensor4 sigmoid(const Tensor4& x, SigmoidTape* tape = nullptr);
Tensor4 sigmoid_backward(const Tensor4& grad_y, const SigmoidTape& tape);

// Mean over (h, w) per channel; output shape (n, c, 1, 1).
Tensor4 global_avg_pool(const Tensor4& x, GapTape* tape = nullptr);
Tensor4 gap_backward(const Tensor4& grad_z, const GapTape& tape);

// Per-channel rescale: out = s_c * x_c with s of shape (n, c, 1, 1).
Tensor4 channel_scale(const Tensor4& x, const Tensor4& s, ChannelScaleTape* tape = nullptr);
// Returns (grad_x, grad_s).
std::pair<Tensor4, Tensor4> channel_scale_backward(const Tensor4& grad, const ChannelScaleTape& tape);

// Sub-pixel rearrangement: (n, c, h, w) -> (n, c/u^2, u*h, u*w) with
// y(n, c, u*i+a, u*j+b) = x(n, c*u*u + a*u + b, i, j). pixel_unshuffle is the
// exact inverse and also serves as the backward pass of pixel_shuffle.
Tensor4 pixel_shuffle(const Tensor4& x, int u);
Tensor4 pixel_unshuffle(const Tensor4& y, int u);

}  // namespace rcan
