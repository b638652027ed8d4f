#pragma once

#include <vector>

#include "rcan/layers.hpp"

namespace rcan {

enum class CaMode { learned, constant };

// Channel attention: squeeze (global average pool) -> 1x1 bottleneck with
// reduction ratio r -> ReLU -> 1x1 expansion -> sigmoid -> per-channel
// rescale. In constant mode the gate is bypassed entirely and the branch is
// multiplied by a fixed factor, which reproduces the plain residual blocks
// of EDSR (0.1) and MDSR (1).
struct CaParams {
    CaMode mode = CaMode::learned;
    real constant = real(1);
    Conv2dParams down;  // C -> C/r, 1x1; unused in constant mode
    Conv2dParams up;    // C/r -> C, 1x1; unused in constant mode
};

CaParams make_ca(int channels, int reduction);
CaParams make_ca_constant(real factor);

struct CaTape {
    bool learned = false;
    GapTape gap;
    ConvTape down;
    ReluTape relu;
    ConvTape up;
    SigmoidTape sig;
    ChannelScaleTape scale;
};

// Returns the rescaled tensor; the attention vector s (n, c, 1, 1) is written
// to *s_out when requested (learned mode only; constant mode fills it with
// the constant).
Tensor4 ca_forward(const Tensor4& x, const CaParams& p, CaTape* tape = nullptr,
                   Tensor4* s_out = nullptr);
Tensor4 ca_backward(const Tensor4& grad, const CaTape& tape, CaParams& p);

// Residual channel attention block: conv -> ReLU -> conv producing the
// residual branch, channel attention applied to the branch, then the skip
// addition with the block input.
struct RcabParams {
    Conv2dParams conv1;  // C -> C, 3x3
    Conv2dParams conv2;  // C -> C, 3x3
    CaParams ca;
};

struct RcabTape {
    Tensor4 f_in;
    ConvTape conv1;
    ReluTape relu;
    ConvTape conv2;
    CaTape ca;
    Tensor4 branch;  // the rescaled residual branch, kept for reduction checks
};

Tensor4 rcab_forward(const Tensor4& f_in, const RcabParams& p, RcabTape* tape = nullptr);
Tensor4 rcab_backward(const Tensor4& grad, const RcabTape& tape, RcabParams& p);

// Residual group: B RCABs, one tail conv, optional short skip connection.
struct RgParams {
    std::vector<RcabParams> blocks;
    Conv2dParams tail;  // C -> C, 3x3
    bool use_ssc = true;
};

struct RgTape {
    std::vector<RcabTape> blocks;
    ConvTape tail;
};

Tensor4 rg_forward(const Tensor4& f_prev, const RgParams& p, RgTape* tape = nullptr);
Tensor4 rg_backward(const Tensor4& grad, const RgTape& tape, RgParams& p);

// Residual-in-residual trunk: G residual groups, one tail conv, optional long
// skip connection.
struct RirParams {
    std::vector<RgParams> groups;
    Conv2dParams tail;  // C -> C, 3x3
    bool use_lsc = true;
};

struct RirTape {
    std::vector<RgTape> groups;
    ConvTape tail;
};

Tensor4 rir_forward(const Tensor4& f0, const RirParams& p, RirTape* tape = nullptr);
Tensor4 rir_backward(const Tensor4& grad, const RirTape& tape, RirParams& p);

}  // namespace rcan
