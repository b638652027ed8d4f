#include "rcan/blocks.hpp"

#include <stdexcept>
#include <string>

namespace rcan {

CaParams make_ca(int channels, int reduction) {
    if (reduction <= 0 || channels % reduction != 0) {
        throw std::invalid_argument("make_ca: channels " + std::to_string(channels) +
                                    " not divisible by reduction " + std::to_string(reduction));
    }
    CaParams p;
    p.mode = CaMode::learned;
    p.down = make_conv(channels / reduction, channels, 1);
    p.up = make_conv(channels, channels / reduction, 1);
    return p;
}

CaParams make_ca_constant(real factor) {
    CaParams p;
    p.mode = CaMode::constant;
    p.constant = factor;
    return p;
}

Tensor4 ca_forward(const Tensor4& x, const CaParams& p, CaTape* tape, Tensor4* s_out) {
    if (p.mode == CaMode::constant) {
        if (tape) {
            tape->learned = false;
        }
        if (s_out) {
            *s_out = Tensor4(x.n, x.c, 1, 1);
            s_out->fill(p.constant);
        }
        return scale(x, p.constant);
    }
    if (x.c != p.down.in_c()) {
        throw std::invalid_argument("ca_forward: input has " + std::to_string(x.c) +
                                    " channels, gate expects " + std::to_string(p.down.in_c()));
    }
    CaTape local;
    CaTape* t = tape ? tape : &local;
    t->learned = true;
    Tensor4 z = global_avg_pool(x, &t->gap);
    Tensor4 d = conv2d(z, p.down, &t->down);
    Tensor4 a = relu(d, &t->relu);
    Tensor4 uo = conv2d(a, p.up, &t->up);
    Tensor4 s = sigmoid(uo, &t->sig);
    Tensor4 out = channel_scale(x, s, &t->scale);
    if (s_out) {
        *s_out = s;
    }
    return out;
}

Tensor4 ca_backward(const Tensor4& grad, const CaTape& tape, CaParams& p) {
    if (p.mode == CaMode::constant) {
        return scale(grad, p.constant);
    }
    if (!tape.learned) {
        throw std::logic_error("ca_backward: tape was recorded in constant mode");
    }
    auto [grad_x_direct, grad_s] = channel_scale_backward(grad, tape.scale);
    Tensor4 g = sigmoid_backward(grad_s, tape.sig);
    g = conv2d_backward(g, tape.up, p.up);
    g = relu_backward(g, tape.relu);
    g = conv2d_backward(g, tape.down, p.down);
    Tensor4 grad_x_gate = gap_backward(g, tape.gap);
    return add(grad_x_direct, grad_x_gate);
}

Tensor4 rcab_forward(const Tensor4& f_in, const RcabParams& p, RcabTape* tape) {
    RcabTape local;
    RcabTape* t = tape ? tape : &local;
    Tensor4 h = conv2d(f_in, p.conv1, &t->conv1);
    h = relu(h, &t->relu);
    Tensor4 x = conv2d(h, p.conv2, &t->conv2);
    Tensor4 branch = ca_forward(x, p.ca, &t->ca);
    Tensor4 out = add(f_in, branch);
    if (tape) {
        tape->f_in = f_in;
        tape->branch = std::move(branch);
    }
    return out;
}

Tensor4 rcab_backward(const Tensor4& grad, const RcabTape& tape, RcabParams& p) {
    Tensor4 g = ca_backward(grad, tape.ca, p.ca);
    g = conv2d_backward(g, tape.conv2, p.conv2);
    g = relu_backward(g, tape.relu);
    g = conv2d_backward(g, tape.conv1, p.conv1);
    // skip path
    return add(g, grad);
}

Tensor4 rg_forward(const Tensor4& f_prev, const RgParams& p, RgTape* tape) {
    if (tape) {
        tape->blocks.resize(p.blocks.size());
    }
    Tensor4 f = f_prev;
    for (std::size_t b = 0; b < p.blocks.size(); ++b) {
        f = rcab_forward(f, p.blocks[b], tape ? &tape->blocks[b] : nullptr);
    }
    Tensor4 tail_out = conv2d(f, p.tail, tape ? &tape->tail : nullptr);
    return p.use_ssc ? add(f_prev, tail_out) : tail_out;
}

Tensor4 rg_backward(const Tensor4& grad, const RgTape& tape, RgParams& p) {
    Tensor4 g = conv2d_backward(grad, tape.tail, p.tail);
    for (std::size_t b = p.blocks.size(); b-- > 0;) {
        g = rcab_backward(g, tape.blocks[b], p.blocks[b]);
    }
    return p.use_ssc ? add(g, grad) : g;
}

Tensor4 rir_forward(const Tensor4& f0, const RirParams& p, RirTape* tape) {
    if (tape) {
        tape->groups.resize(p.groups.size());
    }
    Tensor4 f = f0;
    for (std::size_t g = 0; g < p.groups.size(); ++g) {
        f = rg_forward(f, p.groups[g], tape ? &tape->groups[g] : nullptr);
    }
    Tensor4 tail_out = conv2d(f, p.tail, tape ? &tape->tail : nullptr);
    return p.use_lsc ? add(f0, tail_out) : tail_out;
}

Tensor4 rir_backward(const Tensor4& grad, const RirTape& tape, RirParams& p) {
    Tensor4 g = conv2d_backward(grad, tape.tail, p.tail);
    for (std::size_t gi = p.groups.size(); gi-- > 0;) {
        g = rg_backward(g, tape.groups[gi], p.groups[gi]);
    }
    return p.use_lsc ? add(g, grad) : g;
}

}  // namespace rcan
