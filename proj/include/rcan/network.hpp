#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rcan/blocks.hpp"

namespace rcan {

// Architectural hyperparameters plus the ablation toggles. Defaults are the
// published constants: G=10 residual groups of B=20 blocks at width C=64 with
// reduction ratio r=16.
struct RcanConfig {
    int G = 10;
    int B = 20;
    int C = 64;
    int r = 16;
    int scale = 2;  // one of 2, 3, 4, 8
    int in_channels = 3;
    bool use_lsc = true;
    bool use_ssc = true;
    CaMode ca_mode = CaMode::learned;
    real ca_constant = real(1);
    bool mean_shift = true;
    // DIV2K channel means, the customary values for this training lineage.
    real mean_rgb[3] = {real(0.4488), real(0.4371), real(0.4040)};
};

void validate_config(const RcanConfig& cfg);

// Sub-pixel upscale staging: x2 -> {2}, x3 -> {3}, x4 -> {2,2}, x8 -> {2,2,2}.
std::vector<int> upscale_factors(int scale);

// The full parameter set: head conv, RIR trunk, one conv per upscale stage,
// reconstruction conv.
struct RcanParams {
    Conv2dParams head;  // in_channels -> C, 3x3
    RirParams rir;
    std::vector<Conv2dParams> upscale;  // C -> C*u^2, 3x3 per stage
    Conv2dParams rec;                   // C -> in_channels, 3x3
};

// Stable dotted parameter names for checkpoints, Adam state and diagnostics.
// rank is the logical tensor rank as serialized (4 for weights, 1 for biases).
struct ParamRef {
    std::string name;
    Tensor4* tensor;
    int rank;
};

std::vector<ParamRef> param_refs(RcanParams& params);

// Zero-initialized parameters with the right shapes for cfg.
RcanParams alloc_params(const RcanConfig& cfg);

// Weights drawn uniform in [-b, b] with b = sqrt(6 / fan_in), fan_in =
// in_c * k * k; biases zero. Deterministic: one splitmix64 stream seeded with
// `seed`, consumed in param_refs order, elementwise row-major.
RcanParams build(const RcanConfig& cfg, std::uint64_t seed);

// Exact scalar count of the parameter set; closed-form arithmetic only.
long long param_count(const RcanConfig& cfg);

struct NetTape {
    ConvTape head;
    RirTape rir;
    std::vector<ConvTape> upscale;
    std::vector<int> factors;
    ConvTape rec;
};

// Full pipeline: optional mean shift -> head conv -> RIR -> sub-pixel
// upscaler -> reconstruction conv -> mean restore. Input is (n, 3, h, w) in
// [0, 1]; output is (n, 3, scale*h, scale*w), unclamped.
Tensor4 forward(const Tensor4& lr, const RcanParams& params, const RcanConfig& cfg,
                NetTape* tape = nullptr);

// Accumulates parameter gradients (into .grad buffers) and returns the
// gradient with respect to the input.
Tensor4 backward(const Tensor4& grad_out, const NetTape& tape, RcanParams& params,
                 const RcanConfig& cfg);

void zero_param_grads(RcanParams& params);

// The 8 dihedral transforms on the spatial axes. mode = rot + 4*flip with
// rot in 0..3 quarter-turns (counterclockwise) applied after the optional
// horizontal flip. dihedral_inverse gives the mode that undoes a given mode.
Tensor4 dihedral_transform(const Tensor4& t, int mode);
int dihedral_inverse(int mode);

// Geometric self-ensemble: average the 8 transform-forward-untransform
// passes. The forward function is a parameter so the same machinery serves
// the network and reference upscalers.
Tensor4 self_ensemble(const Tensor4& lr, const std::function<Tensor4(const Tensor4&)>& fwd);
Tensor4 self_ensemble_forward(const Tensor4& lr, const RcanParams& params, const RcanConfig& cfg);

// Checkpoint file: magic "RCKP", u32 version, config block, then one record
// per named tensor (u32 name length, name bytes, u32 rank, u32 dims, float32
// little-endian values). Values round-trip bit-exactly at 32-bit precision.
class CheckpointError : public std::runtime_error {
public:
    enum class Kind { io, bad_magic, bad_version, truncated, inconsistent };

    CheckpointError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
    Kind kind;
};

void save_checkpoint(const RcanParams& params, const RcanConfig& cfg, const std::string& path);
std::pair<RcanParams, RcanConfig> load_checkpoint(const std::string& path);

// Throws CheckpointError{inconsistent} when two configs describe different
// parameter shapes.
void require_same_architecture(const RcanConfig& a, const RcanConfig& b);

}  // namespace rcan
