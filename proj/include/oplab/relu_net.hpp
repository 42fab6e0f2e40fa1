#pragma once

#include <filesystem>
#include <functional>
#include <vector>

#include <json.hpp>

#include "oplab/types.hpp"

namespace oplab {

enum class Activation { relu, leaky_relu, gelu };

Real apply_activation(Activation act, Real x);

/// One affine stage W x + b, optionally followed by the network activation.
struct MlpLayer {
  MatrixX W;
  VectorX b;
  bool activated = false;
};

/// Feedforward network as an explicit list of affine layers. Built networks
/// (relu by default) are exact, inspectable objects: composition merges
/// adjacent unactivated layers so depth accounting stays honest.
struct Mlp {
  std::vector<MlpLayer> layers;
  Activation activation = Activation::relu;

  Index input_dim() const { return layers.empty() ? 0 : layers.front().W.cols(); }
  Index output_dim() const { return layers.empty() ? 0 : layers.back().W.rows(); }

  VectorX eval(const VectorX& x) const;
  Real eval1(Real x) const;                     // scalar-in, scalar-out convenience
  MatrixX eval_batch(const MatrixX& X) const;   // columns are samples
};

/// depth = number of activated (hidden) layers, width = widest hidden layer,
/// size = (in + out) * width + width^2 * depth under the fully connected
/// convention; an affine-only network reports its raw parameter count.
struct SizeReport {
  int depth = 0;
  int width = 0;
  long long size = 0;
};

SizeReport account_size(const Mlp& net);

// ---- combinators ----------------------------------------------------------

Mlp mlp_affine(MatrixX W, VectorX b);
Mlp mlp_affine(MatrixX W);
Mlp mlp_identity(Index dim);
Mlp mlp_constant(Index input_dim, VectorX value);

/// outer(inner(x)); adjacent unactivated affine layers are merged exactly.
Mlp compose(Mlp outer, Mlp inner);

/// Normal form: activated layers followed by a single output affine.
void canonicalize(Mlp& net);

/// Signed pass-through of `dim` wires across `depth` activated layers
/// (sigma(v) - sigma(-v) pairs).
Mlp mlp_passthrough(Index dim, int depth);

/// Block-diagonal parallel composition on concatenated inputs; shallower nets
/// are depth-padded with pass-through layers.
Mlp stack(std::vector<Mlp> nets);

/// Duplicate the input vector `copies` times (affine).
Mlp mlp_dup(Index dim, int copies);

/// Exact scalar clamp to [lo, hi]: lo + sigma(x - lo) - sigma(x - hi).
Mlp mlp_clamp(Real lo, Real hi);

// ---- exact building blocks ------------------------------------------------

/// h * ramp((x - xi)/delta): equals h * 1_{x > xi} outside [xi, xi + delta];
/// depth 1, width 2, L1 error |h| delta / 2 on any interval containing the ramp.
Mlp build_step(Real xi, Real h, Real delta);

/// Ramp approximation of 1_{[a,b]}: plateau on [a + delta, b], zero for
/// x <= a and x >= b + delta; depth 1, width 4, L1 error exactly delta.
Mlp build_indicator(Real a, Real b, Real delta);

/// Partition of unity on [a, b] with J pieces: width 4J, depth 1, nonnegative,
/// summing exactly to 1 on [a, b]. Interior edges ramp over +-eps around the
/// knots; the outer ramps lie outside [a, b].
Mlp build_partition(Real a, Real b, int J, Real eps);

/// Sawtooth-squaring product network: |x|,|y| <= M, sup error <= eps.
Mlp build_multiply(Real M, Real eps);
/// Same with an explicit number of sawtooth refinement levels (error halves at
/// least per added level).
Mlp build_multiply_levels(Real M, int levels);
int multiply_levels_for(Real M, Real eps);

/// x / y on [a, b]^2 (0 < a <= b), sup error <= eps.
Mlp build_divide(Real a, Real b, Real eps);

/// Exact maximum of k inputs; depth ceil(log2 k), width <= 3k.
Mlp build_maxpool(int k);

/// Xi(cos xi, sin xi) ~ xi on [0, 2pi - eps], clamped to [0, 2pi];
/// five analytic inverse branches glued on (c, s) threshold indicators.
Mlp build_angle_recovery(Real eps);

enum class AnalyticStrategy { chebyshev, piecewise_linear };

struct AnalyticCompileInfo {
  int subintervals = 0;
  int max_degree = 0;     // chebyshev: max polynomial degree; pwl: knot count
  Real grid_error = 0.0;  // sup error measured on the verification grid
};

/// ReLU compilation of a numerically evaluable function on [a, b]:
/// per-subinterval Chebyshev truncations evaluated by Clenshaw recurrences of
/// product networks and glued with a partition of unity, or a piecewise-linear
/// fallback. The result is verified on a 1000-point grid; subintervals double
/// and product tolerances shrink until the target is met.
Mlp compile_analytic(const std::function<Real(Real)>& f, Real a, Real b, Real eps,
                     AnalyticStrategy strategy = AnalyticStrategy::chebyshev,
                     AnalyticCompileInfo* info = nullptr);

// ---- serialization ---------------------------------------------------------

nlohmann::json mlp_to_json(const Mlp& net);
Mlp mlp_from_json(const nlohmann::json& j);
void write_mlp_binary(const Mlp& net, const std::filesystem::path& path);
Mlp read_mlp_binary(const std::filesystem::path& path);

}  // namespace oplab
