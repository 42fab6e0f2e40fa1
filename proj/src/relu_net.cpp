#include "oplab/relu_net.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace oplab {

Real apply_activation(Activation act, Real x) {
  switch (act) {
    case Activation::relu:
      return x > 0.0 ? x : 0.0;
    case Activation::leaky_relu:
      return x > 0.0 ? x : 0.01 * x;
    case Activation::gelu:
      return 0.5 * x * (1.0 + std::erf(x / std::numbers::sqrt2));
  }
  return x;
}

VectorX Mlp::eval(const VectorX& x) const {
  VectorX v = x;
  for (const auto& L : layers) {
    v = (L.W * v + L.b).eval();
    if (L.activated) {
      for (Index i = 0; i < v.size(); ++i) v[i] = apply_activation(activation, v[i]);
    }
  }
  return v;
}

Real Mlp::eval1(Real x) const {
  VectorX v(1);
  v[0] = x;
  return eval(v)[0];
}

MatrixX Mlp::eval_batch(const MatrixX& X) const {
  MatrixX V = X;
  for (const auto& L : layers) {
    V = ((L.W * V).colwise() + L.b).eval();
    if (L.activated) {
      for (Index j = 0; j < V.cols(); ++j)
        for (Index i = 0; i < V.rows(); ++i) V(i, j) = apply_activation(activation, V(i, j));
    }
  }
  return V;
}

SizeReport account_size(const Mlp& net) {
  SizeReport r;
  long long raw = 0;
  for (const auto& L : net.layers) {
    raw += static_cast<long long>(L.W.size()) + static_cast<long long>(L.b.size());
    if (L.activated) {
      ++r.depth;
      r.width = std::max<int>(r.width, static_cast<int>(L.W.rows()));
    }
  }
  if (r.depth == 0) {
    r.size = raw;
  } else {
    const long long w = r.width;
    r.size = (net.input_dim() + net.output_dim()) * w + w * w * r.depth;
  }
  return r;
}

Mlp mlp_affine(MatrixX W, VectorX b) {
  Mlp net;
  net.layers.push_back({std::move(W), std::move(b), false});
  return net;
}

Mlp mlp_affine(MatrixX W) {
  VectorX b = VectorX::Zero(W.rows());
  return mlp_affine(std::move(W), std::move(b));
}

Mlp mlp_identity(Index dim) { return mlp_affine(MatrixX::Identity(dim, dim)); }

Mlp mlp_constant(Index input_dim, VectorX value) {
  return mlp_affine(MatrixX::Zero(value.size(), input_dim), std::move(value));
}

void canonicalize(Mlp& net) {
  if (net.layers.empty()) return;
  std::vector<MlpLayer> out;
  for (auto& L : net.layers) {
    if (!out.empty() && !out.back().activated) {
      MlpLayer merged;
      merged.W = L.W * out.back().W;
      merged.b = L.W * out.back().b + L.b;
      merged.activated = L.activated;
      out.back() = std::move(merged);
    } else {
      out.push_back(std::move(L));
    }
  }
  if (out.back().activated) {
    const Index d = out.back().W.rows();
    out.push_back({MatrixX::Identity(d, d), VectorX::Zero(d), false});
  }
  net.layers = std::move(out);
}

Mlp compose(Mlp outer, Mlp inner) {
  if (inner.output_dim() != outer.input_dim()) {
    throw NumericError("compose: dimension mismatch");
  }
  Mlp net;
  const auto has_hidden = [](const Mlp& m) {
    return std::any_of(m.layers.begin(), m.layers.end(),
                       [](const MlpLayer& l) { return l.activated; });
  };
  if (has_hidden(inner) && has_hidden(outer) && inner.activation != outer.activation) {
    throw NumericError("compose: mixed activations");
  }
  net.activation = has_hidden(inner) ? inner.activation : outer.activation;
  net.layers = std::move(inner.layers);
  for (auto& L : outer.layers) net.layers.push_back(std::move(L));
  canonicalize(net);
  return net;
}

Mlp mlp_passthrough(Index dim, int depth) {
  if (depth <= 0) return mlp_identity(dim);
  Mlp net;
  {
    MatrixX W(2 * dim, dim);
    W << MatrixX::Identity(dim, dim), -MatrixX::Identity(dim, dim);
    net.layers.push_back({W, VectorX::Zero(2 * dim), true});
  }
  for (int d = 1; d < depth; ++d) {
    MatrixX W(2 * dim, 2 * dim);
    W << MatrixX::Identity(dim, dim), -MatrixX::Identity(dim, dim),
        -MatrixX::Identity(dim, dim), MatrixX::Identity(dim, dim);
    net.layers.push_back({W, VectorX::Zero(2 * dim), true});
  }
  MatrixX Wout(dim, 2 * dim);
  Wout << MatrixX::Identity(dim, dim), -MatrixX::Identity(dim, dim);
  net.layers.push_back({Wout, VectorX::Zero(dim), false});
  return net;
}

namespace {

int mlp_depth(const Mlp& net) {
  int d = 0;
  for (const auto& L : net.layers)
    if (L.activated) ++d;
  return d;
}

}  // namespace

Mlp stack(std::vector<Mlp> nets) {
  if (nets.empty()) throw NumericError("stack: empty");
  int maxd = 0;
  Activation act = Activation::relu;
  bool act_set = false;
  for (const auto& n : nets) {
    maxd = std::max(maxd, mlp_depth(n));
    if (mlp_depth(n) > 0) {
      if (act_set && n.activation != act) throw NumericError("stack: mixed activations");
      act = n.activation;
      act_set = true;
    }
  }
  for (auto& n : nets) {
    const int pad = maxd - mlp_depth(n);
    if (pad > 0) n = compose(mlp_passthrough(n.output_dim(), pad), std::move(n));
    canonicalize(n);
  }
  // All canonical nets now hold maxd activated layers plus a final affine.
  Mlp out;
  out.activation = act;
  const size_t n_layers = nets[0].layers.size();
  for (const auto& n : nets) {
    if (n.layers.size() != n_layers) throw NumericError("stack: alignment failure");
  }
  for (size_t li = 0; li < n_layers; ++li) {
    Index rows = 0, cols = 0;
    for (const auto& n : nets) {
      rows += n.layers[li].W.rows();
      cols += n.layers[li].W.cols();
    }
    MatrixX W = MatrixX::Zero(rows, cols);
    VectorX b(rows);
    Index r0 = 0, c0 = 0;
    for (const auto& n : nets) {
      const auto& L = n.layers[li];
      W.block(r0, c0, L.W.rows(), L.W.cols()) = L.W;
      b.segment(r0, L.b.size()) = L.b;
      r0 += L.W.rows();
      c0 += L.W.cols();
    }
    out.layers.push_back({std::move(W), std::move(b), nets[0].layers[li].activated});
  }
  return out;
}

Mlp mlp_dup(Index dim, int copies) {
  MatrixX W(dim * copies, dim);
  for (int c = 0; c < copies; ++c) W.block(c * dim, 0, dim, dim) = MatrixX::Identity(dim, dim);
  return mlp_affine(std::move(W));
}

Mlp mlp_clamp(Real lo, Real hi) {
  Mlp net;
  MatrixX W1(2, 1);
  W1 << 1, 1;
  VectorX b1(2);
  b1 << -lo, -hi;
  net.layers.push_back({W1, b1, true});
  MatrixX W2(1, 2);
  W2 << 1, -1;
  VectorX b2(1);
  b2 << lo;
  net.layers.push_back({W2, b2, false});
  return net;
}

// ---- building blocks -------------------------------------------------------

Mlp build_step(Real xi, Real h, Real delta) {
  if (delta <= 0.0) throw ConfigError("build_step: delta must be positive");
  Mlp net;
  MatrixX W1(2, 1);
  W1 << 1.0 / delta, 1.0 / delta;
  VectorX b1(2);
  b1 << -xi / delta, -(xi + delta) / delta;
  net.layers.push_back({W1, b1, true});
  MatrixX W2(1, 2);
  W2 << h, -h;
  net.layers.push_back({W2, VectorX::Zero(1), false});
  return net;
}

Mlp build_indicator(Real a, Real b, Real delta) {
  if (!(a < b)) throw ConfigError("build_indicator: need a < b");
  if (!(delta > 0.0) || delta > (b - a) / 2) {
    throw ConfigError("build_indicator: delta out of (0, (b-a)/2]");
  }
  Mlp net;
  MatrixX W1(4, 1);
  W1 << 1.0 / delta, 1.0 / delta, 1.0 / delta, 1.0 / delta;
  VectorX b1(4);
  b1 << -a / delta, -(a + delta) / delta, -b / delta, -(b + delta) / delta;
  net.layers.push_back({W1, b1, true});
  MatrixX W2(1, 4);
  W2 << 1.0, -1.0, -1.0, 1.0;
  net.layers.push_back({W2, VectorX::Zero(1), false});
  return net;
}

Mlp build_partition(Real a, Real b, int J, Real eps) {
  if (J < 1) throw ConfigError("build_partition: J must be >= 1");
  const Real dx = (b - a) / J;
  if (!(eps > 0.0) || eps > dx / 2) throw ConfigError("build_partition: eps out of (0, dx/2]");
  // Ramp centers: interior knots ramp over [x_j - eps, x_j + eps]; the outer
  // ramps sit entirely outside [a, b] so the pieces sum exactly to 1 inside.
  std::vector<Real> up_start(J), down_start(J);
  std::vector<Real> up_width(J, 2 * eps), down_width(J, 2 * eps);
  for (int j = 0; j < J; ++j) {
    const Real xl = a + j * dx;
    const Real xr = a + (j + 1) * dx;
    up_start[j] = (j == 0) ? a - 2 * eps : xl - eps;
    down_start[j] = (j == J - 1) ? b : xr - eps;
  }
  Mlp net;
  MatrixX W1(4 * J, 1);
  VectorX b1(4 * J);
  for (int j = 0; j < J; ++j) {
    const Real uw = up_width[j], dw = down_width[j];
    W1(4 * j + 0, 0) = 1.0 / uw;
    b1[4 * j + 0] = -up_start[j] / uw;
    W1(4 * j + 1, 0) = 1.0 / uw;
    b1[4 * j + 1] = -(up_start[j] + uw) / uw;
    W1(4 * j + 2, 0) = 1.0 / dw;
    b1[4 * j + 2] = -down_start[j] / dw;
    W1(4 * j + 3, 0) = 1.0 / dw;
    b1[4 * j + 3] = -(down_start[j] + dw) / dw;
  }
  net.layers.push_back({W1, b1, true});
  MatrixX W2 = MatrixX::Zero(J, 4 * J);
  for (int j = 0; j < J; ++j) {
    W2(j, 4 * j + 0) = 1.0;
    W2(j, 4 * j + 1) = -1.0;
    W2(j, 4 * j + 2) = -1.0;
    W2(j, 4 * j + 3) = 1.0;
  }
  net.layers.push_back({W2, VectorX::Zero(J), false});
  return net;
}

int multiply_levels_for(Real M, Real eps) {
  // Smallest s with 2^(-2s-2) (2M)^2 <= eps.
  const int s = static_cast<int>(std::ceil(0.5 * std::log2(M * M / eps)));
  return std::max(s, 1);
}

Mlp build_multiply_levels(Real M, int levels) {
  if (M <= 0.0) throw ConfigError("build_multiply: M must be positive");
  const int s = std::max(levels, 1);
  Mlp net;
  // (x, y) -> (a, b) = ((x+y)/2M, (x-y)/2M), then |a|, |b| via a sign layer.
  {
    MatrixX W(4, 2);
    W << 1, 1, -1, -1, 1, -1, -1, 1;
    W /= 2.0 * M;
    net.layers.push_back({W, VectorX::Zero(4), true});
  }
  // Wires entering each sawtooth layer: (t_u, A_u, t_v, A_v), all nonnegative.
  // Layer i neurons: [s(t), s(t-1/2), s(t-1), s(A)] per branch.
  MatrixX Winit = MatrixX::Zero(8, 4);
  VectorX binit = VectorX::Zero(8);
  // t_u = A_u = |a| = n0 + n1, t_v = A_v = |b| = n2 + n3.
  const auto tooth_rows = [](MatrixX& W, VectorX& bb, int row0, int tcol_a, int tcol_b,
                             int acol_a, int acol_b, Real tscale_a, Real tscale_b, Real ascale_a,
                             Real ascale_b) {
    // Rows row0..row0+3 = [s(t), s(t-.5), s(t-1), s(A)] where t and A are
    // affine in two previous neurons each.
    for (int r = 0; r < 3; ++r) {
      W(row0 + r, tcol_a) = tscale_a;
      W(row0 + r, tcol_b) = tscale_b;
      bb[row0 + r] = -0.5 * r;
    }
    W(row0 + 3, acol_a) = ascale_a;
    W(row0 + 3, acol_b) = ascale_b;
  };
  tooth_rows(Winit, binit, 0, 0, 1, 0, 1, 1, 1, 1, 1);
  tooth_rows(Winit, binit, 4, 2, 3, 2, 3, 1, 1, 1, 1);
  net.layers.push_back({Winit, binit, true});
  // Remaining s-1 sawtooth layers. Incoming neurons: per branch
  // [s(t), s(t-.5), s(t-1), s(A)]; g = 2 n0 - 4 n1 + 2 n2; A' = n3 - g/4^i.
  for (int i = 1; i < s; ++i) {
    MatrixX W = MatrixX::Zero(8, 8);
    VectorX bb = VectorX::Zero(8);
    const Real inv4i = std::pow(0.25, i);
    for (int br = 0; br < 2; ++br) {
      const int o = 4 * br;
      for (int r = 0; r < 3; ++r) {
        W(o + r, o + 0) = 2.0;
        W(o + r, o + 1) = -4.0;
        W(o + r, o + 2) = 2.0;
        bb[o + r] = -0.5 * r;
      }
      W(o + 3, o + 0) = -2.0 * inv4i;
      W(o + 3, o + 1) = 4.0 * inv4i;
      W(o + 3, o + 2) = -2.0 * inv4i;
      W(o + 3, o + 3) = 1.0;
    }
    net.layers.push_back({W, bb, true});
  }
  // Output: xy = M^2 (A_u - A_v) with the last tooth folded into each A.
  MatrixX Wout = MatrixX::Zero(1, 8);
  const Real inv4s = std::pow(0.25, s);
  const Real m2 = M * M;
  Wout(0, 0) = -2.0 * inv4s * m2;
  Wout(0, 1) = 4.0 * inv4s * m2;
  Wout(0, 2) = -2.0 * inv4s * m2;
  Wout(0, 3) = m2;
  Wout(0, 4) = 2.0 * inv4s * m2;
  Wout(0, 5) = -4.0 * inv4s * m2;
  Wout(0, 6) = 2.0 * inv4s * m2;
  Wout(0, 7) = -m2;
  net.layers.push_back({Wout, VectorX::Zero(1), false});
  return net;
}

Mlp build_multiply(Real M, Real eps) {
  if (!(eps > 0.0) || eps > 0.5) throw ConfigError("build_multiply: eps out of (0, 1/2]");
  if (M < 2.0) throw ConfigError("build_multiply: M must be >= 2");
  return build_multiply_levels(M, multiply_levels_for(M, eps));
}

Mlp build_divide(Real a, Real b, Real eps) {
  if (!(0.0 < a && a <= b)) throw ConfigError("build_divide: need 0 < a <= b");
  if (!(eps > 0.0) || eps > 0.5) throw ConfigError("build_divide: eps out of (0, 1/2]");
  const Real eps_recip = eps / (2.0 * b);
  Mlp recip = compile_analytic([](Real y) { return 1.0 / y; }, a, b, eps_recip);
  const Real mult_bound = std::max({2.0, b, 1.0 / a + 1.0});
  Mlp mult = build_multiply(mult_bound, eps / 2.0);
  return compose(std::move(mult), stack({mlp_identity(1), std::move(recip)}));
}

Mlp build_maxpool(int k) {
  if (k < 1) throw ConfigError("build_maxpool: k must be >= 1");
  if (k == 1) return mlp_identity(1);
  // max(a, b) = s(a-b) + s(b) - s(-b), exact.
  Mlp gadget;
  {
    MatrixX W(3, 2);
    W << 1, -1, 0, 1, 0, -1;
    gadget.layers.push_back({W, VectorX::Zero(3), true});
    MatrixX Wo(1, 3);
    Wo << 1, 1, -1;
    gadget.layers.push_back({Wo, VectorX::Zero(1), false});
  }
  Mlp net = mlp_identity(k);
  int r = k;
  while (r > 1) {
    std::vector<Mlp> units;
    for (int i = 0; i + 1 < r; i += 2) units.push_back(gadget);
    if (r % 2) units.push_back(mlp_passthrough(1, 1));
    net = compose(stack(std::move(units)), std::move(net));
    r = (r + 1) / 2;
  }
  return net;
}

// ---- analytic compiler ------------------------------------------------------

namespace {

struct ChebPoly {
  Real lo = 0, hi = 0;
  VectorX coef;  // p(x) = sum c_r T_r(t), t = (2x - lo - hi)/(hi - lo)
};

ChebPoly cheb_fit(const std::function<Real(Real)>& f, Real lo, Real hi, int degree) {
  const int N = degree + 1;
  VectorX fx(N);
  const Real mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  for (int i = 0; i < N; ++i) {
    const Real x = mid + half * std::cos(pi * (i + 0.5) / N);
    fx[i] = f(x);
    if (!std::isfinite(fx[i])) throw NumericError("compile_analytic: non-finite value");
  }
  ChebPoly p;
  p.lo = lo;
  p.hi = hi;
  p.coef = VectorX::Zero(N);
  for (int r = 0; r < N; ++r) {
    Real acc = 0;
    for (int i = 0; i < N; ++i) acc += fx[i] * std::cos(pi * r * (i + 0.5) / N);
    p.coef[r] = 2.0 * acc / N;
  }
  p.coef[0] *= 0.5;
  return p;
}

Real cheb_eval(const ChebPoly& p, Real x) {
  const Real t = (2 * x - p.lo - p.hi) / (p.hi - p.lo);
  Real b1 = 0, b2 = 0;
  for (Index r = p.coef.size() - 1; r >= 1; --r) {
    const Real br = p.coef[r] + 2 * t * b1 - b2;
    b2 = b1;
    b1 = br;
  }
  return p.coef[0] + t * b1 - b2;
}

/// Max |b_r| over the Clenshaw recurrence on a probe grid; used to size the
/// product networks.
Real clenshaw_bound(const ChebPoly& p) {
  Real bound = 1.0;
  for (int i = 0; i <= 64; ++i) {
    const Real t = -1.0 + 2.0 * i / 64.0;
    Real b1 = 0, b2 = 0;
    for (Index r = p.coef.size() - 1; r >= 1; --r) {
      const Real br = p.coef[r] + 2 * t * b1 - b2;
      b2 = b1;
      b1 = br;
      bound = std::max(bound, std::abs(br));
    }
  }
  return bound;
}

/// Clenshaw evaluation of a Chebyshev polynomial as a ReLU network in x.
Mlp cheb_net(const ChebPoly& p, Real eps_mult) {
  const Index deg = p.coef.size() - 1;
  const Real B = 1.2 * clenshaw_bound(p) + 1.0;
  const Real M = std::max(2.0, B);
  const Mlp mult = build_multiply(M, std::min(eps_mult, 0.5));
  const int dm = mlp_depth(mult);

  // state (t, u, w) = (t, b_{r+1}, b_{r+2})
  MatrixX Winit = MatrixX::Zero(3, 1);
  Winit(0, 0) = 2.0 / (p.hi - p.lo);
  VectorX binit(3);
  binit << -(p.lo + p.hi) / (p.hi - p.lo), 0.0, 0.0;
  Mlp net = mlp_affine(Winit, binit);

  for (Index r = deg; r >= 1; --r) {
    // (t, u, w) -> (t, u, w, t, u) -> [pass(t,u,w) | mult(t,u)] -> (t, b_r, u)
    MatrixX pre = MatrixX::Zero(5, 3);
    pre(0, 0) = 1;
    pre(1, 1) = 1;
    pre(2, 2) = 1;
    pre(3, 0) = 1;
    pre(4, 1) = 1;
    Mlp step = compose(stack({mlp_passthrough(3, dm), mult}), mlp_affine(pre));
    MatrixX post = MatrixX::Zero(3, 4);
    post(0, 0) = 1;          // t
    post(1, 2) = -1;         // b_r = c_r + 2 m - w
    post(1, 3) = 2;
    post(2, 1) = 1;          // new w = old u
    VectorX bpost(3);
    bpost << 0.0, p.coef[r], 0.0;
    step = compose(mlp_affine(post, bpost), std::move(step));
    net = compose(std::move(step), std::move(net));
  }
  // p = c_0 + t b_1 - b_2 with one final product.
  MatrixX pre = MatrixX::Zero(3, 3);
  pre(0, 2) = 1;  // w
  pre(1, 0) = 1;  // t
  pre(2, 1) = 1;  // u
  Mlp fin = compose(stack({mlp_passthrough(1, dm), mult}), mlp_affine(pre));
  MatrixX post(1, 2);
  post << -1, 1;
  VectorX bpost(1);
  bpost << p.coef[0];
  fin = compose(mlp_affine(post, bpost), std::move(fin));
  return compose(std::move(fin), std::move(net));
}

Mlp compile_chebyshev(const std::function<Real(Real)>& f, Real a, Real b, Real eps,
                      AnalyticCompileInfo* info) {
  // Subinterval count doubles when the coefficient tails stall; the product
  // tolerance shrinks when the assembled network misses the verification grid.
  struct Attempt {
    int J;
    Real scale;
  };
  const Attempt schedule[] = {{2, 1.0}, {4, 1.0},        {4, 1.0 / 8},  {8, 1.0 / 8},
                              {8, 1.0 / 64}, {16, 1.0 / 64}, {32, 1.0 / 64}};
  for (const auto& [J, eps_scale] : schedule) {
    const Real dx = (b - a) / J;
    const Real pou_eps = dx / 4;
    std::vector<ChebPoly> polys;
    int max_degree = 0;
    bool tails_ok = true;
    for (int j = 0; j < J; ++j) {
      const Real lo = a + j * dx - (j > 0 ? pou_eps : 0.0);
      const Real hi = a + (j + 1) * dx + (j + 1 < J ? pou_eps : 0.0);
      ChebPoly full = cheb_fit(f, lo, hi, 48);
      // Smallest degree whose discarded-coefficient mass is below eps/4.
      int deg = 48;
      Real tail = 0.0;
      while (deg > 1 && tail + std::abs(full.coef[deg]) < eps / 4) {
        tail += std::abs(full.coef[deg]);
        --deg;
      }
      if (deg >= 48) {
        tails_ok = false;
        break;
      }
      ChebPoly p;
      p.lo = lo;
      p.hi = hi;
      p.coef = full.coef.head(deg + 1);
      polys.push_back(std::move(p));
      max_degree = std::max(max_degree, deg);
    }
    if (!tails_ok) continue;

    Real sup_p = 0.0;
    for (const auto& p : polys) {
      for (int i = 0; i <= 32; ++i)
        sup_p = std::max(sup_p, std::abs(cheb_eval(p, p.lo + (p.hi - p.lo) * i / 32.0)));
    }
    const Real eps_mult = eps_scale * eps / (16.0 * (max_degree + 1));
    const Real eps_glue = eps_scale * eps / (16.0 * J);

    std::vector<Mlp> pieces;
    pieces.push_back(build_partition(a, b, J, pou_eps));
    for (const auto& p : polys) pieces.push_back(cheb_net(p, eps_mult));
    Mlp stage1 = compose(stack(std::move(pieces)), mlp_dup(1, J + 1));

    const Real Mg = std::max(2.0, 1.1 * (1.0 + sup_p));
    Mlp glue_mult = build_multiply(Mg, std::min(eps_glue, 0.5));
    MatrixX route = MatrixX::Zero(2 * J, 2 * J);
    for (int j = 0; j < J; ++j) {
      route(2 * j, j) = 1.0;          // Lambda_j
      route(2 * j + 1, J + j) = 1.0;  // p_j
    }
    std::vector<Mlp> mults(J, glue_mult);
    Mlp stage2 = compose(stack(std::move(mults)), mlp_affine(route));
    Mlp sum = mlp_affine(MatrixX::Ones(1, J));
    Mlp net = compose(std::move(sum), compose(std::move(stage2), std::move(stage1)));

    Real err = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const Real x = a + (b - a) * (i + 0.5) / 1000.0;
      err = std::max(err, std::abs(net.eval1(x) - f(x)));
    }
    if (err <= eps) {
      if (info) {
        info->subintervals = J;
        info->max_degree = max_degree;
        info->grid_error = err;
      }
      return net;
    }
  }
  throw NumericError("compile_analytic: chebyshev target not met");
}

Mlp compile_pwl(const std::function<Real(Real)>& f, Real a, Real b, Real eps,
                AnalyticCompileInfo* info) {
  for (int K = 65; K <= (1 << 17); K = 2 * K - 1) {
    const Real h = (b - a) / (K - 1);
    VectorX fx(K);
    for (int i = 0; i < K; ++i) {
      fx[i] = f(a + i * h);
      if (!std::isfinite(fx[i])) throw NumericError("compile_analytic: non-finite value");
    }
    // f0 + sum gamma_i s(x - k_i), slope changes at the knots.
    MatrixX W1 = MatrixX::Constant(K - 1, 1, 1.0);
    VectorX b1(K - 1);
    for (int i = 0; i < K - 1; ++i) b1[i] = -(a + i * h);
    MatrixX W2(1, K - 1);
    Real prev_slope = 0.0;
    for (int i = 0; i < K - 1; ++i) {
      const Real slope = (fx[i + 1] - fx[i]) / h;
      W2(0, i) = slope - prev_slope;
      prev_slope = slope;
    }
    Mlp net;
    net.layers.push_back({W1, b1, true});
    VectorX bout(1);
    bout << fx[0];
    net.layers.push_back({W2, bout, false});

    Real err = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const Real x = a + (b - a) * (i + 0.5) / 1000.0;
      err = std::max(err, std::abs(net.eval1(x) - f(x)));
    }
    if (err <= eps) {
      if (info) {
        info->subintervals = 1;
        info->max_degree = K;
        info->grid_error = err;
      }
      return net;
    }
  }
  throw NumericError("compile_analytic: piecewise-linear target not met");
}

}  // namespace

Mlp compile_analytic(const std::function<Real(Real)>& f, Real a, Real b, Real eps,
                     AnalyticStrategy strategy, AnalyticCompileInfo* info) {
  if (!(a < b)) throw ConfigError("compile_analytic: need a < b");
  if (!(eps > 0.0)) throw ConfigError("compile_analytic: eps must be positive");
  if (strategy == AnalyticStrategy::chebyshev) return compile_chebyshev(f, a, b, eps, info);
  return compile_pwl(f, a, b, eps, info);
}

// ---- angle recovery ---------------------------------------------------------

Mlp build_angle_recovery(Real eps) {
  if (!(eps > 0.0) || eps > 0.5) throw ConfigError("build_angle_recovery: eps out of (0, 1/2]");
  const Real eps_b = eps / 4;
  const Real eps_m = eps / 128;
  const Real tau = 1.0 / std::numbers::sqrt2;
  const Real eta = eps / 4;

  // Branch inputs are clamped to the fitted domain so that off-branch
  // evaluations stay bounded (their weights vanish exactly there).
  Mlp asin_net = compose(compile_analytic([](Real v) { return std::asin(v); }, -0.86, 0.86, eps_b),
                         mlp_clamp(-0.86, 0.86));
  Mlp acos_net = compose(compile_analytic([](Real v) { return std::acos(v); }, -0.86, 0.86, eps_b),
                         mlp_clamp(-0.86, 0.86));

  const auto pick = [](int col) {
    MatrixX W = MatrixX::Zero(1, 2);
    W(0, col) = 1.0;
    return mlp_affine(W);
  };
  const auto affine1 = [](Real scale, Real shift) {
    MatrixX W(1, 1);
    W << scale;
    VectorX b(1);
    b << shift;
    return mlp_affine(W, b);
  };

  // Five local inverses of (cos, sin) on the circle.
  Mlp phi1 = compose(asin_net, pick(1));
  Mlp phi2 = compose(acos_net, pick(0));
  Mlp phi3 = compose(affine1(-1.0, pi), compose(asin_net, pick(1)));
  Mlp phi4 = compose(affine1(-1.0, two_pi), compose(acos_net, pick(0)));
  Mlp phi5 = compose(affine1(1.0, two_pi), compose(asin_net, pick(1)));

  // Region weights from threshold ramps in c and s.
  Mlp chi2 = compose(build_step(tau - eta / 2, 1.0, eta), pick(1));           // s > tau
  Mlp chi4 = compose(build_step(tau - eta / 2, 1.0, eta),
                     compose(affine1(-1.0, 0.0), pick(1)));                    // s < -tau
  const Real kappa = 0.35;
  Mlp rho = compose(build_step(-kappa, 1.0, 2 * kappa), pick(0));             // c on the right
  const Real s1 = 0.75 * std::sin(std::min(eps, 0.5));
  const Real s0 = 0.25 * std::sin(std::min(eps, 0.5));
  Mlp gate_up = compose(build_step(-s1, 1.0, s1 - s0), pick(1));              // s above -s1

  // Stage A: [c2, c4, rho, gate, phi1..phi5] from (c, s).
  Mlp stageA = compose(stack({chi2, chi4, rho, gate_up, phi1, phi2, phi3, phi4, phi5}),
                       mlp_dup(2, 9));

  const Real Mw = 2.0;   // weights live in [-(small), 1+small]
  const Real Mp = 8.0;   // branch values live in [-0.3, 2 pi + 0.3]
  Mlp mult_w = build_multiply(Mw, eps_m);
  Mlp mult_p = build_multiply(Mp, eps_m);

  // Stage B: m = 1 - c2 - c4; t1 = m * rho; keep gate and phis.
  // wires in: [c2, c4, rho, gate, p1..p5] (9)
  {
    MatrixX pre = MatrixX::Zero(2 + 8, 9);
    // mult input (m, rho)
    pre(0, 0) = -1;
    pre(0, 1) = -1;
    pre(1, 2) = 1;
    // carries: c2, c4, gate, p1..p5
    pre(2, 0) = 1;
    pre(3, 1) = 1;
    pre(4, 3) = 1;
    for (int i = 0; i < 5; ++i) pre(5 + i, 4 + i) = 1;
    VectorX bpre = VectorX::Zero(10);
    bpre[0] = 1.0;  // m = 1 - c2 - c4
    const int dm = mlp_depth(mult_w);
    Mlp stageB = compose(stack({mult_w, mlp_passthrough(8, dm)}), mlp_affine(pre, bpre));
    stageA = compose(std::move(stageB), std::move(stageA));
  }
  // wires now: [t1, c2, c4, gate, p1..p5] (9)

  // Stage C: x1 = t1 * gate (weight of branch 1). chi5 = t1 - x1, chi3 = m - t1.
  {
    MatrixX pre = MatrixX::Zero(2 + 8, 9);
    pre(0, 0) = 1;  // t1
    pre(1, 3) = 1;  // gate
    pre(2, 0) = 1;  // carry t1
    pre(3, 1) = 1;  // c2
    pre(4, 2) = 1;  // c4
    for (int i = 0; i < 5; ++i) pre(5 + i, 4 + i) = 1;
    const int dm = mlp_depth(mult_w);
    Mlp stageC = compose(stack({mult_w, mlp_passthrough(8, dm)}), mlp_affine(pre));
    stageA = compose(std::move(stageC), std::move(stageA));
  }
  // wires now: [x1, t1, c2, c4, p1..p5] (9)

  // Stage D: five weighted products chi_j * phi_j. Weights:
  //   chi1 = x1, chi2 = c2, chi3 = 1 - c2 - c4 - t1, chi4 = c4, chi5 = t1 - x1.
  {
    MatrixX pre = MatrixX::Zero(10, 9);
    VectorX bpre = VectorX::Zero(10);
    // (chi1, p1)
    pre(0, 0) = 1;
    pre(1, 4) = 1;
    // (chi2, p2)
    pre(2, 2) = 1;
    pre(3, 5) = 1;
    // (chi3, p3)
    pre(4, 2) = -1;
    pre(4, 3) = -1;
    pre(4, 1) = -1;
    bpre[4] = 1.0;
    pre(5, 6) = 1;
    // (chi4, p4)
    pre(6, 3) = 1;
    pre(7, 7) = 1;
    // (chi5, p5)
    pre(8, 1) = 1;
    pre(8, 0) = -1;
    pre(9, 8) = 1;
    std::vector<Mlp> mults(5, mult_p);
    Mlp stageD = compose(stack(std::move(mults)), mlp_affine(pre, bpre));
    Mlp sum = mlp_affine(MatrixX::Ones(1, 5));
    stageA = compose(std::move(sum), compose(std::move(stageD), std::move(stageA)));
  }

  // Clamp to [0, 2 pi]: x - s(x - 2 pi) with x >= 0 enforced by a leading s.
  Mlp clamp;
  {
    MatrixX W1(2, 1);
    W1 << 1, 1;
    VectorX b1(2);
    b1 << 0.0, -two_pi;
    clamp.layers.push_back({W1, b1, true});
    MatrixX W2(1, 2);
    W2 << 1, -1;
    clamp.layers.push_back({W2, VectorX::Zero(1), false});
  }
  return compose(std::move(clamp), std::move(stageA));
}

// ---- serialization ----------------------------------------------------------

namespace {

const char* activation_name(Activation a) {
  switch (a) {
    case Activation::relu:
      return "relu";
    case Activation::leaky_relu:
      return "leaky_relu";
    case Activation::gelu:
      return "gelu";
  }
  return "relu";
}

Activation activation_from_name(const std::string& s) {
  if (s == "relu") return Activation::relu;
  if (s == "leaky_relu") return Activation::leaky_relu;
  if (s == "gelu") return Activation::gelu;
  throw IoError("unknown activation: " + s);
}

}  // namespace

nlohmann::json mlp_to_json(const Mlp& net) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& L : net.layers) {
    std::vector<Real> w(L.W.size());
    for (Index r = 0; r < L.W.rows(); ++r)
      for (Index c = 0; c < L.W.cols(); ++c) w[r * L.W.cols() + c] = L.W(r, c);
    std::vector<Real> b(L.b.data(), L.b.data() + L.b.size());
    layers.push_back({{"rows", L.W.rows()},
                      {"cols", L.W.cols()},
                      {"activated", L.activated},
                      {"W", w},
                      {"b", b}});
  }
  return {{"activation", activation_name(net.activation)}, {"layers", layers}};
}

Mlp mlp_from_json(const nlohmann::json& j) {
  Mlp net;
  net.activation = activation_from_name(j.at("activation"));
  for (const auto& lj : j.at("layers")) {
    const Index rows = lj.at("rows");
    const Index cols = lj.at("cols");
    const std::vector<Real> w = lj.at("W");
    const std::vector<Real> b = lj.at("b");
    if (static_cast<Index>(w.size()) != rows * cols || static_cast<Index>(b.size()) != rows) {
      throw IoError("mlp_from_json: dimension mismatch");
    }
    MlpLayer L;
    L.W = MatrixX(rows, cols);
    for (Index r = 0; r < rows; ++r)
      for (Index c = 0; c < cols; ++c) L.W(r, c) = w[r * cols + c];
    L.b = Eigen::Map<const VectorX>(b.data(), rows);
    L.activated = lj.at("activated");
    net.layers.push_back(std::move(L));
  }
  return net;
}

void write_mlp_binary(const Mlp& net, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  const std::uint32_t n = static_cast<std::uint32_t>(net.layers.size());
  const std::uint8_t act = static_cast<std::uint8_t>(net.activation);
  os.write(reinterpret_cast<const char*>(&n), 4);
  os.write(reinterpret_cast<const char*>(&act), 1);
  for (const auto& L : net.layers) {
    const std::uint32_t rows = static_cast<std::uint32_t>(L.W.rows());
    const std::uint32_t cols = static_cast<std::uint32_t>(L.W.cols());
    const std::uint8_t a = L.activated ? 1 : 0;
    os.write(reinterpret_cast<const char*>(&rows), 4);
    os.write(reinterpret_cast<const char*>(&cols), 4);
    os.write(reinterpret_cast<const char*>(&a), 1);
    os.write(reinterpret_cast<const char*>(L.W.data()),
             static_cast<std::streamsize>(sizeof(Real) * L.W.size()));
    os.write(reinterpret_cast<const char*>(L.b.data()),
             static_cast<std::streamsize>(sizeof(Real) * L.b.size()));
  }
  if (!os) throw IoError("short write: " + path.string());
}

Mlp read_mlp_binary(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open for reading: " + path.string());
  std::uint32_t n = 0;
  std::uint8_t act = 0;
  is.read(reinterpret_cast<char*>(&n), 4);
  is.read(reinterpret_cast<char*>(&act), 1);
  Mlp net;
  net.activation = static_cast<Activation>(act);
  for (std::uint32_t i = 0; i < n; ++i) {
    std::uint32_t rows = 0, cols = 0;
    std::uint8_t a = 0;
    is.read(reinterpret_cast<char*>(&rows), 4);
    is.read(reinterpret_cast<char*>(&cols), 4);
    is.read(reinterpret_cast<char*>(&a), 1);
    MlpLayer L;
    L.W = MatrixX(rows, cols);
    L.b = VectorX(rows);
    is.read(reinterpret_cast<char*>(L.W.data()),
            static_cast<std::streamsize>(sizeof(Real) * L.W.size()));
    is.read(reinterpret_cast<char*>(L.b.data()),
            static_cast<std::streamsize>(sizeof(Real) * L.b.size()));
    L.activated = a != 0;
    net.layers.push_back(std::move(L));
  }
  if (!is) throw IoError("truncated mlp: " + path.string());
  return net;
}

}  // namespace oplab
