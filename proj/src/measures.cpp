#include "oplab/measures.hpp"

#include <cmath>
#include <fstream>
#include <thread>

namespace oplab {

BoxWaveParams sample_box(const BoxWaveMeasure& spec, Rng& rng) {
  BoxWaveParams p;
  p.height = rng.uniform(spec.h_min, spec.h_max);
  p.width = rng.uniform(spec.w_min, spec.w_max);
  p.center = rng.uniform(spec.xi_min, spec.xi_max);
  return p;
}

namespace {

/// Periodized squared-exponential covariance at lag d (|m| <= 8 terms suffice
/// for l << period).
Real periodized_kernel(Real d, Real l, Real period) {
  Real acc = 0.0;
  for (int m = -8; m <= 8; ++m) {
    const Real dd = d + m * period;
    acc += std::exp(-dd * dd / (2.0 * l * l));
  }
  return acc;
}

}  // namespace

/// Circulant eigenvalues of the periodized kernel in the dx-weighted L2 sense.
VectorX grf_covariance_eigenvalues(const PeriodicGrfMeasure& spec, const Grid& grid) {
  GridFunction row(grid, VectorX::Zero(grid.n));
  for (Index j = 0; j < grid.n; ++j) {
    row.values[j] = periodized_kernel(grid.point(j), spec.length_scale, grid.period);
  }
  const ComplexSpectrum s = dft(row);
  VectorX eigs(grid.n);
  for (Index k = 0; k < grid.n; ++k) {
    // dft carries 1/n; the circulant eigenvalue is the plain DFT sum, and the
    // dx weight turns matrix eigenvalues into quadrature-consistent ones.
    eigs[k] = s.coeff[k].real() * static_cast<Real>(grid.n) * grid.dx();
  }
  return eigs;
}

GridFunction sample_grf(const PeriodicGrfMeasure& spec, Rng& rng, const Grid& grid,
                        int* clamped) {
  const Index n = grid.n;
  if (!detail::is_power_of_two(n)) throw NumericError("sample_grf: grid n must be a power of two");
  GridFunction row(grid, VectorX::Zero(n));
  for (Index j = 0; j < n; ++j) {
    row.values[j] = periodized_kernel(grid.point(j), spec.length_scale, grid.period);
  }
  const ComplexSpectrum rs = dft(row);
  VectorX lambda(n);  // circulant matrix eigenvalues
  int n_clamped = 0;
  for (Index k = 0; k < n; ++k) {
    Real v = rs.coeff[k].real() * static_cast<Real>(n);
    if (v < 0.0) {
      v = 0.0;
      ++n_clamped;
    }
    lambda[k] = v;
  }
  if (clamped) *clamped = n_clamped;

  // f_j = (1/sqrt(n)) sum_k sqrt(lambda_k) zeta_k e^{2 pi i j k / n} with
  // conjugate-symmetric unit complex Gaussians zeta.
  ComplexSpectrum s;
  s.coeff = VectorXc::Zero(n);
  const Real inv_sqrt_n = 1.0 / std::sqrt(static_cast<Real>(n));
  s.coeff[0] = std::sqrt(lambda[0]) * rng.normal() * inv_sqrt_n;
  for (Index k = 1; k < (n + 1) / 2; ++k) {
    const Real g1 = rng.normal();
    const Real g2 = rng.normal();
    const Complex z(g1 / std::numbers::sqrt2, g2 / std::numbers::sqrt2);
    s.coeff[k] = std::sqrt(lambda[k]) * z * inv_sqrt_n;
    s.coeff[n - k] = std::conj(s.coeff[k]);
  }
  if (n % 2 == 0) {
    s.coeff[n / 2] = std::sqrt(lambda[n / 2]) * rng.normal() * inv_sqrt_n;
  }
  return idft(s, grid);
}

ShockTubeParams sample_shocktube_params(Rng& rng) {
  const auto G = [](Real z) { return 2.0 * z - 1.0; };
  ShockTubeParams p;
  p.rho_l = 0.75 + 0.45 * G(rng.uniform());
  p.rho_r = 0.4 + 0.3 * G(rng.uniform());
  p.u_l = 0.5 + 0.5 * G(rng.uniform());
  p.u_r = 0.0;
  p.p_l = 2.5 + 1.6 * G(rng.uniform());
  p.p_r = 0.375 + 0.325 * G(rng.uniform());
  p.x0 = 0.5 * G(rng.uniform());
  return p;
}

EulerState1D shocktube_initial(const ShockTubeParams& params, const Grid& grid) {
  const Real g = euler_gamma_gas;
  VectorX rho(grid.n), mom(grid.n), en(grid.n);
  for (Index j = 0; j < grid.n; ++j) {
    const Real x = grid.point(j) - 5.0;  // physical coordinate on [-5, 5]
    const bool left = x <= params.x0;
    const Real r = left ? params.rho_l : params.rho_r;
    const Real u = left ? params.u_l : params.u_r;
    const Real p = left ? params.p_l : params.p_r;
    rho[j] = r;
    mom[j] = r * u;
    en[j] = 0.5 * r * u * u + p / (g - 1.0);
  }
  EulerState1D s;
  s.rho = GridFunction(grid, rho);
  s.momentum = GridFunction(grid, mom);
  s.energy = GridFunction(grid, en);
  return s;
}

EulerState1D sample_shocktube(const ShockTubeMeasure&, Rng& rng, const Grid& grid) {
  return shocktube_initial(sample_shocktube_params(rng), grid);
}

namespace {

GridFunction block_average(const GridFunction& fine, const Grid& coarse) {
  const Index r = fine.grid.n / coarse.n;
  if (r * coarse.n != fine.grid.n) throw NumericError("block_average: incompatible grids");
  VectorX v(coarse.n);
  for (Index j = 0; j < coarse.n; ++j) {
    v[j] = fine.values.segment(j * r, r).mean();
  }
  return GridFunction(coarse, v);
}

struct SamplePair {
  std::vector<GridFunction> inputs;
  GridFunction output;
  Real boundary_drift = 0.0;
};

SamplePair make_sample(const MeasureSpec& measure, const Grid& grid,
                       const SolverSettings& settings, Rng rng) {
  SamplePair out;
  if (const auto* box = std::get_if<BoxWaveMeasure>(&measure)) {
    const BoxWaveParams p = sample_box(*box, rng);
    out.inputs = {sample_box_wave(p, grid)};
    out.output = advect_exact(p, settings.advection_speed, settings.final_time, grid);
  } else if (const auto* sine = std::get_if<ShiftedSineMeasure>(&measure)) {
    const Real xi = rng.uniform(sine->xi_min, sine->xi_max);
    VectorX v(grid.n);
    for (Index j = 0; j < grid.n; ++j) v[j] = -std::sin(grid.point(j) - xi);
    out.inputs = {GridFunction(grid, v)};
    out.output = burgers_exact(xi, settings.final_time, grid);
  } else if (const auto* grf = std::get_if<PeriodicGrfMeasure>(&measure)) {
    const Grid fine{grid.n * settings.grf_refine, grid.period};
    const GridFunction field = sample_grf(*grf, rng, fine);
    out.inputs = {block_average(field, grid)};
    out.output = block_average(burgers_fvm(field, settings.final_time, settings.cfl), grid);
  } else if (const auto* st = std::get_if<ShockTubeMeasure>(&measure)) {
    const EulerState1D init = sample_shocktube(*st, rng, grid);
    const EulerState1D sol = euler_fvm(init, settings.final_time, settings.cfl);
    out.inputs = {init.rho, init.momentum, init.energy};
    out.output = sol.energy;
    // Waves must not have reached the open boundaries.
    const Index n = grid.n;
    Real drift = 0.0;
    const auto edge_drift = [&](const GridFunction& a, const GridFunction& b) {
      drift = std::max(drift, std::abs(b.values[0] - a.values[0]) / std::abs(a.values[0]));
      drift = std::max(drift,
                       std::abs(b.values[n - 1] - a.values[n - 1]) / std::abs(a.values[n - 1]));
    };
    edge_drift(init.rho, sol.rho);
    edge_drift(init.energy, sol.energy);
    out.boundary_drift = drift;
  }
  return out;
}

}  // namespace

Dataset generate_dataset(const MeasureSpec& measure, int n_samples, const Grid& grid,
                         const SolverSettings& settings, std::uint64_t seed, int threads) {
  Dataset ds;
  ds.inputs.resize(n_samples);
  ds.outputs.resize(n_samples);
  std::vector<Real> drifts(n_samples, 0.0);
  std::vector<std::string> errors(n_samples);

  const auto worker = [&](int begin, int stride) {
    for (int i = begin; i < n_samples; i += stride) {
      try {
        SamplePair s = make_sample(measure, grid, settings, Rng::substream(seed, i));
        ds.inputs[i] = std::move(s.inputs);
        ds.outputs[i] = std::move(s.output);
        drifts[i] = s.boundary_drift;
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  threads = std::max(1, threads);
  if (threads == 1 || n_samples < 2) {
    worker(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker, t, threads);
    for (auto& th : pool) th.join();
  }
  for (int i = 0; i < n_samples; ++i) {
    if (!errors[i].empty()) {
      throw NumericError("sample " + std::to_string(i) + ": " + errors[i]);
    }
  }

  Real max_drift = 0.0;
  for (Real d : drifts) max_drift = std::max(max_drift, d);

  ds.manifest = json{{"format", "DPL1"},
                     {"version", 1},
                     {"measure", measure_to_json(measure)},
                     {"seed", seed},
                     {"grid", {{"n", grid.n}, {"period", grid.period}}},
                     {"solver",
                      {{"advection_speed", settings.advection_speed},
                       {"final_time", settings.final_time},
                       {"cfl", settings.cfl},
                       {"grf_refine", settings.grf_refine},
                       {"downsample", "block_mean"}}},
                     {"n_samples", n_samples},
                     {"n_input_channels", ds.n_input_channels()}};
  if (std::holds_alternative<ShockTubeMeasure>(measure)) {
    ds.manifest["notes"]["max_boundary_drift"] = max_drift;
    if (max_drift > 0.05) {
      throw NumericError("shock tube wave reached the domain boundary (drift " +
                         std::to_string(max_drift) + ")");
    }
  }
  return ds;
}

json measure_to_json(const MeasureSpec& measure) {
  json j;
  if (const auto* b = std::get_if<BoxWaveMeasure>(&measure)) {
    j = {{"kind", "box_wave"},   {"h_min", b->h_min},   {"h_max", b->h_max},
         {"w_min", b->w_min},    {"w_max", b->w_max},   {"xi_min", b->xi_min},
         {"xi_max", b->xi_max}};
  } else if (const auto* s = std::get_if<ShiftedSineMeasure>(&measure)) {
    j = {{"kind", "shifted_sine"}, {"xi_min", s->xi_min}, {"xi_max", s->xi_max}};
  } else if (const auto* g = std::get_if<PeriodicGrfMeasure>(&measure)) {
    j = {{"kind", "periodic_grf"}, {"length_scale", g->length_scale}};
  } else {
    j = {{"kind", "shock_tube"}};
  }
  return j;
}

MeasureSpec measure_from_json(const json& j) {
  const std::string kind = j.at("kind");
  if (kind == "box_wave") {
    BoxWaveMeasure b;
    b.h_min = j.at("h_min");
    b.h_max = j.at("h_max");
    b.w_min = j.at("w_min");
    b.w_max = j.at("w_max");
    b.xi_min = j.at("xi_min");
    b.xi_max = j.at("xi_max");
    return b;
  }
  if (kind == "shifted_sine") {
    ShiftedSineMeasure s;
    s.xi_min = j.at("xi_min");
    s.xi_max = j.at("xi_max");
    return s;
  }
  if (kind == "periodic_grf") {
    PeriodicGrfMeasure g;
    g.length_scale = j.at("length_scale");
    return g;
  }
  if (kind == "shock_tube") return ShockTubeMeasure{};
  throw ConfigError("unknown measure kind: " + kind);
}

namespace {

template <typename T>
void write_raw(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_raw(std::istream& is) {
  T v;
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw IoError("dataset: unexpected end of file");
  return v;
}

}  // namespace

void write_dataset(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  os.write("DPL1", 4);
  write_raw<std::uint32_t>(os, 1);
  write_raw<std::uint32_t>(os, static_cast<std::uint32_t>(ds.n_samples()));
  write_raw<std::uint32_t>(os, static_cast<std::uint32_t>(ds.n_input_channels()));
  const Grid grid = ds.grid();
  write_raw<std::uint32_t>(os, static_cast<std::uint32_t>(grid.n));
  write_raw<double>(os, grid.period);
  for (int i = 0; i < ds.n_samples(); ++i) {
    for (const auto& ch : ds.inputs[i]) {
      os.write(reinterpret_cast<const char*>(ch.values.data()),
               static_cast<std::streamsize>(sizeof(double) * ch.values.size()));
    }
    os.write(reinterpret_cast<const char*>(ds.outputs[i].values.data()),
             static_cast<std::streamsize>(sizeof(double) * ds.outputs[i].values.size()));
  }
  const std::string manifest = ds.manifest.dump();
  write_raw<std::uint32_t>(os, static_cast<std::uint32_t>(manifest.size()));
  os.write(manifest.data(), static_cast<std::streamsize>(manifest.size()));
  if (!os) throw IoError("short write: " + path.string());
}

Dataset read_dataset(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open for reading: " + path.string());
  char magic[4];
  is.read(magic, 4);
  if (!is || std::string(magic, 4) != "DPL1") throw IoError("dataset: bad magic");
  const auto version = read_raw<std::uint32_t>(is);
  if (version != 1) throw IoError("dataset: unsupported version");
  const auto n_samples = read_raw<std::uint32_t>(is);
  const auto n_channels = read_raw<std::uint32_t>(is);
  const auto n = read_raw<std::uint32_t>(is);
  const auto period = read_raw<double>(is);
  const Grid grid{static_cast<Index>(n), period};

  Dataset ds;
  ds.inputs.resize(n_samples);
  ds.outputs.resize(n_samples);
  for (std::uint32_t i = 0; i < n_samples; ++i) {
    ds.inputs[i].resize(n_channels);
    for (std::uint32_t c = 0; c < n_channels; ++c) {
      VectorX v(n);
      is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(sizeof(double) * n));
      ds.inputs[i][c] = GridFunction(grid, std::move(v));
    }
    VectorX v(n);
    is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(sizeof(double) * n));
    ds.outputs[i] = GridFunction(grid, std::move(v));
  }
  if (!is) throw IoError("dataset: truncated payload");
  const auto len = read_raw<std::uint32_t>(is);
  std::string manifest(len, '\0');
  is.read(manifest.data(), len);
  if (!is) throw IoError("dataset: truncated manifest");
  ds.manifest = json::parse(manifest);
  return ds;
}

std::string config_hash(const json& j) {
  const std::string s = j.dump();
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace oplab
