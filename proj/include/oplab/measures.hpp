#pragma once

#include <filesystem>
#include <optional>
#include <variant>
#include <vector>

#include <json.hpp>

#include "oplab/exact_pde.hpp"
#include "oplab/grid.hpp"
#include "oplab/rng.hpp"

namespace oplab {

using json = nlohmann::json;

/// Independent uniform height / width / center measure for box waves.
struct BoxWaveMeasure {
  Real h_min = 0.2, h_max = 0.8;
  Real w_min = 0.05, w_max = 0.3;
  Real xi_min = 0.0, xi_max = 0.5;
};

/// Centered box waves shifted uniformly over the full period with the feature
/// ranges above; used by the box-measure spectrum routines.
struct ShiftedSineMeasure {
  Real xi_min = 0.0, xi_max = two_pi;
};

/// Stationary periodic Gaussian field with squared-exponential kernel
/// exp(-|x-x'|^2 / (2 l^2)), periodized over the grid period. Zero mean,
/// marginal variance k(0) = 1.
struct PeriodicGrfMeasure {
  Real length_scale = 0.06;
};

/// Random 1D shock tube on [-5, 5]: left/right primitive states and the jump
/// location drawn from affine maps of U([0,1]^6) via G(z) = 2z - 1.
struct ShockTubeMeasure {};

using MeasureSpec =
    std::variant<BoxWaveMeasure, ShiftedSineMeasure, PeriodicGrfMeasure, ShockTubeMeasure>;

BoxWaveParams sample_box(const BoxWaveMeasure& spec, Rng& rng);

/// Spectral synthesis from the exact circulant diagonalization of the
/// periodized kernel. Numerically negative eigenvalues are clamped to zero;
/// the count of clamped modes is reported through `clamped` when given.
GridFunction sample_grf(const PeriodicGrfMeasure& spec, Rng& rng, const Grid& grid,
                        int* clamped = nullptr);

/// Circulant covariance eigenvalues of the periodized kernel on the grid, in
/// the dx-weighted L2 convention (their sum over the period is the marginal
/// variance).
VectorX grf_covariance_eigenvalues(const PeriodicGrfMeasure& spec, const Grid& grid);

struct ShockTubeParams {
  Real rho_l, rho_r, u_l, u_r, p_l, p_r, x0;
};

/// Affine maps from z in [0,1]^6 through G(z) = 2z - 1.
ShockTubeParams shocktube_from_z(const std::array<Real, 6>& z);

ShockTubeParams sample_shocktube_params(Rng& rng);

/// Piecewise-constant conservative initial state on a grid representing
/// [-5, 5] (grid period 10; physical coordinate = point - 5).
EulerState1D shocktube_initial(const ShockTubeParams& params, const Grid& grid);

EulerState1D sample_shocktube(const ShockTubeMeasure& spec, Rng& rng, const Grid& grid);

struct SolverSettings {
  Real advection_speed = 0.5;
  Real final_time = 0.25;
  Real cfl = 0.45;
  int grf_refine = 4;  // Burgers-GRF outputs are solved at refine * n and averaged down
};

/// Input/output pairs plus the manifest that regenerates them.
struct Dataset {
  std::vector<std::vector<GridFunction>> inputs;  // [sample][channel]
  std::vector<GridFunction> outputs;
  json manifest;

  int n_samples() const { return static_cast<int>(outputs.size()); }
  int n_input_channels() const { return inputs.empty() ? 1 : static_cast<int>(inputs[0].size()); }
  Grid grid() const { return outputs.empty() ? Grid{} : outputs[0].grid; }
};

/// Deterministic under (seed, spec, grid, settings); per-sample substreams make
/// the result independent of the number of worker threads.
Dataset generate_dataset(const MeasureSpec& measure, int n_samples, const Grid& grid,
                         const SolverSettings& settings, std::uint64_t seed, int threads = 1);

json measure_to_json(const MeasureSpec& measure);
MeasureSpec measure_from_json(const json& j);

/// Binary dataset format: magic "DPL1", u32 version, u32 n_samples,
/// u32 n_input_channels, u32 grid n, f64 period, little-endian f64 payload
/// (inputs then output per sample), then u32-length-prefixed JSON manifest.
void write_dataset(const Dataset& ds, const std::filesystem::path& path);
Dataset read_dataset(const std::filesystem::path& path);

/// FNV-1a hash of a canonical JSON dump; used to stamp artifacts.
std::string config_hash(const json& j);

}  // namespace oplab
