#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ccembed/kernelmath.hpp"
#include "ccembed/sysmodels.hpp"

namespace ccembed {

inline constexpr int kFileFormatVersion = 1;

struct Sample {
  Vector x0;
  ControlSequence u;
  StateTrajectory x;

  bool operator==(const Sample& other) const {
    return same_values(x0, other.x0) && u == other.u && x == other.x;
  }
};

// M i.i.d. triples (x0^i, u^i, x^i) with x^i ~ Q(. | x0^i, u^i).
struct Dataset {
  std::size_t state_dim = 0;
  std::size_t control_dim = 0;
  std::size_t horizon = 0;
  std::vector<Sample> samples;
  std::uint64_t master_seed = 0;
  std::string config_digest;

  std::size_t size() const noexcept { return samples.size(); }
  PointSet initial_states() const;
  // Row i is samples[i].u.flattened().
  PointSet flattened_controls() const;
  void validate() const;

  bool operator==(const Dataset& other) const = default;
};

struct ControlLibrary {
  std::size_t control_dim = 0;
  std::size_t horizon = 0;
  std::vector<ControlSequence> sequences;
  std::uint64_t master_seed = 0;
  std::string config_digest;

  std::size_t size() const noexcept { return sequences.size(); }
  PointSet flattened() const;
  void validate() const;

  bool operator==(const ControlLibrary& other) const = default;
};

struct DatasetGenConfig {
  std::size_t sample_count = 2500;
  std::size_t horizon = 15;
  Vector x0_low;
  Vector x0_high;
  std::size_t randomized_steps = 3;
  // Per-step box for the randomized prefix u_0..u_{T_r-1}.
  Vector control_low;
  Vector control_high;
  // u_t = gain * (x_t - target) for t >= randomized_steps.
  Matrix gain;
  Vector target;

  // Default generation protocol for the planar quadrotor.
  static DatasetGenConfig quadrotor_default();
  // [[-kp, -kd, 0, 0], [0, 0, -kp, -kd]]
  static Matrix pd_gain(double kp, double kd);
  void validate(std::size_t state_dim, std::size_t control_dim) const;
};

enum class LibraryMode { grid, uniform };

struct LibraryGenConfig {
  LibraryMode mode = LibraryMode::grid;
  // Points per control coordinate; P = g^(m * T_r).
  std::size_t grid_resolution = 4;
  // P for uniform mode.
  std::size_t count = 1000;
  std::size_t max_sequences = 100000;
  // Initial state the feedback segment is simulated from.
  Vector x0;
  std::uint64_t seed = 0;
};

// Feedback-completed control sequence: the prefix is applied as given, then
// u_t = gain * (x_t - target) on the supplied system realization.
ControlSequence closed_loop_controls(const SystemModel& model, const Vector& x0,
                                     const StepMatrix& prefix, const DatasetGenConfig& cfg,
                                     std::span<const double> theta, Stream& rng);

// Each sample i uses its own stream seeded with derive_seed(master_seed, i).
Dataset generate_dataset(const DatasetGenConfig& cfg, const SystemModel& model,
                         std::uint64_t master_seed);

// nominal_model must be deterministic (point parameters, zero disturbance).
ControlLibrary generate_library(const DatasetGenConfig& cfg, const LibraryGenConfig& lib_cfg,
                                const SystemModel& nominal_model);
ControlLibrary generate_library(const DatasetGenConfig& cfg, const LibraryGenConfig& lib_cfg,
                                const QuadrotorParams& nominal, double dt);

// JSON-lines: one header object, then one record per line.
std::string serialize_dataset(const Dataset& ds);
std::string serialize_library(const ControlLibrary& lib);
Dataset parse_dataset(const std::string& text);
ControlLibrary parse_library(const std::string& text);

void save_dataset(const Dataset& ds, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);
void save_library(const ControlLibrary& lib, const std::filesystem::path& path);
ControlLibrary load_library(const std::filesystem::path& path);

// Digest of the library's sequences only (independent of metadata).
std::string library_digest(const ControlLibrary& lib);

}  // namespace ccembed
