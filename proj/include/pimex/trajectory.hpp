#pragma once

#include "pimex/types.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <vector>

namespace pimex {

/// Everything the sensitivity and adjoint sweeps need from forward step n.
/// Stage quantities are indexed [stage][subsystem].
struct StageRecord {
  Index step = 0;  // 1-based step index n
  double t_start = 0.0;
  double dt = 0.0;
  PartitionedState u_prev;
  std::vector<double> stage_time;
  std::vector<PartitionedState> stage_state;
  std::vector<PartitionedState> k_implicit;
  std::vector<PartitionedState> k_explicit;
  std::vector<PartitionedState> predictor;

  bool operator==(const StageRecord&) const = default;
};

/// Shape of the records a store holds.
struct TrajectoryLayout {
  Index stages = 0;
  std::vector<Index> state_dims;
  std::vector<Index> coupling_dims;
  Index n_mu = 0;

  bool operator==(const TrajectoryLayout&) const = default;
};

/// Append-only during forward integration, random access afterwards.
class TrajectoryStore {
 public:
  virtual ~TrajectoryStore() = default;

  /// Resets the store to hold records of `layout` starting from `u0`.
  virtual void begin(const TrajectoryLayout& layout, const PartitionedState& u0) = 0;
  virtual void append(const StageRecord& record) = 0;
  /// Record of step n, 1 <= n <= size().
  virtual StageRecord get(Index n) const = 0;
  virtual Index size() const = 0;
  virtual const TrajectoryLayout& layout() const = 0;
  virtual const PartitionedState& initial_state() const = 0;
};

class MemoryTrajectory final : public TrajectoryStore {
 public:
  void begin(const TrajectoryLayout& layout, const PartitionedState& u0) override;
  void append(const StageRecord& record) override;
  StageRecord get(Index n) const override;
  const StageRecord& at(Index n) const;
  Index size() const override { return static_cast<Index>(records_.size()); }
  const TrajectoryLayout& layout() const override { return layout_; }
  const PartitionedState& initial_state() const override { return u0_; }

 private:
  TrajectoryLayout layout_;
  PartitionedState u0_;
  std::vector<StageRecord> records_;
};

/// Store backed by a trajectory file; records are written as they are
/// appended and read back on demand.
class FileTrajectory final : public TrajectoryStore {
 public:
  explicit FileTrajectory(std::filesystem::path path);

  void begin(const TrajectoryLayout& layout, const PartitionedState& u0) override;
  void append(const StageRecord& record) override;
  StageRecord get(Index n) const override;
  Index size() const override { return count_; }
  const TrajectoryLayout& layout() const override { return layout_; }
  const PartitionedState& initial_state() const override { return u0_; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  TrajectoryLayout layout_;
  PartitionedState u0_;
  Index count_ = 0;
  std::uint64_t body_offset_ = 0;
  std::uint64_t record_bytes_ = 0;
  mutable std::fstream file_;
  mutable std::mutex mutex_;
};

/// Binary trajectory format (little-endian):
///   "IMXTRAJ1", u32 N_t, u32 s, u32 m, u32 state_dims[m], u32 coupling_dims[m], u32 n_mu,
///   f64 u_0[sum(state_dims)], then N_t records of f64 fields:
///   n, t_start, dt, u_prev, and for each stage j: t_j, u_j, kI_j, kE_j, chat_j
///   (vector fields concatenated over subsystems in order).
void write_trajectory(const TrajectoryStore& store, const std::filesystem::path& path);
MemoryTrajectory read_trajectory(const std::filesystem::path& path);

TrajectoryLayout layout_of(const StageRecord& record, Index n_mu);

}  // namespace pimex
