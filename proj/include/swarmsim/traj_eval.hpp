#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "swarmsim/geometry.hpp"

namespace swarmsim {

/// Time-ordered poses with strictly increasing timestamps.
class Trajectory {
 public:
  Trajectory() = default;
  /// Throws NonMonotonicTime when timestamps do not strictly increase.
  explicit Trajectory(std::vector<Pose> samples);

  const std::vector<Pose>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  const Pose& operator[](std::size_t i) const { return samples_[i]; }

 private:
  std::vector<Pose> samples_;
};

struct PosePair {
  Pose ref;
  Pose est;
};

enum class MetricUnit { Meters, Degrees };

struct MetricReport {
  double rmse = 0.0;
  double mean = 0.0;
  double median = 0.0;
  double std = 0.0;  ///< population standard deviation
  double min = 0.0;
  double max = 0.0;
  MetricUnit unit = MetricUnit::Meters;
  std::size_t n_pairs = 0;
};

/// Aggregates per-pair errors. Sums use pairwise summation in index order.
/// Throws InvalidArgument on an empty input.
MetricReport summarize(std::span<const double> errors, MetricUnit unit);

/// Pairwise (cascade) summation in index order.
double pairwise_sum(std::span<const double> values);

/// Greedy nearest-timestamp matching: candidate pairs with |dt| <= max_dt
/// are taken in order of increasing |dt| (ties by ref index, then est index),
/// each sample used at most once. Output is ordered by ref time.
/// Throws NoOverlap when nothing pairs.
std::vector<PosePair> associate(const Trajectory& ref, const Trajectory& est, double max_dt);

enum class Alignment { None, SE3 };

struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();
};

/// Least-squares rigid (no scale) transform mapping `source` points onto
/// `target` points, Umeyama's closed form. Throws DegenerateAlignment with
/// fewer than 3 non-collinear points.
RigidTransform umeyama_se3(std::span<const Vec3> source, std::span<const Vec3> target);

struct ErrorReports {
  MetricReport trans;  ///< m
  MetricReport rot;    ///< deg
};

/// Absolute pose error with optional SE(3) alignment of est onto ref.
ErrorReports ape(const std::vector<PosePair>& pairs, Alignment align);

/// Per-pair APE values before aggregation (m, deg).
struct PairErrors {
  std::vector<double> trans;
  std::vector<double> rot;
};
PairErrors ape_errors(const std::vector<PosePair>& pairs, Alignment align);

/// Relative pose error over sub-trajectories of ref arc length `delta` (m).
/// Throws PathTooShort when the reference path is shorter than delta.
ErrorReports rpe(const std::vector<PosePair>& pairs, double delta);
PairErrors rpe_errors(const std::vector<PosePair>& pairs, double delta);

/// TUM text format: "timestamp tx ty tz qx qy qz qw" per line, quaternion
/// scalar-last on disk. '#' lines and blank lines are skipped.
Trajectory read_tum(const std::filesystem::path& path);
Trajectory parse_tum(const std::string& text, const std::string& source_name = "<string>");
void write_tum(const std::filesystem::path& path, const Trajectory& traj);
std::string format_tum_line(const Pose& pose);

std::string to_string(MetricUnit unit);

}  // namespace swarmsim
