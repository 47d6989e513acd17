#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <variant>
#include <vector>

#include "swarmsim/geometry.hpp"
#include "swarmsim/rng.hpp"

namespace swarmsim {

/// Pinhole + Brown-Conrady stereo intrinsics. The distortion center is the
/// principal point. Defaults approximate a 752x480 global-shutter module.
struct CameraIntrinsics {
  int width = 752;
  int height = 480;
  double fx = 400.0;
  double fy = 400.0;
  double cx = 376.0;
  double cy = 240.0;
  double skew = 0.0;
  double k1 = 0.0, k2 = 0.0, k3 = 0.0;
  double p1 = 0.0, p2 = 0.0;
  double noise_mean = 0.0;
  double noise_stddev = 0.0;
  double near = 0.1;
  double far = 100.0;
  double baseline = 0.06;
};

/// Throws InvalidArgument when an intrinsics invariant does not hold.
void validate(const CameraIntrinsics& intr);

struct Pixel {
  double u = 0.0;
  double v = 0.0;
};

enum class NotVisible { ClipPlane, OutOfFrame };

using Projection = std::variant<Pixel, NotVisible>;

/// Applies radial + tangential distortion to normalized coordinates.
Pixel distort_normalized(double x, double y, const CameraIntrinsics& intr);

/// Camera optical frame: z forward, x right, y down. Depth outside
/// [near, far] is ClipPlane; pixels outside [0,w) x [0,h) are OutOfFrame.
Projection project(const Vec3& point_cam, const CameraIntrinsics& intr);

bool in_frame(const Pixel& px, const CameraIntrinsics& intr);

struct Landmark {
  std::int64_t id = 0;
  Vec3 p = Vec3::Zero();
};

struct StereoObservation {
  std::int64_t landmark_id = 0;
  double uL = 0.0, vL = 0.0;
  double uR = 0.0, vR = 0.0;
};

/// `cam_pose` is the left camera's optical frame in the world. The right
/// eye sits `baseline` along camera +x. Noise draws: uL, vL, uR, vR per
/// visible landmark, in input order. Landmarks not visible in both eyes,
/// before or after noise, are omitted.
std::vector<StereoObservation> stereo_observe(const std::vector<Landmark>& landmarks,
                                              const Pose& cam_pose, const CameraIntrinsics& intr,
                                              RngStream* rng);

/// Rotation from the forward-looking camera optical frame to FLU body axes.
UnitQuat forward_camera_mount();

/// Landmark world file, CSV "id,x,y,z" with a header row.
std::vector<Landmark> read_landmarks(const std::filesystem::path& path);
void write_landmarks(const std::filesystem::path& path, const std::vector<Landmark>& landmarks);

/// Uniform landmarks in the axis-aligned box [lo, hi], ids 0..n-1.
std::vector<Landmark> generate_landmarks(std::size_t n, const Vec3& lo, const Vec3& hi,
                                         std::uint64_t seed);

}  // namespace swarmsim
