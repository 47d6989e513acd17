#include "swarmsim/camera.hpp"

#include <fstream>
#include <sstream>

#include "swarmsim/error.hpp"
#include "swarmsim/text_io.hpp"

namespace swarmsim {

void validate(const CameraIntrinsics& intr) {
  if (intr.width <= 0 || intr.height <= 0 || !(intr.fx > 0.0) || !(intr.fy > 0.0) ||
      !(intr.near > 0.0) || !(intr.near < intr.far) || !(intr.baseline > 0.0) ||
      intr.noise_stddev < 0.0) {
    throw Error(ErrorKind::InvalidArgument, "invalid camera intrinsics");
  }
}

Pixel distort_normalized(double x, double y, const CameraIntrinsics& c) {
  const double r2 = x * x + y * y;
  const double radial = 1.0 + c.k1 * r2 + c.k2 * r2 * r2 + c.k3 * r2 * r2 * r2;
  const double xd = x * radial + 2.0 * c.p1 * x * y + c.p2 * (r2 + 2.0 * x * x);
  const double yd = y * radial + c.p1 * (r2 + 2.0 * y * y) + 2.0 * c.p2 * x * y;
  return {xd, yd};
}

bool in_frame(const Pixel& px, const CameraIntrinsics& c) {
  return px.u >= 0.0 && px.u < c.width && px.v >= 0.0 && px.v < c.height;
}

Projection project(const Vec3& point_cam, const CameraIntrinsics& c) {
  const double z = point_cam.z();
  if (!(z >= c.near && z <= c.far)) {
    return NotVisible::ClipPlane;
  }
  const Pixel d = distort_normalized(point_cam.x() / z, point_cam.y() / z, c);
  const Pixel px{c.fx * d.u + c.skew * d.v + c.cx, c.fy * d.v + c.cy};
  if (!in_frame(px, c)) {
    return NotVisible::OutOfFrame;
  }
  return px;
}

std::vector<StereoObservation> stereo_observe(const std::vector<Landmark>& landmarks,
                                              const Pose& cam_pose, const CameraIntrinsics& intr,
                                              RngStream* rng) {
  std::vector<StereoObservation> out;
  const Vec3 right_offset(intr.baseline, 0.0, 0.0);
  const bool noisy = rng != nullptr && (intr.noise_stddev > 0.0 || intr.noise_mean != 0.0);
  for (const Landmark& lm : landmarks) {
    const Vec3 in_left = rotate_inverse(cam_pose.q, lm.p - cam_pose.p);
    const Projection left = project(in_left, intr);
    const Projection right = project(in_left - right_offset, intr);
    if (!std::holds_alternative<Pixel>(left) || !std::holds_alternative<Pixel>(right)) {
      continue;
    }
    Pixel l = std::get<Pixel>(left);
    Pixel r = std::get<Pixel>(right);
    if (noisy) {
      l.u += rng->normal(intr.noise_mean, intr.noise_stddev);
      l.v += rng->normal(intr.noise_mean, intr.noise_stddev);
      r.u += rng->normal(intr.noise_mean, intr.noise_stddev);
      r.v += rng->normal(intr.noise_mean, intr.noise_stddev);
      if (!in_frame(l, intr) || !in_frame(r, intr)) {
        continue;
      }
    }
    out.push_back({lm.id, l.u, l.v, r.u, r.v});
  }
  return out;
}

UnitQuat forward_camera_mount() {
  Mat3 r;
  // Columns: camera x, y, z axes expressed in FLU body axes.
  r << 0.0, 0.0, 1.0,
      -1.0, 0.0, 0.0,
      0.0, -1.0, 0.0;
  return UnitQuat::from_matrix(r);
}

std::vector<Landmark> read_landmarks(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::IoError, "cannot open landmark file " + path.string());
  }
  std::vector<Landmark> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty() || view.front() == '#' || (line_no == 1 && view.starts_with("id"))) {
      continue;
    }
    const auto fields = split(view, ',');
    double v[4];
    bool ok = fields.size() == 4;
    for (std::size_t i = 0; ok && i < 4; ++i) {
      ok = parse_double(fields[i], v[i]);
    }
    if (!ok) {
      throw Error(ErrorKind::ParseError,
                  path.string() + ":" + std::to_string(line_no) + ": expected id,x,y,z");
    }
    out.push_back({static_cast<std::int64_t>(v[0]), Vec3(v[1], v[2], v[3])});
  }
  return out;
}

void write_landmarks(const std::filesystem::path& path, const std::vector<Landmark>& landmarks) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorKind::IoError, "cannot write landmark file " + path.string());
  }
  std::string buf = "id,x,y,z\n";
  for (const Landmark& lm : landmarks) {
    buf += std::to_string(lm.id);
    for (int i = 0; i < 3; ++i) {
      buf += ',';
      append_double(buf, lm.p[i]);
    }
    buf += '\n';
  }
  out << buf;
}

std::vector<Landmark> generate_landmarks(std::size_t n, const Vec3& lo, const Vec3& hi,
                                         std::uint64_t seed) {
  RngStream rng(seed, 0);
  std::vector<Landmark> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Vec3 p;
    for (int k = 0; k < 3; ++k) {
      p[k] = lo[k] + (hi[k] - lo[k]) * rng.uniform();
    }
    out.push_back({static_cast<std::int64_t>(i), p});
  }
  return out;
}

}  // namespace swarmsim
