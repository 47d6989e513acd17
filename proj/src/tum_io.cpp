#include <cmath>
#include <fstream>
#include <sstream>

#include "swarmsim/error.hpp"
#include "swarmsim/text_io.hpp"
#include "swarmsim/traj_eval.hpp"

namespace swarmsim {

Trajectory parse_tum(const std::string& text, const std::string& source_name) {
  std::vector<Pose> poses;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') {
      continue;
    }
    const auto fields = split_whitespace(view);
    const std::string where = source_name + ":" + std::to_string(line_no);
    if (fields.size() != 8) {
      throw Error(ErrorKind::ParseError,
                  where + ": expected 8 fields, got " + std::to_string(fields.size()));
    }
    double v[8];
    for (std::size_t i = 0; i < 8; ++i) {
      if (!parse_double(fields[i], v[i]) || !std::isfinite(v[i])) {
        throw Error(ErrorKind::ParseError, where + ": bad number '" + std::string(fields[i]) + "'");
      }
    }
    Pose p;
    p.t = v[0];
    p.p = Vec3(v[1], v[2], v[3]);
    p.q = UnitQuat(v[7], v[4], v[5], v[6]);
    if (!poses.empty() && !(p.t > poses.back().t)) {
      throw Error(ErrorKind::NonMonotonicTime, where + ": timestamp does not increase");
    }
    poses.push_back(p);
  }
  return Trajectory(std::move(poses));
}

Trajectory read_tum(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::IoError, "cannot open " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_tum(buf.str(), path.string());
}

std::string format_tum_line(const Pose& pose) {
  std::string line;
  const double fields[8] = {pose.t,     pose.p.x(),  pose.p.y(),  pose.p.z(),
                            pose.q.x(), pose.q.y(),  pose.q.z(),  pose.q.w()};
  for (int i = 0; i < 8; ++i) {
    if (i > 0) {
      line += ' ';
    }
    append_double(line, fields[i]);
  }
  line += '\n';
  return line;
}

void write_tum(const std::filesystem::path& path, const Trajectory& traj) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorKind::IoError, "cannot write " + path.string());
  }
  std::string buf;
  for (const Pose& p : traj.samples()) {
    buf += format_tum_line(p);
  }
  out << buf;
  if (!out) {
    throw Error(ErrorKind::IoError, "write failed for " + path.string());
  }
}

}  // namespace swarmsim
