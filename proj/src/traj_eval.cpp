#include "swarmsim/traj_eval.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

#include "swarmsim/error.hpp"

namespace swarmsim {

Trajectory::Trajectory(std::vector<Pose> samples) : samples_(std::move(samples)) {
  for (std::size_t i = 1; i < samples_.size(); ++i) {
    if (!(samples_[i].t > samples_[i - 1].t)) {
      throw Error(ErrorKind::NonMonotonicTime,
                  "timestamps must strictly increase (sample " + std::to_string(i) + ")");
    }
  }
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) {
      s += v;
    }
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

MetricReport summarize(std::span<const double> errors, MetricUnit unit) {
  if (errors.empty()) {
    throw Error(ErrorKind::InvalidArgument, "cannot summarize zero errors");
  }
  const auto n = static_cast<double>(errors.size());
  std::vector<double> squares(errors.size());
  std::transform(errors.begin(), errors.end(), squares.begin(), [](double e) { return e * e; });

  MetricReport r;
  r.unit = unit;
  r.n_pairs = errors.size();
  r.mean = pairwise_sum(errors) / n;
  r.rmse = std::sqrt(pairwise_sum(squares) / n);
  std::vector<double> dev(errors.size());
  std::transform(errors.begin(), errors.end(), dev.begin(),
                 [&](double e) { return (e - r.mean) * (e - r.mean); });
  r.std = std::sqrt(pairwise_sum(dev) / n);

  std::vector<double> sorted(errors.begin(), errors.end());
  std::sort(sorted.begin(), sorted.end());
  r.min = sorted.front();
  r.max = sorted.back();
  const std::size_t mid = sorted.size() / 2;
  r.median = sorted.size() % 2 == 1 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  return r;
}

std::vector<PosePair> associate(const Trajectory& ref, const Trajectory& est, double max_dt) {
  struct Candidate {
    double gap;
    std::size_t i;
    std::size_t j;
  };
  std::vector<Candidate> candidates;
  // Both sequences are sorted: sweep a window of est samples per ref sample.
  std::size_t lo = 0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const double t = ref[i].t;
    while (lo < est.size() && est[lo].t < t - max_dt) {
      ++lo;
    }
    for (std::size_t j = lo; j < est.size() && est[j].t <= t + max_dt; ++j) {
      candidates.push_back({std::abs(est[j].t - t), i, j});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    return std::tie(a.gap, a.i, a.j) < std::tie(b.gap, b.i, b.j);
  });
  std::vector<bool> ref_used(ref.size(), false), est_used(est.size(), false);
  std::vector<std::pair<std::size_t, std::size_t>> matched;
  for (const Candidate& c : candidates) {
    if (!ref_used[c.i] && !est_used[c.j]) {
      ref_used[c.i] = true;
      est_used[c.j] = true;
      matched.emplace_back(c.i, c.j);
    }
  }
  if (matched.empty()) {
    throw Error(ErrorKind::NoOverlap, "no timestamp pairs within max_dt");
  }
  std::sort(matched.begin(), matched.end());
  std::vector<PosePair> out;
  out.reserve(matched.size());
  for (const auto& [i, j] : matched) {
    out.push_back({ref[i], est[j]});
  }
  return out;
}

RigidTransform umeyama_se3(std::span<const Vec3> source, std::span<const Vec3> target) {
  if (source.size() != target.size()) {
    throw Error(ErrorKind::LengthMismatch, "alignment point sets differ in size");
  }
  if (source.size() < 3) {
    throw Error(ErrorKind::DegenerateAlignment, "need at least 3 points");
  }
  const auto n = static_cast<double>(source.size());
  Vec3 mu_s = Vec3::Zero(), mu_t = Vec3::Zero();
  for (std::size_t i = 0; i < source.size(); ++i) {
    mu_s += source[i];
    mu_t += target[i];
  }
  mu_s /= n;
  mu_t /= n;
  Mat3 cov = Mat3::Zero();
  Mat3 scatter = Mat3::Zero();
  for (std::size_t i = 0; i < source.size(); ++i) {
    const Vec3 ds = source[i] - mu_s;
    cov += (target[i] - mu_t) * ds.transpose();
    scatter += ds * ds.transpose();
  }
  cov /= n;
  const Eigen::JacobiSVD<Mat3> scatter_svd(scatter);
  const Vec3 spread = scatter_svd.singularValues();
  if (!(spread(0) > 0.0) || !(spread(1) > 1e-12 * spread(0))) {
    throw Error(ErrorKind::DegenerateAlignment, "points are collinear or coincident");
  }
  const Eigen::JacobiSVD<Mat3> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 s = Mat3::Identity();
  if (svd.matrixU().determinant() * svd.matrixV().determinant() < 0.0) {
    s(2, 2) = -1.0;
  }
  RigidTransform out;
  out.rotation = svd.matrixU() * s * svd.matrixV().transpose();
  out.translation = mu_t - out.rotation * mu_s;
  return out;
}

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

double angle_deg(const UnitQuat& a, const UnitQuat& b) {
  return rotation_angle(a.conjugate() * b) * kRadToDeg;
}

}  // namespace

PairErrors ape_errors(const std::vector<PosePair>& pairs, Alignment align) {
  if (pairs.empty()) {
    throw Error(ErrorKind::NoOverlap, "no pose pairs");
  }
  RigidTransform tf;
  if (align == Alignment::SE3) {
    std::vector<Vec3> src, dst;
    for (const PosePair& pp : pairs) {
      src.push_back(pp.est.p);
      dst.push_back(pp.ref.p);
    }
    tf = umeyama_se3(src, dst);
  }
  const UnitQuat q_align = UnitQuat::from_matrix(tf.rotation);
  PairErrors out;
  for (const PosePair& pp : pairs) {
    Vec3 p_est = pp.est.p;
    UnitQuat q_est = pp.est.q;
    if (align == Alignment::SE3) {
      p_est = tf.rotation * p_est + tf.translation;
      q_est = q_align * q_est;
    }
    out.trans.push_back((pp.ref.p - p_est).norm());
    out.rot.push_back(angle_deg(pp.ref.q, q_est));
  }
  return out;
}

ErrorReports ape(const std::vector<PosePair>& pairs, Alignment align) {
  const PairErrors e = ape_errors(pairs, align);
  return {summarize(e.trans, MetricUnit::Meters), summarize(e.rot, MetricUnit::Degrees)};
}

PairErrors rpe_errors(const std::vector<PosePair>& pairs, double delta) {
  if (!(delta > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "delta must be positive");
  }
  std::vector<double> arc(pairs.size(), 0.0);
  for (std::size_t i = 1; i < pairs.size(); ++i) {
    arc[i] = arc[i - 1] + (pairs[i].ref.p - pairs[i - 1].ref.p).norm();
  }
  // Absorb rounding in the accumulated arc length so that evenly spaced
  // samples reach exactly delta where they should.
  const double reach = delta * (1.0 - 1e-9);
  PairErrors out;
  std::size_t j = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    j = std::max(j, i + 1);
    while (j < pairs.size() && arc[j] - arc[i] < reach) {
      ++j;
    }
    if (j >= pairs.size()) {
      break;
    }
    const Pose ref_rel = compose(inverse(pairs[i].ref), pairs[j].ref);
    const Pose est_rel = compose(inverse(pairs[i].est), pairs[j].est);
    const Pose err = compose(inverse(ref_rel), est_rel);
    out.trans.push_back(err.p.norm());
    out.rot.push_back(rotation_angle(err.q) * kRadToDeg);
  }
  if (out.trans.empty()) {
    throw Error(ErrorKind::PathTooShort, "reference path is shorter than delta");
  }
  return out;
}

ErrorReports rpe(const std::vector<PosePair>& pairs, double delta) {
  const PairErrors e = rpe_errors(pairs, delta);
  return {summarize(e.trans, MetricUnit::Meters), summarize(e.rot, MetricUnit::Degrees)};
}

std::string to_string(MetricUnit unit) { return unit == MetricUnit::Meters ? "m" : "deg"; }

}  // namespace swarmsim
