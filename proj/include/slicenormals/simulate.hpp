#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Geometry>

#include "slicenormals/io.hpp"
#include "slicenormals/scan.hpp"

namespace slicenormals {

/// Spinning multi-beam LiDAR. Beam elevations are ascending, so beam i lands in
/// scan row i; column c fires at azimuth 2*pi*c/azimuth_steps about the rig's z axis.
struct SensorRig {
  std::vector<double> beam_elevations;  // radians, strictly increasing
  std::size_t azimuth_steps = 900;
  Eigen::Isometry3d pose = Eigen::Isometry3d::Identity();
  double max_range = 100.0;
  double range_noise_sigma = 0.0;
  std::uint64_t noise_seed = 0;

  void validate() const {
    if (beam_elevations.size() < 2) throw ContractError("rig needs at least 2 beams");
    for (std::size_t i = 1; i < beam_elevations.size(); ++i) {
      if (!(beam_elevations[i] > beam_elevations[i - 1])) {
        throw ContractError("beam elevations must be strictly increasing");
      }
    }
    if (azimuth_steps < 1) throw ContractError("azimuth_steps must be >= 1");
    if (!(max_range > 0.0)) throw ContractError("max_range must be positive");
    if (!(range_noise_sigma >= 0.0)) throw ContractError("noise sigma must be >= 0");
  }

  /// Unit ray direction in the rig frame.
  Vec3 beam_direction(std::size_t beam, std::size_t azimuth) const {
    const double elev = beam_elevations[beam];
    const double az = 2.0 * std::numbers::pi * static_cast<double>(azimuth) /
                      static_cast<double>(azimuth_steps);
    return {std::cos(elev) * std::cos(az), std::cos(elev) * std::sin(az), std::sin(elev)};
  }
};

inline std::vector<double> uniform_elevations(std::size_t beams, double lowest_deg,
                                              double highest_deg) {
  std::vector<double> out(beams);
  for (std::size_t i = 0; i < beams; ++i) {
    const double deg = lowest_deg + (highest_deg - lowest_deg) * static_cast<double>(i) /
                                        static_cast<double>(beams - 1);
    out[i] = deg * std::numbers::pi / 180.0;
  }
  return out;
}

/// 16 beams over -15..+15 deg, 900 azimuth steps.
inline SensorRig vlp16_rig() {
  SensorRig rig;
  rig.beam_elevations = uniform_elevations(16, -15.0, 15.0);
  rig.azimuth_steps = 900;
  return rig;
}

/// 32 beams over -45..+45 deg, 1024 azimuth steps.
inline SensorRig os0_32_rig() {
  SensorRig rig;
  rig.beam_elevations = uniform_elevations(32, -45.0, 45.0);
  rig.azimuth_steps = 1024;
  return rig;
}

inline SensorRig rig_preset(std::string_view name) {
  if (name == "vlp16") return vlp16_rig();
  if (name == "os0-32") return os0_32_rig();
  throw ContractError("unknown rig preset '" + std::string(name) + "' (expected vlp16 or os0-32)");
}

/// Half-space {x : normal . x <= offset}; its boundary plane is the visible surface.
struct PlanePrimitive {
  int id = 0;
  Vec3 normal = Vec3::UnitZ();  // outward, unit length
  double offset = 0.0;
};

/// Solid axis-aligned box.
struct BoxPrimitive {
  int id = 0;
  Vec3 min_corner = Vec3::Zero();
  Vec3 max_corner = Vec3::Ones();
};

using Primitive = std::variant<PlanePrimitive, BoxPrimitive>;

struct Scene {
  std::vector<Primitive> primitives;

  void validate() const {
    for (const auto& prim : primitives) {
      if (const auto* plane = std::get_if<PlanePrimitive>(&prim)) {
        if (std::abs(plane->normal.norm() - 1.0) > 1e-9) {
          throw ContractError("plane normal must be unit length");
        }
      } else {
        const auto& box = std::get<BoxPrimitive>(prim);
        if (!((box.max_corner - box.min_corner).array() > 0.0).all()) {
          throw ContractError("box extents must be positive");
        }
      }
    }
  }

  /// Scene rotated about the world origin. Only plane scenes can be rotated,
  /// since boxes stay axis-aligned.
  Scene rotated(const Eigen::Matrix3d& rotation) const {
    Scene out;
    for (const auto& prim : primitives) {
      const auto* plane = std::get_if<PlanePrimitive>(&prim);
      if (plane == nullptr) throw ContractError("cannot rotate a scene containing boxes");
      out.primitives.push_back(PlanePrimitive{plane->id, rotation * plane->normal, plane->offset});
    }
    return out;
  }
};

inline Scene make_floor_scene(double floor_height = -1.0) {
  return Scene{{PlanePrimitive{0, Vec3::UnitZ(), floor_height}}};
}

/// Floor z = -1 meeting a wall x = wall_distance.
inline Scene make_corner_scene(double wall_distance) {
  if (!(wall_distance > 0.0)) throw ContractError("wall_distance must be positive");
  return Scene{{PlanePrimitive{0, Vec3::UnitZ(), -1.0},
                PlanePrimitive{1, -Vec3::UnitX(), -wall_distance}}};
}

/// Floor z = -1 with a 2 x 2 x 1.5 m crate resting on it, 4 m ahead of the sensor.
inline Scene make_box_scene() {
  return Scene{{PlanePrimitive{0, Vec3::UnitZ(), -1.0},
                BoxPrimitive{1, Vec3(4.0, -1.0, -1.0), Vec3(6.0, 1.0, 0.5)}}};
}

struct GroundTruthCell {
  bool hit = false;
  int hit_id = -1;
  int face = -1;  // box face 0..5 (axis*2 + side); planes use 0
  Vec3 normal = Vec3::Zero();
  bool crease = false;
};

/// Exact surface data per scan cell.
struct GroundTruth {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<GroundTruthCell> cells;

  const GroundTruthCell& at(std::size_t row, std::size_t col) const { return cells[row * cols + col]; }
};

struct Hit {
  double range;
  int id;
  int face;
  Vec3 normal;
};

namespace detail {

inline std::optional<Hit> intersect(const PlanePrimitive& plane, const Vec3& origin, const Vec3& dir) {
  const double denom = plane.normal.dot(dir);
  if (!(denom < 0.0)) return std::nullopt;  // parallel or leaving the half-space
  const double t = (plane.offset - plane.normal.dot(origin)) / denom;
  if (!(t > 0.0)) return std::nullopt;
  return Hit{t, plane.id, 0, plane.normal};
}

inline std::optional<Hit> intersect(const BoxPrimitive& box, const Vec3& origin, const Vec3& dir) {
  double t_near = -std::numeric_limits<double>::infinity();
  double t_far = std::numeric_limits<double>::infinity();
  int entry_axis = -1;
  for (int axis = 0; axis < 3; ++axis) {
    if (dir[axis] == 0.0) {
      if (origin[axis] < box.min_corner[axis] || origin[axis] > box.max_corner[axis]) {
        return std::nullopt;
      }
      continue;
    }
    double t0 = (box.min_corner[axis] - origin[axis]) / dir[axis];
    double t1 = (box.max_corner[axis] - origin[axis]) / dir[axis];
    if (t0 > t1) std::swap(t0, t1);
    if (t0 > t_near) {
      t_near = t0;
      entry_axis = axis;
    }
    t_far = std::min(t_far, t1);
  }
  if (entry_axis < 0 || !(t_near > 0.0) || t_near > t_far) return std::nullopt;
  Vec3 normal = Vec3::Zero();
  const bool max_side = dir[entry_axis] < 0.0;  // entering through the max face
  normal[entry_axis] = max_side ? 1.0 : -1.0;
  return Hit{t_near, box.id, entry_axis * 2 + (max_side ? 1 : 0), normal};
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Standard normal sample keyed by (seed, row, col); independent of evaluation order.
inline double keyed_gaussian(std::uint64_t seed, std::size_t row, std::size_t col) {
  std::uint64_t key = splitmix64(seed);
  key = splitmix64(key ^ static_cast<std::uint64_t>(row));
  key = splitmix64(key ^ (static_cast<std::uint64_t>(col) << 20));
  const std::uint64_t a = splitmix64(key);
  const std::uint64_t b = splitmix64(a);
  constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
  const double u1 = (static_cast<double>(a >> 11) + 0.5) * kScale;
  const double u2 = (static_cast<double>(b >> 11) + 0.5) * kScale;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace detail

/// Nearest hit of a world-frame ray against the scene.
inline std::optional<Hit> cast_ray(const Scene& scene, const Vec3& origin, const Vec3& dir) {
  std::optional<Hit> best;
  for (const auto& prim : scene.primitives) {
    auto hit = std::visit([&](const auto& p) { return detail::intersect(p, origin, dir); }, prim);
    if (hit && (!best || hit->range < best->range)) best = hit;
  }
  return best;
}

/// Marks cells whose 4-neighborhood (columns wrap, rows do not) touches a
/// different surface face than the cell itself.
inline void mark_creases(GroundTruth& gt) {
  auto same_surface = [](const GroundTruthCell& a, const GroundTruthCell& b) {
    return a.hit_id == b.hit_id && a.face == b.face;
  };
  for (std::size_t row = 0; row < gt.rows; ++row) {
    for (std::size_t col = 0; col < gt.cols; ++col) {
      GroundTruthCell& cell = gt.cells[row * gt.cols + col];
      if (!cell.hit) continue;
      const std::size_t left = col == 0 ? gt.cols - 1 : col - 1;
      const std::size_t right = col + 1 == gt.cols ? 0 : col + 1;
      std::array<const GroundTruthCell*, 4> neighbors{
          &gt.at(row, left), &gt.at(row, right), row > 0 ? &gt.at(row - 1, col) : nullptr,
          row + 1 < gt.rows ? &gt.at(row + 1, col) : nullptr};
      cell.crease = false;
      for (const auto* n : neighbors) {
        if (n != nullptr && n->hit && !same_surface(cell, *n)) cell.crease = true;
      }
    }
  }
}

/// Ray-casts every (beam, azimuth) pair. Points are expressed in the world
/// frame; range noise is applied along the ray after the nearest hit is found.
inline std::pair<OrganizedScan, GroundTruth> simulate(const SensorRig& rig, const Scene& scene) {
  rig.validate();
  scene.validate();
  const std::size_t rows = rig.beam_elevations.size();
  const std::size_t cols = rig.azimuth_steps;
  OrganizedScan scan(rows, cols);
  GroundTruth gt{rows, cols, std::vector<GroundTruthCell>(rows * cols)};
  const Vec3 origin = rig.pose.translation();
  for (std::size_t row = 0; row < rows; ++row) {
    for (std::size_t col = 0; col < cols; ++col) {
      const Vec3 dir = rig.pose.linear() * rig.beam_direction(row, col);
      auto hit = cast_ray(scene, origin, dir);
      if (!hit || hit->range > rig.max_range) continue;
      double range = hit->range;
      if (rig.range_noise_sigma > 0.0) {
        range += rig.range_noise_sigma * detail::keyed_gaussian(rig.noise_seed, row, col);
        if (!(range > 0.0)) continue;
      }
      scan.set_point(row, col, origin + range * dir);
      gt.cells[row * cols + col] = GroundTruthCell{true, hit->id, hit->face, hit->normal, false};
    }
  }
  mark_creases(gt);
  return {std::move(scan), std::move(gt)};
}

/// CSV: row,col,hit_id,nx,ny,nz,crease with one line per cell that has a hit.
inline void write_ground_truth_csv(const GroundTruth& gt, std::ostream& out) {
  out << "row,col,hit_id,nx,ny,nz,crease\n";
  for (std::size_t row = 0; row < gt.rows; ++row) {
    for (std::size_t col = 0; col < gt.cols; ++col) {
      const auto& c = gt.at(row, col);
      if (!c.hit) continue;
      out << row << ',' << col << ',' << c.hit_id << ',' << detail::format_double(c.normal.x())
          << ',' << detail::format_double(c.normal.y()) << ','
          << detail::format_double(c.normal.z()) << ',' << (c.crease ? 1 : 0) << '\n';
    }
  }
  detail::check_stream(out);
}

/// Reads the CSV written by write_ground_truth_csv. Face indices are not stored,
/// so the hit id stands in for the surface.
inline GroundTruth read_ground_truth_csv(std::istream& in, std::size_t rows, std::size_t cols) {
  GroundTruth gt{rows, cols, std::vector<GroundTruthCell>(rows * cols)};
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line) || line != "row,col,hit_id,nx,ny,nz,crease") {
    throw std::runtime_error("ground truth CSV: bad header");
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::array<std::string_view, 7> f{};
    std::string_view rest = line;
    for (std::size_t i = 0; i < 7; ++i) {
      auto comma = rest.find(',');
      if ((i + 1 == 7) != (comma == std::string_view::npos)) {
        throw std::runtime_error("ground truth CSV line " + std::to_string(line_no) +
                                 ": expected 7 fields");
      }
      f[i] = rest.substr(0, comma);
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    }
    try {
      auto row = detail::parse_number<std::size_t>(f[0], 0, "row");
      auto col = detail::parse_number<std::size_t>(f[1], 0, "col");
      if (row >= rows || col >= cols) throw std::runtime_error("cell outside scan");
      GroundTruthCell& c = gt.cells[row * cols + col];
      c.hit = true;
      c.hit_id = detail::parse_number<int>(f[2], 0, "hit_id");
      c.face = 0;
      for (int k = 0; k < 3; ++k) c.normal[k] = detail::parse_number<double>(f[3 + k], 0, "normal");
      c.crease = detail::parse_number<int>(f[6], 0, "crease") != 0;
    } catch (const std::exception& e) {
      throw std::runtime_error("ground truth CSV line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return gt;
}

}  // namespace slicenormals
