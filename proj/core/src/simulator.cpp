// Copyright 2026 The trajlink Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "trajlink/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace trajlink
{

namespace
{

constexpr double kPi = std::numbers::pi;
constexpr double kVoxel = 0.1;

std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double deg2rad(double d)
{
  return d * kPi / 180.0;
}

double wrap_angle(double a)
{
  while (a > kPi) {
    a -= 2.0 * kPi;
  }
  while (a < -kPi) {
    a += 2.0 * kPi;
  }
  return a;
}

bool in_blank(const MapSpec & map, double x, double y)
{
  for (const auto & b : map.blanks) {
    if (b.contains(x, y)) {
      return true;
    }
  }
  return false;
}

bool point_in_convex(std::span<const Point2> poly, Point2 p)
{
  if (poly.size() < 3) {
    return false;
  }
  int sign = 0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point2 a = poly[i];
    const Point2 b = poly[(i + 1) % poly.size()];
    const double cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
    if (std::abs(cross) < 1e-12) {
      continue;
    }
    const int s = cross > 0 ? 1 : -1;
    if (sign == 0) {
      sign = s;
    } else if (s != sign) {
      return false;
    }
  }
  return true;
}

// Offsets a polyline sideways by d (positive = left of travel) with miter joins.
std::vector<Point2> offset_polyline(std::span<const Point2> pts, double d, bool closed)
{
  const std::size_t n = pts.size();
  std::vector<Point2> out;
  if (n < 2 || d == 0.0) {
    out.assign(pts.begin(), pts.end());
    return out;
  }
  auto normal = [&](std::size_t i, std::size_t j) {
    const double dx = pts[j].x - pts[i].x;
    const double dy = pts[j].y - pts[i].y;
    const double len = std::hypot(dx, dy);
    return Point2{-dy / len, dx / len};
  };
  for (std::size_t i = 0; i < n; ++i) {
    const bool has_prev = closed || i > 0;
    const bool has_next = closed || i + 1 < n;
    Point2 n_prev{0, 0};
    Point2 n_next{0, 0};
    if (has_prev) {
      n_prev = normal((i + n - 1) % n, i);
    }
    if (has_next) {
      n_next = normal(i, (i + 1) % n);
    }
    if (!has_prev) {
      n_prev = n_next;
    }
    if (!has_next) {
      n_next = n_prev;
    }
    Point2 m{n_prev.x + n_next.x, n_prev.y + n_next.y};
    const double mlen = std::hypot(m.x, m.y);
    m = {m.x / mlen, m.y / mlen};
    const double cos_half = m.x * n_next.x + m.y * n_next.y;
    const double scale = d / std::max(cos_half, 0.2);
    out.push_back({pts[i].x + m.x * scale, pts[i].y + m.y * scale});
  }
  return out;
}

double path_length(std::span<const Point2> path)
{
  double len = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    len += std::hypot(path[i].x - path[i - 1].x, path[i].y - path[i - 1].y);
  }
  return len;
}

double arc_position(const WalkerSpec & w, double tau)
{
  const double step_freq = 2.0 * w.body.gait_frequency;
  return w.body.speed * tau + 0.02 * std::sin(2.0 * kPi * step_freq * tau);
}

bool locate(const WalkerSpec & w, double t, Point2 & pos, double & heading)
{
  const double tau = t - w.start_time;
  if (tau < 0.0 || w.path.size() < 2) {
    return false;
  }
  double s = arc_position(w, tau);
  for (std::size_t i = 1; i < w.path.size(); ++i) {
    const Point2 a = w.path[i - 1];
    const Point2 b = w.path[i];
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    if (len <= 0.0) {
      continue;
    }
    if (s <= len) {
      const double f = s / len;
      pos = {a.x + f * (b.x - a.x), a.y + f * (b.y - a.y)};
      heading = std::atan2(b.y - a.y, b.x - a.x);
      return true;
    }
    s -= len;
  }
  return false;
}

struct SurfacePoint
{
  Point3 p;
  Point3 n;
};

// Body-frame surface sample: x forward, y left, z up.
SurfacePoint sample_body_surface(const BodyModel & body, double tau, std::mt19937_64 & rng)
{
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double hip_z = 0.5 * body.height;
  const double shoulder_z = body.height - 2.0 * body.head_radius - 0.04;
  const double cap = 0.06;
  const double torso_top = shoulder_z - cap;
  const double half_width = 0.5 * body.shoulder_width;
  const double depth = body.torso_radius;
  const double bob = 0.015 * std::cos(2.0 * kPi * 2.0 * body.gait_frequency * tau);
  const double leg_r = 0.065;
  const double leg_len = hip_z;

  const double mean_r = 0.5 * (half_width + depth);
  const double torso_area = 2.0 * kPi * mean_r * (torso_top - hip_z);
  const double cap_area = 2.0 * kPi * mean_r * mean_r * 0.6;
  const double head_area = 4.0 * kPi * body.head_radius * body.head_radius;
  const double leg_area = 2.0 * kPi * leg_r * leg_len;
  const double total = torso_area + cap_area + head_area + 2.0 * leg_area;

  const double pick = u01(rng) * total;
  const double phi = 2.0 * kPi * u01(rng);
  SurfacePoint sp;
  if (pick < torso_area) {
    const double z = hip_z + u01(rng) * (torso_top - hip_z);
    sp.p = {depth * std::cos(phi), half_width * std::sin(phi), z + bob};
    sp.n = {std::cos(phi) / depth, std::sin(phi) / half_width, 0.0};
  } else if (pick < torso_area + cap_area) {
    const double theta = 0.5 * kPi * u01(rng);
    sp.p = {
      depth * std::cos(phi) * std::cos(theta), half_width * std::sin(phi) * std::cos(theta),
      torso_top + cap * std::sin(theta) + bob};
    sp.n = {
      std::cos(phi) * std::cos(theta) / depth, std::sin(phi) * std::cos(theta) / half_width,
      std::sin(theta) / cap};
  } else if (pick < torso_area + cap_area + head_area) {
    const double cz = 2.0 * u01(rng) - 1.0;
    const double sz = std::sqrt(std::max(0.0, 1.0 - cz * cz));
    const Point3 dir{sz * std::cos(phi), sz * std::sin(phi), cz};
    const double r = body.head_radius;
    sp.p = {dir.x * r, dir.y * r, body.height - r + dir.z * r + bob};
    sp.n = dir;
  } else {
    const bool left = pick < torso_area + cap_area + head_area + leg_area;
    const double side = left ? 1.0 : -1.0;
    const double swing = side * body.gait_amplitude * std::sin(2.0 * kPi * body.gait_frequency * tau);
    const double along = u01(rng);
    // Leg axis from hip to foot, tilted forward by the swing angle.
    const Point3 axis{std::sin(swing), 0.0, -std::cos(swing)};
    const Point3 hip{0.0, side * 0.5 * half_width, hip_z + bob};
    const double taper = 1.0 - 0.35 * along;
    const double r = leg_r * taper;
    // Cross-section basis: lateral y and the in-plane perpendicular of the axis.
    const Point3 e1{0.0, 1.0, 0.0};
    const Point3 e2{std::cos(swing), 0.0, std::sin(swing)};
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    const Point3 radial{e1.x * c + e2.x * s, e1.y * c + e2.y * s, e1.z * c + e2.z * s};
    const double l = along * leg_len;
    sp.p = {hip.x + axis.x * l + radial.x * r, hip.y + axis.y * l + radial.y * r, hip.z + axis.z * l + radial.z * r};
    sp.p.z = std::max(sp.p.z, 0.0);
    sp.n = radial;
  }
  return sp;
}

struct SensorFrame
{
  double cos_yaw;
  double sin_yaw;
  double half_h;
  double half_v;
};

SensorFrame sensor_frame(const SensorSpec & s)
{
  return {
    std::cos(deg2rad(s.yaw_deg)), std::sin(deg2rad(s.yaw_deg)), 0.5 * deg2rad(s.fov_h_deg),
    0.5 * deg2rad(s.fov_v_deg)};
}

bool observable(const MapSpec & map, const SensorSpec & s, const SensorFrame & f, const Point3 & p)
{
  const double dx = p.x - s.position.x;
  const double dy = p.y - s.position.y;
  const double dz = p.z - s.position.z;
  const double horiz = std::hypot(dx, dy);
  const double range = std::sqrt(horiz * horiz + dz * dz);
  if (range > s.max_range || range <= 0.0) {
    return false;
  }
  const double az = wrap_angle(std::atan2(dy, dx) - deg2rad(s.yaw_deg));
  if (std::abs(az) > f.half_h) {
    return false;
  }
  if (std::abs(std::atan2(dz, horiz)) > f.half_v) {
    return false;
  }
  if (!s.area.contains(p.x, p.y)) {
    return false;
  }
  return !in_blank(map, p.x, p.y);
}

double voxel_centre(double v)
{
  return (std::floor(v / kVoxel) + 0.5) * kVoxel;
}

std::vector<Point3> static_points(const MapSpec & map, const SensorSpec & s)
{
  std::vector<Point3> pts;
  const SensorFrame f = sensor_frame(s);
  const double step = std::max(map.static_spacing, kVoxel);
  const Rect & a = s.area;
  for (double x = a.min.x + 0.5 * step; x < a.max.x; x += step) {
    for (double y = a.min.y + 0.5 * step; y < a.max.y; y += step) {
      const Point3 p{voxel_centre(x), voxel_centre(y), -0.5 * kVoxel};
      if (observable(map, s, f, p)) {
        pts.push_back(p);
      }
    }
  }
  for (const auto & pillar : map.pillars) {
    for (double z = 0.5 * kVoxel; z < 2.0; z += kVoxel) {
      for (double x = pillar.min.x; x <= pillar.max.x + 1e-9; x += kVoxel) {
        for (double y : {pillar.min.y, pillar.max.y}) {
          const Point3 p{voxel_centre(x), voxel_centre(y), voxel_centre(z)};
          if (observable(map, s, f, p)) {
            pts.push_back(p);
          }
        }
      }
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

void body_points(
  const MapSpec & map, const SensorSpec & s, const SensorFrame & f, const DensityParams & density,
  const WalkerSpec & w, Point2 pos, double heading, double t, std::mt19937_64 & rng,
  std::vector<Point3> & out)
{
  const double d = std::hypot(pos.x - s.position.x, pos.y - s.position.y);
  const double budget = density.budget / std::max(d * d, 1e-6);
  const auto n = static_cast<std::size_t>(std::clamp(budget, density.min_points, density.max_points));
  const double ch = std::cos(heading);
  const double sh = std::sin(heading);
  const double tau = t - w.start_time;
  std::normal_distribution<double> noise(0.0, density.range_sigma);
  for (std::size_t k = 0; k < n; ++k) {
    const SurfacePoint sp = sample_body_surface(w.body, tau, rng);
    const double range_noise = noise(rng);
    const Point3 p{pos.x + ch * sp.p.x - sh * sp.p.y, pos.y + sh * sp.p.x + ch * sp.p.y, sp.p.z};
    const Point3 nrm{ch * sp.n.x - sh * sp.n.y, sh * sp.n.x + ch * sp.n.y, sp.n.z};
    const Point3 ray{p.x - s.position.x, p.y - s.position.y, p.z - s.position.z};
    if (nrm.x * ray.x + nrm.y * ray.y + nrm.z * ray.z >= 0.0) {
      continue;  // back-facing
    }
    const double r = std::sqrt(ray.x * ray.x + ray.y * ray.y + ray.z * ray.z);
    const double g = (r + range_noise) / r;
    const Point3 q{s.position.x + ray.x * g, s.position.y + ray.y * g, s.position.z + ray.z * g};
    if (observable(map, s, f, q)) {
      out.push_back(q);
    }
  }
}

double walker_end_time(const WalkerSpec & w)
{
  return w.start_time + (path_length(w.path) + 0.05) / w.body.speed;
}

void validate(const MapSpec & map, const ScenarioSpec & scenario, std::span<const WalkerSpec> walkers)
{
  if (!(scenario.tick > 0.0)) {
    throw std::invalid_argument("tick must be positive");
  }
  if (scenario.interval < 0.0) {
    throw std::invalid_argument("start interval must be non-negative");
  }
  for (const auto & w : walkers) {
    if (!(w.body.speed > 0.0)) {
      throw DataError("walker speed must be positive");
    }
    if (map.floor.empty()) {
      continue;
    }
    for (std::size_t i = 0; i < w.path.size(); ++i) {
      if (!point_in_convex(map.floor, w.path[i])) {
        throw DataError("scenario route leaves the floor polygon");
      }
    }
  }
}

}  // namespace

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b)
{
  return splitmix64(splitmix64(splitmix64(seed) ^ a) ^ (b * 0xD6E8FEB86659FD93ULL));
}

DensityParams density_params(DensityProfile profile)
{
  if (profile == DensityProfile::Sparse) {
    return DensityParams{800.0, 20.0, 80.0, 0.001};
  }
  return DensityParams{24000.0, 300.0, 1500.0, 0.02};
}

BodyModel sample_body(std::uint64_t population_seed, PersonId id)
{
  std::mt19937_64 rng(substream_seed(population_seed, 0xB0D1ULL, static_cast<std::uint64_t>(id)));
  auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  BodyModel b;
  b.id = id;
  b.height = uniform(1.5, 1.9);
  b.shoulder_width = uniform(0.36, 0.5);
  b.torso_radius = uniform(0.10, 0.16);
  b.head_radius = uniform(0.09, 0.12);
  b.gait_frequency = uniform(1.6, 2.1);
  b.gait_amplitude = uniform(0.25, 0.45);
  b.speed = uniform(1.0, 1.5);
  return b;
}

std::vector<WalkerSpec> plan_walkers(const ScenarioSpec & scenario)
{
  if (!scenario.walkers.empty()) {
    return scenario.walkers;
  }
  if (scenario.subjects == 0) {
    return {};
  }
  if (scenario.route.size() < 2) {
    throw std::invalid_argument("scenario route needs at least two waypoints");
  }
  if (scenario.laps < 1) {
    throw std::invalid_argument("laps must be at least 1");
  }
  std::vector<WalkerSpec> walkers;
  for (std::size_t i = 0; i < scenario.subjects; ++i) {
    std::mt19937_64 rng(substream_seed(scenario.seed, 0xA11ULL, i));
    const double offset =
      scenario.lateral_spread > 0.0
        ? std::uniform_real_distribution<double>(-scenario.lateral_spread, scenario.lateral_spread)(rng)
        : 0.0;
    const auto base = offset_polyline(scenario.route, offset, scenario.closed_route);
    WalkerSpec w;
    w.body = sample_body(scenario.population_seed, scenario.first_person + static_cast<PersonId>(i));
    if (scenario.closed_route) {
      for (int lap = 0; lap < scenario.laps; ++lap) {
        w.path.insert(w.path.end(), base.begin(), base.end());
      }
      w.path.push_back(base.front());
    } else {
      w.path = base;
    }
    w.start_time = static_cast<double>(i) * scenario.interval;
    walkers.push_back(std::move(w));
  }
  return walkers;
}

bool walker_position(const WalkerSpec & walker, double t, Point2 & out)
{
  double heading = 0.0;
  return locate(walker, t, out, heading);
}

std::vector<Frame> calibration_frames(const MapSpec & map, const ScenarioSpec & scenario)
{
  std::vector<Frame> frames;
  std::vector<std::vector<Point3>> statics;
  for (const auto & s : map.sensors) {
    statics.push_back(static_points(map, s));
  }
  for (int k = scenario.calibration_frames; k >= 1; --k) {
    for (std::size_t si = 0; si < map.sensors.size(); ++si) {
      frames.push_back({map.sensors[si].id, -static_cast<double>(k) * scenario.tick, statics[si]});
    }
  }
  return frames;
}

void simulate(const MapSpec & map, const ScenarioSpec & scenario, const FrameSink & on_frame, const TruthSink & on_truth)
{
  const std::vector<WalkerSpec> walkers = plan_walkers(scenario);
  validate(map, scenario, walkers);

  std::vector<std::vector<Point3>> statics;
  std::vector<SensorFrame> frames;
  std::vector<DensityParams> densities;
  for (const auto & s : map.sensors) {
    statics.push_back(static_points(map, s));
    frames.push_back(sensor_frame(s));
    densities.push_back(density_params(s.profile));
  }

  double end_time = scenario.duration;
  if (!(end_time > 0.0)) {
    end_time = 0.0;
    for (const auto & w : walkers) {
      end_time = std::max(end_time, walker_end_time(w));
    }
  }
  const auto ticks = static_cast<std::uint64_t>(std::floor(end_time / scenario.tick + 1e-9)) + 1;

  std::vector<Point2> positions(walkers.size());
  std::vector<double> headings(walkers.size());
  std::vector<char> active(walkers.size());
  for (std::uint64_t k = 0; k < ticks; ++k) {
    const double t = static_cast<double>(k) * scenario.tick;
    TruthTick truth{t, {}};
    for (std::size_t i = 0; i < walkers.size(); ++i) {
      active[i] = locate(walkers[i], t, positions[i], headings[i]) ? 1 : 0;
      if (active[i]) {
        truth.persons.push_back({walkers[i].body.id, positions[i]});
      }
    }
    for (std::size_t si = 0; si < map.sensors.size(); ++si) {
      const SensorSpec & s = map.sensors[si];
      std::mt19937_64 rng(substream_seed(scenario.seed, static_cast<std::uint64_t>(s.id) + 1, k));
      Frame frame{s.id, t, statics[si]};
      for (std::size_t i = 0; i < walkers.size(); ++i) {
        if (!active[i]) {
          continue;
        }
        // Cheap reject: bodies far outside the area contribute no points.
        const Rect & a = s.area;
        if (positions[i].x < a.min.x - 1.0 || positions[i].x > a.max.x + 1.0 ||
            positions[i].y < a.min.y - 1.0 || positions[i].y > a.max.y + 1.0)
        {
          continue;
        }
        body_points(map, s, frames[si], densities[si], walkers[i], positions[i], headings[i], t, rng, frame.points);
      }
      if (on_frame) {
        on_frame(frame);
      }
    }
    if (on_truth) {
      on_truth(truth);
    }
  }
}

SimulationOutput simulate(const MapSpec & map, const ScenarioSpec & scenario)
{
  SimulationOutput out;
  out.calibration = calibration_frames(map, scenario);
  simulate(
    map, scenario, [&](const Frame & f) { out.frames.push_back(f); },
    [&](const TruthTick & t) { out.truth.push_back(t); });
  return out;
}

MapSpec exp1_map()
{
  MapSpec map;
  map.floor = {{-2.0, -2.0}, {9.0, -2.0}, {9.0, 6.0}, {-2.0, 6.0}};
  SensorSpec s0;
  s0.id = 0;
  s0.position = {-6.0, 2.0, 2.5};
  s0.yaw_deg = 0.0;
  s0.area = {{-1.5, -1.0}, {2.0, 5.0}};
  SensorSpec s1 = s0;
  s1.id = 1;
  s1.position = {14.5, 2.0, 2.5};
  s1.yaw_deg = 180.0;
  s1.area = {{5.0, -1.0}, {8.5, 5.0}};
  map.sensors = {s0, s1};
  map.blanks = {{{2.0, -2.0}, {5.0, 6.0}}};
  map.gates = {
    {0, 0, {2.0, -1.0}, {2.0, 2.0}},
    {1, 0, {2.0, 2.0}, {2.0, 5.0}},
    {2, 1, {5.0, -1.0}, {5.0, 2.0}},
    {3, 1, {5.0, 2.0}, {5.0, 5.0}},
  };
  map.pillars = {{{-1.3, 4.5}, {-1.0, 4.8}}, {{8.0, -0.8}, {8.3, -0.5}}};
  map.static_spacing = 0.2;
  return map;
}

std::vector<Point2> exp1_route()
{
  return {{0.0, 0.0}, {7.0, 0.0}, {7.0, 4.0}, {0.0, 4.0}};
}

ScenarioSpec scenario_1a(std::size_t n_subjects, double interval, std::uint64_t seed)
{
  static constexpr std::size_t kSupported[] = {2, 4, 8, 16, 32};
  if (std::find(std::begin(kSupported), std::end(kSupported), n_subjects) == std::end(kSupported)) {
    throw std::invalid_argument("scenario 1a supports 2, 4, 8, 16 or 32 subjects");
  }
  ScenarioSpec spec;
  spec.subjects = n_subjects;
  spec.route = exp1_route();
  spec.closed_route = true;
  spec.laps = 3;
  spec.interval = interval;
  spec.density = DensityProfile::Dense;
  spec.seed = seed;
  return spec;
}

MapSpec corridor_map()
{
  MapSpec map;
  map.floor = {{-0.5, -0.5}, {40.5, -0.5}, {40.5, 3.5}, {-0.5, 3.5}};
  const double starts[] = {0.0, 11.0, 22.0, 33.0};
  const double ends[] = {8.0, 19.0, 30.0, 40.0};
  for (int i = 0; i < 4; ++i) {
    SensorSpec s;
    s.id = i;
    s.position = {starts[i] - 3.0, 1.5, 1.2};
    s.yaw_deg = 0.0;
    s.fov_h_deg = 210.0;
    s.fov_v_deg = 40.0;
    s.max_range = 35.0;
    s.profile = DensityProfile::Sparse;
    s.area = {{starts[i], 0.0}, {ends[i], 3.0}};
    map.sensors.push_back(s);
  }
  map.blanks = {{{8.0, -1.0}, {11.0, 4.0}}, {{19.0, -1.0}, {22.0, 4.0}}, {{30.0, -1.0}, {33.0, 4.0}}};
  map.gates = {
    {0, 0, {8.0, 0.0}, {8.0, 3.0}},
    {1, 1, {11.0, 0.0}, {11.0, 3.0}},
    {2, 1, {19.0, 0.0}, {19.0, 3.0}},
    {3, 2, {22.0, 0.0}, {22.0, 3.0}},
    {4, 2, {30.0, 0.0}, {30.0, 3.0}},
    {5, 3, {33.0, 0.0}, {33.0, 3.0}},
  };
  map.static_spacing = 0.5;
  return map;
}

ScenarioSpec corridor_slot(int day, std::size_t slot, const CorridorTraffic & traffic, std::uint64_t seed)
{
  if (slot >= traffic.rates_per_minute.size()) {
    throw std::invalid_argument("corridor slot out of range");
  }
  ScenarioSpec spec;
  spec.density = DensityProfile::Sparse;
  spec.seed = substream_seed(seed, static_cast<std::uint64_t>(day) + 1, slot + 1);
  spec.population_seed = traffic.population_seed;
  spec.closed_route = false;
  spec.laps = 1;
  spec.calibration_frames = 10;

  std::mt19937_64 rng(substream_seed(seed, 0xC0DEULL + static_cast<std::uint64_t>(day), slot));
  const double rate = traffic.rates_per_minute[slot] / 60.0;
  std::exponential_distribution<double> gap(rate);
  std::uniform_real_distribution<double> lane(0.7, 2.3);
  std::bernoulli_distribution leftward(0.5);
  double t = gap(rng);
  PersonId k = 0;
  while (t < traffic.slot_seconds) {
    WalkerSpec w;
    const PersonId id = day * 100000 + static_cast<PersonId>(slot) * 1000 + k++;
    w.body = sample_body(traffic.population_seed, id);
    const double y = lane(rng);
    if (leftward(rng)) {
      w.path = {{39.8, y}, {0.2, y}};
    } else {
      w.path = {{0.2, y}, {39.8, y}};
    }
    w.start_time = t;
    spec.walkers.push_back(std::move(w));
    t += gap(rng);
  }
  spec.subjects = spec.walkers.size();
  return spec;
}

}  // namespace trajlink
