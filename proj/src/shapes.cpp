#include "pclab/shapes.hpp"

#include <cmath>

#include "pclab/common.hpp"
#include "pclab/geometry.hpp"

namespace pclab {

namespace {

constexpr double kTau = 2.0 * M_PI;

Eigen::Vector3f sphere_point(Rng& rng, float radius) {
  for (;;) {
    Eigen::Vector3f d(rng.normal(), rng.normal(), rng.normal());
    const float len = d.norm();
    if (len > 1e-6f) return d * (radius / len);
  }
}

Eigen::Vector3f cube_point(Rng& rng) {
  const int face = static_cast<int>(rng.bounded(6));
  const float u = rng.uniform(-1.0f, 1.0f);
  const float v = rng.uniform(-1.0f, 1.0f);
  const float s = (face % 2 == 0) ? 1.0f : -1.0f;
  switch (face / 2) {
    case 0: return {s, u, v};
    case 1: return {u, s, v};
    default: return {u, v, s};
  }
}

Eigen::Vector3f cylinder_point(Rng& rng) {
  const float radius = 0.6f, half_h = 1.0f;
  const double lateral = kTau * radius * 2.0 * half_h;
  const double caps = 2.0 * M_PI * radius * radius;
  if (rng.next_double() * (lateral + caps) < lateral) {
    const float a = rng.uniform(0.0f, static_cast<float>(kTau));
    return {radius * std::cos(a), radius * std::sin(a),
            rng.uniform(-half_h, half_h)};
  }
  const float z = rng.next_double() < 0.5 ? half_h : -half_h;
  const float r = radius * std::sqrt(rng.uniform(0.0f, 1.0f));
  const float a = rng.uniform(0.0f, static_cast<float>(kTau));
  return {r * std::cos(a), r * std::sin(a), z};
}

Eigen::Vector3f cone_point(Rng& rng) {
  const float radius = 0.8f, z_base = -0.6f, z_apex = 1.2f;
  const float height = z_apex - z_base;
  const double slant = std::sqrt(static_cast<double>(radius) * radius +
                                 static_cast<double>(height) * height);
  const double lateral = M_PI * radius * slant;
  const double base = M_PI * radius * radius;
  const float a = rng.uniform(0.0f, static_cast<float>(kTau));
  if (rng.next_double() * (lateral + base) < lateral) {
    // Fraction of the way from apex to rim; area density grows linearly.
    const float s = std::sqrt(rng.uniform(0.0f, 1.0f));
    return {s * radius * std::cos(a), s * radius * std::sin(a),
            z_apex - s * height};
  }
  const float r = radius * std::sqrt(rng.uniform(0.0f, 1.0f));
  return {r * std::cos(a), r * std::sin(a), z_base};
}

Eigen::Vector3f torus_point(Rng& rng) {
  const float ring = 0.75f, tube = 0.3f;
  float phi;
  for (;;) {
    phi = rng.uniform(0.0f, static_cast<float>(kTau));
    const double accept = (ring + tube * std::cos(phi)) / (ring + tube);
    if (rng.next_double() < accept) break;
  }
  const float theta = rng.uniform(0.0f, static_cast<float>(kTau));
  const float w = ring + tube * std::cos(phi);
  return {w * std::cos(theta), w * std::sin(theta), tube * std::sin(phi)};
}

Eigen::Vector3f triangle_point(Rng& rng, const Eigen::Vector3f& a,
                               const Eigen::Vector3f& b,
                               const Eigen::Vector3f& c) {
  float u = rng.uniform(0.0f, 1.0f);
  float v = rng.uniform(0.0f, 1.0f);
  if (u + v > 1.0f) {
    u = 1.0f - u;
    v = 1.0f - v;
  }
  return a + u * (b - a) + v * (c - a);
}

Eigen::Vector3f pyramid_point(Rng& rng) {
  const float half = 0.8f, z_base = -0.6f, z_apex = 1.2f;
  const Eigen::Vector3f apex(0.0f, 0.0f, z_apex);
  const Eigen::Vector3f corners[4] = {{half, half, z_base},
                                      {-half, half, z_base},
                                      {-half, -half, z_base},
                                      {half, -half, z_base}};
  const double side_area =
      0.5 * 2.0 * half *
      std::sqrt(static_cast<double>(half) * half +
                static_cast<double>(z_apex - z_base) * (z_apex - z_base));
  const double base_area = 4.0 * half * half;
  const double total = 4.0 * side_area + base_area;
  const double pickv = rng.next_double() * total;
  if (pickv < base_area) {
    return {rng.uniform(-half, half), rng.uniform(-half, half), z_base};
  }
  const int face = static_cast<int>(rng.bounded(4));
  return triangle_point(rng, corners[face], corners[(face + 1) % 4], apex);
}

Eigen::Vector3f ellipsoid_point(Rng& rng) {
  const Eigen::Vector3f axes(1.0f, 0.65f, 0.4f);
  return sphere_point(rng, 1.0f).cwiseProduct(axes);
}

Eigen::Vector3f helix_point(Rng& rng) {
  const float ring = 0.7f, tube = 0.12f, turns = 2.5f;
  const float t = rng.uniform(0.0f, 1.0f);
  const float a = static_cast<float>(kTau) * turns * t;
  const Eigen::Vector3f center(ring * std::cos(a), ring * std::sin(a),
                               -1.0f + 2.0f * t);
  Eigen::Vector3f tangent(-ring * std::sin(a) * static_cast<float>(kTau) * turns,
                          ring * std::cos(a) * static_cast<float>(kTau) * turns,
                          2.0f);
  tangent.normalize();
  Eigen::Vector3f n = tangent.cross(Eigen::Vector3f::UnitZ()).normalized();
  Eigen::Vector3f b = tangent.cross(n);
  const float psi = rng.uniform(0.0f, static_cast<float>(kTau));
  return center + tube * (std::cos(psi) * n + std::sin(psi) * b);
}

}  // namespace

const std::vector<std::string>& shape_class_names() {
  static const std::vector<std::string> names = {
      "sphere", "cube",    "cylinder",  "cone",
      "torus",  "pyramid", "ellipsoid", "helix"};
  return names;
}

ShapeClass shape_class_from_name(const std::string& name) {
  const auto& names = shape_class_names();
  for (size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<ShapeClass>(i);
  throw DataError("unknown shape class '" + name + "'");
}

namespace detail {

MatX3f sample_surface(ShapeClass cls, int n, Rng& rng) {
  MatX3f pts(n, 3);
  for (int i = 0; i < n; ++i) {
    Eigen::Vector3f p;
    switch (cls) {
      case ShapeClass::sphere: p = sphere_point(rng, 1.0f); break;
      case ShapeClass::cube: p = cube_point(rng); break;
      case ShapeClass::cylinder: p = cylinder_point(rng); break;
      case ShapeClass::cone: p = cone_point(rng); break;
      case ShapeClass::torus: p = torus_point(rng); break;
      case ShapeClass::pyramid: p = pyramid_point(rng); break;
      case ShapeClass::ellipsoid: p = ellipsoid_point(rng); break;
      case ShapeClass::helix: p = helix_point(rng); break;
      default: throw DataError("unknown shape class");
    }
    pts.row(i) = p;
  }
  return pts;
}

}  // namespace detail

PointCloud generate_shape(ShapeClass cls, int n_points, std::uint64_t seed) {
  if (n_points < kMinCloudPoints)
    throw std::invalid_argument("generate_shape: n_points >= 16");
  Rng rng(derive_seed(seed, 0x9e01u, static_cast<int>(cls), n_points));

  MatX3f pts = detail::sample_surface(cls, n_points, rng);

  const float angle = rng.uniform(0.0f, static_cast<float>(kTau));
  const float ca = std::cos(angle), sa = std::sin(angle);
  Eigen::Matrix3f rot;
  rot << ca, -sa, 0.0f, sa, ca, 0.0f, 0.0f, 0.0f, 1.0f;
  const Eigen::Vector3f scl(rng.uniform(0.8f, 1.2f), rng.uniform(0.8f, 1.2f),
                            rng.uniform(0.8f, 1.2f));
  for (long i = 0; i < pts.rows(); ++i) {
    Eigen::Vector3f p = rot * pts.row(i).transpose();
    p = p.cwiseProduct(scl);
    for (int d = 0; d < 3; ++d) p[d] += 0.005f * rng.normal();
    pts.row(i) = p;
  }

  // Center and fit into the unit sphere.
  const Eigen::RowVector3f centroid = pts.colwise().mean();
  pts.rowwise() -= centroid;
  const float max_norm = pts.rowwise().norm().maxCoeff();
  if (max_norm > 0.0f) pts /= max_norm;

  PointCloud cloud;
  cloud.points = pts;
  cloud.normals = estimate_normals(pts);
  return cloud;
}

Dataset generate_dataset(const DatasetSpec& spec) {
  Dataset ds;
  ds.classes = shape_class_names();
  auto fill = [&](std::vector<LabeledCloud>& split, int per_class, int split_id) {
    for (int i = 0; i < per_class; ++i) {
      for (int c = 0; c < kNumShapeClasses; ++c) {
        LabeledCloud s;
        s.label = c;
        s.class_name = ds.classes[static_cast<size_t>(c)];
        s.cloud = generate_shape(static_cast<ShapeClass>(c),
                                 spec.points_per_cloud,
                                 derive_seed(spec.seed, split_id, c, i));
        split.push_back(std::move(s));
      }
    }
  };
  fill(ds.train, spec.per_class_train, 1);
  fill(ds.test, spec.per_class_test, 2);
  return ds;
}

}  // namespace pclab
