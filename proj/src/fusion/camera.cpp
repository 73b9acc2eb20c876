#include "dynslam/fusion/camera.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace dynslam {

void CameraModel::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) throw std::invalid_argument("camera: fx, fy must be > 0");
  if (width <= 0 || height <= 0) throw std::invalid_argument("camera: resolution must be > 0");
  if (!(cx >= 0.0 && cx < width && cy >= 0.0 && cy < height)) {
    throw std::invalid_argument("camera: principal point outside the image");
  }
  if (!is_finite(extrinsic)) throw std::invalid_argument("camera: non-finite extrinsic");
}

simd::ProjectionParams CameraModel::projection_params() const {
  simd::ProjectionParams p{};
  const Mat3 r = extrinsic.rotation_matrix();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) p.rotation[3 * i + j] = r(i, j);
    p.translation[i] = extrinsic.translation()[i];
  }
  p.fx = fx;
  p.fy = fy;
  p.cx = cx;
  p.cy = cy;
  p.width = width;
  p.height = height;
  return p;
}

Pose forward_looking_extrinsic(const Vec3& camera_in_sensor) {
  Mat3 r;
  r << 0, -1, 0,
       0, 0, -1,
       1, 0, 0;
  return Pose(Eigen::Quaterniond(r), -(r * camera_in_sensor));
}

int Projection::px() const { return static_cast<int>(std::floor(u)); }
int Projection::py() const { return static_cast<int>(std::floor(v)); }

std::optional<Projection> project_point(const CameraModel& camera, const Vec3& p) {
  // Same evaluation order as the projection kernels.
  const simd::ProjectionParams k = camera.projection_params();
  const double* r = k.rotation;
  const double qx = ((r[0] * p.x() + r[1] * p.y()) + r[2] * p.z()) + k.translation[0];
  const double qy = ((r[3] * p.x() + r[4] * p.y()) + r[5] * p.z()) + k.translation[1];
  const double qz = ((r[6] * p.x() + r[7] * p.y()) + r[8] * p.z()) + k.translation[2];
  if (!(qz > 0.0)) return std::nullopt;
  Projection out{(k.fx * qx) / qz + k.cx, (k.fy * qy) / qz + k.cy, qz};
  if (!(out.u >= 0.0 && out.u < camera.width && out.v >= 0.0 && out.v < camera.height)) {
    return std::nullopt;
  }
  return out;
}

std::vector<std::int32_t> project_cloud(const CameraModel& camera, const PointCloud& cloud) {
  const std::size_t n = cloud.size();
  std::vector<double> xs(n), ys(n), zs(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = cloud[i].position.x();
    ys[i] = cloud[i].position.y();
    zs[i] = cloud[i].position.z();
  }
  std::vector<std::int32_t> pixel(n);
  const simd::ProjectionParams params = camera.projection_params();
  simd::kernels().project_points(xs.data(), ys.data(), zs.data(), n, params, pixel.data());
  return pixel;
}

PointCloud label_points(const PointCloud& cloud, const DynamicMaskImage& mask,
                        const CameraModel& camera) {
  if (mask.width() != camera.width || mask.height() != camera.height) {
    throw std::invalid_argument("label_points: mask is " + std::to_string(mask.width()) + "x" +
                                std::to_string(mask.height()) + " but camera is " +
                                std::to_string(camera.width) + "x" +
                                std::to_string(camera.height));
  }
  const auto pixel = project_cloud(camera, cloud);
  const auto& px = mask.data();
  PointCloud out = cloud;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const bool dynamic = pixel[i] >= 0 && px[static_cast<std::size_t>(pixel[i])] != 0;
    out[i].label = dynamic ? Label::make_dynamic() : Label::make_static();
  }
  return out;
}

PointCloud colorize(const PointCloud& cloud, const ColorImage& image, const CameraModel& camera) {
  if (image.width != camera.width || image.height != camera.height) {
    throw std::invalid_argument("colorize: image size differs from camera resolution");
  }
  const auto pixel = project_cloud(camera, cloud);
  PointCloud out = cloud;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (pixel[i] >= 0) {
      out[i].color = image.pixels[static_cast<std::size_t>(pixel[i])];
    } else {
      out[i].color.reset();
    }
  }
  return out;
}

CameraModel load_calibration(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open calibration: " + path.string());
  CameraModel cam;
  try {
    const auto j = nlohmann::json::parse(in);
    cam.fx = j.at("fx").get<double>();
    cam.fy = j.at("fy").get<double>();
    cam.cx = j.at("cx").get<double>();
    cam.cy = j.at("cy").get<double>();
    cam.width = j.at("width").get<int>();
    cam.height = j.at("height").get<int>();
    const auto e = j.at("extrinsic").get<std::vector<double>>();
    if (e.size() != 16) throw std::runtime_error("extrinsic must have 16 entries");
    Eigen::Matrix4d m;
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) m(r, c) = e[4 * r + c];
    }
    const Mat3 rot = m.topLeftCorner<3, 3>();
    if ((rot * rot.transpose() - Mat3::Identity()).norm() > 1e-6 || rot.determinant() < 0.0) {
      throw std::runtime_error("extrinsic rotation is not orthonormal");
    }
    cam.extrinsic = Pose::from_matrix(m);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("malformed calibration " + path.string() + ": " + e.what());
  } catch (const std::runtime_error& e) {
    throw std::runtime_error("malformed calibration " + path.string() + ": " + e.what());
  }
  cam.validate();
  return cam;
}

void save_calibration(const std::filesystem::path& path, const CameraModel& camera) {
  const Eigen::Matrix4d m = camera.extrinsic.matrix();
  std::vector<double> e;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) e.push_back(m(r, c));
  }
  const nlohmann::json j = {{"fx", camera.fx},       {"fy", camera.fy},
                            {"cx", camera.cx},       {"cy", camera.cy},
                            {"width", camera.width}, {"height", camera.height},
                            {"extrinsic", e}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write calibration: " + path.string());
  out << j.dump(1) << '\n';
}

}  // namespace dynslam
