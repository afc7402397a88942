/*
 * Copyright 2026 The Crashkit Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "crashkit/geo.h"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "crashkit/error.h"

namespace crashkit::geo {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDegToRad = kPi / 180.0;
constexpr int kMaxIterations = 25;
constexpr double kLatTolerance = 1e-12;

// Derived cone constants (Snyder, "Map Projections: A Working Manual").
struct Cone {
  double a;
  double e;
  double n;
  double af;  // a * F
  double rho0;
};

double m_of(double phi, double e) {
  const double s = std::sin(phi);
  return std::cos(phi) / std::sqrt(1.0 - e * e * s * s);
}

double t_of(double phi, double e) {
  const double s = std::sin(phi);
  return std::tan(kPi / 4.0 - phi / 2.0) /
         std::pow((1.0 - e * s) / (1.0 + e * s), e / 2.0);
}

Cone cone(const LccParams& p) {
  p.validate();
  Cone c{};
  c.a = p.semi_major_axis;
  const double f = 1.0 / p.inverse_flattening;
  c.e = std::sqrt(2.0 * f - f * f);
  const double phi1 = p.standard_parallel_1 * kDegToRad;
  const double phi2 = p.standard_parallel_2 * kDegToRad;
  const double phi0 = p.origin_latitude * kDegToRad;
  const double m1 = m_of(phi1, c.e);
  const double m2 = m_of(phi2, c.e);
  const double t1 = t_of(phi1, c.e);
  const double t2 = t_of(phi2, c.e);
  c.n = (phi1 == phi2) ? std::sin(phi1)
                       : (std::log(m1) - std::log(m2)) /
                             (std::log(t1) - std::log(t2));
  c.af = c.a * m1 / (c.n * std::pow(t1, c.n));
  c.rho0 = c.af * std::pow(t_of(phi0, c.e), c.n);
  return c;
}

}  // namespace

void LccParams::validate() const {
  auto bad = [](const char* what) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("invalid projection parameter: ") + what);
  };
  if (!(semi_major_axis > 0)) bad("semi-major axis must be positive");
  if (!(inverse_flattening > 1)) bad("inverse flattening must exceed 1");
  for (double lat : {standard_parallel_1, standard_parallel_2,
                     origin_latitude}) {
    if (!(lat > -90 && lat < 90)) bad("latitude outside (-90, 90)");
  }
  if (!(central_meridian > -180 && central_meridian <= 180)) {
    bad("central meridian outside (-180, 180]");
  }
  if (standard_parallel_1 == -standard_parallel_2) {
    bad("standard parallels symmetric about the equator");
  }
}

Projected lcc_forward(const GeoPoint& point, const LccParams& params) {
  const Cone c = cone(params);
  const double phi = point.lat * kDegToRad;
  if (!(std::abs(point.lat) < 90.0)) {
    throw Error(ErrorCode::kOutOfDomain,
                "latitude outside the projection domain");
  }
  const double rho = c.af * std::pow(t_of(phi, c.e), c.n);
  double dlon = point.lon - params.central_meridian;
  if (dlon > 180.0) dlon -= 360.0;
  if (dlon < -180.0) dlon += 360.0;
  const double theta = c.n * dlon * kDegToRad;
  return {params.false_easting + rho * std::sin(theta),
          params.false_northing + c.rho0 - rho * std::cos(theta)};
}

GeoPoint lcc_inverse(double easting, double northing,
                     const LccParams& params) {
  const Cone c = cone(params);
  const double x = easting - params.false_easting;
  const double y = c.rho0 - (northing - params.false_northing);
  const double sign = c.n < 0 ? -1.0 : 1.0;
  const double rho = sign * std::hypot(x, y);
  const double theta = std::atan2(sign * x, sign * y);
  // Projected points fill a wedge of half-angle |n| * pi about the central
  // meridian; anything outside it has a radius pointing the wrong way.
  if (rho == 0.0 || std::abs(theta) > std::abs(c.n) * kPi) {
    throw Error(ErrorCode::kOutOfDomain, "radius sign inconsistent with cone");
  }
  const double t = std::pow(rho / c.af, 1.0 / c.n);

  double phi = kPi / 2.0 - 2.0 * std::atan(t);
  bool converged = false;
  for (int i = 0; i < kMaxIterations; ++i) {
    const double s = std::sin(phi);
    const double next =
        kPi / 2.0 -
        2.0 * std::atan(t * std::pow((1.0 - c.e * s) / (1.0 + c.e * s),
                                     c.e / 2.0));
    const double delta = std::abs(next - phi);
    phi = next;
    if (delta < kLatTolerance) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw Error(ErrorCode::kNonConvergence,
                "latitude iteration did not converge");
  }
  // theta is exactly 0 on the central meridian, keeping lon == lambda0.
  const double lon = params.central_meridian + theta / c.n / kDegToRad;
  return {phi / kDegToRad, lon};
}

double lcc_scale_factor(double lat, const LccParams& params) {
  const Cone c = cone(params);
  const double phi = lat * kDegToRad;
  const double rho = c.af * std::pow(t_of(phi, c.e), c.n);
  return rho * c.n / (c.a * m_of(phi, c.e));
}

double parse_dms(std::string_view text) {
  std::istringstream in{std::string(text)};
  double parts[3] = {0, 0, 0};
  int n = 0;
  while (n < 3 && (in >> parts[n])) ++n;
  std::string rest;
  if (n == 0 || (in >> rest)) {
    throw Error(ErrorCode::kInvalidArgument,
                "bad angle '" + std::string(text) + "'");
  }
  const double sign = parts[0] < 0 || text.find('-') != std::string_view::npos
                          ? -1.0
                          : 1.0;
  return sign * (std::abs(parts[0]) + parts[1] / 60.0 + parts[2] / 3600.0);
}

std::string tile_url(const GeoPoint& point, std::string_view key,
                     const TileRequest& request) {
  if (request.zoom < 0 || request.zoom > 21) {
    throw Error(ErrorCode::kInvalidZoom,
                "zoom " + std::to_string(request.zoom) + " outside 0..21");
  }
  if (request.size_px <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "tile size must be positive");
  }
  if (!(std::abs(point.lat) <= 90.0 && std::abs(point.lon) <= 180.0)) {
    throw Error(ErrorCode::kOutOfDomain, "point outside lat/lon range");
  }
  char center[64];
  std::snprintf(center, sizeof(center), "%.6f,%.6f", point.lat, point.lon);
  std::string url = "https://maps.googleapis.com/maps/api/staticmap?center=";
  url += center;
  url += "&zoom=" + std::to_string(request.zoom);
  url += "&size=" + std::to_string(request.size_px) + "x" +
         std::to_string(request.size_px);
  url += "&maptype=" + request.maptype;
  url += "&key=";
  for (unsigned char ch : key) {
    if (std::isalnum(ch) || ch == '-' || ch == '_' || ch == '.' || ch == '~') {
      url += static_cast<char>(ch);
    } else {
      char buf[4];
      std::snprintf(buf, sizeof(buf), "%%%02X", ch);
      url += buf;
    }
  }
  return url;
}

}  // namespace crashkit::geo
