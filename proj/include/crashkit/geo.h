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

#ifndef CRASHKIT_GEO_H_
#define CRASHKIT_GEO_H_

#include <string>
#include <string_view>

namespace crashkit::geo {

// Ellipsoidal Lambert conformal conic (two standard parallels). Angles are
// decimal degrees, lengths meters.
struct LccParams {
  double semi_major_axis = 6378137.0;
  double inverse_flattening = 298.257222101;  // GRS 80
  double standard_parallel_1 = 45.0 + 50.0 / 60.0;
  double standard_parallel_2 = 47.0 + 20.0 / 60.0;
  double origin_latitude = 45.0 + 20.0 / 60.0;
  double central_meridian = -(120.0 + 30.0 / 60.0);
  double false_easting = 500000.0;
  double false_northing = 0.0;

  // Washington State Plane South (NAD83).
  static LccParams washington_south() { return {}; }
  void validate() const;  // throws kInvalidArgument
};

struct GeoPoint {
  double lat = 0;
  double lon = 0;
};

struct Projected {
  double easting = 0;
  double northing = 0;
};

// Latitude iteration stops at |dphi| < 1e-12 rad; 25 iterations at most.
GeoPoint lcc_inverse(double easting, double northing,
                     const LccParams& params = {});
Projected lcc_forward(const GeoPoint& point, const LccParams& params = {});

// Point scale factor at `lat`; 1 on both standard parallels.
double lcc_scale_factor(double lat, const LccParams& params = {});

// "45 50" or "45 50 30" (degrees minutes [seconds]) or "45.8333".
double parse_dms(std::string_view text);

struct TileRequest {
  int size_px = 512;
  int zoom = 19;
  std::string maptype = "satellite";
};

// Static-map query URL; no network I/O. Throws kInvalidZoom for zoom outside
// 0..21 and kInvalidArgument for a non-positive size.
std::string tile_url(const GeoPoint& point, std::string_view key,
                     const TileRequest& request = {});

}  // namespace crashkit::geo

#endif  // CRASHKIT_GEO_H_
