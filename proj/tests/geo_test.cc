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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "crashkit/error.h"
#include "crashkit/random.h"
#include "test_support.h"

namespace crashkit::geo {
namespace {

// Independent forward projection written from the EPSG guidance-note form
// of the two-parallel Lambert conformal conic (method 9802), kept separate
// from the library code on purpose.
struct Reference {
  double a = 6378137.0;
  double f = 1.0 / 298.257222101;
  double lat1 = 45.0 + 50.0 / 60.0;
  double lat2 = 47.0 + 20.0 / 60.0;
  double lat_f = 45.0 + 20.0 / 60.0;
  double lon_f = -(120.0 + 30.0 / 60.0);
  double e_f = 500000.0;
  double n_f = 0.0;

  static double rad(double d) { return d * std::numbers::pi / 180.0; }
  double e() const { return std::sqrt(2 * f - f * f); }
  double m(double phi) const {
    const double s = std::sin(phi);
    return std::cos(phi) / std::sqrt(1 - e() * e() * s * s);
  }
  double t(double phi) const {
    const double s = std::sin(phi);
    return std::tan(std::numbers::pi / 4 - phi / 2) /
           std::pow((1 - e() * s) / (1 + e() * s), e() / 2);
  }
  double n() const {
    return (std::log(m(rad(lat1))) - std::log(m(rad(lat2)))) /
           (std::log(t(rad(lat1))) - std::log(t(rad(lat2))));
  }
  double big_f() const {
    return m(rad(lat1)) / (n() * std::pow(t(rad(lat1)), n()));
  }
  double r(double phi) const { return a * big_f() * std::pow(t(phi), n()); }

  Projected forward(double lat, double lon) const {
    const double theta = n() * rad(lon - lon_f);
    const double rr = r(rad(lat));
    return {e_f + rr * std::sin(theta),
            n_f + r(rad(lat_f)) - rr * std::cos(theta)};
  }
};

TEST(GeoTest, OriginMapsToFalseEastingNorthing) {
  const GeoPoint p = lcc_inverse(500000.0, 0.0);
  EXPECT_NEAR(p.lat, 45.0 + 20.0 / 60.0, 1e-9);
  EXPECT_NEAR(p.lon, -(120.0 + 30.0 / 60.0), 1e-9);
}

TEST(GeoTest, ForwardMatchesIndependentReference) {
  const Reference ref;
  CounterRng rng(kDefaultSeed, 3);
  for (int i = 0; i < 200; ++i) {
    const double lat = 45.3 + 1.8 * rng.uniform();
    const double lon = -124.5 + 8.0 * rng.uniform();
    const Projected mine = lcc_forward({lat, lon});
    const Projected theirs = ref.forward(lat, lon);
    ASSERT_NEAR(mine.easting, theirs.easting, 1e-6);
    ASSERT_NEAR(mine.northing, theirs.northing, 1e-6);
  }
}

TEST(GeoTest, InverseOfReferenceForward) {
  const Reference ref;
  const Projected p = ref.forward(46.5, -122.25);
  const GeoPoint g = lcc_inverse(p.easting, p.northing);
  EXPECT_NEAR(g.lat, 46.5, 1e-10);
  EXPECT_NEAR(g.lon, -122.25, 1e-10);
}

TEST(GeoTest, RoundTripProperty) {
  CounterRng rng(kDefaultSeed, 4);
  for (std::size_t i = 0; i < testing::kPropertyCases; ++i) {
    const double lat = 45.3 + 1.8 * rng.uniform();
    const double lon = -124.8 + 8.0 * rng.uniform();
    const Projected p = lcc_forward({lat, lon});
    const GeoPoint g = lcc_inverse(p.easting, p.northing);
    const Projected q = lcc_forward(g);
    ASSERT_LT(std::hypot(q.easting - p.easting, q.northing - p.northing), 1e-6);
  }
}

TEST(GeoTest, ScaleIsExactOnStandardParallels) {
  EXPECT_NEAR(lcc_scale_factor(45.0 + 50.0 / 60.0), 1.0, 1e-9);
  EXPECT_NEAR(lcc_scale_factor(47.0 + 20.0 / 60.0), 1.0, 1e-9);
  EXPECT_LT(lcc_scale_factor(46.5), 1.0);
}

TEST(GeoTest, NumericalScaleFactorMatches) {
  // Meridian arc length of a small step versus its projected length.
  const double a = 6378137.0, f = 1.0 / 298.257222101, e2 = 2 * f - f * f;
  for (double lat : {45.0 + 50.0 / 60.0, 47.0 + 20.0 / 60.0}) {
    const double h = 1e-5;
    const Projected p0 = lcc_forward({lat - h, -120.5});
    const Projected p1 = lcc_forward({lat + h, -120.5});
    const double phi = lat * std::numbers::pi / 180.0;
    const double rho =
        a * (1 - e2) / std::pow(1 - e2 * std::sin(phi) * std::sin(phi), 1.5);
    const double ground = rho * (2 * h) * std::numbers::pi / 180.0;
    EXPECT_NEAR(std::hypot(p1.easting - p0.easting, p1.northing - p0.northing) /
                    ground,
                1.0, 1e-9);
  }
}

TEST(GeoTest, DomainErrors) {
  try {
    lcc_forward({90.0, -120.0});
    FAIL() << "expected OutOfDomain";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOutOfDomain);
  }
  // Beyond the apex of the cone the polar angle leaves the developed sector.
  const Reference ref;
  const double apex_northing = ref.r(Reference::rad(ref.lat_f));
  EXPECT_THROW(lcc_inverse(500001.0, 2 * apex_northing), Error);
}

TEST(GeoTest, ParseDms) {
  EXPECT_DOUBLE_EQ(parse_dms("45 50"), 45.0 + 50.0 / 60.0);
  EXPECT_DOUBLE_EQ(parse_dms("120 30 36"), 120.0 + 30.0 / 60.0 + 36.0 / 3600.0);
  EXPECT_DOUBLE_EQ(parse_dms("45.5"), 45.5);
  EXPECT_THROW(parse_dms("north"), Error);
}

TEST(GeoTest, TileUrl) {
  const std::string url = tile_url({46.5, -122.25}, "k y");
  EXPECT_EQ(url,
            "https://maps.googleapis.com/maps/api/staticmap?center=46.500000,"
            "-122.250000&zoom=19&size=512x512&maptype=satellite&key=k%20y");
  try {
    tile_url({46.5, -122.25}, "k", TileRequest{512, 22, "satellite"});
    FAIL() << "expected InvalidZoom";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidZoom);
  }
  EXPECT_THROW(tile_url({46.5, -122.25}, "k", TileRequest{512, -1, "satellite"}),
               Error);
}

}  // namespace
}  // namespace crashkit::geo
