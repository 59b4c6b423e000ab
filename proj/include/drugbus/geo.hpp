#pragma once

#include <cmath>
#include <numbers>

namespace drugbus {

struct GeoPoint {
  double latitude = 0.0;   // degrees
  double longitude = 0.0;  // degrees

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

inline constexpr double kEarthRadiusKm = 6371.0;

inline bool in_bounds(const GeoPoint& p) {
  return std::isfinite(p.latitude) && std::isfinite(p.longitude) &&
         p.latitude >= -90.0 && p.latitude <= 90.0 &&
         p.longitude >= -180.0 && p.longitude <= 180.0;
}

/// Great-circle distance on a spherical Earth of radius 6371.0 km.
inline double haversine_km(const GeoPoint& a, const GeoPoint& b) {
  constexpr double kRad = std::numbers::pi / 180.0;
  const double lat1 = a.latitude * kRad;
  const double lat2 = b.latitude * kRad;
  const double half_dlat = (lat2 - lat1) / 2.0;
  const double half_dlon = (b.longitude - a.longitude) * kRad / 2.0;
  const double s = std::sin(half_dlat) * std::sin(half_dlat) +
                   std::cos(lat1) * std::cos(lat2) * std::sin(half_dlon) * std::sin(half_dlon);
  // Rounding can push s marginally past 1 for antipodal points.
  return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(std::fmin(1.0, s)));
}

}  // namespace drugbus
