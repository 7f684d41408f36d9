#pragma once

// Physical constants. SI 2019 / CODATA 2018 values; c and h are exact by
// definition of the SI units, hbar is derived from h.
namespace dsfpair::constants {

inline constexpr double speed_of_light = 299792458.0;          // m/s, exact
inline constexpr double planck = 6.62607015e-34;               // J*s, exact
inline constexpr double pi = 3.14159265358979323846;
inline constexpr double hbar = planck / (2.0 * pi);            // J*s
inline constexpr double two_pi_c = 2.0 * pi * speed_of_light;  // m/s * rad

}  // namespace dsfpair::constants
