#pragma once

namespace edm::constants {

// 2019 SI exact values.
inline constexpr double hbar = 1.054571817e-34;               // J s
inline constexpr double planck_h = 6.62607015e-34;            // J s
inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double pi = 3.14159265358979323846;

// Angular frequency (rad/s) -> ordinary frequency in GHz.
inline constexpr double ghz_from_angular(double omega) {
  return omega / (2.0 * pi) * 1e-9;
}

// Energy in joule -> E/h in GHz.
inline constexpr double ghz_from_energy(double energy) {
  return energy / planck_h * 1e-9;
}

inline constexpr double femtofarad = 1e-15;
inline constexpr double nanohenry = 1e-9;

}  // namespace edm::constants
