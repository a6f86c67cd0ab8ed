#pragma once

namespace cmutsim {

// CODATA 2018 vacuum permittivity, F/m
inline constexpr double kVacuumPermittivity = 8.8541878128e-12;

inline constexpr double kPi = 3.14159265358979323846;

inline constexpr double kMicron = 1e-6;

inline constexpr const char* kVersion = "cmut-cell-sim 0.1.0";

}  // namespace cmutsim
