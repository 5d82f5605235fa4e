#pragma once

namespace perfusim::units {

// Pressure conversion used everywhere a clinical unit appears.
inline constexpr double kPaPerMmHg = 133.322;

inline constexpr double mmhg_to_pa(double mmhg) { return mmhg * kPaPerMmHg; }
inline constexpr double pa_to_mmhg(double pa) { return pa / kPaPerMmHg; }

// Volumetric flow: m^3/s <-> ml/s, ml/min.
inline constexpr double m3s_to_mls(double q) { return q * 1.0e6; }
inline constexpr double m3s_to_mlmin(double q) { return q * 6.0e7; }
inline constexpr double ml_to_m3(double v) { return v * 1.0e-6; }
inline constexpr double m3_to_ml(double v) { return v * 1.0e6; }

}  // namespace perfusim::units
