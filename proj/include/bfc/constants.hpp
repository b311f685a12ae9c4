#pragma once

namespace bfc {

// Internal unit system: time in ps, frequency in THz, angular frequency in
// rad/ps.  With these choices frequency*time products are dimensionless
// (1 THz * 1 ps = 1), so phases never need rescaling.
inline constexpr double kSpeedOfLight_nm_per_ps = 299792.458;  // == nm*THz

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

inline constexpr double thz_from_ghz(double ghz) { return ghz * 1e-3; }
inline constexpr double thz_from_mhz(double mhz) { return mhz * 1e-6; }
inline constexpr double ps_from_ns(double ns) { return ns * 1e3; }
inline constexpr double ps_from_fs(double fs) { return fs * 1e-3; }
inline constexpr double ps_from_s(double s) { return s * 1e12; }
inline constexpr double frequency_thz(double wavelength_nm) {
    return kSpeedOfLight_nm_per_ps / wavelength_nm;
}
inline constexpr double wavelength_nm(double freq_thz) {
    return kSpeedOfLight_nm_per_ps / freq_thz;
}

}  // namespace bfc
