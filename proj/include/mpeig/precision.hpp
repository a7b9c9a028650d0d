#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <type_traits>

#include "mpeig/errors.hpp"

namespace mpeig {

// Working precision is IEEE binary64, lower precision is IEEE binary32.
// Unit roundoffs u = 2^-53 and 2^-24 (round to nearest).
enum class Precision { Working, Lower };
enum class Field { Real, Complex };

inline constexpr double kUnitRoundoffWorking = 0x1p-53;
inline constexpr double kUnitRoundoffLower = 0x1p-24;

constexpr double unit_roundoff(Precision p) {
  return p == Precision::Working ? kUnitRoundoffWorking : kUnitRoundoffLower;
}

template <class T>
struct scalar_traits;

template <>
struct scalar_traits<double> {
  using real_type = double;
  using lower_type = float;
  using working_type = double;
  static constexpr Field field = Field::Real;
  static constexpr Precision precision = Precision::Working;
};

template <>
struct scalar_traits<float> {
  using real_type = float;
  using lower_type = float;
  using working_type = double;
  static constexpr Field field = Field::Real;
  static constexpr Precision precision = Precision::Lower;
};

template <>
struct scalar_traits<std::complex<double>> {
  using real_type = double;
  using lower_type = std::complex<float>;
  using working_type = std::complex<double>;
  static constexpr Field field = Field::Complex;
  static constexpr Precision precision = Precision::Working;
};

template <>
struct scalar_traits<std::complex<float>> {
  using real_type = float;
  using lower_type = std::complex<float>;
  using working_type = std::complex<double>;
  static constexpr Field field = Field::Complex;
  static constexpr Precision precision = Precision::Lower;
};

template <class T>
using real_t = typename scalar_traits<T>::real_type;
template <class T>
using lower_t = typename scalar_traits<T>::lower_type;
template <class T>
using working_t = typename scalar_traits<T>::working_type;

template <class T>
inline constexpr bool is_complex_v = scalar_traits<T>::field == Field::Complex;

template <class T>
inline constexpr Precision precision_v = scalar_traits<T>::precision;

// conj that collapses to a no-op for real scalars.
template <class T>
inline T conj_s(const T& x) {
  if constexpr (is_complex_v<T>)
    return std::conj(x);
  else
    return x;
}

template <class T>
inline real_t<T> real_s(const T& x) {
  if constexpr (is_complex_v<T>)
    return x.real();
  else
    return x;
}

template <class T>
inline real_t<T> abs_s(const T& x) {
  return std::abs(x);
}

// Rounding conversions between the two precisions.  Narrowing rounds to
// nearest (the hardware default); a finite value that lands outside the
// binary32 range is an error rather than a silent infinity.  Widening is
// exact.
inline float to_lower(double x) {
  const float y = static_cast<float>(x);
  if (std::isfinite(x) && !std::isfinite(static_cast<double>(y)))
    throw OverflowError("value exceeds binary32 range");
  return y;
}

inline std::complex<float> to_lower(const std::complex<double>& x) {
  return {to_lower(x.real()), to_lower(x.imag())};
}

inline double to_working(float x) { return static_cast<double>(x); }

inline std::complex<double> to_working(const std::complex<float>& x) {
  return {static_cast<double>(x.real()), static_cast<double>(x.imag())};
}

}  // namespace mpeig
