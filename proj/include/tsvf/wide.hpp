#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace tsvf {

// Roughly 160 significant decimal digits. Binomial weights with |eta| <= 50
// and N <= 64 reach 99^64 ~ 1e128 in magnitude, so sums of them that should
// come out near 1 need well over 128 digits.
using Wide = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<160>,
                                           boost::multiprecision::et_off>;
inline constexpr int kWideDigits = 160;

}  // namespace tsvf
