#ifndef COOP_TEST_SUPPORT_HPP
#define COOP_TEST_SUPPORT_HPP

#include <initializer_list>

#include "coop/model.hpp"

namespace coop::testing {

// High-precision reference values, recomputed independently (series expansion
// at order 60 in 40-digit arithmetic) before being frozen here.
inline constexpr double kCosh1 = 1.5430806348152438;
inline constexpr double kSinh1 = 1.1752011936438015;
inline constexpr double kCosh1Sinh1 = 1.8134302039235094;
inline constexpr double kExpM1 = 0.36787944117144232;   // e^-1
inline constexpr double kExpM2 = 0.13533528323661269;   // e^-2
inline constexpr double kExpM3 = 0.049787068367863943;  // e^-3
inline constexpr double kExpMHalf = 0.60653065971263342;
inline constexpr double kExpHalf = 1.6487212707001281;
inline constexpr double kExp2Minus1 = 6.3890560989306502;
inline constexpr double kExpM50 = 1.9287498479639178e-22;
inline constexpr double kSinh01 = 0.10016675001984403;  // sinh(0.1)

inline Matrix mat2(double a11, double a12, double a21, double a22) {
    Matrix m(2, 2);
    m << a11, a12, a21, a22;
    return m;
}

inline Vector vec(std::initializer_list<double> values) {
    Vector v(static_cast<Index>(values.size()));
    Index i = 0;
    for (double x : values) {
        v(i++) = x;
    }
    return v;
}

inline CoefficientMatrix constant_system(const Matrix& entries,
                                         TimeWindow window = TimeWindow(-1.0, 10.0, 0.0)) {
    return CoefficientMatrix(window, ConstantBody{entries});
}

}  // namespace coop::testing

#endif
