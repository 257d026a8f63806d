#pragma once

// Reference values computed offline with scipy (quadrature and closed forms).
namespace fixtures {

inline constexpr double kPhiMinus2 = 0.022750131948179216;
// parabola b=5, kappa=0.5, e=0.1 under independent standard normals
inline constexpr double kParabolaPf = 0.0030163119013095568;
inline constexpr double kParabolaPfRight = 0.0010597947167904317;  // x1 > e
inline constexpr double kParabolaPfLeft = 0.0019565171845191236;   // x1 < e
// a=3, sigma=0.2, two lognormal(1, 0.2) inputs
inline constexpr double kRackwitz2Pf = 0.004922639816314427;
inline constexpr double kCombinedCov_3_4 = 0.05001439792699698;

}  // namespace fixtures
