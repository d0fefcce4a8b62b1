#pragma once

// Constants produced by tests/oracles/golden_values.py, an independent Python
// reimplementation of the generators and probability formulas.

#include <array>
#include <cstdint>

namespace golden {

inline constexpr std::uint64_t kMix64Of0 = 16294208416658607535ULL;
inline constexpr std::uint64_t kMix64Of12345 = 2454886589211414944ULL;
inline constexpr std::uint64_t kDeriveSeed42_1_2 = 139160571007649282ULL;

// gaussian_matrix(4, 2, 2024) and uniform_matrix(4, 2, 2024), column-major.
inline constexpr std::array<double, 8> kGaussian2024 = {
    -0.10476758758221762, -0.5616192513596173, 1.336053350117353,  2.2645185229642544,
    -1.0296463750283855,  -0.27106854192538843, -0.535424406694565, -0.44949423266872335};
inline constexpr std::array<double, 8> kUniform2024 = {
    -0.7968684629712346, 0.8624930414554108, -0.38291240029134,     -0.15312547527008924,
    0.7803560098733873,  0.3054147172013433, -0.038084117845091914, -0.34007234821031673};

inline constexpr double kLargestFloorN1Gamma2 = 0.9906368848771571;
inline constexpr double kSmallestFloorN1L1Beta2 = 0.45778122429038626;
// l = 12, j = 8, beta = gamma = 2, n_k = 100, 10000 columns.
inline constexpr double kPhiL12J8 = 0.0002650038337511835;
// dims (20, 30, 40), ranks (4, 5, 6), l = (8, 9, 10), j = (3, 4, 5), mode 1,
// identity order: 4 * 40 columns.
inline constexpr double kPsiMode1 = 2.595811631189845e-05;

}  // namespace golden
