// SPDX-License-Identifier: MIT
#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <limits>
#include <vector>

#include "stokeseig/assembly.hpp"

namespace stokeseig {

// Published benchmark data for the schemes implemented here: for each
// (domain, family, k, formulation) ladder, the five lowest eigenvalues per
// level, the least-squares order and extrapolated value reported with them,
// and up to two external benchmark columns where the source printed any.
// Values are verbatim, including the occasional short row or asymmetric
// digit; a checksum test guards against silent edits.
struct ReferenceRow {
  std::array<double, 4> lambda;
  double order;
  double extr;
  std::array<double, 2> benchmark;  // NaN when the column is absent
};

struct ReferenceBlock {
  Domain domain;
  Family family;
  int k;
  Formulation formulation;
  std::array<int, 4> levels;
  std::array<ReferenceRow, 5> rows;
};

inline const std::vector<ReferenceBlock>& reference_blocks() {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  static const std::vector<ReferenceBlock> blocks = {
      // unit square, RT, full formulation
      {Domain::square, Family::rt, 0, Formulation::full, {10, 20, 30, 40},
       {{{{12.61618, 12.96634, 13.03637, 13.05313}, 2.00, 13.08484, {13.0860, 13.086}},
         {{21.08840, 22.63791, 22.85202, 22.93446}, 2.40, 22.99702, {23.0308, 23.031}},
         {{21.33183, 22.69036, 22.88083, 22.93810}, 2.46, 22.99245, {23.0308, 23.031}},
         {{27.96811, 31.27226, 31.70100, 31.81983}, 2.59, 31.93357, {32.0443, 32.053}},
         {{33.42538, 37.66786, 38.18478, 38.32443}, 2.69, 38.44565, {38.5252, 38.532}}}}},
      {Domain::square, Family::rt, 1, Formulation::full, {10, 20, 30, 40},
       {{{{13.08698, 13.08620, 13.08617, 13.08617}, 4.56, 13.08617, {13.0860, 13.086}},
         {{23.04310, 23.03182, 23.03123, 23.03114}, 4.04, 23.03109, {23.0308, 23.031}},
         {{23.04310, 23.03182, 23.03123, 23.03114}, 4.04, 23.03109, {23.0308, 23.031}},
         {{32.07944, 32.05400, 32.05270, 32.05249}, 4.07, 32.05239, {32.0443, 32.053}},
         {{38.60095, 38.53594, 38.53227, 38.53165}, 3.92, 38.53134, {38.5252, 38.532}}}}},
      {Domain::square, Family::rt, 2, Formulation::full, {10, 20, 30, 40},
       {{{{13.08528, 13.08616, 13.08617, 13.08617}, 5.84, 13.08617, {13.0860, 13.086}},
         {{23.03116, 23.03109, 23.03109, 23.03109}, 6.00, 23.03109, {23.0308, 23.031}},
         {{23.03116, 23.03109, 23.03109, 23.03109}, 6.00, 23.03109, {23.0308, 23.031}},
         {{32.05268, 32.05239, 32.05239, 32.05239}, 6.00, 32.05239, {32.0443, 32.053}},
         {{38.53256, 38.53138, 38.53136, 38.53136}, 5.97, 38.53136, {38.5252, 38.532}}}}},
      // unit square, RT, reduced formulation
      {Domain::square, Family::rt, 0, Formulation::reduced, {10, 20, 30, 40},
       {{{{13.18205, 13.10744, 13.09534, 13.09127}, 2.21, 13.08688, {13.0860, 13.086}},
         {{22.59086, 22.92419, 22.98366, 23.00442}, 2.06, 23.02944, {23.0308, 23.031}},
         {{22.59086, 22.92419, 22.98366, 23.00442}, 2.06, 23.02944, {23.0308, 23.031}},
         {{31.52148, 31.92201, 31.99384, 32.01930}, 2.04, 32.05042, {32.0443, 32.053}},
         {{36.97903, 38.18216, 38.37946, 38.44657}, 2.19, 38.51958, {38.5252, 38.532}}}}},
      {Domain::square, Family::rt, 1, Formulation::reduced, {10, 20, 30, 40},
       {{{{13.08698, 13.08620, 13.08617, 13.08617}, 4.56, 13.08617, {13.0860, 13.086}},
         {{23.04310, 23.03182, 23.03123, 23.03114}, 4.04, 23.03122, {23.0310, 23.031}},
         {{23.04310, 23.03182, 23.03123, 23.03114}, 4.04, 23.03109, {23.0308, 23.031}},
         {{32.07944, 32.05400, 32.05270, 32.05249}, 4.07, 32.05239, {32.0443, 32.053}},
         {{38.60095, 38.53594, 38.53227, 38.53165}, 3.92, 38.53134, {38.5252, 38.532}}}}},
      {Domain::square, Family::rt, 2, Formulation::reduced, {10, 20, 30, 40},
       {{{{13.08615, 13.08617, 13.08617, 13.08617}, 4.75, 13.08617, {13.0860, 13.086}},
         {{23.03116, 23.03109, 23.03109, 23.03109}, 6.00, 23.03109, {23.0308, 23.031}},
         {{23.03116, 23.03109, 23.03109, 23.03109}, 6.00, 23.03110, {23.0308, 23.031}},
         {{32.05268, 32.05239, 32.05239, 32.05239}, 6.00, 32.05239, {32.0443, 32.053}},
         {{38.53256, 38.53138, 38.53136, 38.53136}, 5.92, 38.53136, {38.5252, 38.532}}}}},
      // unit square, BDM, full formulation
      {Domain::square, Family::bdm, 0, Formulation::full, {10, 20, 30, 40},
       {{{{13.39520, 13.16477, 13.12123, 13.10591}, 1.97, 13.08574, {13.0860, 13.086}},
         {{23.74378, 23.22000, 23.11593, 23.07899}, 1.89, 23.02641, {23.0308, 23.031}},
         {{24.19514, 23.32856, 23.16384, 23.10587}, 1.96, 23.02865, {23.0308, 23.031}},
         {{33.73344, 32.50272, 32.25523, 32.16703}, 1.87, 32.03920, {32.0443, 32.053}},
         {{41.15209, 39.23059, 38.84532, 38.70858}, 1.88, 38.51262, {38.5252, 38.532}}}}},
      {Domain::square, Family::bdm, 1, Formulation::full, {10, 20, 30, 40},
       {{{{13.08919, 13.08636, 13.08621, 13.08618}, 3.99, 13.08617, {13.0860, 13.086}},
         {{23.04441, 23.03195, 23.03126, 23.03115}, 3.96, 23.03109, {23.0308, 23.031}},
         {{23.05331, 23.03253, 23.03138, 23.03118}, 3.95, 23.03109, {23.0308, 23.031}},
         {{32.10055, 32.0555, 32.05302, 32.05259}, 3.92, 32.05238, {32.0443, 32.053}},
         {{38.61259, 38.53671, 38.53243, 38.53170}, 3.92, 38.53134, {38.5252, 38.532}}}}},
      {Domain::square, Family::bdm, 2, Formulation::full, {10, 20, 30, 40},
       {{{{13.08618, 13.08617, 13.08617, 13.08617}, 6.16, 13.08617, {13.0860, 13.086}},
         {{23.03117, 23.03109, 23.03109, 23.03109}, 6.04, 23.03109, {23.0308, 23.031}},
         {{23.03128, 23.03110, 23.03109, 23.03109}, 6.01, 23.03109, {23.0308, 23.031}},
         {{32.05303, 32.05240, 32.05239, 32.05239}, 6.02, 32.05239, {32.0443, 32.053}},
         {{38.53239, 38.53138, 38.53136, 38.53136}, 5.92, 38.53136, {38.5252, 38.532}}}}},
      // unit square, BDM, reduced formulation
      {Domain::square, Family::bdm, 0, Formulation::reduced, {10, 20, 30, 40},
       {{{{13.46029, 13.18088, 13.12837, 13.10993}, 1.98, 13.08589, {13.0860, 13.086}},
         {{24.18596, 23.32433, 23.16178, 23.10467}, 1.97, 23.02910, {23.0308, 23.031}},
         {{24.18596, 23.32433, 23.16178, 23.10467}, 1.97, 23.02910, {23.0308, 23.031}},
         {{34.23489, 32.61702, 32.30485, 32.19470}, 1.94, 32.04581, {32.0443, 32.053}},
         {{41.75299, 39.35261, 38.89728, 38.73736}, 1.96, 38.52295, {38.5252, 38.532}}}}},
      {Domain::square, Family::bdm, 1, Formulation::reduced, {10, 20, 30, 40},
       {{{{13.08997, 13.08642, 13.08622, 13.08618}, 3.93, 13.08617, {13.0860, 13.086}},
         {{23.05092, 23.03240, 23.03135, 23.03118}, 3.92, 23.03109, {23.0308, 23.031}},
         {{23.05092, 23.03240, 23.03135, 23.03118}, 3.92, 23.03109, {23.0308, 23.031}},
         {{32.10848, 32.05619, 32.05315, 32.05263}, 3.88, 32.05237, {32.0443, 32.053}},
         {{38.61788, 38.53707, 38.53250, 38.53172}, 3.92, 38.53134, {38.5252, 38.532}}}}},
      {Domain::square, Family::bdm, 2, Formulation::reduced, {10, 20, 30, 40},
       {{{{13.08619, 13.08617, 13.08617, 13.08617}, 6.09, 13.08617, {13.0860, 13.086}},
         {{23.03128, 23.03110, 23.03109, 23.03109}, 5.97, 23.03109, {23.0308, 23.031}},
         {{23.03128, 23.03110, 23.03109, 23.03109}, 5.97, 23.03109, {23.0308, 23.031}},
         {{32.05323, 32.05240, 32.05239, 32.05239}, 5.91, 32.05239, {32.0443, 32.053}},
         {{38.53245, 38.53138, 38.53136, 38.53136}, 5.92, 38.53136, {38.5252, 38.532}}}}},
      // unit disk, RT, full formulation
      {Domain::disk, Family::rt, 0, Formulation::full, {20, 30, 40, 50},
       {{{{14.94827, 14.79867, 14.74712, 14.72354}, 2.04, 14.68251, {14.68345, nan}},
         {{26.81747, 26.56803, 26.48211, 26.44329}, 2.05, 26.37559, {26.37840, nan}},
         {{26.81821, 26.56845, 26.48262, 26.44365}, 2.06, 26.37683, {26.37862, nan}},
         {{41.32838, 40.98177, 40.85915, 40.80453}, 2.01, 40.70533, {40.71434, nan}},
         {{41.34096, 40.98359, 40.86093, 40.80487}, 2.05, 40.70809, {40.71606, nan}}}}},
      {Domain::disk, Family::rt, 1, Formulation::full, {20, 30, 40, 50},
       {{{{14.94196, 14.79448, 14.74448, 14.72169}, 2.08, 14.68323, {14.68345, nan}},
         {{26.84091, 26.57657, 26.48686, 26.44594}, 2.08, 26.37704, {26.37840, nan}},
         {{26.84099, 26.57662, 26.48687, 26.44595}, 2.08, 26.37703, {26.37862, nan}},
         {{41.42501, 41.01797, 40.87964, 40.81652}, 2.08, 40.71046, {40.71434, nan}},
         {{41.42543, 41.01805, 40.87966, 40.81654}, 2.08, 40.71037, {40.71606, nan}}}}},
      {Domain::disk, Family::rt, 2, Formulation::full, {20, 30, 40, 50},
       {{{{14.94315, 14.79487, 14.74464, 14.72177}, 2.09, 14.68361, {14.68345, nan}},
         {{26.84301, 26.57727, 26.48715, 26.44610}, 2.08, 26.37680, {26.37840, nan}},
         {{26.84303, 26.57728, 26.48716, 26.44610}, 2.08, 26.37680, {26.37862, nan}},
         {{41.42807, 41.01900, 40.88008, 40.81675}, 2.08, 40.71012, {40.71434, nan}},
         {{41.42814, 41.01902, 40.88008, 40.81676}, 2.08, 40.71010, {40.71606, nan}}}}},
      // unit disk, BDM, full formulation
      {Domain::disk, Family::bdm, 0, Formulation::full, {20, 30, 40, 50},
       {{{{14.82469, 14.71768, 14.69784, 14.69090}, 2.00, 14.68199, {14.68345, nan}},
         {{26.77392, 26.47427, 26.41889, 26.39951}, 2.00, 26.37450, {26.37840, nan}},
         {{26.77392, 26.47427, 26.41889, 26.39951}, 2.00, 26.37450, {26.37862, nan}},
         {{41.56881, 40.92423, 40.80343, 40.76105}, 1.98, 40.70545, {40.71434, nan}},
         {{41.56881, 40.92423, 40.80343, 40.76105}, 1.98, 40.70545, {40.71606, nan}}}}},
      {Domain::disk, Family::bdm, 1, Formulation::full, {20, 30, 40, 50},
       {{{{14.70933, 14.68872, 14.68496, 14.68365}, 2.02, 14.68199, {14.68345, nan}},
         {{26.42481, 26.38682, 26.38000, 26.37764}, 2.05, 26.37473, {26.37840, nan}},
         {{26.42481, 26.38682, 26.38000, 26.37764}, 2.05, 26.37703, {26.37862, nan}},
         {{40.78741, 40.72552, 40.71483, 40.71115}, 2.11, 40.70686, {40.71434, nan}},
         {{40.78741, 40.72552, 40.71483, 40.71115}, 2.11, 40.70686, {40.71606, nan}}}}},
      {Domain::disk, Family::bdm, 2, Formulation::full, {20, 30, 40, 50},
       {{{{14.70930, 14.68873, 14.68496, 14.68365}, 2.02, 14.68200, {14.68345, nan}},
         {{26.42370, 26.38677, 26.38000, 26.37764}, 2.02, 26.37467, {26.37840, nan}},
         {{26.42370, 26.38677, 26.38000, 26.37764}, 2.02, 26.37467, {26.37862, nan}},
         {{40.78222, 40.72523, 40.71478, 40.71113}, 2.02, 40.70655, {40.71434, nan}},
         {{40.78222, 40.72523, 40.71478, 40.71113}, 2.02, 40.70655, {40.71606, nan}}}}},
      // L-shape, k = 0, full formulation
      {Domain::lshape, Family::rt, 0, Formulation::full, {9, 15, 20, 35},
       {{{{29.43565, 30.83700, 31.16193, 31.62598}, 1.59, 31.89457, {nan, nan}},
         {{34.98077, 36.28132, 36.50660, 36.83669}, 2.03, 36.94231, {nan, nan}},
         {{40.70064, 41.43833, 41.62290, 41.83014}, 1.73, 41.94524, {nan, nan}},
         {{46.83830, 48.22776, 48.47328, 48.80875}, 2.07, 48.91635, {nan, nan}},
         {{52.08483, 53.96541, 54.48404, 55.02474}, 1.65, 55.37238, {nan, nan}}}}},
      {Domain::lshape, Family::bdm, 0, Formulation::full, {9, 15, 20, 35},
       {{{{32.59542, 32.24970, 32.14635, 32.06144}, 1.75, 32.00483, {nan, nan}},
         {{38.76953, 37.57884, 37.32081, 37.11240}, 2.26, 37.03276, {nan, nan}},
         {{44.76985, 42.88018, 42.46067, 42.10765}, 2.19, 41.96744, {nan, nan}},
         {{52.09587, 50.19205, 49.67367, 49.20827}, 1.81, 48.93475, {nan, nan}},
         {{58.84979, 56.72442, 56.20364, 55.63553}, 1.79, 55.33628, {nan, nan}}}}},
  };
  return blocks;
}

inline const ReferenceBlock* find_reference(Domain domain, Family family,
                                            int k, Formulation formulation) {
  for (const auto& b : reference_blocks())
    if (b.domain == domain && b.family == family && b.k == k &&
        b.formulation == formulation)
      return &b;
  return nullptr;
}

// FNV-1a over the bit patterns of every stored number, in declaration order.
inline std::uint64_t reference_checksum() {
  std::uint64_t h = 14695981039346656037ull;
  auto mix = [&h](const void* p, std::size_t n) {
    const unsigned char* c = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= c[i];
      h *= 1099511628211ull;
    }
  };
  auto mix_double = [&](double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    mix(&bits, sizeof bits);
  };
  for (const auto& b : reference_blocks()) {
    const int meta[4] = {static_cast<int>(b.domain), static_cast<int>(b.family),
                         b.k, static_cast<int>(b.formulation)};
    mix(meta, sizeof meta);
    mix(b.levels.data(), sizeof b.levels);
    for (const auto& r : b.rows) {
      for (double v : r.lambda) mix_double(v);
      mix_double(r.order);
      mix_double(r.extr);
      for (double v : r.benchmark) mix_double(v);
    }
  }
  return h;
}

}  // namespace stokeseig
