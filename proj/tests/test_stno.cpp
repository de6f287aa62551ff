// tsasr/tests/test_stno.cpp

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <random>

#include "doctest.h"
#include "tsasr/stno.hpp"

using namespace tsasr;

namespace {

ActivityMatrix RandomActivity(std::mt19937_64 &rng, int64_t S, int64_t T, bool binary) {
  ActivityMatrix m;
  m.frame_rate = 50.0;
  m.num_frames = T;
  for (int64_t s = 0; s < S; ++s) m.speakers.push_back("spk" + std::to_string(s));
  m.values.resize(static_cast<size_t>(S * T));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (auto &v : m.values) v = binary ? (unif(rng) < 0.5 ? 0.0 : 1.0) : unif(rng);
  return m;
}

void CheckSimplex(const StnoMask &mask, double tol = 1e-9) {
  for (int64_t t = 0; t < mask.num_frames; ++t) {
    double sum = 0.0;
    for (int c = 0; c < 4; ++c) {
      CHECK(mask.At(t, c) >= 0.0);
      sum += mask.At(t, c);
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(tol));
  }
}

}  // namespace

TEST_CASE("ComputeStno on pure frames") {
  ActivityMatrix m;
  m.speakers = {"A", "B"};
  m.frame_rate = 50.0;
  m.num_frames = 3;
  // frame 0: target alone; frame 1: full overlap; frame 2: silence
  m.values = {1, 1, 0,   // A
              0, 1, 0};  // B
  auto mask = ComputeStno(m, 0);
  CHECK(mask.At(0, StnoMask::kTarget) == 1.0);
  CHECK(mask.At(1, StnoMask::kOverlap) == 1.0);
  CHECK(mask.At(2, StnoMask::kSilence) == 1.0);
  CHECK(mask.At(0, StnoMask::kSilence) == 0.0);
  CHECK(mask.At(1, StnoMask::kTarget) == 0.0);
}

TEST_CASE("ComputeStno fractional two-speaker frame") {
  ActivityMatrix m;
  m.speakers = {"A", "B"};
  m.frame_rate = 50.0;
  m.num_frames = 1;
  m.values = {0.5, 0.5};
  auto mask = ComputeStno(m, 0);
  for (int c = 0; c < 4; ++c) CHECK(mask.At(0, c) == doctest::Approx(0.25));
}

TEST_CASE("ComputeStno target index validation") {
  std::mt19937_64 rng(3);
  auto m = RandomActivity(rng, 2, 5, true);
  CHECK_THROWS_AS(ComputeStno(m, -1), std::invalid_argument);
  CHECK_THROWS_AS(ComputeStno(m, 2), std::invalid_argument);
}

TEST_CASE("ComputeStno identities on random soft activity") {
  std::mt19937_64 rng(17);
  for (int it = 0; it < 200; ++it) {
    int64_t S = 1 + static_cast<int64_t>(rng() % 5);
    int64_t T = 1 + static_cast<int64_t>(rng() % 30);
    auto m = RandomActivity(rng, S, T, false);
    int64_t k = static_cast<int64_t>(rng() % static_cast<uint64_t>(S));
    auto mask = ComputeStno(m, k);
    CheckSimplex(mask);
    // hand-oracle per the closed-form expressions
    for (int64_t t = 0; t < T; ++t) {
      double dk = m.At(k, t);
      double prod = 1.0;
      for (int64_t s = 0; s < S; ++s)
        if (s != k) prod *= 1.0 - m.At(s, t);
      CHECK(mask.At(t, StnoMask::kNonTarget) ==
            doctest::Approx((1.0 - dk) * (1.0 - prod)).epsilon(1e-12));
      CHECK(mask.At(t, StnoMask::kOverlap) ==
            doctest::Approx(dk * (1.0 - prod)).epsilon(1e-12));
    }
  }
}

TEST_CASE("ComputeStno is one-hot for binary activity") {
  std::mt19937_64 rng(23);
  for (int it = 0; it < 50; ++it) {
    auto m = RandomActivity(rng, 3, 20, true);
    auto mask = ComputeStno(m, 1);
    for (int64_t t = 0; t < mask.num_frames; ++t) {
      int ones = 0;
      for (int c = 0; c < 4; ++c) {
        CHECK((mask.At(t, c) == 0.0 || mask.At(t, c) == 1.0));
        ones += mask.At(t, c) == 1.0 ? 1 : 0;
      }
      CHECK(ones == 1);
    }
  }
}

TEST_CASE("ComputeStno is equivariant to permuting non-target speakers") {
  std::mt19937_64 rng(29);
  auto m = RandomActivity(rng, 4, 15, false);
  auto mask = ComputeStno(m, 0);
  ActivityMatrix swapped = m;
  for (int64_t t = 0; t < m.num_frames; ++t) std::swap(swapped.At(1, t), swapped.At(3, t));
  auto mask2 = ComputeStno(swapped, 0);
  for (size_t i = 0; i < mask.values.size(); ++i)
    CHECK(mask.values[i] == doctest::Approx(mask2.values[i]).epsilon(1e-15));
}

TEST_CASE("StnoGaussianNoise sigma=0 is identity") {
  std::mt19937_64 rng(5);
  auto mask = ComputeStno(RandomActivity(rng, 2, 10, true), 0);
  auto out = StnoGaussianNoise(mask, 0.0, 1.0, rng);
  CHECK(out.values == mask.values);
}

TEST_CASE("Gaussian clip/renormalize hand example") {
  // row (1,0,0,0) + eps (-0.3,+0.1,0,0) -> clipped (0.7,0.1,0,0)
  // -> normalized (0.875,0.125,0,0)
  double clipped[4] = {0.7, 0.1, 0.0, 0.0};
  double sum = clipped[0] + clipped[1];
  CHECK(clipped[0] / sum == doctest::Approx(0.875));
  CHECK(clipped[1] / sum == doctest::Approx(0.125));
}

TEST_CASE("StnoSegmentFlip flip_prob=0 is identity") {
  std::mt19937_64 rng(9);
  auto mask = ComputeStno(RandomActivity(rng, 3, 40, true), 0);
  auto out = StnoSegmentFlip(mask, 1.0, 0.1, 1.0, 0.0, rng);
  CHECK(out.values == mask.values);
}

TEST_CASE("StnoSegmentFlip swaps dominant-class mass on a forced flip") {
  StnoMask mask;
  mask.frame_rate = 10.0;
  mask.num_frames = 4;
  mask.values.assign(16, 0.0);
  for (int64_t t = 0; t < 4; ++t) mask.At(t, StnoMask::kTarget) = 1.0;
  std::mt19937_64 rng(1);
  // segment length >= whole mask, flip probability 1: exactly one swap
  auto out = StnoSegmentFlip(mask, 1.0, 10.0, 10.0, 1.0, rng);
  int moved = -1;
  for (int64_t t = 0; t < 4; ++t) {
    CHECK(out.At(t, StnoMask::kTarget) == 0.0);
    for (int c = 0; c < 4; ++c)
      if (out.At(t, c) == 1.0) {
        if (moved < 0) moved = c;
        CHECK(c == moved);  // same receiving class on every frame
      }
  }
  CHECK(moved != StnoMask::kTarget);
}

TEST_CASE("JointSpecAugment identity with zero masks") {
  std::mt19937_64 rng(2);
  auto mask = ComputeStno(RandomActivity(rng, 2, 12, true), 0);
  Tensor f({12, 6}, 1.0);
  Tensor f0 = f;
  auto m0 = mask;
  JointSpecAugment(f, mask, 0, 10, 0, 2, rng);
  CHECK(f.data == f0.data);
  CHECK(mask.values == m0.values);
}

TEST_CASE("JointSpecAugment couples time spans, leaves mask alone for freq") {
  std::mt19937_64 rng(6);
  auto mask = ComputeStno(RandomActivity(rng, 2, 30, true), 0);
  auto before = mask;
  Tensor f({30, 8}, 1.0);
  JointSpecAugment(f, mask, 1, 10, 0, 0, rng);
  for (int64_t t = 0; t < 30; ++t) {
    bool zeroed = true;
    for (int64_t c = 0; c < 8; ++c)
      if (f.At(t, c) != 0.0) zeroed = false;
    if (zeroed) {
      CHECK(mask.At(t, StnoMask::kSilence) == 1.0);
      CHECK(mask.At(t, StnoMask::kTarget) == 0.0);
    } else {
      for (int c = 0; c < 4; ++c) CHECK(mask.At(t, c) == before.At(t, c));
    }
  }

  // frequency masks only touch features
  auto mask2 = before;
  Tensor f2({30, 8}, 1.0);
  JointSpecAugment(f2, mask2, 0, 0, 2, 4, rng);
  CHECK(mask2.values == before.values);
}

TEST_CASE("JointSpecAugment rejects frame mismatch") {
  std::mt19937_64 rng(6);
  auto mask = ComputeStno(RandomActivity(rng, 2, 30, true), 0);
  Tensor f({20, 8}, 1.0);
  CHECK_THROWS_AS(JointSpecAugment(f, mask, 1, 5, 0, 0, rng), std::invalid_argument);
}

TEST_CASE("all augmentations preserve the simplex invariants") {
  std::mt19937_64 rng(31);
  for (int it = 0; it < 1000; ++it) {
    int64_t S = 1 + static_cast<int64_t>(rng() % 4);
    int64_t T = 1 + static_cast<int64_t>(rng() % 50);
    auto m = RandomActivity(rng, S, T, (it % 2) == 0);
    auto mask = ComputeStno(m, 0);
    mask = StnoGaussianNoise(mask, 0.2, 0.75, rng);
    mask = StnoSegmentFlip(mask, 0.3, 0.1, 1.0, 0.1, rng);
    Tensor f({T, 4}, 0.5);
    JointSpecAugment(f, mask, 2, 10, 1, 1, rng);
    CheckSimplex(mask);
  }
}

TEST_CASE("PoolMask mean pools and keeps rows on the simplex") {
  StnoMask mask;
  mask.frame_rate = 100.0;
  mask.num_frames = 5;
  mask.values.assign(20, 0.0);
  for (int64_t t = 0; t < 5; ++t) mask.At(t, t < 2 ? StnoMask::kTarget : StnoMask::kSilence) = 1.0;
  auto pooled = PoolMask(mask, 2);
  REQUIRE(pooled.num_frames == 3);
  CHECK(pooled.frame_rate == doctest::Approx(50.0));
  CHECK(pooled.At(0, StnoMask::kTarget) == doctest::Approx(1.0));
  CHECK(pooled.At(1, StnoMask::kTarget) == doctest::Approx(0.0));
  CHECK(pooled.At(1, StnoMask::kSilence) == doctest::Approx(1.0));
  CHECK(pooled.At(2, StnoMask::kSilence) == doctest::Approx(1.0));  // partial tail group
  CheckSimplex(pooled);
}
