/*
   Copyright 2026 The insarstack Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include <gtest/gtest.h>

#include "insarstack/inpaint.hpp"
#include "oracles.hpp"

using namespace insarstack;

namespace {

Stack blank(std::size_t T, std::size_t H, std::size_t W)
{
    return Stack(TimeGrid{Date{0}, 6, static_cast<std::int32_t>(T)}, GeoTransform{0.0, 0.0, 20.0}, H, W);
}

SpringConfig spatial4()
{
    SpringConfig cfg;
    cfg.connectivity = Connectivity::spatial4;
    return cfg;
}

/// Each frame rotated 90 degrees clockwise.
Stack rotate(const Stack& s)
{
    Stack out = blank(s.frames(), s.width(), s.height());
    for (std::size_t t = 0; t < s.frames(); ++t)
        for (std::size_t r = 0; r < s.height(); ++r)
            for (std::size_t c = 0; c < s.width(); ++c)
                out(t, c, s.height() - 1 - r) = s(t, r, c);
    return out;
}

}  // namespace

TEST(InpaintSpring, PathIsLinear)
{
    auto s = blank(1, 1, 4);
    s(0, 0, 0) = 0.0f;
    s(0, 0, 3) = 9.0f;
    auto out = inpaint_spring(s, spatial4());
    EXPECT_NEAR(out(0, 0, 1), 3.0f, 1e-6);
    EXPECT_NEAR(out(0, 0, 2), 6.0f, 1e-6);
    EXPECT_EQ(out(0, 0, 0), 0.0f);
    EXPECT_EQ(out(0, 0, 3), 9.0f);
}

TEST(InpaintSpring, SingleUnknownIsNeighbourMean)
{
    auto s = blank(3, 3, 3);
    for (auto& v : s.data.values())
        v = 100.0f;  // edge/corner values are not neighbours of the centre
    s(1, 1, 1) = kMissing;
    s(1, 1, 0) = 1.0f;
    s(1, 1, 2) = 2.0f;
    s(1, 0, 1) = 3.0f;
    s(1, 2, 1) = 4.0f;
    s(0, 1, 1) = 5.0f;
    s(2, 1, 1) = 6.0f;
    auto out = inpaint_spring(s);
    EXPECT_NEAR(out(1, 1, 1), 3.5f, 1e-6);
}

TEST(InpaintSpring, FullyKnownIsIdentity)
{
    auto s = oracle::random_sparse_stack(1, 3, 4, 5, 0.0, 0.0);
    auto res = inpaint_spring_detailed(s);
    EXPECT_EQ(res.stack, s);
    EXPECT_EQ(res.iterations, 0u);
}

TEST(InpaintSpring, AffineFieldFromBoundaryRing)
{
    const double a = 1.5, b = 0.25, c = -0.4;
    auto field = [&](std::size_t r, std::size_t col) { return a + b * static_cast<double>(col) + c * static_cast<double>(r); };
    auto s = blank(1, 16, 16);
    for (std::size_t r = 0; r < 16; ++r)
        for (std::size_t col = 0; col < 16; ++col)
            if (r == 0 || col == 0 || r == 15 || col == 15)
                s(0, r, col) = static_cast<float>(field(r, col));
    auto out = inpaint_spring(s, spatial4());
    double worst = 0.0;
    for (std::size_t r = 1; r < 15; ++r)
        for (std::size_t col = 1; col < 15; ++col)
            worst = std::max(worst, std::abs(out(0, r, col) - field(r, col)));
    EXPECT_LE(worst, 1e-5);
}

TEST(InpaintSpring, Errors)
{
    auto s = blank(2, 3, 3);
    EXPECT_THROW(inpaint_spring(s), DataError);
    s(0, 1, 1) = 1.0f;
    EXPECT_NO_THROW(inpaint_spring(s));
    EXPECT_THROW(inpaint_spring(s, spatial4()), DataError);  // frame 1 has nothing

    auto big = oracle::random_sparse_stack(3, 4, 24, 24, 0.97, 0.99);
    SpringConfig tight;
    tight.max_iter = 1;
    try {
        inpaint_spring(big, tight);
        FAIL() << "expected non-convergence";
    } catch (const SolverError& e) {
        EXPECT_EQ(e.iterations(), 1u);
        EXPECT_GT(e.residual(), tight.rel_tol);
    }
    SpringConfig bad;
    bad.rel_tol = 0.0;
    EXPECT_THROW(inpaint_spring(big, bad), DataError);
}

TEST(InpaintSpring, FidelityAndMaximumPrinciple)
{
    for (std::uint32_t seed = 0; seed < 40; ++seed) {
        auto s = oracle::random_sparse_stack(seed, 4, 10, 9, 0.1, 0.95);
        for (auto cfg : {SpringConfig{}, spatial4()}) {
            if (cfg.connectivity == Connectivity::spatial4) {
                bool ok = true;
                for (std::size_t t = 0; t < s.frames(); ++t) {
                    auto f = s.data.frame(t);
                    ok &= std::any_of(f.begin(), f.end(), [](float v) { return !std::isnan(v); });
                }
                if (!ok)
                    continue;
            }
            auto out = inpaint_spring(s, cfg);
            float lo = INFINITY, hi = -INFINITY;
            for (float v : s.data.values())
                if (!std::isnan(v)) {
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
            ASSERT_TRUE(out.dense());
            for (std::size_t i = 0; i < s.data.size(); ++i) {
                if (!std::isnan(s.data[i])) {
                    ASSERT_EQ(out.data[i], s.data[i]);
                }
                ASSERT_GE(out.data[i], lo - 1e-6);
                ASSERT_LE(out.data[i], hi + 1e-6);
            }
        }
    }
}

TEST(InpaintSpring, Linearity)
{
    for (std::uint32_t seed = 0; seed < 20; ++seed) {
        auto s = oracle::random_sparse_stack(100 + seed, 3, 8, 8, 0.3, 0.8);
        SpringConfig cfg;
        cfg.rel_tol = 1e-13;
        auto base = inpaint_spring_detailed(s, cfg).solution;
        for (float alpha : {-2.0f, 0.5f, 4.0f}) {
            auto scaled = s;
            for (auto& v : scaled.data.values())
                v *= alpha;
            auto out = inpaint_spring_detailed(scaled, cfg).solution;
            for (std::size_t i = 0; i < base.size(); ++i)
                EXPECT_NEAR(out[i], alpha * base[i], 1e-9 * std::max(1.0, std::abs(alpha * base[i])));
        }
        auto shifted = s;
        for (auto& v : shifted.data.values())
            v += 7.0f;
        auto out = inpaint_spring_detailed(shifted, cfg).solution;
        for (std::size_t i = 0; i < base.size(); ++i)
            EXPECT_NEAR(out[i], base[i] + 7.0, 4e-6);  // float rounding of the shifted inputs, at most ulp(64)/2
    }
}

TEST(InpaintSpring, RotationSymmetry)
{
    for (std::uint32_t seed = 0; seed < 20; ++seed) {
        auto s = oracle::random_sparse_stack(200 + seed, 2, 7, 11, 0.2, 0.7);
        bool ok = true;
        for (std::size_t t = 0; t < s.frames(); ++t) {
            auto f = s.data.frame(t);
            ok &= std::any_of(f.begin(), f.end(), [](float v) { return !std::isnan(v); });
        }
        if (!ok)
            continue;
        auto cfg = spatial4();
        cfg.rel_tol = 1e-13;
        auto a = inpaint_spring_detailed(s, cfg).solution;
        auto b = inpaint_spring_detailed(rotate(s), cfg).solution;
        const auto H = s.height(), W = s.width();
        for (std::size_t t = 0; t < s.frames(); ++t)
            for (std::size_t r = 0; r < H; ++r)
                for (std::size_t c = 0; c < W; ++c)
                    EXPECT_NEAR(a[(t * H + r) * W + c], b[(t * W + c) * H + (H - 1 - r)], 1e-9);
    }
}

TEST(InpaintSpring, MatchesDenseDirectSolve)
{
    for (std::uint32_t seed = 0; seed < 30; ++seed) {
        auto s = oracle::random_sparse_stack(300 + seed, 3, 5, 5, 0.2, 0.9);
        SpringConfig cfg;
        cfg.rel_tol = 1e-13;
        auto iterative = inpaint_spring_detailed(s, cfg).solution;
        auto direct = oracle::dense_spring_solve(s, true);
        for (std::size_t i = 0; i < direct.size(); ++i)
            EXPECT_NEAR(iterative[i], direct[i], 1e-7);
    }
}
