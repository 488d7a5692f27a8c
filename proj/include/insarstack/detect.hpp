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

#pragma once

#include <algorithm>
#include <cmath>

#include "model.hpp"

namespace insarstack {

enum class DetectorMode { global, local };

inline DetectorMode parse_detector_mode(std::string_view s)
{
    if (s == "global")
        return DetectorMode::global;
    if (s == "local")
        return DetectorMode::local;
    throw DataError("unknown detector mode '" + std::string(s) + "'");
}

inline std::string_view to_string(DetectorMode m)
{
    return m == DetectorMode::global ? "global" : "local";
}

struct Window {
    std::size_t t = 5, y = 5, x = 5;
    friend bool operator==(const Window&, const Window&) = default;
};

struct DetectorConfig {
    DetectorMode mode = DetectorMode::global;
    double threshold = 150.0;  // mm^2
    Window window;
    std::size_t dilate_radius = 0;

    void validate() const
    {
        if (!(threshold > 0.0))
            throw DataError("detector threshold must be positive");
        for (auto w : {window.t, window.y, window.x})
            if (w == 0 || w % 2 == 0)
                throw DataError("detector window sizes must be odd and >= 1");
    }
};

/// Population variance of the finite values in `values`; NaN for fewer than two.
/// Two passes, accumulated in index order.
template <class Range>
double population_variance(const Range& values)
{
    double sum = 0.0;
    std::size_t n = 0;
    for (double v : values)
        if (!std::isnan(v)) {
            sum += v;
            ++n;
        }
    if (n < 2)
        return std::numeric_limits<double>::quiet_NaN();
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (double v : values)
        if (!std::isnan(v))
            ss += (v - mean) * (v - mean);
    return ss / static_cast<double>(n);
}

/// Per-pixel variance over the whole time axis; 1 x H x W.
inline Volume<double> variance_global(const Stack& stack)
{
    stack.validate();
    if (stack.frames() < 2)
        throw DataError("global variance needs at least 2 frames");
    Volume<double> out(1, stack.height(), stack.width());
    std::vector<double> series(stack.frames());
    for (std::size_t r = 0; r < stack.height(); ++r)
        for (std::size_t c = 0; c < stack.width(); ++c) {
            for (std::size_t t = 0; t < stack.frames(); ++t)
                series[t] = stack(t, r, c);
            out(0, r, c) = population_variance(series);
        }
    return out;
}

/// Per-voxel variance inside a centred wt x wy x wx window clipped at the stack edges.
inline Volume<double> variance_local(const Stack& stack, const Window& window)
{
    stack.validate();
    const auto T = stack.frames(), H = stack.height(), W = stack.width();
    for (auto w : {window.t, window.y, window.x})
        if (w == 0 || w % 2 == 0)
            throw DataError("window sizes must be odd and >= 1");
    if (window.t > T && window.y > H && window.x > W)
        throw DataError("window is larger than the stack in every dimension");

    const auto ht = window.t / 2, hy = window.y / 2, hx = window.x / 2;
    Volume<double> out(T, H, W);
    std::vector<double> buf;
    buf.reserve(window.t * window.y * window.x);
    for (std::size_t t = 0; t < T; ++t) {
        const auto t0 = t > ht ? t - ht : 0, t1 = std::min(T - 1, t + ht);
        for (std::size_t r = 0; r < H; ++r) {
            const auto r0 = r > hy ? r - hy : 0, r1 = std::min(H - 1, r + hy);
            for (std::size_t c = 0; c < W; ++c) {
                const auto c0 = c > hx ? c - hx : 0, c1 = std::min(W - 1, c + hx);
                buf.clear();
                for (auto tt = t0; tt <= t1; ++tt)
                    for (auto rr = r0; rr <= r1; ++rr) {
                        auto row = stack.data.frame(tt).subspan(rr * W + c0, c1 - c0 + 1);
                        buf.insert(buf.end(), row.begin(), row.end());
                    }
                out(t, r, c) = population_variance(buf);
            }
        }
    }
    return out;
}

/// Strict `variance > tau`; NaN never fires.
inline DetectionMap threshold(const Volume<double>& variance, double tau)
{
    if (!(tau > 0.0))
        throw DataError("threshold must be positive");
    DetectionMap map(variance.frames(), variance.rows(), variance.cols());
    for (std::size_t i = 0; i < variance.size(); ++i)
        map.bits[i] = variance[i] > tau ? 1 : 0;
    return map;
}

/// Per-frame dilation with a (2r+1) x (2r+1) square.
inline DetectionMap dilate(const DetectionMap& map, std::size_t radius)
{
    if (radius == 0)
        return map;
    const auto H = map.height(), W = map.width();
    DetectionMap out(map.frames(), H, W);
    // Separable: rows then columns.
    Volume<std::uint8_t> tmp(1, H, W);
    for (std::size_t t = 0; t < map.frames(); ++t) {
        for (std::size_t r = 0; r < H; ++r)
            for (std::size_t c = 0; c < W; ++c) {
                const auto c0 = c > radius ? c - radius : 0, c1 = std::min(W - 1, c + radius);
                std::uint8_t v = 0;
                for (auto cc = c0; cc <= c1 && !v; ++cc)
                    v = map.bits(t, r, cc);
                tmp(0, r, c) = v;
            }
        for (std::size_t r = 0; r < H; ++r) {
            const auto r0 = r > radius ? r - radius : 0, r1 = std::min(H - 1, r + radius);
            for (std::size_t c = 0; c < W; ++c) {
                std::uint8_t v = 0;
                for (auto rr = r0; rr <= r1 && !v; ++rr)
                    v = tmp(0, rr, c);
                out.bits(t, r, c) = v;
            }
        }
    }
    return out;
}

/// Variance map for the configured mode, thresholded and dilated.
inline DetectionMap detect(const Stack& stack, const DetectorConfig& cfg)
{
    cfg.validate();
    auto var = cfg.mode == DetectorMode::global ? variance_global(stack) : variance_local(stack, cfg.window);
    return dilate(threshold(var, cfg.threshold), cfg.dilate_radius);
}

/// Global detector applied to point series directly (the sparse, un-densified view).
/// Returns one flag per point.
inline std::vector<bool> detect_points_global(const PointSet& set, double tau)
{
    if (!(tau > 0.0))
        throw DataError("threshold must be positive");
    std::vector<bool> hits;
    hits.reserve(set.points.size());
    for (const auto& p : set.points)
        hits.push_back(population_variance(p.values) > tau);
    return hits;
}

}  // namespace insarstack
