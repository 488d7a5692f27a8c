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
#include <array>
#include <optional>

#include "model.hpp"

namespace insarstack {

enum class MedianMode { temporal3, spatial3x3, off };

inline MedianMode parse_median_mode(std::string_view s)
{
    if (s == "temporal3")
        return MedianMode::temporal3;
    if (s == "spatial3x3")
        return MedianMode::spatial3x3;
    if (s == "off")
        return MedianMode::off;
    throw DataError("unknown median mode '" + std::string(s) + "'");
}

inline std::string_view to_string(MedianMode m)
{
    switch (m) {
    case MedianMode::temporal3: return "temporal3";
    case MedianMode::spatial3x3: return "spatial3x3";
    case MedianMode::off: return "off";
    }
    return "off";
}

/// Linear fill between finite samples, placed at `positions`; ends are held constant.
inline std::vector<double> interp_time_linear(std::span<const double> series,
                                              std::span<const std::int32_t> positions)
{
    if (positions.size() != series.size())
        throw DataError("interpolation positions do not match series length");
    std::vector<std::size_t> known;
    for (std::size_t i = 0; i < series.size(); ++i)
        if (!std::isnan(series[i]))
            known.push_back(i);
    if (known.empty())
        throw DataError("cannot interpolate an all-NaN series");

    std::vector<double> out(series.begin(), series.end());
    for (std::size_t i = 0; i < known.front(); ++i)
        out[i] = series[known.front()];
    for (std::size_t i = known.back() + 1; i < series.size(); ++i)
        out[i] = series[known.back()];
    for (std::size_t k = 0; k + 1 < known.size(); ++k) {
        const auto a = known[k], b = known[k + 1];
        if (b == a + 1)
            continue;
        const double xa = positions[a], xb = positions[b];
        const double ya = series[a], yb = series[b];
        for (auto i = a + 1; i < b; ++i) {
            const double w = (positions[i] - xa) / (xb - xa);
            out[i] = ya + w * (yb - ya);
        }
    }
    return out;
}

/// Unit-spaced overload.
inline std::vector<double> interp_time_linear(std::span<const double> series)
{
    std::vector<std::int32_t> pos(series.size());
    for (std::size_t i = 0; i < pos.size(); ++i)
        pos[i] = static_cast<std::int32_t>(i);
    return interp_time_linear(series, pos);
}

/// Fills every series of a set. Throws if some point has no finite sample.
inline PointSet interp_time_linear(const PointSet& set)
{
    const auto positions = set.sample_slots();
    PointSet out = set;
    for (auto& p : out.points) {
        try {
            p.values = interp_time_linear(p.values, positions);
        } catch (const DataError&) {
            throw DataError("point '" + p.id + "' has no finite samples to interpolate from");
        }
    }
    return out;
}

/// Median of the finite values in `window`; even counts average the middle pair.
/// Returns NaN when no finite value is present.
template <class T>
T nan_median(std::span<T> window)
{
    auto end = std::remove_if(window.begin(), window.end(), [](T v) { return std::isnan(v); });
    const auto n = static_cast<std::size_t>(end - window.begin());
    if (n == 0)
        return std::numeric_limits<T>::quiet_NaN();
    std::sort(window.begin(), end);
    if (n % 2 == 1)
        return window[n / 2];
    const double lo = window[n / 2 - 1], hi = window[n / 2];
    return static_cast<T>(lo + (hi - lo) / 2.0);
}

/// Centered 3-sample NaN-omitting median; boundary windows clip to 2 samples.
/// NaN samples stay NaN.
inline std::vector<double> median_temporal3(std::span<const double> series)
{
    std::vector<double> out(series.begin(), series.end());
    const auto n = series.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (std::isnan(series[i]))
            continue;
        std::array<double, 3> w{};
        std::size_t k = 0;
        for (std::size_t j = (i == 0 ? 0 : i - 1); j <= std::min(n - 1, i + 1); ++j)
            w[k++] = series[j];
        out[i] = nan_median(std::span<double>(w.data(), k));
    }
    return out;
}

inline PointSet median_denoise(const PointSet& set, MedianMode mode)
{
    switch (mode) {
    case MedianMode::off: return set;
    case MedianMode::spatial3x3:
        throw DataError("spatial3x3 median needs a rasterized stack, not a point set");
    case MedianMode::temporal3: break;
    }
    PointSet out = set;
    for (auto& p : out.points)
        p.values = median_temporal3(p.values);
    return out;
}

/// Spatial 3x3 NaN-omitting median per frame, evaluated only at occupied cells.
inline Stack median_denoise(const Stack& stack, MedianMode mode)
{
    if (mode == MedianMode::off)
        return stack;
    if (mode == MedianMode::temporal3) {
        Stack out = stack;
        std::vector<double> series(stack.frames());
        for (std::size_t r = 0; r < stack.height(); ++r)
            for (std::size_t c = 0; c < stack.width(); ++c) {
                for (std::size_t t = 0; t < stack.frames(); ++t)
                    series[t] = stack(t, r, c);
                auto f = median_temporal3(series);
                for (std::size_t t = 0; t < stack.frames(); ++t)
                    out(t, r, c) = static_cast<float>(f[t]);
            }
        return out;
    }

    Stack out = stack;
    const auto h = stack.height(), w = stack.width();
    std::array<float, 9> win{};
    for (std::size_t t = 0; t < stack.frames(); ++t)
        for (std::size_t r = 0; r < h; ++r)
            for (std::size_t c = 0; c < w; ++c) {
                if (std::isnan(stack(t, r, c)))
                    continue;
                std::size_t k = 0;
                for (std::size_t rr = (r == 0 ? 0 : r - 1); rr <= std::min(h - 1, r + 1); ++rr)
                    for (std::size_t cc = (c == 0 ? 0 : c - 1); cc <= std::min(w - 1, c + 1); ++cc)
                        win[k++] = stack(t, rr, cc);
                out(t, r, c) = nan_median(std::span<float>(win.data(), k));
            }
    return out;
}

}  // namespace insarstack
