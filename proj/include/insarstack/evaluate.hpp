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

#include <nlohmann/json.hpp>

#include "raster.hpp"
#include "synth.hpp"

namespace insarstack {

struct EventFootprint {
    std::vector<Cell> cells;
    std::int32_t onset_slot = 0;
    std::int32_t midpoint_slot = 0;  // slot nearest to onset + ramp_days / 2
};

/// Ground truth rasterized onto a concrete stack geometry.
struct EventTruth {
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<EventFootprint> events;
};

/// Footprint = cells whose centres lie within the event radius; an event
/// smaller than a cell still claims the cell containing its centre.
inline EventTruth make_truth(const std::vector<Event>& events, const GeoTransform& geo, std::size_t height,
                             std::size_t width, const TimeGrid& grid)
{
    EventTruth truth{height, width, {}};
    for (const auto& e : events) {
        EventFootprint fp;
        for (std::size_t r = 0; r < height; ++r)
            for (std::size_t c = 0; c < width; ++c) {
                const double ce = geo.x_origin + (static_cast<double>(c) + 0.5) * geo.cell_size;
                const double cn = geo.y_origin - (static_cast<double>(r) + 0.5) * geo.cell_size;
                if (std::hypot(ce - e.easting, cn - e.northing) <= e.radius)
                    fp.cells.push_back({r, c});
            }
        if (fp.cells.empty()) {
            try {
                fp.cells.push_back(cell_of(e.easting, e.northing, geo, height, width));
            } catch (const DataError&) {
                // event entirely outside the raster: no cells
            }
        }
        const double step = grid.step_days;
        const auto last = grid.num_steps - 1;
        fp.onset_slot = std::clamp(
            static_cast<std::int32_t>(std::ceil((e.onset.days - grid.epoch.days) / step)), 0, last);
        fp.midpoint_slot = std::clamp(
            static_cast<std::int32_t>(std::lround((e.onset.days + e.ramp_days / 2.0 - grid.epoch.days) / step)),
            0, last);
        truth.events.push_back(std::move(fp));
    }
    return truth;
}

inline EventTruth make_truth(const std::vector<Event>& events, const Stack& geometry)
{
    return make_truth(events, geometry.geo, geometry.height(), geometry.width(), geometry.grid);
}

struct EventResult {
    bool recalled = false;
    std::vector<std::int32_t> hit_slots;      // frames recalled within the temporal window
    std::vector<std::int32_t> any_hit_slots;  // frames with a nearby detection at any time
};

struct Metrics {
    std::size_t detections = 0;
    std::size_t true_detections = 0;
    bool zero_detections = true;
    double precision = 1.0;
    double recall = 1.0;
    double background_fp_fraction = 0.0;
    std::vector<EventResult> events;
};

/// Scores detections against truth. A detection is near an event when it lies
/// within `spatial_tol` cells (Chebyshev) of its footprint and, for multi-frame
/// maps, within [onset_slot, onset_slot + temporal_tol].
inline Metrics evaluate(const DetectionMap& det, const EventTruth& truth, std::size_t spatial_tol,
                        std::size_t temporal_tol)
{
    const auto H = det.height(), W = det.width(), T = det.frames();
    if (H != truth.height || W != truth.width)
        throw DataError("detection map shape does not match the truth geometry");
    const bool timed = T > 1;

    // Per-event spatial neighbourhood masks.
    std::vector<Volume<std::uint8_t>> near;
    Volume<std::uint8_t> any_near(1, H, W, 0);
    for (const auto& ev : truth.events) {
        Volume<std::uint8_t> mask(1, H, W, 0);
        for (const auto& cell : ev.cells) {
            const auto r0 = cell.row > spatial_tol ? cell.row - spatial_tol : 0;
            const auto c0 = cell.col > spatial_tol ? cell.col - spatial_tol : 0;
            for (auto r = r0; r <= std::min(H - 1, cell.row + spatial_tol); ++r)
                for (auto c = c0; c <= std::min(W - 1, cell.col + spatial_tol); ++c) {
                    mask(0, r, c) = 1;
                    any_near(0, r, c) = 1;
                }
        }
        near.push_back(std::move(mask));
    }

    auto in_window = [&](const EventFootprint& ev, std::size_t t) {
        if (!timed)
            return true;
        const auto onset = static_cast<std::size_t>(ev.onset_slot);
        return t >= onset && t <= onset + temporal_tol;
    };

    Metrics m;
    m.events.resize(truth.events.size());
    std::vector<std::uint8_t> background_hit(H * W, 0);
    for (std::size_t t = 0; t < T; ++t) {
        std::vector<std::uint8_t> frame_hit(truth.events.size(), 0), frame_any(truth.events.size(), 0);
        for (std::size_t r = 0; r < H; ++r)
            for (std::size_t c = 0; c < W; ++c) {
                if (!det(t, r, c))
                    continue;
                ++m.detections;
                bool matched = false;
                for (std::size_t k = 0; k < truth.events.size(); ++k) {
                    if (!near[k](0, r, c))
                        continue;
                    frame_any[k] = 1;
                    if (in_window(truth.events[k], t)) {
                        frame_hit[k] = 1;
                        matched = true;
                    }
                }
                m.true_detections += matched;
                if (!any_near(0, r, c))
                    background_hit[r * W + c] = 1;
            }
        for (std::size_t k = 0; k < truth.events.size(); ++k) {
            if (frame_hit[k])
                m.events[k].hit_slots.push_back(static_cast<std::int32_t>(t));
            if (frame_any[k])
                m.events[k].any_hit_slots.push_back(static_cast<std::int32_t>(t));
        }
    }

    std::size_t recalled = 0;
    for (auto& e : m.events) {
        e.recalled = !e.hit_slots.empty();
        recalled += e.recalled;
    }
    m.zero_detections = m.detections == 0;
    m.precision = m.detections == 0 ? 1.0 : static_cast<double>(m.true_detections) / m.detections;
    m.recall = truth.events.empty() ? 1.0 : static_cast<double>(recalled) / truth.events.size();

    std::size_t background_cells = 0, background_fp = 0;
    for (std::size_t i = 0; i < H * W; ++i)
        if (!any_near[i]) {
            ++background_cells;
            background_fp += background_hit[i];
        }
    m.background_fp_fraction =
        background_cells == 0 ? 0.0 : static_cast<double>(background_fp) / background_cells;
    return m;
}

inline void to_json(nlohmann::json& j, const EventResult& e)
{
    j = {{"recalled", e.recalled}, {"hit_slots", e.hit_slots}, {"any_hit_slots", e.any_hit_slots}};
}

inline void to_json(nlohmann::json& j, const Metrics& m)
{
    j = {{"detections", m.detections},
         {"true_detections", m.true_detections},
         {"zero_detections", m.zero_detections},
         {"precision", m.precision},
         {"recall", m.recall},
         {"background_fp_fraction", m.background_fp_fraction},
         {"events", m.events}};
}

}  // namespace insarstack
