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

struct IngestConfig {
    double max_missing_frac = 0.15;
    std::int32_t step_days = 6;

    void validate() const
    {
        if (!(max_missing_frac >= 0.0 && max_missing_frac <= 1.0))
            throw DataError("max_missing_frac must lie in [0, 1]");
        if (step_days < 1)
            throw DataError("step_days must be >= 1");
    }
};

/// NaN fraction over real acquisitions only (inserted grid gaps are not counted).
inline double missing_fraction(const PointSet& set, const PointSeries& p)
{
    std::size_t missing = 0, total = 0;
    if (set.regularized) {
        for (auto s : set.acquisition_slots) {
            ++total;
            missing += std::isnan(p.values[static_cast<std::size_t>(s)]);
        }
    } else {
        for (double v : p.values) {
            ++total;
            missing += std::isnan(v);
        }
    }
    return total == 0 ? 1.0 : static_cast<double>(missing) / static_cast<double>(total);
}

/// Drops points whose missing fraction exceeds cfg.max_missing_frac (boundary kept).
inline PointSet filter_coherence(const PointSet& set, const IngestConfig& cfg)
{
    cfg.validate();
    PointSet out;
    out.grid = set.grid;
    out.acquisition_slots = set.acquisition_slots;
    out.regularized = set.regularized;
    for (const auto& p : set.points)
        if (missing_fraction(set, p) <= cfg.max_missing_frac + 1e-12)
            out.points.push_back(p);
    return out;
}

struct GridAssignment {
    TimeGrid grid;
    std::vector<std::int32_t> acquisition_slots;
};

/// Snaps acquisition dates onto a regular grid starting at the first date.
inline GridAssignment build_time_grid(std::span<const Date> dates, std::int32_t step_days)
{
    if (step_days < 1)
        throw DataError("step_days must be >= 1");
    if (dates.empty())
        throw DataError("no acquisition dates");
    for (std::size_t i = 1; i < dates.size(); ++i)
        if (dates[i] <= dates[i - 1])
            throw DataError("acquisition dates must be strictly increasing");

    GridAssignment out;
    const auto first = dates.front().days;
    const auto span_days = dates.back().days - first;
    out.grid = TimeGrid{dates.front(), step_days, span_days / step_days + 1};
    for (auto d : dates) {
        auto slot = static_cast<std::int32_t>(
            std::lround(static_cast<double>(d.days - first) / static_cast<double>(step_days)));
        slot = std::min(slot, out.grid.num_steps - 1);
        if (!out.acquisition_slots.empty() && slot == out.acquisition_slots.back())
            throw DataError("slot collision: " + d.iso() + " snaps to slot " + std::to_string(slot)
                            + " already taken");
        out.acquisition_slots.push_back(slot);
    }
    return out;
}

/// Places each series onto `grid`; slots without an acquisition become NaN.
inline PointSet regularize(const PointSet& set, const TimeGrid& grid)
{
    grid.validate();
    const auto dates = set.acquisition_dates();
    std::vector<std::int32_t> slots;
    slots.reserve(dates.size());
    for (auto d : dates) {
        const auto offset = d.days - grid.epoch.days;
        auto slot = static_cast<std::int32_t>(
            std::lround(static_cast<double>(offset) / static_cast<double>(grid.step_days)));
        if (slot < 0 || slot >= grid.num_steps)
            throw DataError("acquisition " + d.iso() + " falls outside the time grid");
        if (!slots.empty() && slot <= slots.back())
            throw DataError("slot collision: " + d.iso() + " snaps to slot " + std::to_string(slot)
                            + " already taken");
        slots.push_back(slot);
    }

    const auto in_len = set.series_length();
    const auto in_slots = set.sample_slots();

    PointSet out;
    out.grid = grid;
    out.acquisition_slots = slots;
    out.regularized = true;
    out.points.reserve(set.points.size());
    for (const auto& p : set.points) {
        if (p.values.size() != in_len)
            throw DataError("series length mismatch for point '" + p.id + "': "
                            + std::to_string(p.values.size()) + " values, "
                            + std::to_string(in_len) + " expected");
        PointSeries q{p.id, p.easting, p.northing,
                      std::vector<double>(static_cast<std::size_t>(grid.num_steps),
                                          std::numeric_limits<double>::quiet_NaN())};
        if (set.regularized) {
            // Regularized input keeps samples at its non-acquisition slots too (e.g. after filling).
            for (std::size_t i = 0; i < in_slots.size(); ++i) {
                const auto offset = set.grid.date_of(in_slots[i]).days - grid.epoch.days;
                auto slot = static_cast<std::int32_t>(
                    std::lround(static_cast<double>(offset) / static_cast<double>(grid.step_days)));
                if (slot >= 0 && slot < grid.num_steps)
                    q.values[static_cast<std::size_t>(slot)] = p.values[i];
            }
        } else {
            for (std::size_t i = 0; i < slots.size(); ++i)
                q.values[static_cast<std::size_t>(slots[i])] = p.values[i];
        }
        out.points.push_back(std::move(q));
    }
    return out;
}

/// build_time_grid followed by regularize.
inline PointSet regularize_to_step(const PointSet& set, std::int32_t step_days)
{
    const auto dates = set.acquisition_dates();
    auto assignment = build_time_grid(dates, step_days);
    return regularize(set, assignment.grid);
}

}  // namespace insarstack
