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
#include <random>

#include <nlohmann/json.hpp>

#include "model.hpp"

namespace insarstack {

/// Axis-aligned planar rectangle, meters.
struct Rect {
    double east_min = 0.0, north_min = 0.0, east_max = 0.0, north_max = 0.0;

    double area() const { return std::max(0.0, east_max - east_min) * std::max(0.0, north_max - north_min); }
    bool contains(double e, double n) const
    {
        return e >= east_min && e < east_max && n >= north_min && n < north_max;
    }
    friend bool operator==(const Rect&, const Rect&) = default;
};

/// Localized ground movement: a Gaussian bump of sigma radius/2 that ramps in
/// linearly from `onset` over `ramp_days` and then holds at `amplitude`.
struct Event {
    double easting = 0.0;
    double northing = 0.0;
    double radius = 100.0;
    Date onset;
    double ramp_days = 30.0;
    double amplitude = -25.0;  // mm, signed

    /// Displacement at planar distance `dist` and calendar day `day`.
    double displacement(double dist, Date day) const
    {
        if (dist > radius)
            return 0.0;
        const double sigma = radius / 2.0;
        const double g = std::exp(-dist * dist / (2.0 * sigma * sigma));
        const double r = std::clamp((day.days - onset.days) / ramp_days, 0.0, 1.0);
        return amplitude * g * r;
    }

    void validate() const
    {
        if (!(radius > 0.0))
            throw DataError("event radius must be positive");
        if (!(ramp_days >= 1.0))
            throw DataError("event ramp_days must be >= 1");
    }

    friend bool operator==(const Event&, const Event&) = default;
};

/// Synthetic persistent-scatterer scene: dense urban block inside sparse rural ground.
struct Scenario {
    double width = 2500.0;   // m, extent starts at (0, 0)
    double height = 2500.0;
    std::int32_t duration_days = 378;
    std::int32_t step_days = 6;
    Date start = Date::parse("2016-01-01");
    double urban_density = 200.0;  // points / km^2
    double rural_density = 5.0;
    Rect urban_region{750.0, 750.0, 1750.0, 1750.0};
    double noise_sigma = 3.0;   // mm
    double spike_prob = 0.05;
    double spike_amp = 30.0;    // mm
    double dropout_prob = 0.05;
    std::vector<Event> events;
    std::uint64_t seed = 0;
    std::vector<std::int32_t> skipped_slots;  // acquisitions that never happened

    void validate() const
    {
        if (!(width > 0.0 && height > 0.0))
            throw DataError("scenario extent must be positive");
        if (duration_days < 0 || step_days < 1)
            throw DataError("scenario duration must be >= 0 and step_days >= 1");
        if (urban_density < 0.0 || rural_density < 0.0)
            throw DataError("scenario densities must be >= 0");
        for (double p : {spike_prob, dropout_prob})
            if (!(p >= 0.0 && p <= 1.0))
                throw DataError("scenario probabilities must lie in [0, 1]");
        if (noise_sigma < 0.0 || spike_amp < 0.0)
            throw DataError("noise_sigma and spike_amp must be >= 0");
        for (const auto& e : events)
            e.validate();
    }

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

struct SyntheticScene {
    PointSet points;
    std::vector<Event> events;
};

namespace detail {

/// Independent generator per (seed, stream); stream 0 places points, stream i+1 drives point i.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t stream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      0x1a5eedu};
    return std::mt19937_64(seq);
}

}  // namespace detail

/// Draws a scene. The result is an unregularized point set shaped exactly as
/// read_points_csv would return it, so CSV handoff is lossless.
inline SyntheticScene generate_scenario(const Scenario& s)
{
    s.validate();

    std::vector<Date> dates;
    for (std::int32_t slot = 0; slot * s.step_days <= s.duration_days; ++slot)
        if (std::find(s.skipped_slots.begin(), s.skipped_slots.end(), slot) == s.skipped_slots.end())
            dates.push_back(Date{s.start.days + slot * s.step_days});
    if (dates.empty())
        throw DataError("scenario has no acquisitions");

    const Rect extent{0.0, 0.0, s.width, s.height};
    Rect urban = s.urban_region;
    urban.east_min = std::clamp(urban.east_min, 0.0, s.width);
    urban.east_max = std::clamp(urban.east_max, 0.0, s.width);
    urban.north_min = std::clamp(urban.north_min, 0.0, s.height);
    urban.north_max = std::clamp(urban.north_max, 0.0, s.height);

    auto place = detail::substream(s.seed, 0);
    std::vector<std::pair<double, double>> coords;
    {
        const double urban_mean = s.urban_density * urban.area() * 1e-6;
        const double rural_mean = s.rural_density * (extent.area() - urban.area()) * 1e-6;
        const auto n_urban = urban_mean > 0.0 ? std::poisson_distribution<long>(urban_mean)(place) : 0L;
        const auto n_rural = rural_mean > 0.0 ? std::poisson_distribution<long>(rural_mean)(place) : 0L;
        std::uniform_real_distribution<double> ue(urban.east_min, urban.east_max);
        std::uniform_real_distribution<double> un(urban.north_min, urban.north_max);
        for (long i = 0; i < n_urban; ++i) {
            const double e = ue(place);
            coords.emplace_back(e, un(place));
        }
        std::uniform_real_distribution<double> re(0.0, s.width), rn(0.0, s.height);
        for (long i = 0; i < n_rural;) {
            const double e = re(place), n = rn(place);
            if (urban.contains(e, n))
                continue;
            coords.emplace_back(e, n);
            ++i;
        }
    }
    if (coords.empty())
        throw DataError("scenario produced zero points");

    SyntheticScene scene;
    scene.events = s.events;
    auto& set = scene.points;
    set.grid = TimeGrid{dates.front(), 1, dates.back().days - dates.front().days + 1};
    for (auto d : dates)
        set.acquisition_slots.push_back(d.days - dates.front().days);

    set.points.reserve(coords.size());
    for (std::size_t i = 0; i < coords.size(); ++i) {
        auto rng = detail::substream(s.seed, i + 1);
        std::normal_distribution<double> noise(0.0, 1.0);
        std::uniform_real_distribution<double> unit(0.0, 1.0);

        char id[24];
        std::snprintf(id, sizeof id, "P%06zu", i + 1);
        PointSeries p{id, coords[i].first, coords[i].second, {}};
        p.values.reserve(dates.size());
        for (auto d : dates) {
            double v = 0.0;
            for (const auto& e : s.events)
                v += e.displacement(std::hypot(p.easting - e.easting, p.northing - e.northing), d);
            // Draw every variate unconditionally so the stream layout is parameter independent.
            const double n = noise(rng), spike_u = unit(rng), sign_u = unit(rng), drop_u = unit(rng);
            v += s.noise_sigma * n;
            if (spike_u < s.spike_prob)
                v += sign_u < 0.5 ? -s.spike_amp : s.spike_amp;
            if (drop_u < s.dropout_prob)
                v = std::numeric_limits<double>::quiet_NaN();
            p.values.push_back(v);
        }
        set.points.push_back(std::move(p));
    }
    return scene;
}

// ---------------------------------------------------------------------------
// JSON

inline void to_json(nlohmann::json& j, const Rect& r)
{
    j = {{"east_min", r.east_min}, {"north_min", r.north_min}, {"east_max", r.east_max}, {"north_max", r.north_max}};
}

inline void from_json(const nlohmann::json& j, Rect& r)
{
    j.at("east_min").get_to(r.east_min);
    j.at("north_min").get_to(r.north_min);
    j.at("east_max").get_to(r.east_max);
    j.at("north_max").get_to(r.north_max);
}

inline void to_json(nlohmann::json& j, const Event& e)
{
    j = {{"easting", e.easting},     {"northing", e.northing},   {"radius", e.radius},
         {"onset", e.onset.iso()},   {"ramp_days", e.ramp_days}, {"amplitude", e.amplitude}};
}

inline void from_json(const nlohmann::json& j, Event& e)
{
    j.at("easting").get_to(e.easting);
    j.at("northing").get_to(e.northing);
    j.at("radius").get_to(e.radius);
    e.onset = Date::parse(j.at("onset").get<std::string>());
    j.at("ramp_days").get_to(e.ramp_days);
    j.at("amplitude").get_to(e.amplitude);
}

inline void to_json(nlohmann::json& j, const Scenario& s)
{
    j = {{"width", s.width},
         {"height", s.height},
         {"duration_days", s.duration_days},
         {"step_days", s.step_days},
         {"start", s.start.iso()},
         {"urban_density", s.urban_density},
         {"rural_density", s.rural_density},
         {"urban_region", s.urban_region},
         {"noise_sigma", s.noise_sigma},
         {"spike_prob", s.spike_prob},
         {"spike_amp", s.spike_amp},
         {"dropout_prob", s.dropout_prob},
         {"events", s.events},
         {"seed", s.seed},
         {"skipped_slots", s.skipped_slots}};
}

/// Missing keys keep their defaults.
inline void from_json(const nlohmann::json& j, Scenario& s)
{
    auto opt = [&](const char* key, auto& field) {
        if (j.contains(key))
            j.at(key).get_to(field);
    };
    opt("width", s.width);
    opt("height", s.height);
    opt("duration_days", s.duration_days);
    opt("step_days", s.step_days);
    if (j.contains("start"))
        s.start = Date::parse(j.at("start").get<std::string>());
    opt("urban_density", s.urban_density);
    opt("rural_density", s.rural_density);
    opt("urban_region", s.urban_region);
    opt("noise_sigma", s.noise_sigma);
    opt("spike_prob", s.spike_prob);
    opt("spike_amp", s.spike_amp);
    opt("dropout_prob", s.dropout_prob);
    opt("events", s.events);
    opt("seed", s.seed);
    opt("skipped_slots", s.skipped_slots);
}

/// Scene used by the regression suite: 2.5 km square with a 1 km urban block
/// and one subsidence event in it.
inline Scenario reference_scenario()
{
    Scenario s;
    Event e;
    e.easting = 1250.0;
    e.northing = 1250.0;
    e.radius = 150.0;
    e.onset = Date{s.start.days + 180};
    e.ramp_days = 30.0;
    e.amplitude = -25.0;
    s.events.push_back(e);
    s.seed = 0;
    return s;
}

}  // namespace insarstack
