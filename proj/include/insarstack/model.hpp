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

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace insarstack {

/// Bad input data or a violated stage contract.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An external inpainting backend failed.
class BackendError : public std::runtime_error {
public:
    BackendError(const std::string& what, int exit_code = -1, std::string stderr_text = {})
        : std::runtime_error(what), exit_code_(exit_code), stderr_(std::move(stderr_text)) {}

    int exit_code() const noexcept { return exit_code_; }
    const std::string& stderr_text() const noexcept { return stderr_; }

private:
    int exit_code_;
    std::string stderr_;
};

inline constexpr float kMissing = std::numeric_limits<float>::quiet_NaN();

/// Calendar day (UTC), stored as days since 1970-01-01.
struct Date {
    std::int32_t days = 0;

    friend constexpr auto operator<=>(const Date&, const Date&) = default;

    static Date parse(std::string_view iso)
    {
        // YYYY-MM-DD
        auto digits = [&](std::size_t pos, std::size_t n) {
            int v = 0;
            for (std::size_t i = pos; i < pos + n; ++i) {
                char c = iso[i];
                if (c < '0' || c > '9')
                    throw DataError("malformed date '" + std::string(iso) + "'");
                v = v * 10 + (c - '0');
            }
            return v;
        };
        if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-')
            throw DataError("malformed date '" + std::string(iso) + "'");
        using namespace std::chrono;
        year_month_day ymd{year{digits(0, 4)}, month{static_cast<unsigned>(digits(5, 2))},
                           day{static_cast<unsigned>(digits(8, 2))}};
        if (!ymd.ok())
            throw DataError("invalid calendar date '" + std::string(iso) + "'");
        return Date{static_cast<std::int32_t>(sys_days{ymd}.time_since_epoch().count())};
    }

    std::string iso() const
    {
        using namespace std::chrono;
        year_month_day ymd{sys_days{std::chrono::days{days}}};
        char buf[16];
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                      static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
        return buf;
    }
};

/// Regular temporal axis: slot t is the date epoch + t * step_days.
struct TimeGrid {
    Date epoch;
    std::int32_t step_days = 6;
    std::int32_t num_steps = 1;

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

    void validate() const
    {
        if (step_days < 1)
            throw DataError("time grid step_days must be >= 1");
        if (num_steps < 1)
            throw DataError("time grid num_steps must be >= 1");
    }

    Date date_of(std::int32_t slot) const { return Date{epoch.days + slot * step_days}; }
};

struct PointSeries {
    std::string id;
    double easting = 0.0;
    double northing = 0.0;
    std::vector<double> values;  // mm LOS, NaN = missing

    friend bool operator==(const PointSeries& a, const PointSeries& b)
    {
        if (a.id != b.id || a.easting != b.easting || a.northing != b.northing
            || a.values.size() != b.values.size())
            return false;
        for (std::size_t i = 0; i < a.values.size(); ++i) {
            bool na = std::isnan(a.values[i]), nb = std::isnan(b.values[i]);
            if (na != nb || (!na && a.values[i] != b.values[i]))
                return false;
        }
        return true;
    }
};

inline constexpr double kDisplacementBound = 1e4;

/// A set of point series sharing one time axis.
///
/// Unregularized sets (as read from CSV) hold one value per acquisition, in
/// acquisition_slots order. Regularized sets hold num_steps values per point
/// and every slot outside acquisition_slots is NaN.
struct PointSet {
    TimeGrid grid;
    std::vector<std::int32_t> acquisition_slots;
    std::vector<PointSeries> points;
    bool regularized = false;

    friend bool operator==(const PointSet&, const PointSet&) = default;

    std::size_t series_length() const
    {
        return regularized ? static_cast<std::size_t>(grid.num_steps) : acquisition_slots.size();
    }

    /// Slot position of each stored sample, used for distance-aware interpolation.
    std::vector<std::int32_t> sample_slots() const
    {
        if (!regularized)
            return acquisition_slots;
        std::vector<std::int32_t> s(static_cast<std::size_t>(grid.num_steps));
        for (std::size_t i = 0; i < s.size(); ++i)
            s[i] = static_cast<std::int32_t>(i);
        return s;
    }

    std::vector<Date> acquisition_dates() const
    {
        std::vector<Date> out;
        out.reserve(acquisition_slots.size());
        for (auto s : acquisition_slots)
            out.push_back(grid.date_of(s));
        return out;
    }

    void validate() const
    {
        grid.validate();
        for (std::size_t i = 0; i < acquisition_slots.size(); ++i) {
            auto s = acquisition_slots[i];
            if (s < 0 || s >= grid.num_steps)
                throw DataError("acquisition slot out of range");
            if (i > 0 && s <= acquisition_slots[i - 1])
                throw DataError("acquisition slots must be strictly increasing");
        }
        const auto n = series_length();
        for (const auto& p : points) {
            if (p.values.size() != n)
                throw DataError("point '" + p.id + "' has " + std::to_string(p.values.size())
                                + " samples, expected " + std::to_string(n));
            for (double v : p.values)
                if (std::isfinite(v) && std::abs(v) > kDisplacementBound)
                    throw DataError("point '" + p.id + "' has displacement outside sanity bound");
        }
    }
};

/// Dense 3D array, t outermost, then row, then column.
template <class T>
class Volume {
public:
    Volume() = default;
    Volume(std::size_t frames, std::size_t rows, std::size_t cols, T fill = T{})
        : frames_(frames), rows_(rows), cols_(cols), data_(frames * rows * cols, fill)
    {
    }

    std::size_t frames() const noexcept { return frames_; }
    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    std::size_t frame_size() const noexcept { return rows_ * cols_; }

    std::size_t index(std::size_t t, std::size_t r, std::size_t c) const noexcept
    {
        return (t * rows_ + r) * cols_ + c;
    }

    T& operator()(std::size_t t, std::size_t r, std::size_t c) { return data_[index(t, r, c)]; }
    const T& operator()(std::size_t t, std::size_t r, std::size_t c) const
    {
        return data_[index(t, r, c)];
    }
    T& operator[](std::size_t i) { return data_[i]; }
    const T& operator[](std::size_t i) const { return data_[i]; }

    std::span<T> values() noexcept { return data_; }
    std::span<const T> values() const noexcept { return data_; }
    std::span<T> frame(std::size_t t) { return std::span<T>(data_).subspan(t * frame_size(), frame_size()); }
    std::span<const T> frame(std::size_t t) const
    {
        return std::span<const T>(data_).subspan(t * frame_size(), frame_size());
    }

    bool same_shape(const Volume& o) const noexcept
    {
        return frames_ == o.frames_ && rows_ == o.rows_ && cols_ == o.cols_;
    }

    friend bool operator==(const Volume&, const Volume&) = default;

private:
    std::size_t frames_ = 0, rows_ = 0, cols_ = 0;
    std::vector<T> data_;
};

/// Planar georeferencing of the north-west grid corner.
struct GeoTransform {
    double x_origin = 0.0;
    double y_origin = 0.0;
    double cell_size = 1.0;

    friend bool operator==(const GeoTransform&, const GeoTransform&) = default;
};

/// T x H x W displacement stack; NaN marks a missing voxel.
struct Stack {
    TimeGrid grid;
    GeoTransform geo;
    Volume<float> data;

    Stack() = default;
    Stack(TimeGrid g, GeoTransform gt, std::size_t height, std::size_t width, float fill = kMissing)
        : grid(g), geo(gt), data(static_cast<std::size_t>(g.num_steps), height, width, fill)
    {
    }

    std::size_t frames() const noexcept { return data.frames(); }
    std::size_t height() const noexcept { return data.rows(); }
    std::size_t width() const noexcept { return data.cols(); }

    float& operator()(std::size_t t, std::size_t r, std::size_t c) { return data(t, r, c); }
    float operator()(std::size_t t, std::size_t r, std::size_t c) const { return data(t, r, c); }

    bool dense() const
    {
        for (float v : data.values())
            if (std::isnan(v))
                return false;
        return true;
    }

    std::size_t known_count() const
    {
        std::size_t n = 0;
        for (float v : data.values())
            n += !std::isnan(v);
        return n;
    }

    bool same_layout(const Stack& o) const
    {
        return grid == o.grid && geo == o.geo && data.same_shape(o.data);
    }

    void validate() const
    {
        if (frames() == 0)
            throw DataError("empty stack");
        if (height() == 0 || width() == 0)
            throw DataError("stack height and width must be positive");
        grid.validate();
        if (static_cast<std::size_t>(grid.num_steps) != frames())
            throw DataError("stack frame count does not match its time grid");
        if (!(geo.cell_size > 0.0))
            throw DataError("stack cell_size must be positive");
    }

    /// Bitwise equality, NaN == NaN.
    friend bool operator==(const Stack& a, const Stack& b)
    {
        if (!a.same_layout(b))
            return false;
        for (std::size_t i = 0; i < a.data.size(); ++i) {
            float x = a.data[i], y = b.data[i];
            if (std::isnan(x) != std::isnan(y) || (!std::isnan(x) && x != y))
                return false;
        }
        return true;
    }
};

/// Boolean detection mask with 1 frame (global) or T frames (local).
struct DetectionMap {
    Volume<std::uint8_t> bits;

    DetectionMap() = default;
    DetectionMap(std::size_t frames, std::size_t height, std::size_t width)
        : bits(frames, height, width, 0)
    {
    }

    std::size_t frames() const noexcept { return bits.frames(); }
    std::size_t height() const noexcept { return bits.rows(); }
    std::size_t width() const noexcept { return bits.cols(); }
    bool operator()(std::size_t t, std::size_t r, std::size_t c) const { return bits(t, r, c) != 0; }
    void set(std::size_t t, std::size_t r, std::size_t c, bool v = true) { bits(t, r, c) = v ? 1 : 0; }

    std::size_t count() const
    {
        std::size_t n = 0;
        for (auto b : bits.values())
            n += b != 0;
        return n;
    }

    friend bool operator==(const DetectionMap&, const DetectionMap&) = default;
};

}  // namespace insarstack
