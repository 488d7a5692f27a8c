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

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <unordered_set>

#include "model.hpp"

namespace insarstack {

/*
 * DSTK stack file layout (all little-endian):
 *
 *   "DSTK" | u16 version=1 | u16 reserved=0 | u32 T | u32 H | u32 W
 *   | f64 x_origin | f64 y_origin | f64 cell_size
 *   | i32 epoch (days since 1970-01-01) | i32 step_days
 *   | T*H*W f32 payload, t outermost, then row, then column
 */
inline constexpr std::uint16_t kDstkVersion = 1;
inline constexpr std::size_t kDstkHeaderSize = 52;
inline constexpr std::uint32_t kCanonicalNaNBits = 0x7FC00000u;

namespace detail {

template <class T>
void put_le(std::string& out, T value)
{
    using U = std::make_unsigned_t<std::conditional_t<std::is_floating_point_v<T>,
        std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>, T>>;
    U bits = std::bit_cast<U>(value);
    for (std::size_t i = 0; i < sizeof(U); ++i)
        out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

template <class T>
T get_le(const unsigned char* p)
{
    using U = std::make_unsigned_t<std::conditional_t<std::is_floating_point_v<T>,
        std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>, T>>;
    U bits = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i)
        bits |= static_cast<U>(p[i]) << (8 * i);
    return std::bit_cast<T>(bits);
}

inline std::string slurp(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DataError("cannot open '" + path.string() + "' for reading");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void spit(const std::filesystem::path& path, const std::string& bytes)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw DataError("cannot open '" + path.string() + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw DataError("write to '" + path.string() + "' failed");
}

inline std::string format_double(double v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace detail

inline std::string encode_stack(const Stack& stack)
{
    stack.validate();
    const std::uint64_t voxels = static_cast<std::uint64_t>(stack.frames()) * stack.height() * stack.width();
    if (voxels > (std::uint64_t{1} << 31) || stack.frames() > UINT32_MAX || stack.height() > UINT32_MAX
        || stack.width() > UINT32_MAX)
        throw DataError("dimension overflow: stack exceeds 2^31 voxels");

    std::string out;
    out.reserve(kDstkHeaderSize + voxels * 4);
    out.append("DSTK", 4);
    detail::put_le<std::uint16_t>(out, kDstkVersion);
    detail::put_le<std::uint16_t>(out, 0);
    detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(stack.frames()));
    detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(stack.height()));
    detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(stack.width()));
    detail::put_le<double>(out, stack.geo.x_origin);
    detail::put_le<double>(out, stack.geo.y_origin);
    detail::put_le<double>(out, stack.geo.cell_size);
    detail::put_le<std::int32_t>(out, stack.grid.epoch.days);
    detail::put_le<std::int32_t>(out, stack.grid.step_days);
    for (float v : stack.data.values()) {
        if (std::isnan(v))
            detail::put_le<std::uint32_t>(out, kCanonicalNaNBits);
        else
            detail::put_le<float>(out, v);
    }
    return out;
}

inline Stack decode_stack(std::string_view bytes)
{
    auto p = reinterpret_cast<const unsigned char*>(bytes.data());
    if (bytes.size() < 4 || std::memcmp(p, "DSTK", 4) != 0)
        throw DataError("bad magic");
    if (bytes.size() < kDstkHeaderSize)
        throw DataError("truncated header");
    auto version = detail::get_le<std::uint16_t>(p + 4);
    if (version != kDstkVersion)
        throw DataError("unsupported version " + std::to_string(version));
    auto t = detail::get_le<std::uint32_t>(p + 8);
    auto h = detail::get_le<std::uint32_t>(p + 12);
    auto w = detail::get_le<std::uint32_t>(p + 16);
    if (t == 0)
        throw DataError("empty stack");
    if (h == 0 || w == 0)
        throw DataError("stack height and width must be positive");
    const std::uint64_t voxels = std::uint64_t{t} * h * w;
    if (voxels > (std::uint64_t{1} << 31))
        throw DataError("dimension overflow: stack exceeds 2^31 voxels");
    if (bytes.size() < kDstkHeaderSize + voxels * 4)
        throw DataError("truncated payload");

    GeoTransform geo{detail::get_le<double>(p + 20), detail::get_le<double>(p + 28),
                     detail::get_le<double>(p + 36)};
    TimeGrid grid{Date{detail::get_le<std::int32_t>(p + 44)}, detail::get_le<std::int32_t>(p + 48),
                  static_cast<std::int32_t>(t)};
    Stack stack(grid, geo, h, w);
    auto payload = p + kDstkHeaderSize;
    for (std::size_t i = 0; i < voxels; ++i)
        stack.data[i] = detail::get_le<float>(payload + 4 * i);
    stack.validate();
    return stack;
}

inline void write_stack(const Stack& stack, const std::filesystem::path& path)
{
    detail::spit(path, encode_stack(stack));
}

inline Stack read_stack(const std::filesystem::path& path)
{
    return decode_stack(detail::slurp(path));
}

// ---------------------------------------------------------------------------
// Point CSV: id,easting,northing,<YYYY-MM-DD>...

namespace detail {

inline std::vector<std::string_view> split_commas(std::string_view line)
{
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(',', start);
        cells.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return cells;
}

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

inline double parse_cell(std::string_view cell, std::size_t row, std::size_t col, bool allow_missing)
{
    cell = trim(cell);
    if (allow_missing && (cell.empty() || cell == "NaN" || cell == "nan" || cell == "NAN"))
        return std::numeric_limits<double>::quiet_NaN();
    if (!cell.empty() && cell.front() == '+')
        cell.remove_prefix(1);
    double v = 0.0;
    auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (cell.empty() || res.ec != std::errc{} || res.ptr != cell.data() + cell.size()
        || !std::isfinite(v))
        throw DataError("malformed number '" + std::string(cell) + "' at row " + std::to_string(row)
                        + ", column " + std::to_string(col));
    return v;
}

}  // namespace detail

/// Parses a point CSV into an unregularized PointSet.
///
/// The provisional grid has epoch = first date and step_days = 1, so
/// acquisition_slots are day offsets from the first acquisition.
inline PointSet parse_points_csv(std::string_view text)
{
    std::vector<std::string_view> lines;
    {
        std::size_t start = 0;
        while (start <= text.size()) {
            auto pos = text.find('\n', start);
            auto line = text.substr(start, pos == std::string_view::npos ? pos : pos - start);
            if (!detail::trim(line).empty())
                lines.push_back(line);
            if (pos == std::string_view::npos)
                break;
            start = pos + 1;
        }
    }
    if (lines.empty())
        throw DataError("point CSV is empty");

    auto header = detail::split_commas(lines[0]);
    if (header.size() < 4 || detail::trim(header[0]) != "id" || detail::trim(header[1]) != "easting"
        || detail::trim(header[2]) != "northing")
        throw DataError("point CSV header must be 'id,easting,northing,<date>...'");

    std::vector<Date> dates;
    for (std::size_t c = 3; c < header.size(); ++c) {
        dates.push_back(Date::parse(detail::trim(header[c])));
        if (dates.size() > 1 && dates.back() <= dates[dates.size() - 2])
            throw DataError("date columns are not strictly increasing at column " + std::to_string(c + 1));
    }

    PointSet set;
    set.grid = TimeGrid{dates.front(), 1, dates.back().days - dates.front().days + 1};
    for (auto d : dates)
        set.acquisition_slots.push_back(d.days - dates.front().days);

    std::unordered_set<std::string> seen;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        auto cells = detail::split_commas(lines[r]);
        if (cells.size() != header.size())
            throw DataError("row " + std::to_string(r + 1) + " has " + std::to_string(cells.size())
                            + " cells, expected " + std::to_string(header.size()));
        PointSeries p;
        p.id = std::string(detail::trim(cells[0]));
        if (p.id.empty())
            throw DataError("empty id at row " + std::to_string(r + 1));
        if (!seen.insert(p.id).second)
            throw DataError("duplicate id '" + p.id + "' at row " + std::to_string(r + 1));
        p.easting = detail::parse_cell(cells[1], r + 1, 2, false);
        p.northing = detail::parse_cell(cells[2], r + 1, 3, false);
        p.values.reserve(dates.size());
        for (std::size_t c = 3; c < cells.size(); ++c)
            p.values.push_back(detail::parse_cell(cells[c], r + 1, c + 1, true));
        set.points.push_back(std::move(p));
    }
    set.validate();
    return set;
}

inline PointSet read_points_csv(const std::filesystem::path& path)
{
    return parse_points_csv(detail::slurp(path));
}

/// Writes the acquisition columns of an unregularized set, or every grid slot
/// of a regularized one. Missing samples become empty cells.
inline std::string format_points_csv(const PointSet& set)
{
    set.validate();
    const auto slots = set.sample_slots();
    if (slots.empty())
        throw DataError("point set has no dates");

    std::string out = "id,easting,northing";
    for (auto s : slots) {
        out += ',';
        out += set.grid.date_of(s).iso();
    }
    out += '\n';
    for (const auto& p : set.points) {
        if (p.id.find_first_of(",\n\r") != std::string::npos)
            throw DataError("point id '" + p.id + "' contains a separator");
        out += p.id;
        out += ',';
        out += detail::format_double(p.easting);
        out += ',';
        out += detail::format_double(p.northing);
        for (double v : p.values) {
            out += ',';
            if (!std::isnan(v))
                out += detail::format_double(v);
        }
        out += '\n';
    }
    return out;
}

inline void write_points_csv(const PointSet& set, const std::filesystem::path& path)
{
    detail::spit(path, format_points_csv(set));
}

// ---------------------------------------------------------------------------
// Detection exports

inline std::string format_detections_csv(const DetectionMap& map)
{
    std::string out = "t,row,col\n";
    for (std::size_t t = 0; t < map.frames(); ++t)
        for (std::size_t r = 0; r < map.height(); ++r)
            for (std::size_t c = 0; c < map.width(); ++c)
                if (map(t, r, c))
                    out += std::to_string(t) + ',' + std::to_string(r) + ',' + std::to_string(c) + '\n';
    return out;
}

inline void write_detections_csv(const DetectionMap& map, const std::filesystem::path& path)
{
    detail::spit(path, format_detections_csv(map));
}

inline DetectionMap parse_detections_csv(std::string_view text, std::size_t frames, std::size_t height,
                                         std::size_t width)
{
    DetectionMap map(frames, height, width);
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto view = detail::trim(line);
        if (view.empty() || (lineno == 1 && view == "t,row,col"))
            continue;
        auto cells = detail::split_commas(view);
        if (cells.size() != 3)
            throw DataError("detection CSV line " + std::to_string(lineno) + " is not a t,row,col triple");
        std::array<std::size_t, 3> idx{};
        for (std::size_t k = 0; k < 3; ++k) {
            auto cell = detail::trim(cells[k]);
            auto res = std::from_chars(cell.data(), cell.data() + cell.size(), idx[k]);
            if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size())
                throw DataError("detection CSV line " + std::to_string(lineno) + " has a malformed index");
        }
        if (idx[0] >= frames || idx[1] >= height || idx[2] >= width)
            throw DataError("detection CSV line " + std::to_string(lineno) + " is out of range");
        map.set(idx[0], idx[1], idx[2]);
    }
    return map;
}

inline DetectionMap read_detections_csv(const std::filesystem::path& path, std::size_t frames,
                                        std::size_t height, std::size_t width)
{
    return parse_detections_csv(detail::slurp(path), frames, height, width);
}

/// Binary PGM (P5, maxval 255) of one frame; 255 marks a detection.
inline std::string format_detection_pgm(const DetectionMap& map, std::size_t frame)
{
    std::string out = "P5\n" + std::to_string(map.width()) + ' ' + std::to_string(map.height()) + "\n255\n";
    for (std::size_t r = 0; r < map.height(); ++r)
        for (std::size_t c = 0; c < map.width(); ++c)
            out.push_back(static_cast<char>(map(frame, r, c) ? 255 : 0));
    return out;
}

inline void write_detection_pgms(const DetectionMap& map, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    for (std::size_t t = 0; t < map.frames(); ++t) {
        char name[32];
        std::snprintf(name, sizeof name, "frame_%04zu.pgm", t);
        detail::spit(dir / name, format_detection_pgm(map, t));
    }
}

}  // namespace insarstack
