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
#include <utility>

#include "model.hpp"

namespace insarstack {

inline constexpr double kDefaultCellSize = 20.0;

struct Cell {
    std::size_t row = 0;
    std::size_t col = 0;
    friend bool operator==(const Cell&, const Cell&) = default;
};

/// Grid cell containing a planar coordinate. The far (south/east) outer edge
/// belongs to the last row/column.
inline Cell cell_of(double easting, double northing, const GeoTransform& geo, std::size_t height,
                    std::size_t width)
{
    const double fc = std::floor((easting - geo.x_origin) / geo.cell_size);
    const double fr = std::floor((geo.y_origin - northing) / geo.cell_size);
    const auto h = static_cast<double>(height), w = static_cast<double>(width);
    const bool on_far_col = fc == w && easting == geo.x_origin + w * geo.cell_size;
    const bool on_far_row = fr == h && northing == geo.y_origin - h * geo.cell_size;
    if (!std::isfinite(fc) || !std::isfinite(fr) || fc < 0 || fr < 0 || (fc >= w && !on_far_col)
        || (fr >= h && !on_far_row))
        throw DataError("coordinate (" + std::to_string(easting) + ", " + std::to_string(northing)
                        + ") lies outside the grid");
    return Cell{on_far_row ? height - 1 : static_cast<std::size_t>(fr),
                on_far_col ? width - 1 : static_cast<std::size_t>(fc)};
}

inline Cell cell_of(double easting, double northing, const Stack& stack)
{
    return cell_of(easting, northing, stack.geo, stack.height(), stack.width());
}

/// Grid geometry covering the points' bounding box padded by one cell.
struct RasterGeometry {
    GeoTransform geo;
    std::size_t height = 0;
    std::size_t width = 0;
};

inline RasterGeometry raster_geometry(const PointSet& set, double cell_size)
{
    if (!(cell_size > 0.0))
        throw DataError("cell_size must be positive");
    if (set.points.empty())
        throw DataError("cannot rasterize an empty point set");
    double emin = set.points.front().easting, emax = emin;
    double nmin = set.points.front().northing, nmax = nmin;
    for (const auto& p : set.points) {
        emin = std::min(emin, p.easting);
        emax = std::max(emax, p.easting);
        nmin = std::min(nmin, p.northing);
        nmax = std::max(nmax, p.northing);
    }
    RasterGeometry g;
    g.geo = GeoTransform{emin - cell_size, nmax + cell_size, cell_size};
    // Padded extent is span + 2 cells; one more column absorbs floor() at the east edge.
    g.width = static_cast<std::size_t>(std::floor((emax - emin) / cell_size)) + 3;
    g.height = static_cast<std::size_t>(std::floor((nmax - nmin) / cell_size)) + 3;
    return g;
}

/// Projects a regularized point set into a sparse stack. Each voxel holds the
/// mean of the finite samples of the points in that cell, NaN if there are none.
inline Stack rasterize(const PointSet& set, double cell_size = kDefaultCellSize)
{
    if (!set.regularized)
        throw DataError("rasterize needs a regularized point set");
    set.validate();
    const auto geom = raster_geometry(set, cell_size);
    const auto frames = static_cast<std::size_t>(set.grid.num_steps);

    Volume<double> sum(frames, geom.height, geom.width, 0.0);
    Volume<std::uint32_t> count(frames, geom.height, geom.width, 0);
    for (const auto& p : set.points) {
        const auto cell = cell_of(p.easting, p.northing, geom.geo, geom.height, geom.width);
        for (std::size_t t = 0; t < frames; ++t) {
            const double v = p.values[t];
            if (std::isnan(v))
                continue;
            sum(t, cell.row, cell.col) += v;
            ++count(t, cell.row, cell.col);
        }
    }

    Stack stack(set.grid, geom.geo, geom.height, geom.width);
    for (std::size_t i = 0; i < stack.data.size(); ++i)
        if (count[i] > 0)
            stack.data[i] = static_cast<float>(sum[i] / count[i]);
    return stack;
}

}  // namespace insarstack
