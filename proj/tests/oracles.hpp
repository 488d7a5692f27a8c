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

// Independent reference computations used by the unit and acceptance suites.
// None of these share code paths with the library routines they check.

#include <random>

#include <Eigen/Dense>

#include "insarstack/model.hpp"

namespace insarstack::oracle {

/// Assembles the spring equilibrium equations for every NaN voxel as a dense
/// matrix and solves them directly.
inline std::vector<double> dense_spring_solve(const Stack& in, bool temporal)
{
    const long T = static_cast<long>(in.frames()), H = static_cast<long>(in.height()),
               W = static_cast<long>(in.width());
    auto flat = [&](long t, long r, long c) { return static_cast<std::size_t>((t * H + r) * W + c); };
    std::vector<long> id(in.data.size(), -1);
    long n = 0;
    for (long t = 0; t < T; ++t)
        for (long r = 0; r < H; ++r)
            for (long c = 0; c < W; ++c)
                if (std::isnan(in(t, r, c)))
                    id[flat(t, r, c)] = n++;

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    const int offsets[6][3] = {{0, 0, 1}, {0, 0, -1}, {0, 1, 0}, {0, -1, 0}, {1, 0, 0}, {-1, 0, 0}};
    for (long t = 0; t < T; ++t)
        for (long r = 0; r < H; ++r)
            for (long c = 0; c < W; ++c) {
                const long row = id[flat(t, r, c)];
                if (row < 0)
                    continue;
                for (int k = 0; k < (temporal ? 6 : 4); ++k) {
                    const long tt = t + offsets[k][0], rr = r + offsets[k][1], cc = c + offsets[k][2];
                    if (tt < 0 || tt >= T || rr < 0 || rr >= H || cc < 0 || cc >= W)
                        continue;
                    A(row, row) += 1.0;
                    const long col = id[flat(tt, rr, cc)];
                    if (col >= 0)
                        A(row, col) -= 1.0;
                    else
                        b(row) += in(tt, rr, cc);
                }
            }
    Eigen::VectorXd x = A.fullPivLu().solve(b);
    std::vector<double> out(in.data.values().begin(), in.data.values().end());
    for (std::size_t i = 0; i < id.size(); ++i)
        if (id[i] >= 0)
            out[i] = x(id[i]);
    return out;
}

/// Population variance of every clipped window by explicit enumeration.
inline Volume<double> brute_local_variance(const Stack& s, long wt, long wy, long wx)
{
    const long T = static_cast<long>(s.frames()), H = static_cast<long>(s.height()),
               W = static_cast<long>(s.width());
    Volume<double> out(s.frames(), s.height(), s.width());
    for (long t = 0; t < T; ++t)
        for (long r = 0; r < H; ++r)
            for (long c = 0; c < W; ++c) {
                long double sum = 0, sumsq = 0;
                long n = 0;
                for (long dt = -wt / 2; dt <= wt / 2; ++dt)
                    for (long dy = -wy / 2; dy <= wy / 2; ++dy)
                        for (long dx = -wx / 2; dx <= wx / 2; ++dx) {
                            const long tt = t + dt, rr = r + dy, cc = c + dx;
                            if (tt < 0 || tt >= T || rr < 0 || rr >= H || cc < 0 || cc >= W)
                                continue;
                            const long double v = s(tt, rr, cc);
                            if (std::isnan(static_cast<double>(v)))
                                continue;
                            sum += v;
                            sumsq += v * v;
                            ++n;
                        }
                if (n < 2) {
                    out(t, r, c) = std::numeric_limits<double>::quiet_NaN();
                    continue;
                }
                const long double mean = sum / n;
                out(t, r, c) = static_cast<double>(sumsq / n - mean * mean);
            }
    return out;
}

inline Stack random_sparse_stack(std::uint32_t seed, std::size_t T, std::size_t H, std::size_t W,
                                 double missing_lo, double missing_hi)
{
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> frac(missing_lo, missing_hi), u(0.0, 1.0);
    std::uniform_real_distribution<float> val(-50.0f, 50.0f);
    const double missing = frac(rng);
    Stack s(TimeGrid{Date{0}, 6, static_cast<std::int32_t>(T)}, GeoTransform{0.0, 0.0, 20.0}, H, W);
    for (auto& v : s.data.values())
        v = u(rng) < missing ? kMissing : val(rng);
    if (s.known_count() == 0)
        s.data[0] = val(rng);
    return s;
}

}  // namespace insarstack::oracle
