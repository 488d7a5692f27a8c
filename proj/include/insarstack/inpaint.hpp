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
#include <cmath>

#include "model.hpp"

namespace insarstack {

enum class Connectivity { spatial4, spatiotemporal6 };

inline Connectivity parse_connectivity(std::string_view s)
{
    if (s == "spatial4")
        return Connectivity::spatial4;
    if (s == "spatiotemporal6")
        return Connectivity::spatiotemporal6;
    throw DataError("unknown connectivity '" + std::string(s) + "'");
}

inline std::string_view to_string(Connectivity c)
{
    return c == Connectivity::spatial4 ? "spatial4" : "spatiotemporal6";
}

struct SpringConfig {
    Connectivity connectivity = Connectivity::spatiotemporal6;
    double rel_tol = 1e-8;
    /// 0 selects 10 * (H + W + T), capped at 50000.
    std::size_t max_iter = 0;

    std::size_t iteration_limit(const Stack& s) const
    {
        if (max_iter > 0)
            return max_iter;
        return std::min<std::size_t>(10 * (s.height() + s.width() + s.frames()), 50000);
    }

    void validate() const
    {
        if (!(rel_tol > 0.0))
            throw DataError("rel_tol must be positive");
    }
};

class SolverError : public DataError {
public:
    SolverError(const std::string& what, std::size_t iterations, double residual)
        : DataError(what), iterations_(iterations), residual_(residual) {}
    std::size_t iterations() const noexcept { return iterations_; }
    double residual() const noexcept { return residual_; }

private:
    std::size_t iterations_;
    double residual_;
};

struct SpringResult {
    Stack stack;
    std::vector<double> solution;  // full-precision voxel values, same layout as stack.data
    std::size_t iterations = 0;
    double relative_residual = 0.0;
};

namespace detail {

/// Reduced Laplacian over the unknown voxels, stored as a fixed-width stencil.
struct SpringSystem {
    static constexpr std::size_t kMaxNeighbors = 6;
    std::vector<std::size_t> voxel;                           // unknown -> flat voxel index
    std::vector<std::array<std::int64_t, kMaxNeighbors>> nbr; // unknown neighbours, -1 padded
    std::vector<double> degree;                               // in-grid neighbour count
    std::vector<double> rhs;                                  // sum of known neighbour values

    void apply(std::span<const double> x, std::span<double> y) const
    {
        for (std::size_t i = 0; i < voxel.size(); ++i) {
            double acc = degree[i] * x[i];
            for (auto j : nbr[i]) {
                if (j < 0)
                    break;
                acc -= x[static_cast<std::size_t>(j)];
            }
            y[i] = acc;
        }
    }
};

inline double dot(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

inline SpringSystem build_spring_system(const Stack& stack, Connectivity conn)
{
    const auto T = stack.frames(), H = stack.height(), W = stack.width();
    const auto& data = stack.data;

    SpringSystem sys;
    std::vector<std::int64_t> unknown_index(data.size(), -1);
    for (std::size_t i = 0; i < data.size(); ++i)
        if (std::isnan(data[i])) {
            unknown_index[i] = static_cast<std::int64_t>(sys.voxel.size());
            sys.voxel.push_back(i);
        }

    const auto n = sys.voxel.size();
    sys.nbr.assign(n, {});
    sys.degree.assign(n, 0.0);
    sys.rhs.assign(n, 0.0);
    for (std::size_t u = 0; u < n; ++u) {
        const auto flat = sys.voxel[u];
        const auto t = flat / (H * W), r = (flat / W) % H, c = flat % W;
        std::array<std::size_t, SpringSystem::kMaxNeighbors> cand{};
        std::size_t k = 0;
        if (c > 0) cand[k++] = flat - 1;
        if (c + 1 < W) cand[k++] = flat + 1;
        if (r > 0) cand[k++] = flat - W;
        if (r + 1 < H) cand[k++] = flat + W;
        if (conn == Connectivity::spatiotemporal6) {
            if (t > 0) cand[k++] = flat - H * W;
            if (t + 1 < T) cand[k++] = flat + H * W;
        }
        auto& row = sys.nbr[u];
        row.fill(-1);
        std::size_t m = 0;
        for (std::size_t q = 0; q < k; ++q) {
            const auto j = unknown_index[cand[q]];
            if (j >= 0)
                row[m++] = j;
            else
                sys.rhs[u] += data[cand[q]];
        }
        sys.degree[u] = static_cast<double>(k);
    }
    return sys;
}

}  // namespace detail

/// Spring-model inpainting: every unknown voxel is driven to the mean of its
/// in-grid neighbours while known voxels stay fixed. Solves the reduced
/// graph-Laplacian system with Jacobi-preconditioned conjugate gradients
/// from a zero initial guess.
inline SpringResult inpaint_spring_detailed(const Stack& stack, const SpringConfig& cfg = {})
{
    stack.validate();
    cfg.validate();
    const auto T = stack.frames();

    if (stack.known_count() == 0)
        throw DataError("cannot inpaint an all-NaN stack");
    if (cfg.connectivity == Connectivity::spatial4) {
        for (std::size_t t = 0; t < T; ++t) {
            auto f = stack.data.frame(t);
            if (std::all_of(f.begin(), f.end(), [](float v) { return std::isnan(v); }))
                throw DataError("frame " + std::to_string(t)
                                + " has no known voxels; spatial4 inpainting is undetermined");
        }
    }

    SpringResult result{stack, std::vector<double>(stack.data.values().begin(), stack.data.values().end()), 0, 0.0};
    auto sys = detail::build_spring_system(stack, cfg.connectivity);
    const auto n = sys.voxel.size();
    if (n == 0)
        return result;

    std::vector<double> x(n, 0.0), r = sys.rhs, z(n), p(n), q(n);
    const double bnorm = std::sqrt(detail::dot(r, r));
    double rnorm = bnorm;
    if (bnorm > 0.0) {
        const auto limit = cfg.iteration_limit(stack);
        for (std::size_t i = 0; i < n; ++i)
            z[i] = r[i] / sys.degree[i];
        p = z;
        double rz = detail::dot(r, z);
        std::size_t it = 0;
        while (rnorm > cfg.rel_tol * bnorm) {
            if (it == limit)
                throw SolverError("spring solver did not converge in " + std::to_string(limit)
                                      + " iterations (relative residual "
                                      + std::to_string(rnorm / bnorm) + ")",
                                  it, rnorm / bnorm);
            sys.apply(p, q);
            const double alpha = rz / detail::dot(p, q);
            for (std::size_t i = 0; i < n; ++i) {
                x[i] += alpha * p[i];
                r[i] -= alpha * q[i];
            }
            for (std::size_t i = 0; i < n; ++i)
                z[i] = r[i] / sys.degree[i];
            const double rz_next = detail::dot(r, z);
            const double beta = rz_next / rz;
            rz = rz_next;
            for (std::size_t i = 0; i < n; ++i)
                p[i] = z[i] + beta * p[i];
            rnorm = std::sqrt(detail::dot(r, r));
            ++it;
        }
        result.iterations = it;
        result.relative_residual = rnorm / bnorm;
    }

    for (std::size_t u = 0; u < n; ++u) {
        result.solution[sys.voxel[u]] = x[u];
        result.stack.data[sys.voxel[u]] = static_cast<float>(x[u]);
    }
    return result;
}

inline Stack inpaint_spring(const Stack& stack, const SpringConfig& cfg = {})
{
    return inpaint_spring_detailed(stack, cfg).stack;
}

}  // namespace insarstack
