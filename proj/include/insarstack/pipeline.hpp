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

// File-to-file pipeline stages. Every stage reads and writes the on-disk
// formats only, so `run_pipeline` is exactly the composition of the
// individual stages.

#include <cstdio>
#include <filesystem>
#include <optional>

#include <nlohmann/json.hpp>

#include "backend.hpp"
#include "detect.hpp"
#include "evaluate.hpp"
#include "ingest.hpp"
#include "inpaint.hpp"
#include "io.hpp"
#include "preprocess.hpp"
#include "raster.hpp"
#include "synth.hpp"

namespace insarstack {

inline constexpr const char* kVersion = "0.1.0";

enum class InpaintMethod { spring, external };

inline InpaintMethod parse_inpaint_method(std::string_view s)
{
    if (s == "spring")
        return InpaintMethod::spring;
    if (s == "external")
        return InpaintMethod::external;
    throw DataError("unknown inpaint method '" + std::string(s) + "'");
}

struct EvalConfig {
    std::size_t spatial_tol = 2;
    std::size_t temporal_tol = 10;
};

struct PipelineConfig {
    Scenario scenario;
    IngestConfig ingest;
    MedianMode median = MedianMode::temporal3;
    double cell_size = kDefaultCellSize;
    InpaintMethod inpaint_method = InpaintMethod::spring;
    SpringConfig spring;
    BackendSpec backend;
    DetectorConfig detect;
    EvalConfig eval;
};

/// Reads a pipeline config. Sections: scenario, ingest, preprocess, raster,
/// inpaint, detect, eval; all optional.
inline PipelineConfig parse_pipeline_config(const nlohmann::json& j)
{
    PipelineConfig cfg;
    try {
        if (j.contains("scenario"))
            j.at("scenario").get_to(cfg.scenario);
        if (auto it = j.find("ingest"); it != j.end()) {
            cfg.ingest.max_missing_frac = it->value("max_missing_frac", cfg.ingest.max_missing_frac);
            cfg.ingest.step_days = it->value("step_days", cfg.ingest.step_days);
        }
        if (auto it = j.find("preprocess"); it != j.end())
            cfg.median = parse_median_mode(it->value("median", std::string(to_string(cfg.median))));
        if (auto it = j.find("raster"); it != j.end())
            cfg.cell_size = it->value("cell_size", cfg.cell_size);
        if (auto it = j.find("inpaint"); it != j.end()) {
            cfg.inpaint_method = parse_inpaint_method(it->value("method", std::string("spring")));
            cfg.spring.connectivity =
                parse_connectivity(it->value("connectivity", std::string(to_string(cfg.spring.connectivity))));
            cfg.spring.rel_tol = it->value("rel_tol", cfg.spring.rel_tol);
            cfg.spring.max_iter = it->value("max_iter", cfg.spring.max_iter);
            cfg.backend.command = it->value("backend", std::string());
            cfg.backend.config = it->value("backend_config", std::string());
        }
        if (auto it = j.find("detect"); it != j.end()) {
            cfg.detect.mode = parse_detector_mode(it->value("mode", std::string("global")));
            cfg.detect.threshold = it->value("threshold", cfg.detect.threshold);
            if (it->contains("window")) {
                auto w = it->at("window").get<std::vector<std::size_t>>();
                if (w.size() != 3)
                    throw DataError("detect.window must have three entries (t, y, x)");
                cfg.detect.window = {w[0], w[1], w[2]};
            }
            cfg.detect.dilate_radius = it->value("dilate", cfg.detect.dilate_radius);
        }
        if (auto it = j.find("eval"); it != j.end()) {
            cfg.eval.spatial_tol = it->value("spatial_tol", cfg.eval.spatial_tol);
            cfg.eval.temporal_tol = it->value("temporal_tol", cfg.eval.temporal_tol);
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("invalid pipeline config: ") + e.what());
    }
    cfg.ingest.validate();
    cfg.detect.validate();
    cfg.spring.validate();
    cfg.scenario.validate();
    return cfg;
}

inline nlohmann::json read_json_file(const std::filesystem::path& path)
{
    try {
        return nlohmann::json::parse(detail::slurp(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError("cannot parse JSON '" + path.string() + "': " + e.what());
    }
}

inline void write_json_file(const nlohmann::json& j, const std::filesystem::path& path)
{
    detail::spit(path, j.dump(2) + "\n");
}

/// 64-bit FNV-1a, hex encoded.
inline std::string fnv1a_hex(std::string_view bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline nlohmann::json provenance(const nlohmann::json& config)
{
    nlohmann::json stages;
    for (auto s : {"synth", "ingest", "preprocess", "rasterize", "inpaint", "detect", "eval"})
        stages[s] = kVersion;
    std::optional<std::uint64_t> seed;
    if (config.contains("scenario") && config["scenario"].contains("seed"))
        seed = config["scenario"]["seed"].get<std::uint64_t>();
    return {{"config_hash", fnv1a_hex(config.dump())},
            {"seed", seed ? nlohmann::json(*seed) : nlohmann::json(nullptr)},
            {"stage_versions", stages}};
}

// ---------------------------------------------------------------------------
// Stages

inline void stage_synth(const Scenario& scenario, const std::filesystem::path& points_csv,
                        const std::filesystem::path& truth_json)
{
    auto scene = generate_scenario(scenario);
    write_points_csv(scene.points, points_csv);
    write_json_file({{"events", scene.events}}, truth_json);
}

inline void stage_ingest(const std::filesystem::path& in, const std::filesystem::path& out,
                         const IngestConfig& cfg)
{
    cfg.validate();
    auto raw = read_points_csv(in);
    auto kept = filter_coherence(raw, cfg);
    if (kept.points.empty())
        throw DataError("ingest: no point passed the coherence filter");
    write_points_csv(regularize_to_step(kept, cfg.step_days), out);
}

/// Point CSV: temporal fill plus temporal3/off median. DSTK: spatial3x3 (or
/// temporal3/off) median on a rasterized stack.
inline void stage_preprocess(const std::filesystem::path& in, const std::filesystem::path& out, MedianMode mode,
                             std::int32_t step_days)
{
    if (in.extension() == ".dstk") {
        write_stack(median_denoise(read_stack(in), mode), out);
        return;
    }
    auto set = regularize_to_step(read_points_csv(in), step_days);
    set = interp_time_linear(set);
    write_points_csv(median_denoise(set, mode), out);
}

inline void stage_rasterize(const std::filesystem::path& in, const std::filesystem::path& out, double cell_size,
                            std::int32_t step_days)
{
    write_stack(rasterize(regularize_to_step(read_points_csv(in), step_days), cell_size), out);
}

inline void stage_inpaint(const std::filesystem::path& in, const std::filesystem::path& out, InpaintMethod method,
                          const SpringConfig& spring, const BackendSpec& backend)
{
    auto stack = read_stack(in);
    write_stack(method == InpaintMethod::spring ? inpaint_spring(stack, spring) : inpaint_external(stack, backend),
                out);
}

inline void stage_detect(const std::filesystem::path& in, const std::filesystem::path& out,
                         const DetectorConfig& cfg, const std::optional<std::filesystem::path>& pgm_dir = {})
{
    auto map = detect(read_stack(in), cfg);
    write_detections_csv(map, out);
    if (pgm_dir)
        write_detection_pgms(map, *pgm_dir);
}

inline void stage_eval(const std::filesystem::path& detections_csv, const std::filesystem::path& geometry_dstk,
                       const std::filesystem::path& truth_json, DetectorMode mode, const EvalConfig& cfg,
                       const nlohmann::json& config, const std::filesystem::path& report_json)
{
    const auto geometry = read_stack(geometry_dstk);
    const auto frames = mode == DetectorMode::global ? std::size_t{1} : geometry.frames();
    const auto det = read_detections_csv(detections_csv, frames, geometry.height(), geometry.width());

    std::vector<Event> events;
    try {
        read_json_file(truth_json).at("events").get_to(events);
    } catch (const nlohmann::json::exception& e) {
        throw DataError("invalid truth file '" + truth_json.string() + "': " + e.what());
    }
    const auto truth = make_truth(events, geometry);
    const auto metrics = evaluate(det, truth, cfg.spatial_tol, cfg.temporal_tol);

    nlohmann::json report;
    report["provenance"] = provenance(config);
    report["mode"] = std::string(to_string(mode));
    report["spatial_tol"] = cfg.spatial_tol;
    report["temporal_tol"] = cfg.temporal_tol;
    report["metrics"] = metrics;
    write_json_file(report, report_json);
}

/// Artifact file names inside a pipeline work directory.
struct PipelineFiles {
    std::filesystem::path dir;
    std::filesystem::path points() const { return dir / "points.csv"; }
    std::filesystem::path truth() const { return dir / "truth.json"; }
    std::filesystem::path ingested() const { return dir / "ingested.csv"; }
    std::filesystem::path preprocessed() const { return dir / "preprocessed.csv"; }
    std::filesystem::path sparse() const { return dir / "sparse.dstk"; }
    std::filesystem::path sparse_filtered() const { return dir / "sparse_median.dstk"; }
    std::filesystem::path dense() const { return dir / "dense.dstk"; }
    std::filesystem::path detections() const { return dir / "detections.csv"; }
    std::filesystem::path report() const { return dir / "report.json"; }
};

/// synth -> ingest -> preprocess -> rasterize -> inpaint -> detect -> eval.
inline PipelineFiles run_pipeline(const nlohmann::json& config, const std::filesystem::path& workdir)
{
    const auto cfg = parse_pipeline_config(config);
    std::filesystem::create_directories(workdir);
    PipelineFiles f{workdir};
    const auto step = cfg.ingest.step_days;

    stage_synth(cfg.scenario, f.points(), f.truth());
    stage_ingest(f.points(), f.ingested(), cfg.ingest);
    const bool spatial_median = cfg.median == MedianMode::spatial3x3;
    stage_preprocess(f.ingested(), f.preprocessed(), spatial_median ? MedianMode::off : cfg.median, step);
    stage_rasterize(f.preprocessed(), f.sparse(), cfg.cell_size, step);
    auto sparse = f.sparse();
    if (spatial_median) {
        stage_preprocess(f.sparse(), f.sparse_filtered(), MedianMode::spatial3x3, step);
        sparse = f.sparse_filtered();
    }
    stage_inpaint(sparse, f.dense(), cfg.inpaint_method, cfg.spring, cfg.backend);
    stage_detect(f.dense(), f.detections(), cfg.detect);
    stage_eval(f.detections(), f.dense(), f.truth(), cfg.detect.mode, cfg.eval, config, f.report());
    return f;
}

}  // namespace insarstack
