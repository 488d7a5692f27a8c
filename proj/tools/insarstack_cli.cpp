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

// insarstack command line: one subcommand per pipeline stage plus `pipeline`.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 backend failure.

#include <iostream>

#include <CLI11.hpp>

#include "insarstack/insarstack.hpp"

namespace fs = std::filesystem;
using namespace insarstack;

namespace {

Window parse_window(const std::string& text)
{
    std::vector<std::size_t> v;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto comma = text.find(',', pos);
        auto part = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        std::size_t value = 0;
        auto res = std::from_chars(part.data(), part.data() + part.size(), value);
        if (part.empty() || res.ec != std::errc{} || res.ptr != part.data() + part.size())
            throw CLI::ValidationError("--window", "expected t,y,x integers, got '" + text + "'");
        v.push_back(value);
        if (comma == std::string::npos)
            break;
        pos = comma + 1;
    }
    if (v.size() != 3)
        throw CLI::ValidationError("--window", "expected three comma-separated sizes t,y,x");
    return {v[0], v[1], v[2]};
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Condition sparse InSAR point time series into dense stacks and detect ground movement"};
    app.require_subcommand(1);

    // synth
    std::string synth_config, synth_out, synth_truth;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic point CSV and its event truth");
    synth->add_option("--config", synth_config, "Scenario JSON (or pipeline config with a scenario section)")
        ->required();
    synth->add_option("--output", synth_out, "Output point CSV")->required();
    synth->add_option("--truth", synth_truth, "Output truth JSON")->required();

    // ingest
    std::string ingest_in, ingest_out;
    IngestConfig ingest_cfg;
    auto* ingest = app.add_subcommand("ingest", "Coherence filter and regularize to the time grid");
    ingest->add_option("--input", ingest_in, "Raw point CSV")->required();
    ingest->add_option("--output", ingest_out, "Regularized point CSV")->required();
    ingest->add_option("--max-missing", ingest_cfg.max_missing_frac, "Maximum NaN fraction kept")
        ->capture_default_str()->check(CLI::Range(0.0, 1.0));
    ingest->add_option("--step", ingest_cfg.step_days, "Grid step in days")->capture_default_str();

    // preprocess
    std::string pre_in, pre_out, pre_median = "temporal3";
    std::int32_t pre_step = 6;
    auto* preprocess = app.add_subcommand("preprocess", "Temporal gap fill and NaN-omitting median");
    preprocess->add_option("--input", pre_in, "Point CSV, or DSTK for a stack median")
        ->required();
    preprocess->add_option("--output", pre_out, "Output file (same kind as input)")->required();
    preprocess->add_option("--median", pre_median, "temporal3 | spatial3x3 | off")
        ->capture_default_str()->check(CLI::IsMember({"temporal3", "spatial3x3", "off"}));
    preprocess->add_option("--step", pre_step, "Grid step in days")->capture_default_str();

    // rasterize
    std::string ras_in, ras_out;
    double ras_cell = kDefaultCellSize;
    std::int32_t ras_step = 6;
    auto* rasterize_cmd = app.add_subcommand("rasterize", "Project points into a sparse DSTK stack");
    rasterize_cmd->add_option("--input", ras_in, "Preprocessed point CSV")->required();
    rasterize_cmd->add_option("--output", ras_out, "Sparse DSTK stack")->required();
    rasterize_cmd->add_option("--cell-size", ras_cell, "Cell size in meters")->capture_default_str();
    rasterize_cmd->add_option("--step", ras_step, "Grid step in days")->capture_default_str();

    // inpaint
    std::string inp_in, inp_out, inp_method = "spring", inp_conn = "spatiotemporal6", inp_backend, inp_backend_cfg;
    SpringConfig spring_cfg;
    auto* inpaint = app.add_subcommand("inpaint", "Densify a sparse stack");
    inpaint->add_option("--input", inp_in, "Sparse DSTK stack")->required();
    inpaint->add_option("--output", inp_out, "Dense DSTK stack")->required();
    inpaint->add_option("--method", inp_method, "spring | external")
        ->capture_default_str()->check(CLI::IsMember({"spring", "external"}));
    inpaint->add_option("--connectivity", inp_conn, "spatial4 | spatiotemporal6")
        ->capture_default_str()->check(CLI::IsMember({"spatial4", "spatiotemporal6"}));
    inpaint->add_option("--rel-tol", spring_cfg.rel_tol, "Relative residual target")->capture_default_str();
    inpaint->add_option("--max-iter", spring_cfg.max_iter, "Iteration cap (0 = automatic)")->capture_default_str();
    inpaint->add_option("--backend", inp_backend, "External backend command");
    inpaint->add_option("--backend-config", inp_backend_cfg, "Config file passed to the backend");

    // detect
    std::string det_in, det_out, det_mode = "global", det_window = "5,5,5", det_pgm;
    DetectorConfig det_cfg;
    auto* detect_cmd = app.add_subcommand("detect", "Variance detector");
    detect_cmd->add_option("--input", det_in, "DSTK stack")->required();
    detect_cmd->add_option("--output", det_out, "Detection CSV (t,row,col)")->required();
    detect_cmd->add_option("--mode", det_mode, "global | local")
        ->capture_default_str()->check(CLI::IsMember({"global", "local"}));
    detect_cmd->add_option("--threshold", det_cfg.threshold, "Variance threshold in mm^2")->capture_default_str();
    detect_cmd->add_option("--window", det_window, "Local window t,y,x")->capture_default_str();
    detect_cmd->add_option("--dilate", det_cfg.dilate_radius, "Dilation radius in cells")->capture_default_str();
    detect_cmd->add_option("--pgm-dir", det_pgm, "Also write one PGM per frame here");

    // eval
    std::string ev_det, ev_stack, ev_truth, ev_mode = "global", ev_config, ev_out;
    EvalConfig ev_cfg;
    auto* eval = app.add_subcommand("eval", "Score detections against event truth");
    eval->add_option("--detections", ev_det, "Detection CSV")->required();
    eval->add_option("--stack", ev_stack, "Stack giving the raster geometry")->required();
    eval->add_option("--truth", ev_truth, "Truth JSON from synth")->required();
    eval->add_option("--mode", ev_mode, "global | local")
        ->capture_default_str()->check(CLI::IsMember({"global", "local"}));
    eval->add_option("--spatial-tol", ev_cfg.spatial_tol, "Spatial tolerance in cells")->capture_default_str();
    eval->add_option("--temporal-tol", ev_cfg.temporal_tol, "Frames after onset")->capture_default_str();
    eval->add_option("--config", ev_config, "Config recorded in the provenance header");
    eval->add_option("--output", ev_out, "Report JSON")->required();

    // pipeline
    std::string pipe_config, pipe_workdir = "insarstack-run";
    auto* pipeline = app.add_subcommand("pipeline", "Run every stage from a JSON config");
    pipeline->add_option("--config", pipe_config, "Pipeline config JSON")->required();
    pipeline->add_option("--workdir", pipe_workdir, "Directory for all artifacts")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (*synth) {
            auto j = read_json_file(synth_config);
            Scenario s;
            try {
                (j.contains("scenario") ? j.at("scenario") : j).get_to(s);
            } catch (const nlohmann::json::exception& e) {
                throw DataError(std::string("invalid scenario: ") + e.what());
            }
            stage_synth(s, synth_out, synth_truth);
        } else if (*ingest) {
            stage_ingest(ingest_in, ingest_out, ingest_cfg);
        } else if (*preprocess) {
            stage_preprocess(pre_in, pre_out, parse_median_mode(pre_median), pre_step);
        } else if (*rasterize_cmd) {
            stage_rasterize(ras_in, ras_out, ras_cell, ras_step);
        } else if (*inpaint) {
            spring_cfg.connectivity = parse_connectivity(inp_conn);
            const auto method = parse_inpaint_method(inp_method);
            if (method == InpaintMethod::external && inp_backend.empty()) {
                std::cerr << "inpaint: --method external requires --backend\n";
                return 1;
            }
            stage_inpaint(inp_in, inp_out, method, spring_cfg, BackendSpec{inp_backend, inp_backend_cfg});
        } else if (*detect_cmd) {
            det_cfg.mode = parse_detector_mode(det_mode);
            try {
                det_cfg.window = parse_window(det_window);
            } catch (const CLI::ValidationError& e) {
                std::cerr << "detect: " << e.what() << "\n";
                return 1;
            }
            std::optional<fs::path> pgm;
            if (!det_pgm.empty())
                pgm = det_pgm;
            stage_detect(det_in, det_out, det_cfg, pgm);
        } else if (*eval) {
            nlohmann::json config = ev_config.empty() ? nlohmann::json(nullptr) : read_json_file(ev_config);
            stage_eval(ev_det, ev_stack, ev_truth, parse_detector_mode(ev_mode), ev_cfg, config, ev_out);
        } else if (*pipeline) {
            auto files = run_pipeline(read_json_file(pipe_config), pipe_workdir);
            std::cout << files.report().string() << "\n";
        }
    } catch (const BackendError& e) {
        std::cerr << app.get_subcommands().front()->get_name() << ": " << e.what() << "\n";
        return 3;
    } catch (const DataError& e) {
        std::cerr << app.get_subcommands().front()->get_name() << ": " << e.what() << "\n";
        return 2;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << app.get_subcommands().front()->get_name() << ": " << e.what() << "\n";
        return 2;
    }
    return 0;
}
