// phasemotion: command-line front end for the phase-difference motion
// pipeline, the Horn-Schunck baseline, the CCC metric, the gamma-jitter
// corruption protocol, and the speed/robustness benchmarks.
//
// Every run that emits files writes a config.json sidecar into the output
// directory recording the exact parameters and library version; `rerun`
// re-executes such a sidecar. Outputs are written via temp-file + rename and
// removed again if the run fails partway.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "phasemotion/phasemotion.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace phasemotion;

namespace {

// ---- output bookkeeping ----

struct OutputTracker {
    std::vector<fs::path> written;
    std::string stage = "startup";

    void record(const fs::path& p) { written.push_back(p); }
    void cleanup() {
        for (const fs::path& p : written) {
            std::error_code ec;
            fs::remove(p, ec);
        }
    }
};

OutputTracker g_tracker;

// temp-file + rename so partially written artifacts never shadow good ones
template <typename WriteFn>
void atomic_write(const fs::path& final_path, WriteFn&& write_fn) {
    fs::create_directories(final_path.parent_path());
    const fs::path tmp = final_path.parent_path() / ("tmp_" + final_path.filename().string());
    try {
        write_fn(tmp.string());
        fs::rename(tmp, final_path);
    } catch (...) {
        std::error_code ec;
        fs::remove(tmp, ec);
        fs::remove(tmp.string() + ".txt", ec);  // possible sidecar of an image tmp
        throw;
    }
    g_tracker.record(final_path);
}

void atomic_signed_image(const GrayImage& field, const fs::path& final_path) {
    atomic_write(final_path, [&](const std::string& tmp) {
        write_signed_image(field, tmp);
        fs::rename(tmp + ".txt", final_path.string() + ".txt");
        g_tracker.record(final_path.string() + ".txt");
    });
}

void write_sidecar(const fs::path& out_dir, const std::string& command, const json& params) {
    json side;
    side["tool"] = "phasemotion";
    side["version"] = kVersion;
    side["command"] = command;
    side["params"] = params;
    atomic_write(out_dir / "config.json", [&](const std::string& p) {
        std::ofstream out(p, std::ios::trunc);
        out << side.dump(2) << "\n";
        if (!out.good()) throw io_error("write failure: " + p);
    });
}

// ---- shared pieces ----

FrameSequence load_frames(const std::string& input, int min_frames) {
    g_tracker.stage = "read-frames";
    FrameSequence seq = read_frames(input);
    if (static_cast<int>(seq.frames.size()) < min_frames)
        throw sequence_error("need at least " + std::to_string(min_frames) + " frames, got " +
                             std::to_string(seq.frames.size()));
    return seq;
}

std::string subband_tag(int frame, int scale, int orient) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "f%04d_s%d_o%d", frame, scale, orient);
    return buf;
}

// Drifting two-orientation band-limited texture plus deterministic noise;
// input generator for the speed benchmark.
FrameSequence synthesize_sequence(int size, int n_frames, uint64_t seed) {
    FrameSequence seq;
    seq.frame_rate = 30.0;
    const double w0 = 3.0 * kPi / 8.0;
    for (int t = 0; t < n_frames; ++t) {
        GrayImage f(size, size);
        for (int y = 0; y < size; ++y)
            for (int x = 0; x < size; ++x) {
                const double noise = 0.05 * (uniform01_at(seed, static_cast<uint64_t>(y) * size + x) - 0.5);
                f.at(x, y) = 0.5 + 0.18 * std::cos(w0 * (x - 0.6 * t)) +
                             0.18 * std::cos(w0 * (y - 0.3 * t)) + noise;
            }
        seq.frames.push_back(std::move(f));
    }
    return seq;
}

double median_ms(std::vector<double>& samples) {
    std::nth_element(samples.begin(), samples.begin() + samples.size() / 2, samples.end());
    return samples[samples.size() / 2];
}

// ---- command parameter structs (serialized into sidecars) ----

struct DecomposeParams {
    std::string input;
    int scales = 2;
    int orients = 2;
    std::string out;
};

struct PhasediffParams {
    std::string input;
    double sigma = 2.0;
    int length = 13;  // frames per snippet; pairs = length - 1
    bool no_resize = false;
    std::string out;
};

struct FlowParams {
    std::string input;
    double alpha = 15.0;
    int iters = 100;
    std::string out;
};

struct CorruptParams {
    std::string input;
    double beta = 0.5;
    uint64_t seed = 0;
    std::string format = "png";
    std::string out;
};

struct BenchParams {
    int size = 224;
    int pairs = 8;
    int repeats = 5;
    uint64_t seed = 1;
    std::string out;  // optional JSON report path
};

struct SweepParams {
    std::string input;
    std::vector<double> betas = {0.0, 0.25, 0.5, 0.75, 1.0};
    std::vector<uint64_t> seeds = {1, 2, 3, 4, 5};
    std::string pipeline = "both";
    double sigma = 2.0;
    double alpha = 15.0;
    int iters = 100;
    std::string out;
};

// ---- commands ----

void run_decompose(const DecomposeParams& p) {
    FrameSequence seq = load_frames(p.input, 1);
    g_tracker.stage = "filter-bank";
    PyramidSpec spec;
    spec.n_scales = p.scales;
    spec.n_orientations = p.orients;
    if (p.orients != 2) {
        spec.orientation_angles.clear();
        for (int o = 0; o < p.orients; ++o) spec.orientation_angles.push_back(o * kPi / p.orients);
    }
    const FilterBank bank = build_filter_bank(seq.frames[0].width, seq.frames[0].height, spec);
    const fs::path out_dir(p.out);
    atomic_write(out_dir / "bank.cspb", [&](const std::string& f) { save_filter_bank(bank, f); });

    g_tracker.stage = "decompose";
    for (size_t t = 0; t < seq.frames.size(); ++t) {
        const PyramidCoefficients coeffs = decompose(seq.frames[t], bank);
        for (int s = 0; s < spec.n_scales; ++s)
            for (int o = 0; o < spec.n_orientations; ++o) {
                const ComplexPlane& band = coeffs.bands[s][o];
                const std::string tag = subband_tag(static_cast<int>(t), s, o);

                GrayImage amp = amplitude_of(band);
                const PhaseMap ph = phase_of(band);

                // raw complex dump: u32 w,h then f32 re-plane, f32 im-plane
                atomic_write(out_dir / ("coeff_" + tag + ".bin"), [&](const std::string& f) {
                    std::ofstream raw(f, std::ios::binary | std::ios::trunc);
                    detail::put_u32le(raw, static_cast<uint32_t>(band.width));
                    detail::put_u32le(raw, static_cast<uint32_t>(band.height));
                    for (const cdouble& v : band.v) detail::put_f32le(raw, static_cast<float>(v.real()));
                    for (const cdouble& v : band.v) detail::put_f32le(raw, static_cast<float>(v.imag()));
                    if (!raw.good()) throw io_error("write failure: " + f);
                });

                double peak = 0.0;
                for (double v : amp.data) peak = std::max(peak, v);
                if (peak > 0.0)
                    for (double& v : amp.data) v /= peak;
                atomic_write(out_dir / ("amp_" + tag + ".png"),
                             [&](const std::string& f) { write_png(amp, f); });
                atomic_signed_image(ph.value, out_dir / ("phase_" + tag + ".png"));
            }
    }

    json params;
    params["input"] = p.input;
    params["scales"] = p.scales;
    params["orients"] = p.orients;
    params["out"] = p.out;
    write_sidecar(out_dir, "decompose", params);
    std::printf("decompose: %zu frame(s), %d scale(s) x %d orientation(s) -> %s\n",
                seq.frames.size(), p.scales, p.orients, p.out.c_str());
}

void run_phasediff(const PhasediffParams& p) {
    if (p.length < 5 || p.length > 17)
        throw validation_error("phasediff: --length must be in [5, 17] (4..16 pairs)");
    FrameSequence seq = load_frames(p.input, p.length);

    g_tracker.stage = "resize";
    if (!p.no_resize)
        for (GrayImage& f : seq.frames) f = resize_bilinear(f, 48, 48);

    g_tracker.stage = "filter-bank";
    const FilterBank bank = build_filter_bank(seq.frames[0].width, seq.frames[0].height);
    const fs::path out_dir(p.out);

    g_tracker.stage = "phase-diff";
    SnippetOptions opt;
    opt.sigma = p.sigma;
    // consecutive windows share one boundary frame, covering every pair once
    const size_t stride = static_cast<size_t>(p.length - 1);
    int n_windows = 0;
    for (size_t start = 0; start + p.length <= seq.frames.size(); start += stride) {
        FrameSequence window;
        window.frame_rate = seq.frame_rate;
        window.frames.assign(seq.frames.begin() + start, seq.frames.begin() + start + p.length);
        const auto pairs = snippet_phase_diffs(window, bank, opt);
        const auto tensors = pack_snippet(pairs);

        char name[64];
        std::snprintf(name, sizeof(name), "snippet_%03d.snip", n_windows);
        atomic_write(out_dir / name, [&](const std::string& f) { save_snippet(tensors, f); });

        for (size_t t = 0; t < pairs.size(); ++t)
            for (size_t s = 0; s < pairs[t].size(); ++s)
                for (size_t o = 0; o < pairs[t][s].size(); ++o) {
                    char viz[96];
                    std::snprintf(viz, sizeof(viz), "viz_w%03d_p%02zu_s%zu_o%zu.png", n_windows, t, s, o);
                    atomic_signed_image(pairs[t][s][o].delta, out_dir / viz);
                }
        ++n_windows;
    }
    if (n_windows == 0) throw sequence_error("phasediff: no complete snippet window");

    json params;
    params["input"] = p.input;
    params["sigma"] = p.sigma;
    params["length"] = p.length;
    params["no_resize"] = p.no_resize;
    params["out"] = p.out;
    write_sidecar(out_dir, "phasediff", params);
    std::printf("phasediff: %d snippet(s) of %d pairs at %dx%d -> %s\n", n_windows, p.length - 1,
                seq.frames[0].width, seq.frames[0].height, p.out.c_str());
}

void run_flow(const FlowParams& p) {
    FrameSequence seq = load_frames(p.input, 2);
    const fs::path out_dir(p.out);
    g_tracker.stage = "horn-schunck";
    for (size_t t = 0; t + 1 < seq.frames.size(); ++t) {
        const FlowField flow = horn_schunck(seq.frames[t], seq.frames[t + 1], p.alpha, p.iters);
        char name[64];
        std::snprintf(name, sizeof(name), "flow_%04zu.flo", t);
        atomic_write(out_dir / name, [&](const std::string& f) { save_flo(flow, f); });
        const FlowStats st = flow_magnitude_stats(flow);
        std::printf("pair %04zu: |flow| mean %.4f median %.4f max %.4f\n", t, st.mean, st.median,
                    st.max);
    }
    json params;
    params["input"] = p.input;
    params["alpha"] = p.alpha;
    params["iters"] = p.iters;
    params["out"] = p.out;
    write_sidecar(out_dir, "flow", params);
    std::printf("flow: %zu pair(s) -> %s\n", seq.frames.size() - 1, p.out.c_str());
}

void run_corrupt(const CorruptParams& p) {
    FrameSequence seq = load_frames(p.input, 1);
    g_tracker.stage = "gamma-corrupt";
    const FrameSequence out = gamma_corrupt_sequence(seq, GammaJitterSpec{p.beta, p.seed});
    const fs::path out_dir(p.out);
    const std::string ext = p.format == "pgm" ? ".pgm" : ".png";
    for (size_t t = 0; t < out.frames.size(); ++t) {
        char name[64];
        std::snprintf(name, sizeof(name), "frame_%05zu%s", t, ext.c_str());
        atomic_write(out_dir / name,
                     [&](const std::string& f) { write_image(out.frames[t], f); });
    }
    json params;
    params["input"] = p.input;
    params["beta"] = p.beta;
    params["seed"] = p.seed;
    params["format"] = p.format;
    params["out"] = p.out;
    write_sidecar(out_dir, "corrupt", params);
    std::printf("corrupt: %zu frame(s), beta=%.3f seed=%llu -> %s\n", out.frames.size(), p.beta,
                static_cast<unsigned long long>(p.seed), p.out.c_str());
}

std::vector<double> read_column(const std::string& path, int column, int n_columns) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open for reading: " + path);
    std::vector<double> values;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        for (char& c : line)
            if (c == ',' || c == ';' || c == '\t') c = ' ';
        std::istringstream ss(line);
        std::vector<double> fields;
        std::string tok;
        bool numeric = true;
        while (ss >> tok) {
            try {
                size_t used = 0;
                fields.push_back(std::stod(tok, &used));
                if (used != tok.size()) numeric = false;
            } catch (...) {
                numeric = false;
            }
        }
        if (fields.empty()) continue;
        if (!numeric) {
            if (lineno == 1) continue;  // header
            throw validation_error("non-numeric value at " + path + ":" + std::to_string(lineno));
        }
        if (static_cast<int>(fields.size()) < n_columns)
            throw validation_error("expected " + std::to_string(n_columns) + " column(s) at " +
                                   path + ":" + std::to_string(lineno));
        values.push_back(fields[column]);
    }
    return values;
}

void run_ccc(const std::string& pred_path, const std::string& truth_path) {
    g_tracker.stage = "ccc";
    SeriesPair pair;
    if (truth_path.empty()) {
        pair.x = read_column(pred_path, 0, 2);
        pair.y = read_column(pred_path, 1, 2);
    } else {
        pair.x = read_column(pred_path, 0, 1);
        pair.y = read_column(truth_path, 0, 1);
    }
    std::printf("n        %zu\n", pair.x.size());
    std::printf("pearson  %+.6f\n", pearson(pair));
    std::printf("ccc      %+.6f\n", ccc(pair));
}

void run_bench(const BenchParams& p) {
    using clock = std::chrono::steady_clock;
    g_tracker.stage = "bench-setup";
    const FrameSequence seq = synthesize_sequence(p.size, p.pairs + 1, p.seed);
    const FilterBank bank = build_filter_bank(p.size, p.size);
    const SnippetOptions opt;

    struct Analysis {
        std::vector<std::vector<GrayImage>> amp;
        std::vector<std::vector<PhaseMap>> phi;
    };
    auto analyze = [&](const GrayImage& frame) {
        const PyramidCoefficients coeffs = decompose(frame, bank);
        Analysis a;
        a.amp = amplitude(coeffs);
        a.phi.resize(coeffs.bands.size());
        for (size_t s = 0; s < coeffs.bands.size(); ++s)
            for (size_t o = 0; o < coeffs.bands[s].size(); ++o)
                a.phi[s].push_back(denoise_subband_phase(coeffs.bands[s][o], a.amp[s][o], opt.sigma));
        return a;
    };

    // (a) marginal streaming cost of one frame pair: analyze the new frame,
    // difference against the previous analysis, remove rigid motion
    g_tracker.stage = "bench-phase";
    std::vector<double> phase_ms;
    for (int r = 0; r < p.repeats; ++r) {
        Analysis prev = analyze(seq.frames[0]);
        for (int t = 0; t + 1 <= p.pairs; ++t) {
            const auto t0 = clock::now();
            Analysis cur = analyze(seq.frames[t + 1]);
            for (int s = 0; s < bank.spec.n_scales; ++s)
                for (int o = 0; o < bank.spec.n_orientations; ++o) {
                    PhaseDiffField f = phase_difference(prev.phi[s][o], cur.phi[s][o]);
                    f.omega = bank.omega[s];
                    f = remove_rigid_motion(f);
                }
            const auto t1 = clock::now();
            phase_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
            prev = std::move(cur);
        }
    }

    g_tracker.stage = "bench-flow";
    std::vector<double> flow_ms;
    for (int r = 0; r < p.repeats; ++r)
        for (int t = 0; t + 1 <= p.pairs; ++t) {
            const auto t0 = clock::now();
            const FlowField flow = horn_schunck(seq.frames[t], seq.frames[t + 1], 15.0, 100);
            const auto t1 = clock::now();
            (void)flow;
            flow_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
        }

    const double phase_med = median_ms(phase_ms);
    const double flow_med = median_ms(flow_ms);
    const double ratio = phase_med > 0.0 ? flow_med / phase_med : 0.0;

    std::printf("benchmark at %dx%d, %d pairs, %d repeats (compute only, single pair at a time)\n",
                p.size, p.size, p.pairs, p.repeats);
    std::printf("  %-28s %10.3f ms/pair\n", "phase-difference pipeline", phase_med);
    std::printf("  %-28s %10.3f ms/pair\n", "horn-schunck (a=15, 100 it)", flow_med);
    std::printf("  %-28s %10.2fx\n", "flow/phase time ratio", ratio);

    if (!p.out.empty()) {
        json report;
        report["size"] = p.size;
        report["pairs"] = p.pairs;
        report["repeats"] = p.repeats;
        report["seed"] = p.seed;
        report["phase_ms_median"] = phase_med;
        report["flow_ms_median"] = flow_med;
        report["flow_over_phase_ratio"] = ratio;
        const fs::path out_path(p.out);
        atomic_write(out_path, [&](const std::string& f) {
            std::ofstream out(f, std::ios::trunc);
            out << report.dump(2) << "\n";
            if (!out.good()) throw io_error("write failure: " + f);
        });
        json params;
        params["size"] = p.size;
        params["pairs"] = p.pairs;
        params["repeats"] = p.repeats;
        params["seed"] = p.seed;
        params["out"] = p.out;
        const fs::path side_dir =
            out_path.parent_path().empty() ? fs::path(".") : out_path.parent_path();
        write_sidecar(side_dir, "bench", params);
    }
}

void run_sweep(const SweepParams& p) {
    FrameSequence seq = load_frames(p.input, 2);
    SweepOptions opt;
    opt.sigma = p.sigma;
    opt.alpha = p.alpha;
    opt.iters = p.iters;

    std::vector<MotionPipeline> pipelines;
    if (p.pipeline == "phase" || p.pipeline == "both") pipelines.push_back(MotionPipeline::phase_diff);
    if (p.pipeline == "flow" || p.pipeline == "both") pipelines.push_back(MotionPipeline::flow);
    if (pipelines.empty())
        throw validation_error("sweep: --pipeline must be phase, flow, or both");

    std::vector<SweepRow> rows;
    for (MotionPipeline pl : pipelines) {
        g_tracker.stage = std::string("sweep-") + pipeline_name(pl);
        const auto part = robustness_sweep(seq, p.betas, p.seeds, pl, opt);
        rows.insert(rows.end(), part.begin(), part.end());
    }

    const fs::path out_dir(p.out);
    atomic_write(out_dir / "sweep.csv", [&](const std::string& f) {
        std::ofstream out(f, std::ios::trunc);
        out << "beta,seed,pipeline,n_pairs,mean_abs_dev,normalized_dev\n";
        for (const SweepRow& r : rows) {
            char line[160];
            std::snprintf(line, sizeof(line), "%.6g,%llu,%s,%d,%.9g,%.9g\n", r.beta,
                          static_cast<unsigned long long>(r.seed), pipeline_name(r.pipeline),
                          r.n_pairs, r.mean_abs_dev, r.normalized_dev);
            out << line;
        }
        if (!out.good()) throw io_error("write failure: " + f);
    });

    std::printf("%-8s %-12s %-14s %s\n", "beta", "pipeline", "normalized_dev", "(mean over seeds)");
    for (double beta : p.betas)
        for (MotionPipeline pl : pipelines) {
            double acc = 0.0;
            int n = 0;
            for (const SweepRow& r : rows)
                if (r.beta == beta && r.pipeline == pl) {
                    acc += r.normalized_dev;
                    ++n;
                }
            std::printf("%-8.3g %-12s %-14.6g\n", beta, pipeline_name(pl), n ? acc / n : 0.0);
        }

    json params;
    params["input"] = p.input;
    params["betas"] = p.betas;
    params["seeds"] = p.seeds;
    params["pipeline"] = p.pipeline;
    params["sigma"] = p.sigma;
    params["alpha"] = p.alpha;
    params["iters"] = p.iters;
    params["out"] = p.out;
    write_sidecar(out_dir, "sweep", params);
}

// ---- rerun from a sidecar ----

void dispatch(const std::string& command, const json& params, const std::string& out_override);

void run_rerun(const std::string& sidecar_path, const std::string& out_override) {
    g_tracker.stage = "rerun";
    std::ifstream in(sidecar_path);
    if (!in) throw io_error("cannot open for reading: " + sidecar_path);
    json side = json::parse(in, nullptr, /*allow_exceptions=*/true);
    if (side.value("tool", "") != "phasemotion")
        throw validation_error("not a phasemotion sidecar: " + sidecar_path);
    dispatch(side.at("command").get<std::string>(), side.at("params"), out_override);
}

void dispatch(const std::string& command, const json& params, const std::string& out_override) {
    auto out_of = [&](const json& j) {
        return out_override.empty() ? j.at("out").get<std::string>() : out_override;
    };
    if (command == "decompose") {
        DecomposeParams p;
        p.input = params.at("input");
        p.scales = params.at("scales");
        p.orients = params.at("orients");
        p.out = out_of(params);
        run_decompose(p);
    } else if (command == "phasediff") {
        PhasediffParams p;
        p.input = params.at("input");
        p.sigma = params.at("sigma");
        p.length = params.at("length");
        p.no_resize = params.at("no_resize");
        p.out = out_of(params);
        run_phasediff(p);
    } else if (command == "flow") {
        FlowParams p;
        p.input = params.at("input");
        p.alpha = params.at("alpha");
        p.iters = params.at("iters");
        p.out = out_of(params);
        run_flow(p);
    } else if (command == "corrupt") {
        CorruptParams p;
        p.input = params.at("input");
        p.beta = params.at("beta");
        p.seed = params.at("seed");
        p.format = params.at("format");
        p.out = out_of(params);
        run_corrupt(p);
    } else if (command == "bench") {
        BenchParams p;
        p.size = params.at("size");
        p.pairs = params.at("pairs");
        p.repeats = params.at("repeats");
        p.seed = params.at("seed");
        p.out = params.at("out");
        run_bench(p);
    } else if (command == "sweep") {
        SweepParams p;
        p.input = params.at("input");
        p.betas = params.at("betas").get<std::vector<double>>();
        p.seeds = params.at("seeds").get<std::vector<uint64_t>>();
        p.pipeline = params.at("pipeline");
        p.sigma = params.at("sigma");
        p.alpha = params.at("alpha");
        p.iters = params.at("iters");
        p.out = out_of(params);
        run_sweep(p);
    } else {
        throw validation_error("unknown command in sidecar: " + command);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"complex steerable pyramid phase-difference motion toolkit"};
    app.set_version_flag("--version", std::string("phasemotion ") + kVersion);
    app.require_subcommand(1);

    DecomposeParams dp;
    CLI::App* cmd_decompose = app.add_subcommand(
        "decompose", "decompose frames into pyramid amplitude/phase sub-bands");
    cmd_decompose->add_option("input", dp.input, "frame directory or list file")->required();
    cmd_decompose->add_option("--scales", dp.scales, "pyramid scales")->default_val(2);
    cmd_decompose->add_option("--orients", dp.orients, "orientations")->default_val(2);
    cmd_decompose->add_option("--out", dp.out, "output directory")->required();

    PhasediffParams pp;
    CLI::App* cmd_phasediff = app.add_subcommand(
        "phasediff", "denoised, unwrapped, rigid-motion-compensated phase differences");
    cmd_phasediff->add_option("input", pp.input, "frame directory or list file")->required();
    cmd_phasediff->add_option("--sigma", pp.sigma, "denoise blur sigma (px)")->default_val(2.0);
    cmd_phasediff->add_option("--length", pp.length, "frames per snippet (pairs+1)")->default_val(13);
    cmd_phasediff->add_flag("--no-resize", pp.no_resize, "skip the default 48x48 resize");
    cmd_phasediff->add_option("--out", pp.out, "output directory")->required();

    FlowParams fp;
    CLI::App* cmd_flow = app.add_subcommand("flow", "Horn-Schunck optical flow baseline");
    cmd_flow->add_option("input", fp.input, "frame directory or list file")->required();
    cmd_flow->add_option("--alpha", fp.alpha, "smoothness weight")->default_val(15.0);
    cmd_flow->add_option("--iters", fp.iters, "Jacobi iterations")->default_val(100);
    cmd_flow->add_option("--out", fp.out, "output directory")->required();

    CorruptParams cp;
    CLI::App* cmd_corrupt = app.add_subcommand("corrupt", "per-frame gamma jitter");
    cmd_corrupt->add_option("input", cp.input, "frame directory or list file")->required();
    cmd_corrupt->add_option("--beta", cp.beta, "variability in [0,1]")->required();
    cmd_corrupt->add_option("--seed", cp.seed, "RNG seed")->default_val(0);
    cmd_corrupt->add_option("--format", cp.format, "png or pgm")
        ->default_val("png")
        ->check(CLI::IsMember({"png", "pgm"}));
    cmd_corrupt->add_option("--out", cp.out, "output directory")->required();

    std::string ccc_pred, ccc_truth;
    CLI::App* cmd_ccc = app.add_subcommand("ccc", "concordance correlation coefficient");
    cmd_ccc->add_option("pred", ccc_pred, "two-column CSV, or one-column predictions")->required();
    cmd_ccc->add_option("truth", ccc_truth, "one-column ground truth (optional)");

    BenchParams bp;
    CLI::App* cmd_bench = app.add_subcommand("bench", "phase pipeline vs Horn-Schunck timing");
    cmd_bench->add_option("--size", bp.size, "square frame size")
        ->default_val(224)
        ->check(CLI::IsMember({48, 224}));
    cmd_bench->add_option("--pairs", bp.pairs, "frame pairs per repeat")->default_val(8);
    cmd_bench->add_option("--repeats", bp.repeats, "repeats")->default_val(5);
    cmd_bench->add_option("--seed", bp.seed, "input synthesis seed")->default_val(1);
    cmd_bench->add_option("--out", bp.out, "JSON report path");

    SweepParams sp;
    CLI::App* cmd_sweep = app.add_subcommand("sweep", "illumination robustness sweep");
    cmd_sweep->add_option("input", sp.input, "frame directory or list file")->required();
    cmd_sweep->add_option("--betas", sp.betas, "beta values")->delimiter(',');
    cmd_sweep->add_option("--seeds", sp.seeds, "corruption seeds")->delimiter(',');
    cmd_sweep->add_option("--pipeline", sp.pipeline, "phase, flow, or both")
        ->default_val("both")
        ->check(CLI::IsMember({"phase", "flow", "both"}));
    cmd_sweep->add_option("--sigma", sp.sigma, "phase denoise sigma")->default_val(2.0);
    cmd_sweep->add_option("--alpha", sp.alpha, "flow smoothness weight")->default_val(15.0);
    cmd_sweep->add_option("--iters", sp.iters, "flow iterations")->default_val(100);
    cmd_sweep->add_option("--out", sp.out, "output directory")->required();

    std::string rerun_sidecar, rerun_out;
    CLI::App* cmd_rerun = app.add_subcommand("rerun", "re-execute a recorded config.json sidecar");
    cmd_rerun->add_option("sidecar", rerun_sidecar, "path to config.json")->required();
    cmd_rerun->add_option("--out", rerun_out, "override output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_decompose->parsed()) run_decompose(dp);
        else if (cmd_phasediff->parsed()) run_phasediff(pp);
        else if (cmd_flow->parsed()) run_flow(fp);
        else if (cmd_corrupt->parsed()) run_corrupt(cp);
        else if (cmd_ccc->parsed()) run_ccc(ccc_pred, ccc_truth);
        else if (cmd_bench->parsed()) run_bench(bp);
        else if (cmd_sweep->parsed()) run_sweep(sp);
        else if (cmd_rerun->parsed()) run_rerun(rerun_sidecar, rerun_out);
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error [%s]: %s\n", g_tracker.stage.c_str(), e.what());
        g_tracker.cleanup();
        return 1;
    }
}
