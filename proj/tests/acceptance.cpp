// Acceptance suite: one pass/fail line per claim, nonzero exit on any failure.
// Tolerances are fixed here, not tuned at run time.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "phasemotion/phasemotion.hpp"
#include "test_support.hpp"

using namespace phasemotion;
using testsupport::direct_ccc;
using testsupport::make_benchmark_sequence;
using testsupport::make_contrast_scene;
using testsupport::make_texture;
using testsupport::rank_correlation;
using testsupport::scale_image;
using testsupport::wrap_diff_oracle;

namespace {

using clock_type = std::chrono::steady_clock;

int g_failures = 0;

void report(const char* name, bool pass, const std::string& detail) {
    std::printf("[%s] %-28s %s\n", pass ? "PASS" : "FAIL", name, detail.c_str());
    if (!pass) ++g_failures;
}

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

// ---- 1. phase-displacement proportionality ----

void check_proportionality() {
    const auto t0 = clock_type::now();
    const int n = 48;
    const auto tex = make_texture(n, n, 401, 0.0);
    const FilterBank bank = build_filter_bank(n, n);
    SnippetOptions opt;
    opt.remove_rigid = false;  // the global shift is the signal

    bool pass = true;
    std::string detail;
    std::vector<double> estimates;
    const std::vector<double> shifts = {0.5, 1.0, 1.5, 2.0};
    for (double x0 : shifts) {
        FrameSequence pair;
        pair.frames = {tex.render(0.0), tex.render(x0)};
        const auto fields = snippet_phase_diffs(pair, bank, opt);
        const double est = estimate_translation(fields[0][0][0]);
        estimates.push_back(est);
        const double tol = 0.25 * x0 + 0.1;
        if (std::abs(est - x0) > tol) pass = false;
        char buf[48];
        std::snprintf(buf, sizeof(buf), "%.2f->%.3f ", x0, est);
        detail += buf;
    }
    for (size_t i = 1; i < estimates.size(); ++i)
        if (estimates[i] <= estimates[i - 1]) pass = false;  // monotone in x0
    const double slope = (estimates.back() - estimates.front()) / (shifts.back() - shifts.front());
    if (slope < 0.75 || slope > 1.25) pass = false;

    const double elapsed = seconds_since(t0);
    if (elapsed >= 5.0) pass = false;
    char buf[48];
    std::snprintf(buf, sizeof(buf), "(%.2fs)", elapsed);
    report("proportionality", pass, detail + buf);
}

// ---- 2. illumination invariance vs brightness-constancy sensitivity ----

void check_illumination_invariance() {
    const int n = 48;
    const FrameSequence scene = make_contrast_scene(n, 402);
    const FilterBank bank = build_filter_bank(n, n);
    const auto clean = snippet_phase_diffs(scene, bank);

    auto scaled_fields = [&](double c0, double c1) {
        FrameSequence lit;
        lit.frames = {scale_image(scene.frames[0], c0), scale_image(scene.frames[1], c1)};
        return snippet_phase_diffs(lit, bank);
    };

    // dyadic gains: bitwise equality at mutually valid pixels
    bool bitwise = true;
    size_t compared = 0;
    {
        const auto lit = scaled_fields(0.5, 2.0);
        for (size_t s = 0; s < clean[0].size(); ++s)
            for (size_t o = 0; o < clean[0][s].size(); ++o)
                for (size_t i = 0; i < clean[0][s][o].delta.size(); ++i)
                    if (clean[0][s][o].valid[i] && lit[0][s][o].valid[i]) {
                        ++compared;
                        if (lit[0][s][o].delta.data[i] != clean[0][s][o].delta.data[i])
                            bitwise = false;
                    }
    }

    // arbitrary gains: sup-norm within 1e-9 (bitwise is unattainable for
    // non-dyadic gains: rounding c*pixel breaks exact input proportionality)
    double sup = 0.0;
    for (uint64_t k = 0; k < 3; ++k) {
        const double c0 = 0.5 + 1.5 * uniform01_at(601, 2 * k);
        const double c1 = 0.5 + 1.5 * uniform01_at(601, 2 * k + 1);
        const auto lit = scaled_fields(c0, c1);
        for (size_t s = 0; s < clean[0].size(); ++s)
            for (size_t o = 0; o < clean[0][s].size(); ++o)
                for (size_t i = 0; i < clean[0][s][o].delta.size(); ++i)
                    if (clean[0][s][o].valid[i] && lit[0][s][o].valid[i])
                        sup = std::max(sup,
                                       std::abs(lit[0][s][o].delta.data[i] - clean[0][s][o].delta.data[i]));
    }

    // the same scalings must move the Horn-Schunck output
    const FlowField base = horn_schunck(scene.frames[0], scene.frames[1]);
    double min_flow_dev = 1e300;
    for (double c : {0.5, 2.0}) {
        const FlowField lit = horn_schunck(scene.frames[0], scale_image(scene.frames[1], c));
        KahanSum dev;
        for (size_t i = 0; i < base.u.size(); ++i) {
            dev.add(std::abs(lit.u[i] - base.u[i]));
            dev.add(std::abs(lit.v[i] - base.v[i]));
        }
        min_flow_dev = std::min(min_flow_dev, dev.value() / (2.0 * base.u.size()));
    }

    const bool pass = bitwise && compared > 1000 && sup <= 1e-9 && min_flow_dev > 1e-3;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "dyadic bitwise=%s (%zu px), arbitrary sup=%.2e (<=1e-9), flow dev=%.2e (>1e-3)",
                  bitwise ? "yes" : "NO", compared, sup, min_flow_dev);
    report("illumination-invariance", pass, buf);
}

// ---- 3. robustness ordering over beta ----

void check_robustness_ordering() {
    const auto t0 = clock_type::now();
    const FrameSequence seq = make_benchmark_sequence(48, 48, 100, 403);
    const std::vector<double> betas = {0.25, 0.5, 0.75, 1.0};
    const std::vector<uint64_t> seeds = {11, 12, 13, 14, 15};

    const auto phase_rows = robustness_sweep(seq, betas, seeds, MotionPipeline::phase_diff);
    const auto flow_rows = robustness_sweep(seq, betas, seeds, MotionPipeline::flow);

    auto mean_by_beta = [&](const std::vector<SweepRow>& rows) {
        std::vector<double> mean(betas.size(), 0.0);
        for (size_t b = 0; b < betas.size(); ++b) {
            int cnt = 0;
            for (const SweepRow& r : rows)
                if (r.beta == betas[b]) {
                    mean[b] += r.normalized_dev;
                    ++cnt;
                }
            mean[b] /= cnt;
        }
        return mean;
    };
    const auto phase_mean = mean_by_beta(phase_rows);
    const auto flow_mean = mean_by_beta(flow_rows);

    bool ordered = true;
    std::string detail;
    for (size_t b = 0; b < betas.size(); ++b) {
        if (!(phase_mean[b] < flow_mean[b])) ordered = false;
        char buf[64];
        std::snprintf(buf, sizeof(buf), "b%.2f: %.3f<%.3f ", betas[b], phase_mean[b], flow_mean[b]);
        detail += buf;
    }
    const double rc_phase = rank_correlation(betas, phase_mean);
    const double rc_flow = rank_correlation(betas, flow_mean);
    const double elapsed = seconds_since(t0);
    const bool pass = ordered && rc_phase > 0.8 && rc_flow > 0.8 && elapsed < 120.0;
    char buf[96];
    std::snprintf(buf, sizeof(buf), "rank: phase %.2f flow %.2f (>0.8) (%.1fs)", rc_phase, rc_flow,
                  elapsed);
    report("robustness-ordering", pass, detail + buf);
}

// ---- 4. speed ordering at 224x224 ----

void check_speed_ordering() {
    const auto t_start = clock_type::now();
    const int n = 224;
    const int pairs = 6, repeats = 3;
    FrameSequence seq;
    {
        const auto tex = make_texture(n, n, 404, 0.0);
        const auto tey = make_texture(n, n, 405, kHalfPi);
        for (int t = 0; t <= pairs; ++t) {
            const GrayImage a = tex.render(0.6 * t, 0.0, 0.225);
            const GrayImage b = tey.render(0.0, 0.4 * t, 0.225);
            GrayImage f(n, n);
            for (size_t i = 0; i < f.size(); ++i) f.data[i] = a.data[i] + b.data[i] - 0.5;
            seq.frames.push_back(std::move(f));
        }
    }
    const FilterBank bank = build_filter_bank(n, n);
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

    std::vector<double> phase_ms, flow_ms;
    for (int r = 0; r < repeats; ++r) {
        Analysis prev = analyze(seq.frames[0]);
        for (int t = 0; t < pairs; ++t) {
            const auto t0 = clock_type::now();
            Analysis cur = analyze(seq.frames[t + 1]);
            for (int s = 0; s < bank.spec.n_scales; ++s)
                for (int o = 0; o < bank.spec.n_orientations; ++o) {
                    PhaseDiffField f = phase_difference(prev.phi[s][o], cur.phi[s][o]);
                    f.omega = bank.omega[s];
                    f = remove_rigid_motion(f);
                }
            phase_ms.push_back(1000.0 * seconds_since(t0));
            prev = std::move(cur);
        }
    }
    for (int r = 0; r < repeats; ++r)
        for (int t = 0; t < pairs; ++t) {
            const auto t0 = clock_type::now();
            const FlowField flow = horn_schunck(seq.frames[t], seq.frames[t + 1], 15.0, 100);
            (void)flow;
            flow_ms.push_back(1000.0 * seconds_since(t0));
        }

    auto median = [](std::vector<double> v) {
        std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
        return v[v.size() / 2];
    };
    const double phase_med = median(phase_ms);
    const double flow_med = median(flow_ms);
    const double elapsed = seconds_since(t_start);
    const bool pass = phase_med < flow_med && elapsed < 60.0;
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "phase %.1f ms < flow %.1f ms, ratio %.2fx (10x not asserted) (%.1fs)", phase_med,
                  flow_med, flow_med / phase_med, elapsed);
    report("speed-ordering", pass, buf);
}

// ---- 5. CCC oracle equivalence + worked examples ----

void check_ccc() {
    bool pass = true;
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const size_t len = 2 + splitmix64_at(405, k) % 511;
        SeriesPair p;
        p.x.resize(len);
        p.y.resize(len);
        for (size_t i = 0; i < len; ++i) {
            p.x[i] = 4.0 * uniform01_at(500 + k, 2 * i) - 2.0;
            p.y[i] = 4.0 * uniform01_at(500 + k, 2 * i + 1) - 2.0;
        }
        const double err = std::abs(ccc(p) - direct_ccc(p.x, p.y));
        worst = std::max(worst, err);
        if (err > 1e-12) pass = false;
    }

    const SeriesPair ident{{0.1, 0.5, 0.9}, {0.1, 0.5, 0.9}};
    if (std::abs(ccc(ident) - 1.0) > 1e-12) pass = false;
    const SeriesPair flipped{{1, 2, 3}, {-1, -2, -3}};
    if (std::abs(ccc(flipped) - (-1.0 / 13.0)) > 1e-12) pass = false;
    const SeriesPair negated{{-1.0, 0.0, 1.0}, {1.0, 0.0, -1.0}};
    if (std::abs(ccc(negated) - (-1.0)) > 1e-12) pass = false;

    char buf[96];
    std::snprintf(buf, sizeof(buf), "1000 pairs vs oracle, worst |err| = %.2e (<=1e-12)", worst);
    report("ccc-oracle", pass, buf);
}

// ---- 6. packing shapes ----

void check_packing() {
    const FrameSequence seq = make_benchmark_sequence(48, 48, 13, 406);
    const FilterBank bank = build_filter_bank(48, 48);
    const auto pairs = snippet_phase_diffs(seq, bank);
    const auto tensors = pack_snippet(pairs);

    bool pass = tensors.size() == 2 && tensors[0].channels == 24 && tensors[0].height == 48 &&
                tensors[0].width == 48 && tensors[1].channels == 24 && tensors[1].height == 24 &&
                tensors[1].width == 24;

    const auto planes = unpack_snippet(tensors);
    if (planes.size() != pairs.size()) pass = false;
    for (size_t t = 0; pass && t < pairs.size(); ++t)
        for (size_t s = 0; pass && s < pairs[t].size(); ++s)
            for (size_t o = 0; pass && o < pairs[t][s].size(); ++o)
                if (planes[t][s][o].data != pairs[t][s][o].delta.data) pass = false;

    char buf[96];
    std::snprintf(buf, sizeof(buf), "scale1 (%d,%d,%d) scale2 (%d,%d,%d), unpack == identity",
                  tensors[0].channels, tensors[0].height, tensors[0].width, tensors[1].channels,
                  tensors[1].height, tensors[1].width);
    report("packing-shapes", pass, buf);
}

// ---- 7. unwrap correctness ----

void check_unwrap() {
    const int n = 100;
    bool pass = true;
    for (int i = 0; i < n && pass; ++i)
        for (int j = 0; j < n; ++j) {
            const double a = -kPi + (i + 1) * (kTwoPi / n);
            const double b = -kPi + (j + 1) * (kTwoPi / n);
            PhaseMap pa, pb;
            pa.value = GrayImage(1, 1, a);
            pa.valid = {1};
            pb.value = GrayImage(1, 1, b);
            pb.valid = {1};
            const double got = phase_difference(pa, pb).delta.data[0];
            const double want = wrap_diff_oracle(a, b);
            if (got != want || !(got > -kPi) || !(got <= kPi)) {
                pass = false;
                break;
            }
        }
    report("unwrap-exactness", pass, "10^4 (phi_t, phi_t+1) pairs match the oracle exactly");
}

// ---- 8. pyramid unit suite ----

void check_pyramid() {
    const int n = 48;
    const FilterBank bank = build_filter_bank(n, n);
    bool pass = true;
    std::string detail;

    // constant image -> zero coefficients
    const auto flat = decompose(GrayImage(n, n, 0.7), bank);
    double peak = 0.0;
    for (const auto& scale : flat.bands)
        for (const ComplexPlane& band : scale)
            for (const cdouble& v : band.v) peak = std::max(peak, std::abs(v));
    if (peak >= 1e-9 * n * n) pass = false;
    detail += "const->0 ";

    // linearity to 1e-10 relative
    GrayImage f(n, n), g(n, n);
    for (size_t i = 0; i < f.size(); ++i) {
        f.data[i] = uniform01_at(407, i);
        g.data[i] = uniform01_at(408, i);
    }
    GrayImage combo(n, n);
    for (size_t i = 0; i < combo.size(); ++i) combo.data[i] = 0.6 * f.data[i] - 1.1 * g.data[i];
    const auto df = decompose(f, bank);
    const auto dg = decompose(g, bank);
    const auto dc = decompose(combo, bank);
    double lin_err = 0.0;
    for (size_t s = 0; s < dc.bands.size(); ++s)
        for (size_t o = 0; o < dc.bands[s].size(); ++o) {
            double band_peak = 0.0;
            for (const cdouble& v : dc.bands[s][o].v) band_peak = std::max(band_peak, std::abs(v));
            for (size_t i = 0; i < dc.bands[s][o].v.size(); ++i) {
                const cdouble want = 0.6 * df.bands[s][o].v[i] - 1.1 * dg.bands[s][o].v[i];
                lin_err = std::max(lin_err,
                                   std::abs(dc.bands[s][o].v[i] - want) / std::max(band_peak, 1e-30));
            }
        }
    if (lin_err > 1e-10) pass = false;
    detail += "linear ";

    // every band-pass mask exactly zero at DC
    for (int s = 0; s < bank.spec.n_scales; ++s)
        for (int o = 0; o < bank.spec.n_orientations; ++o)
            if (bank.bandpass[s][o].data[0] != 0.0) pass = false;
    detail += "DC=0 ";

    // sinusoid at the scale-1 center frequency: orientation selectivity > 10
    GrayImage sin_img(n, n);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) sin_img.at(x, y) = 0.5 + 0.4 * std::cos(3.0 * kPi / 8.0 * x);
    const auto ds = decompose(sin_img, bank);
    double ex = 0.0, ey = 0.0;
    for (const cdouble& v : ds.bands[0][0].v) ex += std::norm(v);
    for (const cdouble& v : ds.bands[0][1].v) ey += std::norm(v);
    if (!(ex > 10.0 * ey)) pass = false;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "selectivity %.1e", ey > 0 ? ex / ey : 1e300);
    report("pyramid-suite", pass, detail + buf);
}

}  // namespace

int main() {
    std::printf("phasemotion acceptance suite (%s)\n", kVersion);
    const auto t0 = clock_type::now();
    check_proportionality();
    check_illumination_invariance();
    check_robustness_ordering();
    check_speed_ordering();
    check_ccc();
    check_packing();
    check_unwrap();
    check_pyramid();
    std::printf("%d criterion failure(s), %.1fs total\n", g_failures, seconds_since(t0));
    return g_failures == 0 ? 0 : 1;
}
