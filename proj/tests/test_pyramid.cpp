#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "phasemotion/pyramid.hpp"
#include "test_support.hpp"

using namespace phasemotion;
using testsupport::make_texture;
using testsupport::scale_image;

namespace {

GrayImage random_image(int w, int h, uint64_t seed) {
    GrayImage img(w, h);
    for (size_t i = 0; i < img.size(); ++i) img.data[i] = uniform01_at(seed, i);
    return img;
}

double band_energy(const ComplexPlane& band) {
    double e = 0.0;
    for (const cdouble& v : band.v) e += std::norm(v);
    return e;
}

}  // namespace

TEST_CASE("filter bank invariants") {
    const FilterBank bank = build_filter_bank(64, 64);

    SECTION("omega halves per scale, starting at 3*pi/8") {
        REQUIRE(bank.omega.size() == 2);
        CHECK(bank.omega[0] == 3.0 * kPi / 8.0);
        CHECK(bank.omega[1] == bank.omega[0] / 2.0);
    }

    SECTION("grids are dyadic") {
        CHECK(bank.lowpass[0].width == 64);
        CHECK(bank.lowpass[1].width == 32);
        CHECK(bank.bandpass[1][0].height == 32);
    }

    SECTION("masks are real in [0,1] and band-pass is exactly 0 at DC") {
        for (int s = 0; s < 2; ++s) {
            for (double v : bank.lowpass[s].data) {
                CHECK(v >= 0.0);
                CHECK(v <= 1.0);
            }
            for (int o = 0; o < 2; ++o) {
                for (double v : bank.bandpass[s][o].data) {
                    CHECK(v >= 0.0);
                    CHECK(v <= 1.0);
                }
                CHECK(bank.bandpass[s][o].data[0] == 0.0);
            }
        }
    }

    SECTION("X and Y band masks are transposes of each other") {
        for (int s = 0; s < 2; ++s) {
            const GrayImage& bx = bank.bandpass[s][0];
            const GrayImage& by = bank.bandpass[s][1];
            for (int y = 0; y < bx.height; ++y)
                for (int x = 0; x < bx.width; ++x)
                    CHECK(bx.at(x, y) == Catch::Approx(by.at(y, x)).margin(1e-12));
        }
    }
}

TEST_CASE("filter bank validation") {
    CHECK_THROWS_AS(build_filter_bank(12, 48), dimension_error);   // below 8*2^(s-1)
    CHECK_THROWS_AS(build_filter_bank(48, 12), dimension_error);
    PyramidSpec three;
    three.n_scales = 3;
    three.n_orientations = 2;
    CHECK_THROWS_AS(build_filter_bank(50, 48, three), dimension_error);  // not divisible by 4
    CHECK_NOTHROW(build_filter_bank(48, 48, three));

    PyramidSpec bad;
    bad.orientation_angles = {0.0, kPi};  // same orientation modulo pi
    CHECK_THROWS_AS(bad.validate(), validation_error);
    PyramidSpec none;
    none.n_scales = 0;
    none.orientation_angles = {};
    none.n_orientations = 0;
    CHECK_THROWS_AS(none.validate(), validation_error);
}

TEST_CASE("decompose basics") {
    const FilterBank bank = build_filter_bank(48, 48);

    SECTION("constant image gives zero coefficients") {
        const GrayImage img(48, 48, 0.7);
        const PyramidCoefficients coeffs = decompose(img, bank);
        for (const auto& scale : coeffs.bands)
            for (const ComplexPlane& band : scale)
                for (const cdouble& v : band.v) CHECK(std::abs(v) < 1e-9 * 48 * 48);
    }

    SECTION("scale-2 planes are half size") {
        const PyramidCoefficients coeffs = decompose(random_image(48, 48, 2), bank);
        CHECK(coeffs.bands[0][0].width == 48);
        CHECK(coeffs.bands[0][0].height == 48);
        CHECK(coeffs.bands[1][0].width == 24);
        CHECK(coeffs.bands[1][0].height == 24);
    }

    SECTION("dimension mismatch throws") {
        CHECK_THROWS_AS(decompose(GrayImage(64, 64, 0.0), bank), dimension_error);
    }

    SECTION("linearity to 1e-10 relative") {
        const GrayImage f = random_image(48, 48, 11);
        const GrayImage g = random_image(48, 48, 12);
        const double a = 0.7, b = -1.3;
        GrayImage combo(48, 48);
        for (size_t i = 0; i < combo.size(); ++i) combo.data[i] = a * f.data[i] + b * g.data[i];
        const auto df = decompose(f, bank);
        const auto dg = decompose(g, bank);
        const auto dc = decompose(combo, bank);
        for (size_t s = 0; s < dc.bands.size(); ++s)
            for (size_t o = 0; o < dc.bands[s].size(); ++o) {
                double peak = 0.0;
                for (const cdouble& v : dc.bands[s][o].v) peak = std::max(peak, std::abs(v));
                for (size_t i = 0; i < dc.bands[s][o].v.size(); ++i) {
                    const cdouble want = a * df.bands[s][o].v[i] + b * dg.bands[s][o].v[i];
                    CHECK(std::abs(dc.bands[s][o].v[i] - want) <= 1e-10 * std::max(peak, 1.0));
                }
            }
    }

    SECTION("coefficients scale exactly linearly with the input") {
        const GrayImage f = random_image(48, 48, 21);
        const auto base = decompose(f, bank);
        const auto doubled = decompose(scale_image(f, 2.0), bank);
        for (size_t s = 0; s < base.bands.size(); ++s)
            for (size_t o = 0; o < base.bands[s].size(); ++o)
                for (size_t i = 0; i < base.bands[s][o].v.size(); ++i)
                    CHECK(doubled.bands[s][o].v[i] == 2.0 * base.bands[s][o].v[i]);
    }

    SECTION("horizontal sinusoid at the scale-1 center frequency selects orientation 0") {
        GrayImage img(48, 48);
        for (int y = 0; y < 48; ++y)
            for (int x = 0; x < 48; ++x)
                img.at(x, y) = 0.5 + 0.4 * std::cos(3.0 * kPi / 8.0 * x);
        const auto coeffs = decompose(img, bank);
        const double ex = band_energy(coeffs.bands[0][0]);
        const double ey = band_energy(coeffs.bands[0][1]);
        CHECK(ex > 10.0 * ey);
    }
}

TEST_CASE("shift theorem on sub-bands") {
    const int n = 48, t = 4;
    const auto tex = testsupport::make_texture(n, n, 31, 0.0);
    const GrayImage f0 = tex.render();
    const GrayImage f1 = tex.render(t, 0.0);  // circular shift by t pixels along x
    const FilterBank bank = build_filter_bank(n, n);
    const auto d0 = decompose(f0, bank);
    const auto d1 = decompose(f1, bank);
    for (int s = 0; s < 2; ++s) {
        const int shift = t >> s;
        const ComplexPlane& a = d0.bands[s][0];
        const ComplexPlane& b = d1.bands[s][0];
        for (int y = 0; y < a.height; ++y)
            for (int x = 0; x < a.width; ++x) {
                const cdouble want = a.at(((x - shift) % a.width + a.width) % a.width, y);
                CHECK(std::abs(b.at(x, y) - want) < 1e-10);
            }
    }
}

TEST_CASE("amplitude") {
    ComplexPlane band(2, 1);
    band.at(0, 0) = cdouble{3.0, 4.0};
    band.at(1, 0) = cdouble{0.0, 0.0};
    const GrayImage amp = amplitude_of(band);
    CHECK(amp.at(0, 0) == 5.0);
    CHECK(amp.at(1, 0) == 0.0);

    SECTION("homogeneous under positive scaling") {
        const FilterBank bank = build_filter_bank(48, 48);
        const GrayImage f = random_image(48, 48, 4);
        const auto a1 = amplitude(decompose(f, bank));
        const auto a2 = amplitude(decompose(scale_image(f, 0.5), bank));
        for (size_t s = 0; s < a1.size(); ++s)
            for (size_t o = 0; o < a1[s].size(); ++o)
                for (size_t i = 0; i < a1[s][o].size(); ++i)
                    CHECK(a2[s][o].data[i] == Catch::Approx(0.5 * a1[s][o].data[i]).margin(1e-15));
    }
}

TEST_CASE("phase quadrants and range") {
    ComplexPlane band(4, 1);
    band.at(0, 0) = cdouble{1.0, 0.0};
    band.at(1, 0) = cdouble{0.0, 1.0};
    band.at(2, 0) = cdouble{-1.0, -1e-12};
    band.at(3, 0) = cdouble{-1.0, 0.0};  // boundary: must map to +pi, not -pi
    const PhaseMap pm = phase_of(band);
    CHECK(pm.value.at(0, 0) == 0.0);
    CHECK(pm.value.at(1, 0) == kHalfPi);
    CHECK(pm.value.at(2, 0) == Catch::Approx(-kPi).margin(1e-9));
    CHECK(pm.value.at(2, 0) > -kPi);
    CHECK(pm.value.at(3, 0) == kPi);
    for (size_t i = 0; i < pm.value.size(); ++i) {
        CHECK(pm.value.data[i] > -kPi);
        CHECK(pm.value.data[i] <= kPi);
    }
}

TEST_CASE("phase validity mask uses the relative amplitude floor") {
    ComplexPlane band(10, 1);
    for (int x = 0; x < 9; ++x) band.at(x, 0) = cdouble{1.0, 0.5};
    band.at(9, 0) = cdouble{1e-12, 1e-12};  // far below 1e-6 * mean amplitude
    const PhaseMap pm = phase_of(band);
    for (int x = 0; x < 9; ++x) CHECK(pm.valid[x] == 1);
    CHECK(pm.valid[9] == 0);
    CHECK(pm.value.at(9, 0) == 0.0);

    SECTION("all-zero band is entirely invalid") {
        ComplexPlane zero(4, 4);
        const PhaseMap z = phase_of(zero);
        for (uint8_t v : z.valid) CHECK(v == 0);
    }
}

TEST_CASE("illumination scaling leaves phase unchanged") {
    // broadband input so every sub-band holds real signal
    const FilterBank bank = build_filter_bank(48, 48);
    const GrayImage f = random_image(48, 48, 77);
    const auto base = phase(decompose(f, bank));

    SECTION("exactly, for power-of-two gain") {
        const auto scaled = phase(decompose(scale_image(f, 2.0), bank));
        for (size_t s = 0; s < base.size(); ++s)
            for (size_t o = 0; o < base[s].size(); ++o) {
                CHECK(scaled[s][o].valid == base[s][o].valid);
                for (size_t i = 0; i < base[s][o].value.size(); ++i)
                    if (base[s][o].valid[i] && scaled[s][o].valid[i])
                        CHECK(scaled[s][o].value.data[i] == base[s][o].value.data[i]);
            }
    }

    SECTION("to 1e-10, for arbitrary gain") {
        const auto scaled = phase(decompose(scale_image(f, 1.37), bank));
        for (size_t s = 0; s < base.size(); ++s)
            for (size_t o = 0; o < base[s].size(); ++o)
                for (size_t i = 0; i < base[s][o].value.size(); ++i)
                    if (base[s][o].valid[i] && scaled[s][o].valid[i])
                        CHECK(scaled[s][o].value.data[i] ==
                              Catch::Approx(base[s][o].value.data[i]).margin(1e-10));
    }
}
