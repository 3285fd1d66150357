// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The phit Authors

#include <gtest/gtest.h>

#include <cmath>

#include "phit/transforms.hpp"

using namespace phit;

namespace {

const WaveletPair& pair1() {
    static const auto p = make_dual(make_admissible(default_constants(), 1));
    return p;
}
const WaveletPair& pair2() {
    static const auto p = make_dual(make_admissible(default_constants(), 2));
    return p;
}

GridFunction localized(const GridSpec& spec, double sigma, double omega) {
    return GridFunction::from_function(spec, [=](std::span<const double> x) {
        return std::exp(-x[0] * x[0] / (2 * sigma * sigma)) * std::cos(omega * x[0]);
    });
}

// Coefficients by direct spatial pairing against sampled wavelets.
CoefficientField analyze_direct(const GridFunction& f, const SpectralProfile& phi, const CoefficientWindow& w) {
    CoefficientField a(f.spec(), w);
    for (const auto& Q : a.cubes()) a.at(Q) = inner(f, eval_wavelet(phi, Q, f.spec()));
    return a;
}

}  // namespace

TEST(Analyze, ZeroAndPlaneWave) {
    const GridSpec spec{1, 4, 4};
    const auto w = default_window(spec, pair1());
    EXPECT_EQ(analyze(GridFunction(spec), pair1().phi, w).max_abs(), 0.0);

    const double xi0 = lattice_frequency(spec, 1.0);
    const auto f = GridFunction::from_function(spec, [xi0](std::span<const double> x) { return std::polar(1.0, xi0 * x[0]); });
    const auto a = analyze(f, pair1().phi, w);
    double worst = 0;
    for (const auto& Q : a.cubes()) {
        const double s = std::ldexp(1.0, -Q.nu);
        const cplx want = std::sqrt(s) * std::conj(pair1().phi(s * xi0)) * std::polar(1.0, xi0 * s * static_cast<double>(Q.k[0]));
        worst = std::max(worst, std::abs(a.at(Q) - want));
    }
    EXPECT_LE(worst, 1e-12);
}

TEST(Analyze, RealEvenInputGivesRealReflectionSymmetricCoefficients) {
    const GridSpec spec{1, 4, 3};
    const auto f = localized(spec, 2.0, 3.0);  // real and even
    const auto w = default_window(spec, pair1());
    const auto a = analyze(f, pair1().phi, w);
    for (const auto& Q : a.cubes()) {
        EXPECT_LE(std::abs(a.at(Q).imag()), 1e-12);
        const std::int64_t r = ipow2(spec.ell + Q.nu);
        const std::int64_t mk = -Q.k[0];
        if (mk >= -r && mk < r) {
            EXPECT_LE(std::abs(a.at(Q) - a.at(DyadicCube{Q.nu, {mk, 0}, 1})), 1e-12);
        }
    }
}

TEST(Analyze, MatchesDirectQuadrature) {
    const GridSpec spec{1, 3, 3};
    const auto f = random_annulus(spec, 5, 0.9, 8.5);
    const auto w = default_window(spec, pair1());
    EXPECT_LE(max_abs_difference(analyze(f, pair1().phi, w), analyze_direct(f, pair1().phi, w)), 1e-12);
}

TEST(Synthesize, SingleCoefficientIsWavelet) {
    const GridSpec spec{1, 4, 4};
    const auto w = default_window(spec, pair1());
    CoefficientField a(spec, w);
    const DyadicCube Q{2, {-7, 0}, 1};
    a.at(Q) = 1.0;
    const auto ref = eval_wavelet(pair1().psi, Q, spec);
    EXPECT_LE(relative_l2_difference(synthesize(a, pair1().psi, spec), ref), 1e-12);
    EXPECT_LE(relative_l2_difference(synthesize(a, pair1().psi, spec, EnumerationStrategy::ascending(),
                                                SynthesisPath::spectral),
                                     ref),
              1e-12);
}

TEST(Synthesize, DirectAndSpectralPathsAgree) {
    for (const GridSpec spec : {GridSpec{1, 4, 3}, GridSpec{2, 2, 2}}) {
        const auto& pair = spec.n == 1 ? pair1() : pair2();
        const auto a = random_field(spec, default_window(spec, pair), 11);
        const auto d = synthesize(a, pair.psi, spec);
        const auto s = synthesize(a, pair.psi, spec, EnumerationStrategy::ascending(), SynthesisPath::spectral);
        EXPECT_LE(relative_l2_difference(d, s), 1e-11);
    }
}

TEST(Synthesize, OrderInvariance) {
    const GridSpec spec{1, 4, 3};
    const auto a = random_field(spec, default_window(spec, pair1()), 3);
    const auto ref = synthesize(a, pair1().psi, spec);
    std::vector<EnumerationStrategy> orders{EnumerationStrategy::descending(), EnumerationStrategy::interleaved()};
    for (std::uint64_t s = 0; s < 5; ++s) orders.push_back(EnumerationStrategy::random(1000 + s));
    for (const auto& o : orders) EXPECT_LE(relative_l2_difference(synthesize(a, pair1().psi, spec, o), ref), 1e-10);
}

TEST(Synthesize, EnumerationCoversEachCubeOnce) {
    const GridSpec spec{2, 1, 2};
    const auto a = random_field(spec, default_window(spec, pair2()), 1);
    for (const auto& o : {EnumerationStrategy::ascending(), EnumerationStrategy::descending(),
                          EnumerationStrategy::interleaved(), EnumerationStrategy::random(9)}) {
        auto cubes = o.enumerate(a);
        EXPECT_EQ(cubes.size(), a.total());
        std::vector<std::size_t> hits(a.total(), 0);
        for (const auto& Q : cubes) {
            std::size_t base = 0;
            for (int nu = a.window().nu_min; nu < Q.nu; ++nu) base += a.level(nu).size();
            ++hits[base + a.offset(Q.nu, Q.k)];
        }
        for (auto h : hits) EXPECT_EQ(h, 1u);
    }
}

TEST(Synthesize, Linearity) {
    const GridSpec spec{1, 4, 3};
    const auto w = default_window(spec, pair1());
    const auto a = random_field(spec, w, 1), b = random_field(spec, w, 2);
    const cplx s(0.5, 2.0), t(-1.0, 0.25);
    const auto lhs = synthesize(s * a + t * b, pair1().psi, spec);
    const auto rhs = s * synthesize(a, pair1().psi, spec) + t * synthesize(b, pair1().psi, spec);
    EXPECT_LE(relative_l2_difference(lhs, rhs), 1e-12);
    const auto f = random_annulus(spec, 4, 1, 8), g = random_annulus(spec, 5, 1, 8);
    const auto la = analyze(s * f + t * g, pair1().phi, w);
    const auto ra = s * analyze(f, pair1().phi, w) + t * analyze(g, pair1().phi, w);
    EXPECT_LE(max_abs_difference(la, ra), 1e-12 * la.max_abs());
    EXPECT_THROW(CoefficientField(spec, CoefficientWindow::full(spec, 0, 4)), ContractError);
}

TEST(Roundtrip, BandLimitedBattery) {
    EXPECT_EQ(roundtrip_error(GridFunction(GridSpec{1, 4, 3}), pair1(), default_window(GridSpec{1, 4, 3}, pair1())), 0.0);
    for (const GridSpec spec : {GridSpec{1, 4, 4}, GridSpec{2, 3, 3}}) {
        const auto& pair = spec.n == 1 ? pair1() : pair2();
        const auto w = default_window(spec, pair);
        const auto [lo, hi] = covered_band(pair, w);
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto f = random_annulus(spec, seed, lo, hi, seed % 2 == 0);
            EXPECT_LE(roundtrip_error(f, pair, w), 1e-6) << spec.n << " " << seed;
        }
        const auto f = random_annulus(spec, 99, lo, hi);
        EXPECT_LE(roundtrip_error(f, pair, w, SynthesisPath::direct), 1e-6);
    }
}

TEST(Roundtrip, NonReconstructingPairFails) {
    const GridSpec spec{1, 4, 4};
    const auto bad = pair_profiles(pair1().phi, pair1().phi);
    const auto w = default_window(spec, bad);
    const auto [lo, hi] = covered_band(bad, w);
    const auto f = random_annulus(spec, 3, lo, hi);
    EXPECT_GT(roundtrip_error(f, bad, w), 0.01);
}

TEST(Roundtrip, RejectsOutOfBandInput) {
    const GridSpec spec{1, 4, 4};
    const auto w = default_window(spec, pair1());
    const auto f = random_annulus(spec, 3, 0.2, 40);
    try {
        roundtrip_error(f, pair1(), w);
        FAIL();
    } catch (const ContractError& e) {
        EXPECT_NE(std::string(e.what()).find("out-of-band energy"), std::string::npos);
    }
}

TEST(Truncation, ExhaustingWindowsConverge) {
    const GridSpec spec{1, 10, 4};
    const auto w = default_window(spec, pair1());
    const auto f = localized(spec, 3.0, 4.0);
    const auto a = analyze(f, pair1().phi, w);
    const auto full = synthesize(a, pair1().psi, spec, EnumerationStrategy::ascending(), SynthesisPath::spectral);
    double prev = std::numeric_limits<double>::infinity();
    GridFunction last = GridFunction(spec);
    for (double R : {8.0, 16.0, 32.0, 64.0, 128.0, 256.0, 512.0}) {
        const auto part = synthesize(restrict_to(a, CoefficientWindow::ball(spec, w.nu_min, w.nu_max, R)), pair1().psi,
                                     spec, EnumerationStrategy::ascending(), SynthesisPath::spectral);
        const double err = relative_l2_difference(part, full);
        EXPECT_LE(err, prev + 1e-15) << R;
        prev = err;
        last = part;
    }
    EXPECT_LE(relative_l2_difference(last, full), 1e-12);
}

TEST(Truncation, CoefficientPairingIsIntegrable) {
    const GridSpec spec{1, 10, 4};
    const auto w = default_window(spec, pair1());
    const auto a = analyze(localized(spec, 3.0, 4.0), pair1().phi, w);
    const auto b = analyze(remove_mean(localized(spec, 2.0, 3.0)), pair1().psi, w);
    auto partial = [&](double R) {
        const auto win = CoefficientWindow::ball(spec, w.nu_min, w.nu_max, R);
        CompensatedSum<double> s;
        const auto ra = restrict_to(a, win), rb = restrict_to(b, win);
        for (int nu = win.nu_min; nu <= win.nu_max; ++nu)
            for (std::size_t i = 0; i < ra.level(nu).size(); ++i) s.add(std::abs(ra.level(nu)[i]) * std::abs(rb.level(nu)[i]));
        return s.value();
    };
    const double total = partial(2048.0);
    EXPECT_GT(total, 0.0);
    EXPECT_LE((total - partial(512.0)) / total, 1e-10);
    EXPECT_LE(partial(64.0), total);
}

TEST(Gram, DisjointLevelsVanish) {
    const GridSpec spec{1, 4, 4};
    const auto& p = pair1();
    EXPECT_EQ(gram_entry(p.psi, p.phi, DyadicCube{0, {0, 0}, 1}, DyadicCube{3, {0, 0}, 1}, spec), cplx(0.0));
    EXPECT_EQ(gram_entry(p.psi, p.phi, DyadicCube{-1, {2, 0}, 1}, DyadicCube{3, {5, 0}, 1}, spec), cplx(0.0));
    EXPECT_EQ(gram_entry_continuous(p.psi, p.phi, DyadicCube{4, {0, 0}, 1}, DyadicCube{0, {0, 0}, 1}), cplx(0.0));
}

TEST(Gram, MeyerDiagonalAndTorusAgreement) {
    const auto meyer = make_meyer();
    const GridSpec spec{1, 6, 4};
    for (const DyadicCube& Q : {DyadicCube{0, {0, 0}, 1}, DyadicCube{1, {3, 0}, 1}, DyadicCube{-2, {1, 0}, 1}}) {
        EXPECT_NEAR(std::abs(gram_entry(meyer, meyer, Q, Q, spec) - 1.0), 0.0, 1e-7);
        EXPECT_NEAR(std::abs(gram_entry_continuous(meyer, meyer, Q, Q) - 1.0), 0.0, 1e-7);
    }
    EXPECT_LE(std::abs(gram_entry(meyer, meyer, DyadicCube{0, {0, 0}, 1}, DyadicCube{1, {1, 0}, 1}, spec)), 1e-7);
    EXPECT_LE(std::abs(gram_entry(meyer, meyer, DyadicCube{0, {0, 0}, 1}, DyadicCube{0, {1, 0}, 1}, spec)), 1e-7);
}

TEST(Gram, GenericDualIsNotBiorthogonal) {
    const auto& p = pair1();
    const DyadicCube Q{0, {0, 0}, 1};
    const cplx torus = gram_entry(p.psi, p.phi, Q, Q, GridSpec{1, 10, 2});
    const cplx line = gram_entry_continuous(p.psi, p.phi, Q, Q);
    RecordProperty("gram_00", std::to_string(line.real()));
    EXPECT_GT(std::abs(line - 1.0), 1e-3);
    EXPECT_LE(std::abs(torus - line), 1e-8);
}

TEST(Projection, UnitSequenceGivesGramColumn) {
    const GridSpec spec{1, 4, 3};
    const auto& p = pair1();
    const auto w = default_window(spec, p);
    CoefficientField e(spec, w);
    const DyadicCube J0{1, {2, 0}, 1};
    e.at(J0) = 1.0;
    const auto col = projection_apply(e, p);
    double worst = 0;
    for (const auto& J : col.cubes()) worst = std::max(worst, std::abs(col.at(J) - gram_entry(p.psi, p.phi, J0, J, spec)));
    EXPECT_LE(worst, 1e-8);
}

TEST(Projection, MeyerIsBiorthogonal) {
    const GridSpec spec{1, 4, 4};
    const auto meyer = make_meyer();
    const auto p = pair_profiles(meyer, meyer);
    const auto w = default_window(spec, p);
    for (const DyadicCube& J0 : {DyadicCube{0, {0, 0}, 1}, DyadicCube{2, {-9, 0}, 1}, DyadicCube{w.nu_min, {1, 0}, 1}}) {
        CoefficientField e(spec, w);
        e.at(J0) = 1.0;
        const auto out = projection_apply(e, p);
        double worst = 0;
        for (const auto& J : out.cubes()) worst = std::max(worst, std::abs(out.at(J) - (J == J0 ? 1.0 : 0.0)));
        EXPECT_LE(worst, 1e-7);
    }
}

TEST(Projection, IdempotentOnInteriorLevels) {
    const GridSpec spec{1, 5, 4};
    const auto& p = pair1();
    const auto w = default_window(spec, p);
    const auto a = random_field(spec, w, 8);
    const auto once = projection_apply(a, p);
    const auto twice = projection_apply(once, p);
    double worst = 0, scale = 0;
    for (int nu = w.nu_min + 1; nu <= w.nu_max - 1; ++nu)
        for (std::size_t i = 0; i < once.level(nu).size(); ++i) {
            worst = std::max(worst, std::abs(twice.level(nu)[i] - once.level(nu)[i]));
            scale = std::max(scale, std::abs(once.level(nu)[i]));
        }
    EXPECT_LE(worst, 1e-7 * scale);
}

TEST(Parseval, PairingMatchesDirectQuadrature) {
    const GridSpec spec{1, 3, 3};
    const auto& p = pair1();
    const auto w = default_window(spec, p);
    const auto [lo, hi] = covered_band(p, w);
    const auto zero = parseval_pair(GridFunction(spec), GridFunction(spec), p, w);
    EXPECT_EQ(zero.lhs, cplx(0.0));
    EXPECT_EQ(zero.rhs, cplx(0.0));
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const auto f = random_annulus(spec, 10 + seed, lo, hi);
        const auto g = random_annulus(spec, 20 + seed, lo, hi, true);
        const auto r = parseval_pair(f, g, p, w);
        // oracle: spatial pairings against sampled wavelets on both sides
        const auto a = analyze_direct(f, p.phi, w), b = analyze_direct(g, p.psi, w);
        cplx rhs = 0;
        for (const auto& Q : a.cubes()) rhs += a.at(Q) * std::conj(b.at(Q));
        cplx lhs = 0;
        for (std::size_t i = 0; i < f.size(); ++i) lhs += f[i] * std::conj(g[i]);
        lhs *= spec.cell_volume();
        EXPECT_LE(std::abs(r.lhs - lhs), 1e-12 * std::abs(lhs));
        EXPECT_LE(std::abs(r.rhs - rhs), 1e-10 * std::abs(rhs));
        EXPECT_LE(std::abs(r.lhs - r.rhs) / std::abs(r.lhs), 1e-6);
    }
    const auto f = random_annulus(spec, 77, lo, hi);
    const auto r = parseval_pair(f, f, p, w);
    EXPECT_GT(r.rhs.real(), 0.0);
    EXPECT_LE(std::abs(r.rhs.imag()), 1e-8);
}

TEST(Parseval, TwoDimensional) {
    const GridSpec spec{2, 2, 3};
    const auto& p = pair2();
    const auto w = default_window(spec, p);
    const auto [lo, hi] = covered_band(p, w);
    const auto f = random_annulus(spec, 1, lo, hi), g = random_annulus(spec, 2, lo, hi);
    const auto r = parseval_pair(f, g, p, w);
    EXPECT_LE(std::abs(r.lhs - r.rhs) / std::abs(r.lhs), 1e-6);
}
