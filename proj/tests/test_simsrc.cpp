#include <cmath>
#include <numbers>

#include "cryodaq/error.hpp"
#include "cryodaq/simsrc.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cryodaq;
using namespace cryodaq::simsrc;
using testsupport::Rng;

TEST_CASE("field ramp examples") {
    CHECK(field_at(FieldRampProfile::slow_ramp(), 5.0) == 15.0);
    CHECK(field_at(FieldRampProfile::fast_ramp(), 0.05) == 1.0);
    CHECK(field_at(FieldRampProfile::slow_ramp(), 0.0) == 0.0);
    CHECK(field_at(FieldRampProfile::fast_ramp(), 0.0) == 0.0);
    CHECK(field_at(FieldRampProfile::custom(2.0, 3.0), 0.0) == 0.0);
    CHECK_THROWS_AS(FieldRampProfile::custom(1.0, -1.0), Error);
}

TEST_CASE("property: field is flat after the ramp and piecewise linear before") {
    Rng rng(31);
    for (int i = 0; i < 2000; ++i) {
        const auto p = i % 3 == 0   ? FieldRampProfile::slow_ramp()
                       : i % 3 == 1 ? FieldRampProfile::fast_ramp()
                                    : FieldRampProfile::custom(testsupport::uniform(rng, -10, 10),
                                                               testsupport::uniform(rng, 0, 10));
        const double end = field_at(p, p.duration_s);
        REQUIRE(field_at(p, p.duration_s + testsupport::uniform(rng, 0.0, 1e6)) == end);
        const double t = testsupport::uniform(rng, 0.0, p.duration_s);
        REQUIRE(field_at(p, t) == doctest::Approx(p.rate_T_per_s * t));
    }
}

TEST_CASE("cooldown profile") {
    CooldownProfile c{300.0, 80.0, 3600.0};
    CHECK(cooldown_at(c, 0.0) == 300.0);
    CooldownProfile z{300.0, 0.0, 3600.0};
    CHECK(cooldown_at(z, 3600.0) == doctest::Approx(300.0 / std::numbers::e).epsilon(1e-15));
    CHECK(std::abs(cooldown_at(c, 50 * 3600.0) - 80.0) < 1e-9);
    CHECK_THROWS_AS(validate(CooldownProfile{300.0, 80.0, 0.0}), Error);
}

TEST_CASE("voltage tap examples") {
    QuenchScenario sc;
    sc.noise_amp_V = 0.0;
    sc.mutual_inductance_H = 0.0;
    sc.onset_time_s = 1.0;
    sc.resistive_slope_V_per_s = 100.0;
    CHECK(voltage_tap_at(sc, 1000.0, 0.5) == 0.0);
    CHECK(voltage_tap_at(sc, 1000.0, 1.02) == doctest::Approx(2.0).epsilon(1e-12));
    sc.noise_amp_V = 0.01;
    sc.seed = 99;
    CHECK(testsupport::bit_equal(voltage_tap_at(sc, 0.0, 0.123), voltage_tap_at(sc, 0.0, 0.123)));
}

TEST_CASE("scenario validation bounds current at 50 kA") {
    QuenchScenario sc;
    sc.current_amps = 50000.0;
    CHECK_NOTHROW(validate(sc));
    sc.current_amps = 50001.0;
    CHECK_THROWS_AS(validate(sc), Error);
}

TEST_CASE("property: zero-noise tap is nondecreasing after onset") {
    Rng rng(32);
    for (int c = 0; c < 200; ++c) {
        QuenchScenario sc;
        sc.onset_time_s = testsupport::uniform(rng, 0.0, 1.0);
        sc.resistive_slope_V_per_s = testsupport::uniform(rng, 0.0, 1000.0);
        sc.mutual_inductance_H = testsupport::uniform(rng, 0.0, 1e-3);
        const double didt = testsupport::uniform(rng, 0.0, 1000.0);
        double prev = voltage_tap_at(sc, didt, sc.onset_time_s);
        for (int k = 1; k <= 1000; ++k) {
            const double v = voltage_tap_at(sc, didt, sc.onset_time_s + k * 1e-3);
            REQUIRE(v >= prev);
            prev = v;
        }
    }
}

TEST_CASE("slow channels") {
    SlowChannelParams p{2.5, 0.0, 600.0, 0.0};
    for (double t : {0.0, 1.0, 123.4, 1e5}) CHECK(slow_channel_at(SlowKind::Pressure, p, t) == 2.5);
    p.amplitude = 0.5;
    Rng rng(33);
    for (int i = 0; i < 1000; ++i) {
        const double t = testsupport::uniform(rng, 0.0, 1e4);
        const double v = slow_channel_at(SlowKind::FlowRate, p, t);
        REQUIRE(v >= 2.0);
        REQUIRE(v <= 3.0);
        REQUIRE(testsupport::bit_equal(v, slow_channel_at(SlowKind::FlowRate, p, t)));
    }
}

TEST_CASE("spectrum frames") {
    SpectrumParams p;
    const auto f = spectrum_at(p, 2.0);
    REQUIRE(f.size() == 16);
    CHECK(f[0].frequency_hz == 10.0);
    CHECK(f[15].frequency_hz == 160.0);
    for (const auto& fr : f) {
        CHECK(fr.time_index == 2.0);
        const double x = fr.frequency_hz / p.corner_hz;
        CHECK(fr.amplitude == doctest::Approx(1.0 / std::sqrt(1 + x * x)));
        CHECK(fr.phase_shift == doctest::Approx(-std::atan(x)));
    }
}

TEST_CASE("noise generator") {
    // xoshiro256** reference: state seeded by splitmix64(0) sequence
    std::uint64_t s = 0;
    CHECK(splitmix64(s) == 0xE220A8397B1DCDAFULL);
    CHECK(splitmix64(s) == 0x6E789E6AA1B965F4ULL);
    Rng rng(34);
    for (int i = 0; i < 10000; ++i) {
        const double t = testsupport::uniform(rng, 0.0, 100.0);
        const double v = noise_at(7, t, 0.25);
        REQUIRE(v >= -0.25);
        REQUIRE(v <= 0.25);
        REQUIRE(testsupport::bit_equal(v, noise_at(7, t, 0.25)));
    }
    CHECK(noise_at(7, 0.5, 1.0) != noise_at(8, 0.5, 1.0));
    CHECK(channel_seed(1, 0) != channel_seed(1, 1));
    Xoshiro256 g(5);
    for (int i = 0; i < 1000; ++i) {
        const double u = g.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
    }
}
