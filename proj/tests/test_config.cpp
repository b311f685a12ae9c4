#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>

#include "bfc/config.hpp"

using namespace bfc;
using Catch::Approx;
using nlohmann::json;

namespace {
json minimal_config() {
    return json{
        {"ring",
         {{"pump_wavelength_nm", 1550.9},
          {"fsr_ghz", 384.6},
          {"linewidth_fwhm_mhz", 270.0},
          {"n_sidebands", 6},
          {"min_sideband", 2},
          {"weight_model", {{"kind", "flat"}}}}},
        {"source", {{"pair_rate_hz", 1e6}, {"duration_s", 1.0}, {"seed", 42}}},
        {"detectors",
         {{"signal", {{"efficiency", 0.25}}}, {"idler", {{"efficiency", 0.25}}}}},
    };
}
}  // namespace

TEST_CASE("minimal config parses with defaults") {
    auto cfg = parse_config(minimal_config());
    REQUIRE(cfg.ring.n_sidebands == 6);
    REQUIRE(cfg.source.seed == 42);
    REQUIRE(cfg.tia.bin_ps == 100.0);
    REQUIRE(cfg.tia.range_ns == 40.0);
    REQUIRE(cfg.schmidt.k_lo == 2);
    REQUIRE(cfg.schmidt.k_hi == 7);
    REQUIRE(cfg.franson.cfg.tau_s_ns == 6.0);
    REQUIRE(cfg.output_dir == "out");
}

TEST_CASE("unknown keys are rejected with the offending path") {
    auto bad = minimal_config();
    bad["ring"]["fsr_mhz"] = 1.0;
    try {
        parse_config(bad);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        REQUIRE(std::string(e.what()).find("ring.fsr_mhz") != std::string::npos);
    }
}

TEST_CASE("missing required fields name themselves") {
    auto bad = minimal_config();
    bad["source"].erase("pair_rate_hz");
    try {
        parse_config(bad);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        REQUIRE(std::string(e.what()).find("source.pair_rate_hz") != std::string::npos);
    }
}

TEST_CASE("type mismatches name the field") {
    auto bad = minimal_config();
    bad["ring"]["fsr_ghz"] = "fast";
    try {
        parse_config(bad);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        REQUIRE(std::string(e.what()).find("ring.fsr_ghz") != std::string::npos);
    }
}

TEST_CASE("module invariants are enforced at parse time") {
    SECTION("linewidth/FSR ratio") {
        auto bad = minimal_config();
        bad["ring"]["linewidth_fwhm_mhz"] = 400000.0;
        REQUIRE_THROWS(parse_config(bad));
    }
    SECTION("detector efficiency range") {
        auto bad = minimal_config();
        bad["detectors"]["signal"]["efficiency"] = 1.5;
        REQUIRE_THROWS(parse_config(bad));
    }
    SECTION("gate width cannot exceed the period") {
        auto bad = minimal_config();
        bad["detectors"]["signal"]["gate"] = {{"period_ps", 100.0}, {"width_ps", 200.0}};
        REQUIRE_THROWS(parse_config(bad));
    }
    SECTION("franson imbalance vs coherence times") {
        auto bad = minimal_config();
        bad["franson"] = {{"tau_s_ns", 0.2}, {"tau_i_ns", 0.2}};
        REQUIRE_THROWS(parse_config(bad));
    }
    SECTION("schmidt range must sit inside the comb") {
        auto bad = minimal_config();
        bad["schmidt"] = {{"k_lo", 2}, {"k_hi", 11}};
        REQUIRE_THROWS(parse_config(bad));
    }
    SECTION("explicit weights must match the sideband count") {
        auto bad = minimal_config();
        bad["ring"]["weight_model"] = {{"kind", "explicit"}, {"weights", {1.0, 2.0}}};
        REQUIRE_THROWS(parse_config(bad));
    }
    SECTION("unknown weight model kind") {
        auto bad = minimal_config();
        bad["ring"]["weight_model"] = {{"kind", "gaussian"}};
        REQUIRE_THROWS(parse_config(bad));
    }
}

TEST_CASE("full config round trip") {
    auto full = minimal_config();
    full["ring"]["weight_model"] = {{"kind", "lorentzian_rolloff"}, {"scale", 4.5}};
    full["tia"] = {{"bin_ps", 50.0}, {"range_ns", 20.0}, {"window_ns", 1.0}, {"sideband_pair", 3}};
    full["franson"] = {{"tau_s_ns", 6.0},
                       {"tau_i_ns", 6.0},
                       {"base_visibility", 0.8},
                       {"common_scan", {{"start", 0.0}, {"stop", 13.0}, {"points", 27}}}};
    full["dispersion"] = {{"d_signal_ns_per_nm", 2.0},
                          {"d_idler_ns_per_nm", -2.0},
                          {"ref_wavelength_nm", 1550.9},
                          {"insertion_loss", 0.5}};
    full["schmidt"] = {{"k_lo", 2}, {"k_hi", 7}};
    full["output_dir"] = "artifacts";

    auto cfg = parse_config(full);
    REQUIRE(std::holds_alternative<LorentzianRolloff>(cfg.ring.weight_model));
    REQUIRE(cfg.tia.bin_ps == 50.0);
    REQUIRE(cfg.tia_sideband_pair == 3);
    REQUIRE(cfg.franson.cfg.base_visibility == Approx(0.8));
    REQUIRE(cfg.franson.common_scan_fs.points == 27);
    REQUIRE(cfg.dispersion.insertion_loss == Approx(0.5));
    REQUIRE(cfg.output_dir == "artifacts");
}
