#pragma once

#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bfc/correlator.hpp"
#include "bfc/dispersion.hpp"
#include "bfc/event_engine.hpp"
#include "bfc/franson.hpp"
#include "bfc/spectral_model.hpp"

namespace bfc {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ScanGrid {
    double start = 0.0;
    double stop = 1.0;
    int points = 101;

    std::vector<double> linspace() const {
        std::vector<double> out;
        out.reserve(static_cast<std::size_t>(points));
        for (int i = 0; i < points; ++i)
            out.push_back(start + (stop - start) * static_cast<double>(i) / (points - 1));
        return out;
    }

    void validate(const std::string& where) const {
        if (points < 2) throw ConfigError("config error at " + where + ": points must be >= 2");
        if (stop <= start) throw ConfigError("config error at " + where + ": stop must exceed start");
    }
};

struct FransonSection {
    FransonConfig cfg;
    ScanGrid common_scan_fs{0.0, 13.0, 261};
    ScanGrid taud_scan_fs{-13.0, 13.0, 521};
    ScanGrid envelope_scan_ps{0.0, 4.0, 2001};
};

struct DispersionSection {
    double d_signal_ns_per_nm = 2.0;
    double d_idler_ns_per_nm = -2.0;
    double ref_wavelength_nm = 1550.9;
    double insertion_loss = 0.5;

    DispersionElement signal_element() const {
        return DispersionElement{d_signal_ns_per_nm, ref_wavelength_nm, insertion_loss};
    }
    DispersionElement idler_element() const {
        return DispersionElement{d_idler_ns_per_nm, ref_wavelength_nm, insertion_loss};
    }
    DispersionElement none_element() const { return DispersionElement{0.0, ref_wavelength_nm, 1.0}; }
};

struct SchmidtSection {
    int k_lo = 2;
    int k_hi = 7;
};

struct ExperimentConfig {
    RingParams ring;
    SourceConfig source;
    ChannelConfig detector_signal;
    ChannelConfig detector_idler;
    TiaConfig tia;
    int tia_sideband_pair = 2;
    FransonSection franson;
    DispersionSection dispersion;
    SchmidtSection schmidt;
    std::string output_dir = "out";

    void validate() const {
        ring.validate();
        source.validate();
        detector_signal.validate();
        detector_idler.validate();
        tia.validate();
        if (tia_sideband_pair < ring.min_sideband || tia_sideband_pair > ring.max_sideband())
            throw ConfigError("config error at tia.sideband_pair: outside populated sidebands");
        franson.cfg.validate(ring);
        franson.common_scan_fs.validate("franson.common_scan");
        franson.taud_scan_fs.validate("franson.taud_scan");
        franson.envelope_scan_ps.validate("franson.envelope_scan");
        dispersion.signal_element().validate();
        dispersion.idler_element().validate();
        if (schmidt.k_lo > schmidt.k_hi || schmidt.k_lo < ring.min_sideband ||
            schmidt.k_hi > ring.max_sideband())
            throw ConfigError("config error at schmidt: k range outside populated sidebands");
    }
};

namespace detail {

using json = nlohmann::json;

inline void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw ConfigError("config error at " + path + ": expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError("config error at " + path + "." + it.key() + ": unknown key");
}

template <typename T>
T field(const json& obj, const std::string& path, const std::string& key) {
    if (!obj.contains(key)) throw ConfigError("config error at " + path + "." + key + ": missing");
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config error at " + path + "." + key + ": wrong type");
    }
}

template <typename T>
T field_or(const json& obj, const std::string& path, const std::string& key, T fallback) {
    if (!obj.contains(key)) return fallback;
    return field<T>(obj, path, key);
}

inline ScanGrid parse_grid(const json& obj, const std::string& path, const ScanGrid& fallback) {
    check_keys(obj, path, {"start", "stop", "points"});
    ScanGrid g = fallback;
    g.start = field_or<double>(obj, path, "start", g.start);
    g.stop = field_or<double>(obj, path, "stop", g.stop);
    g.points = field_or<int>(obj, path, "points", g.points);
    return g;
}

inline ChannelConfig parse_channel(const json& obj, const std::string& path) {
    check_keys(obj, path, {"efficiency", "dark_rate_hz", "jitter_sigma_ps", "gate"});
    ChannelConfig ch;
    ch.efficiency = field<double>(obj, path, "efficiency");
    ch.dark_rate_hz = field_or<double>(obj, path, "dark_rate_hz", 0.0);
    ch.jitter_sigma_ps = field_or<double>(obj, path, "jitter_sigma_ps", 0.0);
    if (obj.contains("gate")) {
        const auto& g = obj.at("gate");
        check_keys(g, path + ".gate", {"period_ps", "width_ps"});
        ch.gate = GateConfig{field<double>(g, path + ".gate", "period_ps"),
                             field<double>(g, path + ".gate", "width_ps")};
    }
    return ch;
}

}  // namespace detail

inline ExperimentConfig parse_config(const nlohmann::json& root) {
    using detail::check_keys;
    using detail::field;
    using detail::field_or;

    check_keys(root, "<root>",
               {"ring", "source", "detectors", "tia", "franson", "dispersion", "schmidt", "output_dir"});
    ExperimentConfig cfg;

    const auto& ring = root.contains("ring") ? root.at("ring")
                                             : throw ConfigError("config error at ring: missing section");
    check_keys(ring, "ring",
               {"pump_wavelength_nm", "fsr_ghz", "linewidth_fwhm_mhz", "n_sidebands", "min_sideband",
                "weight_model"});
    cfg.ring.pump_wavelength_nm = field<double>(ring, "ring", "pump_wavelength_nm");
    cfg.ring.fsr_ghz = field<double>(ring, "ring", "fsr_ghz");
    cfg.ring.linewidth_fwhm_mhz = field<double>(ring, "ring", "linewidth_fwhm_mhz");
    cfg.ring.n_sidebands = field<int>(ring, "ring", "n_sidebands");
    cfg.ring.min_sideband = field_or<int>(ring, "ring", "min_sideband", 2);
    if (ring.contains("weight_model")) {
        const auto& wm = ring.at("weight_model");
        check_keys(wm, "ring.weight_model", {"kind", "scale", "weights"});
        const auto kind = field<std::string>(wm, "ring.weight_model", "kind");
        if (kind == "flat") {
            cfg.ring.weight_model = FlatWeights{};
        } else if (kind == "lorentzian_rolloff") {
            cfg.ring.weight_model = LorentzianRolloff{field<double>(wm, "ring.weight_model", "scale")};
        } else if (kind == "explicit") {
            cfg.ring.weight_model =
                ExplicitWeights{field<std::vector<double>>(wm, "ring.weight_model", "weights")};
        } else {
            throw ConfigError("config error at ring.weight_model.kind: expected flat, lorentzian_rolloff "
                              "or explicit");
        }
    }

    const auto& source = root.contains("source") ? root.at("source")
                                                 : throw ConfigError("config error at source: missing section");
    check_keys(source, "source", {"pair_rate_hz", "duration_s", "seed"});
    cfg.source.pair_rate_hz = field<double>(source, "source", "pair_rate_hz");
    cfg.source.duration_s = field<double>(source, "source", "duration_s");
    cfg.source.seed = field<uint64_t>(source, "source", "seed");

    const auto& det = root.contains("detectors")
                          ? root.at("detectors")
                          : throw ConfigError("config error at detectors: missing section");
    check_keys(det, "detectors", {"signal", "idler"});
    if (!det.contains("signal") || !det.contains("idler"))
        throw ConfigError("config error at detectors: both signal and idler sections are required");
    cfg.detector_signal = detail::parse_channel(det.at("signal"), "detectors.signal");
    cfg.detector_idler = detail::parse_channel(det.at("idler"), "detectors.idler");

    if (root.contains("tia")) {
        const auto& tia = root.at("tia");
        check_keys(tia, "tia", {"bin_ps", "range_ns", "window_ns", "sideband_pair"});
        cfg.tia.bin_ps = field_or<double>(tia, "tia", "bin_ps", cfg.tia.bin_ps);
        cfg.tia.range_ns = field_or<double>(tia, "tia", "range_ns", cfg.tia.range_ns);
        cfg.tia.window_ns = field_or<double>(tia, "tia", "window_ns", cfg.tia.window_ns);
        cfg.tia_sideband_pair = field_or<int>(tia, "tia", "sideband_pair", cfg.tia_sideband_pair);
    }

    if (root.contains("franson")) {
        const auto& fr = root.at("franson");
        check_keys(fr, "franson",
                   {"tau_s_ns", "tau_i_ns", "base_visibility", "pump_coherence_ns", "common_scan",
                    "taud_scan", "envelope_scan"});
        cfg.franson.cfg.tau_s_ns = field_or<double>(fr, "franson", "tau_s_ns", cfg.franson.cfg.tau_s_ns);
        cfg.franson.cfg.tau_i_ns = field_or<double>(fr, "franson", "tau_i_ns", cfg.franson.cfg.tau_i_ns);
        cfg.franson.cfg.base_visibility =
            field_or<double>(fr, "franson", "base_visibility", cfg.franson.cfg.base_visibility);
        cfg.franson.cfg.pump_coherence_ns =
            field_or<double>(fr, "franson", "pump_coherence_ns", cfg.franson.cfg.pump_coherence_ns);
        if (fr.contains("common_scan"))
            cfg.franson.common_scan_fs =
                detail::parse_grid(fr.at("common_scan"), "franson.common_scan", cfg.franson.common_scan_fs);
        if (fr.contains("taud_scan"))
            cfg.franson.taud_scan_fs =
                detail::parse_grid(fr.at("taud_scan"), "franson.taud_scan", cfg.franson.taud_scan_fs);
        if (fr.contains("envelope_scan"))
            cfg.franson.envelope_scan_ps = detail::parse_grid(fr.at("envelope_scan"),
                                                              "franson.envelope_scan",
                                                              cfg.franson.envelope_scan_ps);
    }

    if (root.contains("dispersion")) {
        const auto& d = root.at("dispersion");
        check_keys(d, "dispersion",
                   {"d_signal_ns_per_nm", "d_idler_ns_per_nm", "ref_wavelength_nm", "insertion_loss"});
        cfg.dispersion.d_signal_ns_per_nm =
            field_or<double>(d, "dispersion", "d_signal_ns_per_nm", cfg.dispersion.d_signal_ns_per_nm);
        cfg.dispersion.d_idler_ns_per_nm =
            field_or<double>(d, "dispersion", "d_idler_ns_per_nm", cfg.dispersion.d_idler_ns_per_nm);
        cfg.dispersion.ref_wavelength_nm =
            field_or<double>(d, "dispersion", "ref_wavelength_nm", cfg.dispersion.ref_wavelength_nm);
        cfg.dispersion.insertion_loss =
            field_or<double>(d, "dispersion", "insertion_loss", cfg.dispersion.insertion_loss);
    }

    if (root.contains("schmidt")) {
        const auto& s = root.at("schmidt");
        check_keys(s, "schmidt", {"k_lo", "k_hi"});
        cfg.schmidt.k_lo = field_or<int>(s, "schmidt", "k_lo", cfg.ring.min_sideband);
        cfg.schmidt.k_hi = field_or<int>(s, "schmidt", "k_hi", cfg.ring.max_sideband());
    } else {
        cfg.schmidt.k_lo = cfg.ring.min_sideband;
        cfg.schmidt.k_hi = cfg.ring.max_sideband();
    }
    cfg.output_dir = field_or<std::string>(root, "<root>", "output_dir", cfg.output_dir);

    cfg.validate();
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    return parse_config(root);
}

}  // namespace bfc
