// bfc-sim: experiment runner for the biphoton frequency comb simulator.
// Parses a JSON config, runs named experiments and writes CSV/SVG artifacts
// plus a manifest that pins the inputs (config hash, seed) and outputs.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bfc/bfc.hpp"

namespace fs = std::filesystem;

namespace {

uint64_t fnv1a64(const std::string& bytes) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// Artifacts are accumulated in memory and flushed together so the manifest
// can be written last with every output hash in hand.
class ArtifactSet {
  public:
    explicit ArtifactSet(fs::path dir) : dir_(std::move(dir)) {}

    void add(const std::string& name, const std::string& content) { files_[name] = content; }

    std::ostringstream& stream(const std::string& name) { return streams_[name]; }

    void flush_and_write_manifest(const std::string& config_path, const std::string& config_bytes,
                                  uint64_t seed, const std::string& experiment) {
        for (auto& [name, os] : streams_) files_[name] = os.str();
        streams_.clear();
        fs::create_directories(dir_);
        nlohmann::ordered_json manifest;
        manifest["config_path"] = config_path;
        manifest["config_fnv1a64"] = hex64(fnv1a64(config_bytes));
        manifest["seed"] = seed;
        manifest["experiment"] = experiment;
        auto outputs = nlohmann::ordered_json::array();
        for (const auto& [name, content] : files_) {
            std::ofstream out(dir_ / name, std::ios::binary);
            if (!out) throw std::runtime_error("cannot write artifact: " + (dir_ / name).string());
            out << content;
            outputs.push_back({{"file", name}, {"fnv1a64", hex64(fnv1a64(content))}, {"bytes", content.size()}});
        }
        manifest["outputs"] = outputs;
        std::ofstream mout(dir_ / "manifest.json", std::ios::binary);
        mout << manifest.dump(2) << '\n';
    }

  private:
    fs::path dir_;
    std::map<std::string, std::string> files_;    // ordered: deterministic manifest
    std::map<std::string, std::ostringstream> streams_;
};

std::string kv_csv(const std::vector<std::pair<std::string, double>>& rows) {
    std::ostringstream os;
    os << "key,value\n";
    for (const auto& [k, v] : rows) os << k << ',' << bfc::detail::num(v) << '\n';
    return os.str();
}

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        out.push_back(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    return out;
}

void run_correlate(const bfc::ExperimentConfig& cfg, const bfc::BiphotonState& state, ArtifactSet& art) {
    const int k = cfg.tia_sideband_pair;
    auto pairs = bfc::generate_pairs(state, cfg.source);
    std::vector<bfc::PairEvent> selected;
    for (const auto& p : pairs)
        if (p.k == k) selected.push_back(p);
    const double duration = cfg.source.duration_ps();
    auto sig = bfc::detect(selected, bfc::Channel::signal, cfg.detector_signal, duration, cfg.source.seed);
    auto idl = bfc::detect(selected, bfc::Channel::idler, cfg.detector_idler, duration, cfg.source.seed);
    auto hist = bfc::cross_correlate(sig, idl, cfg.tia.bin_ps, cfg.tia.range_ps());

    const std::string stem = "correlation_S" + std::to_string(k) + "I" + std::to_string(k);
    bfc::write_histogram_csv(art.stream(stem + ".csv"), hist);
    auto curve = bfc::to_curve(hist, stem);
    art.add(stem + ".svg",
            bfc::emit_svg({bfc::Series{stem, curve.delays_ps, curve.values}},
                          bfc::PlotStyle{"Time correlation " + stem, "delay (ps)", "coincidences"}));

    std::vector<std::pair<std::string, double>> stats;
    stats.emplace_back("car", bfc::car(hist, cfg.tia.window_ps()));
    try {
        stats.emplace_back("fwhm_ps", bfc::correlation_fwhm(curve));
    } catch (const std::exception&) {
        stats.emplace_back("fwhm_ps", -1.0);
    }
    stats.emplace_back("analytic_fwhm_ps", std::log(2.0) / state.params.gamma_rad_per_ps());
    art.add("correlate_summary.csv", kv_csv(stats));
}

void run_jsi(const bfc::ExperimentConfig& cfg, const bfc::BiphotonState& state, ArtifactSet& art) {
    auto jsi = bfc::measure_jsi(state, cfg.source, cfg.detector_signal, cfg.detector_idler,
                                cfg.schmidt.k_lo, cfg.schmidt.k_hi, cfg.tia);
    bfc::write_jsi_csv(art.stream("jsi.csv"), jsi);
    art.add("jsi.svg", bfc::emit_svg(jsi, bfc::PlotStyle{"Measured joint spectral intensity"}));
    bfc::write_jsi_csv(art.stream("jsi_predicted.csv"), bfc::predicted_jsi(state));
}

void run_franson_common(const bfc::ExperimentConfig& cfg, const bfc::BiphotonState& state,
                        ArtifactSet& art) {
    auto scan = bfc::fringe_scan(state, cfg.franson.cfg, bfc::ScanAxis::common_delay,
                                 cfg.franson.common_scan_fs.linspace());
    bfc::write_scan_csv(art.stream("franson_common.csv"), scan);
    art.add("franson_common.svg",
            bfc::emit_svg({bfc::Series{"coincidence rate", scan.delays_fs, scan.coincidences}},
                          bfc::PlotStyle{"Franson fringes, common delay scan", "delay (fs)", "C"}));
    auto fit = bfc::fit_visibility(scan);
    art.add("franson_common_fit.csv",
            kv_csv({{"visibility", fit.visibility},
                    {"stderr", fit.stderr_visibility},
                    {"phase_rad", fit.phase_rad},
                    {"period_fs", bfc::kTwoPi / scan.carrier_rad_per_fs},
                    {"bell_witness", fit.bell_witness ? 1.0 : 0.0}}));
}

void run_franson_taud(const bfc::ExperimentConfig& cfg, const bfc::BiphotonState& state,
                      ArtifactSet& art) {
    auto fringes = bfc::fringe_scan(state, cfg.franson.cfg, bfc::ScanAxis::tau_d,
                                    cfg.franson.taud_scan_fs.linspace());
    bfc::write_scan_csv(art.stream("franson_taud.csv"), fringes);
    art.add("franson_taud.svg",
            bfc::emit_svg({bfc::Series{"coincidence rate", fringes.delays_fs, fringes.coincidences},
                           bfc::Series{"envelope", fringes.delays_fs, fringes.visibility, "#d62728"}},
                          bfc::PlotStyle{"Franson fringes vs tau_d", "tau_d offset (fs)", "C"}));

    const auto& grid = cfg.franson.envelope_scan_ps;
    auto env_fs = linspace(grid.start * 1e3, grid.stop * 1e3, static_cast<std::size_t>(grid.points));
    auto env = bfc::fringe_scan(state, cfg.franson.cfg, bfc::ScanAxis::tau_d, env_fs);
    bfc::write_scan_csv(art.stream("franson_envelope.csv"), env);
    art.add("franson_envelope.svg",
            bfc::emit_svg({bfc::Series{"fringes", env.delays_fs, env.coincidences},
                           bfc::Series{"envelope", env.delays_fs, env.visibility, "#d62728"}},
                          bfc::PlotStyle{"Fringe envelope revival", "tau_d offset (fs)", "C"}));
}

void run_dispersion(const bfc::ExperimentConfig& cfg, const bfc::BiphotonState& state, ArtifactSet& art) {
    struct Case {
        std::string name;
        bfc::DispersionElement d_s;
        bfc::DispersionElement d_i;
    };
    const auto& dsp = cfg.dispersion;
    const std::vector<Case> cases = {
        {"none", dsp.none_element(), dsp.none_element()},
        {"signal", dsp.signal_element(), dsp.none_element()},
        {"idler", dsp.none_element(), dsp.idler_element()},
        {"both", dsp.signal_element(), dsp.idler_element()},
    };

    const double duration = cfg.source.duration_ps();
    auto pairs = bfc::generate_pairs(state, cfg.source);
    auto grid = linspace(-cfg.tia.range_ps(), cfg.tia.range_ps(), 4001);

    for (const auto& c : cases) {
        // analytic curve
        auto curve = bfc::dispersed_correlation(state, c.d_s, c.d_i, grid);
        bfc::write_curve_csv(art.stream("dispersion_" + c.name + "_analytic.csv"), curve);

        // event pipeline: detect (gate deferred), disperse each arm, gate, correlate
        bfc::ChannelConfig ch_s = cfg.detector_signal;
        bfc::ChannelConfig ch_i = cfg.detector_idler;
        auto gate_s = ch_s.gate;
        auto gate_i = ch_i.gate;
        ch_s.gate.reset();
        ch_i.gate.reset();
        auto sig = bfc::detect(pairs, bfc::Channel::signal, ch_s, duration, cfg.source.seed);
        auto idl = bfc::detect(pairs, bfc::Channel::idler, ch_i, duration, cfg.source.seed);
        sig = bfc::apply_dispersion(state.params, sig, c.d_s, cfg.source.seed + 1);
        idl = bfc::apply_dispersion(state.params, idl, c.d_i, cfg.source.seed + 2);
        if (gate_s) sig = bfc::apply_gate(sig, *gate_s);
        if (gate_i) idl = bfc::apply_gate(idl, *gate_i);
        auto hist = bfc::cross_correlate(sig, idl, cfg.tia.bin_ps, cfg.tia.range_ps());
        if (gate_s) hist = bfc::compensate_gate(hist, *gate_s);
        bfc::write_histogram_csv(art.stream("dispersion_" + c.name + ".csv"), hist);
        auto mc_curve = bfc::to_curve(hist);
        art.add("dispersion_" + c.name + ".svg",
                bfc::emit_svg({bfc::Series{"events", mc_curve.delays_ps, mc_curve.values}},
                              bfc::PlotStyle{"Time correlation, dispersion: " + c.name, "delay (ps)",
                                             "coincidences"}));

        if (c.name == "signal") {
            double max_v = 0.0;
            for (double v : curve.values) max_v = std::max(max_v, v);
            auto peaks = bfc::peak_positions(curve, 0.05 * max_v);
            bfc::write_peaks_csv(art.stream("dispersion_signal_peaks.csv"), peaks);
            if (peaks.size() == state.weights.w.size()) {
                auto map = bfc::frequency_time_map_check(bfc::predicted_jsi(state), peaks);
                auto& os = art.stream("freq_time_map.csv");
                os << "k,jsi_diag,peak_height,ratio\n";
                for (const auto& e : map)
                    os << e.k << ',' << bfc::detail::num(e.jsi_diag) << ',' << bfc::detail::num(e.peak_height)
                       << ',' << bfc::detail::num(e.ratio) << '\n';
            }
        }
    }
}

void run_schmidt(const bfc::ExperimentConfig& cfg, const bfc::BiphotonState& state, ArtifactSet& art) {
    auto result = bfc::simulate_schmidt_pipeline(state, cfg.source, cfg.detector_signal, cfg.detector_idler,
                                                 cfg.schmidt.k_lo, cfg.schmidt.k_hi, cfg.tia,
                                                 cfg.source.seed);
    bfc::write_jsi_csv(art.stream("schmidt_jsi.csv"), result.jsi);
    bfc::write_schmidt_csv(art.stream("schmidt_full.csv"), result.full);
    bfc::write_schmidt_csv(art.stream("schmidt_diag.csv"), result.diag);

    // analytic reference from the configured weights
    double purity = 0.0;
    for (double w : state.weights.w) purity += w * w;
    art.add("schmidt_summary.csv", kv_csv({{"k_full", result.full.schmidt_number},
                                           {"k_diag", result.diag.schmidt_number},
                                           {"bits_full", result.full.effective_bits},
                                           {"k_analytic_weights", 1.0 / purity}}));
}

int run_command(const std::string& config_path, const std::string& experiment,
                std::optional<uint64_t> seed_override, std::optional<std::string> out_override) {
    std::ifstream cfg_in(config_path, std::ios::binary);
    if (!cfg_in) {
        std::cerr << "error: cannot open config file: " << config_path << "\n";
        return 1;
    }
    std::stringstream cfg_bytes;
    cfg_bytes << cfg_in.rdbuf();

    bfc::ExperimentConfig cfg = bfc::load_config(config_path);
    if (seed_override) cfg.source.seed = *seed_override;

    std::string out_dir = cfg.output_dir;
    if (const char* env = std::getenv("BFC_SIM_OUT"); env && *env) out_dir = env;
    if (out_override) out_dir = *out_override;

    const auto state = bfc::BiphotonState::make(cfg.ring);
    ArtifactSet art{fs::path(out_dir)};

    const std::vector<std::string> known = {"correlate", "jsi", "franson_common", "franson_taud",
                                            "dispersion", "schmidt", "all"};
    if (std::find(known.begin(), known.end(), experiment) == known.end()) {
        std::cerr << "error: unknown experiment '" << experiment << "'\n";
        return 1;
    }
    const bool all = experiment == "all";
    if (all || experiment == "correlate") run_correlate(cfg, state, art);
    if (all || experiment == "jsi") run_jsi(cfg, state, art);
    if (all || experiment == "franson_common") run_franson_common(cfg, state, art);
    if (all || experiment == "franson_taud") run_franson_taud(cfg, state, art);
    if (all || experiment == "dispersion") run_dispersion(cfg, state, art);
    if (all || experiment == "schmidt") run_schmidt(cfg, state, art);

    art.flush_and_write_manifest(config_path, cfg_bytes.str(), cfg.source.seed, experiment);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bfc-sim: biphoton frequency comb simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string experiment = "all";
    std::optional<uint64_t> seed;
    std::optional<std::string> out_dir;

    auto* run = app.add_subcommand("run", "run an experiment and write artifacts");
    run->add_option("--config", config_path, "experiment config file (JSON)")->required();
    run->add_option("--experiment", experiment,
                    "correlate | jsi | franson_common | franson_taud | dispersion | schmidt | all");
    uint64_t seed_value = 0;
    auto* seed_opt = run->add_option("--seed", seed_value, "override the config seed");
    std::string out_value;
    auto* out_opt = run->add_option("--out", out_value, "output directory (overrides BFC_SIM_OUT and config)");

    auto* validate = app.add_subcommand("validate", "parse and validate a config file");
    std::string validate_path;
    validate->add_option("--config", validate_path, "experiment config file (JSON)")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) {
            bfc::load_config(validate_path);
            std::cout << "OK: " << validate_path << " is a valid experiment config\n";
            return 0;
        }
        if (seed_opt->count() > 0) seed = seed_value;
        if (out_opt->count() > 0) out_dir = out_value;
        return run_command(config_path, experiment, seed, out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
