#include "cavsim/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cavsim/constants.hpp"
#include "cavsim/reflection.hpp"

namespace cavsim {

using nlohmann::json;

CouplingRates ScenarioConfig::rates() const {
    return CouplingRates(g, kappa_from_geometry(cavity), transition.gamma);
}

ModeGeometry ScenarioConfig::mode_geometry() const {
    ModeGeometry geom;
    geom.origin = {0.0, 0.0, 0.0};
    geom.axis = {1.0, 0.0, 0.0};
    geom.waist = cavity.waist;
    geom.wavelength = transition.wavelength;
    geom.length = cavity.length;
    return geom;
}

double ScenarioConfig::probe_visibility() const {
    return visibility(probe.i_min, probe.i_max);
}

void ScenarioConfig::validate() const {
    transition.validate();
    cavity.validate();
    cloud.validate();
    chain.validate();
    if (!(g > 0.0)) throw ConfigError("coupling.g_hz must be positive");
    if (!(probe.i_min > 0.0 && probe.i_max > 0.0 && probe.i_min <= probe.i_max))
        throw ConfigError("probe rates must satisfy 0 < i_min <= i_max");
    if (scan.points < 5) throw ConfigError("scan.points must be >= 5");
    if (!(scan.delta_min < scan.delta_max)) throw ConfigError("scan detuning range empty");
    if (!(scan.mean_n_eff >= 0.0)) throw ConfigError("scan.mean_n_eff must be >= 0");
    if (!(tof.t_start < tof.t_end) || !(tof.bin_width > 0.0))
        throw ConfigError("bad tof time grid");
    if (!(noise.t_start < noise.t_end) || !(noise.bin_width > 0.0))
        throw ConfigError("bad noise time grid");
    if (!(pulse.t_start < pulse.t_end) || !(pulse.bin_width > 0.0))
        throw ConfigError("bad pulse time grid");
    if (pulse.turn_on < pulse.t_start) throw ConfigError("pulse.turn_on before pulse.t_start");
    if (!(pulse.pump_photon_budget >= 1.0))
        throw ConfigError("pulse.pump_photon_budget must be >= 1");
    if (run.drops_tof < 1 || run.drops_noise < 2) throw ConfigError("bad drop counts");
    if (run.threads < 1) throw ConfigError("run.threads must be >= 1");
}

ScenarioConfig default_config() {
    ScenarioConfig cfg;
    cfg.transition = TransitionSpec::rb85_d2();
    cfg.cavity.length = 133e-6;
    cfg.cavity.finesse = 280.0;
    cfg.cavity.waist = 4.6e-6;
    cfg.cavity.omega_c = cfg.transition.omega();  // cavity locked to the atom
    cfg.g = constants::two_pi * 100e6;            // 2g = 2*pi*200 MHz
    return cfg;
}

namespace {

void check_keys(const json& j, const std::string& path,
                std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError(path + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) { ok = true; break; }
        if (!ok) throw ConfigError("unknown key '" + path + "." + it.key() + "'");
    }
}

double num(const json& j, const std::string& path, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) throw ConfigError(path + "." + key + ": expected a number");
    return j[key].get<double>();
}

bool flag(const json& j, const std::string& path, const char* key, bool fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_boolean()) throw ConfigError(path + "." + key + ": expected a boolean");
    return j[key].get<bool>();
}

}  // namespace

ScenarioConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }

    ScenarioConfig cfg = default_config();
    check_keys(j, "", {"transition", "cavity", "coupling", "cloud", "chain", "probe", "scan",
                       "tof", "noise", "pulse", "fit", "run"});

    if (j.contains("transition")) {
        const auto& t = j["transition"];
        check_keys(t, "transition", {"wavelength_m", "gamma_hz", "zeeman_factor"});
        cfg.transition.wavelength =
            num(t, "transition", "wavelength_m", cfg.transition.wavelength);
        cfg.transition.gamma = constants::two_pi *
                               num(t, "transition", "gamma_hz",
                                   cfg.transition.gamma / constants::two_pi);
        cfg.transition.zeeman_factor =
            num(t, "transition", "zeeman_factor", cfg.transition.zeeman_factor);
        cfg.transition.mu = dipole_from_gamma(cfg.transition.gamma, cfg.transition.omega());
    }
    if (j.contains("cavity")) {
        const auto& c = j["cavity"];
        check_keys(c, "cavity", {"length_m", "finesse", "waist_m"});
        cfg.cavity.length = num(c, "cavity", "length_m", cfg.cavity.length);
        cfg.cavity.finesse = num(c, "cavity", "finesse", cfg.cavity.finesse);
        cfg.cavity.waist = num(c, "cavity", "waist_m", cfg.cavity.waist);
        cfg.cavity.omega_c = cfg.transition.omega();
    }
    if (j.contains("coupling")) {
        const auto& c = j["coupling"];
        check_keys(c, "coupling", {"g_hz"});
        cfg.g = constants::two_pi * num(c, "coupling", "g_hz", cfg.g / constants::two_pi);
    }
    if (j.contains("cloud")) {
        const auto& c = j["cloud"];
        check_keys(c, "cloud",
                   {"atom_count", "drop_height_m", "rms_radius_m", "temperature_k"});
        cfg.cloud.atom_count = num(c, "cloud", "atom_count", cfg.cloud.atom_count);
        cfg.cloud.drop_height = num(c, "cloud", "drop_height_m", cfg.cloud.drop_height);
        cfg.cloud.rms_radius = num(c, "cloud", "rms_radius_m", cfg.cloud.rms_radius);
        cfg.cloud.temperature = num(c, "cloud", "temperature_k", cfg.cloud.temperature);
    }
    if (j.contains("chain")) {
        const auto& c = j["chain"];
        check_keys(c, "chain",
                   {"beamsplitter_transmission", "detector_efficiency", "dead_time_s"});
        cfg.chain.beamsplitter_transmission =
            num(c, "chain", "beamsplitter_transmission", cfg.chain.beamsplitter_transmission);
        cfg.chain.detector_efficiency =
            num(c, "chain", "detector_efficiency", cfg.chain.detector_efficiency);
        cfg.chain.dead_time = num(c, "chain", "dead_time_s", cfg.chain.dead_time);
    }
    if (j.contains("probe")) {
        const auto& p = j["probe"];
        check_keys(p, "probe", {"i_max", "i_min"});
        cfg.probe.i_max = num(p, "probe", "i_max", cfg.probe.i_max);
        cfg.probe.i_min = num(p, "probe", "i_min", cfg.probe.i_min);
    }
    if (j.contains("scan")) {
        const auto& s = j["scan"];
        check_keys(s, "scan",
                   {"delta_min", "delta_max", "points", "laser_fwhm", "mean_n_eff",
                    "box_halfwidth_waists", "noisy", "integration_time_s"});
        cfg.scan.delta_min = num(s, "scan", "delta_min", cfg.scan.delta_min);
        cfg.scan.delta_max = num(s, "scan", "delta_max", cfg.scan.delta_max);
        cfg.scan.points = static_cast<int>(num(s, "scan", "points", cfg.scan.points));
        cfg.scan.laser_fwhm = num(s, "scan", "laser_fwhm", cfg.scan.laser_fwhm);
        cfg.scan.mean_n_eff = num(s, "scan", "mean_n_eff", cfg.scan.mean_n_eff);
        cfg.scan.box_halfwidth_waists =
            num(s, "scan", "box_halfwidth_waists", cfg.scan.box_halfwidth_waists);
        cfg.scan.noisy = flag(s, "scan", "noisy", cfg.scan.noisy);
        cfg.scan.integration_time =
            num(s, "scan", "integration_time_s", cfg.scan.integration_time);
    }
    if (j.contains("tof")) {
        const auto& t = j["tof"];
        check_keys(t, "tof", {"t_start_s", "t_end_s", "bin_s", "sample_budget"});
        cfg.tof.t_start = num(t, "tof", "t_start_s", cfg.tof.t_start);
        cfg.tof.t_end = num(t, "tof", "t_end_s", cfg.tof.t_end);
        cfg.tof.bin_width = num(t, "tof", "bin_s", cfg.tof.bin_width);
        cfg.tof.sample_budget = static_cast<std::size_t>(
            num(t, "tof", "sample_budget", static_cast<double>(cfg.tof.sample_budget)));
    }
    if (j.contains("noise")) {
        const auto& n = j["noise"];
        check_keys(n, "noise",
                   {"t_start_s", "t_end_s", "bin_s", "sample_budget", "length_jitter_rms_m",
                    "lock_offset_m"});
        cfg.noise.t_start = num(n, "noise", "t_start_s", cfg.noise.t_start);
        cfg.noise.t_end = num(n, "noise", "t_end_s", cfg.noise.t_end);
        cfg.noise.bin_width = num(n, "noise", "bin_s", cfg.noise.bin_width);
        cfg.noise.sample_budget = static_cast<std::size_t>(
            num(n, "noise", "sample_budget", static_cast<double>(cfg.noise.sample_budget)));
        cfg.noise.length_jitter_rms =
            num(n, "noise", "length_jitter_rms_m", cfg.noise.length_jitter_rms);
        cfg.noise.lock_offset = num(n, "noise", "lock_offset_m", cfg.noise.lock_offset);
    }
    if (j.contains("pulse")) {
        const auto& p = j["pulse"];
        check_keys(p, "pulse",
                   {"turn_on_s", "t_start_s", "t_end_s", "bin_s", "scatter_rate_hz",
                    "pump_photon_budget", "cavity_detuned", "empty_cloud", "sample_budget"});
        cfg.pulse.turn_on = num(p, "pulse", "turn_on_s", cfg.pulse.turn_on);
        cfg.pulse.t_start = num(p, "pulse", "t_start_s", cfg.pulse.t_start);
        cfg.pulse.t_end = num(p, "pulse", "t_end_s", cfg.pulse.t_end);
        cfg.pulse.bin_width = num(p, "pulse", "bin_s", cfg.pulse.bin_width);
        cfg.pulse.scatter_rate = num(p, "pulse", "scatter_rate_hz", cfg.pulse.scatter_rate);
        cfg.pulse.pump_photon_budget =
            num(p, "pulse", "pump_photon_budget", cfg.pulse.pump_photon_budget);
        cfg.pulse.cavity_detuned = flag(p, "pulse", "cavity_detuned", cfg.pulse.cavity_detuned);
        cfg.pulse.empty_cloud = flag(p, "pulse", "empty_cloud", cfg.pulse.empty_cloud);
        cfg.pulse.sample_budget = static_cast<std::size_t>(
            num(p, "pulse", "sample_budget", static_cast<double>(cfg.pulse.sample_budget)));
    }
    if (j.contains("fit")) {
        const auto& f = j["fit"];
        check_keys(f, "fit", {"float_visibility", "float_linewidth"});
        cfg.fit.float_visibility = flag(f, "fit", "float_visibility", cfg.fit.float_visibility);
        cfg.fit.float_linewidth = flag(f, "fit", "float_linewidth", cfg.fit.float_linewidth);
    }
    if (j.contains("run")) {
        const auto& r = j["run"];
        check_keys(r, "run", {"seed", "drops_tof", "drops_noise", "threads", "out_dir"});
        if (r.contains("seed")) {
            if (!r["seed"].is_number_integer()) throw ConfigError("run.seed: expected an integer");
            cfg.run.seed = r["seed"].get<std::uint64_t>();
        }
        cfg.run.drops_tof = static_cast<int>(num(r, "run", "drops_tof", cfg.run.drops_tof));
        cfg.run.drops_noise =
            static_cast<int>(num(r, "run", "drops_noise", cfg.run.drops_noise));
        cfg.run.threads = static_cast<int>(num(r, "run", "threads", cfg.run.threads));
        if (r.contains("out_dir")) {
            if (!r["out_dir"].is_string()) throw ConfigError("run.out_dir: expected a string");
            cfg.run.out_dir = r["out_dir"].get<std::string>();
        }
    }

    try {
        cfg.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string dump_config(const ScenarioConfig& cfg) {
    json j;
    j["transition"] = {{"wavelength_m", cfg.transition.wavelength},
                       {"gamma_hz", cfg.transition.gamma / constants::two_pi},
                       {"zeeman_factor", cfg.transition.zeeman_factor}};
    j["cavity"] = {{"length_m", cfg.cavity.length},
                   {"finesse", cfg.cavity.finesse},
                   {"waist_m", cfg.cavity.waist}};
    j["coupling"] = {{"g_hz", cfg.g / constants::two_pi}};
    j["cloud"] = {{"atom_count", cfg.cloud.atom_count},
                  {"drop_height_m", cfg.cloud.drop_height},
                  {"rms_radius_m", cfg.cloud.rms_radius},
                  {"temperature_k", cfg.cloud.temperature}};
    j["chain"] = {{"beamsplitter_transmission", cfg.chain.beamsplitter_transmission},
                  {"detector_efficiency", cfg.chain.detector_efficiency},
                  {"dead_time_s", cfg.chain.dead_time}};
    j["probe"] = {{"i_max", cfg.probe.i_max}, {"i_min", cfg.probe.i_min}};
    j["scan"] = {{"delta_min", cfg.scan.delta_min},
                 {"delta_max", cfg.scan.delta_max},
                 {"points", cfg.scan.points},
                 {"laser_fwhm", cfg.scan.laser_fwhm},
                 {"mean_n_eff", cfg.scan.mean_n_eff},
                 {"box_halfwidth_waists", cfg.scan.box_halfwidth_waists},
                 {"noisy", cfg.scan.noisy},
                 {"integration_time_s", cfg.scan.integration_time}};
    j["tof"] = {{"t_start_s", cfg.tof.t_start},
                {"t_end_s", cfg.tof.t_end},
                {"bin_s", cfg.tof.bin_width},
                {"sample_budget", static_cast<double>(cfg.tof.sample_budget)}};
    j["noise"] = {{"t_start_s", cfg.noise.t_start},
                  {"t_end_s", cfg.noise.t_end},
                  {"bin_s", cfg.noise.bin_width},
                  {"sample_budget", static_cast<double>(cfg.noise.sample_budget)},
                  {"length_jitter_rms_m", cfg.noise.length_jitter_rms},
                  {"lock_offset_m", cfg.noise.lock_offset}};
    j["pulse"] = {{"turn_on_s", cfg.pulse.turn_on},
                  {"t_start_s", cfg.pulse.t_start},
                  {"t_end_s", cfg.pulse.t_end},
                  {"bin_s", cfg.pulse.bin_width},
                  {"scatter_rate_hz", cfg.pulse.scatter_rate},
                  {"pump_photon_budget", cfg.pulse.pump_photon_budget},
                  {"cavity_detuned", cfg.pulse.cavity_detuned},
                  {"empty_cloud", cfg.pulse.empty_cloud},
                  {"sample_budget", static_cast<double>(cfg.pulse.sample_budget)}};
    j["fit"] = {{"float_visibility", cfg.fit.float_visibility},
                {"float_linewidth", cfg.fit.float_linewidth}};
    j["run"] = {{"seed", cfg.run.seed},
                {"drops_tof", cfg.run.drops_tof},
                {"drops_noise", cfg.run.drops_noise},
                {"threads", cfg.run.threads},
                {"out_dir", cfg.run.out_dir}};
    return j.dump(2);
}

std::uint64_t config_hash(const ScenarioConfig& cfg) {
    // the thread count and output directory don't affect the results;
    // keep them out of the hash so reruns are byte-identical
    ScenarioConfig c = cfg;
    c.run.threads = 1;
    c.run.out_dir = ".";
    std::string s = dump_config(c);
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace cavsim
