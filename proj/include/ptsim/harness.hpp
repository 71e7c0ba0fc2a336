// Run configuration, trajectory/sweep execution, CSV + JSON-sidecar
// emission, and the measurement-error fidelity sweeps.
//
// CSV cells use fixed 12-significant-digit formatting so golden files diff
// cleanly across platforms; every run writes a <out>.meta.json sidecar
// carrying the fully resolved configuration (seed included) so results can
// be reproduced byte for byte.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ptsim/algorithms.hpp"
#include "ptsim/circuit.hpp"
#include "ptsim/coupled.hpp"
#include "ptsim/numerics.hpp"
#include "ptsim/ptmodel.hpp"

namespace ptsim {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class SweepMethod { Hybrid, Dilation, Hermitian };

inline const char* to_string(SweepMethod m) {
    switch (m) {
        case SweepMethod::Hybrid: return "hybrid";
        case SweepMethod::Dilation: return "dilation";
        case SweepMethod::Hermitian: return "hermitian";
    }
    return "?";
}

inline SweepMethod sweep_method_from(const std::string& s) {
    if (s == "hybrid") return SweepMethod::Hybrid;
    if (s == "dilation") return SweepMethod::Dilation;
    if (s == "hermitian") return SweepMethod::Hermitian;
    throw ConfigError("unknown sweep method '" + s + "' (hybrid|dilation|hermitian)");
}

struct RunConfig {
    std::string method;  // exact | hybrid | dilation | coupled | sweep | transfer
    double omega = 7.5;
    double gamma = 7.0;
    double j = 0.019;
    double t_max = 1.8;
    int steps = 40;
    Shots shots = Shots::exact();
    double p_flip = 0.0;
    std::uint64_t seed = 1234;
    std::string out_path;
    // sweep-only
    std::string sweep_method = "hybrid";
    double t_probe = 1.22;

    void validate() const {
        static const std::array<const char*, 6> methods = {"exact",   "hybrid", "dilation",
                                                           "coupled", "sweep",  "transfer"};
        bool known = false;
        for (const char* m : methods) known = known || method == m;
        if (!known) throw ConfigError("unknown method '" + method + "'");
        if (steps < 1) throw ConfigError("steps must be >= 1");
        if (!(t_max >= 0.0)) throw ConfigError("t-max must be non-negative");
        if (!(p_flip >= 0.0 && p_flip <= 1.0)) throw ConfigError("p-flip must be in [0,1]");
        if (out_path.empty()) throw ConfigError("output path must not be empty");
        if (method == "sweep") sweep_method_from(sweep_method);
    }

    std::vector<double> time_grid() const {
        if (t_max == 0.0) return {0.0};
        std::vector<double> ts(static_cast<size_t>(steps));
        if (steps == 1) {
            ts[0] = 0.0;
            return ts;
        }
        for (int k = 0; k < steps; ++k)
            ts[static_cast<size_t>(k)] = t_max * static_cast<double>(k) / (steps - 1);
        return ts;
    }
};

inline std::string shots_to_string(const Shots& s) {
    return s.is_exact ? "exact" : std::to_string(s.count);
}

inline Shots shots_from_string(const std::string& s) {
    if (s == "exact") return Shots::exact();
    try {
        size_t pos = 0;
        const long n = std::stol(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return Shots::of(n);
    } catch (const std::exception&) {
        throw ConfigError("shots must be a positive integer or 'exact', got '" + s + "'");
    }
}

inline nlohmann::json config_to_json(const RunConfig& c) {
    return nlohmann::json{{"method", c.method},
                          {"omega", c.omega},
                          {"gamma", c.gamma},
                          {"j", c.j},
                          {"t_max", c.t_max},
                          {"steps", c.steps},
                          {"shots", shots_to_string(c.shots)},
                          {"p_flip", c.p_flip},
                          {"seed", c.seed},
                          {"out", c.out_path},
                          {"sweep_method", c.sweep_method},
                          {"t_probe", c.t_probe}};
}

inline RunConfig config_from_json(const nlohmann::json& j) {
    RunConfig c;
    c.method = j.at("method").get<std::string>();
    c.omega = j.at("omega").get<double>();
    c.gamma = j.at("gamma").get<double>();
    c.j = j.at("j").get<double>();
    c.t_max = j.at("t_max").get<double>();
    c.steps = j.at("steps").get<int>();
    c.shots = shots_from_string(j.at("shots").get<std::string>());
    c.p_flip = j.at("p_flip").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.out_path = j.at("out").get<std::string>();
    c.sweep_method = j.at("sweep_method").get<std::string>();
    c.t_probe = j.at("t_probe").get<double>();
    return c;
}

// 12 significant digits; negative zero normalized so reruns stay
// byte-identical.
inline std::string format_cell(double v) {
    if (v == 0.0) v = 0.0;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

namespace detail {

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << content;
    if (!out.good()) throw IoError("write failed for '" + path + "'");
}

inline void write_sidecar(const RunConfig& cfg) {
    write_text_file(cfg.out_path + ".meta.json", config_to_json(cfg).dump(2) + "\n");
}

}  // namespace detail

struct SweepResult {
    std::string method;
    double t_probe = 0.0;
    std::vector<double> p_grid;
    std::vector<double> fidelities;
};

inline std::vector<double> default_sweep_grid() {
    std::vector<double> grid;
    for (int k = 0; k <= 10; ++k) grid.push_back(0.05 * k);
    return grid;
}

// Fidelity of each method's reconstructed state against the analytic exact
// density matrix, at one probe time, across measurement-error strengths.
// The Hermitian baseline runs the tau-free RX evolution.
inline SweepResult noise_sweep(SweepMethod method, const PtParams& p, double t_probe,
                               const std::vector<double>& p_grid, const Shots& shots,
                               std::uint64_t seed) {
    p.require_unbroken();
    for (double pf : p_grid)
        if (!(pf >= 0.0 && pf <= 0.5)) throw ConfigError("sweep p_grid must lie in [0, 0.5]");

    const CVector zero = CVector::basis(2, 0);
    const double theta = p.omega * std::cos(p.alpha()) * t_probe;

    CMatrix rho_exact(2);
    if (method == SweepMethod::Hermitian) {
        const CVector herm{std::cos(theta), cplx(0, -std::sin(theta))};
        rho_exact = projector(herm);
    } else {
        rho_exact = projector(exact_evolve(p, zero, t_probe).state);
    }

    SweepResult result;
    result.method = to_string(method);
    result.t_probe = t_probe;
    result.p_grid = p_grid;
    result.fidelities.reserve(p_grid.size());

    for (size_t k = 0; k < p_grid.size(); ++k) {
        const MeasNoise noise(p_grid[k]);
        const std::uint64_t cell_seed = seed ^ (0xC3A5C85C97CB3127ULL * (k + 1));
        CMatrix rho(2);
        switch (method) {
            case SweepMethod::Hybrid: {
                const auto traj = hybrid_evolve(p, zero, {t_probe}, shots, noise, cell_seed);
                rho = traj.front().rho;
                break;
            }
            case SweepMethod::Dilation:
                rho = dilation_system_tomography(p, zero, t_probe, shots, noise, cell_seed);
                break;
            case SweepMethod::Hermitian: {
                Circuit c(1);
                c.add(Gate::rx(0, 2.0 * theta));
                const CVector state = run_statevector(c, zero);
                rho = tomography(state, 1, shots, noise, cell_seed);
                break;
            }
        }
        result.fidelities.push_back(fidelity(rho_exact, rho));
    }
    return result;
}

inline nlohmann::json transfer_report(const PtParams& p) {
    const TransferTimes tt = transfer_time_comparison(p);
    return nlohmann::json{{"omega", p.omega},
                          {"gamma", p.gamma},
                          {"t_pt", tt.t_pt},
                          {"t_herm", tt.t_herm},
                          {"ratio", tt.t_pt / tt.t_herm}};
}

namespace detail {

inline std::string trajectory_csv(const std::vector<TrajectoryPoint>& traj,
                                  const std::vector<CMatrix>& exact_refs, bool coupled,
                                  const std::vector<double>* concurrences) {
    std::ostringstream os;
    if (coupled)
        os << "t,p00,p01,p10,p11,fidelity_vs_exact,p_success,concurrence\n";
    else
        os << "t,p0,p1,fidelity_vs_exact,p_success\n";
    for (size_t i = 0; i < traj.size(); ++i) {
        const TrajectoryPoint& pt = traj[i];
        os << format_cell(pt.t);
        for (double pop : pt.populations) os << ',' << format_cell(pop);
        os << ',' << format_cell(fidelity(exact_refs[i], pt.rho));
        os << ',' << format_cell(pt.p_success);
        if (coupled) os << ',' << format_cell((*concurrences)[i]);
        os << '\n';
    }
    return os.str();
}

}  // namespace detail

// Execute one configured run and write CSV + sidecar. Throws ConfigError /
// RegimeError / IoError; the CLI maps these to exit codes 1 / 2 / 3.
inline void run(const RunConfig& cfg) {
    cfg.validate();
    const std::vector<double> times = cfg.time_grid();
    std::string csv;

    if (cfg.method == "transfer") {
        const PtParams p(cfg.omega, cfg.gamma);
        detail::write_text_file(cfg.out_path, transfer_report(p).dump(2) + "\n");
        detail::write_sidecar(cfg);
        return;
    }

    if (cfg.method == "sweep") {
        const PtParams p(cfg.omega, cfg.gamma);
        const SweepResult res = noise_sweep(sweep_method_from(cfg.sweep_method), p, cfg.t_probe,
                                            default_sweep_grid(), cfg.shots, cfg.seed);
        std::ostringstream os;
        os << "p_flip,fidelity\n";
        for (size_t k = 0; k < res.p_grid.size(); ++k)
            os << format_cell(res.p_grid[k]) << ',' << format_cell(res.fidelities[k]) << '\n';
        detail::write_text_file(cfg.out_path, os.str());
        detail::write_sidecar(cfg);
        return;
    }

    if (cfg.method == "coupled") {
        const CoupledParams cp(PtParams(cfg.omega, cfg.gamma), cfg.j);
        const CVector psi0 = CVector::basis(4, 3);  // |11>, the initially excited state
        const auto traj = coupled_hybrid_evolve(cp, psi0, times, cfg.shots,
                                                MeasNoise(cfg.p_flip), cfg.seed);
        std::vector<CMatrix> refs;
        std::vector<double> conc;
        refs.reserve(traj.size());
        conc.reserve(traj.size());
        for (const auto& pt : traj) {
            refs.push_back(projector(exact_coupled_evolve(cp, psi0, pt.t)));
            conc.push_back(concurrence(pt.rho));
        }
        csv = detail::trajectory_csv(traj, refs, true, &conc);
        detail::write_text_file(cfg.out_path, csv);
        detail::write_sidecar(cfg);
        return;
    }

    // single-qubit trajectory methods
    const PtParams p(cfg.omega, cfg.gamma);
    const CVector zero = CVector::basis(2, 0);
    std::vector<TrajectoryPoint> traj;
    if (cfg.method == "exact") {
        traj.reserve(times.size());
        for (double t : times) {
            const EvolveResult r = exact_evolve(p, zero, t);
            TrajectoryPoint pt;
            pt.t = t;
            pt.rho = projector(r.state);
            pt.populations = {std::norm(r.state[0]), std::norm(r.state[1])};
            pt.p_success = 1.0;
            traj.push_back(std::move(pt));
        }
    } else if (cfg.method == "hybrid") {
        traj = hybrid_evolve(p, zero, times, cfg.shots, MeasNoise(cfg.p_flip), cfg.seed);
    } else {  // dilation
        traj = dilation_evolve(p, zero, times, cfg.shots, MeasNoise(cfg.p_flip), cfg.seed);
        // Post-selected counts carry no coherences, so the fidelity column is
        // measured separately: three tomographic settings on the system
        // qubit, post-selected on the ancilla.
        if (!cfg.shots.is_exact || cfg.p_flip > 0.0) {
            for (size_t i = 0; i < traj.size(); ++i)
                traj[i].rho = dilation_system_tomography(
                    p, zero, traj[i].t, cfg.shots, MeasNoise(cfg.p_flip),
                    detail::point_seed(cfg.seed, i) ^ 0x9e3779b97f4a7c15ULL);
        }
    }

    std::vector<CMatrix> refs;
    refs.reserve(traj.size());
    for (const auto& pt : traj) refs.push_back(projector(exact_evolve(p, zero, pt.t).state));
    csv = detail::trajectory_csv(traj, refs, false, nullptr);
    detail::write_text_file(cfg.out_path, csv);
    detail::write_sidecar(cfg);
}

}  // namespace ptsim
