#include "qmpe/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmpe/csv.hpp"
#include "qmpe/dynamics.hpp"
#include "qmpe/liouvillian.hpp"
#include "qmpe/mpemba.hpp"
#include "qmpe/spectral.hpp"

namespace qmpe {

namespace {

using Cx = std::complex<double>;

std::vector<double> linspace(double lo, double hi, int points) {
    std::vector<double> xs(static_cast<std::size_t>(points));
    if (points == 1) {
        xs[0] = lo;
        return xs;
    }
    for (int k = 0; k < points; ++k)
        xs[static_cast<std::size_t>(k)] =
            lo + (hi - lo) * static_cast<double>(k) /
                     static_cast<double>(points - 1);
    xs.front() = lo;
    xs.back() = hi;
    return xs;
}

const PseudomodeSpec& model_of(const RunConfig& cfg) {
    if (!cfg.model.has_value())
        throw std::invalid_argument("configuration defines no model");
    return *cfg.model;
}

std::string model_lines(const PseudomodeSpec& spec) {
    std::string out = "omega0 = " + format_double(spec.omega0()) + "\n";
    for (std::size_t i = 0; i < spec.mode_count(); ++i) {
        const auto& m = spec.modes()[i];
        out += "mode " + format_int(static_cast<std::int64_t>(i + 1)) +
               ": alpha = " + format_double(m.alpha) +
               ", omega = " + format_double(m.omega) +
               ", gamma = " + format_double(m.gamma) + "\n";
    }
    return out;
}

const char* distance_name(DistanceKind kind) {
    switch (kind) {
        case DistanceKind::CoherentOverlap: return "overlap";
        case DistanceKind::HilbertSchmidtHalf: return "hs";
        case DistanceKind::TraceNorm: return "trace";
    }
    return "overlap";
}

const char* variable_name(ScanVariable v) {
    return v == ScanVariable::Gamma ? "gamma" : "alpha";
}

// Closed-form distance of a coherent state with squared amplitude x to
// vacuum under each kind (overlap and trace coincide there).
double coherent_kind_distance(DistanceKind kind, double x) {
    if (kind == DistanceKind::HilbertSchmidtHalf)
        return std::sqrt(-std::expm1(-x) / 2.0);
    return coherent_distance(x);
}

// All index vectors of length `len` with entry sum <= cap, lexicographically
// ascending.
std::vector<std::vector<int>> combinations_up_to(std::size_t len, int cap) {
    std::vector<std::vector<int>> all;
    std::vector<int> current(len, 0);
    const auto recurse = [&](auto&& self, std::size_t pos, int left) -> void {
        if (pos == len) {
            all.push_back(current);
            return;
        }
        for (int v = 0; v <= left; ++v) {
            current[pos] = v;
            self(self, pos + 1, left - v);
        }
        current[pos] = 0;
    };
    recurse(recurse, 0, cap);
    return all;
}

std::string label_of(const std::vector<int>& index) {
    std::string label;
    for (std::size_t i = 0; i < index.size(); ++i) {
        if (i > 0) label += ' ';
        label += format_int(index[i]);
    }
    return label;
}

struct OutputContext {
    std::filesystem::path dir;
    std::vector<std::string> files;
};

OutputContext open_output(const RunConfig& cfg) {
    OutputContext ctx;
    ctx.dir = cfg.run.out_dir;
    std::filesystem::create_directories(ctx.dir);
    return ctx;
}

void emit(OutputContext& ctx, const std::string& name, const CsvWriter& csv) {
    csv.write_file(ctx.dir / name);
    ctx.files.push_back(name);
}

CommandResult finish(OutputContext& ctx, std::string summary) {
    summary += "files:";
    for (const auto& f : ctx.files) summary += ' ' + f;
    summary += '\n';
    std::ofstream out(ctx.dir / "summary.txt", std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " +
                                 (ctx.dir / "summary.txt").string());
    out << summary;
    out.close();
    ctx.files.push_back("summary.txt");
    return CommandResult{ctx.dir, ctx.files, summary};
}

}  // namespace

CommandResult run_spectrum(const RunConfig& cfg) {
    const PseudomodeSpec& spec = model_of(cfg);
    OutputContext ctx = open_output(cfg);
    std::string summary = "command: spectrum\n" + model_lines(spec);

    if (cfg.scan.has_value()) {
        const ScanSection& scan = *cfg.scan;
        const std::size_t n_roots = spec.mode_count() + 1;
        std::vector<std::string> header{"variable", "value"};
        for (std::size_t r = 1; r <= n_roots; ++r) {
            header.push_back("root" + format_int(static_cast<std::int64_t>(r)) +
                             "_re");
            header.push_back("root" + format_int(static_cast<std::int64_t>(r)) +
                             "_im");
        }
        header.push_back("markov_re");
        header.push_back("is_lep");
        CsvWriter csv(header);

        int lep_points = 0;
        for (double v : linspace(scan.lo, scan.hi, scan.points)) {
            const PseudomodeSpec at =
                with_parameter(spec, scan.variable, scan.mode_index, v);
            const PolynomialCoefficients poly = characteristic_polynomial(at);
            const RootSet roots = polynomial_roots(poly);
            const LepReport lep = detect_lep(poly, roots);
            lep_points += lep.is_lep ? 1 : 0;
            std::vector<std::string> row{variable_name(scan.variable),
                                         format_double(v)};
            for (const Cx& r : roots.roots) {
                row.push_back(format_double(r.real()));
                row.push_back(format_double(r.imag()));
            }
            row.push_back(
                format_double(-0.5 * markovian_reduction(at).gamma_M));
            row.push_back(lep.is_lep ? "1" : "0");
            csv.row(row);
        }
        emit(ctx, "spectrum_scan.csv", csv);
        summary += "scan: " + std::string(variable_name(scan.variable)) +
                   " in [" + format_double(scan.lo) + ", " +
                   format_double(scan.hi) + "], " + format_int(scan.points) +
                   " points\n";
        summary += "lep_points = " + format_int(lep_points) + "\n";
        return finish(ctx, std::move(summary));
    }

    const PolynomialCoefficients poly = characteristic_polynomial(spec);
    const RootSet roots = polynomial_roots(poly);
    const LepReport lep = detect_lep(poly, roots);

    CsvWriter csv({"kind", "label", "re", "im"});
    for (std::size_t r = 0; r < roots.roots.size(); ++r)
        csv.row({"root", "r" + format_int(static_cast<std::int64_t>(r + 1)),
                 format_double(roots.roots[r].real()),
                 format_double(roots.roots[r].imag())});
    for (const auto& index :
         combinations_up_to(2 * roots.roots.size(), cfg.run.excitation_cap)) {
        const Cx lambda = liouvillian_eigenvalue(roots, index);
        csv.row({"combination", label_of(index), format_double(lambda.real()),
                 format_double(lambda.imag())});
    }
    if (cfg.run.markovian) {
        const MarkovianReduction red = markovian_reduction(spec);
        for (const auto& index : combinations_up_to(4, cfg.run.excitation_cap)) {
            const Cx lambda = markovian_eigenvalue(red, index);
            csv.row({"markovian", label_of(index), format_double(lambda.real()),
                     format_double(lambda.imag())});
        }
    }
    emit(ctx, "spectrum.csv", csv);

    summary += "gap = " + format_double(spectral_gap(roots)) + "\n";
    summary += "is_lep = " + std::string(lep.is_lep ? "true" : "false") + "\n";
    summary += "excitation_cap = " + format_int(cfg.run.excitation_cap) + "\n";
    if (cfg.run.markovian) {
        const MarkovianReduction red = markovian_reduction(spec);
        summary += "gamma_M = " + format_double(red.gamma_M) + "\n";
        if (cfg.run.include_lamb_shift)
            summary += "lamb_shift = " + format_double(red.lamb_shift) + "\n";
    }
    return finish(ctx, std::move(summary));
}

CommandResult run_lep(const RunConfig& cfg) {
    const PseudomodeSpec& spec = model_of(cfg);
    if (!cfg.scan.has_value())
        throw std::invalid_argument("lep needs a [scan] section");
    const ScanSection& scan = *cfg.scan;

    const LepLocation loc =
        locate_lep(spec, scan.variable, scan.mode_index, scan.lo, scan.hi);

    OutputContext ctx = open_output(cfg);
    CsvWriter csv({"variable", "found", "value", "min_root_gap", "is_lep"});
    csv.row({variable_name(scan.variable), loc.found ? "1" : "0",
             format_double(loc.value), format_double(loc.min_root_gap),
             loc.report.is_lep ? "1" : "0"});
    emit(ctx, "lep.csv", csv);

    std::string summary = "command: lep\n" + model_lines(spec);
    summary += "scan: " + std::string(variable_name(scan.variable)) + " in [" +
               format_double(scan.lo) + ", " + format_double(scan.hi) + "]\n";
    summary += "found = " + std::string(loc.found ? "true" : "false") + "\n";
    summary += "value = " + format_double(loc.value) + "\n";
    summary += "min_root_gap = " + format_double(loc.min_root_gap) + "\n";
    return finish(ctx, std::move(summary));
}

namespace {

struct EvolveData {
    std::vector<double> times;
    std::vector<Cx> p;                // normalised amplitude response
    std::vector<double> distance;
    std::vector<char> leakage;
    bool leakage_warning = false;
    std::string path_label;
};

Eigen::MatrixXcd system_annihilator_dense(int n_sys) {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n_sys, n_sys);
    for (int n = 1; n < n_sys; ++n)
        a(n - 1, n) = Cx{std::sqrt(static_cast<double>(n)), 0.0};
    return a;
}

EvolveData evolve_numeric(const RunConfig& cfg, const PseudomodeSpec& spec,
                          const Eigen::MatrixXcd& rho0, Cx xi) {
    const LiouvillianOperator lv = build_liouvillian(spec, *cfg.truncation);
    const std::vector<double> times = cfg.time.times();
    const Trajectory traj = evolve_master_equation(lv, rho0, times);

    EvolveData data;
    data.times = times;
    data.leakage = traj.leakage_flags;
    data.leakage_warning = traj.leakage_warning;
    data.path_label = "integrator";

    const Eigen::MatrixXcd a_s =
        system_annihilator_dense(cfg.truncation->n_sys());
    const bool normalise = std::abs(xi) > 1e-12;
    data.p.reserve(times.size());
    if (normalise) {
        for (const auto& rho_s : traj.states)
            data.p.push_back((rho_s * a_s).trace() / xi);
    } else {
        // Vacuum start: the response column falls back to the propagator.
        for (double t : times) data.p.push_back(analytic_P(spec, t));
    }

    data.distance.reserve(times.size());
    if (cfg.run.distance == DistanceKind::CoherentOverlap) {
        for (std::size_t k = 0; k < times.size(); ++k)
            data.distance.push_back(
                coherent_distance(std::norm(xi * data.p[k])));
    } else {
        Eigen::MatrixXcd eq = Eigen::MatrixXcd::Zero(cfg.truncation->n_sys(),
                                                     cfg.truncation->n_sys());
        eq(0, 0) = Cx{1.0, 0.0};
        for (const auto& rho_s : traj.states)
            data.distance.push_back(
                distance_to_equilibrium(rho_s, eq, cfg.run.distance));
    }
    return data;
}

EvolveData evolve_closed_form(const RunConfig& cfg, const PseudomodeSpec& spec,
                              Cx xi) {
    const std::vector<double> times = cfg.time.times();
    EvolveData data;
    data.times = times;
    data.leakage.assign(times.size(), 0);
    data.path_label = "closed-form";
    data.p.reserve(times.size());
    data.distance.reserve(times.size());
    for (double t : times) {
        const Cx p = analytic_P(spec, t);
        data.p.push_back(p);
        data.distance.push_back(
            coherent_kind_distance(cfg.run.distance, std::norm(xi * p)));
    }
    return data;
}

}  // namespace

CommandResult run_evolve(const RunConfig& cfg) {
    const PseudomodeSpec& spec = model_of(cfg);

    Cx xi{0.0, 0.0};
    Eigen::MatrixXcd rho0;
    bool from_state_file = false;
    if (!cfg.state_files.empty()) {
        if (!cfg.xi.empty())
            throw std::invalid_argument(
                "give either xi or state_file for evolve, not both");
        if (!cfg.truncation.has_value())
            throw std::invalid_argument(
                "state_file input needs a [truncation] section");
        rho0 = load_state_csv(cfg.state_files.front());
        if (rho0.rows() !=
            static_cast<Eigen::Index>(cfg.truncation->dimension()))
            throw std::invalid_argument(
                "state file dimension does not match the truncation");
        from_state_file = true;
        const Eigen::MatrixXcd rho_s =
            partial_trace_pseudomodes(rho0, *cfg.truncation);
        xi = (rho_s * system_annihilator_dense(cfg.truncation->n_sys())).trace();
    } else {
        if (cfg.xi.empty())
            throw std::invalid_argument("evolve needs an [initial] xi");
        xi = Cx{cfg.xi.front(), 0.0};
    }

    EvolveData data;
    if (cfg.truncation.has_value()) {
        if (!from_state_file)
            rho0 = coherent_initial_state(CoherentAmplitudeState{xi},
                                          *cfg.truncation);
        data = evolve_numeric(cfg, spec, rho0, xi);
    } else {
        data = evolve_closed_form(cfg, spec, xi);
    }

    const MarkovianReduction red = markovian_reduction(spec);

    std::vector<std::string> header{"t",        "P_re",    "P_im",
                                    "P_abs",    "distance"};
    if (cfg.run.markovian) {
        header.insert(header.end(), {"P_markov_re", "P_markov_im",
                                     "P_markov_abs", "distance_markov"});
    }
    header.push_back("leakage");
    CsvWriter csv(header);
    for (std::size_t k = 0; k < data.times.size(); ++k) {
        std::vector<std::string> row{
            format_double(data.times[k]), format_double(data.p[k].real()),
            format_double(data.p[k].imag()),
            format_double(std::abs(data.p[k])),
            format_double(data.distance[k])};
        if (cfg.run.markovian) {
            const Cx pm = markovian_P(red, data.times[k],
                                      cfg.run.include_lamb_shift);
            row.push_back(format_double(pm.real()));
            row.push_back(format_double(pm.imag()));
            row.push_back(format_double(std::abs(pm)));
            row.push_back(format_double(coherent_kind_distance(
                cfg.run.distance,
                std::norm(xi) * std::exp(-red.gamma_M * data.times[k]))));
        }
        row.push_back(data.leakage[k] ? "1" : "0");
        csv.row(row);
    }
    OutputContext ctx = open_output(cfg);
    emit(ctx, "evolve.csv", csv);

    std::string summary = "command: evolve\n" + model_lines(spec);
    summary += "path = " + data.path_label + "\n";
    summary += from_state_file
                   ? "initial = state file " + cfg.state_files.front() + "\n"
                   : "xi = " + format_double(xi.real()) + "\n";
    summary += "distance = " + std::string(distance_name(cfg.run.distance)) + "\n";
    summary += "final_distance = " + format_double(data.distance.back()) + "\n";
    if (cfg.run.markovian) {
        summary += "gamma_M = " + format_double(red.gamma_M) + "\n";
        if (cfg.run.include_lamb_shift)
            summary += "lamb_shift = " + format_double(red.lamb_shift) + "\n";
    }
    summary += "leakage_warning = " +
               std::string(data.leakage_warning ? "true" : "false") + "\n";
    return finish(ctx, std::move(summary));
}

CommandResult run_mpemba(const RunConfig& cfg) {
    const PseudomodeSpec& spec = model_of(cfg);
    if (cfg.xi.size() < 2)
        throw std::invalid_argument(
            "mpemba needs two amplitudes in [initial] xi");
    const Cx xi1{cfg.xi[0], 0.0};
    const Cx xi2{cfg.xi[1], 0.0};

    // Second generator: [mpemba] overrides applied to the first mode.
    std::vector<PseudomodeMode> modes2 = spec.modes();
    if (cfg.second.alpha) modes2[0].alpha = *cfg.second.alpha;
    if (cfg.second.omega) modes2[0].omega = *cfg.second.omega;
    if (cfg.second.gamma) modes2[0].gamma = *cfg.second.gamma;
    const PseudomodeSpec spec2(spec.omega0(), std::move(modes2));

    const std::vector<double> times = cfg.time.times();
    std::vector<double> d1, d2;
    std::string path_label;
    if (cfg.run.markovian) {
        path_label = "markovian";
        const double g1 = markovian_reduction(spec).gamma_M;
        const double g2 = markovian_reduction(spec2).gamma_M;
        d1.reserve(times.size());
        d2.reserve(times.size());
        for (double t : times) {
            d1.push_back(coherent_kind_distance(
                cfg.run.distance, std::norm(xi1) * std::exp(-g1 * t)));
            d2.push_back(coherent_kind_distance(
                cfg.run.distance, std::norm(xi2) * std::exp(-g2 * t)));
        }
    } else if (cfg.truncation.has_value()) {
        path_label = "integrator";
        const RunConfig& c = cfg;
        const auto curve = [&](const PseudomodeSpec& s, Cx xi) {
            const Eigen::MatrixXcd rho0 =
                coherent_initial_state(CoherentAmplitudeState{xi}, *c.truncation);
            return evolve_numeric(c, s, rho0, xi).distance;
        };
        d1 = curve(spec, xi1);
        d2 = curve(spec2, xi2);
    } else {
        path_label = "closed-form";
        const Trajectory t1 = coherent_trajectory(spec, xi1, times);
        const Trajectory t2 = coherent_trajectory(spec2, xi2, times);
        d1 = distance_curve(t1, cfg.run.distance);
        d2 = distance_curve(t2, cfg.run.distance);
    }

    const CrossingReport crossing = detect_crossing(times, d1, d2);

    OutputContext ctx = open_output(cfg);
    CsvWriter csv({"t", "d1", "d2"});
    for (std::size_t k = 0; k < times.size(); ++k)
        csv.row({format_double(times[k]), format_double(d1[k]),
                 format_double(d2[k])});
    emit(ctx, "mpemba.csv", csv);

    CsvWriter cross_csv(
        {"crossed", "t_cross", "ordering_at_zero", "refine_tolerance"});
    cross_csv.row({crossing.crossed ? "1" : "0", format_double(crossing.t_cross),
                   format_int(crossing.ordering_at_zero),
                   format_double(crossing.refine_tolerance)});
    emit(ctx, "crossing.csv", cross_csv);

    std::string summary = "command: mpemba\n";
    summary += "generator 1:\n" + model_lines(spec);
    summary += "generator 2:\n" + model_lines(spec2);
    summary += "xi1 = " + format_double(xi1.real()) +
               ", xi2 = " + format_double(xi2.real()) + "\n";
    summary += "path = " + path_label + "\n";
    summary += "distance = " + std::string(distance_name(cfg.run.distance)) + "\n";
    summary +=
        "crossed = " + std::string(crossing.crossed ? "true" : "false") + "\n";
    if (crossing.crossed)
        summary += "t_cross = " + format_double(crossing.t_cross) + "\n";
    return finish(ctx, std::move(summary));
}

CommandResult run_sweep(const RunConfig& cfg) {
    const PseudomodeSpec& spec = model_of(cfg);
    if (!cfg.sweep.has_value())
        throw std::invalid_argument("sweep needs a [sweep] section");

    const std::vector<double> gammas = cfg.sweep->gammas();
    const std::vector<double> alphas = cfg.sweep->alphas();
    const std::vector<SweepPoint> points =
        gap_sweep(gammas, alphas, spec.omega0(), cfg.run.threads);

    OutputContext ctx = open_output(cfg);
    CsvWriter csv({"gamma", "alpha", "delta", "delta_markovian", "is_lep"});
    int lep_count = 0;
    double best_delta = 0.0, best_gamma = gammas.front(),
           best_alpha = alphas.front();
    for (const SweepPoint& p : points) {
        const double delta_m =
            p.gamma > 0.0 ? 2.0 * p.alpha * p.alpha / p.gamma : 0.0;
        csv.row({format_double(p.gamma), format_double(p.alpha),
                 format_double(p.delta), format_double(delta_m),
                 p.is_lep ? "1" : "0"});
        lep_count += p.is_lep ? 1 : 0;
        if (p.delta > best_delta) {
            best_delta = p.delta;
            best_gamma = p.gamma;
            best_alpha = p.alpha;
        }
    }
    emit(ctx, "sweep.csv", csv);

    std::string summary = "command: sweep\n";
    summary += "omega0 = " + format_double(spec.omega0()) + "\n";
    summary += "grid = " + format_int(static_cast<std::int64_t>(gammas.size())) +
               " x " + format_int(static_cast<std::int64_t>(alphas.size())) +
               "\n";
    summary += "lep_points = " + format_int(lep_count) + "\n";
    summary += "max_delta = " + format_double(best_delta) + " at gamma = " +
               format_double(best_gamma) + ", alpha = " +
               format_double(best_alpha) + "\n";
    summary += "threads = " + format_int(cfg.run.threads) + "\n";
    return finish(ctx, std::move(summary));
}

}  // namespace qmpe
