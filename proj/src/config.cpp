#include "qmpe/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "qmpe/csv.hpp"

namespace qmpe {

std::vector<double> TimeGrid::times() const {
    if (n_points < 2 || !(t_max > 0.0))
        throw std::invalid_argument("time grid needs t_max > 0, n_points >= 2");
    std::vector<double> ts(static_cast<std::size_t>(n_points));
    for (int k = 0; k < n_points; ++k)
        ts[static_cast<std::size_t>(k)] =
            t_max * static_cast<double>(k) / static_cast<double>(n_points - 1);
    ts.front() = 0.0;
    ts.back() = t_max;
    return ts;
}

namespace {

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

}  // namespace

std::vector<double> SweepSection::gammas() const {
    return linspace(gamma_min, gamma_max, gamma_points);
}

std::vector<double> SweepSection::alphas() const {
    return linspace(alpha_min, alpha_max, alpha_points);
}

namespace {

[[noreturn]] void fail(int line, const std::string& message) {
    throw std::invalid_argument("line " + std::to_string(line) + ": " + message);
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

struct RawValue {
    std::string text;
    int line = 0;
};

using RawSection = std::map<std::string, RawValue>;
using RawConfig = std::map<std::string, RawSection>;

const std::map<std::string, std::set<std::string>>& schema() {
    static const std::map<std::string, std::set<std::string>> s = {
        {"model", {"omega0", "alpha", "omega", "gamma"}},
        {"bath", {"coupling", "width"}},
        {"truncation", {"n_sys", "n_modes", "max_dimension"}},
        {"time", {"t_max", "n_points"}},
        {"initial", {"xi", "state_file"}},
        {"mpemba", {"alpha2", "omega2", "gamma2"}},
        {"scan", {"variable", "min", "max", "points", "mode"}},
        {"sweep",
         {"gamma_min", "gamma_max", "gamma_points", "alpha_min", "alpha_max",
          "alpha_points"}},
        {"run",
         {"distance", "markovian", "threads", "excitation_cap",
          "include_lamb_shift", "out"}},
    };
    return s;
}

RawConfig tokenize(const std::string& text) {
    RawConfig raw;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']') fail(line_no, "unterminated section header");
            section = trim(t.substr(1, t.size() - 2));
            if (schema().find(section) == schema().end())
                fail(line_no, "unknown section [" + section + "]");
            if (raw.find(section) != raw.end())
                fail(line_no, "section [" + section + "] appears twice");
            raw[section];
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) fail(line_no, "expected key = value");
        if (section.empty()) fail(line_no, "key outside any [section]");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty()) fail(line_no, "empty key");
        if (schema().at(section).find(key) == schema().at(section).end())
            fail(line_no, "unknown key '" + key + "' in [" + section + "]");
        auto& sec = raw[section];
        if (sec.find(key) != sec.end())
            fail(line_no, "duplicate key '" + key + "' in [" + section + "]");
        sec[key] = RawValue{value, line_no};
    }
    return raw;
}

double parse_double(const RawValue& v) {
    const std::string& s = v.text;
    double out = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        fail(v.line, "expected a number, got '" + s + "'");
    if (!std::isfinite(out)) fail(v.line, "number must be finite");
    return out;
}

int parse_int(const RawValue& v) {
    const std::string& s = v.text;
    int out = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        fail(v.line, "expected an integer, got '" + s + "'");
    return out;
}

bool parse_bool(const RawValue& v) {
    if (v.text == "true" || v.text == "1") return true;
    if (v.text == "false" || v.text == "0") return false;
    fail(v.line, "expected true or false, got '" + v.text + "'");
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> items;
    std::string::size_type start = 0;
    while (true) {
        const auto comma = s.find(',', start);
        items.push_back(trim(s.substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return items;
}

std::vector<double> parse_double_list(const RawValue& v) {
    std::vector<double> out;
    for (const auto& item : split_list(v.text))
        out.push_back(parse_double(RawValue{item, v.line}));
    return out;
}

std::vector<int> parse_int_list(const RawValue& v) {
    std::vector<int> out;
    for (const auto& item : split_list(v.text))
        out.push_back(parse_int(RawValue{item, v.line}));
    return out;
}

const RawValue* find(const RawSection* sec, const std::string& key) {
    if (sec == nullptr) return nullptr;
    const auto it = sec->find(key);
    return it == sec->end() ? nullptr : &it->second;
}

const RawSection* find_section(const RawConfig& raw, const std::string& name) {
    const auto it = raw.find(name);
    return it == raw.end() ? nullptr : &it->second;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    const RawConfig raw = tokenize(text);
    RunConfig cfg;

    const RawSection* model = find_section(raw, "model");
    if (model == nullptr)
        throw std::invalid_argument("missing [model] section");
    const RawValue* omega0_v = find(model, "omega0");
    if (omega0_v == nullptr)
        throw std::invalid_argument("[model] needs omega0");
    const double omega0 = parse_double(*omega0_v);

    const RawSection* bath = find_section(raw, "bath");
    const RawValue* alpha_v = find(model, "alpha");
    const RawValue* omega_v = find(model, "omega");
    const RawValue* gamma_v = find(model, "gamma");
    if (bath != nullptr) {
        if (alpha_v != nullptr || omega_v != nullptr || gamma_v != nullptr)
            throw std::invalid_argument(
                "[bath] and [model] mode lists are mutually exclusive");
        const RawValue* coupling = find(bath, "coupling");
        const RawValue* width = find(bath, "width");
        if (coupling == nullptr || width == nullptr)
            throw std::invalid_argument("[bath] needs coupling and width");
        try {
            cfg.bath = LorentzianBath(parse_double(*coupling),
                                      parse_double(*width), omega0);
            cfg.model = lorentzian_to_pseudomode(*cfg.bath);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(std::string("in [bath]: ") + e.what());
        }
    } else {
        if (alpha_v == nullptr || gamma_v == nullptr)
            throw std::invalid_argument(
                "[model] needs alpha and gamma lists (or a [bath] section)");
        const std::vector<double> alphas = parse_double_list(*alpha_v);
        const std::vector<double> gammas = parse_double_list(*gamma_v);
        std::vector<double> omegas(alphas.size(), omega0);
        if (omega_v != nullptr) omegas = parse_double_list(*omega_v);
        if (alphas.size() != gammas.size() || alphas.size() != omegas.size())
            throw std::invalid_argument(
                "[model] alpha, omega and gamma lists must have equal length");
        std::vector<PseudomodeMode> modes(alphas.size());
        for (std::size_t i = 0; i < alphas.size(); ++i)
            modes[i] = PseudomodeMode{alphas[i], omegas[i], gammas[i]};
        try {
            cfg.model = PseudomodeSpec(omega0, std::move(modes));
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(std::string("in [model]: ") + e.what());
        }
    }

    if (const RawSection* tr = find_section(raw, "truncation")) {
        const RawValue* n_sys = find(tr, "n_sys");
        const RawValue* n_modes = find(tr, "n_modes");
        if (n_sys == nullptr || n_modes == nullptr)
            throw std::invalid_argument("[truncation] needs n_sys and n_modes");
        std::size_t max_dim = 4096;
        if (const RawValue* md = find(tr, "max_dimension")) {
            const int v = parse_int(*md);
            if (v < 2) fail(md->line, "max_dimension must be >= 2");
            max_dim = static_cast<std::size_t>(v);
        }
        const std::vector<int> cutoffs = parse_int_list(*n_modes);
        if (cutoffs.size() != cfg.model->mode_count())
            fail(n_modes->line,
                 "n_modes must list one cutoff per model mode");
        try {
            cfg.truncation = TruncationSpec(parse_int(*n_sys), cutoffs, max_dim);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(std::string("in [truncation]: ") +
                                        e.what());
        }
    }

    if (const RawSection* tm = find_section(raw, "time")) {
        if (const RawValue* v = find(tm, "t_max")) cfg.time.t_max = parse_double(*v);
        if (const RawValue* v = find(tm, "n_points"))
            cfg.time.n_points = parse_int(*v);
        if (!(cfg.time.t_max > 0.0))
            throw std::invalid_argument("[time] t_max must be > 0");
        if (cfg.time.n_points < 2)
            throw std::invalid_argument("[time] n_points must be >= 2");
    }

    if (const RawSection* init = find_section(raw, "initial")) {
        if (const RawValue* v = find(init, "xi")) cfg.xi = parse_double_list(*v);
        if (const RawValue* v = find(init, "state_file"))
            for (const auto& item : split_list(v->text)) {
                if (item.empty()) fail(v->line, "empty state_file entry");
                cfg.state_files.push_back(item);
            }
    }

    if (const RawSection* mp = find_section(raw, "mpemba")) {
        if (const RawValue* v = find(mp, "alpha2")) cfg.second.alpha = parse_double(*v);
        if (const RawValue* v = find(mp, "omega2")) cfg.second.omega = parse_double(*v);
        if (const RawValue* v = find(mp, "gamma2")) cfg.second.gamma = parse_double(*v);
    }

    if (const RawSection* sc = find_section(raw, "scan")) {
        ScanSection scan;
        const RawValue* variable = find(sc, "variable");
        const RawValue* min_v = find(sc, "min");
        const RawValue* max_v = find(sc, "max");
        if (variable == nullptr || min_v == nullptr || max_v == nullptr)
            throw std::invalid_argument("[scan] needs variable, min and max");
        if (variable->text == "gamma")
            scan.variable = ScanVariable::Gamma;
        else if (variable->text == "alpha")
            scan.variable = ScanVariable::Alpha;
        else
            fail(variable->line, "variable must be gamma or alpha");
        scan.lo = parse_double(*min_v);
        scan.hi = parse_double(*max_v);
        if (!(scan.lo < scan.hi))
            fail(min_v->line, "[scan] needs min < max");
        if (const RawValue* v = find(sc, "points")) {
            scan.points = parse_int(*v);
            if (scan.points < 2) fail(v->line, "points must be >= 2");
        }
        if (const RawValue* v = find(sc, "mode")) {
            const int mode = parse_int(*v);
            if (mode < 1 ||
                static_cast<std::size_t>(mode) > cfg.model->mode_count())
                fail(v->line, "mode must name one of the model modes");
            scan.mode_index = static_cast<std::size_t>(mode - 1);
        }
        cfg.scan = scan;
    }

    if (const RawSection* sw = find_section(raw, "sweep")) {
        SweepSection sweep;
        const char* needed[] = {"gamma_min", "gamma_max", "gamma_points",
                                "alpha_min", "alpha_max", "alpha_points"};
        for (const char* key : needed)
            if (find(sw, key) == nullptr)
                throw std::invalid_argument(std::string("[sweep] needs ") + key);
        sweep.gamma_min = parse_double(*find(sw, "gamma_min"));
        sweep.gamma_max = parse_double(*find(sw, "gamma_max"));
        sweep.gamma_points = parse_int(*find(sw, "gamma_points"));
        sweep.alpha_min = parse_double(*find(sw, "alpha_min"));
        sweep.alpha_max = parse_double(*find(sw, "alpha_max"));
        sweep.alpha_points = parse_int(*find(sw, "alpha_points"));
        if (sweep.gamma_points < 1 || sweep.alpha_points < 1)
            throw std::invalid_argument("[sweep] point counts must be >= 1");
        if (sweep.gamma_points > 1 && !(sweep.gamma_min < sweep.gamma_max))
            throw std::invalid_argument("[sweep] needs gamma_min < gamma_max");
        if (sweep.alpha_points > 1 && !(sweep.alpha_min < sweep.alpha_max))
            throw std::invalid_argument("[sweep] needs alpha_min < alpha_max");
        cfg.sweep = sweep;
    }

    if (const RawSection* run = find_section(raw, "run")) {
        if (const RawValue* v = find(run, "distance")) {
            if (v->text == "overlap")
                cfg.run.distance = DistanceKind::CoherentOverlap;
            else if (v->text == "hs")
                cfg.run.distance = DistanceKind::HilbertSchmidtHalf;
            else if (v->text == "trace")
                cfg.run.distance = DistanceKind::TraceNorm;
            else
                fail(v->line, "distance must be overlap, hs or trace");
        }
        if (const RawValue* v = find(run, "markovian"))
            cfg.run.markovian = parse_bool(*v);
        if (const RawValue* v = find(run, "threads")) {
            cfg.run.threads = parse_int(*v);
            if (cfg.run.threads < 1) fail(v->line, "threads must be >= 1");
        }
        if (const RawValue* v = find(run, "excitation_cap")) {
            cfg.run.excitation_cap = parse_int(*v);
            if (cfg.run.excitation_cap < 0)
                fail(v->line, "excitation_cap must be >= 0");
        }
        if (const RawValue* v = find(run, "include_lamb_shift"))
            cfg.run.include_lamb_shift = parse_bool(*v);
        if (const RawValue* v = find(run, "out")) {
            if (v->text.empty()) fail(v->line, "out must not be empty");
            cfg.run.out_dir = v->text;
        }
    }

    return cfg;
}

RunConfig load_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in)
        throw std::invalid_argument("cannot open config file " + file.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

namespace {

std::string join_doubles(const std::vector<double>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i > 0) out += ", ";
        out += format_double(xs[i]);
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

}  // namespace

std::string serialize_config(const RunConfig& cfg) {
    if (!cfg.model.has_value())
        throw std::invalid_argument("config without a model is not serialisable");
    std::string out;
    const auto kv = [&out](const std::string& key, const std::string& value) {
        out += key + " = " + value + "\n";
    };

    out += "[model]\n";
    kv("omega0", format_double(cfg.model->omega0()));
    if (cfg.bath.has_value()) {
        out += "\n[bath]\n";
        kv("coupling", format_double(cfg.bath->coupling()));
        kv("width", format_double(cfg.bath->width()));
    } else {
        std::vector<double> alphas, omegas, gammas;
        for (const auto& m : cfg.model->modes()) {
            alphas.push_back(m.alpha);
            omegas.push_back(m.omega);
            gammas.push_back(m.gamma);
        }
        kv("alpha", join_doubles(alphas));
        kv("omega", join_doubles(omegas));
        kv("gamma", join_doubles(gammas));
    }

    if (cfg.truncation.has_value()) {
        out += "\n[truncation]\n";
        kv("n_sys", format_int(cfg.truncation->n_sys()));
        std::string cutoffs;
        for (std::size_t i = 0; i < cfg.truncation->n_modes().size(); ++i) {
            if (i > 0) cutoffs += ", ";
            cutoffs += format_int(cfg.truncation->n_modes()[i]);
        }
        kv("n_modes", cutoffs);
        kv("max_dimension",
           format_int(static_cast<std::int64_t>(cfg.truncation->max_dimension())));
    }

    out += "\n[time]\n";
    kv("t_max", format_double(cfg.time.t_max));
    kv("n_points", format_int(cfg.time.n_points));

    if (!cfg.xi.empty() || !cfg.state_files.empty()) {
        out += "\n[initial]\n";
        if (!cfg.xi.empty()) kv("xi", join_doubles(cfg.xi));
        if (!cfg.state_files.empty()) {
            std::string files;
            for (std::size_t i = 0; i < cfg.state_files.size(); ++i) {
                if (i > 0) files += ", ";
                files += cfg.state_files[i];
            }
            kv("state_file", files);
        }
    }

    if (cfg.second.alpha || cfg.second.omega || cfg.second.gamma) {
        out += "\n[mpemba]\n";
        if (cfg.second.alpha) kv("alpha2", format_double(*cfg.second.alpha));
        if (cfg.second.omega) kv("omega2", format_double(*cfg.second.omega));
        if (cfg.second.gamma) kv("gamma2", format_double(*cfg.second.gamma));
    }

    if (cfg.scan.has_value()) {
        out += "\n[scan]\n";
        kv("variable",
           cfg.scan->variable == ScanVariable::Gamma ? "gamma" : "alpha");
        kv("min", format_double(cfg.scan->lo));
        kv("max", format_double(cfg.scan->hi));
        kv("points", format_int(cfg.scan->points));
        kv("mode", format_int(static_cast<std::int64_t>(cfg.scan->mode_index + 1)));
    }

    if (cfg.sweep.has_value()) {
        out += "\n[sweep]\n";
        kv("gamma_min", format_double(cfg.sweep->gamma_min));
        kv("gamma_max", format_double(cfg.sweep->gamma_max));
        kv("gamma_points", format_int(cfg.sweep->gamma_points));
        kv("alpha_min", format_double(cfg.sweep->alpha_min));
        kv("alpha_max", format_double(cfg.sweep->alpha_max));
        kv("alpha_points", format_int(cfg.sweep->alpha_points));
    }

    out += "\n[run]\n";
    kv("distance", distance_name(cfg.run.distance));
    kv("markovian", cfg.run.markovian ? "true" : "false");
    kv("threads", format_int(cfg.run.threads));
    kv("excitation_cap", format_int(cfg.run.excitation_cap));
    kv("include_lamb_shift", cfg.run.include_lamb_shift ? "true" : "false");
    kv("out", cfg.run.out_dir);
    return out;
}

Eigen::MatrixXcd load_state_csv(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in)
        throw std::invalid_argument("cannot open state file " + file.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty()) continue;
        std::vector<double> row;
        for (const auto& item : split_list(t))
            row.push_back(parse_double(RawValue{item, line_no}));
        if (!rows.empty() && row.size() != rows.front().size())
            fail(line_no, "ragged row in state file");
        rows.push_back(std::move(row));
    }
    if (rows.empty())
        throw std::invalid_argument("state file " + file.string() + " is empty");
    const std::size_t n = rows.size();
    if (rows.front().size() != 2 * n)
        throw std::invalid_argument(
            "state file must hold an n x n complex matrix as n rows of "
            "2n columns (re, im pairs)");
    Eigen::MatrixXcd rho(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                std::complex<double>{rows[i][2 * j], rows[i][2 * j + 1]};
    return rho;
}

}  // namespace qmpe
