#include "omqd/scenario.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "omqd/csv.hpp"

namespace omqd {

using nlohmann::json;

std::string to_string(OutputKind kind) {
    switch (kind) {
        case OutputKind::meanfield: return "meanfield";
        case OutputKind::perturbative: return "perturbative";
        case OutputKind::fluctuations: return "fluctuations";
        case OutputKind::entanglement: return "entanglement";
    }
    throw std::logic_error("unknown output kind");
}

OutputKind output_kind_from_string(const std::string& name) {
    if (name == "meanfield") return OutputKind::meanfield;
    if (name == "perturbative") return OutputKind::perturbative;
    if (name == "fluctuations") return OutputKind::fluctuations;
    if (name == "entanglement") return OutputKind::entanglement;
    throw ConfigError("unknown output kind: " + name);
}

std::string to_string(Reduce reduce) {
    return reduce == Reduce::max ? "max" : "mean_last_5_periods";
}

namespace {

const std::map<std::string, double SystemParams::*>& param_fields() {
    static const std::map<std::string, double SystemParams::*> fields = {
        {"omega_m", &SystemParams::omega_m}, {"delta_c", &SystemParams::delta_c},
        {"delta_0", &SystemParams::delta_0}, {"omega_e", &SystemParams::omega_e},
        {"Omega", &SystemParams::Omega},     {"E0", &SystemParams::E0},
        {"eps", &SystemParams::eps},         {"G", &SystemParams::G},
        {"g0", &SystemParams::g0},           {"kappa_a", &SystemParams::kappa_a},
        {"kappa_d", &SystemParams::kappa_d}, {"gamma_m", &SystemParams::gamma_m},
        {"N", &SystemParams::N},             {"n_b", &SystemParams::n_b},
    };
    return fields;
}

SystemParams parse_params(const json& node, const std::string& context) {
    if (!node.is_object()) throw ConfigError(context + ": params must be an object");
    SystemParams p;
    for (const auto& [key, member] : param_fields()) {
        if (node.contains(key)) {
            if (!node.at(key).is_number())
                throw ConfigError(context + ": parameter '" + key + "' must be a number");
            p.*member = node.at(key).get<double>();
        } else if (key != "omega_m") {  // omega_m defaults to 1
            throw ConfigError(context + ": missing key '" + key + "'");
        }
    }
    for (const auto& [key, value] : node.items()) {
        (void)value;
        if (param_fields().find(key) == param_fields().end())
            throw ConfigError(context + ": unknown parameter key '" + key + "'");
    }
    return p;
}

// dt must divide the modulation period to 1e-9 relative; returns the snapped
// exact divisor.
double snap_dt(double dt, double tau, const std::string& context) {
    if (!(dt > 0.0)) throw ConfigError(context + ": dt must be positive");
    const double ratio = tau / dt;
    const double steps = std::round(ratio);
    if (steps < 1.0 || std::abs(ratio - steps) > 1e-9 * ratio)
        throw ConfigError(context + ": incommensurate step (tau/dt = " + format_double(ratio) +
                          " is not an integer)");
    return tau / steps;
}

ScenarioSpec parse_scenario_body(const json& node, const std::string& context,
                                 const std::string& name) {
    ScenarioSpec spec;
    spec.name = name;
    spec.description = node.value("description", std::string{});
    if (!node.contains("params")) throw ConfigError(context + ": missing key 'params'");
    spec.params = parse_params(node.at("params"), context);

    auto errs = validation_errors(spec.params);
    if (!errs.empty()) {
        std::string msg = context + ": invalid parameters";
        for (const auto& e : errs) msg += "\n  - " + e;
        throw ConfigError(msg);
    }
    if (!(spec.params.Omega > 0.0))
        throw ConfigError(context + ": Omega must be positive to define the modulation period");
    const double tau = spec.params.modulation_period();

    if (node.contains("dt") && node.contains("steps_per_period"))
        throw ConfigError(context + ": give either 'dt' or 'steps_per_period', not both");
    if (node.contains("steps_per_period")) {
        const auto steps = node.at("steps_per_period").get<double>();
        if (!(steps >= 1.0) || steps != std::floor(steps))
            throw ConfigError(context + ": steps_per_period must be a positive integer");
        spec.dt = tau / steps;
    } else if (node.contains("dt")) {
        spec.dt = snap_dt(node.at("dt").get<double>(), tau, context);
    } else {
        spec.dt = tau / 2000.0;
    }

    if (node.contains("t_end") && node.contains("t_end_periods"))
        throw ConfigError(context + ": give either 't_end' or 't_end_periods', not both");
    double t_end = 70.0 * tau;
    if (node.contains("t_end_periods")) t_end = node.at("t_end_periods").get<double>() * tau;
    if (node.contains("t_end")) t_end = node.at("t_end").get<double>();
    if (!(t_end >= spec.dt)) throw ConfigError(context + ": t_end must be at least dt");
    spec.t_end = std::round(t_end / spec.dt) * spec.dt;

    if (node.contains("outputs")) {
        spec.outputs.clear();
        for (const auto& o : node.at("outputs"))
            spec.outputs.insert(output_kind_from_string(o.get<std::string>()));
    }
    if (node.contains("output_dir"))
        spec.output_dir = node.at("output_dir").get<std::string>();
    spec.stride = node.value("stride", 10);
    if (spec.stride < 1) throw ConfigError(context + ": stride must be >= 1");
    if (node.contains("variant")) {
        const auto v = node.at("variant").get<std::string>();
        if (v == "harmonic") spec.variant = RecursionVariant::harmonic;
        else if (v == "consistent") spec.variant = RecursionVariant::consistent;
        else if (v == "literal") spec.variant = RecursionVariant::literal;
        else throw ConfigError(context + ": unknown recursion variant '" + v + "'");
    }
    spec.n_max = node.value("n_max", 3);
    spec.j_max = node.value("j_max", 4);
    if (spec.n_max < 1 || spec.j_max < 0) throw ConfigError(context + ": bad truncation");
    return spec;
}

json parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        // translate the byte offset to a line number
        std::size_t line = 1;
        for (std::size_t i = 0; i < std::min(e.byte, text.size()); ++i)
            if (text[i] == '\n') ++line;
        std::ostringstream os;
        os << path.string() << ":" << line << ": parse error: " << e.what();
        throw ConfigError(os.str());
    }
}

}  // namespace

void set_param_field(SystemParams& params, const std::string& field, double value) {
    const auto it = param_fields().find(field);
    if (it == param_fields().end())
        throw ConfigError("axis does not name a SystemParams field: " + field);
    params.*(it->second) = value;
}

double get_param_field(const SystemParams& params, const std::string& field) {
    const auto it = param_fields().find(field);
    if (it == param_fields().end())
        throw ConfigError("axis does not name a SystemParams field: " + field);
    return params.*(it->second);
}

std::variant<ScenarioSpec, SweepSpec> load_config(const std::filesystem::path& path) {
    const json root = parse_file(path);
    const std::string context = path.filename().string();
    if (!root.is_object()) throw ConfigError(context + ": top level must be an object");
    if (!root.contains("name")) throw ConfigError(context + ": missing key 'name'");
    const auto name = root.at("name").get<std::string>();

    ScenarioSpec base = parse_scenario_body(root, context, name);
    if (!root.contains("sweep")) return base;

    const json& sw = root.at("sweep");
    SweepSpec sweep;
    sweep.base = std::move(base);
    if (!sw.contains("axis")) throw ConfigError(context + ": sweep missing key 'axis'");
    sweep.axis = sw.at("axis").get<std::string>();
    get_param_field(sweep.base.params, sweep.axis);  // must name a field
    if (!sw.contains("values") || !sw.at("values").is_array() || sw.at("values").empty())
        throw ConfigError(context + ": sweep 'values' must be a nonempty array");
    for (const auto& v : sw.at("values")) {
        const double x = v.get<double>();
        if (!std::isfinite(x)) throw ConfigError(context + ": sweep value is not finite");
        sweep.values.push_back(x);
    }
    const auto reduce = sw.value("reduce", std::string{"mean-last-5-periods"});
    if (reduce == "max") sweep.reduce = Reduce::max;
    else if (reduce == "mean-last-5-periods") sweep.reduce = Reduce::mean_last_5_periods;
    else throw ConfigError(context + ": unknown reduce '" + reduce + "'");
    if (sw.contains("column")) sweep.columns.push_back(sw.at("column").get<std::string>());
    if (sw.contains("columns"))
        for (const auto& c : sw.at("columns")) sweep.columns.push_back(c.get<std::string>());
    if (sweep.columns.empty()) throw ConfigError(context + ": sweep names no column to reduce");
    return sweep;
}

ScenarioResult compute_scenario(const ScenarioSpec& spec) {
    ScenarioResult result;
    const SystemParams params = validate(spec.params);
    result.meanfield = integrate_meanfield(params, MeanFieldState{}, spec.t_end, spec.dt);
    if (spec.outputs.count(OutputKind::perturbative))
        result.expansion = build_expansion(params, spec.n_max, spec.j_max, spec.variant);
    const bool need_cov = spec.outputs.count(OutputKind::fluctuations) ||
                          spec.outputs.count(OutputKind::entanglement);
    if (need_cov) {
        const CovarianceState V0{initial_covariance(params), 0.0};
        result.covariance = integrate_covariance(params, V0, result.meanfield, spec.t_end);
        if (spec.outputs.count(OutputKind::entanglement))
            result.entanglement = entanglement_timeseries(result.covariance);
    }
    return result;
}

namespace {

json params_to_json(const SystemParams& p) {
    json out;
    for (const auto& [key, member] : param_fields()) out[key] = p.*member;
    return out;
}

void write_manifest(const std::filesystem::path& path, const ScenarioSpec& spec,
                    const std::vector<std::filesystem::path>& files, const json& extra) {
    json m;
    m["name"] = spec.name;
    m["description"] = spec.description;
    m["version"] = kVersion;
    m["params"] = params_to_json(spec.params);
    m["t_end"] = spec.t_end;
    m["dt"] = spec.dt;
    m["stride"] = spec.stride;
    m["n_max"] = spec.n_max;
    m["j_max"] = spec.j_max;
    m["variant"] = spec.variant == RecursionVariant::harmonic
                       ? "harmonic"
                       : (spec.variant == RecursionVariant::consistent ? "consistent" : "literal");
    json outs = json::array();
    for (OutputKind k : spec.outputs) outs.push_back(to_string(k));
    m["outputs"] = outs;
    json fs = json::array();
    for (const auto& f : files) fs.push_back(f.filename().string());
    m["files"] = fs;
    if (!extra.is_null()) m["sweep"] = extra;
    std::ofstream out(path, std::ios::binary);
    out << m.dump(2) << '\n';
}

}  // namespace

std::vector<std::filesystem::path> run_scenario(const ScenarioSpec& spec) {
    const ScenarioResult result = compute_scenario(spec);
    std::filesystem::create_directories(spec.output_dir);
    std::vector<std::filesystem::path> files;
    const auto stride = static_cast<std::size_t>(spec.stride);

    if (spec.outputs.count(OutputKind::meanfield)) {
        const auto path = spec.output_dir / (spec.name + "_meanfield.csv");
        CsvWriter csv(path.string(), {"t", "q", "p", "Re(a)", "Im(a)", "Re(sigma)", "Im(sigma)"});
        const auto& traj = result.meanfield;
        for (std::size_t i = 0; i < traj.states.size(); i += stride) {
            const auto& s = traj.states[i];
            csv.row({traj.times[i], s.q, s.p, s.a.real(), s.a.imag(), s.sigma.real(),
                     s.sigma.imag()});
        }
        files.push_back(path);
    }

    if (spec.outputs.count(OutputKind::perturbative)) {
        const auto& ex = *result.expansion;
        const auto cpath = spec.output_dir / (spec.name + "_coefficients.csv");
        {
            CsvWriter csv(cpath.string(), {"variable", "n", "j", "Re", "Im"});
            static const char* names[] = {"q", "p", "a", "sigma"};
            for (const auto& e : ex.entries())
                csv.raw_row({names[static_cast<int>(e.var)], std::to_string(e.n),
                             std::to_string(e.j), format_double(e.value.real()),
                             format_double(e.value.imag())});
        }
        files.push_back(cpath);
        // asymptotic cycle over the final period, on the trajectory grid
        const auto rpath = spec.output_dir / (spec.name + "_reconstruction.csv");
        {
            CsvWriter csv(rpath.string(),
                          {"t", "q", "p", "Re(a)", "Im(a)", "Re(sigma)", "Im(sigma)"});
            const auto period_steps =
                static_cast<std::size_t>(std::llround(spec.params.modulation_period() / spec.dt));
            const std::size_t n = result.meanfield.times.size();
            const std::size_t start = n > period_steps + 1 ? n - period_steps - 1 : 0;
            for (std::size_t i = start; i < n; i += stride) {
                const double t = result.meanfield.times[i];
                const MeanFieldState s = reconstruct(ex, spec.params.G, t);
                csv.row({t, s.q, s.p, s.a.real(), s.a.imag(), s.sigma.real(), s.sigma.imag()});
            }
        }
        files.push_back(rpath);
    }

    if (spec.outputs.count(OutputKind::fluctuations)) {
        const auto epath = spec.output_dir / (spec.name + "_energies.csv");
        {
            CsvWriter csv(epath.string(), {"t", "mirror", "cavity", "exciton", "phonon_number"});
            for (std::size_t i = 0; i < result.covariance.size(); i += stride) {
                const auto& s = result.covariance[i];
                const auto e = fluctuation_energies(s);
                csv.row({s.t, e.mirror, e.cavity, e.exciton, phonon_number(s)});
            }
        }
        files.push_back(epath);
        const auto vpath = spec.output_dir / (spec.name + "_covariance.csv");
        {
            std::vector<std::string> header{"t"};
            for (int r = 0; r < 6; ++r)
                for (int c = r; c < 6; ++c)
                    header.push_back("V" + std::to_string(r + 1) + std::to_string(c + 1));
            CsvWriter csv(vpath.string(), header);
            for (std::size_t i = 0; i < result.covariance.size(); i += stride) {
                const auto& s = result.covariance[i];
                std::vector<double> row{s.t};
                for (int r = 0; r < 6; ++r)
                    for (int c = r; c < 6; ++c) row.push_back(s.V(r, c));
                csv.row(row);
            }
        }
        files.push_back(vpath);
    }

    if (spec.outputs.count(OutputKind::entanglement)) {
        const auto path = spec.output_dir / (spec.name + "_entanglement.csv");
        CsvWriter csv(path.string(), {"t", "E_md", "E_cd", "E_cm", "mirror_energy",
                                      "cavity_energy", "exciton_energy", "phonons"});
        for (std::size_t i = 0; i < result.entanglement.size(); i += stride) {
            const auto& r = result.entanglement[i];
            csv.row({r.t, r.E_md, r.E_cd, r.E_cm, r.energies.mirror, r.energies.cavity,
                     r.energies.exciton, r.phonons});
        }
        files.push_back(path);
    }

    write_manifest(spec.output_dir / (spec.name + "_manifest.json"), spec, files, json{});
    files.push_back(spec.output_dir / (spec.name + "_manifest.json"));
    return files;
}

namespace {

struct Series {
    std::vector<double> times;
    std::vector<double> values;
};

Series extract_column(const ScenarioSpec& spec, const ScenarioResult& result,
                      const std::string& column) {
    Series s;
    const auto& mf = result.meanfield;
    auto fill_mf = [&](auto getter) {
        s.times = mf.times;
        s.values.reserve(mf.states.size());
        for (const auto& st : mf.states) s.values.push_back(getter(st));
    };
    if (column == "q") { fill_mf([](const MeanFieldState& st) { return st.q; }); return s; }
    if (column == "p") { fill_mf([](const MeanFieldState& st) { return st.p; }); return s; }
    if (column == "Re(a)") { fill_mf([](const MeanFieldState& st) { return st.a.real(); }); return s; }
    if (column == "Im(a)") { fill_mf([](const MeanFieldState& st) { return st.a.imag(); }); return s; }
    if (column == "Re(sigma)") { fill_mf([](const MeanFieldState& st) { return st.sigma.real(); }); return s; }
    if (column == "Im(sigma)") { fill_mf([](const MeanFieldState& st) { return st.sigma.imag(); }); return s; }

    if (column == "mirror" || column == "cavity" || column == "exciton" ||
        column == "phonon_number") {
        if (result.covariance.empty())
            throw ConfigError("column '" + column + "' requires the fluctuations output");
        for (const auto& st : result.covariance) {
            s.times.push_back(st.t);
            if (column == "phonon_number") s.values.push_back(phonon_number(st));
            else {
                const auto e = fluctuation_energies(st);
                s.values.push_back(column == "mirror" ? e.mirror
                                                      : (column == "cavity" ? e.cavity : e.exciton));
            }
        }
        return s;
    }
    if (column == "E_md" || column == "E_cd" || column == "E_cm") {
        if (result.entanglement.empty())
            throw ConfigError("column '" + column + "' requires the entanglement output");
        for (const auto& r : result.entanglement) {
            s.times.push_back(r.t);
            s.values.push_back(column == "E_md" ? r.E_md : (column == "E_cd" ? r.E_cd : r.E_cm));
        }
        return s;
    }
    (void)spec;
    throw ConfigError("unknown output column: " + column);
}

double reduce_series(const Series& s, Reduce reduce, double t_end, double tau) {
    if (s.values.empty()) throw std::logic_error("reduce_series: empty series");
    if (reduce == Reduce::max) return *std::max_element(s.values.begin(), s.values.end());
    const double t_from = t_end - 5.0 * tau;
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        if (s.times[i] >= t_from - 1e-12) {
            sum += s.values[i];
            ++count;
        }
    }
    if (count == 0) throw ConfigError("reduction window is empty; t_end shorter than 5 periods");
    return sum / static_cast<double>(count);
}

}  // namespace

std::filesystem::path run_sweep(const SweepSpec& spec, int workers) {
    if (workers < 1) workers = 1;
    struct Row {
        double value = 0.0;
        std::vector<double> reduced;
        std::string error;
    };
    std::vector<Row> rows(spec.values.size());
    std::atomic<std::size_t> next{0};

    auto work = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= spec.values.size()) return;
            Row& row = rows[i];
            row.value = spec.values[i];
            try {
                ScenarioSpec point = spec.base;
                point.name += "_" + spec.axis + "_" + format_double(row.value);
                set_param_field(point.params, spec.axis, row.value);
                validate(point.params);
                const ScenarioResult result = compute_scenario(point);
                const double tau = point.params.modulation_period();
                for (const auto& col : spec.columns) {
                    const Series s = extract_column(point, result, col);
                    row.reduced.push_back(reduce_series(s, spec.reduce, point.t_end, tau));
                }
            } catch (const std::exception& e) {
                row.reduced.clear();
                row.error = e.what();
            }
        }
    };
    if (workers == 1 || spec.values.size() == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        const auto nthreads = std::min<std::size_t>(static_cast<std::size_t>(workers),
                                                    spec.values.size());
        pool.reserve(nthreads);
        for (std::size_t i = 0; i < nthreads; ++i) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }

    std::filesystem::create_directories(spec.base.output_dir);
    const auto path = spec.base.output_dir / (spec.base.name + "_sweep.csv");
    std::vector<std::string> header{spec.axis};
    for (const auto& col : spec.columns) header.push_back(to_string(spec.reduce) + "_" + col);
    header.push_back("error");
    CsvWriter csv(path.string(), header);
    for (const Row& row : rows) {  // merged in axis order, never completion order
        std::vector<std::string> cells{format_double(row.value)};
        for (std::size_t c = 0; c < spec.columns.size(); ++c)
            cells.push_back(c < row.reduced.size() ? format_double(row.reduced[c]) : std::string{});
        std::string err = row.error;
        std::replace(err.begin(), err.end(), ',', ';');
        std::replace(err.begin(), err.end(), '\n', ' ');
        cells.push_back(err);
        csv.raw_row(cells);
    }

    json extra;
    extra["axis"] = spec.axis;
    extra["values"] = spec.values;
    extra["reduce"] = to_string(spec.reduce);
    extra["columns"] = spec.columns;
    write_manifest(spec.base.output_dir / (spec.base.name + "_manifest.json"), spec.base, {path},
                   extra);
    return path;
}

std::vector<CatalogEntry> list_scenarios(const std::filesystem::path& scenarios_dir) {
    if (!std::filesystem::is_directory(scenarios_dir))
        throw ConfigError("scenario directory not found: " + scenarios_dir.string());
    std::vector<CatalogEntry> out;
    for (const auto& entry : std::filesystem::directory_iterator(scenarios_dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
        const json root = parse_file(entry.path());
        CatalogEntry e;
        e.name = root.value("name", entry.path().stem().string());
        e.description = root.value("description", std::string{});
        e.file = entry.path();
        e.is_sweep = root.contains("sweep");
        out.push_back(std::move(e));
    }
    std::sort(out.begin(), out.end(),
              [](const CatalogEntry& a, const CatalogEntry& b) { return a.name < b.name; });
    for (std::size_t i = 1; i < out.size(); ++i)
        if (out[i].name == out[i - 1].name)
            throw ConfigError("duplicate scenario name: " + out[i].name);
    return out;
}

}  // namespace omqd
