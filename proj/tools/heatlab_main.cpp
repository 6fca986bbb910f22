// heatlab: heat kernels, harmonic functions, and limit-theorem experiments
// for Brownian motion killed on the boundary of multicone domains.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "heatlab/asymptotics.hpp"
#include "heatlab/cone.hpp"
#include "heatlab/mc.hpp"

using nlohmann::json;
using namespace heatlab;

namespace {

// exit codes: 0 success, 2 config error, 3 numeric failure, 4 I/O
constexpr int kOk = 0, kConfigError = 2, kNumericFailure = 3, kIoError = 4;

struct CliError {
    int code;
    std::string message;
};

[[noreturn]] void fail(int code, const std::string& msg) { throw CliError{code, msg}; }

Vec parse_point(const std::string& s, int dim) {
    std::vector<double> c;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            c.push_back(std::stod(item));
        } catch (...) {
            fail(kConfigError, "bad coordinate: " + item);
        }
    }
    if (static_cast<int>(c.size()) != dim)
        fail(kConfigError, "expected " + std::to_string(dim) + " coordinates, got '" + s + "'");
    return {c[0], c[1], dim == 3 ? c[2] : 0.0};
}

// comma list or start:factor:count geometric shorthand
std::vector<double> parse_grid(const std::string& s) {
    std::vector<double> g;
    try {
        if (s.find(':') != std::string::npos) {
            std::stringstream ss(s);
            std::string a, b, c;
            std::getline(ss, a, ':');
            std::getline(ss, b, ':');
            std::getline(ss, c, ':');
            g = geometric_grid(std::stod(a), std::stod(b), std::stoi(c));
        } else {
            std::stringstream ss(s);
            std::string item;
            while (std::getline(ss, item, ',')) g.push_back(std::stod(item));
        }
    } catch (const CliError&) {
        throw;
    } catch (...) {
        fail(kConfigError, "bad t-grid: " + s);
    }
    if (g.empty()) fail(kConfigError, "empty t-grid");
    for (std::size_t i = 1; i < g.size(); ++i)
        if (g[i] <= g[i - 1]) fail(kConfigError, "t-grid must be strictly increasing");
    return g;
}

void require_keys(const json& j, std::initializer_list<const char*> allowed,
                  const std::string& where) {
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* k : allowed)
            if (item.key() == k) ok = true;
        if (!ok) fail(kConfigError, "unknown key '" + item.key() + "' in " + where);
    }
}

Vec json_point(const json& j, int dim, const std::string& where) {
    if (!j.is_array() || static_cast<int>(j.size()) != dim)
        fail(kConfigError, where + " must be an array of " + std::to_string(dim) + " numbers");
    return {j[0].get<double>(), j[1].get<double>(), dim == 3 ? j[2].get<double>() : 0.0};
}

MulticoneDomain load_domain(const std::string& path, std::string& raw_text) {
    std::ifstream in(path);
    if (!in) fail(kIoError, "domain file not found: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    raw_text = buf.str();
    json j;
    try {
        j = json::parse(raw_text);
    } catch (const std::exception& e) {
        fail(kConfigError, std::string("malformed JSON config: ") + e.what());
    }
    require_keys(j, {"dimension", "core", "branches", "tolerance"}, "domain");
    MulticoneDomain d;
    try {
        d.dim = j.at("dimension").get<int>();
        if (j.contains("tolerance")) d.tol = j["tolerance"].get<double>();
        for (const auto& b : j.at("core")) {
            require_keys(b, {"center", "radius"}, "core ball");
            d.core.push_back({json_point(b.at("center"), d.dim, "core center"),
                              b.at("radius").get<double>()});
        }
        for (const auto& br : j.at("branches")) {
            require_keys(br, {"vertex", "opening", "truncation_radius"}, "branch");
            const json& op = br.at("opening");
            require_keys(op, {"type", "params", "axis"}, "opening");
            Opening opening;
            std::string type = op.at("type").get<std::string>();
            const json& params = op.at("params");
            if (type == "arc") {
                if (params.size() != 2) fail(kConfigError, "arc params must be [theta_a, theta_b]");
                opening = Opening::arc(params[0].get<double>(), params[1].get<double>());
            } else if (type == "cap") {
                if (params.size() != 1) fail(kConfigError, "cap params must be [colatitude]");
                Vec axis{0, 0, 1};
                if (op.contains("axis")) axis = json_point(op["axis"], 3, "cap axis");
                opening = Opening::cap(params[0].get<double>(), axis);
            } else {
                fail(kConfigError, "opening type must be 'arc' or 'cap'");
            }
            d.branches.emplace_back(json_point(br.at("vertex"), d.dim, "branch vertex"), opening,
                                    br.at("truncation_radius").get<double>());
        }
    } catch (const CliError&) {
        throw;
    } catch (const std::exception& e) {
        fail(kConfigError, std::string("bad domain config: ") + e.what());
    }
    auto violations = validate(d);
    if (!violations.empty()) {
        std::string msg = "invalid domain:";
        for (const auto& v : violations) msg += " [" + v + "]";
        fail(kConfigError, msg);
    }
    return d;
}

struct Output {
    std::ostream* os = &std::cout;
    std::ofstream file;
    void open(const std::string& path) {
        if (path.empty()) return;
        file.open(path);
        if (!file) fail(kIoError, "cannot open output file: " + path);
        os = &file;
    }
};

std::string config_hash(const std::vector<std::string>& argv_words, const std::string& extra) {
    std::string all;
    for (const auto& w : argv_words) all += w + '\x1f';
    all += extra;
    return hash_hex(fnv1a(all));
}

void csv_header(std::ostream& os, const std::string& hash) {
    os << "# heatlab " << kVersion << " config_hash=" << hash << "\n";
}

std::vector<SpectralData> branch_spectra(const MulticoneDomain& d, int k) {
    std::vector<SpectralData> out;
    for (const auto& br : d.branches) out.push_back(spectrum(br.opening, k));
    return out;
}

int env_workers() {
    const char* w = std::getenv("HEATLAB_WORKERS");
    if (!w) return 0;
    try {
        return std::stoi(w);
    } catch (...) {
        return 0;
    }
}

} // namespace

int main(int argc, char** argv) {
    std::vector<std::string> argv_words(argv, argv + argc);

    CLI::App app{"heat kernels and exit asymptotics in multicone domains"};
    app.require_subcommand(1);

    std::string domain_path, out_path, json_path;
    std::string x_str, y_str, grid_str = "1";
    std::vector<double> arc_params;
    double cap_colat = 0.0;
    std::string axis_str = "0,0,1";
    int k_terms = 128;
    double tol = 1e-12, verify_tol = 0.10;
    double t_single = 1.0, dt = 1e-3, bandwidth = 0.0, radius = 1.0, stop_radius = 0.0;
    std::int64_t paths = 100000;
    std::uint64_t seed = 1;
    int workers = env_workers();
    bool no_bridge = false;
    int branch = 0;
    std::string mode = "w";

    auto add_opening = [&](CLI::App* c) {
        c->add_option("--arc", arc_params, "arc opening: theta_a theta_b")->expected(2);
        c->add_option("--cap", cap_colat, "cap opening: colatitude (3D)");
        c->add_option("--axis", axis_str, "cap axis as x,y,z");
    };
    auto make_opening = [&]() {
        if (!arc_params.empty()) return Opening::arc(arc_params[0], arc_params[1]);
        if (cap_colat > 0.0) {
            Vec ax = parse_point(axis_str, 3);
            double n = ax.norm();
            if (n > 0) ax = ax * (1.0 / n);
            return Opening::cap(cap_colat, ax);
        }
        fail(kConfigError, "an opening is required (--arc or --cap)");
    };
    auto sim_config = [&](double bw_t) {
        SimConfig cfg;
        cfg.dt = dt;
        cfg.paths = paths;
        cfg.seed = seed;
        cfg.bridge = !no_bridge;
        cfg.workers = workers;
        cfg.stop_radius = stop_radius;
        cfg.bandwidth = bandwidth > 0 ? bandwidth : (bw_t > 0 ? 0.05 * std::sqrt(bw_t) : 0.0);
        return cfg;
    };

    auto* sp = app.add_subcommand("spectrum", "Dirichlet spectrum of an opening");
    add_opening(sp);
    sp->add_option("--k", k_terms, "number of eigenpairs");
    sp->add_option("--out", out_path, "output CSV path (default stdout)");

    auto* kn = app.add_subcommand("kernel", "cone heat kernel series values");
    add_opening(kn);
    kn->add_option("--x", x_str, "source point")->required();
    kn->add_option("--y", y_str, "target point")->required();
    kn->add_option("--t-grid", grid_str, "times: list or start:factor:count");
    kn->add_option("--k", k_terms, "series cap");
    kn->add_option("--tol", tol, "absolute kernel tolerance");
    kn->add_option("--out", out_path, "output CSV path");

    auto* sv = app.add_subcommand("survival", "cone survival probability series");
    add_opening(sv);
    sv->add_option("--x", x_str, "start point")->required();
    sv->add_option("--t-grid", grid_str, "times: list or start:factor:count");
    sv->add_option("--k", k_terms, "series cap");
    sv->add_option("--out", out_path, "output CSV path");

    auto* sim = app.add_subcommand("simulate", "killed Brownian paths in a domain");
    sim->add_option("--domain", domain_path, "domain JSON file")->required();
    sim->add_option("--x", x_str, "start point")->required();
    sim->add_option("--t", t_single, "horizon")->required();
    sim->add_option("--paths", paths, "path count");
    sim->add_option("--dt", dt, "base time step");
    sim->add_option("--seed", seed, "RNG seed");
    sim->add_flag("--no-bridge", no_bridge, "disable the bridge crossing correction");
    sim->add_option("--workers", workers, "worker threads (default HEATLAB_WORKERS)");
    sim->add_option("--out", out_path, "per-path CSV output path");
    sim->add_option("--summary", json_path, "JSON summary output path");

    auto* ha = app.add_subcommand("harmonic", "w / u harmonic-function estimates");
    ha->add_option("--mode", mode, "'w' (truncated cone) or 'u' (multicone extension)");
    add_opening(ha);
    ha->add_option("--radius", radius, "truncation radius (mode w)");
    ha->add_option("--domain", domain_path, "domain JSON file (mode u)");
    ha->add_option("--branch", branch, "branch index (mode u)");
    ha->add_option("--x", x_str, "evaluation point")->required();
    ha->add_option("--paths", paths, "path count");
    ha->add_option("--dt", dt, "base time step");
    ha->add_option("--seed", seed, "RNG seed");
    ha->add_option("--stop-radius", stop_radius, "stopping radius rho (mode u)");
    ha->add_option("--workers", workers, "worker threads");
    ha->add_option("--out", out_path, "output CSV path");

    auto add_verify_common = [&](CLI::App* c) {
        c->add_option("--domain", domain_path, "domain JSON file");
        c->add_option("--x", x_str, "start point")->required();
        c->add_option("--paths", paths, "path count");
        c->add_option("--dt", dt, "base time step");
        c->add_option("--seed", seed, "RNG seed");
        c->add_option("--tol", verify_tol, "relative tolerance for the verdict");
        c->add_option("--workers", workers, "worker threads");
        c->add_option("--bandwidth", bandwidth, "KDE bandwidth");
        c->add_option("--out", out_path, "output CSV path");
        c->add_option("--json", json_path, "verdict JSON path");
        c->add_option("--cone-arc", arc_params, "bare truncated cone: theta_a theta_b")->expected(2);
        c->add_option("--cone-radius", radius, "bare cone truncation radius");
    };

    auto* vk = app.add_subcommand("verify-kernel", "renormalized kernel limit experiment");
    add_verify_common(vk);
    vk->add_option("--y", y_str, "kernel target point")->required();
    vk->add_option("--t-grid", grid_str, "times");

    auto* ve = app.add_subcommand("verify-exit", "renormalized survival limit experiment");
    add_verify_common(ve);
    ve->add_option("--t-grid", grid_str, "times");

    auto* vy = app.add_subcommand("verify-yaglom", "Yaglom limit experiment");
    add_verify_common(vy);
    vy->add_option("--t", t_single, "horizon");

    try {
        try {
            app.parse(argc, argv);
        } catch (const CLI::ParseError& e) {
            if (e.get_exit_code() == 0) return app.exit(e); // --help
            fail(kConfigError, e.what());
        }

        if (sp->parsed()) {
            auto spec = spectrum(make_opening(), k_terms);
            Output out;
            out.open(out_path);
            csv_header(*out.os, config_hash(argv_words, ""));
            out.os->precision(12);
            *out.os << "# kappa=" << spec.kappa << " beta=" << spec.beta
                    << " I1=" << spec.first_integral() << "\n";
            *out.os << "k,lambda,alpha\n";
            for (int i = 0; i < spec.count; ++i)
                *out.os << (i + 1) << ',' << spec.eigenvalues[i] << ',' << spec.characters[i]
                        << '\n';
        } else if (kn->parsed() || sv->parsed()) {
            auto spec = spectrum(make_opening(), k_terms);
            ConeKernelSpec ks(spec, {0, 0, 0}, k_terms, tol);
            Vec x = parse_point(x_str, spec.dim);
            auto grid = parse_grid(grid_str);
            Output out;
            out.open(out_path);
            csv_header(*out.os, config_hash(argv_words, ""));
            out.os->precision(12);
            if (kn->parsed()) {
                Vec y = parse_point(y_str, spec.dim);
                *out.os << "t,value,tail_bound\n";
                for (double t : grid) {
                    auto kv = cone_heat_kernel(ks, t, x, y);
                    *out.os << t << ',' << kv.value << ',' << kv.tail_bound << '\n';
                }
            } else {
                *out.os << "t,value,error\n";
                for (double t : grid) {
                    auto s = cone_survival_series(ks, t, x);
                    *out.os << t << ',' << s.value << ',' << s.error << '\n';
                }
            }
        } else if (sim->parsed()) {
            std::string raw;
            MulticoneDomain d = load_domain(domain_path, raw);
            SimConfig cfg = sim_config(0.0);
            cfg.keep_records = true;
            Vec x = parse_point(x_str, d.dim);
            auto ens = simulate_paths(d, x, t_single, cfg);
            std::string hash = config_hash(argv_words, raw);
            Output out;
            out.open(out_path);
            csv_header(*out.os, hash);
            out.os->precision(12);
            *out.os << "survived,ex,ey,ez,branch,kill_time\n";
            for (const auto& r : ens.records)
                *out.os << int(r.survived) << ',' << r.endpoint.x << ',' << r.endpoint.y << ','
                        << r.endpoint.z << ',' << r.tag << ',' << r.kill_time << '\n';
            double mx = 0, my = 0, mz = 0, m2 = 0;
            for (const auto& e : ens.endpoints) {
                mx += e.x;
                my += e.y;
                mz += e.z;
                m2 += e.norm2();
            }
            std::int64_t ns = std::max<std::int64_t>(ens.n_survived, 1);
            json summary{{"paths", ens.n_paths},
                         {"survived", ens.n_survived},
                         {"survival", double(ens.n_survived) / ens.n_paths},
                         {"endpoint_mean", {mx / ns, my / ns, mz / ns}},
                         {"endpoint_second_moment", m2 / ns},
                         {"seed", cfg.seed},
                         {"config_hash", hash}};
            if (json_path.empty()) {
                std::cout << summary.dump() << "\n";
            } else {
                std::ofstream jf(json_path);
                if (!jf) fail(kIoError, "cannot open output file: " + json_path);
                jf << summary.dump() << "\n";
            }
        } else if (ha->parsed()) {
            Output out;
            EstimateCI ci;
            int dim = 2;
            if (mode == "w") {
                Opening op = make_opening();
                dim = op.dim;
                auto spec = spectrum(op, 8);
                TruncatedCone cone({0, 0, 0}, op, radius);
                ci = estimate_w(cone, spec, parse_point(x_str, dim), sim_config(0.0));
            } else if (mode == "u") {
                std::string raw;
                MulticoneDomain d = load_domain(domain_path, raw);
                dim = d.dim;
                ci = estimate_u(d, branch_spectra(d, 8), branch, parse_point(x_str, dim),
                                sim_config(0.0));
            } else {
                fail(kConfigError, "harmonic --mode must be 'w' or 'u'");
            }
            out.open(out_path);
            csv_header(*out.os, config_hash(argv_words, ""));
            out.os->precision(12);
            *out.os << "x,estimate,se,paths,method\n";
            *out.os << '"' << x_str << "\"," << ci.estimate << ',' << ci.se << ',' << ci.n
                    << ",\"" << ci.method << "\"\n";
        } else if (vk->parsed() || ve->parsed()) {
            LimitExperimentReport rep;
            std::string raw;
            if (!domain_path.empty()) {
                MulticoneDomain d = load_domain(domain_path, raw);
                auto spectra = branch_spectra(d, 8);
                Vec x = parse_point(x_str, d.dim);
                auto grid = parse_grid(grid_str);
                SimConfig cfg = sim_config(grid.back());
                rep = vk->parsed()
                          ? kernel_limit_experiment(d, spectra, x, parse_point(y_str, d.dim), grid,
                                                    cfg, verify_tol)
                          : exit_limit_experiment(d, spectra, x, grid, cfg, verify_tol);
            } else if (!arc_params.empty()) {
                Opening op = Opening::arc(arc_params[0], arc_params[1]);
                auto spec = spectrum(op, 8);
                TruncatedCone cone({0, 0, 0}, op, radius);
                Vec x = parse_point(x_str, 2);
                auto grid = parse_grid(grid_str);
                SimConfig cfg = sim_config(grid.back());
                rep = vk->parsed()
                          ? kernel_limit_experiment(cone, spec, x, parse_point(y_str, 2), grid,
                                                    cfg, verify_tol)
                          : exit_limit_experiment(cone, spec, x, grid, cfg, verify_tol);
            } else {
                fail(kConfigError, "verify: either --domain or --cone-arc is required");
            }
            std::string hash = config_hash(argv_words, raw);
            Output out;
            out.open(out_path);
            csv_header(*out.os, hash);
            write_report_csv(rep, *out.os);
            std::ostream* jp = &std::cout;
            std::ofstream jf;
            if (!json_path.empty()) {
                jf.open(json_path);
                if (!jf) fail(kIoError, "cannot open output file: " + json_path);
                jp = &jf;
            }
            write_report_json(rep, *jp);
            if (!rep.pass) fail(kNumericFailure, "verdict FAIL: " + rep.verdict);
        } else if (vy->parsed()) {
            if (domain_path.empty()) fail(kConfigError, "verify-yaglom requires --domain");
            std::string raw;
            MulticoneDomain d = load_domain(domain_path, raw);
            auto spectra = branch_spectra(d, 8);
            SimConfig cfg = sim_config(t_single);
            auto rep = yaglom_experiment(d, spectra, parse_point(x_str, d.dim), t_single, cfg);
            std::string hash = config_hash(argv_words, raw);
            Output out;
            out.open(out_path);
            csv_header(*out.os, hash);
            write_yaglom_csv(rep, *out.os);
            std::ostream* jp = &std::cout;
            std::ofstream jf;
            if (!json_path.empty()) {
                jf.open(json_path);
                if (!jf) fail(kIoError, "cannot open output file: " + json_path);
                jp = &jf;
            }
            write_yaglom_json(rep, *jp);
            if (!rep.pass) fail(kNumericFailure, "verdict FAIL: " + rep.verdict);
        }
        return kOk;
    } catch (const CliError& e) {
        std::cerr << json{{"error", e.message}}.dump() << "\n";
        return e.code;
    } catch (const Error& e) {
        std::cerr << json{{"error", e.what()}}.dump() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", e.what()}}.dump() << "\n";
        return kNumericFailure;
    }
}
