// Batch front end: bvres_cli <command> --spec FILE [options]
#include <CLI11.hpp>
#include <json.hpp>

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "bvres/carleman.hpp"
#include "bvres/operator.hpp"
#include "bvres/propagator.hpp"
#include "bvres/resonance.hpp"
#include "bvres/specfile.hpp"

using namespace bvres;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "1.0.0";

enum Exit { kOk = 0, kInput = 1, kHypothesis = 2, kNonConvergence = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Config {
    std::string command;
    std::string spec_path;
    std::string out_dir = ".";
    std::uint64_t seed = 1;
    double s = 1.0;
    std::string h_grid = "0.02:1:20";
    double E = 1.0;
    double eps = 0.05;
    std::string rect;
    std::optional<double> lambda0;
    std::string theta_grid = "0.25,0.5,0.75,1,1.5";
    std::string t_grid = "0:40:201";
    double Lambda = 400.0;
    double tol = 1e-10;
    std::string kind = "cosine";
    double source_width = 0.3;
    int probes = 10;
};

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        char* end = nullptr;
        double v = std::strtod(item.c_str(), &end);
        while (end && *end == ' ') ++end;
        if (item.empty() || *end != '\0' || !std::isfinite(v)) throw UsageError(flag + ": cannot read '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw UsageError(flag + ": empty list");
    return out;
}

// "a:b:n" (n points, log spaced when geometric) or a comma list
std::vector<double> parse_grid(const std::string& text, const std::string& flag, bool geometric) {
    if (text.find(':') == std::string::npos) return parse_list(text, flag);
    std::string t = text;
    for (char& c : t)
        if (c == ':') c = ',';
    std::vector<double> p = parse_list(t, flag);
    if (p.size() != 3 || p[2] < 1 || p[2] != std::floor(p[2])) throw UsageError(flag + ": expected a:b:n");
    int n = static_cast<int>(p[2]);
    if (geometric && !(p[0] > 0 && p[1] > 0)) throw UsageError(flag + ": log spaced grid needs positive ends");
    std::vector<double> out;
    for (int i = 0; i < n; ++i) {
        double f = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
        out.push_back(geometric ? p[0] * std::pow(p[1] / p[0], f) : p[0] + (p[1] - p[0]) * f);
    }
    return out;
}

std::string hex64(std::uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
    return buf;
}

class Output {
public:
    Output(const Config& cfg) : cfg_(cfg) {}

    void write_csv(const std::string& name, const std::vector<std::string>& header,
                   const std::vector<std::vector<std::string>>& rows) {
        std::ostringstream out;
        for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
        out << "\n";
        for (const auto& r : rows) {
            for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
            out << "\n";
        }
        write(name, out.str());
        csvs_.push_back(name);
    }

    void write(const std::string& name, const std::string& contents) {
        std::filesystem::create_directories(cfg_.out_dir);
        std::ofstream f(std::filesystem::path(cfg_.out_dir) / name, std::ios::binary);
        if (!f) throw std::ios_base::failure("cannot write " + name);
        f << contents;
    }

    void finish(json record) {
        write(cfg_.command + ".json", record.dump(2) + "\n");
        if (!csvs_.empty()) write("plot.py", plot_script());
    }

private:
    static std::string plot_script() {
        return R"(#!/usr/bin/env python3
# Plots every CSV next to this script (or the ones named on the command
# line): first column on x, every other numeric column on y.
import csv, glob, os, sys
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
files = sys.argv[1:] or sorted(glob.glob(os.path.join(here, "*.csv")))
for path in files:
    with open(path) as f:
        rows = list(csv.reader(f))
    if len(rows) < 2:
        continue
    header, data = rows[0], rows[1:]
    cols = []
    for j in range(len(header)):
        try:
            cols.append([float(r[j]) for r in data])
        except ValueError:
            cols.append(None)
    if cols[0] is None:
        continue
    fig, ax = plt.subplots()
    ys = [j for j in range(1, len(header)) if cols[j] is not None]
    for j in ys:
        ax.plot(cols[0], cols[j], marker=".", label=header[j])
    if ys and all(v > 0 for j in ys for v in cols[j]):
        ax.set_yscale("log")
    ax.set_xlabel(header[0])
    ax.legend()
    fig.savefig(os.path.splitext(path)[0] + ".png", dpi=120)
    plt.close(fig)
)";
    }

    const Config& cfg_;
    std::vector<std::string> csvs_;
};

json provenance(const Config& cfg, const std::string& contents, const CoefficientSpec& spec) {
    json p;
    p["tool"] = "bvres";
    p["version"] = kVersion;
    p["command"] = cfg.command;
    p["spec"] = {{"path", cfg.spec_path},
                 {"fnv1a", hex64(fnv1a(contents))},
                 {"canonical_fnv1a", hex64(fnv1a(format_spec(spec)))}};
    p["seed"] = cfg.seed;
    p["tolerances"] = {{"tol", cfg.tol}, {"quadrature_refinement", 0.05}, {"zero_resonance_margin", 1e-6}};
    return p;
}

struct Outcome {
    int code = kOk;
    std::string message;
};

Outcome run_validate(const Config&, const CoefficientSpec& spec, Output& out, json& rec) {
    FormBound fb = form_lower_bound(spec);
    json r;
    r["h"] = spec.h;
    r["inf_alpha"] = spec.inf_alpha();
    r["inf_beta"] = spec.inf_beta();
    r["V0_total_variation"] = spec.V0_norm();
    r["b0_l1"] = spec.b0_l1();
    r["b0_l2"] = spec.b0_l2();
    r["b1_sup"] = spec.b1_sup();
    r["compactly_supported"] = spec.compactly_supported();
    if (spec.compactly_supported()) r["support_radius"] = spec.support_radius();
    r["form_bound"] = {{"c_mass", fb.c_mass}, {"c_grad", fb.c_grad}};
    r["breakpoints"] = spec.breakpoints();
    std::vector<std::vector<std::string>> rows;
    for (auto it = r.begin(); it != r.end(); ++it)
        if (it.value().is_number()) rows.push_back({it.key(), num(it.value().get<double>())});
    out.write_csv("validate.csv", {"quantity", "value"}, rows);
    rec["result"] = r;
    return {};
}

Outcome sweep_rows(const Config& cfg, const CoefficientSpec& spec, const std::vector<double>& hs, Output& out,
                   json& rec, const std::string& file) {
    if (cfg.eps == 0.0) throw UsageError("--eps must be nonzero");
    SweepOptions opts;
    opts.seed = cfg.seed;
    opts.exterior_radius = spec.compactly_supported() ? std::max(1.0, spec.support_radius()) : 1.0;
    NormReport rep = lap_sweep(spec, cfg.s, hs, cfg.E, cfg.eps, opts);
    std::vector<std::vector<std::string>> rows;
    Outcome oc;
    json jr = json::array();
    for (const SweepRow& r : rep.rows) {
        rows.push_back({num(r.h), num(r.exterior.lower), num(r.exterior.upper), num(r.full.lower), num(r.full.upper),
                        num(r.h_times_exterior), r.exterior.converged && r.full.converged && r.error.empty() ? "1" : "0"});
        if (!r.error.empty() || !r.exterior.converged || !r.full.converged) {
            oc.code = kNonConvergence;
            oc.message = "norm estimate did not converge at h = " + num(r.h) + (r.error.empty() ? "" : ": " + r.error);
        }
        jr.push_back({{"h", r.h}, {"exterior", r.exterior.upper}, {"full", r.full.upper}, {"error", r.error}});
    }
    out.write_csv(file, {"h", "ext_lower", "ext_upper", "full_lower", "full_upper", "h_times_ext", "converged"}, rows);
    rec["parameters"] = {{"s", cfg.s}, {"E", cfg.E}, {"eps", cfg.eps}, {"h_grid", hs},
                         {"exterior_radius", rep.exterior_radius}, {"truncation", rep.truncation}};
    rec["result"] = {{"rows", jr}};
    if (hs.size() >= 2)
        rec["result"]["fits"] = {{"exterior_exponent", rep.exterior_growth.slope},
                                 {"exterior_r2", rep.exterior_growth.r_squared},
                                 {"full_log_slope_in_inverse_h", rep.full_growth.slope},
                                 {"full_r2", rep.full_growth.r_squared}};
    return oc;
}

std::function<cd(double)> bump_source(std::mt19937_64& rng, double R, double& radius, std::vector<double>& cuts) {
    std::uniform_real_distribution<double> u(-1.0, 1.0), w(0.2, 1.0);
    struct B {
        double c, w;
        cd a;
    };
    std::vector<B> bumps;
    radius = 0.0;
    for (int i = 0; i < 3; ++i) {
        B b{R * u(rng), w(rng), cd(u(rng), u(rng))};
        bumps.push_back(b);
        radius = std::max(radius, std::abs(b.c) + b.w);
        cuts.push_back(b.c - b.w);
        cuts.push_back(b.c + b.w);
    }
    return [bumps](double x) {
        cd s = 0.0;
        for (const B& b : bumps) {
            double y = (x - b.c) / b.w;
            if (std::abs(y) < 1.0) s += b.a * std::pow(1.0 - y * y, 3);
        }
        return s;
    };
}

Outcome run_carleman(const Config& cfg, const CoefficientSpec& spec, Output& out, json& rec) {
    if (cfg.eps == 0.0) throw UsageError("--eps must be nonzero");
    double R1 = spec.compactly_supported() ? std::max(0.5, spec.support_radius()) : 1.0;
    rec["parameters"] = {{"s", cfg.s}, {"E", cfg.E}, {"eps", cfg.eps}, {"R1", R1}, {"probes", cfg.probes}};
    PhaseSpec phase = choose_phase_slope(spec, cfg.E, R1);
    CarlemanWeight weight = build_weight(spec, phase, cfg.E, cfg.s);
    SpectralPoint pt{cfg.E, cfg.eps, {}};
    ConstantReport cr = constant_report(spec, phase, weight, pt);
    json factors = json::array();
    for (const Factor& f : cr.factors) factors.push_back({{"name", f.name}, {"value", f.value}, {"source", f.source}});

    double worst_atom = INFINITY;
    for (const auto& [a, b] : check_atom_inequalities(weight)) worst_atom = std::min({worst_atom, a, b});

    std::mt19937_64 rng(cfg.seed);
    std::vector<std::vector<std::string>> rows;
    int violations = 0;
    double max_log_ratio = -INFINITY;
    for (int p = 0; p < cfg.probes; ++p) {
        Source src;
        src.f = bump_source(rng, std::max(R1, 1.0), src.radius, src.cuts);
        EstimateSides e = evaluate_estimate(spec, phase, pt, cfg.s, src);
        double log_ratio = std::log(e.lhs) - std::log(e.rhs_f + e.rhs_eps);
        bool holds = log_ratio <= cr.log_C;
        violations += holds ? 0 : 1;
        max_log_ratio = std::max(max_log_ratio, log_ratio);
        rows.push_back({std::to_string(p), num(e.lhs), num(e.rhs_f), num(e.rhs_eps), num(log_ratio), num(cr.log_C),
                        holds ? "1" : "0"});
    }
    out.write_csv("carleman.csv", {"probe", "lhs", "rhs_f", "rhs_eps", "log_ratio", "log_C", "holds"}, rows);
    rec["result"] = {{"phase", {{"R1", phase.R1}, {"k", phase.k}, {"grid_step", phase.grid_step}}},
                     {"tau", weight.tau},
                     {"M", weight.M},
                     {"atoms", weight.atoms.size()},
                     {"min_atom_inequality", std::isfinite(worst_atom) ? json(worst_atom) : json(nullptr)},
                     {"constant", {{"log_C", cr.log_C}, {"factors", factors}}},
                     {"max_log_ratio", max_log_ratio},
                     {"violations", violations}};
    if (violations > 0) return {kHypothesis, "weighted estimate violated on " + std::to_string(violations) + " probes"};
    if (std::isfinite(worst_atom) && worst_atom < 0) return {kHypothesis, "atom inequality fails"};
    return {};
}

Rect parse_rect(const std::string& text) {
    if (text.empty()) throw UsageError("--rect is required (re_lo,re_hi,im_lo,im_hi)");
    std::vector<double> v = parse_list(text, "--rect");
    if (v.size() != 4 || !(v[0] < v[1]) || !(v[2] < v[3])) throw UsageError("--rect: expected re_lo<re_hi,im_lo<im_hi");
    Rect r{v[0], v[1], v[2], v[3]};
    if (r.contains(0.0)) throw UsageError("--rect must not contain 0");
    return r;
}

Outcome run_resonances(const Config& cfg, const CoefficientSpec& spec, Output& out, json& rec) {
    if (!spec.compactly_supported()) throw UsageError("resonances need compactly supported coefficients");
    Rect r = parse_rect(cfg.rect);
    rec["parameters"] = {{"rect", {r.re_lo, r.re_hi, r.im_lo, r.im_hi}}, {"tol", cfg.tol}};
    ResonanceReport rep = find_resonances(spec, r, cfg.tol);
    std::vector<std::vector<std::string>> rows;
    json zs = json::array();
    for (const ResonanceZero& z : rep.zeros) {
        rows.push_back({num(z.lambda.real()), num(z.lambda.imag()), std::to_string(z.multiplicity), num(z.residual)});
        zs.push_back({{"re", z.lambda.real()}, {"im", z.lambda.imag()}, {"multiplicity", z.multiplicity}, {"residual", z.residual}});
    }
    out.write_csv("resonances.csv", {"re", "im", "multiplicity", "residual"}, rows);
    json res = {{"zeros", zs}, {"unresolved", rep.unresolved.size()}};
    Outcome oc;
    if (!rep.unresolved.empty()) oc = {kNonConvergence, "unresolved cells remain in the rectangle"};

    if (cfg.lambda0) {
        std::vector<double> th = parse_grid(cfg.theta_grid, "--theta-grid", false);
        ResonanceReport st = strip_certificate(spec, *cfg.lambda0, r.re_hi, th);
        std::vector<std::vector<std::string>> nr;
        for (const NormRow& n : st.norm_rows)
            nr.push_back({num(n.lambda.real()), num(n.lambda.imag()), std::to_string(n.k1), std::to_string(n.k2),
                          num(n.norm), num(n.refinement_change), n.accepted ? "1" : "0"});
        out.write_csv("strip_norms.csv", {"re", "im", "k1", "k2", "norm", "refinement_change", "accepted"}, nr);
        json ex;
        for (int k1 = 0; k1 <= 1; ++k1)
            for (int k2 = 0; k2 <= 1; ++k2) {
                LineFit f = norm_exponent(st.norm_rows, k1, k2, 0.0);
                ex[std::to_string(k1) + std::to_string(k2)] = {{"exponent", f.slope}, {"r2", f.r_squared}};
            }
        res["strip"] = {{"lambda0", st.lambda0}, {"re_max", st.re_max}, {"theta_grid", th},
                        {"certified", st.strip_certified}, {"theta0", st.theta0}, {"exponents", ex}};
        if (!st.strip_certified && oc.code == kOk) oc = {kHypothesis, "no resonance free strip on the theta grid"};
    }
    rec["result"] = res;
    return oc;
}

Outcome run_evolve(const Config& cfg, const CoefficientSpec& spec, Output& out, json& rec) {
    if (!spec.compactly_supported()) throw UsageError("evolve needs compactly supported coefficients");
    if (!(cfg.Lambda > 0)) throw UsageError("--Lambda must be positive");
    if (!(cfg.source_width > 0)) throw UsageError("--source-width must be positive");
    std::vector<double> t = parse_grid(cfg.t_grid, "--t-grid", false);
    if (!std::is_sorted(t.begin(), t.end()) || t.front() < 0) throw UsageError("--t-grid must be nondecreasing and >= 0");
    Cutoff chi = default_cutoff(spec);
    rec["parameters"] = {{"kind", cfg.kind},          {"Lambda", cfg.Lambda},    {"t_grid", cfg.t_grid},
                         {"source_width", cfg.source_width}, {"cutoff_inner", chi.inner}, {"cutoff_outer", chi.outer}};
    ZeroResonanceReport z = zero_resonance_test(spec);
    rec["zero_resonance"] = {{"present", z.has_zero_resonance}, {"inconclusive", z.inconclusive}, {"margin", z.margin}};
    if (z.has_zero_resonance || z.inconclusive) return {kHypothesis, "hypothesis (no zero resonance) fails"};

    double w = cfg.source_width;
    auto v = [w](double x) -> cd { return std::exp(-x * x / (2 * w * w)); };
    EvolutionResult r;
    if (cfg.kind == "schrodinger") r = schrodinger_evolve(spec, chi, v, t, cfg.Lambda);
    else if (cfg.kind == "cosine") r = wave_evolve(spec, chi, v, t, cfg.Lambda, WaveKind::Cosine);
    else if (cfg.kind == "sine") r = wave_evolve(spec, chi, v, t, cfg.Lambda, WaveKind::Sine);
    else throw UsageError("--kind must be schrodinger, cosine or sine");

    std::vector<std::vector<std::string>> rows;
    for (std::size_t k = 0; k < t.size(); ++k) rows.push_back({num(t[k]), num(r.norm[k]), num(r.coarse_norm[k])});
    out.write_csv("evolve.csv", {"t", "norm", "coarse_norm"}, rows);
    double tmax = t.back();
    DecayFit f = decay_fit(t, r.norm, tmax / 8, tmax);
    json res = {{"max_rel_change", r.max_rel_change}, {"refinement_needed", r.refinement_needed},
                {"tail_bound", r.tail_bound},         {"captured_fraction", r.captured_fraction},
                {"decay_fit", {{"window", {tmax / 8, tmax}}, {"rate", f.rate}, {"r2", f.r_squared},
                               {"used", f.used}, {"excluded", f.excluded}}}};
    if (cfg.kind == "schrodinger") {
        res["time_integral"] = time_integral(t, r.norm, tmax);
        res["time_integral_half"] = time_integral(t, r.norm, tmax / 2);
    }
    rec["result"] = res;
    if (r.refinement_needed)
        return {kNonConvergence, "spectral quadrature changes by " + num(r.max_rel_change) + " under halving"};
    return {};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Resolvent, resonance and propagator computations for 1D operators with BV coefficients"};
    app.set_version_flag("--version", kVersion);
    Config cfg;
    const std::vector<std::string> commands = {"validate", "resolve", "sweep", "carleman", "resonances", "evolve"};
    for (const std::string& c : commands) {
        CLI::App* sub = app.add_subcommand(c);
        sub->add_option("--spec", cfg.spec_path, "coefficient spec file")->required();
        sub->add_option("--out", cfg.out_dir, "output directory");
        sub->add_option("--seed", cfg.seed, "seed for randomized probes");
        sub->add_option("--s", cfg.s, "weight exponent s > 1/2");
        sub->add_option("--h-grid", cfg.h_grid, "a:b:n log spaced, or a comma list");
        sub->add_option("--E", cfg.E, "energy");
        sub->add_option("--eps", cfg.eps, "absorption, nonzero");
        sub->add_option("--rect", cfg.rect, "re_lo,re_hi,im_lo,im_hi");
        sub->add_option("--lambda0", cfg.lambda0, "strip certificate from |Re lambda| >= lambda0");
        sub->add_option("--theta-grid", cfg.theta_grid, "strip widths, comma list or a:b:n");
        sub->add_option("--t-grid", cfg.t_grid, "times, a:b:n or a comma list");
        sub->add_option("--Lambda", cfg.Lambda, "spectral truncation");
        sub->add_option("--tol", cfg.tol, "root tolerance |D| <= tol");
        sub->add_option("--kind", cfg.kind, "schrodinger, cosine or sine");
        sub->add_option("--source-width", cfg.source_width, "gaussian width of the initial datum");
        sub->add_option("--probes", cfg.probes, "random sources for the carleman check");
        sub->callback([&cfg, c] { cfg.command = c; });
    }
    app.require_subcommand(1);
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInput;
    }

    Output out(cfg);
    std::string contents;
    CoefficientSpec spec;
    json rec;
    try {
        spec = parse_spec_file(cfg.spec_path, &contents);
    } catch (const SpecError& e) {
        std::cerr << cfg.spec_path << ": " << e.what() << "\n";
        rec["provenance"] = {{"tool", "bvres"}, {"version", kVersion}, {"command", cfg.command}, {"spec", {{"path", cfg.spec_path}}}};
        rec["status"] = "input_error";
        rec["message"] = e.what();
        try {
            out.finish(rec);
        } catch (...) {
        }
        return kInput;
    }
    rec["provenance"] = provenance(cfg, contents, spec);
    Outcome oc;
    try {
        if (cfg.command == "validate") oc = run_validate(cfg, spec, out, rec);
        else if (cfg.command == "resolve") oc = sweep_rows(cfg, spec, {spec.h}, out, rec, "resolve.csv");
        else if (cfg.command == "sweep") oc = sweep_rows(cfg, spec, parse_grid(cfg.h_grid, "--h-grid", true), out, rec, "sweep.csv");
        else if (cfg.command == "carleman") oc = run_carleman(cfg, spec, out, rec);
        else if (cfg.command == "resonances") oc = run_resonances(cfg, spec, out, rec);
        else if (cfg.command == "evolve") oc = run_evolve(cfg, spec, out, rec);
    } catch (const UsageError& e) {
        oc = {kInput, e.what()};
    } catch (const std::ios_base::failure& e) {
        oc = {kInput, e.what()};
    } catch (const HypothesisFailure& e) {
        oc = {kHypothesis, e.what()};
    } catch (const ZeroOnContour& e) {
        oc = {kNonConvergence, e.what()};
    } catch (const SingularMatching& e) {
        oc = {kNonConvergence, e.what()};
    } catch (const std::invalid_argument& e) {
        oc = {kInput, e.what()};
    } catch (const std::exception& e) {
        oc = {kNonConvergence, e.what()};
    }
    static const char* status[] = {"ok", "input_error", "hypothesis_failure", "non_convergence"};
    rec["status"] = status[oc.code];
    if (!oc.message.empty()) {
        rec["message"] = oc.message;
        std::cerr << oc.message << "\n";
    }
    try {
        out.finish(rec);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kInput;
    }
    return oc.code;
}
