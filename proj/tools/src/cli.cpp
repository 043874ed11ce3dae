#include "dtdob_cli/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "dtdob/design.hpp"
#include "dtdob/discretize.hpp"
#include "dtdob/dob.hpp"
#include "dtdob/errors.hpp"
#include "dtdob/sim.hpp"
#include "dtdob_cli/config.hpp"
#include "json.hpp"

namespace dtdob::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Flags {
    std::string config;
    std::string out = ".";
    std::optional<double> delta;
    std::optional<std::string> method;
    std::optional<int> grid_points;
    std::optional<int> substeps;
};

struct Context {
    ToolConfig cfg;
    Flags flags;
    std::ostream& out;

    double delta() const {
        if (flags.delta) return *flags.delta;
        if (cfg.delta) return *cfg.delta;
        throw ConfigError("no sampling period: set 'delta' in the config or pass --delta");
    }
    int grid_points() const { return flags.grid_points ? *flags.grid_points : cfg.grid_points; }

    const UncertainPlantFamily& family() const {
        if (!cfg.family) throw ConfigError("missing key 'plant_family'");
        return *cfg.family;
    }
    const RationalTransfer& nominal() const {
        if (!cfg.nominal) throw ConfigError("missing key 'nominal'");
        return *cfg.nominal;
    }
    const RationalTransfer& controller() const {
        if (!cfg.controller) throw ConfigError("missing key 'controller'");
        return *cfg.controller;
    }
    const RationalTransfer& plant() const {
        if (!cfg.plant) throw ConfigError("missing key 'plant'");
        return *cfg.plant;
    }

    fs::path path(const std::string& name) const {
        fs::create_directories(flags.out);
        return fs::path(flags.out) / name;
    }
};

json cplx_list(const std::vector<cplx>& v) {
    std::vector<cplx> s = v;
    std::sort(s.begin(), s.end(), [](cplx a, cplx b) { return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag(); });
    json out = json::array();
    for (const cplx& z : s) out.push_back({z.real(), z.imag()});
    return out;
}

void write_json(const Context& ctx, const std::string& name, const json& j) {
    std::ofstream f(ctx.path(name));
    f << j.dump(2) << '\n';
}

json q_json(const QFilter& q) {
    json j;
    j["a_w"] = q.a;
    j["c_w"] = q.c;
    if (!q.disabled()) {
        j["den_z"] = q.den_z().coeffs();
        j["num_z"] = q.num_z().coeffs();
    }
    return j;
}

QFilter build_q(const Context& ctx, json* report) {
    const QSpec& s = ctx.cfg.q;
    switch (s.kind) {
        case QSpec::Kind::None: return QFilter::zero();
        case QSpec::Kind::Explicit: {
            QFilter q{s.a, s.c};
            q.validate();
            return q;
        }
        case QSpec::Kind::Direct: {
            const DirectDesignResult r = design_q_direct(ctx.family(), high_frequency_gain(ctx.nominal()),
                                                         ctx.cfg.nominal_method, s.nq, s.safety, ctx.grid_points());
            if (report) {
                json& j = *report;
                j["mode"] = "direct";
                j["q"] = q_json(r.q);
                j["v_z"] = r.v_poly.coeffs();
                j["k_bar"] = r.k_bar;
                j["k_bar_capped"] = r.k_bar_capped;
                j["a0"] = r.a0;
                j["a0_halvings"] = r.halvings;
                j["worst_modulus"] = r.worst_modulus;
                j["grid_points"] = ctx.grid_points();
            }
            return r.q;
        }
        case QSpec::Kind::Indirect: {
            const double psi = s.psi ? *s.psi : *s.tau / ctx.delta();
            if (!report) return indirect_q_filter(s.ct_a, s.ct_c, psi);
            const IndirectDesignResult r = design_q_indirect(s.ct_a, s.ct_c, psi, ctx.family(),
                                                             high_frequency_gain(ctx.nominal()), ctx.grid_points());
            json& j = *report;
            j["mode"] = "indirect";
            j["psi"] = r.psi_ratio;
            j["q"] = q_json(r.q);
            j["ct_fast_hurwitz"] = to_string(r.ct_fast_hurwitz);
            j["ct_worst_real_part"] = r.ct_worst_real_part;
            j["dt_fast_schur"] = to_string(r.dt_fast_schur);
            j["dt_worst_modulus"] = r.dt_worst_modulus;
            j["grid_points"] = ctx.grid_points();
            return r.q;
        }
    }
    return QFilter::zero();
}

DobDesign build_design(const Context& ctx) {
    DobDesign d;
    d.family = ctx.family();
    d.nominal_ct = ctx.nominal();
    d.controller_ct = ctx.controller();
    d.nominal_method = ctx.cfg.nominal_method;
    d.controller_method = ctx.cfg.controller_method;
    d.delta = ctx.delta();
    d.q = build_q(ctx, nullptr);
    return d;
}

int cmd_discretize(const Context& ctx) {
    const RationalTransfer& tf = ctx.cfg.plant ? *ctx.cfg.plant : ctx.nominal();
    DiscretizationMethod m = ctx.cfg.method.value_or(ctx.cfg.nominal_method);
    if (ctx.flags.method) {
        try {
            m = parse_method(*ctx.flags.method);
        } catch (const std::exception&) {
            throw ConfigError("unknown method '" + *ctx.flags.method + "'");
        }
    }
    const double delta = ctx.delta();
    const RationalTransfer d = discretize(tf, m, delta);
    json j;
    j["method"] = to_string(m);
    j["delta"] = delta;
    j["num_w"] = d.num.coeffs();
    j["den_w"] = d.den.coeffs();
    j["num_z"] = d.num_z().coeffs();
    j["den_z"] = d.den_z().coeffs();
    j["relative_degree"] = d.relative_degree();
    j["poles"] = cplx_list(d.poles());
    j["zeros"] = cplx_list(d.zeros());
    if (m == DiscretizationMethod::ZOH) {
        const ZeroClassification z = classify_zeros(d, tf, delta);
        j["intrinsic_zeros"] = cplx_list(z.intrinsic);
        j["sampling_zeros"] = cplx_list(z.sampling);
        j["match_error"] = z.match_error;
    }
    write_json(ctx, "discretize.json", j);
    ctx.out << "discretize " << to_string(m) << " delta=" << format_double(delta) << ": relative degree "
            << d.relative_degree() << ", " << d.poles().size() << " poles, " << d.zeros().size() << " zeros\n";
    return kOk;
}

json item_json(const ItemResult& r) {
    return {{"verdict", to_string(r.verdict)}, {"value", r.value}, {"note", r.note}};
}

int verdict_exit(Verdict v) { return v == Verdict::Pass ? kOk : v == Verdict::Fail ? kFail : kInconclusive; }

int cmd_check(const Context& ctx) {
    const DobDesign design = build_design(ctx);
    const StabilityVerdict v = theorem1_verdict(design, ctx.grid_points());
    const SamplingPeriodCheck sp = validate_sampling_period(design.family, design.delta);
    json j;
    j["item_a"] = item_json(v.item_a);
    j["item_b"] = item_json(v.item_b);
    j["item_c"] = item_json(v.item_c);
    j["overall"] = to_string(v.overall);
    j["grid_points"] = v.grid_points;
    j["worst_gain"] = v.worst_gain;
    j["provenance"] = v.provenance;
    j["q"] = q_json(design.q);
    j["sampling_period"] = {{"delta", design.delta}, {"valid", sp.valid}, {"margin", sp.margin}};
    write_json(ctx, "verdict.json", j);
    const std::pair<const char*, const ItemResult*> items[] = {
        {"item (a)", &v.item_a}, {"item (b)", &v.item_b}, {"item (c)", &v.item_c}};
    for (const auto& [name, r] : items)
        ctx.out << name << ": " << to_string(r->verdict) << " (" << r->note << ")\n";
    ctx.out << "overall: " << to_string(v.overall) << '\n';
    return verdict_exit(v.overall);
}

int cmd_design(const Context& ctx) {
    const QSpec::Kind k = ctx.cfg.q.kind;
    if (k != QSpec::Kind::Direct && k != QSpec::Kind::Indirect)
        throw ConfigError("'q_filter.type' must be 'direct' or 'indirect' for the design command");
    json j;
    build_q(ctx, &j);
    write_json(ctx, "design.json", j);
    if (k == QSpec::Kind::Direct) {
        ctx.out << "direct design: a0=" << format_double(j["a0"].get<double>())
                << " k_bar=" << format_double(j["k_bar"].get<double>()) << " certified\n";
        return kOk;
    }
    const std::string dt = j["dt_fast_schur"].get<std::string>();
    ctx.out << "indirect design: psi=" << format_double(j["psi"].get<double>()) << " ct " << j["ct_fast_hurwitz"].get<std::string>()
            << ", dt " << dt << '\n';
    return dt == "pass" ? kOk : dt == "fail" ? kFail : kInconclusive;
}

std::string csv_row(std::initializer_list<double> v) {
    std::string s;
    for (double x : v) {
        if (!s.empty()) s += ',';
        s += std::isnan(x) ? "nan" : format_double(x);
    }
    return s;
}

int cmd_contour(const Context& ctx) {
    DobDesign design = build_design(ctx);
    const RationalTransfer& member = ctx.plant();
    std::vector<double> deltas = ctx.flags.delta ? std::vector<double>{*ctx.flags.delta} : ctx.cfg.contour_deltas;
    if (deltas.empty() && ctx.cfg.delta) deltas = {*ctx.cfg.delta};
    for (double d : deltas)
        if (!(cdbd_normalized(member, d) > 0.5))
            throw DegenerateSamplingPeriod("sampling period " + format_double(d) + " is above the validated bound");
    std::ofstream f(ctx.path("contour.csv"));
    f << "delta,kind,re_z,im_z,re_gamma,im_gamma,partition\n";
    int ambiguous = 0;
    for (const ContourRecord& rec : root_contour(design, member, deltas)) {
        std::vector<ContourRoot> rs = rec.roots;
        std::stable_sort(rs.begin(), rs.end(), [](const ContourRoot& a, const ContourRoot& b) {
            if (a.fast != b.fast) return a.fast;
            if (a.z.real() != b.z.real()) return a.z.real() < b.z.real();
            return a.z.imag() < b.z.imag();
        });
        ambiguous += !rec.partition_ok;
        for (const ContourRoot& r : rs)
            f << format_double(rec.delta) << ',' << (r.fast ? "fast" : "slow") << ','
              << csv_row({r.z.real(), r.z.imag(), r.gamma.real(), r.gamma.imag()}) << ','
              << (rec.partition_ok ? "ok" : "ambiguous") << '\n';
    }
    const double nan = std::nan("");
    const auto fast = cplx_list(roots(psi_fast(design, high_frequency_gain(member))).roots);
    for (const auto& z : fast)
        f << "0,ref_fast," << csv_row({z[0].get<double>(), z[1].get<double>(), nan, nan}) << ",ok\n";
    const auto slow = cplx_list(roots(psi_slow(design, member)).roots);
    for (const auto& g : slow)
        f << "0,ref_slow," << csv_row({nan, nan, g[0].get<double>(), g[1].get<double>()}) << ",ok\n";
    ctx.out << "contour: " << deltas.size() << " sampling periods, " << ambiguous << " ambiguous partitions\n";
    return kOk;
}

int cmd_simulate(const Context& ctx) {
    const DobDesign design = build_design(ctx);
    const RationalTransfer& member = ctx.plant();
    SimulationOptions opts;
    opts.horizon = ctx.cfg.simulation.horizon;
    opts.substeps = ctx.flags.substeps ? *ctx.flags.substeps : ctx.cfg.simulation.substeps;
    opts.blowup = ctx.cfg.simulation.blowup;
    opts.record_ct = ctx.cfg.simulation.record_ct;
    if (opts.substeps < 1) throw ConfigError("--substeps must be at least 1");
    const SimulationTrace tr = simulate(design, member, ctx.cfg.simulation.reference, ctx.cfg.simulation.disturbance, opts);
    {
        std::ofstream f(ctx.path("trace.csv"));
        write_trace_csv(f, tr);
    }
    if (opts.record_ct) {
        std::ofstream f(ctx.path("trace_ct.csv"));
        write_trace_ct_csv(f, tr);
    }
    json j;
    j["divergent"] = tr.divergent;
    j["max_abs_y"] = tr.max_abs_y;
    j["samples"] = tr.t.size();
    j["delta"] = design.delta;
    j["horizon"] = opts.horizon;
    j["substeps"] = opts.substeps;
    j["blowup"] = opts.blowup;
    bool in_family = family_contains(design.family, member);
    if (ctx.cfg.plant_parameters && ctx.cfg.parameter_box) {
        const auto& p = *ctx.cfg.plant_parameters;
        const auto& b = *ctx.cfg.parameter_box;
        const bool in_box = p[0] >= b[0] && p[0] <= b[1] && p[1] >= b[2] && p[1] <= b[3] && p[2] >= b[4] && p[2] <= b[5];
        j["parameters_in_box"] = in_box;
        in_family = in_family && in_box;
    }
    j["out_of_family"] = !in_family;
    write_json(ctx, "metadata.json", j);
    ctx.out << "simulate: " << tr.t.size() << " samples, " << (tr.divergent ? "divergent" : "bounded") << ", max |y| "
            << format_double(tr.max_abs_y) << (in_family ? "" : " (member outside the family)") << '\n';
    return kOk;
}

int cmd_freq(const Context& ctx) {
    const double delta = ctx.delta();
    int flagged = 0;
    for (const std::string& name : ctx.cfg.freq_transfers) {
        RationalTransfer tf;
        if (name == "q") {
            const QFilter q = build_q(ctx, nullptr);
            if (q.disabled()) throw ConfigError("'freq.transfers' requests q but the Q-filter is disabled");
            tf = q.transfer();
        } else if (name == "sensitivity") {
            tf = sensitivity(build_design(ctx), ctx.plant());
        } else if (name == "nominal") {
            tf = discretize(ctx.nominal(), ctx.cfg.nominal_method, delta);
        } else if (name == "controller") {
            tf = discretize(ctx.controller(), ctx.cfg.controller_method, delta);
        } else {
            tf = zoh_discretize(ctx.plant(), delta);
        }
        std::ofstream f(ctx.path("freq_" + name + ".csv"));
        f << "omega,re,im,mag_db,phase_deg,pole_proximity\n";
        for (const FrequencyPoint& p : frequency_response(tf, ctx.cfg.omegas, delta)) {
            flagged += p.pole_proximity;
            const double mag = std::abs(p.value);
            f << csv_row({p.omega, p.value.real(), p.value.imag(), 20.0 * std::log10(mag),
                          std::arg(p.value) * 180.0 / M_PI})
              << ',' << (p.pole_proximity ? 1 : 0) << '\n';
        }
    }
    ctx.out << "freq: " << ctx.cfg.omegas.size() << " frequencies, " << ctx.cfg.freq_transfers.size() << " transfers, "
            << flagged << " pole-proximity rows\n";
    return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Discrete-time disturbance observer analysis and design"};
    app.require_subcommand(1);
    Flags flags;
    double delta = 0.0;
    std::string method;
    int grid_points = 0, substeps = 0;
    auto* o_delta = app.add_option("--delta", delta, "Sampling period");
    auto* o_method = app.add_option("--method", method, "Discretization method (zoh, fdm, bdm, bt, mpz)");
    auto* o_grid = app.add_option("--grid-points", grid_points, "Gain grid size for certification sweeps")->check(CLI::Range(2, 1000000));
    auto* o_sub = app.add_option("--substeps", substeps, "RK4 substeps per sample")->check(CLI::Range(1, 1000000));
    app.add_option("--config", flags.config, "Configuration file (JSON)")->required();
    app.add_option("--out", flags.out, "Output directory");
    app.fallthrough();

    using Handler = int (*)(const Context&);
    const std::vector<std::tuple<std::string, std::string, Handler>> commands = {
        {"discretize", "Discretize the plant (or nominal model) and classify its zeros", cmd_discretize},
        {"check", "Robust stability verdict for the configured design", cmd_check},
        {"design", "Q-filter synthesis (direct or indirect)", cmd_design},
        {"contour", "Closed-loop roots over a list of sampling periods", cmd_contour},
        {"simulate", "Sampled-data closed-loop simulation", cmd_simulate},
        {"freq", "Frequency responses of the Q-filter and related transfers", cmd_freq},
    };
    for (const auto& [name, help, h] : commands) app.add_subcommand(name, help);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    }
    if (o_delta->count()) {
        if (!(delta > 0.0)) {
            err << "error: --delta must be positive\n";
            return kConfigError;
        }
        flags.delta = delta;
    }
    if (o_method->count()) flags.method = method;
    if (o_grid->count()) flags.grid_points = grid_points;
    if (o_sub->count()) flags.substeps = substeps;

    try {
        Context ctx{load_config(flags.config), flags, out};
        for (const auto& [name, help, h] : commands)
            if (app.got_subcommand(name)) return h(ctx);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kPreconditionError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kPreconditionError;
    }
    return kConfigError;
}

}  // namespace dtdob::cli
