#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "pluripot/comparison.hpp"
#include "pluripot/io.hpp"
#include "pluripot/morse.hpp"

namespace fs = std::filesystem;
using namespace pluripot;

namespace {

struct Contract {
    std::string name;
    double value;
    double bound;   // value must be <= bound
    bool pass;
};

struct ContractSet {
    std::vector<Contract> items;
    void check_le(const std::string& name, double value, double bound) {
        items.push_back({name, value, bound, value <= bound});
    }
    void check_true(const std::string& name, bool ok) {
        items.push_back({name, ok ? 1.0 : 0.0, 1.0, ok});
    }
    const Contract* first_failure() const {
        for (const auto& c : items)
            if (!c.pass) return &c;
        return nullptr;
    }
    json to_json() const {
        json arr = json::array();
        for (const auto& c : items) {
            json e;
            e["name"] = c.name;
            e["value"] = c.value;
            e["bound"] = c.bound;
            e["pass"] = c.pass;
            arr.push_back(e);
        }
        return arr;
    }
};

std::string default_out_dir() {
    if (const char* e = std::getenv("PLURIPOT_OUT_DIR")) return e;
    return "out";
}

void ensure_dir(const std::string& dir) { fs::create_directories(dir); }

json scenario_json(const Scenario& s) {
    json j;
    j["name"] = s.name;
    j["n"] = s.grid.n;
    j["res"] = s.grid.res;
    j["seed"] = s.seed;
    j["omega_closed"] = s.omega_closed;
    j["omega_degenerate"] = s.omega_degenerate;
    j["min_eigenvalue"] = s.min_eigenvalue;
    json p;
    for (const auto& [k, v] : s.params) p[k] = v;
    j["params"] = p;
    return j;
}

json condition_b_json(const ConditionBResult& b) {
    json j;
    j["finite"] = b.finite;
    j["b"] = b.finite ? b.b : -1.0;
    j["b_ddc"] = b.b_ddc;
    j["b_wedge"] = b.b_wedge;
    j["closed_by_construction"] = b.closed_by_construction;
    j["measured_defect"] = b.measured_defect;
    return j;
}

int finish(const std::string& path, json report, const ContractSet& contracts) {
    report["metrics"]["contracts"] = contracts.to_json();
    write_json(path, report);
    if (const Contract* f = contracts.first_failure()) {
        std::cerr << "contract violation: " << f->name << " (value " << f->value << ", bound "
                  << f->bound << ")\n";
        return 2;
    }
    std::cout << path << "\n";
    return 0;
}

std::vector<double> parse_doubles(const std::vector<double>& v, std::vector<double> dflt) {
    return v.empty() ? dflt : v;
}

// ---- subcommand bodies -------------------------------------------------

int cmd_scenario_build(const std::string& name, int n, int res, double amplitude,
                       std::uint64_t seed, const std::string& out_dir, bool dump_fields) {
    ensure_dir(out_dir);
    Scenario s = build_scenario(name, GridSpec(n, res), amplitude, seed);
    ConditionBResult b = condition_b_constant(s);
    ContractSet contracts;
    contracts.check_le("omega_min_eigenvalue_slack", -s.min_eigenvalue,
                       s.omega_degenerate ? 1e-8 : 0.0);
    json inputs;
    inputs["amplitude"] = amplitude;
    inputs["grid"] = res;
    inputs["n"] = n;
    json metrics;
    metrics["scenario"] = scenario_json(s);
    metrics["condition_b"] = condition_b_json(b);
    json tols;
    tols["degenerate_eigenvalue_slack"] = 1e-8;
    json rep = make_report(name, "scenario build", inputs, metrics, tols, seed);
    if (dump_fields) {
        write_hmaf(out_dir + "/" + name + "_omega.hmaf", s.omega);
        write_hmaf(out_dir + "/" + name + "_omega_x.hmaf", s.omega_X);
    }
    return finish(out_dir + "/scenario_" + name + ".json", rep, contracts);
}

int cmd_envelope_run(const std::string& name, int n, int res, const std::string& obstacle,
                     double beta_max, double tol, std::uint64_t seed,
                     const std::string& out_dir) {
    ensure_dir(out_dir);
    GridSpec g(n, res);
    Scenario s = build_scenario(name, g, -1.0, seed);
    ScalarField h;
    if (fs::exists(obstacle)) {
        h = read_hmaf_scalar(obstacle);
        if (!(h.grid.n == g.n && h.grid.res == g.res))
            throw BuildError("obstacle grid does not match --grid");
    } else {
        h = builtin_obstacle(g, obstacle, seed);
    }
    NewtonOptions opts;
    opts.tol = tol;
    EnvelopeResult r = compute_envelope(s.omega, h, beta_max, opts);

    ContractSet contracts;
    contracts.check_le("sup_violation", r.sup_violation, 2.0 * r.scheme_tol);
    double mass = integrate(ma_density(s.omega, r.phi, 1e-5 * (1.0 + s.omega.max_norm())));
    contracts.check_le("orthogonality_defect", r.orthogonality_defect,
                       1e-2 * std::max(mass, 1e-12));

    write_hmaf(out_dir + "/envelope_phi.hmaf", r.phi);
    std::vector<std::vector<double>> rows;
    for (const auto& t : r.beta_trace)
        rows.push_back({t.beta, double(t.newton_iters), t.residual});
    write_csv(out_dir + "/envelope_trace.csv", {"beta", "newton_iters", "residual"}, rows);

    json inputs;
    inputs["beta_max"] = beta_max;
    inputs["grid"] = res;
    inputs["n"] = n;
    inputs["obstacle"] = obstacle;
    inputs["tol"] = tol;
    json metrics;
    metrics["mass"] = mass;
    metrics["orthogonality_defect"] = r.orthogonality_defect;
    metrics["scheme_tol"] = r.scheme_tol;
    metrics["sup_violation"] = r.sup_violation;
    metrics["tau"] = r.tau;
    json tols;
    tols["sup_violation"] = 2.0 * r.scheme_tol;
    json rep = make_report(name, "envelope run", inputs, metrics, tols, seed);
    return finish(out_dir + "/envelope_" + name + ".json", rep, contracts);
}

int cmd_mass_survey(const std::string& name, int n, int res, int family_size, std::uint64_t seed,
                    std::vector<int> js, double m_clip, std::vector<double> eps_ladder,
                    const std::string& out_dir) {
    ensure_dir(out_dir);
    GridSpec g(n, res);
    Scenario s = build_scenario(name, g, -1.0, seed);
    if (js.empty())
        for (int j = 1; j <= n; ++j) js.push_back(j);
    FamilySpec fam;
    fam.count = family_size;
    fam.seed = seed;

    json metrics;
    ContractSet contracts;
    std::vector<std::vector<double>> rows;
    if (m_clip >= 0.0) {
        MassReport rep = v_M_survey(s, m_clip, fam);
        metrics["m_clip_perturbation"] = rep.m_clip_perturbation;
        metrics["min_mass"] = rep.min_mass;
        metrics["max_mass"] = rep.max_mass;
        metrics["volume"] = rep.volume;
        contracts.check_le("worst_eigenvalue_slack", -rep.worst_eigenvalue, 1e-6);
        for (std::size_t k = 0; k < rep.masses.size(); ++k)
            for (std::size_t ji = 0; ji < rep.js.size(); ++ji)
                rows.push_back({double(k), double(rep.js[ji]), rep.masses[k][ji]});
    } else if (!eps_ladder.empty()) {
        EpsLadderTable t = hat_v_closed_check(s, eps_ladder, fam);
        metrics["fitted_c"] = t.fitted_c;
        metrics["volume0"] = t.volume0;
        json lr = json::array();
        for (const auto& r : t.rows) {
            json e;
            e["deviation"] = r.deviation;
            e["eps"] = r.eps;
            e["max_mass"] = r.max_mass;
            e["min_mass"] = r.min_mass;
            e["volume_eps"] = r.volume_eps;
            lr.push_back(e);
            rows.push_back({r.eps, r.min_mass, r.max_mass, r.volume_eps, r.deviation});
        }
        metrics["ladder"] = lr;
        write_csv(out_dir + "/mass_ladder.csv",
                  {"eps", "min_mass", "max_mass", "volume_eps", "deviation"}, rows);
        rows.clear();
    } else {
        MassReport rep = mass_survey(s, fam, js);
        metrics["min_mass"] = rep.min_mass;
        metrics["max_mass"] = rep.max_mass;
        metrics["mean_mass"] = rep.mean_mass;
        metrics["volume"] = rep.volume;
        contracts.check_le("worst_eigenvalue_slack", -rep.worst_eigenvalue, 1e-6);
        if (s.omega_closed) {
            double worst = 0.0;
            for (std::size_t ji = 0; ji < js.size(); ++ji)
                worst = std::max(worst, std::abs(rep.max_mass[ji] - rep.volume) +
                                            std::abs(rep.min_mass[ji] - rep.volume));
            contracts.check_le("closed_mass_constancy", worst,
                               1e-6 * std::max(rep.volume, 1e-12));
        }
        for (std::size_t k = 0; k < rep.masses.size(); ++k)
            for (std::size_t ji = 0; ji < js.size(); ++ji)
                rows.push_back({double(k), double(js[ji]), rep.masses[k][ji]});
    }
    if (!rows.empty())
        write_csv(out_dir + "/mass_survey.csv", {"sample", "j", "mass"}, rows);

    json inputs;
    inputs["eps_ladder"] = eps_ladder;
    inputs["family_size"] = family_size;
    inputs["grid"] = res;
    inputs["js"] = js;
    inputs["m_clip"] = m_clip;
    inputs["n"] = n;
    json tols;
    tols["closed_mass_constancy_rel"] = 1e-6;
    json rep = make_report(name, "mass survey", inputs, metrics, tols, seed);
    return finish(out_dir + "/mass_" + name + ".json", rep, contracts);
}

int cmd_compare(const std::string& name, int n, int res, double lambda, int s_count,
                std::uint64_t seed, const std::string& out_dir) {
    ensure_dir(out_dir);
    GridSpec g(n, res);
    Scenario s = build_scenario(name, g, -1.0, seed);
    ConditionBResult bres = condition_b_constant(s);
    if (!bres.finite) throw BuildError("condition (B) is infinite for this scenario");
    PshSample u = make_psh_sample(s, seed + 1, 3);
    PshSample v = make_psh_sample(s, seed + 2, 3);
    double s_max = comparison_s_max(lambda, bres.b, n);
    std::vector<double> svals;
    for (int k = 1; k <= s_count; ++k) {
        double cap = std::isfinite(s_max) ? 0.5 * s_max : 0.2;
        svals.push_back(cap * double(k) / double(s_count));
    }
    auto reports = modified_comparison_check(s, u, v, lambda, svals);

    ContractSet contracts;
    double total = 0.0;
    std::vector<std::vector<double>> rows;
    for (const auto& r : reports) {
        total = std::max(total, r.rhs);
        rows.push_back({r.s, r.factor, r.lhs, r.rhs, r.margin, double(r.sublevel_cells)});
        contracts.check_true("comparison_margin_s_" + format_double(r.s), r.pass);
    }
    write_csv(out_dir + "/compare_sweep.csv",
              {"s", "factor", "lhs", "rhs", "margin", "sublevel_cells"}, rows);

    json inputs;
    inputs["grid"] = res;
    inputs["lambda"] = lambda;
    inputs["n"] = n;
    inputs["s_count"] = s_count;
    json metrics;
    metrics["b"] = bres.b;
    metrics["s_max"] = std::isfinite(s_max) ? s_max : -1.0;
    json tols;
    tols["margin_rel"] = 1e-8;
    json rep = make_report(name, "compare run", inputs, metrics, tols, seed);
    return finish(out_dir + "/compare_" + name + ".json", rep, contracts);
}

int cmd_morse(const std::string& name, int n, int res, int family_size,
              std::vector<double> eps_ladder, std::uint64_t seed, const std::string& out_dir) {
    ensure_dir(out_dir);
    GridSpec g(n, res);
    Scenario s = build_scenario(name, g, -1.0, seed);
    GauduchonFamily fam = make_gauduchon_family(g, family_size, seed);
    LamariScan scan = lamari_pairing_scan(s, fam);

    ContractSet contracts;
    double worst_defect = 0.0;
    for (double d : fam.defects) worst_defect = std::max(worst_defect, d);
    contracts.check_le("gauduchon_defect", worst_defect, 1e-6);

    PopoviciIntegrated pop =
        popovici_integrated(s.omega_X, fam.members.front(), s.omega_X, true);
    contracts.check_true("popovici_integrated", pop.pass);

    json metrics;
    metrics["delta_star"] = scan.delta_star;
    metrics["delta_argmin"] = scan.argmin;
    metrics["gauduchon_defects"] = fam.defects;
    metrics["lamari_ratios"] = scan.ratios;
    metrics["popovici_lhs"] = pop.lhs;
    metrics["popovici_rhs"] = pop.rhs;

    std::vector<std::vector<double>> rows;
    if (s.omega_closed) {
        FamilySpec fs2;
        fs2.count = std::max(2, family_size / 2);
        fs2.seed = seed;
        MorseTable t = morse_mass_convergence(s, eps_ladder, fs2);
        metrics["morse_fitted_c_mixed"] = t.fitted_c_mixed;
        metrics["morse_fitted_c_top"] = t.fitted_c_top;
        double worst_stokes = 0.0;
        for (const auto& r : t.rows) {
            worst_stokes = std::max({worst_stokes, r.stokes_top, r.stokes_mixed});
            rows.push_back({r.eps, r.dev_top, r.dev_mixed, r.stokes_top, r.stokes_mixed});
        }
        contracts.check_le("morse_stokes_deviation", worst_stokes, 1e-8);
        write_csv(out_dir + "/morse_ladder.csv",
                  {"eps", "dev_top", "dev_mixed", "stokes_top", "stokes_mixed"}, rows);
    }

    json inputs;
    inputs["eps_ladder"] = eps_ladder;
    inputs["family_size"] = family_size;
    inputs["grid"] = res;
    inputs["n"] = n;
    json tols;
    tols["gauduchon_defect"] = 1e-6;
    tols["morse_stokes_deviation"] = 1e-8;
    json rep = make_report(name, "morse run", inputs, metrics, tols, seed);
    return finish(out_dir + "/morse_" + name + ".json", rep, contracts);
}

int cmd_suite(bool quick, std::uint64_t seed, const std::string& out_dir) {
    ensure_dir(out_dir);
    const int res2 = quick ? 16 : 32;
    const int res1 = quick ? 64 : 256;
    ContractSet contracts;
    json metrics;

    // 1. all scenarios build; condition (B) catalogued
    json scen = json::object();
    for (const auto& name : scenario_names()) {
        Scenario s = build_scenario(name, GridSpec(2, res2), -1.0, seed);
        ConditionBResult b = condition_b_constant(s);
        json e = scenario_json(s);
        e["condition_b"] = condition_b_json(b);
        scen[name] = e;
        contracts.check_le("scenario_" + name + "_eigenvalue_slack", -s.min_eigenvalue,
                           s.omega_degenerate ? 1e-8 : 0.0);
    }
    metrics["scenarios"] = scen;

    // 2. n=1 envelope vs independent obstacle oracle
    {
        GridSpec g(1, res1);
        Scenario s = build_scenario("flat_kahler", g, -1.0, seed);
        ScalarField h = builtin_obstacle(g, "two_well", seed);
        double beta_max = quick ? 1024.0 : 4096.0;
        EnvelopeResult r = compute_envelope(s.omega, h, beta_max);
        ScalarField m_field(g, 1.0);
        ScalarField oracle = envelope_obstacle_1d(m_field, h);
        double gap = 0.0;
        for (std::int64_t i = 0; i < g.num_points(); ++i)
            gap = std::max(gap, std::abs(r.phi[i] - oracle[i]));
        metrics["envelope_1d_gap"] = gap;
        metrics["envelope_1d_scheme_tol"] = r.scheme_tol;
        contracts.check_le("envelope_1d_gap", gap, 2.0 * r.scheme_tol);
    }

    // 3. closed-scenario mass constancy + binomial identity
    {
        Scenario s = build_scenario("guan_li_closed", GridSpec(2, res2), -1.0, seed);
        FamilySpec fam;
        fam.count = quick ? 5 : 10;
        fam.seed = seed;
        std::vector<int> js{1, 2};
        MassReport rep = mass_survey(s, fam, js);
        double worst = 0.0;
        for (std::size_t ji = 0; ji < js.size(); ++ji)
            worst = std::max({worst, std::abs(rep.max_mass[ji] - rep.volume),
                              std::abs(rep.min_mass[ji] - rep.volume)});
        metrics["mass_constancy"] = worst / rep.volume;
        contracts.check_le("mass_constancy_rel", worst / rep.volume, 1e-8);

        PshSample u = make_psh_sample(s, seed + 3, 3);
        double bd = binomial_identity_check(s, u.u);
        metrics["binomial_defect"] = bd;
        contracts.check_le("binomial_defect", bd, 1e-9);
    }

    // 4. modified comparison on a closed scenario (B = 0)
    {
        Scenario s = build_scenario("guan_li_closed", GridSpec(2, res2), -1.0, seed);
        PshSample u = make_psh_sample(s, seed + 4, 3);
        PshSample v = make_psh_sample(s, seed + 5, 3);
        std::vector<double> svals{0.05};
        auto reports = modified_comparison_check(s, u, v, 0.5, svals);
        metrics["comparison_margin"] = reports[0].margin;
        contracts.check_true("comparison_margin", reports[0].pass);
    }

    // 5. Gauduchon family + integrated Popovici (constructed rescale)
    {
        GridSpec g(2, res2);
        GauduchonFamily fam = make_gauduchon_family(g, 3, seed);
        double worst_defect = 0.0;
        for (double d : fam.defects) worst_defect = std::max(worst_defect, d);
        metrics["gauduchon_defect"] = worst_defect;
        contracts.check_le("gauduchon_defect", worst_defect, 1e-6);
        Scenario s = build_scenario("flat_kahler", g, -1.0, seed);
        PopoviciIntegrated pop =
            popovici_integrated(fam.members[0], fam.members[1], fam.members[2], true);
        metrics["popovici_margin"] = pop.lhs - pop.rhs;
        contracts.check_true("popovici_integrated", pop.pass);
        LamariScan scan = lamari_pairing_scan(s, fam);
        metrics["lamari_delta_star"] = scan.delta_star;
        contracts.check_le("lamari_delta_star_positive", -scan.delta_star, 0.0);
    }

    // 6. min/max envelope lemma on a small grid
    {
        Scenario s = build_scenario("flat_kahler", GridSpec(2, res2), -1.0, seed);
        PshSample u = make_psh_sample(s, seed + 6, 3);
        PshSample v = make_psh_sample(s, seed + 7, 3);
        MinCheckReport rep = envelope_min_check(s, u, v, quick ? 1024.0 : 4096.0);
        metrics["min_check_density_excess"] = rep.density_excess;
        metrics["min_check_crease_fraction"] = rep.crease_fraction;
        contracts.check_true("min_check", rep.pass);
    }

    json inputs;
    inputs["quick"] = quick;
    inputs["res1"] = res1;
    inputs["res2"] = res2;
    json tols;
    tols["binomial_defect"] = 1e-9;
    tols["gauduchon_defect"] = 1e-6;
    tols["mass_constancy_rel"] = 1e-8;
    json rep = make_report("suite", quick ? "suite quick" : "suite full", inputs, metrics, tols,
                           seed);
    return finish(out_dir + "/suite.json", rep, contracts);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pluripot: quantitative pluripotential-theory laboratory on flat tori"};
    app.require_subcommand(1);
    int threads = 1;
    app.add_option("--threads", threads, "cap the worker pool (computation is deterministic)")
        ->check(CLI::PositiveNumber);

    std::string name = "flat_kahler", out_dir = default_out_dir(), obstacle = "two_well";
    int n = 2, res = 32, family_size = 10, s_count = 4;
    double amplitude = -1.0, beta_max = 4096.0, tol = 1e-6, m_clip = -1.0, lambda = 0.5;
    std::uint64_t seed = 1;
    std::vector<int> js;
    std::vector<double> eps_ladder;
    bool dump_fields = false, quick = false;

    auto add_common = [&](CLI::App* c, bool with_scenario = true) {
        if (with_scenario)
            c->add_option("--scenario", name, "scenario name")
                ->check(CLI::IsMember(scenario_names()));
        c->add_option("--grid", res, "grid resolution per axis (power of two >= 16)");
        c->add_option("--n", n, "complex dimension (1..3)")->check(CLI::Range(1, 3));
        c->add_option("--seed", seed, "master seed");
        c->add_option("--out", out_dir, "output directory");
    };

    CLI::App* sc = app.add_subcommand("scenario", "build or list scenarios");
    CLI::App* sc_list = sc->add_subcommand("list", "print the scenario names");
    CLI::App* sc_build = sc->add_subcommand("build", "build a scenario and report invariants");
    add_common(sc_build);
    sc_build->add_option("--amplitude", amplitude, "perturbation amplitude (<=0: default)");
    sc_build->add_flag("--dump-fields", dump_fields, "write omega/omega_X as HMAF");
    sc->require_subcommand(1);

    CLI::App* env = app.add_subcommand("envelope", "quasi-psh envelopes");
    CLI::App* env_run = env->add_subcommand("run", "compute P(h) and diagnostics");
    add_common(env_run);
    env_run->add_option("--obstacle", obstacle, "builtin name or HMAF scalar file");
    env_run->add_option("--beta-max", beta_max, "final beta of the exponential scheme");
    env_run->add_option("--tol", tol, "Newton residual tolerance");
    env->require_subcommand(1);

    CLI::App* mass = app.add_subcommand("mass", "Monge-Ampere mass surveys");
    CLI::App* mass_sv = mass->add_subcommand("survey", "family mass survey");
    add_common(mass_sv);
    mass_sv->add_option("--family-size", family_size, "number of samples");
    mass_sv->add_option("--js", js, "mixed powers j to survey");
    mass_sv->add_option("--m-clip", m_clip, "clip samples to [-M,0] (v_M survey)");
    mass_sv->add_option("--eps-ladder", eps_ladder, "eps values for the hat-v ladder");
    mass->require_subcommand(1);

    CLI::App* cmp = app.add_subcommand("compare", "modified comparison sweeps");
    CLI::App* cmp_run = cmp->add_subcommand("run", "sublevel comparison sweep in s");
    add_common(cmp_run);
    cmp_run->add_option("--lambda", lambda, "lambda in (0,1)");
    cmp_run->add_option("--s-count", s_count, "number of s values up to s_max/2");
    cmp->require_subcommand(1);

    CLI::App* morse = app.add_subcommand("morse", "Gauduchon / Morse-type checks");
    CLI::App* morse_run = morse->add_subcommand("run", "family scan + integrated Popovici");
    add_common(morse_run);
    morse_run->add_option("--family-size", family_size, "Gauduchon family size");
    morse_run->add_option("--eps-ladder", eps_ladder, "eps ladder for mass convergence");
    morse->require_subcommand(1);

    CLI::App* suite = app.add_subcommand("suite", "run the bundled check battery");
    suite->add_flag("--quick", quick, "reduced resolution battery");
    suite->add_option("--seed", seed, "master seed");
    suite->add_option("--out", out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (sc_list->parsed()) {
            for (const auto& s : scenario_names()) std::cout << s << "\n";
            return 0;
        }
        if (sc_build->parsed())
            return cmd_scenario_build(name, n, res, amplitude, seed, out_dir, dump_fields);
        if (env_run->parsed())
            return cmd_envelope_run(name, n, res, obstacle, beta_max, tol, seed, out_dir);
        if (mass_sv->parsed())
            return cmd_mass_survey(name, n, res, family_size, seed, js, m_clip,
                                   parse_doubles(eps_ladder, {}), out_dir);
        if (cmp_run->parsed())
            return cmd_compare(name, n, res, lambda, s_count, seed, out_dir);
        if (morse_run->parsed())
            return cmd_morse(name, n, res, family_size,
                             parse_doubles(eps_ladder, {0.2, 0.1, 0.05}), seed, out_dir);
        if (suite->parsed()) return cmd_suite(quick, seed, out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    std::cerr << "error: no subcommand executed\n";
    return 1;
}
