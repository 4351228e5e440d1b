// sgwave: standing waves of phase-transitional strain-gradient elasticity.
//
// Subcommands expose the library modules: potential tables, 1-D phase-plane
// portraits, variational wave construction, parabolicity spectra, and
// time evolution with energy diagnostics. Every artifact embeds the run
// configuration and library version; identical configs and seeds reproduce
// identical outputs.

#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <thread>

#include <CLI11.hpp>

#include "sgwave/evolution.hpp"
#include "sgwave/io.hpp"
#include "sgwave/parabolic.hpp"
#include "sgwave/phase_plane.hpp"
#include "sgwave/variational.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitConditionFalse = 3;
constexpr int kExitNotConverged = 4;
constexpr int kExitInfeasible = 5;

struct Range {
    double lo = 0.0, hi = 1.0;
    int n = 101;
};

Range parse_range(const std::string& spec) {
    Range r;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%d", &r.lo, &r.hi, &r.n) != 3 || r.n < 2)
        throw CLI::ValidationError("range", "expected lo:hi:npts with npts >= 2");
    return r;
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(std::stod(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(std::stod(cur));
    return out;
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + sgw::CsvWriter::format(v[i]);
    return s;
}

// Deterministic fan-out: run f(i) for i in [0,n) on `jobs` threads, results
// merged by index.
template <typename F>
void parallel_for(int n, int jobs, F&& f) {
    jobs = std::max(1, std::min(jobs, n));
    if (jobs == 1) {
        for (int i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) f(i);
        });
    for (auto& th : pool) th.join();
}

struct CommonOpts {
    std::string model_name = "shear1";
    double eps = 2.0;
    std::string out_dir = ".";
    int jobs = 1;

    sgw::PotentialModel model() const { return sgw::make_model(model_name, eps); }
    std::string path(const std::string& file) const { return out_dir + "/" + file; }
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--model", o.model_name, "model: shear1|shear2|comp1|incomp2d|comp2d|full3d")
        ->capture_default_str();
    cmd->add_option("--eps", o.eps, "phase-transition parameter epsilon")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--out-dir", o.out_dir, "output directory")->capture_default_str();
    cmd->add_option("--jobs", o.jobs, "worker threads for sweeps")->check(CLI::PositiveNumber);
}

// ---------------------------------------------------------------- potential

int cmd_potential(const CommonOpts& o, const std::string& range_spec) {
    const sgw::PotentialModel model = o.model();
    const Range r = parse_range(range_spec);
    sgw::MetaMap meta{{"command", "potential"},
                      {"model", o.model_name},
                      {"eps", sgw::CsvWriter::format(o.eps)},
                      {"range", range_spec}};
    if (model.dim() == 1) {
        sgw::CsvWriter csv(o.path("potential.csv"), meta, {"tau", "W", "dW", "d2W"});
        for (int i = 0; i < r.n; ++i) {
            const double t = r.lo + (r.hi - r.lo) * i / (r.n - 1);
            if (model.constrained() && !(t > 0.0)) continue;
            csv.row({t, sgw::w_scalar(model, t), sgw::wp_scalar(model, t), sgw::wpp_scalar(model, t)});
        }
    } else {
        // Sample along each coordinate axis through the reference point.
        std::vector<std::string> cols{"axis", "tau"};
        cols.push_back("W");
        for (int c = 0; c < model.dim(); ++c) cols.push_back("dW" + std::to_string(c + 1));
        for (int c = 0; c < model.dim(); ++c) cols.push_back("eig" + std::to_string(c + 1));
        sgw::CsvWriter csv(o.path("potential.csv"), meta, cols);
        for (int axis = 0; axis < model.dim(); ++axis)
            for (int i = 0; i < r.n; ++i) {
                const double t = r.lo + (r.hi - r.lo) * i / (r.n - 1);
                sgw::Vec tau(model.dim(), 0.0);
                if (model.constrained()) tau.back() = 1.0;
                tau[axis] = t;
                if (model.constrained() && !(tau.back() > 0.0)) continue;
                std::vector<double> row{double(axis + 1), t, sgw::energy(model, tau)};
                for (double g : sgw::gradient(model, tau)) row.push_back(g);
                for (double e : sgw::sym_eigenvalues(sgw::hessian(model, tau))) row.push_back(e);
                csv.row(row);
            }
    }
    std::cout << "wrote " << o.path("potential.csv") << "\n";
    return kExitOk;
}

// ----------------------------------------------------------------- portrait

int cmd_portrait(const CommonOpts& o, const std::string& q_sweep, double q_single, bool has_q,
                 double tau_minus, bool has_tau_minus, int n_energies) {
    const sgw::PotentialModel model = o.model();
    if (model.dim() != 1) {
        std::cerr << "portrait: 1-D model required\n";
        return kExitUsage;
    }
    double q0 = has_q ? q_single : 0.0;
    if (has_tau_minus) q0 = sgw::q_from_tau_minus(model, tau_minus);

    const sgw::CriticalStructure cs = sgw::critical_structure(model);
    sgw::MetaMap meta{{"command", "portrait"},
                      {"model", o.model_name},
                      {"eps", sgw::CsvWriter::format(o.eps)},
                      {"q", sgw::CsvWriter::format(q0)}};

    sgw::OrderedJson body;
    body["zeros_of_wprime"] = cs.zeros;
    body["critical_points_of_wprime"] = cs.critical_points;
    body["extremum_points"] = cs.extremum_points;
    body["Q"] = cs.monotone ? sgw::OrderedJson("inf") : sgw::OrderedJson(cs.q_threshold);
    body["monotone"] = cs.monotone;

    const sgw::OrbitClass oc = sgw::classify(model, q0);
    sgw::OrderedJson cls;
    cls["tag"] = sgw::to_string(oc.tag);
    cls["physical"] = oc.physical;
    sgw::OrderedJson eqs = sgw::OrderedJson::array();
    for (const auto& e : oc.equilibria) {
        sgw::OrderedJson je;
        je["tau"] = e.tau;
        je["V"] = e.v_value;
        je["type"] = e.type == sgw::EquilibriumType::Center
                         ? "center"
                         : (e.type == sgw::EquilibriumType::Saddle ? "saddle" : "degenerate");
        eqs.push_back(je);
    }
    cls["equilibria"] = eqs;
    body["classification"] = cls;

    // Physical homoclinic q-window for the compressible model.
    if (model.kind == sgw::ModelKind::Compressible1D_III && !cs.monotone) {
        const double Q = cs.q_threshold;
        auto phys = [&](double q) { return sgw::physical_homoclinic_check(model, q).physical; };
        double lo = -0.999999 * Q, hi = -1e-9 * Q;
        sgw::OrderedJson win;
        if (phys(lo) && !phys(hi)) {
            for (int i = 0; i < 200; ++i) {
                const double mid = 0.5 * (lo + hi);
                (phys(mid) ? lo : hi) = mid;
            }
            win["q_min"] = -Q;
            win["q_max"] = lo;
            win["exists"] = true;
        } else {
            win["exists"] = phys(lo);
        }
        body["physical_homoclinic_window"] = win;
    }

    // q sweep of classifications.
    if (!q_sweep.empty() || !cs.monotone) {
        Range r;
        if (!q_sweep.empty()) r = parse_range(q_sweep);
        else r = {-2.0 * cs.q_threshold, 2.0 * cs.q_threshold, 81};
        std::vector<std::string> tags(r.n);
        std::vector<int> counts(r.n);
        std::vector<double> qs(r.n);
        parallel_for(r.n, o.jobs, [&](int i) {
            const double q = r.lo + (r.hi - r.lo) * i / (r.n - 1);
            qs[i] = q;
            tags[i] = sgw::to_string(sgw::classify(model, q).tag);
            counts[i] = sgw::count_roots(model, q).count;
        });
        sgw::CsvWriter csv(o.path("portrait_sweep.csv"), meta, {"q", "root_count", "classification"});
        for (int i = 0; i < r.n; ++i)
            csv.row_mixed({sgw::CsvWriter::format(qs[i]), std::to_string(counts[i]), tags[i]});
    }

    // T(E) curve over the periodic window for q0.
    if (oc.tag != sgw::OrbitTag::NoBoundedOrbits && n_energies > 0) {
        const auto [emin, emax] = sgw::energy_window(model, q0);
        sgw::CsvWriter csv(o.path("portrait_TE.csv"), meta, {"E", "T"});
        std::vector<double> Es(n_energies), Ts(n_energies);
        parallel_for(n_energies, o.jobs, [&](int i) {
            const double f = (i + 1.0) / (n_energies + 1.0);
            Es[i] = emin + (emax - emin) * f;
            Ts[i] = sgw::period_quadrature(model, q0, Es[i]);
        });
        for (int i = 0; i < n_energies; ++i) csv.row({Es[i], Ts[i]});
    }

    sgw::write_json(o.path("portrait.json"), meta, body);
    std::cout << "wrote " << o.path("portrait.json") << "\n";
    return kExitOk;
}

// ----------------------------------------------------------------- findwave

sgw::OrderedJson profile_json(const sgw::FourierProfile& p, const sgw::Vec& m) {
    sgw::OrderedJson j;
    j["period"] = p.period;
    j["dim"] = p.dim;
    j["modes"] = p.n_modes;
    j["m"] = m;
    j["a"] = p.a;
    j["b"] = p.b;
    return j;
}

sgw::FourierProfile profile_from_json(const sgw::OrderedJson& j, sgw::Vec& m) {
    sgw::FourierProfile p(j.at("period").get<double>(), j.at("dim").get<int>(),
                          j.at("modes").get<int>());
    m = j.at("m").get<sgw::Vec>();
    p.a = j.at("a").get<std::vector<sgw::Vec>>();
    p.b = j.at("b").get<std::vector<sgw::Vec>>();
    return p;
}

int cmd_findwave(const CommonOpts& o, const std::string& m_str, double period, int modes,
                 int grid_factor, int max_iters, double grad_tol, double barrier,
                 const std::string& rule) {
    const sgw::PotentialModel model = o.model();
    sgw::Vec m = m_str.empty() ? sgw::Vec(model.dim(), 0.0) : parse_list(m_str);
    model.check_dim(m);

    sgw::MinimizeConfig cfg;
    cfg.modes = modes;
    cfg.grid_factor = grid_factor;
    cfg.max_iters = max_iters;
    cfg.grad_tol = grad_tol;
    cfg.barrier_strength = barrier;
    cfg.rule = rule == "gd" ? sgw::MinimizeConfig::StepRule::GradientDescent
                            : sgw::MinimizeConfig::StepRule::LBFGS;

    sgw::MetaMap meta{{"command", "findwave"},     {"model", o.model_name},
                      {"eps", sgw::CsvWriter::format(o.eps)}, {"m", join(m)},
                      {"T", sgw::CsvWriter::format(period)},  {"modes", std::to_string(modes)},
                      {"step_rule", rule}};

    double lambda = 0.0;
    const bool cond = sgw::existence_condition(model, m, period, &lambda);
    const sgw::MinimizerResult res = sgw::minimize(model, m, period, cfg);

    sgw::Vec svals;
    const int eff_dim = sgw::effective_dimension(res.v, &svals);

    sgw::OrderedJson body;
    body["lambda_m"] = lambda;
    body["condition_holds"] = cond;
    body["threshold_period"] = 2.0 * std::acos(-1.0) / std::sqrt(std::max(lambda, 1e-300));
    sgw::OrderedJson rj;
    rj["action"] = res.action;
    rj["el_residual"] = res.el_residual;
    rj["q"] = res.q_recovered;
    rj["nonconstant"] = res.nonconstant;
    rj["converged"] = res.converged;
    rj["trivial_only"] = res.trivial_only;
    rj["feasible"] = res.feasible;
    rj["iterations"] = res.iterations;
    rj["grad_sup"] = res.grad_sup;
    rj["min_tau3"] = res.min_tau3;
    rj["effective_dimension"] = eff_dim;
    rj["singular_values"] = svals;
    rj["profile"] = profile_json(res.v, m);
    body["result"] = rj;
    sgw::write_json(o.path("findwave.json"), meta, body);

    {
        std::vector<std::string> cols{"x"};
        for (int c = 0; c < model.dim(); ++c) cols.push_back("tau" + std::to_string(c + 1));
        sgw::CsvWriter csv(o.path("findwave_profile.csv"), meta, cols);
        const int n = 8 * modes;
        for (int i = 0; i < n; ++i) {
            const double x = period * i / n;
            const sgw::Vec v = res.v.value_at(x);
            std::vector<double> row{x};
            for (int c = 0; c < model.dim(); ++c) row.push_back(v[c] + m[c]);
            csv.row(row);
        }
    }
    std::cout << "wrote " << o.path("findwave.json") << " (action " << res.action << ", residual "
              << res.el_residual << ", effective dim " << eff_dim << ")\n";

    if (!cond) return kExitConditionFalse;
    if (!res.converged || res.trivial_only) return kExitNotConverged;
    if (!res.feasible) return kExitInfeasible;
    return kExitOk;
}

// ----------------------------------------------------------------- parabolic

sgw::OrderedJson spectrum_json(const sgw::SpectrumReport& rep) {
    auto dump = [](const std::vector<sgw::Complex>& v) {
        sgw::OrderedJson arr = sgw::OrderedJson::array();
        for (const auto& z : v) arr.push_back({{"re", z.real()}, {"im", z.imag()}});
        return arr;
    };
    sgw::OrderedJson j;
    j["eigenvalues"] = dump(rep.eigenvalues);
    j["predicted"] = dump(rep.predicted);
    j["min_real_part"] = rep.min_real_part;
    j["max_mismatch"] = rep.max_mismatch;
    j["ok"] = rep.ok;
    j["elliptic"] = rep.elliptic;
    return j;
}

int cmd_parabolic(const CommonOpts& o, const std::string& tau_str, const std::string& z_str,
                  const std::string& u_str, int sweep, std::uint64_t seed) {
    const sgw::PotentialModel model = o.model();
    const int d = model.dim();
    sgw::MetaMap meta{{"command", "parabolic"},
                      {"model", o.model_name},
                      {"eps", sgw::CsvWriter::format(o.eps)},
                      {"seed", std::to_string(seed)},
                      {"sweep", std::to_string(sweep)}};

    std::vector<sgw::ExtendedState> states;
    if (sweep > 0) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> uni(-1.5, 1.5), upos(0.2, 2.5);
        for (int i = 0; i < sweep; ++i) {
            sgw::ExtendedState st;
            st.tau.resize(d);
            st.z.resize(d);
            st.u.resize(d);
            for (int c = 0; c < d; ++c) {
                st.tau[c] = uni(rng);
                st.z[c] = uni(rng);
                st.u[c] = uni(rng);
            }
            if (model.constrained()) st.tau.back() = upos(rng);
            states.push_back(st);
        }
    } else {
        sgw::ExtendedState st;
        st.tau = tau_str.empty() ? sgw::Vec(d, 0.0) : parse_list(tau_str);
        if (model.constrained() && tau_str.empty()) st.tau.back() = 1.0;
        st.z = z_str.empty() ? sgw::Vec(d, 0.0) : parse_list(z_str);
        st.u = u_str.empty() ? sgw::Vec(d, 0.0) : parse_list(u_str);
        states.push_back(st);
    }

    bool all_ok = true;
    sgw::OrderedJson reports = sgw::OrderedJson::array();
    std::vector<sgw::OrderedJson> partial(states.size());
    std::atomic<bool> ok_flag{true};
    parallel_for(static_cast<int>(states.size()), o.jobs, [&](int i) {
        const auto& st = states[i];
        sgw::OrderedJson j;
        j["tau"] = st.tau;
        const auto p93 = sgw::parabolicity_check(sgw::Variant::Original93, model, st);
        const auto p94 = sgw::parabolicity_check(sgw::Variant::Modified94, model, st);
        const auto cs94 = sgw::characteristic_speeds(sgw::Variant::Modified94, model, st);
        const auto eq = sgw::spectrum_equivalence(model, st);
        j["B_original"] = spectrum_json(p93);
        j["B_modified"] = spectrum_json(p94);
        j["Df_modified"] = spectrum_json(cs94);
        j["spectrum_equivalence"] = spectrum_json(eq);
        const double radius = 1.0;
        const bool okay = p93.ok && p94.ok && p93.max_mismatch < 1e-7 &&
                          p94.max_mismatch < 1e-7 && cs94.max_mismatch < 1e-7 * radius && eq.ok;
        if (!okay) ok_flag = false;
        partial[i] = std::move(j);
    });
    all_ok = ok_flag;
    for (auto& j : partial) reports.push_back(std::move(j));

    sgw::OrderedJson body;
    body["states"] = states.size();
    body["all_ok"] = all_ok;
    body["reports"] = reports;
    sgw::write_json(o.path("parabolic.json"), meta, body);
    std::cout << "wrote " << o.path("parabolic.json") << " (all_ok=" << (all_ok ? "yes" : "no")
              << ")\n";
    return all_ok ? kExitOk : kExitCheckFailed;
}

// ------------------------------------------------------------------- evolve

int cmd_evolve(const CommonOpts& o, const std::string& m_str, int n, double period, double t_end,
               double dt, double cfl, int save_every, const std::string& ic,
               double perturb_scale, std::uint64_t seed, bool probe, double probe_scale,
               double probe_t_end, bool use_fd) {
    const sgw::PotentialModel model = o.model();
    sgw::Grid grid{period, n};
    grid.validate();
    sgw::Vec m = m_str.empty() ? sgw::Vec(model.dim(), 0.0) : parse_list(m_str);
    if (model.constrained() && m_str.empty()) m.back() = 1.0;
    model.check_dim(m);

    sgw::MetaMap meta{{"command", "evolve"},
                      {"model", o.model_name},
                      {"eps", sgw::CsvWriter::format(o.eps)},
                      {"m", join(m)},
                      {"n", std::to_string(n)},
                      {"T", sgw::CsvWriter::format(period)},
                      {"t_end", sgw::CsvWriter::format(t_end)},
                      {"ic", ic.empty() ? "perturb" : ic},
                      {"seed", std::to_string(seed)},
                      {"scheme", use_fd ? "fd4" : "spectral"}};

    sgw::FieldState state0 = sgw::FieldState::constant(model, grid, m, sgw::Vec(model.dim(), 0.0));
    bool from_wave = false;
    if (ic.rfind("wave:", 0) == 0) {
        std::ifstream in(ic.substr(5));
        if (!in) {
            std::cerr << "evolve: cannot open " << ic.substr(5) << "\n";
            return kExitUsage;
        }
        sgw::OrderedJson j = sgw::OrderedJson::parse(in);
        sgw::Vec m_wave;
        const sgw::FourierProfile p =
            profile_from_json(j.at("result").at("profile"), m_wave);
        if (std::fabs(p.period - period) > 1e-12 * period) {
            std::cerr << "evolve: wave period " << p.period << " does not match grid period\n";
            return kExitUsage;
        }
        m = m_wave;
        for (int i = 0; i < n; ++i) {
            const sgw::Vec v = p.value_at(grid.period * i / n);
            for (int c = 0; c < model.dim(); ++c) state0.tau[c][i] = v[c] + m_wave[c];
        }
        from_wave = true;
    } else if (perturb_scale > 0.0) {
        for (int c = 0; c < model.dim(); ++c) {
            const sgw::Vec pt = sgw::random_smooth_field(grid, perturb_scale, seed + 2 * c);
            const sgw::Vec pu = sgw::random_smooth_field(grid, perturb_scale, seed + 2 * c + 1);
            for (int i = 0; i < n; ++i) {
                state0.tau[c][i] += pt[i];
                state0.u[c][i] += pu[i];
            }
        }
    }

    sgw::DtControl ctl;
    ctl.dt = dt;
    ctl.cfl = cfl;
    ctl.save_every = save_every;
    ctl.spectral = !use_fd;

    if (probe) {
        if (!from_wave) {
            std::cerr << "evolve --probe requires --ic wave:<findwave.json>\n";
            return kExitUsage;
        }
        sgw::FieldState wave = state0;
        const sgw::ProbeResult pr =
            sgw::stability_probe(model, grid, wave, probe_scale, probe_t_end, seed, ctl);
        sgw::OrderedJson body;
        body["times"] = pr.times;
        body["excess"] = pr.excess;
        body["l2_distance"] = pr.l2_distance;
        body["bound_factor"] = pr.bound_factor;
        body["truncated_infeasible"] = pr.evolution.truncated_infeasible;
        sgw::write_json(o.path("probe.json"), meta, body);
        std::cout << "wrote " << o.path("probe.json") << " (bound factor " << pr.bound_factor
                  << ")\n";
        return pr.evolution.step_failure ? kExitNotConverged : kExitOk;
    }

    const sgw::EvolveResult res = sgw::evolve(model, grid, state0, t_end, ctl);
    {
        sgw::CsvWriter csv(o.path("energy.csv"), meta, {"t", "E", "dissipation", "dEdt_numeric"});
        for (const auto& r : res.trace.records) csv.row({r.t, r.energy, r.dissipation, r.dEdt_numeric});
    }
    {
        std::vector<std::string> cols{"x"};
        for (int c = 0; c < model.dim(); ++c) cols.push_back("tau" + std::to_string(c + 1));
        for (int c = 0; c < model.dim(); ++c) cols.push_back("u" + std::to_string(c + 1));
        sgw::CsvWriter csv(o.path("snapshot.csv"), meta, cols);
        for (int i = 0; i < n; ++i) {
            std::vector<double> row{grid.period * i / n};
            for (int c = 0; c < model.dim(); ++c) row.push_back(res.state.tau[c][i]);
            for (int c = 0; c < model.dim(); ++c) row.push_back(res.state.u[c][i]);
            csv.row(row);
        }
    }
    std::cout << "wrote " << o.path("energy.csv") << " and " << o.path("snapshot.csv") << " (dt "
              << res.dt_used << ", steps " << res.steps << ")\n";
    if (res.truncated_infeasible) return kExitInfeasible;
    if (res.step_failure) return kExitNotConverged;
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"standing waves of phase-transitional elasticity with strain-gradient effects"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value config file; command-line flags take precedence");
    app.allow_config_extras(CLI::config_extras_mode::ignore_all);

    CommonOpts opt;

    auto* pot = app.add_subcommand("potential", "tabulate W, DW, D2W over a strain range");
    add_common(pot, opt);
    std::string range = "-3:3:601";
    pot->add_option("--range", range, "tau range lo:hi:npts")->capture_default_str();

    auto* por = app.add_subcommand("portrait", "1-D critical structure, q-sweep, T(E) curve");
    add_common(por, opt);
    std::string q_sweep;
    double q0 = 0.0, tau_minus = 0.0;
    int n_energies = 25;
    por->add_option("--q-sweep", q_sweep, "sweep lo:hi:npts of q values");
    auto* qopt = por->add_option("--q", q0, "integration constant q");
    auto* tmopt = por->add_option("--tau-minus", tau_minus, "specify q as W'(tau_minus)");
    por->add_option("--energies", n_energies, "points on the T(E) curve (0 disables)");

    auto* fw = app.add_subcommand("findwave", "variational construction of a periodic wave");
    add_common(fw, opt);
    std::string m_str, rule = "lbfgs";
    double period = 4.0, grad_tol = 1e-10, barrier = 0.0;
    int modes = 32, grid_factor = 4, max_iters = 20000;
    fw->add_option("--m", m_str, "mean strain, comma separated");
    fw->add_option("--T", period, "wave period")->check(CLI::PositiveNumber)->capture_default_str();
    fw->add_option("--modes", modes, "Fourier modes per component")->capture_default_str();
    fw->add_option("--grid-factor", grid_factor, "collocation points per mode")->capture_default_str();
    fw->add_option("--max-iters", max_iters, "iteration cap")->capture_default_str();
    fw->add_option("--grad-tol", grad_tol, "gradient sup-norm tolerance")->capture_default_str();
    fw->add_option("--barrier", barrier, "log-barrier strength for tau3 > 0")->capture_default_str();
    fw->add_option("--step-rule", rule, "lbfgs|gd")->capture_default_str();

    auto* par = app.add_subcommand("parabolic", "transformed-system spectra checks");
    add_common(par, opt);
    std::string tau_str, z_str, u_str;
    int sweep = 0;
    std::uint64_t seed = 0;
    par->add_option("--tau", tau_str, "strain state, comma separated");
    par->add_option("--z", z_str, "phase variable z = tau_x");
    par->add_option("--u", u_str, "velocity");
    par->add_option("--sweep", sweep, "number of random feasible states");
    par->add_option("--seed", seed, "random seed");

    auto* evo = app.add_subcommand("evolve", "time evolution with energy diagnostics");
    add_common(evo, opt);
    std::string em_str, ic;
    int n = 256, save_every = 1;
    double e_period = 4.0, t_end = 1.0, dt = 0.0, cfl = 0.5, perturb_scale = 0.0;
    std::uint64_t eseed = 0;
    bool probe = false, use_fd = false;
    double probe_scale = 1e-3, probe_t_end = 5.0;
    evo->add_option("--m", em_str, "mean strain (constant background)");
    evo->add_option("--n", n, "grid points (power of two)")->capture_default_str();
    evo->add_option("--T", e_period, "spatial period")->check(CLI::PositiveNumber)->capture_default_str();
    evo->add_option("--t-end", t_end, "final time")->check(CLI::PositiveNumber)->capture_default_str();
    evo->add_option("--dt", dt, "time step (0: automatic)");
    evo->add_option("--cfl", cfl, "fraction of the explicit stability limit")->capture_default_str();
    evo->add_option("--save-every", save_every, "record cadence in steps")->capture_default_str();
    evo->add_option("--ic", ic, "initial condition: wave:<findwave.json> (default: perturbed constant)");
    evo->add_option("--perturb-scale", perturb_scale, "random smooth perturbation amplitude");
    evo->add_option("--seed", eseed, "random seed");
    evo->add_flag("--probe", probe, "run the co-periodic stability probe");
    evo->add_option("--probe-scale", probe_scale, "probe perturbation scale")->capture_default_str();
    evo->add_option("--probe-t-end", probe_t_end, "probe horizon")->capture_default_str();
    evo->add_flag("--fd", use_fd, "finite-difference fallback discretization");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (pot->parsed()) return cmd_potential(opt, range);
        if (por->parsed())
            return cmd_portrait(opt, q_sweep, q0, qopt->count() > 0, tau_minus, tmopt->count() > 0,
                                n_energies);
        if (fw->parsed())
            return cmd_findwave(opt, m_str, period, modes, grid_factor, max_iters, grad_tol, barrier,
                                rule);
        if (par->parsed()) return cmd_parabolic(opt, tau_str, z_str, u_str, sweep, seed);
        if (evo->parsed())
            return cmd_evolve(opt, em_str, n, e_period, t_end, dt, cfl, save_every, ic,
                              perturb_scale, eseed, probe, probe_scale, probe_t_end, use_fd);
    } catch (const sgw::infeasible_error& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const sgw::no_orbit_error& e) {
        std::cerr << "no orbit: " << e.what() << "\n";
        return kExitConditionFalse;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCheckFailed;
    }
    return kExitOk;
}
