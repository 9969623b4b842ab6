#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "config.hpp"
#include "observables.hpp"
#include "resources.hpp"
#include "stateprep.hpp"

namespace lgtsim {

namespace fs = std::filesystem;

inline const std::set<std::string>& experiment_ids() {
  static const std::set<std::string> ids = {"ahm-quench", "d-scaling", "baryon-prep", "hadronic-tensor", "resources"};
  return ids;
}

// Allowed keys per experiment; every config also accepts experiment, output and seed.
inline std::set<std::string> experiment_keys(const std::string& id) {
  std::set<std::string> k = {"experiment", "output", "seed"};
  const std::set<std::string> ahm = {"d", "lambda_E", "lambda_B", "lambda_M", "lambda_J", "tol"};
  if (id == "ahm-quench") {
    k.insert(ahm.begin(), ahm.end());
    k.insert({"order", "dt", "steps", "backend"});
  } else if (id == "d-scaling") {
    k.insert(ahm.begin(), ahm.end());
    k.erase("d");
    k.insert({"d_list", "t_max", "samples", "backend", "dt", "order"});
  } else if (id == "resources") {
    k.insert(ahm.begin(), ahm.end());
    k.insert({"dt", "chain_N", "gate_fidelity", "fidelity_threshold"});
  } else if (id == "baryon-prep") {
    k.insert({"N", "mu", "x", "blocks", "max_evals", "ramp_dt", "ramp_steps", "ramp_max_doublings"});
  } else if (id == "hadronic-tensor") {
    k.insert({"N", "mu", "x", "mu_index", "nu_index", "momentum", "t_max", "t_step", "dt", "order", "backend",
              "omega_max", "omega_samples", "window", "tol"});
  } else {
    throw invalid_parameter("unknown experiment: " + id);
  }
  return k;
}

inline std::vector<std::string> backends_of(const Config& cfg, const std::string& def) {
  const std::string b = cfg.str("backend", def);
  if (b == "both") return {"exact", "trotter"};
  if (b == "exact" || b == "trotter") return {b};
  throw invalid_parameter("backend must be exact, trotter or both");
}

// Full validation without running anything.
inline void validate_config(const Config& cfg) {
  const std::string id = cfg.str("experiment");
  cfg.check_keys(experiment_keys(id));
  for (const auto& [k, v] : cfg.values())
    if (k != "experiment" && k != "output" && k != "backend" && k != "window" && k != "d_list") cfg.num(k);
  if (cfg.has("backend")) backends_of(cfg, "exact");
  if (cfg.has("seed")) require(cfg.integer("seed") >= 0, "seed must be non-negative");
  if (id == "ahm-quench") {
    require(cfg.integer("d", 3) >= 2, "d must be at least 2");
    require(cfg.num("dt", 0.1) > 0, "dt must be positive");
    require(cfg.integer("steps", 1) >= 1, "steps must be positive");
    const int order = cfg.integer("order", 2);
    require(order == 1 || order == 2, "order must be 1 or 2");
  } else if (id == "d-scaling") {
    for (int d : cfg.int_list("d_list")) require(d >= 2 && d <= 8, "d_list entries must lie in [2, 8]");
    require(cfg.num("t_max", 4.0) > 0, "t_max must be positive");
    require(cfg.integer("samples", 41) >= 2, "samples must be at least 2");
  } else if (id == "resources") {
    require(cfg.integer("chain_N", 8) >= 2 && cfg.integer("chain_N", 8) % 2 == 0, "chain_N must be even and >= 2");
    const real f = cfg.num("gate_fidelity", 0.996), th = cfg.num("fidelity_threshold", 0.9);
    require(f > 0 && f <= 1 && th > 0 && th <= 1, "fidelities must lie in (0, 1]");
  } else if (id == "baryon-prep" || id == "hadronic-tensor") {
    const int N = cfg.integer("N", 4);
    require(N >= 2 && N % 2 == 0 && N <= 6, "N must be even and in [2, 6]");
    if (id == "baryon-prep") {
      require(cfg.integer("blocks", 5) >= 1, "blocks must be positive");
      require(cfg.integer("max_evals", 1500) >= 1, "max_evals must be positive");
      require(cfg.num("ramp_dt", 0.1) > 0 && cfg.integer("ramp_steps", 25) >= 1, "ramp parameters must be positive");
    } else {
      require(cfg.num("t_step", 0.1) > 0 && cfg.num("t_max", 10) >= 0, "time grid parameters are invalid");
      require(cfg.num("dt", 0.02) > 0, "dt must be positive");
      const int mu = cfg.integer("mu_index", 0), nu = cfg.integer("nu_index", 0);
      require((mu == 0 || mu == 1) && (nu == 0 || nu == 1), "current indices must be 0 or 1");
      require(cfg.integer("omega_samples", 101) >= 1, "omega_samples must be positive");
      const std::string w = cfg.str("window", "rectangular");
      require(w == "rectangular" || w == "hann", "window must be rectangular or hann");
      require(cfg.integer("momentum", 0) >= 0 && cfg.integer("momentum", 0) < N / 2, "momentum out of range");
    }
  }
}

struct RunContext {
  fs::path out_dir = ".";
  int threads = 1;
  std::ostream* log = nullptr;
};

inline int threads_from_env() {
  const char* s = std::getenv("LGTSIM_THREADS");
  if (!s || !*s) return 1;
  const int n = std::atoi(s);
  require(n >= 1, "LGTSIM_THREADS must be a positive integer");
  return n;
}

namespace detail {

inline std::string fmt(real v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);
  return buf;
}

inline std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream os(p);
  if (!os) throw numeric_failure("cannot write " + p.string());
  return os;
}

inline void note(const RunContext& ctx, const std::string& s) {
  if (ctx.log) *ctx.log << s << "\n";
}

inline CouplingSet ahm_couplings(const Config& cfg) {
  CouplingSet c;
  c.lambda_E = cfg.num("lambda_E", 4 * pi / 9);
  c.lambda_B = cfg.num("lambda_B", 0.5);
  c.lambda_M = cfg.num("lambda_M", 0.5);
  c.lambda_J = cfg.num("lambda_J", 2 * pi / 9);
  c.dt = cfg.num("dt", 4.0 / 55);
  c.order = cfg.integer("order", 2);
  return c;
}

inline const char* energy_header() { return "backend,t,electric,magnetic,mass,star,gauge,matter,total"; }

inline void write_trace(std::ostream& os, const std::string& backend, const EnergyTrace& tr) {
  for (std::size_t i = 0; i < tr.t.size(); ++i) {
    const auto& e = tr.e[i];
    os << backend << ',' << fmt(tr.t[i]) << ',' << fmt(AhmEnergies::sum(e.electric)) << ','
       << fmt(AhmEnergies::sum(e.magnetic)) << ',' << fmt(AhmEnergies::sum(e.mass)) << ','
       << fmt(AhmEnergies::sum(e.star)) << ',' << fmt(e.gauge()) << ',' << fmt(e.matter()) << ',' << fmt(e.total())
       << '\n';
  }
}

inline void check_finite(const EnergyTrace& tr) {
  for (const auto& e : tr.e)
    if (!std::isfinite(e.total())) throw numeric_failure("non-finite energy in trace");
}

// Quench from the default flux string on a periodic 2x2 lattice.
inline std::vector<std::pair<std::string, EnergyTrace>> ahm_traces(int d, const CouplingSet& c,
                                                                   const std::vector<std::string>& backends,
                                                                   const std::vector<real>& exact_ts, int steps,
                                                                   real tol) {
  const auto lat = build_lattice(2, {2, 2}, {true, true});
  const GroupTable G = cyclic_group(d);
  const AhmOperator H(lat, d, c);
  const StateVector psi0 = flux_string_state(lat, G, default_flux_links(lat));
  std::vector<std::pair<std::string, EnergyTrace>> out;
  for (const auto& b : backends) {
    EnergyTrace tr = b == "exact" ? ahm_quench_exact(H, psi0.amp, exact_ts, tol)
                                  : ahm_quench_trotter(H, psi0, ahm_trotter_step(lat, G, c), c.dt, steps);
    check_finite(tr);
    out.emplace_back(b, std::move(tr));
  }
  return out;
}

}  // namespace detail

inline std::vector<fs::path> run_ahm_quench(const Config& cfg, const RunContext& ctx) {
  const int d = cfg.integer("d", 3);
  const CouplingSet c = detail::ahm_couplings(cfg);
  const int steps = cfg.integer("steps", 55);
  std::vector<real> ts;
  for (int k = 0; k <= steps; ++k) ts.push_back(k * c.dt);
  const auto traces = detail::ahm_traces(d, c, backends_of(cfg, "both"), ts, steps, cfg.num("tol", 1e-10));
  const fs::path p = ctx.out_dir / cfg.str("output", "ahm_quench.csv");
  auto os = detail::open_out(p);
  os << "# lgtsim ahm-quench energies v1 d=" << d << " dt=" << detail::fmt(c.dt) << " order=" << c.order << "\n"
     << detail::energy_header() << "\n";
  for (const auto& [b, tr] : traces) detail::write_trace(os, b, tr);
  return {p};
}

// One CSV per d, written by worker threads that share nothing but the path list.
inline std::vector<fs::path> run_d_scaling(const Config& cfg, const RunContext& ctx) {
  const auto ds = cfg.int_list("d_list");
  CouplingSet c = detail::ahm_couplings(cfg);
  const real t_max = cfg.num("t_max", 4.0);
  const int samples = cfg.integer("samples", 41);
  const auto backends = backends_of(cfg, "exact");
  std::vector<real> ts;
  for (int i = 0; i < samples; ++i) ts.push_back(t_max * i / (samples - 1));
  const int steps = static_cast<int>(std::lround(t_max / c.dt));
  const real tol = cfg.num("tol", 1e-10);
  fs::path stem = cfg.str("output", "d_scaling.csv");
  const std::string ext = stem.has_extension() ? stem.extension().string() : ".csv";
  stem.replace_extension();
  std::vector<fs::path> paths(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) paths[i] = ctx.out_dir / (stem.string() + "_d" + std::to_string(ds[i]) + ext);
  std::mutex m;
  std::exception_ptr err;
  std::size_t next = 0;
  auto worker = [&] {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard<std::mutex> lk(m);
        if (next >= ds.size() || err) return;
        i = next++;
      }
      try {
        const auto traces = detail::ahm_traces(ds[i], c, backends, ts, steps, tol);
        auto os = detail::open_out(paths[i]);
        os << "# lgtsim d-scaling energies v1 d=" << ds[i] << "\n" << detail::energy_header() << "\n";
        for (const auto& [b, tr] : traces) detail::write_trace(os, b, tr);
      } catch (...) {
        std::lock_guard<std::mutex> lk(m);
        if (!err) err = std::current_exception();
      }
    }
  };
  const int nt = std::max(1, std::min<int>(ctx.threads, static_cast<int>(ds.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < nt; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
  return paths;
}

inline nlohmann::json resources_report(const Config& cfg) {
  const int d = cfg.integer("d", 3);
  CouplingSet c = detail::ahm_couplings(cfg);
  c.order = 2;
  const int N = cfg.integer("chain_N", 8);
  const real f = cfg.num("gate_fidelity", 0.996);
  const real threshold = cfg.num("fidelity_threshold", 0.9);
  const auto lat = build_lattice(2, {2, 2}, {true, true});
  const ResourceReport ahm = count_gates(ahm_trotter_step(lat, cyclic_group(d), c));
  const auto Q8 = make_group("Q8");
  CouplingSet cc;
  cc.mu = 1.0;
  cc.x = 1.0;
  cc.dt = c.dt;
  cc.order = 1;
  const ResourceReport chain = count_gates(chain_trotter_step(*Q8, N, cc));
  nlohmann::json j;
  j["format"] = "lgtsim-resources";
  j["version"] = 1;
  j["ahm_second_order_step"] = to_json(ahm);
  j["ahm_second_order_step"]["d"] = d;
  j["chain_first_order_step"] = to_json(chain);
  j["chain_first_order_step"]["N"] = N;
  for (int k : {2, 3, 4, 5, 6, 8}) j["pulse_estimate"][std::to_string(k)] = pulse_estimate(k);
  FidelityMap fm;
  for (GateClass k : all_gate_classes) fm[k] = f;
  const real per_total = fidelity_estimate(chain, fm);
  const real per_depth = fidelity_estimate_depth(chain, fm);
  const real per_ctrl = controlled_fidelity(chain, f);
  j["projection"] = {{"gate_fidelity", f},
                     {"threshold", threshold},
                     {"chain_step_fidelity_total_count", per_total},
                     {"chain_step_fidelity_depth_count", per_depth},
                     {"chain_step_fidelity_controlled_only", per_ctrl},
                     {"max_steps_total_count", max_steps_above(per_total, threshold)},
                     {"max_steps_depth_count", max_steps_above(per_depth, threshold)},
                     {"max_steps_controlled_only", max_steps_above(per_ctrl, threshold)},
                     {"ahm_step_fidelity_total_count", fidelity_estimate(ahm, fm)},
                     {"ahm_step_fidelity_depth_count", fidelity_estimate_depth(ahm, fm)}};
  return j;
}

inline std::vector<fs::path> run_resources(const Config& cfg, const RunContext& ctx) {
  const fs::path p = ctx.out_dir / cfg.str("output", "resources.json");
  auto os = detail::open_out(p);
  os << resources_report(cfg).dump(2) << "\n";
  return {p};
}

struct BaryonSetup {
  ChainModel cm;
  StateVector reference;  // oracle layout
  StateVector target;     // oracle-layout ground state in the one-baryon sector
  real energy = 0.0;
};

inline BaryonSetup baryon_setup(int N, real mu, real x) {
  BaryonSetup s{build_chain(N, mu, x, N + 2), {}, {}, 0.0};
  s.reference = baryon_reference_state(s.cm, 0);
  const EigenPair gs = ground_state(s.cm.H, s.reference.amp, 1e-10);
  s.target = StateVector(s.cm.layout, gs.state);
  s.energy = gs.energy;
  return s;
}

inline std::vector<fs::path> run_baryon_prep(const Config& cfg, const RunContext& ctx) {
  const int N = cfg.integer("N", 4);
  const real mu = cfg.num("mu", 1.0), x = cfg.num("x", 0.8);
  const BaryonSetup s = baryon_setup(N, mu, x);
  const StateVector init = chain_from_oracle(s.reference, s.cm);
  detail::note(ctx, "ground energy " + detail::fmt(s.energy));
  NelderMeadOptions opt;
  opt.max_evals = cfg.integer("max_evals", 1500);
  opt.seed = static_cast<std::uint64_t>(cfg.integer("seed", 12345));
  const auto sweep = variational_sweep(init, s.cm, s.target, cfg.integer("blocks", 5), opt);
  const std::string stem = cfg.str("output", "baryon");
  const fs::path pv = ctx.out_dir / (stem + "_variational.csv");
  {
    auto os = detail::open_out(pv);
    os << "# lgtsim baryon-prep variational v1 N=" << N << " mu=" << detail::fmt(mu) << " x=" << detail::fmt(x)
       << " ground_energy=" << detail::fmt(s.energy) << "\n"
       << "blocks,fidelity,evals,angles\n";
    for (const auto& r : sweep) {
      os << r.angles.size() / 2 << ',' << detail::fmt(r.fidelity) << ',' << r.evals << ',';
      for (std::size_t i = 0; i < r.angles.size(); ++i) os << (i ? " " : "") << detail::fmt(r.angles[i]);
      os << "\n";
    }
  }
  const fs::path pa = ctx.out_dir / (stem + "_adiabatic.csv");
  {
    auto os = detail::open_out(pa);
    const real rdt = cfg.num("ramp_dt", 0.1);
    os << "# lgtsim baryon-prep adiabatic v1 N=" << N << " ramp_dt=" << detail::fmt(rdt) << "\n"
       << "steps,T,fidelity\n";
    int steps = cfg.integer("ramp_steps", 25);
    const int doublings = cfg.integer("ramp_max_doublings", 4);
    for (int k = 0; k <= doublings; ++k, steps *= 2) {
      const auto pr = adiabatic_prepare(init, *s.cm.group, N, RampSchedule::linear(mu, 0.0, x, steps, rdt), &s.cm,
                                        &s.target);
      os << steps << ',' << detail::fmt(steps * rdt) << ',' << detail::fmt(pr.fidelity) << "\n";
      if (pr.fidelity >= 0.99) break;
    }
  }
  return {pv, pa};
}

inline std::vector<fs::path> run_hadronic(const Config& cfg, const RunContext& ctx) {
  const int N = cfg.integer("N", 4);
  const real mu = cfg.num("mu", 1.0), x = cfg.num("x", 0.8);
  const int p = cfg.integer("momentum", 0);
  require(p == 0, "only the p = 0 baryon is available from the ground-state solver");
  const BaryonSetup s = baryon_setup(N, mu, x);
  const real t_max = cfg.num("t_max", 10.0), t_step = cfg.num("t_step", 0.1);
  std::vector<real> ts;
  const int nt = static_cast<int>(std::floor(t_max / t_step + 1e-9));
  for (int i = 0; i <= nt; ++i) ts.push_back(i * t_step);
  const int muI = cfg.integer("mu_index", 0), nuI = cfg.integer("nu_index", 0);
  const real om_max = cfg.num("omega_max", 10.0);
  const int nom = cfg.integer("omega_samples", 101);
  std::vector<real> omegas;
  for (int i = 0; i < nom; ++i) omegas.push_back(nom == 1 ? 0.0 : om_max * i / (nom - 1));
  std::vector<int> ks;
  for (int k = 0; k < N / 2; ++k) ks.push_back(k);
  const Window w = cfg.str("window", "rectangular") == "hann" ? Window::hann : Window::rectangular;
  const std::string stem = cfg.str("output", "hadronic");
  const fs::path pt = ctx.out_dir / (stem + "_W_xt.csv");
  const fs::path pf = ctx.out_dir / (stem + "_W_kw.csv");
  auto ot = detail::open_out(pt);
  auto of = detail::open_out(pf);
  ot << "# lgtsim hadronic-tensor W(x,t) v1 N=" << N << " mu=" << detail::fmt(mu) << " x=" << detail::fmt(x)
     << "\nbackend,mu,nu,x,t,W\n";
  of << "# lgtsim hadronic-tensor W(k,omega) v1 N=" << N << " window=" << cfg.str("window", "rectangular")
     << "\nbackend,mu,nu,k,omega,reW,imW\n";
  for (const auto& b : backends_of(cfg, "both")) {
    EvolutionBackend be;
    be.kind = b == "exact" ? EvolutionBackend::Kind::exact : EvolutionBackend::Kind::trotter;
    be.dt = cfg.num("dt", 0.02);
    be.order = cfg.integer("order", 2);
    be.tol = cfg.num("tol", 1e-11);
    CorrelatorTable tab = hadronic_correlator(s.cm, s.target, be, muI, nuI, ts, p);
    if (!tab.W.allFinite()) throw numeric_failure("non-finite correlator");
    hadronic_ft(tab, ks, omegas, w);
    for (std::size_t X = 0; X < tab.xs.size(); ++X)
      for (std::size_t i = 0; i < ts.size(); ++i)
        ot << b << ',' << muI << ',' << nuI << ',' << tab.xs[X] << ',' << detail::fmt(ts[i]) << ','
           << detail::fmt(tab.W(static_cast<index_t>(X), static_cast<index_t>(i))) << "\n";
    for (std::size_t a = 0; a < ks.size(); ++a)
      for (std::size_t o = 0; o < omegas.size(); ++o) {
        const cplx v = tab.W_ft(static_cast<index_t>(a), static_cast<index_t>(o));
        of << b << ',' << muI << ',' << nuI << ',' << ks[a] << ',' << detail::fmt(omegas[o]) << ',' << detail::fmt(v.real()) << ','
           << detail::fmt(v.imag()) << "\n";
      }
  }
  return {pt, pf};
}

inline std::vector<fs::path> run_experiment(const Config& cfg, const RunContext& ctx) {
  validate_config(cfg);
  const std::string id = cfg.str("experiment");
  if (id == "ahm-quench") return run_ahm_quench(cfg, ctx);
  if (id == "d-scaling") return run_d_scaling(cfg, ctx);
  if (id == "resources") return run_resources(cfg, ctx);
  if (id == "baryon-prep") return run_baryon_prep(cfg, ctx);
  return run_hadronic(cfg, ctx);
}

}  // namespace lgtsim
