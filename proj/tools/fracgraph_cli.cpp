// fracgraph: command-line driver for the library.

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <string>
#include <vector>

#include "fracgraph/consensus.hpp"
#include "fracgraph/decay.hpp"
#include "fracgraph/generators.hpp"
#include "fracgraph/io.hpp"
#include "fracgraph/superdiff.hpp"
#include "fracgraph/walks.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace fracgraph;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Common {
  std::uint64_t seed = 1;
  std::string out_dir;
  std::string format = "csv";
  std::string out;
  bool force_dense = false;
  std::size_t dense_limit = 2000;
};

struct GraphArgs {
  std::string input;
  std::string builtin;
  bool one_based = false;
  bool undirected = false;
  std::string lcc = "none";
};

// Everything a subcommand produced, for the manifest.
struct RunLog {
  std::map<std::string, std::string> inputs;
  std::vector<std::string> outputs;
  json extra = json::object();
};

class Driver {
 public:
  Common common;
  RunLog log;

  fs::path out_dir() const {
    if (!common.out_dir.empty()) return common.out_dir;
    if (const char* e = std::getenv("FRACGRAPH_OUT_DIR"); e && *e) return e;
    return ".";
  }

  fs::path output_path(const std::string& stem, const std::string& ext) const {
    if (!common.out.empty()) {
      fs::path p(common.out);
      return p.is_absolute() ? p : out_dir() / p;
    }
    return out_dir() / (stem + "." + ext);
  }

  fs::path side_path(const std::string& name) const { return out_dir() / name; }

  std::ofstream open(const fs::path& p) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary);
    if (!f) throw InputError("cannot write '" + p.string() + "'");
    log.outputs.push_back(p.string());
    return f;
  }

  void write_matrix(const Eigen::MatrixXd& m, const std::string& stem) {
    const auto& fmt = common.format;
    auto f = open(output_path(stem, fmt == "mm" ? "mtx" : fmt));
    if (fmt == "csv") {
      io::write_csv(f, m);
    } else if (fmt == "mm") {
      io::write_matrix_market(f, m);
    } else {
      json j;
      j["rows"] = m.rows();
      j["cols"] = m.cols();
      j["data"] = json::array();
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json r = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) r.push_back(m(i, k));
        j["data"].push_back(std::move(r));
      }
      f << j.dump(1) << '\n';
    }
  }

  void write_table(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows,
                   const std::string& stem, const json& summary = json::object()) {
    const auto& fmt = common.format;
    if (fmt == "mm") throw InputError("--format mm applies to matrix outputs only");
    auto f = open(output_path(stem, fmt));
    if (fmt == "csv") {
      io::write_table(f, header, rows);
    } else {
      json j = summary;
      j["columns"] = header;
      j["rows"] = rows;
      f << j.dump(1) << '\n';
    }
  }

  void write_json(const json& j, const std::string& name) {
    auto f = open(side_path(name));
    f << j.dump(1) << '\n';
  }

  Graph load_graph(const GraphArgs& ga) {
    if (ga.input.empty() == ga.builtin.empty()) throw InputError("give exactly one of --input or --builtin");
    Graph g;
    if (!ga.input.empty()) {
      if (!fs::exists(ga.input)) throw InputError("input file '" + ga.input + "' not found");
      log.inputs[ga.input] = io::file_digest(ga.input);
      g = load_edge_list(ga.input, {ga.one_based, ga.undirected});
    } else {
      g = builtin_graph(ga.builtin);
    }
    if (ga.lcc == "weak") g = largest_connected_component(g, Connectivity::Weak);
    else if (ga.lcc == "strong") g = largest_connected_component(g, Connectivity::Strong);
    if (g.n() > common.dense_limit && !common.force_dense)
      throw InputError("graph has " + std::to_string(g.n()) + " nodes, above the dense limit of " +
                       std::to_string(common.dense_limit) + "; pass --force-dense");
    log.extra["nodes"] = g.n();
    log.extra["directed"] = g.directed();
    return g;
  }

  // name:args, e.g. path:10, dcycle:32, grid:45x45, rgg:500:0.1, random:100, digraph:100
  Graph builtin_graph(const std::string& spec) {
    auto colon = spec.find(':');
    std::string name = spec.substr(0, colon);
    std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
    auto num = [&](const std::string& s) -> std::size_t {
      try {
        std::size_t used = 0;
        long long v = std::stoll(s, &used);
        if (used != s.size() || v <= 0) throw std::invalid_argument(s);
        return std::size_t(v);
      } catch (const std::exception&) {
        throw InputError("bad builtin graph size in '" + spec + "'");
      }
    };
    if (name == "path") return gen::path(num(rest));
    if (name == "dpath") return gen::path(num(rest), true);
    if (name == "cycle") return gen::cycle(num(rest));
    if (name == "dcycle") return gen::cycle(num(rest), true);
    if (name == "star") return gen::star(num(rest));
    if (name == "complete") return gen::complete(num(rest));
    if (name == "grid") {
      auto x = rest.find('x');
      if (x == std::string::npos) throw InputError("grid needs RxC");
      return gen::grid(num(rest.substr(0, x)), num(rest.substr(x + 1)));
    }
    if (name == "rgg") {
      auto c2 = rest.find(':');
      double r = c2 == std::string::npos ? 0.1 : std::stod(rest.substr(c2 + 1));
      return gen::random_geometric(num(rest.substr(0, c2)), r, common.seed);
    }
    if (name == "random") return gen::random_connected(num(rest), common.seed);
    if (name == "digraph") return gen::random_digraph(num(rest), common.seed);
    throw InputError("unknown builtin graph '" + name + "'");
  }
};

void add_graph_flags(CLI::App* sc, GraphArgs& ga) {
  sc->add_option("--input", ga.input, "edge-list file (src dst [weight])");
  sc->add_option("--builtin", ga.builtin,
                 "path:N dpath:N cycle:N dcycle:N star:N complete:N grid:RxC rgg:N[:r] random:N digraph:N");
  sc->add_flag("--one-based", ga.one_based, "node ids start at 1");
  sc->add_flag("--undirected", ga.undirected, "symmetrize the edge list");
  sc->add_option("--lcc", ga.lcc, "restrict to the largest component")
      ->check(CLI::IsMember({"none", "weak", "strong"}));
}

// %g form for column and file names.
std::string short_label(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

LaplacianKind parse_kind(const std::string& s) { return laplacian_kind_from_string(s); }

std::vector<double> log_grid(double lo, double hi, std::size_t points) {
  if (!(lo > 0 && hi >= lo) || points < 2) throw InputError("bad time grid");
  std::vector<double> t;
  for (std::size_t i = 0; i < points; ++i)
    t.push_back(lo * std::pow(hi / lo, double(i) / double(points - 1)));
  return t;
}

std::vector<double> lin_grid(double lo, double hi, std::size_t points) {
  if (!(hi >= lo) || points < 2) throw InputError("bad grid");
  std::vector<double> t;
  for (std::size_t i = 0; i < points; ++i) t.push_back(lo + (hi - lo) * double(i) / double(points - 1));
  return t;
}

json collect_parameters(const CLI::App* sc) {
  json p = json::object();
  for (const auto* opt : sc->get_options()) {
    if (opt == sc->get_help_ptr()) continue;
    std::string name = opt->get_name(false, true);
    if (name.empty()) continue;
    while (!name.empty() && name.front() == '-') name.erase(name.begin());
    auto pos = name.find(',');
    if (pos != std::string::npos) name = name.substr(0, pos);
    if (opt->count() > 0) {
      auto r = opt->results();
      p[name] = r.size() == 1 ? json(r.front()) : json(r);
    } else {
      p[name] = opt->get_default_str();
    }
  }
  return p;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fractional graph Laplacian toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  Driver drv;
  auto& cm = drv.common;

  auto common_flags = [&](CLI::App* sc) {
    sc->add_option("--seed", cm.seed, "root seed")->capture_default_str();
    sc->add_option("--out-dir", cm.out_dir, "output directory (default $FRACGRAPH_OUT_DIR or .)");
    sc->add_option("--format", cm.format, "csv, json or mm")
        ->check(CLI::IsMember({"csv", "json", "mm"}))
        ->capture_default_str();
    sc->add_option("--out", cm.out, "primary output file (relative to the output directory)");
    sc->add_flag("--force-dense", cm.force_dense, "allow graphs above the dense limit");
    sc->add_option("--dense-limit", cm.dense_limit, "node count that needs --force-dense")->capture_default_str();
  };

  GraphArgs ga;
  std::string kind = "undirected";
  bool fixup = false;
  double alpha = 0.5;
  std::map<std::string, std::function<void()>> actions;

  // laplacian
  auto* sc_lap = app.add_subcommand("laplacian", "build a graph Laplacian");
  common_flags(sc_lap);
  add_graph_flags(sc_lap, ga);
  sc_lap->add_option("--kind", kind)->capture_default_str();
  sc_lap->add_flag("--fixup", fixup, "dangling-node fixup for directed kinds");
  actions["laplacian"] = [&] {
    auto l = build_laplacian(drv.load_graph(ga), parse_kind(kind), {fixup});
    drv.write_matrix(l.entries, "laplacian");
  };

  // power
  auto* sc_pow = app.add_subcommand("power", "fractional power L^alpha");
  common_flags(sc_pow);
  add_graph_flags(sc_pow, ga);
  sc_pow->add_option("--kind", kind)->capture_default_str();
  sc_pow->add_flag("--fixup", fixup);
  sc_pow->add_option("--alpha", alpha)->capture_default_str();
  actions["power"] = [&] {
    auto fp = fractional_power(build_laplacian(drv.load_graph(ga), parse_kind(kind), {fixup}), alpha);
    drv.log.extra["method"] = fp.method;
    drv.log.extra["imag_residue"] = fp.imag_residue;
    drv.log.extra["zero_cluster_size"] = fp.zero_cluster.size();
    drv.write_matrix(fp.op.entries, "power");
  };

  // kernel
  auto* sc_ker = app.add_subcommand("kernel", "transition matrix P^(alpha)");
  common_flags(sc_ker);
  add_graph_flags(sc_ker, ga);
  sc_ker->add_option("--kind", kind)->capture_default_str();
  sc_ker->add_flag("--fixup", fixup);
  sc_ker->add_option("--alpha", alpha)->capture_default_str();
  actions["kernel"] = [&] {
    auto k = transition_kernel(fractional_power(build_laplacian(drv.load_graph(ga), parse_kind(kind), {fixup}), alpha));
    drv.log.extra["absorbing"] = k.absorbing;
    drv.write_matrix(k.P, "kernel");
  };

  // walk
  std::size_t start = 0, steps = 100;
  auto* sc_walk = app.add_subcommand("walk", "sample a discrete fractional random walk");
  common_flags(sc_walk);
  add_graph_flags(sc_walk, ga);
  sc_walk->add_option("--kind", kind)->capture_default_str();
  sc_walk->add_flag("--fixup", fixup);
  sc_walk->add_option("--alpha", alpha)->capture_default_str();
  sc_walk->add_option("--start", start)->capture_default_str();
  sc_walk->add_option("--steps", steps)->capture_default_str();
  actions["walk"] = [&] {
    auto g = drv.load_graph(ga);
    auto k = transition_kernel(fractional_power(build_laplacian(g, parse_kind(kind), {fixup}), alpha));
    auto tr = simulate_discrete(k, Eigen::Index(start), steps, cm.seed);
    std::vector<std::vector<double>> rows;
    for (std::size_t s = 0; s < tr.nodes.size(); ++s)
      rows.push_back({double(s), double(tr.nodes[s]), double(g.original_ids()[tr.nodes[s]])});
    drv.write_table({"step", "node", "original_id"}, rows, "walk");
  };

  // evolve
  double tmax = 10.0;
  std::size_t points = 11;
  bool literal = false;
  auto* sc_ev = app.add_subcommand("evolve", "continuous-time walk from a delta at --start");
  common_flags(sc_ev);
  add_graph_flags(sc_ev, ga);
  sc_ev->add_option("--kind", kind)->capture_default_str();
  sc_ev->add_flag("--fixup", fixup);
  sc_ev->add_option("--alpha", alpha)->capture_default_str();
  sc_ev->add_option("--start", start)->capture_default_str();
  sc_ev->add_option("--tmax", tmax)->capture_default_str();
  sc_ev->add_option("--points", points)->capture_default_str();
  sc_ev->add_flag("--literal", literal, "use exp(-t Lbar) u0 instead of the mass-conserving transpose");
  actions["evolve"] = [&] {
    auto g = drv.load_graph(ga);
    auto k = transition_kernel(fractional_power(build_laplacian(g, parse_kind(kind), {fixup}), alpha));
    if (start >= g.n()) throw InputError("start node out of range");
    Eigen::VectorXd u0 = Eigen::VectorXd::Zero(g.n());
    u0[Eigen::Index(start)] = 1.0;
    auto tr = evolve_continuous(k, u0, lin_grid(0.0, tmax, points), {!literal});
    std::vector<std::string> header{"t"};
    for (std::size_t i = 0; i < g.n(); ++i) header.push_back("u" + std::to_string(i));
    std::vector<std::vector<double>> rows;
    for (std::size_t s = 0; s < tr.times.size(); ++s) {
      std::vector<double> r{tr.times[s]};
      for (Eigen::Index i = 0; i < tr.states[s].size(); ++i) r.push_back(tr.states[s][i]);
      rows.push_back(std::move(r));
    }
    drv.log.extra["conservation_drift"] = tr.conservation_drift;
    drv.write_table(header, rows, "evolve");
  };

  // absorb
  std::size_t nabs = 20, runs = 0;
  auto* sc_abs = app.add_subcommand("absorb", "expected absorption steps on the directed path");
  common_flags(sc_abs);
  sc_abs->add_option("--n", nabs)->capture_default_str();
  sc_abs->add_option("--alpha", alpha)->capture_default_str();
  sc_abs->add_option("--mc-runs", runs, "Monte Carlo replicas (0 = none)")->capture_default_str();
  actions["absorb"] = [&] {
    auto r = expected_absorption_steps(nabs, alpha);
    json j;
    j["n"] = nabs;
    j["alpha"] = alpha;
    j["expectation"] = r.expectation;
    j["closed_form"] = r.closed_form;
    j["fundamental"] = r.fundamental;
    j["n_step"] = r.n_step;
    if (runs > 0) {
      FractionalPowerResult fp;
      fp.op = path_fractional_entries(nabs, alpha);
      fp.alpha = alpha;
      auto mc = monte_carlo_absorption(transition_kernel(fp), 0, runs, cm.seed);
      j["mc_mean"] = mc.mean;
      j["mc_stderr"] = mc.stderr_;
      j["mc_runs"] = mc.runs;
    }
    if (cm.format == "csv") {
      std::vector<std::vector<double>> row{{double(nabs), alpha, r.expectation, double(r.n_step)}};
      drv.write_table({"n", "alpha", "expectation", "n_step"}, row, "absorb");
    } else if (cm.format == "json") {
      auto f = drv.open(drv.output_path("absorb", "json"));
      f << j.dump(1) << '\n';
    } else {
      throw InputError("--format mm applies to matrix outputs only");
    }
    std::cout << j.dump() << '\n';
  };

  // decay
  std::optional<double> tdecay;
  std::string pairs = "all";
  bool kernel_bound = false;
  auto* sc_dec = app.add_subcommand("decay", "check the power-law decay bounds");
  common_flags(sc_dec);
  add_graph_flags(sc_dec, ga);
  sc_dec->add_option("--alpha", alpha)->capture_default_str();
  sc_dec->add_option("--t", tdecay, "exponential case exp(-t L^alpha)");
  sc_dec->add_option("--pairs", pairs, "all or sampled:<k>")->capture_default_str();
  sc_dec->add_flag("--kernel", kernel_bound, "check the P^(alpha) bound instead");
  actions["decay"] = [&] {
    auto g = drv.load_graph(ga);
    auto l = build_laplacian(g, LaplacianKind::UndirectedCombinatorial);
    DecayOptions opt;
    opt.keep_records = true;
    opt.seed = cm.seed;
    if (pairs.rfind("sampled:", 0) == 0) {
      opt.sample_pairs = std::stoul(pairs.substr(8));
    } else if (pairs != "all") {
      throw InputError("--pairs must be all or sampled:<k>");
    }
    DecayReport rep;
    if (kernel_bound) {
      auto k = transition_kernel(fractional_power_symmetric(l, alpha));
      rep = verify_p_alpha_bound(k, l, alpha, opt);
    } else {
      rep = verify_decay_bounds(l, alpha, tdecay ? DecayMode::exponential(*tdecay) : DecayMode::power(), opt);
    }
    std::vector<std::vector<double>> rows;
    for (const auto& r : rep.records)
      rows.push_back({double(r.i), double(r.j), double(r.d), r.observed, r.bound, r.ok ? 1.0 : 0.0});
    drv.write_table({"i", "j", "d", "observed", "bound", "ok"}, rows, "decay");
    json s;
    s["c"] = rep.c;
    s["rho"] = rep.rho;
    s["alpha"] = rep.alpha;
    if (rep.t) s["t"] = *rep.t;
    s["pairs_checked"] = rep.pairs_checked;
    s["violations"] = rep.violations;
    s["ordering_violations"] = rep.ordering_violations;
    s["max_ratio"] = rep.max_ratio;
    if (kernel_bound) s["min_diagonal_margin"] = rep.min_diagonal_margin;
    s["all_satisfied"] = rep.all_satisfied();
    drv.write_json(s, "decay_summary.json");
    drv.log.extra["all_satisfied"] = rep.all_satisfied();
  };

  // frange
  int angles = 360;
  auto* sc_fr = app.add_subcommand("frange", "numerical range boundary of a Laplacian");
  common_flags(sc_fr);
  add_graph_flags(sc_fr, ga);
  sc_fr->add_option("--kind", kind)->capture_default_str();
  sc_fr->add_flag("--fixup", fixup);
  sc_fr->add_option("--angles", angles)->capture_default_str();
  actions["frange"] = [&] {
    auto nr = numerical_range_profile(build_laplacian(drv.load_graph(ga), parse_kind(kind), {fixup}), angles);
    std::vector<std::vector<double>> rows;
    for (int k = 0; k < angles; ++k)
      rows.push_back({2.0 * std::numbers::pi * k / angles, nr.boundary[k].real(), nr.boundary[k].imag(), nr.support[k]});
    json s;
    s["min_real"] = nr.min_real;
    drv.write_table({"theta", "re", "im", "support"}, rows, "frange", s);
    drv.log.extra["min_real"] = nr.min_real;
  };

  // returnprob
  double tlo = 1e-2;
  auto* sc_rp = app.add_subcommand("returnprob", "average return probability curve");
  common_flags(sc_rp);
  add_graph_flags(sc_rp, ga);
  sc_rp->add_option("--kind", kind)->capture_default_str();
  sc_rp->add_flag("--fixup", fixup);
  sc_rp->add_option("--alpha", alpha)->capture_default_str();
  sc_rp->add_option("--tmin", tlo, "smallest positive time of the log grid")->capture_default_str();
  sc_rp->add_option("--tmax", tmax)->capture_default_str();
  sc_rp->add_option("--points", points)->capture_default_str();
  actions["returnprob"] = [&] {
    auto g = drv.load_graph(ga);
    auto k = transition_kernel(fractional_power(build_laplacian(g, parse_kind(kind), {fixup}), alpha));
    DenseOperator lbar(Eigen::MatrixXd::Identity(g.n(), g.n()) - k.P);
    auto times = log_grid(tlo, tmax, points);
    times.insert(times.begin(), 0.0);
    auto c = return_probability(lbar, times);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < c.times.size(); ++i) rows.push_back({c.times[i], c.values[i]});
    std::size_t diameter = 0;
    for (std::size_t s = 0; s < g.n(); ++s)
      for (auto d : graph_distances(g, s))
        if (d != kUnreachable) diameter = std::max(diameter, d);
    json s;
    s["relative_spectral_gap"] = c.relative_spectral_gap;
    s["zero_multiplicity"] = c.zero_multiplicity;
    s["limit"] = double(c.zero_multiplicity) / double(g.n());
    s["diameter"] = diameter;
    s["eigenvector_condition"] = c.eigenvector_condition;
    s["defective_suspected"] = c.defective_suspected;
    s["max_imag_residue"] = c.max_imag_residue;
    drv.write_table({"t", "p0"}, rows, "returnprob");
    drv.write_json(s, "returnprob_summary.json");
  };

  // superdiff
  std::string orientation = "undirected";
  double tsd_min = 10.0, tsd_max = 1e4;
  std::size_t tpoints = 7;
  auto* sc_sd = app.add_subcommand("superdiff", "FWHM growth on the infinite path");
  common_flags(sc_sd);
  sc_sd->add_option("--orientation", orientation)
      ->check(CLI::IsMember({"undirected", "directed"}))
      ->capture_default_str();
  sc_sd->add_option("--alpha", alpha)->capture_default_str();
  sc_sd->add_option("--tmin", tsd_min)->capture_default_str();
  sc_sd->add_option("--tmax", tsd_max)->capture_default_str();
  sc_sd->add_option("--points", tpoints)->capture_default_str();
  actions["superdiff"] = [&] {
    auto o = orientation == "directed" ? Orientation::Directed : Orientation::Undirected;
    auto fit = superdiffusion_exponent(alpha, o, log_grid(tsd_min, tsd_max, tpoints));
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < fit.times.size(); ++i) rows.push_back({fit.times[i], fit.fwhm_squared[i], fit.exponent});
    json s;
    s["orientation"] = orientation;
    s["alpha"] = alpha;
    s["exponent"] = fit.exponent;
    s["expected"] = o == Orientation::Directed ? 2.0 / alpha : 1.0 / alpha;
    s["r2"] = fit.r2;
    drv.write_table({"t", "fwhm2", "exponent"}, rows, "superdiff", s);
    drv.write_json(s, "superdiff_summary.json");
    std::cout << s.dump() << '\n';
  };

  // stable
  double sbeta = 0.0, sgamma = 1.0, sdelta = 0.0, xmin = -5.0, xmax = 5.0;
  auto* sc_st = app.add_subcommand("stable", "stable density on a grid");
  common_flags(sc_st);
  sc_st->add_option("--alpha", alpha)->capture_default_str();
  sc_st->add_option("--beta", sbeta)->capture_default_str();
  sc_st->add_option("--gamma", sgamma)->capture_default_str();
  sc_st->add_option("--delta", sdelta)->capture_default_str();
  sc_st->add_option("--xmin", xmin)->capture_default_str();
  sc_st->add_option("--xmax", xmax)->capture_default_str();
  sc_st->add_option("--points", points)->capture_default_str();
  actions["stable"] = [&] {
    StableParams p{alpha, sbeta, sgamma, sdelta};
    std::vector<std::vector<double>> rows;
    for (double x : lin_grid(xmin, xmax, points)) rows.push_back({x, stable_density(p, x)});
    drv.write_table({"xi", "density"}, rows, "stable");
  };

  // consensus
  std::string config;
  auto* sc_cs = app.add_subcommand("consensus", "second-order fractional consensus simulation");
  common_flags(sc_cs);
  sc_cs->add_option("--config", config, "JSON config; without it the reference circle experiment runs");
  actions["consensus"] = [&] {
    json c = json::object();
    if (!config.empty()) {
      if (!fs::exists(config)) throw InputError("config file '" + config + "' not found");
      drv.log.inputs[config] = io::file_digest(config);
      std::ifstream f(config);
      try {
        c = json::parse(f);
      } catch (const json::exception& e) {
        throw InputError(std::string("bad config: ") + e.what());
      }
    }
    std::size_t n = c.value("vehicles", std::size_t(120));
    double beta = c.value("beta", 0.5);
    double horizon = c.value("horizon", 5.0);
    double step = c.value("step", 0.0);
    std::size_t every = c.value("output_every", std::size_t(50));
    std::vector<double> alphas = c.value("alpha", std::vector<double>{0.1, 0.5, 0.8, 1.0});
    std::string graph = c.value("graph", std::string("directed-cycle"));
    std::string gamma_mode = c.value("gamma", std::string("bound+1"));

    std::vector<std::vector<double>> curve_rows;
    std::vector<std::string> curve_header{"t"};
    json runs_summary = json::array();
    for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
      auto cfg = circle_experiment(alphas[ai], n, beta, horizon);
      cfg.step = step;
      cfg.output_every = every;
      if (graph != "directed-cycle") {
        if (!fs::exists(graph)) throw InputError("graph file '" + graph + "' not found");
        drv.log.inputs[graph] = io::file_digest(graph);
        cfg.graph = load_edge_list(graph);
        if (cfg.graph.n() != n) throw InputError("graph size does not match the vehicle count");
      }
      if (gamma_mode.rfind("bound+", 0) == 0) {
        cfg.gamma_margin = std::stod(gamma_mode.substr(6));
      } else {
        cfg.gamma = std::stod(gamma_mode);
      }
      auto run = simulate_consensus(cfg);
      curve_header.push_back("error_a" + short_label(alphas[ai]));
      curve_header.push_back("position_error_a" + short_label(alphas[ai]));
      for (std::size_t s = 0; s < run.states.size(); ++s) {
        if (ai == 0) curve_rows.push_back({run.states[s].t});
        curve_rows[s].push_back(run.states[s].error);
        curve_rows[s].push_back(run.states[s].position_error);
      }
      // trajectory: t, x_0, y_0, x_1, y_1, ...
      std::vector<std::string> th{"t"};
      for (std::size_t i = 0; i < n; ++i) {
        th.push_back("x" + std::to_string(i));
        th.push_back("y" + std::to_string(i));
      }
      std::vector<std::vector<double>> tr;
      for (const auto& st : run.states) {
        std::vector<double> r{st.t};
        for (std::size_t i = 0; i < n; ++i) r.push_back(st.x(i, 0)), r.push_back(st.x(i, 1));
        tr.push_back(std::move(r));
      }
      auto f = drv.open(drv.side_path("trajectory_a" + short_label(alphas[ai]) + ".csv"));
      io::write_table(f, th, tr);
      json rs;
      rs["alpha"] = alphas[ai];
      rs["gamma"] = run.gamma;
      rs["gamma_bound"] = run.bound.defined ? json(run.bound.value) : json(nullptr);
      rs["gamma_bound_note"] = run.bound.note;
      rs["initial_position_error"] = run.states.front().position_error;
      rs["final_position_error"] = run.states.back().position_error;
      rs["final_error"] = run.states.back().error;
      runs_summary.push_back(rs);
    }
    drv.write_table(curve_header, curve_rows, "consensus_error");
    drv.write_json(runs_summary, "consensus_summary.json");
    std::cout << runs_summary.dump() << '\n';
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  CLI::App* chosen = app.get_subcommands().front();
  const std::string name = chosen->get_name();
  auto t0 = std::chrono::steady_clock::now();
  int code = 0;
  try {
    actions.at(name)();
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    code = 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    code = 2;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    code = 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    code = 1;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: value out of range: " << e.what() << '\n';
    code = 1;
  } catch (const json::exception& e) {
    std::cerr << "error: bad config value: " << e.what() << '\n';
    code = 1;
  }
  double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (code != 0) return code;

  json m;
  m["subcommand"] = name;
  m["parameters"] = collect_parameters(chosen);
  m["inputs"] = drv.log.inputs;
  m["seed"] = cm.seed;
  m["version"] = kVersion;
  m["duration_s"] = dt;
  m["outputs"] = drv.log.outputs;
  m["details"] = drv.log.extra;
  try {
    fs::create_directories(drv.out_dir());
    std::ofstream f(drv.side_path("manifest.json"));
    f << m.dump(1) << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: cannot write manifest: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
