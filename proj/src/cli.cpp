#include "spnjd/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "spnjd/catalog.hpp"
#include "spnjd/error.hpp"
#include "spnjd/exact.hpp"
#include "spnjd/fluid.hpp"
#include "spnjd/jump_sde.hpp"
#include "spnjd/model_io.hpp"
#include "spnjd/stats.hpp"
#include "spnjd/structural.hpp"

namespace spnjd::cli {

namespace {

using ojson = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PlaceSummary {
  std::string place;
  double mean = 0.0;
  double halfwidth = 0.0;
  double min = 0.0;
  double max = 0.0;
  EmpiricalPmf pmf;
};

struct EngineReport {
  std::string engine;
  std::vector<PlaceSummary> places;
  std::vector<std::vector<double>> endpoints;  // [run][place]
  std::vector<double> trace_times;
  std::vector<std::vector<std::vector<double>>> trace;  // [run][sample][place]
  std::vector<std::vector<double>> trajectory;  // ode: rows of time + places
  ojson diagnostics = ojson::object();
};

std::string_view command_name(Command c) {
  switch (c) {
    case Command::semiflows: return "semiflows";
    case Command::ode: return "ode";
    case Command::sde: return "sde";
    case Command::ssa: return "ssa";
    case Command::ctmc: return "ctmc";
    case Command::compare: return "compare";
  }
  return "?";
}

PlaceSummary summarize_samples(const std::string& place, const std::vector<double>& values, Count lo, Count hi,
                               double level) {
  PlaceSummary s;
  s.place = place;
  if (values.size() >= 2) {
    const MeanCI ci = mean_ci(values, level);
    s.mean = ci.mean;
    s.halfwidth = ci.halfwidth;
  } else {
    s.mean = values.front();
  }
  auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  s.min = *mn;
  s.max = *mx;
  s.pmf = histogram(values, lo, hi);
  return s;
}

PlaceBounds bounds_for(const SpnModel& model, const SemiflowBasis& basis, const RunRequest& req) {
  return place_bounds(model, basis, req.exact_bounds ? BoundsMode::exact : BoundsMode::semiflow, req.cap);
}

EngineReport run_sde(const SpnModel& model, const RunRequest& req) {
  const SemiflowBasis basis = minimal_psemiflows(model);
  const PlaceBounds bounds = bounds_for(model, basis, req);
  const JumpDiffusionSolver solver(model, basis, bounds);
  SdeRunConfig cfg;
  cfg.step = req.step;
  cfg.runs = req.runs;
  cfg.t_final = req.t_final;
  cfg.seed = req.seed;
  cfg.trace_every = req.trace_every;
  const Ensemble ens = solve_ensemble(solver, cfg, req.workers);

  EngineReport rep;
  rep.engine = "sde";
  for (std::size_t p = 0; p < model.num_places(); ++p)
    rep.places.push_back(
        summarize_samples(model.place_names()[p], ens.final_values(p), bounds.min[p], bounds.max[p], req.level));
  for (const auto& s : ens.final_states) rep.endpoints.push_back(s.values);
  rep.trace_times = ens.sample_times;
  for (const auto& run : ens.samples) {
    rep.trace.emplace_back();
    for (const auto& s : run) rep.trace.back().push_back(s.values);
  }
  ojson jumps = ojson::object();
  for (std::size_t t = 0; t < model.num_transitions(); ++t) jumps[model.transition_names()[t]] = ens.diagnostics.jumps[t];
  rep.diagnostics["steps"] = ens.diagnostics.steps;
  rep.diagnostics["jumps"] = jumps;
  rep.diagnostics["box_clamps"] = ens.diagnostics.box_clamps;
  rep.diagnostics["sigma_clamps"] = ens.diagnostics.sigma_clamps;
  rep.diagnostics["fallback_projections"] = ens.diagnostics.fallback_projections;
  return rep;
}

EngineReport run_ssa(const SpnModel& model, const RunRequest& req) {
  std::vector<double> times;
  if (req.trace_every > 0.0) {
    SdeRunConfig grid;
    grid.t_final = req.t_final;
    grid.trace_every = req.trace_every;
    times = grid.sample_times();
  }
  const SsaEnsemble ens = ssa_ensemble(model, req.t_final, req.runs, req.seed, times, req.workers);
  EngineReport rep;
  rep.engine = "ssa";
  for (std::size_t p = 0; p < model.num_places(); ++p) {
    const auto values = ens.final_values(p);
    auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    rep.places.push_back(summarize_samples(model.place_names()[p], values, static_cast<Count>(*mn),
                                           static_cast<Count>(*mx), req.level));
  }
  for (const auto& m : ens.final_states) rep.endpoints.emplace_back(m.counts.begin(), m.counts.end());
  rep.trace_times = ens.sample_times;
  for (const auto& run : ens.samples) {
    rep.trace.emplace_back();
    for (const auto& m : run) rep.trace.back().emplace_back(m.counts.begin(), m.counts.end());
  }
  ojson firings = ojson::object();
  for (std::size_t t = 0; t < model.num_transitions(); ++t) firings[model.transition_names()[t]] = ens.firings[t];
  rep.diagnostics["firings"] = firings;
  return rep;
}

EngineReport run_ctmc(const SpnModel& model, const RunRequest& req) {
  const ReachabilityGraph rg = build_reachability(model, req.cap);
  const StateDistribution dist = transient_uniformization(rg, req.t_final, req.tolerance);
  EngineReport rep;
  rep.engine = "ctmc";
  for (std::size_t p = 0; p < model.num_places(); ++p) {
    PlaceSummary s;
    s.place = model.place_names()[p];
    s.pmf = marginal(dist, rg, p);
    s.mean = s.pmf.mean();
    s.min = static_cast<double>(s.pmf.support.front());
    s.max = static_cast<double>(s.pmf.support.back());
    rep.places.push_back(std::move(s));
  }
  rep.diagnostics["states"] = rg.size();
  rep.diagnostics["edges"] = rg.num_edges();
  return rep;
}

EngineReport run_ode(const SpnModel& model, const RunRequest& req) {
  const Trajectory traj = solve_ode(model, req.t_final, req.step);
  EngineReport rep;
  rep.engine = "ode";
  const FluidState& last = traj.states.back();
  for (std::size_t p = 0; p < model.num_places(); ++p) {
    PlaceSummary s;
    s.place = model.place_names()[p];
    s.mean = s.min = s.max = last[p];
    s.pmf = EmpiricalPmf::from_pairs({{static_cast<Count>(std::llround(last[p])), 1.0}}, 1);
    rep.places.push_back(std::move(s));
  }
  double next_out = 0.0;
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const bool is_last = k + 1 == traj.times.size();
    if (req.output_every > 0.0 && !is_last && traj.times[k] + 1e-12 < next_out) continue;
    std::vector<double> row{traj.times[k]};
    row.insert(row.end(), traj.states[k].values.begin(), traj.states[k].values.end());
    rep.trajectory.push_back(std::move(row));
    next_out = traj.times[k] + req.output_every;
  }
  rep.diagnostics["negative_clamps"] = traj.negative_clamps;
  return rep;
}

EngineReport run_engine(const std::string& engine, const SpnModel& model, const RunRequest& req) {
  if (engine == "sde") return run_sde(model, req);
  if (engine == "ssa") return run_ssa(model, req);
  if (engine == "ctmc") return run_ctmc(model, req);
  if (engine == "ode") return run_ode(model, req);
  throw UsageError("unknown engine '" + engine + "' (expected ode, sde, ssa or ctmc)");
}

// ---- writers --------------------------------------------------------------

class Output {
 public:
  Output(const RunRequest& req, std::ostream& out) : req_(req), out_(out) {
    if (req.out_dir) std::filesystem::create_directories(*req.out_dir);
  }

  bool to_files() const { return req_.out_dir.has_value(); }

  void write(const std::string& name, const std::string& content, bool primary) {
    if (to_files()) {
      std::ofstream f(*req_.out_dir / name, std::ios::binary);
      if (!f) throw EngineError("cannot write " + (*req_.out_dir / name).string());
      f << content;
    } else if (primary) {
      out_ << content;
    }
  }

 private:
  const RunRequest& req_;
  std::ostream& out_;
};

std::string csv_row(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += cells[i];
  }
  return line + "\n";
}

std::string summary_csv(const EngineReport& rep) {
  std::string s = "place,mean,ci_halfwidth,min,max\n";
  for (const auto& p : rep.places)
    s += csv_row({p.place, format_number(p.mean), format_number(p.halfwidth), format_number(p.min), format_number(p.max)});
  return s;
}

std::string pmf_csv(const EmpiricalPmf& pmf) {
  std::string s = "value,mass\n";
  for (std::size_t i = 0; i < pmf.support.size(); ++i)
    s += csv_row({std::to_string(pmf.support[i]), format_number(pmf.mass[i])});
  return s;
}

std::string places_header(const SpnModel& model, const std::string& lead) {
  std::string h = lead;
  for (const auto& p : model.place_names()) h += "," + p;
  return h + "\n";
}

ojson pmf_json(const std::string& place, const EmpiricalPmf& pmf) {
  ojson j;
  j["place"] = place;
  j["support"] = pmf.support;
  j["mass"] = pmf.mass;
  return j;
}

ojson report_json(const EngineReport& rep, const RunRequest& req) {
  ojson j;
  j["command"] = command_name(req.command);
  j["engine"] = rep.engine;
  j["model"] = req.model;
  if (rep.engine == "sde" || rep.engine == "ssa") {
    j["seed"] = req.seed;
    j["runs"] = req.runs;
  }
  j["t_final"] = req.t_final;
  if (rep.engine == "sde" || rep.engine == "ode") j["step"] = req.step;
  j["summary"] = ojson::array();
  for (const auto& p : rep.places)
    j["summary"].push_back({{"place", p.place}, {"mean", p.mean}, {"ci_halfwidth", p.halfwidth}, {"min", p.min}, {"max", p.max}});
  j["pmfs"] = ojson::array();
  for (const auto& p : rep.places) j["pmfs"].push_back(pmf_json(p.place, p.pmf));
  j["diagnostics"] = rep.diagnostics;
  return j;
}

void emit_engine(const EngineReport& rep, const SpnModel& model, const RunRequest& req, Output& out) {
  if (req.format == OutputFormat::json) {
    out.write("report.json", report_json(rep, req).dump(2) + "\n", true);
  } else if (rep.engine == "ode") {
    std::string s = places_header(model, "time");
    for (const auto& row : rep.trajectory) {
      std::vector<std::string> cells;
      for (double v : row) cells.push_back(format_number(v));
      s += csv_row(cells);
    }
    out.write("trajectory.csv", s, true);
  } else {
    out.write("summary.csv", summary_csv(rep), true);
  }
  if (!out.to_files()) return;

  if (rep.engine == "ode" && req.format == OutputFormat::json) {
    std::string s = places_header(model, "time");
    for (const auto& row : rep.trajectory) {
      std::vector<std::string> cells;
      for (double v : row) cells.push_back(format_number(v));
      s += csv_row(cells);
    }
    out.write("trajectory.csv", s, false);
  }
  if (rep.engine != "ode") {
    if (req.format == OutputFormat::json) out.write("summary.csv", summary_csv(rep), false);
    for (const auto& p : rep.places) out.write("pmf_" + p.place + ".csv", pmf_csv(p.pmf), false);
  }
  if (!rep.endpoints.empty()) {
    std::string s = places_header(model, "run");
    for (std::size_t r = 0; r < rep.endpoints.size(); ++r) {
      std::vector<std::string> cells{std::to_string(r)};
      for (double v : rep.endpoints[r]) cells.push_back(format_number(v));
      s += csv_row(cells);
    }
    out.write("endpoints.csv", s, false);
  }
  if (!rep.trace.empty()) {
    std::string s = places_header(model, "run,time");
    for (std::size_t r = 0; r < rep.trace.size(); ++r)
      for (std::size_t k = 0; k < rep.trace[r].size(); ++k) {
        std::vector<std::string> cells{std::to_string(r), format_number(rep.trace_times[k])};
        for (double v : rep.trace[r][k]) cells.push_back(format_number(v));
        s += csv_row(cells);
      }
    out.write("trace.csv", s, false);
  }
}

int run_semiflows(const SpnModel& model, const RunRequest& req, Output& out) {
  const SemiflowBasis basis = minimal_psemiflows(model);
  const DependenceReport dep = classify_density_dependence(model, basis);
  std::optional<PlaceBounds> bounds;
  if (dep.covered || req.exact_bounds) bounds = bounds_for(model, basis, req);

  if (req.format == OutputFormat::json) {
    ojson j;
    j["command"] = "semiflows";
    j["model"] = req.model;
    j["places"] = model.place_names();
    j["semiflows"] = ojson::array();
    for (std::size_t k = 0; k < basis.size(); ++k)
      j["semiflows"].push_back({{"vector", basis.vectors[k]}, {"constant", basis.constants[k]}});
    j["covered"] = dep.covered;
    j["classification"] = to_string(dep.classification);
    j["nonunit_arcs"] = ojson::array();
    for (const auto& [p, t] : dep.nonunit_arcs)
      j["nonunit_arcs"].push_back({{"place", model.place_names()[p]}, {"transition", model.transition_names()[t]}});
    if (bounds) {
      j["bounds"] = ojson::array();
      for (std::size_t p = 0; p < model.num_places(); ++p)
        j["bounds"].push_back({{"place", model.place_names()[p]}, {"min", bounds->min[p]}, {"max", bounds->max[p]},
                               {"provenance", bounds->provenance[p] == BoundProvenance::semiflow ? "semiflow" : "reachability"}});
    }
    out.write("semiflows.json", j.dump(2) + "\n", true);
    return kOk;
  }

  std::string s = places_header(model, "semiflow");
  s.insert(s.size() - 1, ",constant");
  for (std::size_t k = 0; k < basis.size(); ++k) {
    std::vector<std::string> cells{std::to_string(k)};
    for (Count v : basis.vectors[k]) cells.push_back(std::to_string(v));
    cells.push_back(std::to_string(basis.constants[k]));
    s += csv_row(cells);
  }
  std::string b = "place,min,max,provenance\n";
  if (bounds)
    for (std::size_t p = 0; p < model.num_places(); ++p)
      b += csv_row({model.place_names()[p], std::to_string(bounds->min[p]), std::to_string(bounds->max[p]),
                    bounds->provenance[p] == BoundProvenance::semiflow ? "semiflow" : "reachability"});
  if (out.to_files()) {
    out.write("semiflows.csv", s, true);
    out.write("bounds.csv", b, false);
  } else {
    out.write("", s + "\n" + b + "\nclassification," + std::string(to_string(dep.classification)) + "\n", true);
  }
  return kOk;
}

int run_compare(const SpnModel& model, const RunRequest& req, Output& out) {
  if (req.engines.size() != 2) throw UsageError("compare needs exactly two engines");
  const EngineReport a = run_engine(req.engines[0], model, req);
  const EngineReport b = run_engine(req.engines[1], model, req);
  if (req.format == OutputFormat::json) {
    ojson j;
    j["command"] = "compare";
    j["model"] = req.model;
    j["engines"] = req.engines;
    j["seed"] = req.seed;
    j["places"] = ojson::array();
    for (std::size_t p = 0; p < a.places.size(); ++p) {
      const auto& pa = a.places[p];
      const auto& pb = b.places[p];
      const MeanCI ca{pa.mean, pa.halfwidth}, cb{pb.mean, pb.halfwidth};
      j["places"].push_back({{"place", pa.place},
                             {"mean_a", pa.mean},
                             {"ci_halfwidth_a", pa.halfwidth},
                             {"mean_b", pb.mean},
                             {"ci_halfwidth_b", pb.halfwidth},
                             {"mean_diff", pa.mean - pb.mean},
                             {"ci_overlap", ca.overlaps(cb)},
                             {"tv_distance", total_variation(pa.pmf, pb.pmf)}});
    }
    out.write("compare.json", j.dump(2) + "\n", true);
    return kOk;
  }
  std::string s = "place,mean_a,ci_halfwidth_a,mean_b,ci_halfwidth_b,mean_diff,ci_overlap,tv_distance\n";
  for (std::size_t p = 0; p < a.places.size(); ++p) {
    const auto& pa = a.places[p];
    const auto& pb = b.places[p];
    const MeanCI ca{pa.mean, pa.halfwidth}, cb{pb.mean, pb.halfwidth};
    s += csv_row({pa.place, format_number(pa.mean), format_number(pa.halfwidth), format_number(pb.mean),
                  format_number(pb.halfwidth), format_number(pa.mean - pb.mean), ca.overlaps(cb) ? "true" : "false",
                  format_number(total_variation(pa.pmf, pb.pmf))});
  }
  out.write("compare.csv", s, true);
  return kOk;
}

}  // namespace

std::string format_number(double x) {
  if (x == 0.0) return "0";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) return "nan";
  return std::string(buf, end);
}

SpnModel load_model(const std::string& spec, std::optional<Count> scale) {
  SpnModel model = [&] {
    std::error_code ec;
    if (std::filesystem::is_regular_file(spec, ec)) return parse_model_file(spec);
    if (auto entry = find_model(spec)) return entry->model;
    throw ModelError("model", "no model file or bundled model named '" + spec + "'");
  }();
  if (scale) {
    if (!model.alpha()) throw ModelError("alpha", "--scale needs a model with an alpha vector");
    model = instantiate(ScalingFamily{model, *model.alpha(), *scale});
  }
  return model;
}

int run(const RunRequest& req, std::ostream& out, std::ostream& err) {
  try {
    const SpnModel model = load_model(req.model, req.scale);
    Output sink(req, out);
    const bool stochastic = req.command == Command::sde || req.command == Command::ssa ||
                            (req.command == Command::compare &&
                             std::any_of(req.engines.begin(), req.engines.end(),
                                         [](const std::string& e) { return e == "sde" || e == "ssa"; }));
    if (stochastic) err << "seed: " << req.seed << "\n";
    switch (req.command) {
      case Command::semiflows: return run_semiflows(model, req, sink);
      case Command::compare: return run_compare(model, req, sink);
      case Command::ode: emit_engine(run_engine("ode", model, req), model, req, sink); break;
      case Command::sde: emit_engine(run_engine("sde", model, req), model, req, sink); break;
      case Command::ssa: emit_engine(run_engine("ssa", model, req), model, req, sink); break;
      case Command::ctmc: emit_engine(run_engine("ctmc", model, req), model, req, sink); break;
    }
    return kOk;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ModelError& e) {
    err << "model error: " << e.what() << "\n";
    return kModelInvalid;
  } catch (const SyntaxError& e) {
    err << "model error: " << e.what() << "\n";
    return kModelInvalid;
  } catch (const std::exception& e) {
    err << "engine error: " << e.what() << "\n";
    return kEngineFailure;
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stochastic Petri net analysis: semiflows, ODE, jump-diffusion SDE, SSA and transient CTMC"};
  app.require_subcommand(1);
  RunRequest req;
  std::string format = "csv";
  std::string out_dir;

  auto common = [&](CLI::App* sub, bool stochastic, bool timed) {
    sub->add_option("--model,-m", req.model, "Model file (JSON) or bundled model name")->required();
    sub->add_option("--scale", req.scale, "Instantiate initial marking as N * alpha");
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--out", out_dir, "Write output files into this directory");
    sub->add_option("--cap", req.cap, "State cap for reachability enumeration");
    sub->add_flag("--exact-bounds", req.exact_bounds, "Place bounds from the reachability set");
    if (timed) sub->add_option("--t-final", req.t_final, "Final time")->required();
    if (stochastic) {
      sub->add_option("--runs", req.runs, "Number of independent runs");
      sub->add_option("--seed", req.seed, "Random seed (default 42)");
      sub->add_option("--workers", req.workers, "Worker threads (default: SPNJD_WORKERS or all cores)");
      sub->add_option("--level", req.level, "Confidence level for mean intervals");
      sub->add_option("--trace-every", req.trace_every, "Record per-run trajectories at this interval");
    }
  };

  auto* semi = app.add_subcommand("semiflows", "Minimal P-semiflows, place bounds and density-dependence class");
  common(semi, false, false);
  auto* ode = app.add_subcommand("ode", "Deterministic fluid limit (RK4)");
  common(ode, false, true);
  ode->add_option("--step", req.step, "Integration step");
  ode->add_option("--output-every", req.output_every, "Thin trajectory output to this interval");
  auto* sde = app.add_subcommand("sde", "Jump-diffusion approximation (extended Euler-Maruyama)");
  common(sde, true, true);
  sde->add_option("--step", req.step, "Maximum Euler-Maruyama step");
  auto* ssa = app.add_subcommand("ssa", "Gillespie stochastic simulation");
  common(ssa, true, true);
  auto* ctmc = app.add_subcommand("ctmc", "Transient CTMC solution by uniformization");
  common(ctmc, false, true);
  ctmc->add_option("--tol", req.tolerance, "Truncated Poisson mass");
  auto* cmp = app.add_subcommand("compare", "Compare two engines (ode, sde, ssa, ctmc) at the final time");
  common(cmp, true, true);
  cmp->add_option("engines", req.engines, "Two engine names")->required()->expected(2);
  cmp->add_option("--step", req.step, "Step for ode/sde");
  cmp->add_option("--tol", req.tolerance, "Truncated Poisson mass for ctmc");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }

  if (semi->parsed()) req.command = Command::semiflows;
  else if (ode->parsed()) req.command = Command::ode;
  else if (sde->parsed()) req.command = Command::sde;
  else if (ssa->parsed()) req.command = Command::ssa;
  else if (ctmc->parsed()) req.command = Command::ctmc;
  else req.command = Command::compare;
  req.format = format == "json" ? OutputFormat::json : OutputFormat::csv;
  if (!out_dir.empty()) req.out_dir = out_dir;

  if (req.command != Command::semiflows) {
    if (req.t_final < 0.0) return err << "usage error: --t-final must be >= 0\n", kUsage;
    if (!(req.step > 0.0)) return err << "usage error: --step must be > 0\n", kUsage;
    if (req.runs < 1) return err << "usage error: --runs must be >= 1\n", kUsage;
  }
  return run(req, out, err);
}

}  // namespace spnjd::cli
