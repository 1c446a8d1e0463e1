#include "cellforge/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace cellforge {

ObjectiveWeights weights_for_set(const ObjectiveWeights& base, char set) {
  ObjectiveWeights w = base;
  switch (set) {
    case 'a': w.sgd = 0; w.dbx = 0; w.m2 = 0; break;
    case 'b': w.dbx = 0; w.m2 = 0; break;
    case 'c': w.sgd = 0; w.m2 = 0; break;
    case 'd': w.sgd = 0; w.dbx = 0; break;
    case 'e': break;
    default:
      throw std::invalid_argument("objective set must be one of a..e");
  }
  return w;
}

EncodedCell encode_for_run(const RunConfig& cfg, const Netlist& netlist) {
  Netlist folded = fold_transistors(netlist);
  EncodeOptions opts;
  opts.weights = weights_for_set(cfg.tech.weights, cfg.objective_set);
  EncodedCell ec = encode_cell(folded, cfg.tech, opts);
  if (cfg.clustering) {
    ClusterSet cs = cluster_netlist(folded, cfg.cluster_kmax, cfg.seed);
    add_cluster_constraints(ec, cs);
  }
  if (cfg.itp) add_itp_constraints(ec);
  return ec;
}

namespace {

VariantResult solve_variant(const RunConfig& cfg, const Netlist& netlist, Nm offset) {
  RunConfig vcfg = cfg;
  vcfg.tech.offset[3] = offset;
  vcfg.tech.validate();

  VariantResult out;
  out.offset = offset;
  EncodedCell ec = encode_for_run(vcfg, netlist);

  SolveResult r;
  if (!cfg.backend.empty()) {
    r = solve_external(ec.model, cfg.backend);
  } else {
    SolveRequest req;
    req.model = &ec.model;
    req.workers = cfg.workers;
    req.seed = cfg.seed;
    req.policy = cfg.policy;
    if (cfg.rlbt) req.subtree_bound = make_rlbt_hook(ec);
    r = solve(req);
    if (!r.error.empty()) throw std::runtime_error("solver rejected model: " + r.error);
  }
  out.status = r.status;
  out.objective = r.objective_bound;
  out.lower_bound = r.lower_bound;
  out.solve = r;
  if (r.has_assignment()) {
    out.layout = extract_layout(ec, r.assignment);
    out.metrics = compute_metrics(out.layout, vcfg.tech);
    out.audit = audit_layout(out.layout, vcfg.tech);
    out.has_layout = true;
  }
  return out;
}

std::string offset_tag(const TechConfig& t, Nm offset) {
  std::ostringstream os;
  os << "gr" << t.mp(1) << "_" << t.mp(3) << "_d" << offset;
  return os.str();
}

void write_bundle(const RunConfig& cfg, const std::string& cell, const VariantResult& v) {
  if (cfg.out_dir.empty()) return;
  namespace fs = std::filesystem;
  fs::path dir = fs::path(cfg.out_dir) / (cell + "." + offset_tag(cfg.tech, v.offset));
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "summary.txt");
    f << "cell " << cell << "\n";
    f << "offset " << v.offset << "\n";
    f << "status " << to_string(v.status) << "\n";
    f << "objective " << v.objective << "\n";
    f << "lower_bound " << v.lower_bound << "\n";
    if (v.has_layout) {
      f << "cw_cpp " << v.metrics.cw_cpp << "\n";
      f << "wirelength_nm " << v.metrics.wirelength_nm << "\n";
      f << "m2_tracks " << v.metrics.m2_tracks << "\n";
      f << "sgd " << v.metrics.sgd << "\n";
      f << "dbx " << v.metrics.dbx << "\n";
      f << "audit_issues " << v.audit.issues.size() << "\n";
      for (const auto& [net, n] : v.metrics.pin_access) {
        f << "pin_access " << net << " " << n << "\n";
      }
    }
  }
  if (v.has_layout) {
    std::ofstream f(dir / "cell.layout");
    f << serialize_layout(v.layout);
    if (cfg.emit_svg) {
      RunConfig vcfg = cfg;
      vcfg.tech.offset[3] = v.offset;
      std::ofstream svg(dir / "cell.svg");
      svg << render_svg(v.layout, vcfg.tech);
    }
  }
  std::ofstream tr(dir / "trace.csv");
  tr << trace_csv(v.solve.trace, cfg.wall_times);
}

}  // namespace

CellRun run_cell(const RunConfig& cfg) {
  Netlist netlist = load_netlist(cfg.netlist_path);
  CellRun run;
  run.cell = netlist.name;
  run.fet_count = static_cast<int>(netlist.transistors.size());
  run.net_count = static_cast<int>(netlist.nets().size());

  std::vector<Nm> offsets;
  if (cfg.all_offsets) {
    offsets = enumerate_offsets(cfg.tech.mp(1), cfg.tech.mp(3));
  } else {
    offsets.push_back(cfg.fixed_offset.value_or(cfg.tech.delta(3)));
  }
  for (Nm d : offsets) {
    VariantResult v = solve_variant(cfg, netlist, d);
    write_bundle(cfg, run.cell, v);
    run.variants.push_back(std::move(v));
  }
  return run;
}

std::vector<CellRun> run_batch(const RunConfig& base,
                               const std::vector<std::string>& netlists) {
  std::vector<CellRun> out;
  for (const auto& path : netlists) {
    RunConfig cfg = base;
    cfg.netlist_path = path;
    out.push_back(run_cell(cfg));
  }
  return out;
}

bool all_within_policy(const std::vector<CellRun>& runs) {
  for (const auto& run : runs) {
    for (const auto& v : run.variants) {
      if (v.status != SolveStatus::Optimal && v.status != SolveStatus::FeasibleGap) {
        return false;
      }
    }
  }
  return true;
}

std::string summary_table(const std::vector<CellRun>& runs) {
  std::ostringstream os;
  os << std::left << std::setw(14) << "Cell" << std::setw(6) << "#FET" << std::setw(6)
     << "#Net" << std::setw(8) << "Offset" << std::setw(6) << "CPP" << std::setw(10)
     << "WL(nm)" << std::setw(5) << "#M2" << std::setw(14) << "Status" << "Decisions\n";
  for (const auto& run : runs) {
    for (const auto& v : run.variants) {
      os << std::left << std::setw(14) << run.cell << std::setw(6) << run.fet_count
         << std::setw(6) << run.net_count << std::setw(8) << v.offset;
      if (v.has_layout) {
        os << std::setw(6) << v.metrics.cw_cpp << std::setw(10) << v.metrics.wirelength_nm
           << std::setw(5) << v.metrics.m2_tracks;
      } else {
        os << std::setw(6) << "-" << std::setw(10) << "-" << std::setw(5) << "-";
      }
      os << std::setw(14) << to_string(v.status) << v.solve.stats.decisions << "\n";
    }
  }
  return os.str();
}

std::vector<AblationRun> run_ablation(const RunConfig& cfg, const std::string& sets) {
  if (sets.empty()) throw std::invalid_argument("no objective sets selected");
  std::vector<AblationRun> out;
  for (char s : sets) {
    RunConfig scfg = cfg;
    scfg.objective_set = s;
    scfg.all_offsets = false;
    CellRun run = run_cell(scfg);
    const VariantResult& v = run.variants.front();
    AblationRun ar;
    ar.set = s;
    ar.status = v.status;
    if (v.has_layout) {
      ar.cw = v.metrics.cw_cpp;
      ar.wl = v.metrics.wirelength_nm;
    }
    ar.trace = v.solve.trace;
    out.push_back(std::move(ar));
    if (!cfg.out_dir.empty()) {
      namespace fs = std::filesystem;
      fs::create_directories(cfg.out_dir);
      std::ofstream f(fs::path(cfg.out_dir) /
                      ("ablation." + std::string(1, s) + ".csv"));
      f << trace_csv(out.back().trace, cfg.wall_times);
    }
  }
  // identical final width/wirelength across completed sets
  const AblationRun* ref = nullptr;
  for (const auto& ar : out) {
    if (ar.status != SolveStatus::Optimal) continue;
    if (!ref) {
      ref = &ar;
    } else if (ar.cw != ref->cw || ar.wl != ref->wl) {
      throw std::runtime_error(
          std::string("objective sets disagree on the optimum: set ") + ref->set + " got (" +
          std::to_string(ref->cw) + "," + std::to_string(ref->wl) + "), set " + ar.set +
          " got (" + std::to_string(ar.cw) + "," + std::to_string(ar.wl) + ")");
    }
  }
  return out;
}

std::string trace_csv(const std::vector<TracePoint>& trace, bool wall_times) {
  std::ostringstream os;
  os << (wall_times ? "step,objective,lower_bound,wall_s\n" : "step,objective,lower_bound\n");
  for (const auto& p : trace) {
    os << p.step << "," << p.objective << "," << p.lower_bound;
    if (wall_times) os << "," << std::fixed << std::setprecision(3) << p.wall_s;
    os << "\n";
  }
  return os.str();
}

std::string run_gr_study(const TechConfig& base, const std::vector<Nm>& m1_pitches,
                         int width_cpp) {
  std::ostringstream os;
  os << "gear-ratio study, width " << width_cpp << " CPP, poly pitch " << base.mp(1) << "\n";
  os << std::left << std::setw(10) << "mp1:mp3" << std::setw(8) << "offset" << std::setw(10)
     << "m1cols" << "alignment-legal origins (one period)\n";
  for (Nm mp3 : m1_pitches) {
    for (Nm d : enumerate_offsets(base.mp(1), mp3)) {
      TechConfig cfg = base;
      cfg.pitch[3] = mp3;
      cfg.offset[3] = d;
      cfg.validate();
      os << std::left << std::setw(10)
         << (std::to_string(base.mp(1)) + ":" + std::to_string(mp3)) << std::setw(8) << d
         << std::setw(10) << count_m1_resources(width_cpp, cfg);
      Nm period = base.mp(1) * mp3 / std::gcd(base.mp(1), mp3);
      bool first = true;
      for (Nm o = 0; o < period; o += base.mp(1)) {
        if (check_placement_alignment(width_cpp, cfg, o)) {
          os << (first ? "" : ",") << o;
          first = false;
        }
      }
      os << "\n";
    }
  }
  return os.str();
}

std::string cluster_report(const Netlist& netlist, int k_max, std::uint64_t seed) {
  Netlist folded = fold_transistors(netlist);
  ClusterSet cs = cluster_netlist(folded, k_max, seed);
  std::ostringstream os;
  os << "cell " << netlist.name << "\n";
  os << "k_min " << cs.k_min << " k_max " << cs.k_max << " seed " << cs.seed << "\n";
  for (size_t i = 0; i < cs.clusters.size(); ++i) {
    os << "cluster " << i;
    for (const auto& id : cs.clusters[i]) os << " " << id;
    os << "\n";
  }
  os << "noise";
  for (const auto& id : cs.noise) os << " " << id;
  os << "\n";
  return os.str();
}

}  // namespace cellforge
