// Command-line front end: generate | simulate | analyze | export.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "leonet/leonet.hpp"

namespace fs = std::filesystem;
using namespace leonet;

namespace {

struct CommonOptions {
  std::string scenario;
  std::string out;
  std::string format{"csv"};
  unsigned parallel{1};
};

fs::path output_dir(const CommonOptions& o) {
  if (!o.out.empty()) return o.out;
  if (const char* env = std::getenv("LEONET_OUT_DIR"); env != nullptr && *env != '\0') return env;
  return "out";
}

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--scenario", o.scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "Output directory (default: $LEONET_OUT_DIR or ./out)");
  cmd->add_option("--format", o.format, "Export format")->check(CLI::IsMember({"csv", "geojson"}));
  cmd->add_option("--parallel", o.parallel, "Worker threads")->check(CLI::PositiveNumber);
}

std::vector<Snapshot> build_snapshots(const Scenario& sc, std::size_t first, std::size_t last) {
  const Constellation c(sc.constellation);
  const auto isl = build_persistent_isls(c, sc.pattern);
  std::vector<Snapshot> out;
  for (std::size_t k = first; k < last; ++k)
    out.push_back(make_snapshot(c, sc.stations, isl, sc.time.stamp(k), sc.snapshot_options()));
  return out;
}

void export_topology(const Scenario& sc, const fs::path& dir, const std::string& format, long stamp) {
  const std::size_t first = stamp < 0 ? 0 : static_cast<std::size_t>(stamp);
  const std::size_t last = stamp < 0 ? sc.time.count : std::min(sc.time.count, first + 1);
  if (first >= sc.time.count) throw std::invalid_argument("--stamp outside the time grid");
  if (format == "csv") {
    std::ostringstream os;
    write_edges_header(os);
    const Constellation c(sc.constellation);
    const auto isl = build_persistent_isls(c, sc.pattern);
    for (std::size_t k = first; k < last; ++k)
      write_edges_csv(os, make_snapshot(c, sc.stations, isl, sc.time.stamp(k), sc.snapshot_options()));
    write_text_file(dir / "edges.csv", os.str());
  } else {
    for (const auto& snap : build_snapshots(sc, first, last)) {
      char name[64];
      const auto k = static_cast<long>(std::llround(seconds_between(sc.time.start, snap.time) / sc.time.step_s));
      std::snprintf(name, sizeof name, "snapshot_%04ld.geojson", k);
      write_text_file(dir / name, snapshot_geojson(snap).dump(1) + "\n");
    }
  }
}

void write_report(const Scenario& sc, std::span<const PathRecord> records, const MetricsReport& report,
                  const fs::path& dir) {
  write_with(dir / "connections.csv", [&](std::ostream& os) { write_connections_csv(os, sc, report); });
  write_with(dir / "summary.csv", [&](std::ostream& os) { write_summary_csv(os, sc, report); });
  const ReportSamples samples = collect_samples(sc, records, report);
  write_with(dir / "cdf_stretch.csv", [&](std::ostream& os) { write_cdf_csv(os, samples.stretch); });
  write_with(dir / "cdf_hops.csv", [&](std::ostream& os) { write_cdf_csv(os, samples.hops); });
  write_with(dir / "cdf_gamma.csv", [&](std::ostream& os) { write_cdf_csv(os, samples.gamma); });
  write_with(dir / "cdf_vertex_change.csv", [&](std::ostream& os) { write_cdf_csv(os, samples.vertex_change); });
  write_with(dir / "cdf_latency.csv", [&](std::ostream& os) { write_cdf_csv(os, samples.latency_ms); });
}

std::vector<PathRecord> read_records(const std::string& file, const Scenario& sc) {
  std::ifstream in(file);
  if (!in) throw ExportError("cannot open path log '" + file + "'");
  return read_paths_csv(in, sc);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LEO constellation network simulator with location-based forwarding"};
  app.require_subcommand(1);

  CommonOptions gen_opts, sim_opts, ana_opts, exp_opts;
  long gen_stamp = 0;
  long exp_stamp = -1;
  std::string ana_paths, exp_paths;

  auto* gen = app.add_subcommand("generate", "Emit constellation and topology exports");
  add_common(gen, gen_opts);
  gen->add_option("--stamp", gen_stamp, "Stamp index for GeoJSON snapshots (-1 = all)");

  auto* sim = app.add_subcommand("simulate", "Run the experiment and write path logs and metrics");
  add_common(sim, sim_opts);

  auto* ana = app.add_subcommand("analyze", "Recompute metrics from a path log");
  add_common(ana, ana_opts);
  ana->add_option("--paths", ana_paths, "paths.csv written by simulate")->required()->check(CLI::ExistingFile);

  auto* exp = app.add_subcommand("export", "Convert snapshots or path logs to csv/geojson");
  add_common(exp, exp_opts);
  exp->add_option("--paths", exp_paths, "paths.csv to convert")->check(CLI::ExistingFile);
  exp->add_option("--stamp", exp_stamp, "Stamp index for snapshot export (-1 = all)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      const Scenario sc = load_scenario(gen_opts.scenario);
      const fs::path dir = output_dir(gen_opts);
      write_text_file(dir / "scenario.normalized.json", to_json(sc).dump(2) + "\n");
      const Constellation c(sc.constellation);
      write_with(dir / "satellites.csv", [&](std::ostream& os) {
        os << "id,name,plane,slot,raan_deg,initial_u_deg\n";
        for (std::uint32_t i = 0; i < static_cast<std::uint32_t>(c.size()); ++i) {
          const auto id = c.id_of(i);
          os << i << ",S" << id.plane << '_' << id.slot << ',' << id.plane << ',' << id.slot << ','
             << format_fixed(rad_to_deg(c.raan_rad(i))) << ','
             << format_fixed(rad_to_deg(c.initial_argument_of_latitude_rad(i))) << '\n';
        }
      });
      export_topology(sc, dir, gen_opts.format, gen_opts.format == "csv" ? -1 : gen_stamp);
      const auto snaps = build_snapshots(sc, 0, sc.time.count);
      write_with(dir / "direction_histogram.csv",
                 [&](std::ostream& os) { write_histogram_csv(os, direction_histogram(snaps)); });
      if (sc.eisl_threshold_km) {
        EislEpisodeTracker tracker;
        for (std::size_t k = 0; k < snaps.size(); ++k) tracker.observe(k, detect_eisls(snaps[k], *sc.eisl_threshold_km));
        const auto episodes = tracker.finish();
        write_with(dir / "eisl_episodes.csv", [&](std::ostream& os) {
          write_eisl_csv(os, episodes, sc.time, sc.constellation.sats_per_plane);
        });
        write_with(dir / "eisl_counts.csv", [&](std::ostream& os) {
          os << "t,count\n";
          for (std::size_t k = 0; k < snaps.size(); ++k)
            os << format_fixed(stamp_offset_s(sc, k), 3) << ',' << tracker.counts_per_stamp()[k] << '\n';
        });
      }
      std::cout << "generate: wrote " << dir.string() << "\n";
    } else if (*sim) {
      const Scenario sc = load_scenario(sim_opts.scenario);
      const fs::path dir = output_dir(sim_opts);
      const ExperimentResult res = run_experiment(sc, sim_opts.parallel);
      write_text_file(dir / "scenario.normalized.json", to_json(sc).dump(2) + "\n");
      write_with(dir / "paths.csv", [&](std::ostream& os) { write_paths_csv(os, sc, res.records); });
      write_report(sc, res.records, res.report, dir);
      if (sim_opts.format == "geojson" ||
          std::find(sc.exports.begin(), sc.exports.end(), "geojson") != sc.exports.end()) {
        write_text_file(dir / "paths.geojson", paths_geojson(sc, res.records).dump(1) + "\n");
      }
      for (const auto& f : res.failures) std::cerr << "stamp " << f.stamp << " failed: " << f.message << "\n";
      std::cout << "simulate: " << res.records.size() << " path records, " << res.failures.size()
                << " failed stamps -> " << dir.string() << "\n";
    } else if (*ana) {
      const Scenario sc = load_scenario(ana_opts.scenario);
      const fs::path dir = output_dir(ana_opts);
      const auto records = read_records(ana_paths, sc);
      write_report(sc, records, compute_report(sc, records), dir);
      std::cout << "analyze: " << records.size() << " path records -> " << dir.string() << "\n";
    } else if (*exp) {
      const Scenario sc = load_scenario(exp_opts.scenario);
      const fs::path dir = output_dir(exp_opts);
      if (!exp_paths.empty()) {
        const auto records = read_records(exp_paths, sc);
        if (exp_opts.format == "geojson") {
          write_text_file(dir / "paths.geojson", paths_geojson(sc, records).dump(1) + "\n");
        } else {
          write_with(dir / "paths.csv", [&](std::ostream& os) { write_paths_csv(os, sc, records); });
        }
      } else {
        export_topology(sc, dir, exp_opts.format, exp_stamp);
      }
      std::cout << "export: wrote " << dir.string() << "\n";
    }
  } catch (const ScenarioError& e) {
    std::cerr << "scenario error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
