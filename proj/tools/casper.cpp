#include <atomic>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "casper/error.hpp"
#include "casper/grid/catalog.hpp"
#include "casper/isa/program.hpp"
#include "casper/sim/config.hpp"
#include "casper/sim/experiment.hpp"
#include "casper/sim/report.hpp"

namespace {

using namespace casper;
using Json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string kernel;
  std::string size;
  std::string extents;
  std::string config;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string corrupt;
};

sim::SimConfig load(const Common& c) {
  sim::SimConfig cfg = c.config.empty() ? sim::SimConfig{} : sim::load_config(c.config);
  cfg.validate();
  return cfg;
}

sim::Workload workload(const std::string& kernel, const std::string& size, const std::string& extents) {
  if (!grid::find_kernel(kernel)) throw UsageError("unknown kernel '" + kernel + "'");
  if (!extents.empty()) return sim::make_workload(kernel, grid::parse_extents(extents));
  const auto cls = grid::parse_size_class(size.empty() ? "l3" : size);
  if (!cls) throw UsageError("unknown size class '" + size + "' (expected l2, l3 or dram)");
  return sim::make_workload(kernel, *cls);
}

sim::RunOptions options(const Common& c) {
  sim::RunOptions o;
  if (c.seed_set) o.seed = c.seed;
  if (!c.corrupt.empty()) {
    const auto eq = c.corrupt.find('=');
    if (eq == std::string::npos) throw UsageError("--corrupt-constant expects IDX=VALUE");
    o.corrupt_constant = std::make_pair(static_cast<unsigned>(std::stoul(c.corrupt.substr(0, eq))),
                                        std::stod(c.corrupt.substr(eq + 1)));
  }
  return o;
}

Json parse(const std::string& text) { return Json::parse(text); }

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path);
  out << text;
}

Json comparison_json(const sim::Comparison& c) {
  Json j;
  j["speedup"] = c.speedup;
  j["energy_ratio"] = c.energy_ratio;
  j["deltas"] = c.deltas;
  return j;
}

int cmd_run(const Common& c, const std::string& mode, const std::string& out, const std::string& trace,
            std::optional<unsigned> warmup) {
  const auto cfg = load(c);
  const auto w = workload(c.kernel, c.size, c.extents);
  auto o = options(c);
  o.warmup = warmup;
  std::ofstream access, pipeline;
  if (!trace.empty()) {
    access.open(trace);
    pipeline.open(trace + ".spu");
    if (!access || !pipeline) throw UsageError("cannot write trace " + trace);
    o.access_trace = &access;
    o.pipeline_trace = &pipeline;
  }

  if (mode == "casper" || mode == "baseline") {
    const auto r = mode == "casper" ? sim::run_casper(w, cfg, o) : sim::run_baseline(w, cfg, o);
    sim::print_summary(std::cerr, r);
    emit(out, sim::to_json(r));
    return kExitOk;
  }
  Json doc;
  doc["schema_version"] = sim::kSchemaVersion;
  if (mode == "both") {
    const auto cr = sim::run_casper(w, cfg, o);
    const auto br = sim::run_baseline(w, cfg, o);
    const auto cmp = sim::compare(cr, br);
    sim::print_summary(std::cerr, cr);
    sim::print_summary(std::cerr, br);
    std::cerr << "speedup " << cmp.speedup << " energy_ratio " << cmp.energy_ratio << "\n";
    doc["reports"] = parse(sim::to_json(std::vector{cr, br}));
    doc["comparison"] = comparison_json(cmp);
  } else {
    const auto a = sim::ablate_mapping(w, cfg, o);
    for (const auto* r : {&a.interleave, &a.segment, &a.baseline}) sim::print_summary(std::cerr, *r);
    std::cerr << "speedup_mapping_only " << a.speedup_mapping_only << " speedup_full " << a.speedup_full << "\n";
    doc["reports"] = parse(sim::to_json(std::vector{a.interleave, a.segment, a.baseline}));
    doc["speedup_mapping_only"] = a.speedup_mapping_only;
    doc["speedup_full"] = a.speedup_full;
  }
  emit(out, doc.dump(2) + "\n");
  return kExitOk;
}

int cmd_verify(const Common& c, const std::string& mode, unsigned timesteps) {
  if (timesteps == 0) throw UsageError("--timesteps must be at least 1");
  const auto cfg = load(c);
  const auto w = workload(c.kernel, c.size, c.extents);
  auto o = options(c);
  o.warmup = timesteps - 1;
  if (mode == "casper" || mode == "both") sim::run_casper(w, cfg, o);
  if (mode == "baseline" || mode == "both") sim::run_baseline(w, cfg, o);
  std::cerr << "ok: " << w.kernel.name << " " << grid::format_extents(w.extents) << ", " << timesteps
            << " timesteps match the golden executor\n";
  return kExitOk;
}

struct SweepItem {
  std::string kernel;
  std::string size;
  std::string extents;
  std::string mode;
};

int cmd_sweep(const Common& c, const std::string& matrix_path, const std::string& out, unsigned jobs) {
  std::ifstream in(matrix_path);
  if (!in) throw UsageError("cannot open matrix " + matrix_path);
  Json m;
  try {
    m = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("malformed matrix: ") + e.what());
  }
  const auto cfg = load(c);
  auto base = options(c);
  if (m.contains("seed")) base.seed = m["seed"].get<std::uint64_t>();
  if (m.contains("warmup")) base.warmup = m["warmup"].get<unsigned>();

  std::vector<std::string> sizes = m.value("sizes", std::vector<std::string>{});
  std::vector<std::string> extents = m.value("extents", std::vector<std::string>{});
  std::vector<SweepItem> items;
  for (const auto& k : m.at("kernels")) {
    for (const auto& s : sizes) {
      for (const auto& md : m.at("modes")) items.push_back({k, s, "", md});
    }
    for (const auto& e : extents) {
      for (const auto& md : m.at("modes")) items.push_back({k, "", e, md});
    }
  }
  for (const auto& it : items) {
    if (it.mode != "casper" && it.mode != "baseline" && it.mode != "both" && it.mode != "ablate") {
      throw UsageError("unknown mode '" + it.mode + "' in matrix");
    }
  }

  std::vector<std::vector<std::string>> rows(items.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < items.size(); i = next++) {
      const auto& it = items[i];
      std::vector<std::string> lines;
      try {
        const auto w = workload(it.kernel, it.size, it.extents);
        std::vector<sim::Report> reports;
        if (it.mode == "casper" || it.mode == "both") reports.push_back(sim::run_casper(w, cfg, base));
        if (it.mode == "baseline" || it.mode == "both") reports.push_back(sim::run_baseline(w, cfg, base));
        if (it.mode == "ablate") {
          const auto a = sim::ablate_mapping(w, cfg, base);
          reports = {a.interleave, a.segment, a.baseline};
        }
        for (const auto& r : reports) lines.push_back(sim::csv_row(r));
      } catch (const std::exception& e) {
        sim::Report r;
        r.kernel = it.kernel;
        r.size_class = it.size.empty() ? "custom" : it.size;
        r.extents = it.extents;
        r.mode = it.mode;
        std::string why = e.what();
        for (auto& ch : why) {
          if (ch == ',' || ch == '\n') ch = ' ';
        }
        lines.push_back(sim::csv_row(r, "failed: " + why));
      }
      rows[i] = std::move(lines);
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(items.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::ostringstream csv;
  csv << sim::csv_header() << "\n";
  bool failed = false;
  for (const auto& lines : rows) {
    for (const auto& l : lines) {
      csv << l << "\n";
      failed = failed || l.find(",failed: ") != std::string::npos;
    }
  }
  emit(out, csv.str());
  return failed ? kExitFailure : kExitOk;
}

int cmd_asm(const std::string& kernel, const std::string& out, const std::string& from) {
  isa::StencilProgram prog;
  if (!from.empty()) {
    std::ifstream in(from, std::ios::binary);
    if (!in) throw UsageError("cannot open " + from);
    std::vector<std::uint8_t> image((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    prog = isa::from_binary(image);
  } else {
    const auto k = grid::find_kernel(kernel);
    if (!k) throw UsageError("unknown kernel '" + kernel + "'");
    prog = isa::build_program(*k);
    const std::string path = out.empty() ? kernel + ".cspr" : out;
    const auto image = isa::to_binary(prog);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw UsageError("cannot write " + path);
    f.write(reinterpret_cast<const char*>(image.data()), static_cast<std::streamsize>(image.size()));
    std::cerr << "wrote " << image.size() << " bytes to " << path << "\n";
  }
  std::cout << isa::disassemble(prog);
  return kExitOk;
}

void add_common(CLI::App* cmd, Common& c, bool workload_flags = true) {
  if (workload_flags) {
    cmd->add_option("--kernel", c.kernel, "catalog kernel")->required();
    cmd->add_option("--size", c.size, "size class: l2, l3 or dram");
    cmd->add_option("--extents", c.extents, "explicit extents, contiguous dimension first (e.g. 512x256)");
  }
  cmd->add_option("--config", c.config, "INI configuration file");
  cmd->add_option("--seed", c.seed, "grid initializer seed")->each([&c](const std::string&) { c.seed_set = true; });
  cmd->add_option("--corrupt-constant", c.corrupt, "test hook: IDX=VALUE overwrites a constant slot")
      ->group("");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"casper: near-LLC stencil accelerator simulator"};
  app.require_subcommand(1);

  Common run_c;
  std::string run_mode = "casper", run_out, run_trace;
  std::optional<unsigned> run_warmup;
  auto* run = app.add_subcommand("run", "simulate one kernel and write JSON reports");
  add_common(run, run_c);
  run->add_option("--mode", run_mode, "casper, baseline, both or ablate")
      ->check(CLI::IsMember({"casper", "baseline", "both", "ablate"}));
  run->add_option("--out", run_out, "report path (default: standard output)");
  run->add_option("--trace", run_trace, "access trace path; the SPU pipeline trace goes to PATH.spu");
  run->add_option("--warmup", run_warmup, "untimed timesteps before the measured one");

  Common ver_c;
  std::string ver_mode = "both";
  unsigned timesteps = 3;
  auto* ver = app.add_subcommand("verify", "check simulated output against the golden executor");
  add_common(ver, ver_c);
  ver->add_option("--mode", ver_mode, "casper, baseline or both")->check(CLI::IsMember({"casper", "baseline", "both"}));
  ver->add_option("--timesteps", timesteps, "timesteps to apply");

  Common sw_c;
  std::string matrix, sw_out;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  auto* sw = app.add_subcommand("sweep", "run a kernel x size x mode matrix and write CSV");
  add_common(sw, sw_c, false);
  sw->add_option("matrix", matrix, "JSON matrix: {kernels, sizes | extents, modes, seed?, warmup?}")->required();
  sw->add_option("--out", sw_out, "CSV path (default: standard output)");
  sw->add_option("--jobs,-j", jobs, "parallel simulations");

  std::string asm_kernel, asm_out, asm_from;
  auto* as = app.add_subcommand("asm", "print a kernel's SPU program and write its binary image");
  as->add_option("--kernel", asm_kernel, "catalog kernel");
  as->add_option("--out", asm_out, "binary path (default: KERNEL.cspr)");
  as->add_option("--from", asm_from, "disassemble an existing binary instead");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run) return cmd_run(run_c, run_mode, run_out, run_trace, run_warmup);
    if (*ver) return cmd_verify(ver_c, ver_mode, timesteps);
    if (*sw) return cmd_sweep(sw_c, matrix, sw_out, jobs);
    if (*as) {
      if (asm_kernel.empty() && asm_from.empty()) throw UsageError("asm needs --kernel or --from");
      return cmd_asm(asm_kernel, asm_out, asm_from);
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const FunctionalMismatch& e) {
    std::cerr << "mismatch: " << e.what() << ": expected " << e.expected() << " got " << e.actual() << "\n";
    return kExitFailure;
  } catch (const DimensionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
