#include "casper/sim/report.hpp"

#include <cstdio>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "casper/error.hpp"

namespace casper::sim {

namespace {

using Json = nlohmann::ordered_json;

constexpr double kJoulesPerPj = 1e-12;

struct Counter {
  const char* name;
  std::uint64_t Report::*field;
};

constexpr Counter kCounters[] = {
    {"cycles", &Report::cycles},
    {"committed_instructions", &Report::committed_instructions},
    {"loads_issued", &Report::loads_issued},
    {"load_completions", &Report::load_completions},
    {"loads_local", &Report::loads_local},
    {"loads_remote", &Report::loads_remote},
    {"loads_unaligned", &Report::loads_unaligned},
    {"stores", &Report::stores},
    {"llc_accesses", &Report::llc_accesses},
    {"llc_hits", &Report::llc_hits},
    {"llc_misses", &Report::llc_misses},
    {"l1_hits", &Report::l1_hits},
    {"l1_misses", &Report::l1_misses},
    {"l2_hits", &Report::l2_hits},
    {"l2_misses", &Report::l2_misses},
    {"dram_reads", &Report::dram_reads},
    {"dram_writes", &Report::dram_writes},
    {"noc_flits", &Report::noc_flits},
    {"noc_remote_units", &Report::noc_remote_units},
};

struct EnergyField {
  const char* name;
  std::uint64_t EnergyBreakdown::*field;
};

constexpr EnergyField kEnergy[] = {
    {"compute", &EnergyBreakdown::compute_pj}, {"l1", &EnergyBreakdown::l1_pj},
    {"l2", &EnergyBreakdown::l2_pj},           {"llc", &EnergyBreakdown::llc_pj},
    {"dram", &EnergyBreakdown::dram_pj},       {"noc", &EnergyBreakdown::noc_pj},
};

// The compute entry is named after the unit that spends it.
std::string compute_key(const Report& r) { return r.mode == "baseline" ? "core" : "spu"; }

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json to_object(const Report& r) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kernel"] = r.kernel;
  j["size_class"] = r.size_class;
  j["extents"] = r.extents;
  j["mode"] = r.mode;
  j["mapping"] = r.mapping;
  j["seed"] = r.seed;
  j["timesteps"] = r.timesteps;
  j["seconds"] = r.seconds;
  for (const auto& c : kCounters) j[c.name] = r.*c.field;
  Json energy;
  Json energy_pj;
  for (const auto& e : kEnergy) {
    const std::string key = e.field == &EnergyBreakdown::compute_pj ? compute_key(r) : e.name;
    energy[key] = static_cast<double>(r.energy.*e.field) * kJoulesPerPj;
    energy_pj[key] = r.energy.*e.field;
  }
  energy["total"] = static_cast<double>(r.energy.total_pj()) * kJoulesPerPj;
  energy_pj["total"] = r.energy.total_pj();
  j["energy"] = energy;
  j["energy_pj"] = energy_pj;
  j["output_checksum"] = hex64(r.output_checksum);
  j["config_digest"] = r.config_digest;
  return j;
}

}  // namespace

double Report::ipc() const noexcept {
  return cycles == 0 ? 0.0 : static_cast<double>(committed_instructions) / static_cast<double>(cycles);
}

std::string to_json(const Report& r) { return to_object(r).dump(2) + "\n"; }

std::string to_json(const std::vector<Report>& reports) {
  Json arr = Json::array();
  for (const auto& r : reports) arr.push_back(to_object(r));
  return arr.dump(2) + "\n";
}

Report report_from_json(const std::string& text) {
  try {
    const Json j = Json::parse(text);
    if (j.at("schema_version").get<int>() != kSchemaVersion) throw ConfigError("unsupported report schema version");
    Report r;
    r.kernel = j.at("kernel").get<std::string>();
    r.size_class = j.at("size_class").get<std::string>();
    r.extents = j.at("extents").get<std::string>();
    r.mode = j.at("mode").get<std::string>();
    r.mapping = j.at("mapping").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.timesteps = j.at("timesteps").get<unsigned>();
    r.seconds = j.at("seconds").get<double>();
    for (const auto& c : kCounters) r.*c.field = j.at(c.name).get<std::uint64_t>();
    const auto& pj = j.at("energy_pj");
    for (const auto& e : kEnergy) {
      const std::string key = e.field == &EnergyBreakdown::compute_pj ? compute_key(r) : e.name;
      r.energy.*e.field = pj.at(key).get<std::uint64_t>();
    }
    r.output_checksum = std::stoull(j.at("output_checksum").get<std::string>(), nullptr, 16);
    r.config_digest = j.at("config_digest").get<std::string>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed report: ") + e.what());
  }
}

std::string csv_header() {
  std::string h = "schema_version,kernel,size_class,extents,mode,mapping,seed,timesteps,status,seconds";
  for (const auto& c : kCounters) h += std::string(",") + c.name;
  for (const auto& e : kEnergy) h += std::string(",energy_") + e.name + "_pj";
  h += ",energy_total_pj,output_checksum,config_digest";
  return h;
}

std::string csv_row(const Report& r, const std::string& status) {
  std::ostringstream o;
  o << kSchemaVersion << ',' << r.kernel << ',' << r.size_class << ',' << r.extents << ',' << r.mode << ','
    << r.mapping << ',' << r.seed << ',' << r.timesteps << ',' << status << ',' << fmt_double(r.seconds);
  for (const auto& c : kCounters) o << ',' << r.*c.field;
  for (const auto& e : kEnergy) o << ',' << r.energy.*e.field;
  o << ',' << r.energy.total_pj() << ',' << hex64(r.output_checksum) << ',' << r.config_digest;
  return o.str();
}

Comparison compare(const Report& casper, const Report& baseline) {
  if (casper.kernel != baseline.kernel || casper.extents != baseline.extents || casper.seed != baseline.seed ||
      casper.timesteps != baseline.timesteps) {
    throw ConfigError("compared reports describe different runs");
  }
  Comparison c;
  c.speedup = casper.cycles == 0 ? 0.0 : static_cast<double>(baseline.cycles) / static_cast<double>(casper.cycles);
  const auto be = baseline.energy.total_pj();
  c.energy_ratio = be == 0 ? 0.0 : static_cast<double>(casper.energy.total_pj()) / static_cast<double>(be);
  for (const auto& k : kCounters) {
    c.deltas[k.name] = static_cast<std::int64_t>(casper.*k.field) - static_cast<std::int64_t>(baseline.*k.field);
  }
  c.deltas["energy_total_pj"] =
      static_cast<std::int64_t>(casper.energy.total_pj()) - static_cast<std::int64_t>(baseline.energy.total_pj());
  return c;
}

void print_summary(std::ostream& out, const Report& r) {
  out << r.mode << " " << r.kernel << " " << r.extents << " (" << r.mapping << "): " << r.cycles << " cycles, "
      << r.committed_instructions << " instructions, local " << fmt_double(r.local_fraction()).substr(0, 6)
      << ", llc " << r.llc_hits << "/" << r.llc_misses << " hit/miss, energy " << r.energy.total_pj() << " pJ, checksum "
      << hex64(r.output_checksum) << "\n";
}

}  // namespace casper::sim
