#include "casper/sim/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <variant>
#include <vector>

#include "casper/error.hpp"
#include "casper/grid/grid.hpp"

namespace casper::sim {

namespace {

using FieldRef = std::variant<std::uint64_t*, unsigned*, double*, bool*>;

struct Field {
  const char* section;
  const char* key;
  FieldRef ref;
};

void cache_fields(std::vector<Field>& out, const char* section, CacheLevelParams& c) {
  out.push_back({section, "capacity_bytes", &c.capacity_bytes});
  out.push_back({section, "associativity", &c.associativity});
  out.push_back({section, "latency", &c.latency});
  out.push_back({section, "mshrs", &c.mshrs});
  out.push_back({section, "hit_energy_pj", &c.hit_energy_pj});
  out.push_back({section, "miss_energy_pj", &c.miss_energy_pj});
  out.push_back({section, "load_ports", &c.load_ports});
  out.push_back({section, "store_ports", &c.store_ports});
}

std::vector<Field> fields(SimConfig& c) {
  std::vector<Field> f = {
      {"system", "spus", &c.n_spus},
      {"system", "block_bytes", &c.block_bytes},
      {"system", "clock_hz", &c.clock_hz},
      {"system", "phase_reprogram_cycles", &c.phase_reprogram_cycles},
      {"system", "warmup", &c.warmup},
      {"system", "seed", &c.seed},
      {"system", "deadlock_cycles", &c.deadlock_cycles},
      {"llc", "capacity_bytes", &c.slice.capacity_bytes},
      {"llc", "associativity", &c.slice.associativity},
      {"llc", "mshrs", &c.slice.mshrs},
      {"llc", "hit_latency", &c.slice.hit_latency},
      {"llc", "hit_energy_pj", &c.slice.hit_energy_pj},
      {"llc", "miss_energy_pj", &c.slice.miss_energy_pj},
      {"noc", "width", &c.noc.width},
      {"noc", "height", &c.noc.height},
      {"noc", "hop_latency", &c.noc.hop_latency},
      {"noc", "link_bytes", &c.noc.link_bytes},
      {"noc", "flit_hop_energy_pj", &c.noc.flit_hop_energy_pj},
      {"dram", "channels", &c.dram.channels},
      {"dram", "latency", &c.dram.latency},
      {"dram", "bytes_per_cycle", &c.dram.bytes_per_cycle},
      {"dram", "energy_pj", &c.dram.energy_pj},
      {"spu", "load_queue_entries", &c.spu.load_queue_entries},
      {"spu", "instruction_energy_pj", &c.spu.instruction_energy_pj},
      {"core", "cores", &c.baseline.cores},
      {"core", "issue_width", &c.baseline.issue_width},
      {"core", "fma_latency", &c.baseline.fma_latency},
      {"core", "instruction_energy_pj", &c.baseline.instruction_energy_pj},
      {"core", "l3_extra_latency", &c.baseline.l3_extra_latency},
      {"core", "prefetch", &c.baseline.prefetch},
      {"core", "prefetch_degree", &c.baseline.prefetch_degree},
  };
  cache_fields(f, "l1", c.baseline.l1);
  cache_fields(f, "l2", c.baseline.l2);
  return f;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
bool parse_int(const std::string& v, T& out) {
  const auto* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  return ec == std::errc{} && p == end;
}

bool assign(const FieldRef& ref, const std::string& v) {
  return std::visit(
      [&](auto* p) -> bool {
        using T = std::remove_pointer_t<decltype(p)>;
        if constexpr (std::is_same_v<T, bool>) {
          if (v == "true" || v == "on" || v == "1") return *p = true, true;
          if (v == "false" || v == "off" || v == "0") return *p = false, true;
          return false;
        } else if constexpr (std::is_same_v<T, double>) {
          try {
            std::size_t used = 0;
            const double d = std::stod(v, &used);
            if (used != v.size()) return false;
            *p = d;
            return true;
          } catch (const std::exception&) {
            return false;
          }
        } else {
          return parse_int(v, *p);
        }
      },
      ref);
}

std::string render(const FieldRef& ref) {
  return std::visit(
      [](auto* p) -> std::string {
        using T = std::remove_pointer_t<decltype(p)>;
        if constexpr (std::is_same_v<T, bool>) {
          return *p ? "true" : "false";
        } else if constexpr (std::is_same_v<T, double>) {
          char buf[32];
          std::snprintf(buf, sizeof buf, "%.17g", *p);
          return buf;
        } else {
          return std::to_string(*p);
        }
      },
      ref);
}

bool power_of_two(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

}  // namespace

void SimConfig::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError(m); };
  if (n_spus == 0) fail("system.spus must be positive");
  if (noc.width * noc.height != n_spus) fail("noc.width * noc.height must equal system.spus");
  if (block_bytes == 0 || block_bytes % memory::kLineBytes != 0) fail("system.block_bytes must be a multiple of 64");
  if (clock_hz <= 0.0) fail("system.clock_hz must be positive");
  if (slice.associativity == 0 || slice.capacity_bytes % (memory::kLineBytes * slice.associativity) != 0) {
    fail("llc.capacity_bytes must be a multiple of 64 * associativity");
  }
  if (slice.mshrs == 0) fail("llc.mshrs must be positive");
  if (noc.link_bytes == 0) fail("noc.link_bytes must be positive");
  if (dram.channels == 0 || dram.bytes_per_cycle == 0) fail("dram channels and bandwidth must be positive");
  if (spu.load_queue_entries == 0) fail("spu.load_queue_entries must be positive");
  if (baseline.cores == 0 || baseline.cores > n_spus) fail("core.cores must be in 1..system.spus");
  if (baseline.issue_width == 0) fail("core.issue_width must be positive");
  for (const auto* c : {&baseline.l1, &baseline.l2}) {
    const std::uint64_t sets = c->associativity == 0 ? 0 : c->capacity_bytes / memory::kLineBytes / c->associativity;
    if (!power_of_two(sets)) fail("private cache set count must be a power of two");
    if (c->mshrs == 0 || c->load_ports == 0 || c->store_ports == 0) fail("private cache mshrs and ports must be positive");
  }
}

std::string SimConfig::to_ini() const {
  SimConfig copy = *this;
  std::ostringstream out;
  std::string section;
  for (const auto& f : fields(copy)) {
    if (section != f.section) {
      if (!section.empty()) out << '\n';
      section = f.section;
      out << '[' << section << "]\n";
    }
    out << f.key << " = " << render(f.ref) << '\n';
  }
  return out.str();
}

std::string SimConfig::digest() const {
  const std::string text = to_ini();
  std::uint64_t h = grid::kFnvOffsetBasis;
  for (unsigned char c : text) {
    h ^= c;
    h *= grid::kFnvPrime;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

SimConfig parse_config(std::istream& in, SimConfig base) {
  auto table = fields(base);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto cut = line.find_first_of("#;");
    std::string text = trim(std::string_view(line).substr(0, cut));
    if (text.empty()) continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (text.front() == '[') {
      if (text.back() != ']') throw ConfigError(where + "malformed section header");
      section = trim(std::string_view(text).substr(1, text.size() - 2));
      bool known = false;
      for (const auto& f : table) known = known || section == f.section;
      if (!known) throw ConfigError(where + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    const std::string key = trim(std::string_view(text).substr(0, eq));
    const std::string value = trim(std::string_view(text).substr(eq + 1));
    if (section.empty()) throw ConfigError(where + "key '" + key + "' outside a section");
    auto it = std::find_if(table.begin(), table.end(),
                           [&](const Field& f) { return section == f.section && key == f.key; });
    if (it == table.end()) throw ConfigError(where + "unknown key '" + section + "." + key + "'");
    if (!assign(it->ref, value)) throw ConfigError(where + "bad value '" + value + "' for " + section + "." + key);
  }
  base.validate();
  return base;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_config(in);
}

}  // namespace casper::sim
