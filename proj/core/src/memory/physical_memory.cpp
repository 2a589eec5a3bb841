#include "casper/memory/physical_memory.hpp"

#include <cstring>
#include <sstream>

#include "casper/error.hpp"

namespace casper::memory {

namespace {

std::string hex(std::uint64_t v) {
  std::ostringstream os;
  os << "0x" << std::hex << v;
  return os.str();
}

}  // namespace

PhysicalMemory::PhysicalMemory(std::uint64_t base, std::uint64_t size)
    : base_(base), words_(size / kElementBytes, 0.0) {
  if (base % kElementBytes != 0 || size % kElementBytes != 0) {
    throw ConfigError("physical memory must be 8-byte aligned");
  }
}

std::size_t PhysicalMemory::word_index(std::uint64_t addr, std::uint64_t bytes) const {
  if (addr % kElementBytes != 0) throw AddressFault("unaligned element address " + hex(addr), addr);
  if (!contains(addr, bytes)) {
    throw AddressFault("address " + hex(addr) + " outside simulated space [" + hex(base_) + ", " + hex(end()) + ")",
                       addr);
  }
  return static_cast<std::size_t>((addr - base_) / kElementBytes);
}

LineData PhysicalMemory::read_window(std::uint64_t addr) const {
  const auto i = word_index(addr, kLineBytes);
  LineData out;
  std::memcpy(out.data(), words_.data() + i, kLineBytes);
  return out;
}

void PhysicalMemory::write_line(std::uint64_t line_addr, const LineData& data, std::uint8_t lane_mask) {
  const auto i = word_index(line_addr, kLineBytes);
  for (unsigned l = 0; l < kLanes; ++l) {
    if (lane_mask & (1u << l)) words_[i + l] = data[l];
  }
}

double PhysicalMemory::load(std::uint64_t addr) const { return words_[word_index(addr, kElementBytes)]; }

void PhysicalMemory::store(std::uint64_t addr, double value) { words_[word_index(addr, kElementBytes)] = value; }

void PhysicalMemory::write_block(std::uint64_t addr, std::span<const double> values) {
  const auto i = word_index(addr, values.size() * kElementBytes);
  std::memcpy(words_.data() + i, values.data(), values.size_bytes());
}

void PhysicalMemory::read_block(std::uint64_t addr, std::span<double> out) const {
  const auto i = word_index(addr, out.size() * kElementBytes);
  std::memcpy(out.data(), words_.data() + i, out.size_bytes());
}

std::uint64_t shifted_address(std::uint64_t line_addr, isa::ShiftDir dir, unsigned amt) {
  const std::uint64_t delta = std::uint64_t{amt} * kElementBytes;
  if (dir == isa::ShiftDir::Backward) {
    if (delta > line_addr) throw AddressFault("shifted address underflows", line_addr);
    return line_addr - delta;
  }
  return line_addr + delta;
}

LineBytes unaligned_read_bytes(const PhysicalMemory& mem, std::uint64_t line_addr, isa::ShiftDir dir,
                               unsigned amt) {
  if (line_addr % kLineBytes != 0) throw AddressFault("line address not 64B aligned", line_addr);
  if (amt > isa::kMaxShift) throw EncodingError("shift amount exceeds 7");
  return to_bytes(mem.read_window(shifted_address(line_addr, dir, amt)));
}

LineBytes to_bytes(const LineData& data) noexcept {
  LineBytes out;
  std::memcpy(out.data(), data.data(), kLineBytes);
  return out;
}

}  // namespace casper::memory
