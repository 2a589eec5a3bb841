#include "casper/isa/instruction.hpp"

#include <sstream>

#include "casper/error.hpp"

namespace casper::isa {

namespace {

constexpr unsigned kConstShift = 11;
constexpr unsigned kStreamShift = 7;
constexpr unsigned kDirShift = 6;
constexpr unsigned kAmtShift = 3;
constexpr unsigned kClearBit = 2;
constexpr unsigned kOutputBit = 1;
constexpr unsigned kAdvanceBit = 0;

}  // namespace

std::uint16_t encode(const Instruction& instr) {
  if (instr.const_idx >= kConstantSlots) {
    throw EncodingError("const_idx " + std::to_string(instr.const_idx) + " exceeds 4 bits");
  }
  if (instr.stream_idx >= kStreamSlots) {
    throw EncodingError("stream_idx " + std::to_string(instr.stream_idx) + " exceeds 4 bits");
  }
  if (instr.shift_amt > kMaxShift) {
    throw EncodingError("shift_amt " + std::to_string(instr.shift_amt) + " exceeds 3 bits");
  }
  if (instr.shift_dir != ShiftDir::Forward && instr.shift_dir != ShiftDir::Backward) {
    throw EncodingError("invalid shift direction");
  }
  unsigned word = 0;
  word |= unsigned{instr.const_idx} << kConstShift;
  word |= unsigned{instr.stream_idx} << kStreamShift;
  word |= (instr.shift_dir == ShiftDir::Backward ? 1u : 0u) << kDirShift;
  word |= unsigned{instr.shift_amt} << kAmtShift;
  word |= (instr.clear_acc ? 1u : 0u) << kClearBit;
  word |= (instr.enable_output ? 1u : 0u) << kOutputBit;
  word |= (instr.advance_stream ? 1u : 0u) << kAdvanceBit;
  return static_cast<std::uint16_t>(word);
}

Instruction decode(std::uint16_t word) noexcept {
  const unsigned w = word & kInstructionMask;
  Instruction instr;
  instr.const_idx = static_cast<std::uint8_t>((w >> kConstShift) & 0xF);
  instr.stream_idx = static_cast<std::uint8_t>((w >> kStreamShift) & 0xF);
  instr.shift_dir = ((w >> kDirShift) & 1u) ? ShiftDir::Backward : ShiftDir::Forward;
  instr.shift_amt = static_cast<std::uint8_t>((w >> kAmtShift) & 0x7);
  instr.clear_acc = (w >> kClearBit) & 1u;
  instr.enable_output = (w >> kOutputBit) & 1u;
  instr.advance_stream = (w >> kAdvanceBit) & 1u;
  return instr;
}

std::string disassemble(const Instruction& instr) {
  std::string out = "c" + std::to_string(instr.const_idx) + " s" + std::to_string(instr.stream_idx) + " ";
  out += instr.shift_dir == ShiftDir::Backward ? 'B' : 'F';
  out += std::to_string(instr.shift_amt);
  out += ' ';
  std::string flags;
  if (instr.clear_acc) flags += 'C';
  if (instr.enable_output) flags += 'O';
  if (instr.advance_stream) flags += 'A';
  out += flags.empty() ? "-" : flags;
  return out;
}

Instruction assemble(const std::string& line) {
  std::istringstream in(line);
  std::string c, s, shift, flags;
  if (!(in >> c >> s >> shift >> flags) || c.size() < 2 || c[0] != 'c' || s.size() < 2 || s[0] != 's' ||
      shift.size() != 2 || (shift[0] != 'F' && shift[0] != 'B')) {
    throw EncodingError("malformed instruction: '" + line + "'");
  }
  std::string extra;
  if (in >> extra) throw EncodingError("trailing text in instruction: '" + line + "'");

  auto parse_index = [&](const std::string& field) {
    std::size_t pos = 0;
    int value = 0;
    try {
      value = std::stoi(field.substr(1), &pos);
    } catch (const std::exception&) {
      throw EncodingError("bad index in '" + line + "'");
    }
    if (pos != field.size() - 1 || value < 0 || value > 15) {
      throw EncodingError("bad index in '" + line + "'");
    }
    return static_cast<std::uint8_t>(value);
  };

  Instruction instr;
  instr.const_idx = parse_index(c);
  instr.stream_idx = parse_index(s);
  instr.shift_dir = shift[0] == 'B' ? ShiftDir::Backward : ShiftDir::Forward;
  if (shift[1] < '0' || shift[1] > '7') throw EncodingError("bad shift amount in '" + line + "'");
  instr.shift_amt = static_cast<std::uint8_t>(shift[1] - '0');
  if (flags != "-") {
    for (char f : flags) {
      switch (f) {
        case 'C': instr.clear_acc = true; break;
        case 'O': instr.enable_output = true; break;
        case 'A': instr.advance_stream = true; break;
        default: throw EncodingError("unknown control flag in '" + line + "'");
      }
    }
  }
  return instr;
}

}  // namespace casper::isa
