#include "casper/isa/program.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <map>
#include <sstream>

#include "casper/error.hpp"

namespace casper::isa {

StencilProgram build_program(const StencilKernel& kernel) {
  check_kernel(kernel);
  const auto points = canonical_points(kernel);
  const auto inner = static_cast<std::size_t>(kernel.dims - 1);

  if (points.size() > kInstructionBufferSize) {
    throw ProgramTooLarge("kernel '" + kernel.name + "' needs " + std::to_string(points.size()) +
                          " instructions; the buffer holds " + std::to_string(kInstructionBufferSize));
  }

  StencilProgram prog;
  std::map<Offset, std::uint8_t> stream_of;
  std::map<std::uint64_t, std::uint8_t> constant_of;

  for (const auto& p : points) {
    Offset outer = p.offset;
    outer[inner] = 0;
    auto [sit, new_stream] = stream_of.try_emplace(outer, static_cast<std::uint8_t>(stream_of.size()));
    if (new_stream && stream_of.size() > kMaxInputStreams) {
      throw ProgramTooLarge("kernel '" + kernel.name + "' needs more than 15 input streams");
    }
    // Constants are deduplicated by bit pattern so 0.0 and -0.0 stay distinct.
    const auto bits = std::bit_cast<std::uint64_t>(p.coefficient);
    auto [cit, new_const] = constant_of.try_emplace(bits, static_cast<std::uint8_t>(prog.constants.size()));
    if (new_const) {
      if (prog.constants.size() >= kConstantSlots) {
        throw ProgramTooLarge("kernel '" + kernel.name + "' needs more than 16 distinct constants");
      }
      prog.constants.push_back(p.coefficient);
    }
    const int shift = p.offset[inner];
    Instruction instr;
    instr.const_idx = cit->second;
    instr.stream_idx = sit->second;
    instr.shift_dir = shift < 0 ? ShiftDir::Backward : ShiftDir::Forward;
    instr.shift_amt = static_cast<std::uint8_t>(shift < 0 ? -shift : shift);
    prog.instructions.push_back(instr);
  }

  prog.n_input_streams = static_cast<unsigned>(stream_of.size());
  prog.instructions.front().clear_acc = true;
  prog.instructions.back().enable_output = true;
  std::vector<bool> advanced(prog.n_input_streams, false);
  for (auto it = prog.instructions.rbegin(); it != prog.instructions.rend(); ++it) {
    if (!advanced[it->stream_idx]) {
      it->advance_stream = true;
      advanced[it->stream_idx] = true;
    }
  }
  return prog;
}

std::vector<Offset> input_stream_offsets(const StencilKernel& kernel) {
  const auto inner = static_cast<std::size_t>(kernel.dims - 1);
  std::vector<Offset> out;
  for (const auto& p : canonical_points(kernel)) {
    Offset outer = p.offset;
    outer[inner] = 0;
    if (std::find(out.begin(), out.end(), outer) == out.end()) out.push_back(outer);
  }
  return out;
}

std::vector<Violation> validate_program(const StencilProgram& program) {
  std::vector<Violation> out;
  const auto& ins = program.instructions;
  auto add = [&](ViolationKind k, std::size_t at, std::string msg) { out.push_back({k, at, std::move(msg)}); };

  if (ins.empty()) {
    add(ViolationKind::Empty, 0, "empty program");
    return out;
  }
  if (ins.size() > kInstructionBufferSize) {
    add(ViolationKind::InstructionBufferOverflow, kInstructionBufferSize, "instruction buffer overflow");
  }
  if (program.constants.size() > kConstantSlots) {
    add(ViolationKind::TooManyConstants, 0, "constant buffer overflow");
  }
  if (program.n_input_streams > kMaxInputStreams) {
    add(ViolationKind::TooManyInputStreams, 0, "too many input streams");
  }

  const std::size_t last = ins.size() - 1;
  if (!ins.front().clear_acc) add(ViolationKind::ClearNotFirst, 0, "clear not first");
  if (!ins.back().enable_output) add(ViolationKind::OutputNotLast, last, "output not last");
  for (std::size_t i = 0; i < ins.size(); ++i) {
    const auto& in = ins[i];
    if (i != 0 && in.clear_acc) add(ViolationKind::MultipleClear, i, "clear not first");
    if (i != last && in.enable_output) add(ViolationKind::OutputNotLast, i, "output not last");
    if (in.const_idx >= program.constants.size()) {
      add(ViolationKind::ConstantOutOfRange, i, "constant index out of range");
    }
    if (in.stream_idx >= program.n_input_streams || in.stream_idx == program.output_stream_idx) {
      add(ViolationKind::StreamOutOfRange, i, "stream index out of range");
    }
  }

  std::map<unsigned, std::size_t> last_use;
  for (std::size_t i = 0; i < ins.size(); ++i) last_use[ins[i].stream_idx] = i;
  for (std::size_t i = 0; i < ins.size(); ++i) {
    const bool should = last_use[ins[i].stream_idx] == i;
    if (ins[i].advance_stream != should) {
      add(ViolationKind::AdvanceMisplaced, i,
          should ? "advance missing on last use of stream" : "advance before last use of stream");
    }
  }
  return out;
}

std::string disassemble(const StencilProgram& program) {
  std::string out;
  for (const auto& in : program.instructions) {
    out += disassemble(in);
    out += '\n';
  }
  return out;
}

namespace {

void put_u16(std::vector<std::uint8_t>& buf, std::uint16_t v) {
  buf.push_back(static_cast<std::uint8_t>(v & 0xFF));
  buf.push_back(static_cast<std::uint8_t>(v >> 8));
}

std::uint16_t get_u16(const std::vector<std::uint8_t>& buf, std::size_t at) {
  return static_cast<std::uint16_t>(buf[at] | (buf[at + 1] << 8));
}

}  // namespace

std::vector<std::uint8_t> to_binary(const StencilProgram& program) {
  std::vector<std::uint8_t> buf;
  buf.insert(buf.end(), std::begin(kBinaryMagic), std::end(kBinaryMagic));
  put_u16(buf, kBinaryVersion);
  put_u16(buf, static_cast<std::uint16_t>(program.instructions.size()));
  put_u16(buf, static_cast<std::uint16_t>(program.constants.size()));
  put_u16(buf, static_cast<std::uint16_t>(program.n_input_streams));
  put_u16(buf, static_cast<std::uint16_t>(program.output_stream_idx));
  put_u16(buf, 0);
  for (const auto& in : program.instructions) put_u16(buf, encode(in));
  for (double c : program.constants) {
    auto bits = std::bit_cast<std::uint64_t>(c);
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
  }
  return buf;
}

StencilProgram from_binary(const std::vector<std::uint8_t>& image) {
  if (image.size() < 16 || std::memcmp(image.data(), kBinaryMagic, 4) != 0) {
    throw Error("not a casper program image");
  }
  if (get_u16(image, 4) != kBinaryVersion) throw Error("unsupported program image version");
  const std::size_t n_instr = get_u16(image, 6);
  const std::size_t n_const = get_u16(image, 8);
  if (image.size() != 16 + 2 * n_instr + 8 * n_const) throw Error("truncated program image");

  StencilProgram prog;
  prog.n_input_streams = get_u16(image, 10);
  prog.output_stream_idx = get_u16(image, 12);
  std::size_t at = 16;
  for (std::size_t i = 0; i < n_instr; ++i, at += 2) {
    const auto word = get_u16(image, at);
    if (word & 0x8000) throw Error("program word has bit 15 set");
    prog.instructions.push_back(decode(word));
  }
  for (std::size_t i = 0; i < n_const; ++i, at += 8) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= std::uint64_t{image[at + b]} << (8 * b);
    prog.constants.push_back(std::bit_cast<double>(bits));
  }
  return prog;
}

}  // namespace casper::isa
