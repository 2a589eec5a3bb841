#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "casper/isa/instruction.hpp"
#include "casper/isa/kernel.hpp"

namespace casper::isa {

/// Microcode broadcast to every SPU.
struct StencilProgram {
  std::vector<Instruction> instructions;
  std::vector<double> constants;
  unsigned n_input_streams = 0;
  unsigned output_stream_idx = kOutputStream;

  bool operator==(const StencilProgram&) const = default;
};

enum class ViolationKind {
  Empty,
  InstructionBufferOverflow,
  TooManyConstants,
  TooManyInputStreams,
  ClearNotFirst,
  MultipleClear,
  OutputNotLast,
  MultipleOutput,
  AdvanceMisplaced,
  ConstantOutOfRange,
  StreamOutOfRange,
};

struct Violation {
  ViolationKind kind;
  std::size_t instruction = 0;
  std::string message;
};

/// Compiles a kernel to SPU microcode. Throws ProgramTooLarge when the
/// stream, constant or instruction budget is exceeded.
StencilProgram build_program(const StencilKernel& kernel);

/// Outer offset tuple (innermost entry zero) read by each input stream, by stream index.
std::vector<Offset> input_stream_offsets(const StencilKernel& kernel);

/// Returns every violated program invariant; empty means valid.
std::vector<Violation> validate_program(const StencilProgram& program);

/// One disassembled instruction per line.
std::string disassemble(const StencilProgram& program);

/// Binary program image: 16-byte header, little-endian 16-bit words,
/// then little-endian IEEE-754 constants.
std::vector<std::uint8_t> to_binary(const StencilProgram& program);
StencilProgram from_binary(const std::vector<std::uint8_t>& image);

inline constexpr char kBinaryMagic[4] = {'C', 'S', 'P', 'R'};
inline constexpr std::uint16_t kBinaryVersion = 1;

}  // namespace casper::isa
