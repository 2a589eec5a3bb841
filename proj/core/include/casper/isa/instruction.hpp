#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace casper::isa {

inline constexpr unsigned kInstructionBits = 15;
inline constexpr std::uint16_t kInstructionMask = (1u << kInstructionBits) - 1;
inline constexpr unsigned kConstantSlots = 16;
inline constexpr unsigned kStreamSlots = 16;
inline constexpr unsigned kMaxShift = 7;
inline constexpr unsigned kInstructionBufferSize = 64;
/// Stream slot reserved for the output stream.
inline constexpr unsigned kOutputStream = 15;
inline constexpr unsigned kMaxInputStreams = 15;

/// Backward moves the access window toward lower addresses.
enum class ShiftDir : std::uint8_t { Forward = 0, Backward = 1 };

/// One SPU instruction. Field layout of the encoded word (MSB first):
///   [14:11] const_idx  [10:7] stream_idx  [6] shift_dir  [5:3] shift_amt
///   [2] clear_acc      [1] enable_output  [0] advance_stream
struct Instruction {
  std::uint8_t const_idx = 0;
  std::uint8_t stream_idx = 0;
  ShiftDir shift_dir = ShiftDir::Forward;
  std::uint8_t shift_amt = 0;
  bool clear_acc = false;
  bool enable_output = false;
  bool advance_stream = false;

  /// Signed element offset applied to the stream position (0 for aligned access).
  int element_shift() const noexcept {
    return shift_dir == ShiftDir::Backward ? -static_cast<int>(shift_amt)
                                           : static_cast<int>(shift_amt);
  }

  friend auto operator<=>(const Instruction&, const Instruction&) = default;
};

/// Packs an instruction into its 15-bit word. Throws EncodingError on out-of-range fields.
std::uint16_t encode(const Instruction& instr);

/// Unpacks any 15-bit word; bits above bit 14 are ignored.
Instruction decode(std::uint16_t word) noexcept;

/// `c<k> s<k> [F|B]<amt> flags` where flags is any of C, O, A or `-` when none is set.
std::string disassemble(const Instruction& instr);

/// Inverse of disassemble(). Throws EncodingError on malformed text.
Instruction assemble(const std::string& line);

}  // namespace casper::isa
