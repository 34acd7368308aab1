#include "commu/gm_programs.hpp"

#include <array>
#include <stdexcept>

namespace commu {

namespace {

using I = Instrument;

// One entry per GM program 0..127.
constexpr std::array<Instrument, 128> kProgramCategory = {{
    // 0-7 piano
    I::Keyboard, I::Keyboard, I::Keyboard, I::Keyboard,
    I::Keyboard, I::Keyboard, I::Keyboard, I::Keyboard,
    // 8-15 chromatic percussion (celesta, glockenspiel, music box, ...)
    I::Idiophone, I::Idiophone, I::Idiophone, I::Idiophone,
    I::Idiophone, I::Idiophone, I::Idiophone, I::Idiophone,
    // 16-23 organ / accordion
    I::Keyboard, I::Keyboard, I::Keyboard, I::Keyboard,
    I::Keyboard, I::Keyboard, I::Keyboard, I::Keyboard,
    // 24-31 guitar
    I::PluckedString, I::PluckedString, I::PluckedString, I::PluckedString,
    I::PluckedString, I::PluckedString, I::PluckedString, I::PluckedString,
    // 32-39 bass
    I::PluckedString, I::PluckedString, I::PluckedString, I::PluckedString,
    I::PluckedString, I::PluckedString, I::PluckedString, I::PluckedString,
    // 40-46 strings/harp, 47 timpani
    I::String, I::String, I::String, I::String,
    I::String, I::String, I::String, I::Percussion,
    // 48-51 ensembles, 52-54 voice, 55 orchestra hit
    I::String, I::String, I::String, I::String,
    I::Others, I::Others, I::Others, I::Others,
    // 56-63 brass
    I::Wind, I::Wind, I::Wind, I::Wind, I::Wind, I::Wind, I::Wind, I::Wind,
    // 64-71 reed
    I::Wind, I::Wind, I::Wind, I::Wind, I::Wind, I::Wind, I::Wind, I::Wind,
    // 72-79 pipe
    I::Wind, I::Wind, I::Wind, I::Wind, I::Wind, I::Wind, I::Wind, I::Wind,
    // 80-87 synth lead
    I::Lead, I::Lead, I::Lead, I::Lead, I::Lead, I::Lead, I::Lead, I::Lead,
    // 88-95 synth pad
    I::Others, I::Others, I::Others, I::Others,
    I::Others, I::Others, I::Others, I::Others,
    // 96-103 synth effects
    I::Others, I::Others, I::Others, I::Others,
    I::Others, I::Others, I::Others, I::Others,
    // 104-111 ethnic: sitar, banjo, shamisen, koto, kalimba, bagpipe,
    // fiddle, shanai
    I::PluckedString, I::PluckedString, I::PluckedString, I::PluckedString,
    I::Idiophone, I::Wind, I::String, I::Wind,
    // 112-119 percussive
    I::Percussion, I::Percussion, I::Percussion, I::Percussion,
    I::Percussion, I::Percussion, I::Percussion, I::Percussion,
    // 120-127 sound effects
    I::Others, I::Others, I::Others, I::Others,
    I::Others, I::Others, I::Others, I::Others,
}};

constexpr std::array<int, 8> kRepresentativeProgram = {
    0,    // keyboard: acoustic grand piano
    80,   // lead: square lead
    10,   // idiophone: music box
    24,   // plucked_string: nylon guitar
    48,   // string: string ensemble 1
    73,   // wind: flute
    116,  // percussion: taiko drum
    96,   // others: FX rain
};

}  // namespace

Instrument instrument_category(int program) {
  if (program < 0 || program > 127) {
    throw std::invalid_argument("GM program out of range: " +
                                std::to_string(program));
  }
  return kProgramCategory[static_cast<std::size_t>(program)];
}

int representative_program(Instrument instrument) {
  return kRepresentativeProgram[static_cast<std::size_t>(instrument)];
}

}  // namespace commu
