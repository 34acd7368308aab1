#pragma once

#include "commu/types.hpp"

namespace commu {

// Fixed map from the 128 General MIDI programs to the 8 instrument
// categories.
Instrument instrument_category(int program);

// A representative GM program per category; instrument_category of the
// result round-trips to the category.
int representative_program(Instrument instrument);

}  // namespace commu
