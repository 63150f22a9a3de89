#pragma once

// Value-weighted return statistics from trade tapes.

#include "vawar/charfn.hpp"
#include "vawar/correlations.hpp"
#include "vawar/error.hpp"
#include "vawar/moments.hpp"
#include "vawar/synth.hpp"
#include "vawar/trade_tape.hpp"
