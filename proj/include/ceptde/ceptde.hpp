#pragma once

// Umbrella header for the cepstral multipath time-delay estimation library.

#include "ceptde/autocorr.hpp"
#include "ceptde/cepstrogram.hpp"
#include "ceptde/cepstrum.hpp"
#include "ceptde/estimators.hpp"
#include "ceptde/eval.hpp"
#include "ceptde/fft.hpp"
#include "ceptde/geometry.hpp"
#include "ceptde/io.hpp"
#include "ceptde/signal.hpp"
#include "ceptde/spectrum.hpp"
#include "ceptde/synthesis.hpp"
#include "ceptde/wav.hpp"
