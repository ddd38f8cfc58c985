#pragma once

// Umbrella header: the whole laboratory.

#include "pilotwave/bell.hpp"
#include "pilotwave/double_slit.hpp"
#include "pilotwave/errors.hpp"
#include "pilotwave/evolution.hpp"
#include "pilotwave/fft.hpp"
#include "pilotwave/grid.hpp"
#include "pilotwave/guidance.hpp"
#include "pilotwave/io.hpp"
#include "pilotwave/pointer.hpp"
#include "pilotwave/potential.hpp"
#include "pilotwave/rng.hpp"
#include "pilotwave/sampling.hpp"
#include "pilotwave/spin.hpp"
#include "pilotwave/verify.hpp"
#include "pilotwave/wavefunction.hpp"
