#pragma once

// Umbrella header for the biphoton frequency comb simulator.

#include "bfc/biphoton_state.hpp"
#include "bfc/config.hpp"
#include "bfc/constants.hpp"
#include "bfc/correlator.hpp"
#include "bfc/csv.hpp"
#include "bfc/dispersion.hpp"
#include "bfc/event_engine.hpp"
#include "bfc/franson.hpp"
#include "bfc/jsi_matrix.hpp"
#include "bfc/rng.hpp"
#include "bfc/schmidt.hpp"
#include "bfc/spectral_model.hpp"
#include "bfc/svg.hpp"
