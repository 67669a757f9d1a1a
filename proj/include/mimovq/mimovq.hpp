#pragma once

// Umbrella header for the MIMO vector-quantization detection laboratory.

#include "adabound.hpp"
#include "analysis.hpp"
#include "ber.hpp"
#include "config.hpp"
#include "constellation.hpp"
#include "dataset.hpp"
#include "detector.hpp"
#include "equalizer.hpp"
#include "gray.hpp"
#include "linalg.hpp"
#include "mapping.hpp"
#include "mlsd.hpp"
#include "mnnet.hpp"
#include "network.hpp"
#include "ops_count.hpp"
#include "recipes.hpp"
#include "rng.hpp"
#include "serialize.hpp"
#include "signal_model.hpp"
#include "training.hpp"
