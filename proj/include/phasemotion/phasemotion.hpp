#pragma once

// Umbrella header.

#include "phasemotion/errors.hpp"
#include "phasemotion/flow.hpp"
#include "phasemotion/formats.hpp"
#include "phasemotion/image.hpp"
#include "phasemotion/image_io.hpp"
#include "phasemotion/metrics.hpp"
#include "phasemotion/numeric.hpp"
#include "phasemotion/perturb.hpp"
#include "phasemotion/phase_motion.hpp"
#include "phasemotion/pyramid.hpp"
#include "phasemotion/version.hpp"
