#pragma once

#include "rht/cluster.hpp"
#include "rht/detector.hpp"
#include "rht/errors.hpp"
#include "rht/geometry.hpp"
#include "rht/pipeline.hpp"
#include "rht/preprocess.hpp"
#include "rht/random.hpp"
#include "rht/raster.hpp"
#include "rht/raster_io.hpp"
#include "rht/synth.hpp"
#include "rht/types.hpp"
