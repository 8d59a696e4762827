#pragma once

// Umbrella header: the whole library. Individual headers are fine too; only
// io/image_io.hpp and pipeline.hpp pull in OpenCV.

#include "uwcc/baselines.hpp"
#include "uwcc/camera.hpp"
#include "uwcc/chart.hpp"
#include "uwcc/errors.hpp"
#include "uwcc/estimation.hpp"
#include "uwcc/formation.hpp"
#include "uwcc/image.hpp"
#include "uwcc/io/csv.hpp"
#include "uwcc/io/image_io.hpp"
#include "uwcc/metrics.hpp"
#include "uwcc/pipeline.hpp"
#include "uwcc/sparse.hpp"
#include "uwcc/spectral.hpp"
#include "uwcc/water.hpp"
