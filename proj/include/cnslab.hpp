#pragma once

#include "cnslab/grid.hpp"
#include "cnslab/field.hpp"
#include "cnslab/fft.hpp"
#include "cnslab/spectral_ops.hpp"
#include "cnslab/propagator.hpp"
#include "cnslab/time_grid.hpp"
#include "cnslab/balls.hpp"
#include "cnslab/norms.hpp"
#include "cnslab/fractional.hpp"
#include "cnslab/duhamel.hpp"
#include "cnslab/path_norms.hpp"
#include "cnslab/rng.hpp"
#include "cnslab/presets.hpp"
#include "cnslab/solver.hpp"
#include "cnslab/diagnostics.hpp"
#include "cnslab/snapshot_io.hpp"
#include "cnslab/manifest.hpp"
#include "cnslab/report_io.hpp"
#include "cnslab/run.hpp"
