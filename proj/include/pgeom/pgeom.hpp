#pragma once

// Umbrella header for the p-convex geometry toolkit.

#include "pgeom/core.hpp"
#include "pgeom/sym_matrix.hpp"
#include "pgeom/spectra.hpp"
#include "pgeom/pcone.hpp"
#include "pgeom/riesz.hpp"
#include "pgeom/fields.hpp"
#include "pgeom/hypersurface.hpp"
#include "pgeom/extremal.hpp"
#include "pgeom/hull.hpp"
