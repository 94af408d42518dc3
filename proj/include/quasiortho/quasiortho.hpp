#pragma once

#include "quasiortho/decoherence.hpp"
#include "quasiortho/deff.hpp"
#include "quasiortho/errors.hpp"
#include "quasiortho/hilbert.hpp"
#include "quasiortho/io.hpp"
#include "quasiortho/limits.hpp"
#include "quasiortho/overlap_stats.hpp"
#include "quasiortho/packing.hpp"
#include "quasiortho/parallel.hpp"
#include "quasiortho/rng.hpp"
