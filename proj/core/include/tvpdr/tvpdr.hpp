#pragma once

#include "tvpdr/banded.hpp"
#include "tvpdr/data.hpp"
#include "tvpdr/distribution.hpp"
#include "tvpdr/error.hpp"
#include "tvpdr/evaluation.hpp"
#include "tvpdr/format.hpp"
#include "tvpdr/grid.hpp"
#include "tvpdr/model.hpp"
#include "tvpdr/persist.hpp"
#include "tvpdr/risk.hpp"
#include "tvpdr/rng.hpp"
#include "tvpdr/samplers.hpp"
