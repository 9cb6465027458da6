#pragma once

#include "lvwave/model.hpp"
#include "lvwave/envelopes.hpp"
#include "lvwave/selection.hpp"
#include "lvwave/build.hpp"
#include "lvwave/certify.hpp"
#include "lvwave/kernel.hpp"
#include "lvwave/solve.hpp"
#include "lvwave/analyze.hpp"
#include "lvwave/pulse.hpp"
#include "lvwave/io.hpp"
