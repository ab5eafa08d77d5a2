#pragma once

#include "spellbench/textnorm.hpp"
#include "spellbench/align.hpp"
#include "spellbench/triple.hpp"
#include "spellbench/metrics.hpp"
#include "spellbench/inject.hpp"
#include "spellbench/io.hpp"
