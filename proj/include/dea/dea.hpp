#pragma once

// Umbrella header for the whole library.

#include "dea/bcc.hpp"
#include "dea/classify.hpp"
#include "dea/common.hpp"
#include "dea/dataset.hpp"
#include "dea/improve.hpp"
#include "dea/io.hpp"
#include "dea/lp.hpp"
#include "dea/sections.hpp"
#include "dea/synth.hpp"
#include "dea/terminal.hpp"
