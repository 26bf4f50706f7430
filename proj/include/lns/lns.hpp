#pragma once

// Umbrella header for the Lang-n-Send+m interpreter library.

#include "lns/atom.hpp"
#include "lns/canonical.hpp"
#include "lns/derive.hpp"
#include "lns/error.hpp"
#include "lns/parser.hpp"
#include "lns/process.hpp"
#include "lns/reducer.hpp"
#include "lns/regex.hpp"
#include "lns/term.hpp"
#include "lns/tss.hpp"
