#pragma once

// Everything in one include.

#include "hsc/errors.hpp"
#include "hsc/fock.hpp"
#include "hsc/state.hpp"
#include "hsc/product_state.hpp"
#include "hsc/codes.hpp"
#include "hsc/generation.hpp"
#include "hsc/bell.hpp"
#include "hsc/gates.hpp"
#include "hsc/loss.hpp"
#include "hsc/experiment.hpp"
