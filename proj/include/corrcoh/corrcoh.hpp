#pragma once

#include "corrcoh/errors.hpp"
#include "corrcoh/rng.hpp"
#include "corrcoh/linalg.hpp"
#include "corrcoh/state.hpp"
#include "corrcoh/sampling.hpp"
#include "corrcoh/coherence.hpp"
#include "corrcoh/simplex.hpp"
#include "corrcoh/correlated.hpp"
#include "corrcoh/quantifiers.hpp"
#include "corrcoh/testbench.hpp"
