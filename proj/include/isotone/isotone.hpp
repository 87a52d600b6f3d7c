#pragma once

#include "isotone/circuit.hpp"
#include "isotone/errors.hpp"
#include "isotone/iteration.hpp"
#include "isotone/matrix.hpp"
#include "isotone/newton.hpp"
#include "isotone/steady_state.hpp"
#include "isotone/vector.hpp"
