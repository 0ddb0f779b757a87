#ifndef REFLOW_REFLOW_HPP
#define REFLOW_REFLOW_HPP

#include "reflow/dataflow.hpp"
#include "reflow/equivalence.hpp"
#include "reflow/errors.hpp"
#include "reflow/harness.hpp"
#include "reflow/json_io.hpp"
#include "reflow/manager.hpp"
#include "reflow/simulator.hpp"
#include "reflow/snapshot.hpp"
#include "reflow/validation.hpp"

#endif // REFLOW_REFLOW_HPP
