#pragma once

#include "rideauction/instance.hpp"
#include "rideauction/instance_io.hpp"
#include "rideauction/prematch.hpp"
#include "rideauction/conflict_graph.hpp"
#include "rideauction/pricing.hpp"
#include "rideauction/mwis_exact.hpp"
#include "rideauction/mwis_sa.hpp"
#include "rideauction/instance_gen.hpp"
#include "rideauction/harness.hpp"
