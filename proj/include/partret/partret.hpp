#pragma once

// Umbrella header for the partition-retention screening library.

#include "partret/dataset.hpp"
#include "partret/elimination.hpp"
#include "partret/errors.hpp"
#include "partret/io.hpp"
#include "partret/marginal.hpp"
#include "partret/parallel.hpp"
#include "partret/partition.hpp"
#include "partret/permfdr.hpp"
#include "partret/ranking.hpp"
#include "partret/rng.hpp"
#include "partret/screening.hpp"
#include "partret/simgen.hpp"
