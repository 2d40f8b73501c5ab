#pragma once

#include "locnet/activation.hpp"
#include "locnet/capacity.hpp"
#include "locnet/harness.hpp"
#include "locnet/learn.hpp"
#include "locnet/netcore.hpp"
#include "locnet/partition.hpp"
#include "locnet/rng.hpp"
#include "locnet/targets.hpp"
#include "locnet/verify.hpp"
