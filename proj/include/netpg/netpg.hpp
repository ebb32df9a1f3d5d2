#pragma once

#include "netpg/common.hpp"
#include "netpg/config_io.hpp"
#include "netpg/experiment.hpp"
#include "netpg/experiment_config.hpp"
#include "netpg/gibbs_policy.hpp"
#include "netpg/metrics.hpp"
#include "netpg/net_model.hpp"
#include "netpg/networks.hpp"
#include "netpg/olpomdp.hpp"
#include "netpg/oracles.hpp"
#include "netpg/packet.hpp"
#include "netpg/presets.hpp"
#include "netpg/random.hpp"
#include "netpg/reward_shaping.hpp"
#include "netpg/simulator.hpp"
