// lbn - lifted Bregman training of feed-forward networks
// Copyright 2026 The lbn Authors
// Licensed under Apache 2.0

#pragma once

#include "lbn/baselines.hpp"
#include "lbn/bregman.hpp"
#include "lbn/config.hpp"
#include "lbn/data.hpp"
#include "lbn/experiments.hpp"
#include "lbn/metrics.hpp"
#include "lbn/model_io.hpp"
#include "lbn/network.hpp"
#include "lbn/objective.hpp"
#include "lbn/optim/admm.hpp"
#include "lbn/optim/coordinate_descent.hpp"
#include "lbn/optim/prox_grad.hpp"
#include "lbn/optim/step_sizes.hpp"
#include "lbn/optim/train_lbn.hpp"
#include "lbn/prox.hpp"
