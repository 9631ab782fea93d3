#pragma once

// Per-goal policy learners: behavioral cloning, tabular Q-learning, PPO on
// the true reward, and adversarial imitation (GAIL / AIRL).

#include "grail/learners/adversarial.hpp"
#include "grail/learners/bc.hpp"
#include "grail/learners/hyperparams.hpp"
#include "grail/learners/ppo.hpp"
#include "grail/learners/qlearn.hpp"
#include "grail/learners/train_bank.hpp"
