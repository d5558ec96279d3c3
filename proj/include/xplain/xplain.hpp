#pragma once

// Core engine: maps, MDPs, planning, preferences, explanations and sessions.
#include "xplain/dialogue.hpp"
#include "xplain/error.hpp"
#include "xplain/explainer.hpp"
#include "xplain/json.hpp"
#include "xplain/map.hpp"
#include "xplain/mdp.hpp"
#include "xplain/planner.hpp"
#include "xplain/preference.hpp"
