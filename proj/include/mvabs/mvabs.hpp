#pragma once

#include "model.hpp"
#include "semantics.hpp"
#include "abstraction.hpp"
#include "search.hpp"
#include "parser.hpp"
