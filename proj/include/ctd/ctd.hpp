#pragma once

#include "ctd/derive.hpp"
#include "ctd/ideality.hpp"
#include "ctd/model.hpp"
#include "ctd/model_file.hpp"
#include "ctd/obstruct.hpp"
#include "ctd/search.hpp"
#include "ctd/universe.hpp"
#include "ctd/verdict.hpp"
