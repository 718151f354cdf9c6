#pragma once

#include "fciplus/errors.hpp"
#include "fciplus/varset.hpp"
#include "fciplus/graph.hpp"
#include "fciplus/sepset.hpp"
#include "fciplus/oracle.hpp"
#include "fciplus/gauss_oracle.hpp"
#include "fciplus/pc_search.hpp"
#include "fciplus/augment.hpp"
#include "fciplus/possible_dsep.hpp"
#include "fciplus/dsep_plus.hpp"
#include "fciplus/orientation.hpp"
#include "fciplus/reference_fci.hpp"
#include "fciplus/generator.hpp"
#include "fciplus/pipeline.hpp"
#include "fciplus/io.hpp"
