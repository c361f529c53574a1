#pragma once

#include "chronica/adjunction.hpp"
#include "chronica/cset.hpp"
#include "chronica/functor_tools.hpp"
#include "chronica/homomorphism.hpp"
#include "chronica/io.hpp"
#include "chronica/limits.hpp"
#include "chronica/narrative.hpp"
#include "chronica/schema.hpp"
#include "chronica/temporal_graph.hpp"
#include "chronica/timecat.hpp"
