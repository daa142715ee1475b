#pragma once

#include "commchar/brute_force.hpp"
#include "commchar/community.hpp"
#include "commchar/descriptor.hpp"
#include "commchar/measures.hpp"
#include "commchar/mining.hpp"
#include "commchar/network.hpp"
#include "commchar/pipeline.hpp"
#include "commchar/selection.hpp"
#include "commchar/synthetic.hpp"
#include "commchar/seqdb.hpp"
