#pragma once

#include "fcslrs/accumulator.hpp"
#include "fcslrs/bench.hpp"
#include "fcslrs/codec.hpp"
#include "fcslrs/endorsement.hpp"
#include "fcslrs/error.hpp"
#include "fcslrs/group_arith.hpp"
#include "fcslrs/hash.hpp"
#include "fcslrs/key_database.hpp"
#include "fcslrs/messages.hpp"
#include "fcslrs/random.hpp"
#include "fcslrs/scheme.hpp"
#include "fcslrs/transcript_json.hpp"
