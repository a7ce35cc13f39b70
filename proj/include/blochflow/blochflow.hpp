#pragma once

#include "blochflow/bloch.hpp"
#include "blochflow/channel.hpp"
#include "blochflow/divisibility.hpp"
#include "blochflow/errors.hpp"
#include "blochflow/format.hpp"
#include "blochflow/parallel.hpp"
#include "blochflow/report_json.hpp"
#include "blochflow/verify.hpp"
#include "blochflow/witness.hpp"
