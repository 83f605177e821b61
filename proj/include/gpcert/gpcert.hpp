#pragma once

#include "gpcert/attack.hpp"
#include "gpcert/blobs.hpp"
#include "gpcert/bounds.hpp"
#include "gpcert/dataset.hpp"
#include "gpcert/errors.hpp"
#include "gpcert/gp.hpp"
#include "gpcert/io.hpp"
#include "gpcert/kernel.hpp"
#include "gpcert/normal.hpp"
#include "gpcert/sweep.hpp"
