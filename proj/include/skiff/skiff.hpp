#pragma once

#include "skiff/alphabet.hpp"
#include "skiff/config.hpp"
#include "skiff/equivalence.hpp"
#include "skiff/event.hpp"
#include "skiff/hoare.hpp"
#include "skiff/kernel.hpp"
#include "skiff/model.hpp"
#include "skiff/properties.hpp"
#include "skiff/reach.hpp"
#include "skiff/report.hpp"
#include "skiff/security.hpp"
#include "skiff/state.hpp"
#include "skiff/unwinding.hpp"
#include "skiff/witness.hpp"
