#pragma once

// Umbrella header: the content-centric delivery toolkit. Core domain types
// and the content-rate metric live in contentcast::, the PET codec in
// contentcast::pet, workload generation in contentcast::workload, delivery
// planning and simulation in contentcast::sched, and the OCP/NSP
// crowdsourcing matcher in contentcast::crowd.

#include "contentcast/achieve.hpp"
#include "contentcast/catalog.hpp"
#include "contentcast/crowd.hpp"
#include "contentcast/errors.hpp"
#include "contentcast/gf256.hpp"
#include "contentcast/pet.hpp"
#include "contentcast/plan.hpp"
#include "contentcast/rng.hpp"
#include "contentcast/sched.hpp"
#include "contentcast/workload.hpp"
