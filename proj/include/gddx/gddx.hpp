#pragma once
#include "gddx/errors.hpp"
#include "gddx/core.hpp"
#include "gddx/gcs.hpp"
#include "gddx/ggb.hpp"
#include "gddx/diagram.hpp"
#include "gddx/union_find.hpp"
#include "gddx/rules.hpp"
#include "gddx/fact_db.hpp"
#include "gddx/engine.hpp"
#include "gddx/proof.hpp"
#include "gddx/i18n.hpp"
#include "gddx/polynomial.hpp"
#include "gddx/wu.hpp"
