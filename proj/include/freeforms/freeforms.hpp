#pragma once

#include "freeforms/admissibility.hpp"
#include "freeforms/characterization.hpp"
#include "freeforms/common.hpp"
#include "freeforms/convolution.hpp"
#include "freeforms/cumulants.hpp"
#include "freeforms/io.hpp"
#include "freeforms/linear_forms.hpp"
#include "freeforms/measures.hpp"
#include "freeforms/recover.hpp"
#include "freeforms/roots.hpp"
#include "freeforms/transforms.hpp"
